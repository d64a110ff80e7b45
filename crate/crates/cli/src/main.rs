// SPDX-License-Identifier: Apache-2.0

//! `pkcswb` command-line tool.
//!
//! Exit status: 0 on success, 1 when a signature, MAC, digest or scenario
//! check fails, 2 on usage or I/O errors. Set PKCSWB_SEED for reproducible
//! output.

mod files;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pkcswb::cms::{self, ContentInfo, SignerIdent};
use pkcswb::crypto::{random_bytes, HashAlg, SystemRandom};
use pkcswb::csr::{self, CertificationRequest, Name, NameAttr};
use pkcswb::keystore::{self, attribute_make, EncryptedPrivateKeyInfo, PrivateKeyInfo};
use pkcswb::pfx::{self, BagValue, Credentials, Mode, PfxOptions, PfxPdu, SafeBag};
use pkcswb::pkcs1::{self, PssParams, Scheme};
use pkcswb::pkcs5::{self, Pbkdf2Params, DEFAULT_ITERATIONS, DEFAULT_SALT_LEN};
use pkcswb::rsa;
use pkcswb::scenario::{self, Fault};
use pkcswb::token::{KeyTemplate, Token, UserType};

use files::{malformed, parse_octets, read, read_private_key, read_public_key, rng, spki_der, write, write_checked, CliError, CliResult};

#[derive(Parser)]
#[command(name = "pkcswb", version, about = "RSA, PKCS #1/#5/#8/#10/#12 and token workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Password,
    PublicKey,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Password => Mode::Password,
            ModeArg::PublicKey => Mode::PublicKey,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an RSA key (PKCS #8 PrivateKeyInfo, DER).
    Keygen {
        #[arg(long, default_value_t = 2048)]
        bits: usize,
        #[arg(long, default_value_t = 2)]
        primes: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the SubjectPublicKeyInfo here.
        #[arg(long = "pub")]
        public: Option<PathBuf>,
    },
    /// RSAES-OAEP (or v1.5 with --v15) encryption.
    RsaEncrypt {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        v15: bool,
    },
    RsaDecrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        v15: bool,
    },
    /// RSASSA-PSS signature with SHA-256.
    Sign {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Verify {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// PBKDF2 with HMAC-SHA256; prints the derived key in hex.
    Kdf {
        #[arg(long)]
        password: String,
        /// 0x-prefixed hex or literal text.
        #[arg(long)]
        salt: String,
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iter: u32,
        #[arg(long, default_value_t = 32)]
        len: usize,
    },
    /// Encrypt a PKCS #8 key under a password (PBES2).
    P8Wrap {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        password: String,
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iter: u32,
        #[arg(long)]
        out: PathBuf,
    },
    P8Unwrap {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        password: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Self-signed PKCS #10 request.
    CsrNew {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        cn: String,
        #[arg(long)]
        email: Option<String>,
        #[arg(long)]
        challenge: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    CsrVerify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Issue a toy certificate for a verified request.
    CertIssue {
        #[arg(long)]
        csr: PathBuf,
        #[arg(long)]
        ca_key: PathBuf,
        #[arg(long, default_value = "pkcswb CA")]
        ca_cn: String,
        #[arg(long, default_value_t = 1)]
        serial: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// signed-data around a data payload.
    CmsSign {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        cn: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Attach this toy certificate.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Sign the content octets directly, without signed attributes.
        #[arg(long)]
        no_attrs: bool,
    },
    CmsVerify {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    CmsEnvelope {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    CmsOpen {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// digested-data; with --check, verify and extract.
    CmsDigest {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        check: bool,
    },
    /// encrypted-data under a password (PBES2); --decrypt reverses it.
    CmsEncrypt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        password: String,
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iter: u32,
        #[arg(long)]
        decrypt: bool,
    },
    /// authenticated-data with a preshared HMAC key (hex).
    CmsAuth {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        key: String,
        #[arg(long)]
        check: bool,
    },
    /// List the layers of a ContentInfo.
    CmsDescribe {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Build a PFX (.pfxw) holding a key and optional certificate.
    PfxPack {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, value_enum, default_value = "password")]
        privacy: ModeArg,
        #[arg(long, value_enum, default_value = "password")]
        integrity: ModeArg,
        /// Password for both modes unless overridden below.
        #[arg(long)]
        password: Option<String>,
        #[arg(long)]
        privacy_password: Option<String>,
        #[arg(long)]
        integrity_password: Option<String>,
        /// Destination public key for public-key privacy.
        #[arg(long)]
        dest_pub: Option<PathBuf>,
        /// Source private key for public-key integrity.
        #[arg(long)]
        src_key: Option<PathBuf>,
        /// Shroud the key bag under this password.
        #[arg(long)]
        shroud: Option<String>,
        #[arg(long)]
        allow_plain_key: bool,
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iter: u32,
        #[arg(long)]
        out: PathBuf,
    },
    PfxUnpack {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        password: Option<String>,
        #[arg(long)]
        privacy_password: Option<String>,
        #[arg(long)]
        integrity_password: Option<String>,
        #[arg(long)]
        dest_key: Option<PathBuf>,
        #[arg(long)]
        src_pub: Option<PathBuf>,
        /// Password for a shrouded key bag.
        #[arg(long)]
        shroud: Option<String>,
        /// Write the recovered private key here.
        #[arg(long)]
        key_out: Option<PathBuf>,
    },
    /// Initialize a software token, provision a key and print its layout.
    TokenDemo {
        #[arg(long, default_value = "pkcswb token")]
        label: String,
        #[arg(long, default_value = "0000")]
        so_pin: String,
        #[arg(long, default_value = "1234")]
        pin: String,
        #[arg(long, default_value_t = 1024)]
        bits: usize,
    },
    /// Symmetric-equivalent strength of a u-prime modulus.
    Strength {
        #[arg(long)]
        bits: u32,
        #[arg(long, default_value_t = 2)]
        primes: u32,
    },
    /// End-to-end provisioning walk-through.
    Scenario {
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        fault: Option<Fault>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pkcswb: {}", e.message);
            if let Some(d) = &e.dump {
                eprint!("{}", files::hex_dump(d));
            }
            ExitCode::from(e.code)
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::usage(e)
}

fn read_ci(path: &Path) -> CliResult<ContentInfo> {
    let bytes = read(path)?;
    ContentInfo::from_der(&bytes).map_err(|e| malformed(path, &bytes, e))
}

/// The payload of a data ContentInfo, otherwise its DER.
fn unwrap_payload(ci: &ContentInfo) -> Vec<u8> {
    ci.data_payload().map(<[u8]>::to_vec).unwrap_or_else(|_| ci.to_der())
}

fn write_ci(path: &Path, ci: &ContentInfo) -> CliResult {
    write_checked(path, &ci.to_der(), |b| ContentInfo::from_der(b).is_ok())
}

fn run(cmd: Command) -> CliResult {
    let mut rng = rng();
    match cmd {
        Command::Keygen { bits, primes, out, public } => {
            let e = 65537u32.into();
            let (pk, sk) = rsa::generate_key(bits, primes, &e, rng.as_mut()).map_err(usage)?;
            write_checked(&out, &keystore::encode_private_key(&sk, Vec::new()), |b| {
                keystore::decode_private_key(b).is_ok()
            })?;
            if let Some(p) = public {
                write(&p, &spki_der(&pk))?;
            }
            eprintln!("{}-bit key, {} primes", pk.modulus_bits(), sk.prime_count());
        }
        Command::RsaEncrypt { public, input, out, v15 } => {
            let pk = read_public_key(&public)?;
            let scheme = if v15 { Scheme::V15 } else { Scheme::oaep_for(&pk) };
            let c = pkcs1::encrypt(&read(&input)?, &pk, &scheme, rng.as_mut()).map_err(usage)?;
            write(&out, &c)?;
        }
        Command::RsaDecrypt { key, input, out, v15 } => {
            let sk = read_private_key(&key)?;
            let scheme = if v15 { Scheme::V15 } else { Scheme::oaep_for(&sk.public_key()) };
            let m = pkcs1::decrypt(&read(&input)?, &sk, &scheme).map_err(CliError::failed)?;
            write(&out, &m)?;
        }
        Command::Sign { key, input, out } => {
            let sk = read_private_key(&key)?;
            let params = PssParams::fitted(sk.modulus_bits());
            let s = pkcs1::sign(&read(&input)?, &sk, &params, rng.as_mut()).map_err(usage)?;
            write(&out, &s)?;
        }
        Command::Verify { public, input, sig } => {
            let pk = read_public_key(&public)?;
            let params = PssParams::fitted(pk.modulus_bits());
            let s = read(&sig)?;
            if !pkcs1::verify(&read(&input)?, &s, &pk, &params) {
                return Err(CliError::failed("signature invalid").with_dump(&s));
            }
            println!("signature ok");
        }
        Command::Kdf { password, salt, iter, len } => {
            let dk = pkcs5::pbkdf2(password.as_bytes(), &Pbkdf2Params::new(&parse_octets(&salt)?, iter, len)).map_err(usage)?;
            println!("{}", hex::encode(dk));
        }
        Command::P8Wrap { key, password, iter, out } => {
            let bytes = read(&key)?;
            let pki = PrivateKeyInfo::from_der(&bytes).map_err(|e| malformed(&key, &bytes, e))?;
            let salt = random_bytes(rng.as_mut(), DEFAULT_SALT_LEN).map_err(usage)?;
            let epki = keystore::encrypt_private_key(&pki, password.as_bytes(), &salt, iter, rng.as_mut()).map_err(usage)?;
            write_checked(&out, &epki.to_der(), |b| EncryptedPrivateKeyInfo::from_der(b).is_ok())?;
        }
        Command::P8Unwrap { input, password, out } => {
            let bytes = read(&input)?;
            let epki = EncryptedPrivateKeyInfo::from_der(&bytes).map_err(|e| malformed(&input, &bytes, e))?;
            let pki = keystore::decrypt_private_key(&epki, password.as_bytes()).map_err(CliError::failed)?;
            write(&out, &pki.to_der())?;
        }
        Command::CsrNew { key, cn, email, challenge, out } => {
            let sk = read_private_key(&key)?;
            let mut entries = vec![(NameAttr::CommonName, cn)];
            if let Some(e) = email {
                entries.push((NameAttr::EmailAddress, e));
            }
            let mut attrs = Vec::new();
            if let Some(c) = challenge {
                attrs.push(attribute_make("challengePassword", c.as_str()).map_err(usage)?);
            }
            let req = csr::build_csr(Name::new(entries).map_err(usage)?, &sk, attrs, rng.as_mut()).map_err(usage)?;
            write_checked(&out, &req.to_der(), |b| csr::verify_csr_der(b) == Ok(true))?;
        }
        Command::CsrVerify { input } => {
            let bytes = read(&input)?;
            match csr::verify_csr_der(&bytes) {
                Ok(true) => println!("request ok"),
                Ok(false) => return Err(CliError::failed("request signature invalid")),
                Err(e) => return Err(malformed(&input, &bytes, e)),
            }
        }
        Command::CertIssue { csr: csr_path, ca_key, ca_cn, serial, out } => {
            let bytes = read(&csr_path)?;
            let req = CertificationRequest::from_der(&bytes).map_err(|e| malformed(&csr_path, &bytes, e))?;
            let ca = read_private_key(&ca_key)?;
            let name = Name::common_name(&ca_cn).map_err(usage)?;
            let cert = cms::toy_issue(&req, &ca, &name, serial, rng.as_mut()).map_err(CliError::failed)?;
            write_ci(&out, &cert)?;
        }
        Command::CmsSign { key, cn, input, out, cert, no_attrs } => {
            let sk = read_private_key(&key)?;
            let signer = SignerIdent::for_key(Name::common_name(&cn).map_err(usage)?, &sk.public_key());
            let certs = match cert {
                Some(c) => vec![read_ci(&c)?],
                None => Vec::new(),
            };
            let attrs = if no_attrs {
                Vec::new()
            } else {
                vec![attribute_make("signingTime", "20261016000000Z").map_err(usage)?]
            };
            let inner = cms::make_data(&read(&input)?);
            let ci = cms::sign_data(&inner, &sk, &signer, &attrs, &certs, rng.as_mut()).map_err(usage)?;
            write_ci(&out, &ci)?;
        }
        Command::CmsVerify { public, input, out } => {
            let pk = read_public_key(&public)?;
            let ci = read_ci(&input)?;
            let inner = cms::verify_signed(&ci, &pk).map_err(CliError::failed)?;
            if let Some(o) = out {
                write(&o, &unwrap_payload(&inner))?;
            }
            println!("signature ok");
        }
        Command::CmsEnvelope { public, input, out } => {
            let pk = read_public_key(&public)?;
            let ci = cms::envelope(&cms::make_data(&read(&input)?), &pk, rng.as_mut()).map_err(usage)?;
            write_ci(&out, &ci)?;
        }
        Command::CmsOpen { key, input, out } => {
            let sk = read_private_key(&key)?;
            let inner = cms::open_envelope(&read_ci(&input)?, &sk).map_err(CliError::failed)?;
            write(&out, &unwrap_payload(&inner))?;
        }
        Command::CmsDigest { input, out, check } => {
            if check {
                let ci = read_ci(&input)?;
                if !cms::check_digest(&ci) {
                    return Err(CliError::failed("digest mismatch"));
                }
                if let Some(o) = out {
                    write(&o, &unwrap_payload(&cms::extract_digested(&ci).map_err(CliError::failed)?))?;
                }
                println!("digest ok");
            } else {
                let o = out.ok_or_else(|| usage("--out is required"))?;
                write_ci(&o, &cms::digest_data(&cms::make_data(&read(&input)?), HashAlg::Sha256))?;
            }
        }
        Command::CmsEncrypt { input, out, password, iter, decrypt } => {
            if decrypt {
                let inner = cms::decrypt_data_with_password(&read_ci(&input)?, password.as_bytes()).map_err(CliError::failed)?;
                write(&out, &unwrap_payload(&inner))?;
            } else {
                let salt = random_bytes(rng.as_mut(), DEFAULT_SALT_LEN).map_err(usage)?;
                let inner = cms::make_data(&read(&input)?);
                let ci = cms::encrypt_data_with_password(&inner, password.as_bytes(), &salt, iter, rng.as_mut()).map_err(usage)?;
                write_ci(&out, &ci)?;
            }
        }
        Command::CmsAuth { input, out, key, check } => {
            let key = hex::decode(key.trim_start_matches("0x")).map_err(|e| usage(format!("bad key hex: {e}")))?;
            if check {
                let ci = read_ci(&input)?;
                if !cms::check_auth(&ci, &key) {
                    return Err(CliError::failed("MAC mismatch"));
                }
                if let Some(o) = out {
                    write(&o, &unwrap_payload(&cms::extract_authenticated(&ci, &key).map_err(CliError::failed)?))?;
                }
                println!("MAC ok");
            } else {
                let o = out.ok_or_else(|| usage("--out is required"))?;
                write_ci(&o, &cms::authenticate_data(&cms::make_data(&read(&input)?), &key, &[]))?;
            }
        }
        Command::CmsDescribe { input } => {
            for line in cms::describe(&read_ci(&input)?) {
                println!("{line}");
            }
        }
        Command::PfxPack {
            key,
            cert,
            name,
            privacy,
            integrity,
            password,
            privacy_password,
            integrity_password,
            dest_pub,
            src_key,
            shroud,
            allow_plain_key,
            iter,
            out,
        } => {
            let sk = read_private_key(&key)?;
            let pki = PrivateKeyInfo::from_key(&sk, Vec::new());
            let mut key_bag = match shroud {
                Some(pw) => {
                    let salt = random_bytes(rng.as_mut(), DEFAULT_SALT_LEN).map_err(usage)?;
                    let epki = keystore::encrypt_private_key(&pki, pw.as_bytes(), &salt, iter, rng.as_mut()).map_err(usage)?;
                    SafeBag::shrouded_key(epki)
                }
                None => SafeBag::key(pki),
            };
            if let Some(n) = &name {
                key_bag = key_bag.with_friendly_name(n).map_err(usage)?;
            }
            let mut bags = vec![key_bag];
            if let Some(c) = cert {
                let id = cms::key_id(&sk.public_key());
                let first = bags.pop().expect("key bag").with_local_key_id(&id);
                bags.push(first);
                bags.push(SafeBag::cert(read_ci(&c)?).with_local_key_id(&id));
            }
            let creds = Credentials {
                privacy_password: privacy_password.or(password.clone()).map(String::into_bytes),
                integrity_password: integrity_password.or(password).map(String::into_bytes),
                destination: dest_pub.as_deref().map(read_public_key).transpose()?,
                source_key: src_key.as_deref().map(read_private_key).transpose()?,
                ..Default::default()
            };
            let opts = PfxOptions { iterations: iter, allow_plain_key };
            let (pdu, warnings) = pfx::pfx_create(&bags, privacy.into(), integrity.into(), &creds, &opts, rng.as_mut()).map_err(usage)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            if out.extension().and_then(|e| e.to_str()) != Some("pfxw") {
                eprintln!("note: .pfxw is the usual extension for these files");
            }
            write_checked(&out, &pdu.to_der(), |b| PfxPdu::from_der(b).is_ok())?;
        }
        Command::PfxUnpack {
            input,
            password,
            privacy_password,
            integrity_password,
            dest_key,
            src_pub,
            shroud,
            key_out,
        } => {
            let bytes = read(&input)?;
            let pdu = PfxPdu::from_der(&bytes).map_err(|e| malformed(&input, &bytes, e))?;
            let creds = Credentials {
                privacy_password: privacy_password.or(password.clone()).map(String::into_bytes),
                integrity_password: integrity_password.or(password).map(String::into_bytes),
                destination_key: dest_key.as_deref().map(read_private_key).transpose()?,
                source: src_pub.as_deref().map(read_public_key).transpose()?,
                ..Default::default()
            };
            let bags = pfx::pfx_open(&pdu, &creds).map_err(|e| match e {
                pfx::PfxError::IntegrityFailure | pfx::PfxError::DecryptionError => CliError::failed(e),
                e => usage(e),
            })?;
            let mut recovered = None;
            for b in &bags {
                let id = b.local_key_id().map(hex::encode).unwrap_or_default();
                println!("{} name={} localKeyId={id}", b.kind_name(), b.friendly_name().unwrap_or(""));
                match &b.value {
                    BagValue::Key(pki) => recovered = Some(pki.clone()),
                    BagValue::ShroudedKey(epki) => {
                        if let Some(pw) = &shroud {
                            recovered = Some(keystore::decrypt_private_key(epki, pw.as_bytes()).map_err(CliError::failed)?);
                        }
                    }
                    BagValue::Cert(_) => {}
                }
            }
            if let Some(o) = key_out {
                let pki = recovered.ok_or_else(|| usage("no key recovered (shrouded bag needs --shroud)"))?;
                write(&o, &pki.to_der())?;
            }
        }
        Command::TokenDemo { label, so_pin, pin, bits } => token_demo(&label, so_pin.as_bytes(), pin.as_bytes(), bits)?,
        Command::Strength { bits, primes } => match rsa::strength_lookup(bits, primes) {
            Some(s) => println!("{s}"),
            None => {
                return Err(usage(format!(
                    "no table entry for {bits} bits with {primes} primes (NFS estimate {:.0})",
                    rsa::nfs_advisory_estimate(bits)
                )))
            }
        },
        Command::Scenario { seed, fault } => {
            let seed = seed.or_else(|| std::env::var(files::SEED_VAR).ok()).unwrap_or_else(|| "pkcswb".into());
            let report = scenario::run_scenario(seed.as_bytes(), fault);
            print!("{report}");
            if !report.passed() {
                return Err(CliError::failed(format!("scenario failed at {}", report.failed_step().unwrap_or("?"))));
            }
        }
    }
    Ok(())
}

fn token_demo(label: &str, so_pin: &[u8], pin: &[u8], bits: usize) -> CliResult {
    let token = match std::env::var(files::SEED_VAR) {
        Ok(seed) => Token::seeded(label, seed.as_bytes()),
        Err(_) => Token::new(label, Box::new(SystemRandom)),
    };
    let t = |e: pkcswb::token::TokenError| usage(e);
    token.initialize(so_pin).map_err(t)?;
    let s = token.open_session(true).map_err(t)?;
    token.login(s, UserType::So, so_pin).map_err(t)?;
    token.init_user_pin(s, pin).map_err(t)?;
    token.logout(s).map_err(t)?;
    token.login(s, UserType::User, pin).map_err(t)?;
    let template = KeyTemplate { label: "demo".into(), id: vec![1], ..Default::default() };
    let (public, private) = token.generate_key_pair(s, bits, 2, &template).map_err(t)?;
    let msg = b"token demo";
    let sig = token.sign(s, private, msg).map_err(t)?;
    if !token.verify(s, public, msg, &sig).map_err(t)? {
        return Err(CliError::failed("token signature invalid"));
    }
    eprintln!("signed and verified {} octets with handle {}", msg.len(), private.0);
    print!("{}", token.export_pkcs15_layout());
    token.close_all_sessions();
    Ok(())
}
