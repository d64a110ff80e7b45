//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Built with `harness = false` so the lines are printed on every run, not
//! only on failure. The process exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use pkcswb::cms::{self, ContentInfo, SignerIdent};
use pkcswb::crypto::{ConstantSource, RandomSource, SeededStream};
use pkcswb::csr::{self, CertificationRequest, Name};
use pkcswb::der::{DerError, DerValue, Oid, TagClass};
use pkcswb::keystore::{self, attribute_make, EncryptedPrivateKeyInfo, PrivateKeyInfo};
use pkcswb::pfx::{self, Credentials, Mode, PfxOptions, PfxPdu, SafeBag};
use pkcswb::pkcs1::{self, OaepParams, Pkcs1Error, PssParams, Scheme};
use pkcswb::pkcs5::{self, Pbkdf2Params};
use pkcswb::rsa::{self, RsaPrivateKey, RsaPublicKey};
use pkcswb::scenario::{self, Fault, STEP_NAMES};
use pkcswb::token::{AttrType, AttrValue, KeyTemplate, KeyType, LoginState, ObjectClass, SessionEvent, Token, TokenError, UserType};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Opener<'a> = Box<dyn Fn(&ContentInfo) -> Option<ContentInfo> + 'a>;

fn main() {
    let criteria: [Criterion; 9] = [
        ("strength table", c1_strength_table),
        ("multiprime CRT", c2_multiprime),
        ("padding layouts", c3_padding_layouts),
        ("uniform decryption errors", c4_uniform_errors),
        ("PBKDF2 oracle and cost", c5_pbkdf2),
        ("container round-trips", c6_round_trips),
        ("token access control", c7_token),
        ("scenario", c8_scenario),
        ("DER fuzz", c9_der_fuzz),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why} [{ms} ms]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    ensure(start.elapsed() < limit, format!("{what} took {:?}, limit {limit:?}", start.elapsed()))
}

fn e65537() -> BigUint {
    BigUint::from(65537u32)
}

fn key(bits: usize, primes: usize, seed: &[u8]) -> (RsaPublicKey, RsaPrivateKey) {
    rsa::generate_key(bits, primes, &e65537(), &mut SeededStream::new(seed)).unwrap()
}

// independent SHA-256 based oracles

fn sha256(parts: &[&[u8]]) -> Vec<u8> {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    h.finalize().to_vec()
}

fn hmac_oracle(key: &[u8], msg: &[u8]) -> Vec<u8> {
    let mut k = if key.len() > 64 { sha256(&[key]) } else { key.to_vec() };
    k.resize(64, 0);
    let ipad: Vec<u8> = k.iter().map(|b| b ^ 0x36).collect();
    let opad: Vec<u8> = k.iter().map(|b| b ^ 0x5c).collect();
    sha256(&[&opad, &sha256(&[&ipad, msg])])
}

fn mgf1_oracle(seed: &[u8], len: usize) -> Vec<u8> {
    let mut out = Vec::new();
    let mut counter = 0u32;
    while out.len() < len {
        out.extend(sha256(&[seed, &counter.to_be_bytes()]));
        counter += 1;
    }
    out.truncate(len);
    out
}

fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

// 1

/// (symmetric key size, modulus size, u) as printed in the paper.
const PAPER_TABLE: [(u32, u32, u32); 18] = [
    (80, 1024, 2),
    (73, 1024, 3),
    (112, 2335, 3),
    (100, 2335, 4),
    (88, 2335, 5),
    (128, 3072, 3),
    (117, 3072, 4),
    (103, 3072, 5),
    (93, 3072, 6),
    (192, 7680, 4),
    (175, 7680, 5),
    (158, 7680, 6),
    (144, 7680, 7),
    (125, 7680, 9),
    (256, 15360, 5),
    (235, 15360, 6),
    (215, 15360, 7),
    (199, 15360, 8),
];

fn c1_strength_table() -> Outcome {
    let start = Instant::now();
    for (strength, bits, u) in PAPER_TABLE {
        let got = rsa::strength_lookup(bits, u);
        ensure(got == Some(strength), format!("({bits}, {u}) gave {got:?}, expected {strength}"))?;
    }
    for (bits, u) in [(1024, 4), (2048, 2), (2335, 2), (7680, 8), (15360, 4), (0, 0)] {
        ensure(rsa::strength_lookup(bits, u).is_none(), format!("({bits}, {u}) is not in the table"))?;
    }
    within(start, Duration::from_secs(1), "lookup")?;
    Ok("18/18 rows exact, 6 off-table pairs rejected".into())
}

// 2

fn c2_multiprime() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededStream::new(b"acceptance sweep");
    let mut checked = 0;
    for u in 2..=4usize {
        for seed in 0..4u8 {
            // 20-bit primes
            let (pk, sk) = key(20 * u, u, &[b'k', u as u8, seed]);
            ensure(sk.primes().iter().all(|r| r.bits() <= 24), "prime wider than 24 bits")?;
            let n = pk.n().clone();
            for _ in 0..2500 {
                let mut buf = vec![0u8; n.bits().div_ceil(8) as usize + 4];
                rng.fill(&mut buf).unwrap();
                let x = BigUint::from_bytes_be(&buf) % &n;
                let crt = sk.private_op(&x).unwrap();
                ensure(crt == x.modpow(sk.d(), &n), format!("CRT differs from x^d mod n for u={u}, x={x}"))?;
                ensure(crt == sk.private_op_naive(&x).unwrap(), "CRT differs from the naive path")?;
                ensure(sk.private_op(&pk.public_op(&x).unwrap()).unwrap() == x, "decrypt(encrypt(m)) != m")?;
                ensure(pk.public_op(&crt).unwrap() == x, "verify(sign(m)) != m")?;
                checked += 1;
            }
        }
    }
    within(start, Duration::from_secs(30), "sweep")?;
    Ok(format!("{checked} samples over u=2,3,4 (20-bit primes)"))
}

// 3

fn c3_padding_layouts() -> Outcome {
    let mut notes = Vec::new();
    let mut rng = SeededStream::new(b"layouts");
    for k in [32usize, 64, 128] {
        // EME-PKCS1-v1_5 under a constant 0xFF source: 00 02 FF.. 00 M
        for m in [vec![0xAB], vec![0x5A; k - 11]] {
            let em = pkcs1::eme_v15_pad(&m, k, &mut ConstantSource(0xFF)).map_err(|e| e.to_string())?;
            let mut expected = vec![0x00, 0x02];
            expected.extend(std::iter::repeat_n(0xFF, k - 3 - m.len()));
            expected.push(0x00);
            expected.extend(&m);
            ensure(em == expected, format!("v1.5 layout k={k} |M|={}", m.len()))?;
        }
        ensure(
            pkcs1::eme_v15_pad(&vec![0; k - 10], k, &mut ConstantSource(0xFF)).is_err(),
            format!("v1.5 k={k} accepted a PS shorter than 8"),
        )?;

        // EME-OAEP: leading 00, then maskedSeed || maskedDB unmasked by an
        // independent MGF1
        let oaep = OaepParams::new(k);
        let m = b"oaep";
        let oaep_note = match pkcs1::oaep_encode(m, &oaep, &mut rng) {
            Err(e) => {
                ensure(k < 2 * 32 + 3 + m.len(), format!("OAEP refused k={k}: {e}"))?;
                "oaep infeasible".to_string()
            }
            Ok(em) => {
                ensure(em.len() == k && em[0] == 0x00, format!("OAEP EM k={k} leading octet {:02x}", em[0]))?;
                let (masked_seed, masked_db) = em[1..].split_at(32);
                let seed = xor(masked_seed, &mgf1_oracle(masked_db, 32));
                let db = xor(masked_db, &mgf1_oracle(&seed, k - 33));
                let mut expected = sha256(&[b""]);
                expected.resize(k - 33 - m.len() - 1, 0);
                expected.push(0x01);
                expected.extend(m);
                ensure(db == expected, format!("OAEP DB layout k={k}"))?;
                "oaep ok".to_string()
            }
        };

        // EMSA-PSS: trailer bc, leading bits cleared, H = Hash(M') checked
        // independently
        let mut pss_notes = Vec::new();
        for bits in [8 * k, 8 * k - 3, 8 * k - 7] {
            let params = PssParams::fitted(bits);
            let msg = b"pss layout";
            match pkcs1::pss_encode(msg, &params, &mut rng) {
                Err(_) => {
                    ensure(!params.is_feasible(), format!("PSS refused a feasible k={k}"))?;
                    ensure(k < 32 + 2, format!("PSS infeasible at k={k} bits={bits}"))?;
                    pss_notes.push(format!("{bits}b infeasible"));
                }
                Ok(em) => {
                    let cleared = 8 * k + 1 - bits;
                    ensure(em.len() == k, "PSS EM length")?;
                    ensure(em[k - 1] == 0xbc, format!("PSS trailer {:02x}", em[k - 1]))?;
                    let top_mask = if cleared >= 8 { 0xFF } else { !(0xFFu8 >> cleared) };
                    ensure(em[0] & top_mask == 0, format!("PSS top {cleared} bits not cleared at bits={bits}"))?;
                    let (masked_db, h) = em[..k - 1].split_at(k - 33);
                    let mut db = xor(masked_db, &mgf1_oracle(h, k - 33));
                    if cleared < 8 {
                        db[0] &= 0xFF >> cleared;
                    } else {
                        db[0] = 0;
                    }
                    let one = db.iter().position(|&b| b != 0).ok_or("PSS DB has no delimiter")?;
                    ensure(db[one] == 0x01, "PSS DB delimiter")?;
                    let salt = &db[one + 1..];
                    ensure(salt.len() == params.salt_len, "PSS salt length")?;
                    let m_prime_hash = sha256(&[&[0u8; 8], &sha256(&[msg]), salt]);
                    ensure(h == m_prime_hash.as_slice(), "PSS H != Hash(M')")?;
                    pss_notes.push(format!("{bits}b salt {}", salt.len()));
                }
            }
        }
        notes.push(format!("k={k}: v1.5 ok, {oaep_note}, pss [{}]", pss_notes.join(", ")));
    }
    Ok(notes.join("; "))
}

// 4

fn c4_uniform_errors() -> Outcome {
    let (pk, sk) = key(1024, 2, b"uniform errors");
    let k = pk.modulus_len();
    let seal = |em: &[u8]| pkcs1::i2osp(&pk.public_op(&pkcs1::os2ip(em)).unwrap(), k).unwrap();
    let too_big = vec![0xFF; k];
    let short = |c: Vec<u8>| c[1..].to_vec();

    let v15 = |first: u8, bt: u8, ps: usize, delim: bool| {
        let mut em = vec![first, bt];
        em.extend(std::iter::repeat_n(0x77, ps));
        if delim {
            em.push(0);
        }
        em.resize(k, 0x42);
        em
    };
    let good_v15 = seal(&v15(0, 2, 8, true));
    ensure(pkcs1::decrypt(&good_v15, &sk, &Scheme::V15).is_ok(), "well-formed v1.5 block rejected")?;
    let v15_cases: Vec<(&str, Vec<u8>)> = vec![
        ("leading octet 01", seal(&v15(1, 2, 8, true))),
        ("block type 01", seal(&v15(0, 1, 8, true))),
        ("no zero delimiter", seal(&{
            let mut e = v15(0, 2, k - 2, false);
            e.iter_mut().skip(2).for_each(|b| *b = 0x99);
            e
        })),
        ("PS of 5 octets", seal(&v15(0, 2, 5, true))),
        ("empty PS", seal(&v15(0, 2, 0, true))),
        ("ciphertext one octet short", short(good_v15.clone())),
        ("ciphertext >= n", too_big.clone()),
    ];

    let oaep_em = |y: u8, label: &[u8], sep: u8, zeros_only: bool| {
        let mut db = sha256(&[label]);
        let m = b"msg";
        db.resize(k - 33 - m.len() - 1, 0);
        if zeros_only {
            db.resize(k - 33, 0);
        } else {
            db.push(sep);
            db.extend(m);
        }
        let seed = [0x3cu8; 32];
        let masked_db = xor(&db, &mgf1_oracle(&seed, k - 33));
        let masked_seed = xor(&seed, &mgf1_oracle(&masked_db, 32));
        let mut em = vec![y];
        em.extend(masked_seed);
        em.extend(masked_db);
        em
    };
    let oaep = Scheme::oaep_for(&pk);
    let good_oaep = seal(&oaep_em(0, b"", 1, false));
    ensure(pkcs1::decrypt(&good_oaep, &sk, &oaep) == Ok(b"msg".to_vec()), "well-formed OAEP block rejected")?;
    let mut random = vec![0u8; k];
    SeededStream::new(b"noise").fill(&mut random).unwrap();
    random[0] = 0x01;
    let oaep_cases: Vec<(&str, Vec<u8>)> = vec![
        ("Y = 01", seal(&oaep_em(1, b"", 1, false))),
        ("lHash mismatch", seal(&oaep_em(0, b"other label", 1, false))),
        ("no 01 separator", seal(&oaep_em(0, b"", 1, true))),
        ("stray 02 before separator", seal(&oaep_em(0, b"", 2, false))),
        ("ciphertext one octet short", short(good_oaep.clone())),
        ("ciphertext >= n", too_big),
        ("random ciphertext", random),
    ];

    let mut seen = Vec::new();
    for (scheme, name, cases) in [("v1.5", Scheme::V15, &v15_cases), ("OAEP", oaep, &oaep_cases)].map(|(n, s, c)| (n, s, c)) {
        for (what, c) in cases {
            match pkcs1::decrypt(c, &sk, &name) {
                Ok(_) => return Err(format!("{scheme} {what}: decrypted")),
                Err(e) => seen.push((scheme, *what, e)),
            }
        }
    }
    let first = seen[0].2.clone();
    for (scheme, what, e) in &seen {
        ensure(e == &first, format!("{scheme} {what} gave {e:?}, others {first:?}"))?;
    }
    ensure(first == Pkcs1Error::DecryptionError, "error is not DecryptionError")?;
    Ok(format!("{} v1.5 + {} OAEP malformations -> identical {first:?}", v15_cases.len(), oaep_cases.len()))
}

// 5

fn pbkdf2_oracle(p: &[u8], s: &[u8], c: u32, dk_len: usize) -> Vec<u8> {
    let mut out = Vec::new();
    let mut i = 1u32;
    while out.len() < dk_len {
        let mut msg = s.to_vec();
        msg.extend(i.to_be_bytes());
        let mut u = hmac_oracle(p, &msg);
        let mut t = u.clone();
        for _ in 1..c {
            u = hmac_oracle(p, &u);
            t = xor(&t, &u);
        }
        out.extend(t);
        i += 1;
    }
    out.truncate(dk_len);
    out
}

fn c5_pbkdf2() -> Outcome {
    let mut cells = 0;
    for (p, s) in [(&b"password"[..], &b"saltSALT"[..]), (b"x", &[0u8; 8]), (&[0xAA; 80], b"long key")] {
        for c in [1, 2, 1000] {
            for dk_len in [31, 32, 69] {
                let dk = pkcs5::pbkdf2(p, &Pbkdf2Params::new(s, c, dk_len)).map_err(|e| e.to_string())?;
                ensure(dk == pbkdf2_oracle(p, s, c, dk_len), format!("c={c} dkLen={dk_len}"))?;
                cells += 1;
            }
        }
    }
    let time = |c: u32| {
        (0..7)
            .map(|_| {
                let t = Instant::now();
                pkcs5::pbkdf2(b"timing", &Pbkdf2Params::new(b"saltsalt", c, 32)).unwrap();
                t.elapsed()
            })
            .min()
            .unwrap()
    };
    time(1000);
    let ratio = time(4000).as_secs_f64() / time(1000).as_secs_f64();
    ensure((3.0..=5.0).contains(&ratio), format!("time(4000)/time(1000) = {ratio:.2}"))?;
    Ok(format!("{cells} grid cells match the naive loop, cost ratio {ratio:.2}"))
}

// 6

fn reencodes<T: PartialEq + std::fmt::Debug>(
    what: &str,
    der: &[u8],
    original: &T,
    decode: impl Fn(&[u8]) -> Option<T>,
    encode: impl Fn(&T) -> Vec<u8>,
) -> Result<(), String> {
    let back = decode(der).ok_or(format!("{what}: decode failed"))?;
    ensure(&back == original, format!("{what}: structure differs after decode"))?;
    ensure(encode(&back) == der, format!("{what}: re-encoding differs"))
}

fn c6_round_trips() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededStream::new(b"round trips");
    let (pk, sk) = key(1024, 2, b"alice");
    let (ca_pk, ca_sk) = key(1024, 3, b"ca");
    let mut done = Vec::new();

    let pki = PrivateKeyInfo::from_key(&sk, vec![attribute_make("friendlyName", "alice").unwrap()]);
    reencodes("PKCS#8", &pki.to_der(), &pki, |b| PrivateKeyInfo::from_der(b).ok(), PrivateKeyInfo::to_der)?;
    ensure(pki.key().unwrap() == sk, "PKCS#8 key differs")?;
    let epki = keystore::encrypt_private_key(&pki, b"pw", b"saltsalt", 100, &mut rng).unwrap();
    reencodes("PKCS#8 PBES2", &epki.to_der(), &epki, |b| EncryptedPrivateKeyInfo::from_der(b).ok(), EncryptedPrivateKeyInfo::to_der)?;
    ensure(keystore::decrypt_private_key(&epki, b"pw").unwrap() == pki, "PBES2 content differs")?;
    done.push("PKCS#8 x2");

    let subject = Name::common_name("Alice").unwrap();
    let req = csr::build_csr(subject.clone(), &sk, vec![attribute_make("challengePassword", "pw").unwrap()], &mut rng).unwrap();
    reencodes("PKCS#10", &req.to_der(), &req, |b| CertificationRequest::from_der(b).ok(), CertificationRequest::to_der)?;
    ensure(csr::verify_csr(&req), "CSR self-signature")?;
    done.push("PKCS#10");

    let inner = cms::make_data(b"round trip payload");
    let cert = cms::toy_issue(&req, &ca_sk, &Name::common_name("CA").unwrap(), 7, &mut rng).unwrap();
    let signer = SignerIdent::for_key(subject, &pk);
    let key16 = [0x11u8; 16];
    let containers: Vec<(&str, ContentInfo, Opener)> = vec![
        ("data", inner.clone(), Box::new(|c: &ContentInfo| Some(c.clone()))),
        (
            "signed-data",
            cms::sign_data(&inner, &sk, &signer, &[], std::slice::from_ref(&cert), &mut rng).unwrap(),
            Box::new(|c: &ContentInfo| cms::verify_signed(c, &pk).ok()),
        ),
        (
            "enveloped-data",
            cms::envelope(&inner, &pk, &mut rng).unwrap(),
            Box::new(|c: &ContentInfo| cms::open_envelope(c, &sk).ok()),
        ),
        (
            "digested-data",
            cms::digest_data(&inner, pkcswb::crypto::HashAlg::Sha256),
            Box::new(|c: &ContentInfo| cms::check_digest(c).then(|| cms::extract_digested(c).ok()).flatten()),
        ),
        (
            "encrypted-data",
            cms::encrypt_data(&inner, &key16, &mut rng).unwrap(),
            Box::new(move |c: &ContentInfo| cms::decrypt_data(c, &key16).ok()),
        ),
        (
            "encrypted-data (PBES2)",
            cms::encrypt_data_with_password(&inner, b"pw", b"saltsalt", 100, &mut rng).unwrap(),
            Box::new(|c: &ContentInfo| cms::decrypt_data_with_password(c, b"pw").ok()),
        ),
        (
            "authenticated-data",
            cms::authenticate_data(&inner, &key16, &[]),
            Box::new(move |c: &ContentInfo| cms::extract_authenticated(c, &key16).ok()),
        ),
    ];
    for (what, ci, open) in &containers {
        reencodes(what, &ci.to_der(), ci, |b| ContentInfo::from_der(b).ok(), ContentInfo::to_der)?;
        let back = open(&ContentInfo::from_der(&ci.to_der()).unwrap()).ok_or(format!("{what}: cannot open"))?;
        ensure(back == inner, format!("{what}: inner content differs"))?;
    }
    done.push("CMS x6");

    let id = cms::key_id(&pk);
    let bags = vec![
        SafeBag::shrouded_key(epki.clone()).with_friendly_name("alice").unwrap().with_local_key_id(&id),
        SafeBag::cert(cert).with_local_key_id(&id),
    ];
    let creds = Credentials {
        privacy_password: Some(b"privacy".to_vec()),
        integrity_password: Some(b"integrity".to_vec()),
        destination: Some(ca_pk.clone()),
        destination_key: Some(ca_sk.clone()),
        source: Some(pk.clone()),
        source_key: Some(sk.clone()),
    };
    let opts = PfxOptions { iterations: 100, allow_plain_key: false };
    for privacy in [Mode::Password, Mode::PublicKey] {
        for integrity in [Mode::Password, Mode::PublicKey] {
            let what = format!("PFX {}/{}", privacy.name(), integrity.name());
            let (pdu, warnings) = pfx::pfx_create(&bags, privacy, integrity, &creds, &opts, &mut rng).map_err(|e| format!("{what}: {e}"))?;
            ensure(warnings.is_empty(), format!("{what}: unexpected warning"))?;
            reencodes(&what, &pdu.to_der(), &pdu, |b| PfxPdu::from_der(b).ok(), PfxPdu::to_der)?;
            ensure(pdu.integrity_mode() == Some(integrity), format!("{what}: integrity mode"))?;
            let opened = pfx::pfx_open(&PfxPdu::from_der(&pdu.to_der()).unwrap(), &creds).map_err(|e| format!("{what}: {e}"))?;
            ensure(opened == bags, format!("{what}: bags differ"))?;
        }
    }
    done.push("PFX x4");
    within(start, Duration::from_secs(60), "round-trips")?;
    Ok(done.join(", "))
}

// 7

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Create,
    Find,
    Read,
    Modify,
    Destroy,
}

/// Expected outcome of `op` on a token object, straight from the access
/// rules: private objects need a user login, token writes need R/W.
fn access_oracle(op: Op, private: bool, login: LoginState, rw: bool) -> Result<(), TokenError> {
    let visible = !private || login == LoginState::User;
    match op {
        Op::Find | Op::Read => {
            if visible {
                Ok(())
            } else {
                Err(TokenError::NotLoggedIn)
            }
        }
        Op::Create | Op::Modify | Op::Destroy => {
            if !visible {
                Err(TokenError::NotLoggedIn)
            } else if !rw {
                Err(TokenError::ReadOnlySession)
            } else {
                Ok(())
            }
        }
    }
}

const SO: &[u8] = b"so-pin";
const PIN: &[u8] = b"1234";

fn provisioned(seed: &[u8]) -> Token {
    let t = Token::seeded("acceptance", seed);
    t.initialize(SO).unwrap();
    let s = t.open_session(true).unwrap();
    t.login(s, UserType::So, SO).unwrap();
    t.init_user_pin(s, PIN).unwrap();
    t.close_session(s).unwrap();
    t
}

fn template(class: ObjectClass, private: bool, label: &str) -> Vec<(AttrType, AttrValue)> {
    let mut t = vec![
        (AttrType::Class, class.into()),
        (AttrType::Token, true.into()),
        (AttrType::Private, private.into()),
        (AttrType::Label, label.into()),
    ];
    match class {
        ObjectClass::Data => t.push((AttrType::Value, b"data".as_slice().into())),
        ObjectClass::Certificate => t.push((AttrType::Value, b"cert".as_slice().into())),
        ObjectClass::Key => {
            t.push((AttrType::KeyType, KeyType::Secret.into()));
            t.push((AttrType::Value, [0x5au8; 16].as_slice().into()));
        }
    }
    t
}

fn matrix_cell(class: ObjectClass, private: bool, login: LoginState, rw: bool) -> Result<(), String> {
    let cell = format!("{class:?}/private={private}/{login:?}/rw={rw}");
    let t = provisioned(b"matrix");
    // the object under test, created with full rights
    let admin = t.open_session(true).unwrap();
    t.login(admin, UserType::User, PIN).unwrap();
    let target = t.create_object(admin, &template(class, private, "target")).unwrap();
    t.logout(admin).unwrap();

    if login == LoginState::So && !rw {
        // an SO session is always R/W: neither order can produce this cell
        t.login(admin, UserType::So, SO).unwrap();
        ensure(t.open_session(false) == Err(TokenError::SoSessionExists), format!("{cell}: R/O session under SO"))?;
        t.logout(admin).unwrap();
        let ro = t.open_session(false).unwrap();
        ensure(t.login(ro, UserType::So, SO) == Err(TokenError::ReadOnlySessionExists), format!("{cell}: SO login with R/O open"))?;
        return Ok(());
    }
    let s = t.open_session(rw).unwrap();
    if rw {
        t.close_session(admin).unwrap();
    }
    match login {
        LoginState::Public => {}
        LoginState::User => t.login(s, UserType::User, PIN).unwrap(),
        LoginState::So => t.login(s, UserType::So, SO).unwrap(),
    }
    ensure(t.login_state() == login, format!("{cell}: login state"))?;

    let check = |op: Op, got: Result<(), TokenError>| {
        let want = access_oracle(op, private, login, rw);
        ensure(got == want, format!("{cell} {op:?}: got {got:?}, rules say {want:?}"))
    };
    check(Op::Create, t.create_object(s, &template(class, private, "new")).map(|_| ()))?;
    let found = t.find_objects(s, &[(AttrType::Label, "target".into())]).unwrap();
    check(Op::Find, if found == vec![target] { Ok(()) } else { Err(TokenError::NotLoggedIn) })?;
    check(Op::Read, t.get_attribute(s, target, AttrType::Label).map(|_| ()))?;
    check(Op::Modify, t.set_attribute(s, target, AttrType::Label, "renamed".into()))?;
    check(Op::Destroy, t.destroy_object(s, target))?;
    Ok(())
}

fn c7_token() -> Outcome {
    let mut cells = 0;
    for class in ObjectClass::ALL {
        for private in [false, true] {
            for login in LoginState::ALL {
                for rw in [false, true] {
                    matrix_cell(class, private, login, rw)?;
                    cells += 1;
                }
            }
        }
    }
    let probes = sensitive_sweep()?;
    let events = event_transitions()?;
    Ok(format!("{cells} matrix cells match the rules, {probes} non-disclosure probes, {events} event checks"))
}

/// Every attribute read and every export path on sensitive or
/// unextractable keys; none may yield the secret octets.
fn sensitive_sweep() -> Result<usize, String> {
    let t = provisioned(b"sweep");
    let s = t.open_session(true).unwrap();
    t.login(s, UserType::User, PIN).unwrap();
    let (_, sk) = key(512, 2, b"sweep key");
    let d = sk.d().to_bytes_be();
    let secret = [0xC3u8; 16];

    let wrap = KeyTemplate { wrap: true, sensitive: false, ..Default::default() };
    let wrapper = t.generate_secret_key(s, &wrap).unwrap();
    let mut keys = Vec::new();
    for (sensitive, extractable) in [(true, true), (true, false), (false, false)] {
        let tmpl = KeyTemplate { sensitive, extractable, ..Default::default() };
        keys.push((t.import_private_key(s, &sk, &tmpl).unwrap(), d.clone(), sensitive, extractable));
        let mut st = template(ObjectClass::Key, true, "secret");
        st.retain(|(a, _)| *a != AttrType::Value);
        st.push((AttrType::Value, secret.as_slice().into()));
        st.push((AttrType::Sensitive, sensitive.into()));
        st.push((AttrType::Extractable, extractable.into()));
        keys.push((t.create_object(s, &st).unwrap(), secret.to_vec(), sensitive, extractable));
    }

    let leaks = |bytes: &[u8], needle: &[u8]| bytes.windows(needle.len()).any(|w| w == needle);
    let mut probes = 0;
    for (h, needle, sensitive, extractable) in &keys {
        for attr in AttrType::ALL {
            let got = t.get_attribute(s, *h, attr);
            if attr == AttrType::Value {
                ensure(matches!(got, Err(TokenError::AttributeSensitive(_))), format!("{attr:?} readable"))?;
            }
            if let Ok(AttrValue::Bytes(b)) = &got {
                ensure(!leaks(b, needle), format!("{} discloses key octets", attr.name()))?;
            }
            probes += 1;
        }
        let wrapped = t.wrap_key(s, wrapper, *h);
        if *extractable {
            ensure(!leaks(&wrapped.map_err(|e| e.to_string())?, needle), "wrapped output contains plaintext key")?;
        } else {
            ensure(wrapped == Err(TokenError::KeyUnextractable), "unextractable key was wrapped")?;
        }
        if *sensitive {
            ensure(t.set_attribute(s, *h, AttrType::Sensitive, false.into()).is_err(), "sensitive cleared")?;
            ensure(t.copy_object(s, *h, &[(AttrType::Sensitive, false.into())]).is_err(), "sensitive cleared on copy")?;
        }
        if !*extractable {
            ensure(t.set_attribute(s, *h, AttrType::Extractable, true.into()).is_err(), "extractable set")?;
            ensure(t.copy_object(s, *h, &[(AttrType::Extractable, true.into())]).is_err(), "extractable set on copy")?;
        }
        let copy = t.copy_object(s, *h, &[]).map_err(|e| e.to_string())?;
        for (flag, want) in [(AttrType::Sensitive, *sensitive), (AttrType::Extractable, *extractable)] {
            ensure(t.get_attribute(s, copy, flag) == Ok(want.into()), "copy changed a protection flag")?;
        }
        ensure(matches!(t.get_attribute(s, copy, AttrType::Value), Err(TokenError::AttributeSensitive(_))), "copy discloses value")?;
        probes += 6;
    }
    Ok(probes)
}

fn event_transitions() -> Result<usize, String> {
    let t = provisioned(b"events");
    let base = t.events().len();
    let a = t.open_session(true).unwrap();
    let b = t.open_session(true).unwrap();
    let mut checks = 0;
    let mut expect = |got: Result<(), TokenError>, want: Result<(), TokenError>, what: &str| {
        checks += 1;
        ensure(got == want, format!("{what}: got {got:?}, want {want:?}"))
    };
    expect(t.logout(a), Err(TokenError::NotLoggedIn), "logout while public")?;
    expect(t.login(a, UserType::So, SO), Ok(()), "Log In SO")?;
    expect(t.login(b, UserType::User, PIN), Err(TokenError::AlreadyLoggedIn), "user login over SO")?;
    expect(t.logout(b), Ok(()), "Log Out (SO)")?;
    expect(t.login(a, UserType::User, b"wrong"), Err(TokenError::PinIncorrect), "wrong PIN")?;
    ensure(t.login_state() == LoginState::Public, "wrong PIN changed the login state")?;
    expect(t.login(a, UserType::User, PIN), Ok(()), "Log In User")?;
    let obj = t.create_object(a, &template(ObjectClass::Data, true, "p")).unwrap();
    let volatile = {
        let mut v = template(ObjectClass::Data, false, "v");
        v.retain(|(a, _)| *a != AttrType::Token);
        v.push((AttrType::Token, false.into()));
        t.create_object(b, &v).unwrap()
    };
    expect(t.close_session(b), Ok(()), "Close Session")?;
    expect(t.get_attribute(b, obj, AttrType::Label).map(|_| ()), Err(TokenError::SessionClosed), "op on closed session")?;
    expect(t.get_attribute(a, volatile, AttrType::Label).map(|_| ()), Err(TokenError::ObjectNotFound), "session object outlives session")?;
    ensure(t.login_state() == LoginState::User, "closing one of two sessions ended the login")?;
    t.remove_device();
    expect(t.get_attribute(a, obj, AttrType::Label).map(|_| ()), Err(TokenError::DeviceRemoved), "op after Device Removed")?;
    expect(t.open_session(true).map(|_| ()), Err(TokenError::DeviceRemoved), "open while removed")?;
    ensure(t.login_state() == LoginState::Public, "Device Removed kept the login")?;
    t.reinsert_device();
    expect(t.digest(a, b"").map(|_| ()), Err(TokenError::SessionClosed), "old session after reinsertion")?;
    let c = t.open_session(false).unwrap();
    expect(t.get_attribute(c, obj, AttrType::Label).map(|_| ()), Err(TokenError::NotLoggedIn), "private object after reinsertion")?;
    expect(t.login(c, UserType::User, PIN), Ok(()), "login after reinsertion")?;
    expect(t.get_attribute(c, obj, AttrType::Label).map(|_| ()), Ok(()), "token object survives removal")?;

    let want = vec![
        SessionEvent::LoginSo,
        SessionEvent::Logout,
        SessionEvent::LoginUser,
        SessionEvent::CloseSession(b),
        SessionEvent::CloseSession(a),
        SessionEvent::DeviceRemoved,
        SessionEvent::LoginUser,
    ];
    let got = t.events()[base..].to_vec();
    ensure(got == want, format!("event log {got:?}"))?;
    Ok(checks + 1)
}

// 8

fn c8_scenario() -> Outcome {
    let seed = b"acceptance scenario";
    let first = scenario::run_scenario(seed, None);
    ensure(first.passed() && first.passed_count() == STEP_NAMES.len(), format!("clean run:\n{first}"))?;
    let again = scenario::run_scenario(seed, None);
    ensure(first.to_string() == again.to_string(), "same seed, different transcript")?;
    ensure(first == again, "same seed, different report")?;
    let mut faults = Vec::new();
    for fault in Fault::ALL {
        let r = scenario::run_scenario(seed, Some(fault));
        let at = r.failed_step();
        ensure(at == Some(fault.expected_step()), format!("{} failed at {at:?}", fault.name()))?;
        let index = STEP_NAMES.iter().position(|s| Some(*s) == at).unwrap();
        ensure(r.passed_count() == index, format!("{}: steps before the fault did not all pass", fault.name()))?;
        faults.push(format!("{}@{}", fault.name(), fault.expected_step()));
    }
    Ok(format!("9/9 PASS, reproducible, faults {}", faults.join(" ")))
}

// 9

struct Gen(SeededStream);

impl Gen {
    fn below(&mut self, n: u64) -> u64 {
        let mut b = [0u8; 8];
        self.0.fill(&mut b).unwrap();
        u64::from_be_bytes(b) % n
    }

    fn bytes(&mut self, max: u64) -> Vec<u8> {
        let mut v = vec![0u8; self.below(max + 1) as usize];
        self.0.fill(&mut v).unwrap();
        v
    }

    fn value(&mut self, depth: u32) -> DerValue {
        let leaf = depth >= 4 || self.below(3) > 0;
        if leaf {
            match self.below(9) {
                0 => DerValue::boolean(self.below(2) == 1),
                1 => DerValue::integer_i64(self.below(u64::MAX) as i64),
                2 => DerValue::integer_unsigned(&BigUint::from_bytes_be(&self.bytes(40))),
                3 => DerValue::null(),
                4 => DerValue::octet_string(self.bytes(300)),
                5 => DerValue::bit_string(&self.bytes(20)),
                6 => {
                    let first = self.below(3);
                    let mut arcs = vec![first, if first < 2 { self.below(40) } else { self.below(1 << 20) }];
                    for _ in 0..self.below(6) {
                        arcs.push(self.below(1 << 40));
                    }
                    DerValue::oid(&Oid::new(&arcs).unwrap())
                }
                7 => {
                    let s: String = (0..self.below(30)).filter_map(|_| char::from_u32(self.below(0x3000) as u32 + 0x20)).collect();
                    DerValue::utf8(&s)
                }
                _ => {
                    let class = [TagClass::Context, TagClass::Application, TagClass::Private][self.below(3) as usize];
                    DerValue::primitive(class, self.below(300) as u32, self.bytes(20))
                }
            }
        } else {
            let children: Vec<DerValue> = (0..self.below(6)).map(|_| self.value(depth + 1)).collect();
            match self.below(3) {
                0 => DerValue::sequence(children),
                1 => DerValue::set(children),
                _ => DerValue::explicit(self.below(40) as u32, DerValue::sequence(children)),
            }
        }
    }
}

/// Header split of a DER TLV: (tag octets, length octets, content start).
fn header(der: &[u8]) -> (usize, usize) {
    let mut i = 1;
    if der[0] & 0x1f == 0x1f {
        while der[i] & 0x80 != 0 {
            i += 1;
        }
        i += 1;
    }
    let len_octets = if der[i] & 0x80 == 0 { 1 } else { 1 + (der[i] & 0x7f) as usize };
    (i, len_octets)
}

fn c9_der_fuzz() -> Outcome {
    let mut gen = Gen(SeededStream::new(b"der fuzz"));
    let mut values = Vec::new();
    for i in 0..10_000 {
        let v = gen.value(0);
        let der = v.to_der().map_err(|e| format!("value {i}: encode {e}"))?;
        let back = DerValue::from_der(&der).map_err(|e| format!("value {i}: decode {e}"))?;
        ensure(back == v, format!("value {i}: structure differs"))?;
        ensure(back.to_der().unwrap() == der, format!("value {i}: re-encoding differs"))?;
        values.push(der);
    }

    let mut corpus = 0;
    let mut reject = |what: &str, bad: &[u8]| {
        corpus += 1;
        ensure(DerValue::from_der(bad).is_err(), format!("{what} accepted: {}", hex::encode(bad)))
    };
    for der in values.iter().take(300) {
        for cut in 0..der.len() {
            reject("truncation", &der[..cut])?;
        }
        let (tag_len, len_len) = header(der);
        let content = &der[tag_len + len_len..];
        // long form where short or shorter would do
        let mut longer = der[..tag_len].to_vec();
        let n = content.len();
        let be: Vec<u8> = (n as u32).to_be_bytes().iter().copied().skip_while(|&b| b == 0).collect();
        longer.push(0x80 | (be.len() as u8 + 1));
        longer.push(0);
        longer.extend(&be);
        longer.extend(content);
        reject("length with a leading zero octet", &longer)?;
        if n < 128 {
            let mut long_form = der[..tag_len].to_vec();
            long_form.extend([0x81, n as u8]);
            long_form.extend(content);
            reject("long form for a short length", &long_form)?;
        }
        if der[0] & 0x20 != 0 {
            let mut indefinite = der[..tag_len].to_vec();
            indefinite.push(0x80);
            indefinite.extend(content);
            indefinite.extend([0, 0]);
            reject("indefinite length", &indefinite)?;
        }
        let mut trailing = der.clone();
        trailing.push(0);
        reject("trailing octet", &trailing)?;
    }
    for fixed in [&[0x30, 0x80, 0x00, 0x00][..], &[0x04, 0x81, 0x01, 0xAA], &[0x02, 0x82, 0x00, 0x01, 0x05], &[0x30, 0x85, 1, 0, 0, 0, 0]] {
        reject("fixed corpus", fixed)?;
    }
    let indefinite = DerValue::from_der(&[0x30, 0x80, 0x00, 0x00]);
    ensure(indefinite == Err(DerError::IndefiniteLength), format!("indefinite form gave {indefinite:?}"))?;
    Ok(format!("10000 values round-trip byte-identical, {corpus} malformed encodings rejected"))
}
