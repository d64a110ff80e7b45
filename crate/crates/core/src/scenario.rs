// SPDX-License-Identifier: Apache-2.0

//! Smart-card enrolment walk-through.
//!
//! Alice gets a key pair and a naturalPerson profile, asks a CA for a
//! certificate through an enveloped request, wraps her private key under
//! her PIN, ships key and certificate to the card-making machine in a PFX,
//! has a token provisioned, and finally answers a signed challenge. Every
//! step verifies what it produced; a run is a pure function of its seed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::cms::{self, ContentInfo, EnvelopedData};
use crate::crypto::{HashAlg, RandomSource, SeededStream};
use crate::csr::{build_csr, CertificationRequest, Name, NameAttr};
use crate::der::DerValue;
use crate::keystore::{self, natural_person, Attribute, PrivateKeyInfo};
use crate::pfx::{self, BagValue, Credentials, Mode, PfxOptions, PfxPdu, SafeBag};
use crate::pkcs1::{self, PssParams};
use crate::pkcs5::DEFAULT_ITERATIONS;
use crate::rsa::{generate_key, RsaPrivateKey};
use crate::token::{AttrType, AttrValue, KeyTemplate, ObjectClass, Token, TokenError, UserType};

pub const STEP_NAMES: [&str; 9] = [
    "keygen",
    "profile",
    "csr",
    "transport",
    "issue",
    "wrap-key",
    "pfx-transfer",
    "provision",
    "challenge",
];

const KEY_BITS: usize = 1024;
const ALICE_PIN: &[u8] = b"4711";
const SO_PIN: &[u8] = b"so-0000";
const TRANSFER_PASSWORD: &[u8] = b"server to card maker";

/// Deliberate corruption injected between two steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Damages the enveloped request on its way to the CA.
    CorruptEnvelope,
    /// Damages the PFX between transfer and provisioning.
    CorruptPfx,
    /// Alters the card's answer to the challenge.
    TamperSignature,
}

impl Fault {
    pub const ALL: [Fault; 3] = [Fault::CorruptEnvelope, Fault::CorruptPfx, Fault::TamperSignature];

    pub fn name(self) -> &'static str {
        match self {
            Fault::CorruptEnvelope => "corrupt-envelope",
            Fault::CorruptPfx => "corrupt-pfx",
            Fault::TamperSignature => "tamper-signature",
        }
    }

    /// Step expected to catch the fault.
    pub fn expected_step(self) -> &'static str {
        match self {
            Fault::CorruptEnvelope => "transport",
            Fault::CorruptPfx => "pfx-transfer",
            Fault::TamperSignature => "challenge",
        }
    }
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fault::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| format!("unknown fault {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("step {step} failed: {reason}")]
    StepFailed { step: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepStatus {
    Pass(Vec<String>),
    Fail(String),
    NotRun,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioReport {
    pub seed: Vec<u8>,
    pub fault: Option<Fault>,
    pub steps: Vec<(&'static str, StepStatus)>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|(_, s)| matches!(s, StepStatus::Pass(_)))
    }

    pub fn error(&self) -> Option<ScenarioError> {
        self.steps.iter().find_map(|(name, s)| match s {
            StepStatus::Fail(reason) => Some(ScenarioError::StepFailed { step: name, reason: reason.clone() }),
            _ => None,
        })
    }

    pub fn failed_step(&self) -> Option<&'static str> {
        self.steps.iter().find(|(_, s)| matches!(s, StepStatus::Fail(_))).map(|(n, _)| *n)
    }

    pub fn passed_count(&self) -> usize {
        self.steps.iter().filter(|(_, s)| matches!(s, StepStatus::Pass(_))).count()
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario seed={}", hex::encode(&self.seed))?;
        if let Some(fault) = self.fault {
            writeln!(f, "fault injected: {}", fault.name())?;
        }
        let total = self.steps.len();
        for (i, (name, status)) in self.steps.iter().enumerate() {
            match status {
                StepStatus::Pass(lines) => {
                    writeln!(f, "[{}/{total}] {name:<13} PASS", i + 1)?;
                    for l in lines {
                        writeln!(f, "      {l}")?;
                    }
                }
                StepStatus::Fail(reason) => writeln!(f, "[{}/{total}] {name:<13} FAIL  {reason}", i + 1)?,
                StepStatus::NotRun => writeln!(f, "[{}/{total}] {name:<13} not run", i + 1)?,
            }
        }
        match self.failed_step() {
            None => writeln!(f, "result: PASS ({}/{total})", self.passed_count()),
            Some(step) => writeln!(f, "result: FAIL at {step} ({}/{total} passed)", self.passed_count()),
        }
    }
}

type StepResult<T> = Result<(T, Vec<String>), String>;

struct Runner {
    report: ScenarioReport,
    next: usize,
}

impl Runner {
    fn step<T>(&mut self, f: impl FnOnce() -> StepResult<T>) -> Option<T> {
        let idx = self.next;
        self.next += 1;
        match f() {
            Ok((v, lines)) => {
                self.report.steps[idx].1 = StepStatus::Pass(lines);
                Some(v)
            }
            Err(reason) => {
                self.report.steps[idx].1 = StepStatus::Fail(reason);
                None
            }
        }
    }
}

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn short(bytes: &[u8]) -> String {
    hex::encode(&HashAlg::Sha256.digest(bytes)[..8])
}

/// Runs every step in order, stopping at the first failure.
pub fn run_scenario(seed: &[u8], fault: Option<Fault>) -> ScenarioReport {
    let report = ScenarioReport {
        seed: seed.to_vec(),
        fault,
        steps: STEP_NAMES.iter().map(|n| (*n, StepStatus::NotRun)).collect(),
    };
    let mut r = Runner { report, next: 0 };
    let _ = run_steps(&mut r, seed, fault);
    r.report
}

/// [`run_scenario`] as a `Result`.
pub fn scenario(seed: &[u8], fault: Option<Fault>) -> Result<ScenarioReport, ScenarioError> {
    let report = run_scenario(seed, fault);
    match report.error() {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

fn run_steps(r: &mut Runner, seed: &[u8], fault: Option<Fault>) -> Option<()> {
    let mut rng = SeededStream::new(seed);
    let e = BigUint::from(65537u32);

    let (alice, ca) = r.step(|| {
        let (_, alice) = generate_key(KEY_BITS, 2, &e, &mut rng).map_err(err)?;
        let (_, ca) = generate_key(KEY_BITS, 2, &e, &mut rng).map_err(err)?;
        for sk in [&alice, &ca] {
            let m = BigUint::from(0x1234_5678u32);
            let c = sk.public_key().public_op(&m).map_err(err)?;
            if sk.private_op(&c).map_err(err)? != m {
                return Err("private operation does not invert the public one".into());
            }
        }
        let lines = vec![
            format!("alice n={}... ({} bits)", short(&alice.n().to_bytes_be()), alice.modulus_bits()),
            format!("ca    n={}... ({} bits)", short(&ca.n().to_bytes_be()), ca.modulus_bits()),
        ];
        Ok(((alice, ca), lines))
    })?;
    let kid = cms::key_id(&alice.public_key());

    let profile: Vec<Attribute> = r.step(|| {
        let attrs = natural_person(&[
            ("emailAddress", "alice@example.com"),
            ("dateOfBirth", "19800101120000Z"),
            ("placeOfBirth", "Helsinki"),
            ("countryOfResidence", "FI"),
        ])
        .map_err(err)?;
        if !attrs.iter().all(keystore::attribute_check) {
            return Err("attribute failed its syntax check".into());
        }
        let lines = vec![format!("{} naturalPerson attributes", attrs.len())];
        Ok((attrs, lines))
    })?;

    let subject = Name::new(vec![
        (NameAttr::CommonName, "Alice".into()),
        (NameAttr::Country, "FI".into()),
        (NameAttr::EmailAddress, "alice@example.com".into()),
    ])
    .expect("valid name");
    let ca_name = Name::new(vec![(NameAttr::CommonName, "Toy CA".into()), (NameAttr::Country, "FI".into())]).expect("valid name");

    let csr_der = r.step(|| {
        let csr = build_csr(subject.clone(), &alice, profile.clone(), &mut rng).map_err(err)?;
        let der = csr.to_der();
        if !crate::csr::verify_csr_der(&der).map_err(err)? {
            return Err("self-signature does not verify".into());
        }
        let lines = vec![format!("subject {subject}"), format!("{} octets, sha256 {}...", der.len(), short(&der))];
        Ok((der, lines))
    })?;

    let csr = r.step(|| {
        let ci = cms::envelope(&cms::make_data(&csr_der), &ca.public_key(), &mut rng).map_err(err)?;
        let mut wire = ci.to_der();
        if fault == Some(Fault::CorruptEnvelope) {
            let mut ed = EnvelopedData::from_content_info(&ci).map_err(err)?;
            ed.recipients[0].encrypted_key[8] ^= 0x01;
            wire = ed.to_content_info().to_der();
        }
        // the CA side
        let received = ContentInfo::from_der(&wire).map_err(err)?;
        let opened = cms::open_envelope(&received, &ca).map_err(err)?;
        let csr = CertificationRequest::from_der(opened.data_payload().map_err(err)?).map_err(err)?;
        let lines = vec![format!("enveloped-data {} octets, opened by the CA", wire.len())];
        Ok((csr, lines))
    })?;

    let cert = r.step(|| {
        let ci = cms::toy_issue(&csr, &ca, &ca_name, 1, &mut rng).map_err(err)?;
        let der = ci.to_der();
        let cert = cms::toy_verify(&ContentInfo::from_der(&der).map_err(err)?, &ca.public_key()).map_err(err)?;
        if cert.public_key != alice.public_key() || cert.subject != subject {
            return Err("certificate does not match the request".into());
        }
        let lines = vec![format!("serial {} issued by {}, {} octets", cert.serial, cert.issuer, der.len())];
        Ok((ci, lines))
    })?;

    let epki = r.step(|| {
        let mut attrs = profile.clone();
        attrs.push(keystore::attribute_make("friendlyName", "Alice").map_err(err)?);
        attrs.push(Attribute::single(crate::oids::local_key_id(), DerValue::octet_string(kid.clone())));
        let pki = PrivateKeyInfo::from_key(&alice, attrs);
        let mut salt = [0u8; crate::pkcs5::DEFAULT_SALT_LEN];
        rng.fill(&mut salt).map_err(err)?;
        let epki = keystore::encrypt_private_key(&pki, ALICE_PIN, &salt, DEFAULT_ITERATIONS, &mut rng).map_err(err)?;
        if keystore::decrypt_private_key(&epki, ALICE_PIN).map_err(err)? != pki {
            return Err("unwrapped key differs".into());
        }
        let lines = vec![format!("EncryptedPrivateKeyInfo PBES2 c={DEFAULT_ITERATIONS}, {} octets", epki.to_der().len())];
        Ok((epki, lines))
    })?;

    let bags = r.step(|| {
        let bags = vec![
            SafeBag::shrouded_key(epki.clone()).with_friendly_name("Alice").map_err(err)?.with_local_key_id(&kid),
            SafeBag::cert(cert.clone()).with_friendly_name("Alice").map_err(err)?.with_local_key_id(&kid),
        ];
        let creds = Credentials::password(TRANSFER_PASSWORD);
        let opts = PfxOptions::default();
        let (pdu, _) = pfx::pfx_create(&bags, Mode::Password, Mode::Password, &creds, &opts, &mut rng).map_err(err)?;
        let mut wire = pdu.to_der();
        if fault == Some(Fault::CorruptPfx) {
            let payload = pdu.auth_safe.data_payload().map_err(err)?;
            let mut damaged = payload.to_vec();
            let last = damaged.len() - 1;
            damaged[last] ^= 0x01;
            wire = PfxPdu { auth_safe: cms::make_data(&damaged), ..pdu.clone() }.to_der();
        }
        // the card-making machine
        let received = PfxPdu::from_der(&wire).map_err(err)?;
        let opened = pfx::pfx_open(&received, &creds).map_err(err)?;
        if opened != bags {
            return Err("bags differ after transfer".into());
        }
        let lines = vec![format!("PFX password/password, {} octets, MAC verified, {} bags", wire.len(), opened.len())];
        Ok((opened, lines))
    })?;

    let (token, session, key_handle) = r.step(|| provision(seed, &bags, &subject))?;

    r.step(|| {
        let mut challenge = [0u8; 32];
        rng.fill(&mut challenge).map_err(err)?;
        let mut sig = token.sign(session, key_handle, &challenge).map_err(err)?;
        if fault == Some(Fault::TamperSignature) {
            let mid = sig.len() / 2;
            sig[mid] ^= 0x01;
        }
        // the verifier trusts only the CA key
        let cert = cms::toy_verify(&cert, &ca.public_key()).map_err(err)?;
        let params = PssParams::fitted(cert.public_key.modulus_bits());
        if !pkcs1::verify(&challenge, &sig, &cert.public_key, &params) {
            return Err("signature over the challenge does not verify".into());
        }
        let lines = vec![format!("challenge {}..., RSASSA-PSS salt {}", &hex::encode(challenge)[..16], params.salt_len)];
        Ok(((), lines))
    })
}

fn provision(
    seed: &[u8],
    bags: &[SafeBag],
    subject: &Name,
) -> StepResult<(Token, crate::token::SessionHandle, crate::token::ObjectHandle)> {
    let mut key: Option<(RsaPrivateKey, Vec<u8>)> = None;
    let mut cert: Option<ContentInfo> = None;
    for b in bags {
        match &b.value {
            BagValue::ShroudedKey(epki) => {
                let pki = keystore::decrypt_private_key(epki, ALICE_PIN).map_err(err)?;
                key = Some((pki.key().map_err(err)?, b.local_key_id().unwrap_or_default().to_vec()));
            }
            BagValue::Cert(ci) => cert = Some(ci.clone()),
            BagValue::Key(_) => return Err("unexpected plain key bag".into()),
        }
    }
    let (sk, id) = key.ok_or("no key bag")?;
    let cert = cert.ok_or("no certificate bag")?;

    let mut token_seed = b"token:".to_vec();
    token_seed.extend_from_slice(seed);
    let token = Token::seeded("Alice card", &token_seed);
    token.initialize(SO_PIN).map_err(err)?;
    let s = token.open_session(true).map_err(err)?;
    token.login(s, UserType::So, SO_PIN).map_err(err)?;
    token.init_user_pin(s, ALICE_PIN).map_err(err)?;
    token.logout(s).map_err(err)?;
    token.login(s, UserType::User, ALICE_PIN).map_err(err)?;

    let subject_der = subject.to_der_value().to_der().map_err(err)?;
    let tmpl = KeyTemplate {
        label: "Alice".into(),
        id: id.clone(),
        subject: subject_der.clone(),
        extractable: false,
        ..KeyTemplate::default()
    };
    let priv_h = token.import_private_key(s, &sk, &tmpl).map_err(err)?;
    token.import_public_key(s, &sk.public_key(), &tmpl).map_err(err)?;
    token
        .create_object(
            s,
            &[
                (AttrType::Class, ObjectClass::Certificate.into()),
                (AttrType::Token, true.into()),
                (AttrType::Label, "Alice".into()),
                (AttrType::Id, id.into()),
                (AttrType::Subject, subject_der.into()),
                (AttrType::Value, cert.to_der().into()),
            ],
        )
        .map_err(err)?;
    match token.get_attribute(s, priv_h, AttrType::Value) {
        Err(TokenError::AttributeSensitive(_)) => {}
        _ => return Err("private key value readable off the token".into()),
    }
    if token.get_attribute(s, priv_h, AttrType::Extractable).map_err(err)? != AttrValue::Bool(false) {
        return Err("private key extractable".into());
    }
    let manifest = token.export_pkcs15_layout();
    if !manifest.contains("EF(ODF): 3\n      EF(PrKDF)\n      EF(PuKDF)\n      EF(CDF)\n") {
        return Err("PKCS #15 layout does not point at PrKDF, PuKDF and CDF".into());
    }
    let mut lines = vec!["token \"Alice card\": key sensitive+unextractable, PKCS #15 layout:".to_string()];
    lines.extend(manifest.lines().map(|l| format!("  {l}")));
    Ok(((token, s, priv_h), lines))
}
