// SPDX-License-Identifier: Apache-2.0

//! Personal information exchange.
//!
//! ```text
//! PfxPdu ::= SEQUENCE { version INTEGER (3), authSafe ContentInfo, macData MacData OPTIONAL }
//! MacData ::= SEQUENCE { macAlgorithm AlgorithmIdentifier (PBMAC1), mac OCTET STRING }
//! AuthenticatedSafe ::= SEQUENCE OF ContentInfo
//! SafeContents ::= SEQUENCE OF SafeBag
//! SafeBag ::= SEQUENCE { bagId OBJECT IDENTIFIER, bagValue [0] EXPLICIT ANY, bagAttributes SET OF Attribute OPTIONAL }
//! ```
//!
//! authSafe is `data` carrying the DER AuthenticatedSafe when integrity
//! comes from a password (macData then holds a PBMAC1 tag over the DER of
//! authSafe), or `signed-data` around that same `data` when integrity comes
//! from the source key. The AuthenticatedSafe holds a single ContentInfo:
//! PBES2 `encrypted-data` for password privacy, `enveloped-data` for
//! public-key privacy, each wrapping `data` carrying the SafeContents.
//!
//! The MAC key comes from PBKDF2, not the legacy PKCS #12 derivation, so
//! these files do not interoperate with other PKCS #12 software. The CLI
//! names them `.pfxw`.

use crate::cms::{self, CmsError, ContentInfo, ContentKind, SignerIdent};
use crate::crypto::{RandomSource, RngError};
use crate::csr::Name;
use crate::der::{DerError, DerValue, Oid, SeqReader, TagClass};
use crate::keystore::{
    self, find_attribute, parse_attribute_set, sort_attributes, Attribute, EncryptedPrivateKeyInfo, KeystoreError,
    PrivateKeyInfo,
};
use crate::oids;
use crate::pkcs5::{self, Pbkdf2Params, DEFAULT_ITERATIONS, DEFAULT_SALT_LEN};
use crate::rsa::{RsaPrivateKey, RsaPublicKey};

pub const PFX_VERSION: u64 = 3;
pub const MAC_KEY_LEN: usize = 32;

pub const KEY_BAG_WARNING: &str =
    "it is unwise to transport private keys without physical protection when using password privacy mode";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PfxError {
    #[error("missing credential: {0}")]
    MissingCredential(&'static str),
    #[error("modulus too small")]
    ModulusTooSmall,
    #[error("integrity check failed")]
    IntegrityFailure,
    #[error("decryption error")]
    DecryptionError,
    #[error("malformed PFX: {0}")]
    Malformed(String),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("random source: {0}")]
    Rng(#[from] RngError),
}

impl From<DerError> for PfxError {
    fn from(e: DerError) -> Self {
        PfxError::Malformed(e.to_string())
    }
}

impl From<KeystoreError> for PfxError {
    fn from(e: KeystoreError) -> Self {
        PfxError::Malformed(e.to_string())
    }
}

fn malformed(e: CmsError) -> PfxError {
    match e {
        CmsError::Rng(r) => PfxError::Rng(r),
        e => PfxError::Malformed(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Password,
    PublicKey,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Password => "password",
            Mode::PublicKey => "public-key",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BagValue {
    Key(PrivateKeyInfo),
    ShroudedKey(EncryptedPrivateKeyInfo),
    /// A toy certificate (signed-data ContentInfo).
    Cert(ContentInfo),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafeBag {
    pub value: BagValue,
    attributes: Vec<Attribute>,
}

impl SafeBag {
    pub fn new(value: BagValue, mut attributes: Vec<Attribute>) -> Self {
        sort_attributes(&mut attributes);
        SafeBag { value, attributes }
    }

    pub fn key(pki: PrivateKeyInfo) -> Self {
        Self::new(BagValue::Key(pki), Vec::new())
    }

    pub fn shrouded_key(epki: EncryptedPrivateKeyInfo) -> Self {
        Self::new(BagValue::ShroudedKey(epki), Vec::new())
    }

    pub fn cert(cert: ContentInfo) -> Self {
        Self::new(BagValue::Cert(cert), Vec::new())
    }

    fn with_attribute(mut self, a: Attribute) -> Self {
        self.attributes.retain(|x| x.attr_type != a.attr_type);
        self.attributes.push(a);
        sort_attributes(&mut self.attributes);
        self
    }

    /// friendlyName must be non-empty.
    pub fn with_friendly_name(self, name: &str) -> Result<Self, PfxError> {
        let a = keystore::attribute_make("friendlyName", name).map_err(|_| PfxError::Precondition("friendlyName"))?;
        Ok(self.with_attribute(a))
    }

    pub fn with_local_key_id(self, id: &[u8]) -> Self {
        self.with_attribute(Attribute::single(oids::local_key_id(), DerValue::octet_string(id.to_vec())))
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn friendly_name(&self) -> Option<&str> {
        find_attribute(&self.attributes, &oids::friendly_name())?.first()?.as_str().ok()
    }

    pub fn local_key_id(&self) -> Option<&[u8]> {
        find_attribute(&self.attributes, &oids::local_key_id())?.first()?.as_octet_string().ok()
    }

    pub fn bag_id(&self) -> Oid {
        match self.value {
            BagValue::Key(_) => oids::key_bag(),
            BagValue::ShroudedKey(_) => oids::shrouded_key_bag(),
            BagValue::Cert(_) => oids::cert_bag(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.value {
            BagValue::Key(_) => "keyBag",
            BagValue::ShroudedKey(_) => "shroudedKeyBag",
            BagValue::Cert(_) => "certBag",
        }
    }

    fn is_key(&self) -> bool {
        !matches!(self.value, BagValue::Cert(_))
    }

    pub fn to_der_value(&self) -> DerValue {
        let value = match &self.value {
            BagValue::Key(pki) => pki.to_der_value(),
            BagValue::ShroudedKey(epki) => epki.to_der_value(),
            BagValue::Cert(ci) => ci.to_der_value(),
        };
        let mut items = vec![DerValue::oid(&self.bag_id()), DerValue::explicit(0, value)];
        if !self.attributes.is_empty() {
            items.push(keystore::attribute_set(&self.attributes));
        }
        DerValue::sequence(items)
    }

    pub fn from_der_value(v: &DerValue) -> Result<Self, PfxError> {
        let mut r = SeqReader::of_sequence(v)?;
        let id = r.next("bagId")?.as_oid()?;
        let inner = r.next("bagValue")?.as_explicit(0)?;
        let attributes = match r.next_if(TagClass::Universal, crate::der::tag::SET) {
            Some(set) => parse_attribute_set(set)?,
            None => Vec::new(),
        };
        r.finish()?;
        let value = if id == oids::key_bag() {
            BagValue::Key(PrivateKeyInfo::from_der(&inner.to_der()?)?)
        } else if id == oids::shrouded_key_bag() {
            BagValue::ShroudedKey(EncryptedPrivateKeyInfo::from_der_value(inner)?)
        } else if id == oids::cert_bag() {
            BagValue::Cert(ContentInfo::from_der_value(inner).map_err(malformed)?)
        } else {
            return Err(PfxError::Malformed(format!("unsupported bag type {id}")));
        };
        Ok(SafeBag::new(value, attributes))
    }
}

fn safe_contents_der(bags: &[SafeBag]) -> Vec<u8> {
    DerValue::sequence(bags.iter().map(SafeBag::to_der_value).collect()).to_der().expect("well-formed")
}

fn parse_safe_contents(octets: &[u8]) -> Result<Vec<SafeBag>, PfxError> {
    DerValue::from_der(octets)?.as_sequence()?.iter().map(SafeBag::from_der_value).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacData {
    pub kdf: Pbkdf2Params,
    pub mac: Vec<u8>,
}

impl MacData {
    fn to_der_value(&self) -> DerValue {
        DerValue::sequence(vec![
            keystore::pbmac1_alg_id(&self.kdf).to_der_value(),
            DerValue::octet_string(self.mac.clone()),
        ])
    }

    fn from_der_value(v: &DerValue) -> Result<Self, PfxError> {
        let mut r = SeqReader::of_sequence(v)?;
        let alg = keystore::AlgorithmIdentifier::from_der_value(r.next("macAlgorithm")?)?;
        let kdf = keystore::parse_pbmac1(&alg)?;
        let mac = r.next("mac")?.as_octet_string()?.to_vec();
        r.finish()?;
        Ok(MacData { kdf, mac })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfxPdu {
    pub auth_safe: ContentInfo,
    pub mac_data: Option<MacData>,
}

impl PfxPdu {
    pub fn to_der_value(&self) -> DerValue {
        let mut items = vec![DerValue::integer_unsigned(&PFX_VERSION.into()), self.auth_safe.to_der_value()];
        items.extend(self.mac_data.as_ref().map(MacData::to_der_value));
        DerValue::sequence(items)
    }

    pub fn to_der(&self) -> Vec<u8> {
        self.to_der_value().to_der().expect("well-formed")
    }

    pub fn from_der(octets: &[u8]) -> Result<Self, PfxError> {
        let v = DerValue::from_der(octets)?;
        let mut r = SeqReader::of_sequence(&v)?;
        let version = r.next("version")?.as_u64()?;
        if version != PFX_VERSION {
            return Err(PfxError::Malformed(format!("version {version}")));
        }
        let auth_safe = ContentInfo::from_der_value(r.next("authSafe")?).map_err(malformed)?;
        let mac_data = match r.next_if(TagClass::Universal, crate::der::tag::SEQUENCE) {
            Some(m) => Some(MacData::from_der_value(m)?),
            None => None,
        };
        r.finish()?;
        Ok(PfxPdu { auth_safe, mac_data })
    }

    pub fn integrity_mode(&self) -> Option<Mode> {
        match (self.auth_safe.kind(), &self.mac_data) {
            (ContentKind::Data, Some(_)) => Some(Mode::Password),
            (ContentKind::SignedData, None) => Some(Mode::PublicKey),
            _ => None,
        }
    }
}

/// Secrets and keys. Creation reads the password fields, `destination`
/// (privacy) and `source_key` (integrity); opening reads the password
/// fields, `destination_key` and `source`.
#[derive(Debug, Clone, Default)]
pub struct Credentials {
    pub privacy_password: Option<Vec<u8>>,
    pub integrity_password: Option<Vec<u8>>,
    pub destination: Option<RsaPublicKey>,
    pub destination_key: Option<RsaPrivateKey>,
    pub source: Option<RsaPublicKey>,
    pub source_key: Option<RsaPrivateKey>,
}

impl Credentials {
    /// The same password for privacy and integrity.
    pub fn password(pw: &[u8]) -> Self {
        Credentials {
            privacy_password: Some(pw.to_vec()),
            integrity_password: Some(pw.to_vec()),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfxOptions {
    pub iterations: u32,
    /// Suppresses the warning about plain key bags under password privacy.
    pub allow_plain_key: bool,
}

impl Default for PfxOptions {
    fn default() -> Self {
        PfxOptions { iterations: DEFAULT_ITERATIONS, allow_plain_key: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfxWarning {
    PlainKeyUnderPasswordPrivacy,
}

impl std::fmt::Display for PfxWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PfxWarning::PlainKeyUnderPasswordPrivacy => f.write_str(KEY_BAG_WARNING),
        }
    }
}

fn need<'a, T>(v: &'a Option<T>, what: &'static str) -> Result<&'a T, PfxError> {
    v.as_ref().ok_or(PfxError::MissingCredential(what))
}

fn check_links(bags: &[SafeBag]) -> Result<(), PfxError> {
    let cert_ids: Vec<&[u8]> = bags.iter().filter(|b| !b.is_key()).filter_map(SafeBag::local_key_id).collect();
    if cert_ids.is_empty() || !bags.iter().any(|b| b.is_key()) {
        return Ok(());
    }
    for b in bags.iter().filter(|b| b.is_key()) {
        match b.local_key_id() {
            Some(id) if cert_ids.contains(&id) => {}
            _ => return Err(PfxError::Precondition("key bag has no localKeyId matching a certificate bag")),
        }
    }
    Ok(())
}

pub fn pfx_create(
    bags: &[SafeBag],
    privacy: Mode,
    integrity: Mode,
    creds: &Credentials,
    opts: &PfxOptions,
    rng: &mut dyn RandomSource,
) -> Result<(PfxPdu, Vec<PfxWarning>), PfxError> {
    check_links(bags)?;
    let mut warnings = Vec::new();
    if privacy == Mode::Password && !opts.allow_plain_key && bags.iter().any(|b| matches!(b.value, BagValue::Key(_))) {
        warnings.push(PfxWarning::PlainKeyUnderPasswordPrivacy);
    }
    // fail on missing credentials before any expensive work
    match privacy {
        Mode::Password => need(&creds.privacy_password, "privacy password").map(drop)?,
        Mode::PublicKey => need(&creds.destination, "destination public key").map(drop)?,
    }
    match integrity {
        Mode::Password => need(&creds.integrity_password, "integrity password").map(drop)?,
        Mode::PublicKey => need(&creds.source_key, "source private key").map(drop)?,
    }

    let contents = cms::make_data(&safe_contents_der(bags));
    let protected = match privacy {
        Mode::Password => {
            let salt = crate::crypto::random_bytes(rng, DEFAULT_SALT_LEN)?;
            let pw = need(&creds.privacy_password, "privacy password")?;
            cms::encrypt_data_with_password(&contents, pw, &salt, opts.iterations, rng).map_err(malformed)?
        }
        Mode::PublicKey => {
            let dest = need(&creds.destination, "destination public key")?;
            cms::envelope(&contents, dest, rng).map_err(|e| match e {
                CmsError::ModulusTooSmall => PfxError::ModulusTooSmall,
                e => malformed(e),
            })?
        }
    };
    let safe = cms::make_data(&DerValue::sequence(vec![protected.to_der_value()]).to_der()?);

    let pdu = match integrity {
        Mode::Password => {
            let pw = need(&creds.integrity_password, "integrity password")?;
            let salt = crate::crypto::random_bytes(rng, DEFAULT_SALT_LEN)?;
            let kdf = Pbkdf2Params::new(&salt, opts.iterations, MAC_KEY_LEN);
            let mac = pkcs5::pbmac1_tag(&safe.to_der(), pw, &salt, opts.iterations, MAC_KEY_LEN)
                .map_err(|_| PfxError::Precondition("PBMAC1 parameters"))?;
            PfxPdu { auth_safe: safe, mac_data: Some(MacData { kdf, mac }) }
        }
        Mode::PublicKey => {
            let sk = need(&creds.source_key, "source private key")?;
            let name = Name::common_name("PFX source").expect("non-empty");
            let signer = SignerIdent::for_key(name, &sk.public_key());
            let signed = cms::sign_data(&safe, sk, &signer, &[], &[], rng).map_err(|e| match e {
                CmsError::ModulusTooSmall => PfxError::ModulusTooSmall,
                e => malformed(e),
            })?;
            PfxPdu { auth_safe: signed, mac_data: None }
        }
    };
    Ok((pdu, warnings))
}

/// Steps recorded by [`pfx_open_traced`], in the order they happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpenStep {
    IntegrityVerified(Mode),
    Decrypted(Mode),
}

pub fn pfx_open(pfx: &PfxPdu, creds: &Credentials) -> Result<Vec<SafeBag>, PfxError> {
    pfx_open_traced(pfx, creds, &mut Vec::new())
}

/// As [`pfx_open`]; integrity is always checked before anything is
/// decrypted.
pub fn pfx_open_traced(pfx: &PfxPdu, creds: &Credentials, trace: &mut Vec<OpenStep>) -> Result<Vec<SafeBag>, PfxError> {
    let integrity = pfx.integrity_mode().ok_or(PfxError::IntegrityFailure)?;
    let safe = match integrity {
        Mode::Password => {
            let pw = need(&creds.integrity_password, "integrity password")?;
            let md = pfx.mac_data.as_ref().expect("mode implies macData");
            if md.kdf.dk_len != MAC_KEY_LEN
                || !pkcs5::pbmac1_verify(&pfx.auth_safe.to_der(), &md.mac, pw, &md.kdf.salt, md.kdf.iterations, MAC_KEY_LEN)
            {
                return Err(PfxError::IntegrityFailure);
            }
            pfx.auth_safe.clone()
        }
        Mode::PublicKey => {
            let pk = need(&creds.source, "source public key")?;
            cms::verify_signed(&pfx.auth_safe, pk).map_err(|_| PfxError::IntegrityFailure)?
        }
    };
    trace.push(OpenStep::IntegrityVerified(integrity));

    let payload = safe.data_payload().map_err(malformed)?;
    let mut bags = Vec::new();
    for item in DerValue::from_der(payload)?.as_sequence()? {
        let ci = ContentInfo::from_der_value(item).map_err(malformed)?;
        let (mode, contents) = match ci.kind() {
            ContentKind::EncryptedData => {
                let pw = need(&creds.privacy_password, "privacy password")?;
                (Mode::Password, cms::decrypt_data_with_password(&ci, pw).map_err(|_| PfxError::DecryptionError)?)
            }
            ContentKind::EnvelopedData => {
                let sk = need(&creds.destination_key, "destination private key")?;
                (Mode::PublicKey, cms::open_envelope(&ci, sk).map_err(|_| PfxError::DecryptionError)?)
            }
            _ => return Err(PfxError::Malformed(format!("unexpected {} in AuthenticatedSafe", ci.kind().name()))),
        };
        trace.push(OpenStep::Decrypted(mode));
        bags.extend(parse_safe_contents(contents.data_payload().map_err(|_| PfxError::DecryptionError)?)?);
    }
    Ok(bags)
}
