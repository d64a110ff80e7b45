// SPDX-License-Identifier: Apache-2.0

//! ContentInfo and the six content types.
//!
//! ```text
//! ContentInfo ::= SEQUENCE { contentType OBJECT IDENTIFIER, content [0] EXPLICIT ANY }
//! EncapsulatedContentInfo ::= SEQUENCE { eContentType, eContent [0] EXPLICIT OCTET STRING }
//! EncryptedContentInfo ::= SEQUENCE {
//!     contentType, contentEncryptionAlgorithm, encryptedContent [0] IMPLICIT OCTET STRING }
//! DigestedData ::= SEQUENCE { version, digestAlgorithm, encapContentInfo, digest OCTET STRING }
//! EncryptedData ::= SEQUENCE { version, encryptedContentInfo }
//! AuthenticatedData ::= SEQUENCE {
//!     version, macAlgorithm, digestAlgorithm [1] OPTIONAL, encapContentInfo,
//!     authAttrs [2] IMPLICIT OPTIONAL, mac OCTET STRING, unauthAttrs [3] IMPLICIT OPTIONAL }
//! ```
//!
//! For `data` the encapsulated octets are the payload itself; for any other
//! inner type they are the DER of the inner content. Encrypted and
//! authenticated data use a key both sides already hold; there is no
//! recipient information.

mod enveloped;
mod signed;
mod toy;

pub use enveloped::{envelope, key_id, open_envelope, EnvelopedData, RecipientInfo};
pub use signed::{sign_data, verify_signed, SignedData, SignerIdent, SignerInfo};
pub use toy::{toy_issue, toy_verify, ToyCertificate};

use crate::crypto::{self, ct_eq, HashAlg, HmacKey, RandomSource, RngError};
use crate::der::{DerError, DerValue, Oid, SeqReader, TagClass};
use crate::keystore::{
    self, attribute_set, find_attribute, implicit_attributes, read_implicit_attributes, sort_attributes,
    AlgorithmIdentifier, Attribute, KeystoreError,
};
use crate::oids;
use crate::pkcs5::{self, Pkcs5Error};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CmsError {
    #[error("malformed content: {0}")]
    Malformed(String),
    #[error("unexpected content type {0}")]
    WrongContentType(Oid),
    #[error("message digest does not match the content")]
    DigestMismatch,
    #[error("signature does not verify")]
    SignatureInvalid,
    #[error("decryption error")]
    DecryptionError,
    #[error("modulus too small")]
    ModulusTooSmall,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("random source: {0}")]
    Rng(#[from] RngError),
}

impl From<DerError> for CmsError {
    fn from(e: DerError) -> Self {
        CmsError::Malformed(e.to_string())
    }
}

impl From<KeystoreError> for CmsError {
    fn from(e: KeystoreError) -> Self {
        CmsError::Malformed(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContentKind {
    Data,
    SignedData,
    EnvelopedData,
    DigestedData,
    EncryptedData,
    AuthenticatedData,
    Other,
}

impl ContentKind {
    pub fn name(self) -> &'static str {
        match self {
            ContentKind::Data => "data",
            ContentKind::SignedData => "signed-data",
            ContentKind::EnvelopedData => "enveloped-data",
            ContentKind::DigestedData => "digested-data",
            ContentKind::EncryptedData => "encrypted-data",
            ContentKind::AuthenticatedData => "authenticated-data",
            ContentKind::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentInfo {
    pub content_type: Oid,
    pub content: DerValue,
}

impl ContentInfo {
    pub fn new(content_type: Oid, content: DerValue) -> Self {
        ContentInfo { content_type, content }
    }

    pub fn kind(&self) -> ContentKind {
        let t = &self.content_type;
        if t == &oids::data() {
            ContentKind::Data
        } else if t == &oids::signed_data() {
            ContentKind::SignedData
        } else if t == &oids::enveloped_data() {
            ContentKind::EnvelopedData
        } else if t == &oids::digested_data() {
            ContentKind::DigestedData
        } else if t == &oids::encrypted_data() {
            ContentKind::EncryptedData
        } else if t == &oids::authenticated_data() {
            ContentKind::AuthenticatedData
        } else {
            ContentKind::Other
        }
    }

    pub fn to_der_value(&self) -> DerValue {
        DerValue::sequence(vec![DerValue::oid(&self.content_type), DerValue::explicit(0, self.content.clone())])
    }

    pub fn to_der(&self) -> Vec<u8> {
        self.to_der_value().to_der().expect("well-formed")
    }

    pub fn from_der_value(v: &DerValue) -> Result<Self, CmsError> {
        let mut r = SeqReader::of_sequence(v)?;
        let content_type = r.next("contentType")?.as_oid()?;
        let content = r.next("content")?.as_explicit(0)?.clone();
        r.finish()?;
        let ci = ContentInfo { content_type, content };
        if ci.kind() == ContentKind::Data {
            ci.content.as_octet_string()?;
        }
        Ok(ci)
    }

    pub fn from_der(octets: &[u8]) -> Result<Self, CmsError> {
        Self::from_der_value(&DerValue::from_der(octets)?)
    }

    fn expect_kind(&self, kind: ContentKind) -> Result<(), CmsError> {
        if self.kind() == kind {
            Ok(())
        } else {
            Err(CmsError::WrongContentType(self.content_type.clone()))
        }
    }

    /// Payload of a `data` content.
    pub fn data_payload(&self) -> Result<&[u8], CmsError> {
        self.expect_kind(ContentKind::Data)?;
        Ok(self.content.as_octet_string()?)
    }

    /// Octets carried when this content is encapsulated in another.
    pub fn encapsulated_octets(&self) -> Vec<u8> {
        match self.kind() {
            ContentKind::Data => self.content.as_octet_string().expect("checked").to_vec(),
            _ => self.content.to_der().expect("well-formed"),
        }
    }

    /// Inverse of [`ContentInfo::encapsulated_octets`].
    pub fn from_encapsulated(content_type: Oid, octets: &[u8]) -> Result<Self, CmsError> {
        if content_type == oids::data() {
            Ok(make_data(octets))
        } else {
            Ok(ContentInfo { content_type, content: DerValue::from_der(octets)? })
        }
    }
}

pub fn make_data(payload: &[u8]) -> ContentInfo {
    ContentInfo::new(oids::data(), DerValue::octet_string(payload.to_vec()))
}

fn version(v: i64) -> DerValue {
    DerValue::integer_i64(v)
}

pub(crate) fn encap_to_der_value(inner: &ContentInfo) -> DerValue {
    DerValue::sequence(vec![
        DerValue::oid(&inner.content_type),
        DerValue::explicit(0, DerValue::octet_string(inner.encapsulated_octets())),
    ])
}

pub(crate) fn encap_from_der_value(v: &DerValue) -> Result<(Oid, Vec<u8>), CmsError> {
    let mut r = SeqReader::of_sequence(v)?;
    let t = r.next("eContentType")?.as_oid()?;
    let octets = r.next("eContent")?.as_explicit(0)?.as_octet_string()?.to_vec();
    r.finish()?;
    Ok((t, octets))
}

/// `EncryptedContentInfo` contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptedContent {
    pub content_type: Oid,
    pub algorithm: AlgorithmIdentifier,
    pub ciphertext: Vec<u8>,
}

impl EncryptedContent {
    pub fn to_der_value(&self) -> DerValue {
        DerValue::sequence(vec![
            DerValue::oid(&self.content_type),
            self.algorithm.to_der_value(),
            DerValue::octet_string(self.ciphertext.clone()).implicit(0),
        ])
    }

    pub fn from_der_value(v: &DerValue) -> Result<Self, CmsError> {
        let mut r = SeqReader::of_sequence(v)?;
        let content_type = r.next("contentType")?.as_oid()?;
        let algorithm = AlgorithmIdentifier::from_der_value(r.next("contentEncryptionAlgorithm")?)?;
        let ciphertext = r.next("encryptedContent")?.expect_tag(TagClass::Context, 0)?.octets()?.to_vec();
        r.finish()?;
        Ok(EncryptedContent { content_type, algorithm, ciphertext })
    }

    /// AES-128-CBC under `key` with a fresh IV.
    pub(crate) fn seal(inner: &ContentInfo, key: &[u8], rng: &mut dyn RandomSource) -> Result<Self, CmsError> {
        let mut iv = vec![0u8; crypto::aes::BLOCK_LEN];
        rng.fill(&mut iv)?;
        let ciphertext = crypto::cbc_encrypt(key, &iv, &inner.encapsulated_octets())
            .map_err(|_| CmsError::InvalidParameter("content-encryption key must be 16 octets"))?;
        Ok(EncryptedContent {
            content_type: inner.content_type.clone(),
            algorithm: AlgorithmIdentifier::new(oids::aes128_cbc(), Some(DerValue::octet_string(iv))),
            ciphertext,
        })
    }

    /// Every failure, including a well-padded plaintext that does not
    /// parse, is [`CmsError::DecryptionError`].
    pub(crate) fn open(&self, key: &[u8]) -> Result<ContentInfo, CmsError> {
        if self.algorithm.oid != oids::aes128_cbc() {
            return Err(CmsError::DecryptionError);
        }
        let iv = match &self.algorithm.params {
            Some(p) => p.as_octet_string().map_err(|_| CmsError::DecryptionError)?,
            None => return Err(CmsError::DecryptionError),
        };
        let pt = crypto::cbc_decrypt(key, iv, &self.ciphertext).map_err(|_| CmsError::DecryptionError)?;
        ContentInfo::from_encapsulated(self.content_type.clone(), &pt).map_err(|_| CmsError::DecryptionError)
    }
}

pub fn digest_data(inner: &ContentInfo, alg: HashAlg) -> ContentInfo {
    let digest = alg.digest(&inner.encapsulated_octets());
    let body = DerValue::sequence(vec![
        version(0),
        keystore::hash_alg_id(alg).to_der_value(),
        encap_to_der_value(inner),
        DerValue::octet_string(digest),
    ]);
    ContentInfo::new(oids::digested_data(), body)
}

fn parse_digested(ci: &ContentInfo) -> Result<(HashAlg, ContentInfo, Vec<u8>, Vec<u8>), CmsError> {
    ci.expect_kind(ContentKind::DigestedData)?;
    let mut r = SeqReader::of_sequence(&ci.content)?;
    r.next("version")?.as_u64()?;
    let alg = keystore::parse_hash_alg_id(&AlgorithmIdentifier::from_der_value(r.next("digestAlgorithm")?)?)?;
    let (t, octets) = encap_from_der_value(r.next("encapContentInfo")?)?;
    let digest = r.next("digest")?.as_octet_string()?.to_vec();
    r.finish()?;
    Ok((alg, ContentInfo::from_encapsulated(t, &octets)?, octets, digest))
}

pub fn check_digest(ci: &ContentInfo) -> bool {
    match parse_digested(ci) {
        Ok((alg, _, octets, digest)) => ct_eq(&alg.digest(&octets), &digest),
        Err(_) => false,
    }
}

/// Inner content of a digested-data value whose digest checks out.
pub fn extract_digested(ci: &ContentInfo) -> Result<ContentInfo, CmsError> {
    let (alg, inner, octets, digest) = parse_digested(ci)?;
    if !ct_eq(&alg.digest(&octets), &digest) {
        return Err(CmsError::DigestMismatch);
    }
    Ok(inner)
}

fn encrypted_data_body(ec: &EncryptedContent) -> ContentInfo {
    ContentInfo::new(oids::encrypted_data(), DerValue::sequence(vec![version(0), ec.to_der_value()]))
}

fn parse_encrypted_data(ci: &ContentInfo) -> Result<EncryptedContent, CmsError> {
    ci.expect_kind(ContentKind::EncryptedData)?;
    let mut r = SeqReader::of_sequence(&ci.content)?;
    r.next("version")?.as_u64()?;
    let ec = EncryptedContent::from_der_value(r.next("encryptedContentInfo")?)?;
    r.finish()?;
    Ok(ec)
}

/// encrypted-data under a 16-octet key both parties already share.
pub fn encrypt_data(inner: &ContentInfo, key: &[u8], rng: &mut dyn RandomSource) -> Result<ContentInfo, CmsError> {
    Ok(encrypted_data_body(&EncryptedContent::seal(inner, key, rng)?))
}

pub fn decrypt_data(ci: &ContentInfo, key: &[u8]) -> Result<ContentInfo, CmsError> {
    parse_encrypted_data(ci)?.open(key)
}

/// encrypted-data whose content-encryption algorithm is PBES2.
pub fn encrypt_data_with_password(
    inner: &ContentInfo,
    password: &[u8],
    salt: &[u8],
    iterations: u32,
    rng: &mut dyn RandomSource,
) -> Result<ContentInfo, CmsError> {
    let (params, ciphertext) =
        pkcs5::pbes2_encrypt(&inner.encapsulated_octets(), password, salt, iterations, rng).map_err(|e| match e {
            Pkcs5Error::Rng(r) => CmsError::Rng(r),
            _ => CmsError::InvalidParameter("PBES2 parameters"),
        })?;
    let ec = EncryptedContent {
        content_type: inner.content_type.clone(),
        algorithm: keystore::pbes2_alg_id(&params),
        ciphertext,
    };
    Ok(encrypted_data_body(&ec))
}

pub fn decrypt_data_with_password(ci: &ContentInfo, password: &[u8]) -> Result<ContentInfo, CmsError> {
    let ec = parse_encrypted_data(ci)?;
    let params = keystore::parse_pbes2(&ec.algorithm)?;
    let pt = pkcs5::pbes2_decrypt(&params, &ec.ciphertext, password).map_err(|_| CmsError::DecryptionError)?;
    ContentInfo::from_encapsulated(ec.content_type, &pt).map_err(|_| CmsError::DecryptionError)
}

/// Adds contentType and messageDigest to a non-empty attribute list,
/// replacing any caller-supplied values of those types.
pub(crate) fn augment_attributes(attrs: &[Attribute], content_type: &Oid, digest: Vec<u8>) -> Vec<Attribute> {
    if attrs.is_empty() {
        return Vec::new();
    }
    let mut out: Vec<Attribute> = attrs
        .iter()
        .filter(|a| a.attr_type != oids::content_type() && a.attr_type != oids::message_digest())
        .cloned()
        .collect();
    out.push(Attribute::single(oids::content_type(), DerValue::oid(content_type)));
    out.push(Attribute::single(oids::message_digest(), DerValue::octet_string(digest)));
    sort_attributes(&mut out);
    out
}

/// Checks the contentType and messageDigest attributes against the content.
pub(crate) fn check_bound_attributes(attrs: &[Attribute], content_type: &Oid, digest: &[u8]) -> Result<(), CmsError> {
    let md = find_attribute(attrs, &oids::message_digest())
        .and_then(Attribute::first)
        .and_then(|v| v.as_octet_string().ok())
        .ok_or(CmsError::DigestMismatch)?;
    if !ct_eq(md, digest) {
        return Err(CmsError::DigestMismatch);
    }
    let ct = find_attribute(attrs, &oids::content_type())
        .and_then(Attribute::first)
        .and_then(|v| v.as_oid().ok());
    if ct.as_ref() != Some(content_type) {
        return Err(CmsError::SignatureInvalid);
    }
    Ok(())
}

pub(crate) fn attrs_der(attrs: &[Attribute]) -> Vec<u8> {
    attribute_set(attrs).to_der().expect("well-formed")
}

/// authenticated-data: HMAC-SHA-256 under a shared key, over the content
/// or, when `auth_attrs` is non-empty, over the DER of the augmented
/// attribute set.
pub fn authenticate_data(inner: &ContentInfo, key: &[u8], auth_attrs: &[Attribute]) -> ContentInfo {
    let octets = inner.encapsulated_octets();
    let alg = HashAlg::Sha256;
    let attrs = augment_attributes(auth_attrs, &inner.content_type, alg.digest(&octets));
    let mac_key = HmacKey::new(alg, key);
    let mac = if attrs.is_empty() { mac_key.mac(&octets) } else { mac_key.mac(&attrs_der(&attrs)) };
    let mut items = vec![
        version(0),
        AlgorithmIdentifier::with_null(oids::hmac_with_sha256()).to_der_value(),
    ];
    if !attrs.is_empty() {
        items.push(DerValue::explicit(1, keystore::hash_alg_id(alg).to_der_value()));
    }
    items.push(encap_to_der_value(inner));
    items.extend(implicit_attributes(2, &attrs));
    items.push(DerValue::octet_string(mac));
    ContentInfo::new(oids::authenticated_data(), DerValue::sequence(items))
}

/// (inner content, its encapsulated octets, authAttrs, MAC)
type AuthParts = (ContentInfo, Vec<u8>, Vec<Attribute>, Vec<u8>);

fn parse_authenticated(ci: &ContentInfo) -> Result<AuthParts, CmsError> {
    ci.expect_kind(ContentKind::AuthenticatedData)?;
    let mut r = SeqReader::of_sequence(&ci.content)?;
    r.next("version")?.as_u64()?;
    AlgorithmIdentifier::from_der_value(r.next("macAlgorithm")?)?;
    let digest_alg = r.next_if(TagClass::Context, 1);
    let (t, octets) = encap_from_der_value(r.next("encapContentInfo")?)?;
    let attrs = read_implicit_attributes(&mut r, 2)?;
    let mac = r.next("mac")?.as_octet_string()?.to_vec();
    read_implicit_attributes(&mut r, 3)?;
    r.finish()?;
    if digest_alg.is_some() != !attrs.is_empty() {
        return Err(CmsError::Malformed("digestAlgorithm must accompany authAttrs".into()));
    }
    Ok((ContentInfo::from_encapsulated(t, &octets)?, octets, attrs, mac))
}

pub fn check_auth(ci: &ContentInfo, key: &[u8]) -> bool {
    extract_authenticated(ci, key).is_ok()
}

pub fn extract_authenticated(ci: &ContentInfo, key: &[u8]) -> Result<ContentInfo, CmsError> {
    let (inner, octets, attrs, mac) = parse_authenticated(ci)?;
    let mac_key = HmacKey::new(HashAlg::Sha256, key);
    let expect = if attrs.is_empty() {
        mac_key.mac(&octets)
    } else {
        check_bound_attributes(&attrs, &inner.content_type, &HashAlg::Sha256.digest(&octets))?;
        mac_key.mac(&attrs_der(&attrs))
    };
    if !ct_eq(&expect, &mac) {
        return Err(CmsError::SignatureInvalid);
    }
    Ok(inner)
}

/// One-line description of each layer, outermost first, stopping at the
/// first layer that needs a key.
pub fn describe(ci: &ContentInfo) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = ci.clone();
    loop {
        let kind = cur.kind();
        let next = match kind {
            ContentKind::Data => {
                let n = cur.data_payload().map(<[u8]>::len).unwrap_or(0);
                out.push(format!("data ({n} octets)"));
                None
            }
            ContentKind::SignedData => SignedData::from_content_info(&cur)
                .ok()
                .and_then(|sd| sd.inner().ok()),
            ContentKind::DigestedData => parse_digested(&cur).ok().map(|(_, inner, _, _)| inner),
            ContentKind::AuthenticatedData => parse_authenticated(&cur).ok().map(|(inner, ..)| inner),
            _ => None,
        };
        if kind != ContentKind::Data {
            out.push(format!("{} ({})", kind.name(), cur.content_type));
        }
        match next {
            Some(n) => cur = n,
            None => break,
        }
    }
    out
}
