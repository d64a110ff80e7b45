// SPDX-License-Identifier: Apache-2.0

//! Certification requests signed with RSASSA-PSS.
//!
//! ```text
//! CertificationRequestInfo ::= SEQUENCE {
//!     version        INTEGER (0),
//!     subject        Name,
//!     subjectPKInfo  SubjectPublicKeyInfo,
//!     attributes     [0] IMPLICIT SET OF Attribute }
//! CertificationRequest ::= SEQUENCE {
//!     certificationRequestInfo, signatureAlgorithm, signature BIT STRING }
//! ```

use crate::crypto::{RandomSource, RngError};
use crate::der::{tag, DerError, DerValue, Oid, SeqReader, TagClass};
use crate::keystore::{
    self, attribute_check, attribute_set, parse_attribute_set, sort_attributes, AlgorithmIdentifier, Attribute,
    KeystoreError,
};
use crate::oids;
use crate::pkcs1::{self, Pkcs1Error, PssParams};
use crate::rsa::{RsaPrivateKey, RsaPublicKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CsrError {
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("attribute syntax violation")]
    SyntaxViolation,
    #[error("modulus too small")]
    ModulusTooSmall,
    #[error("malformed request: {0}")]
    MalformedRequest(String),
    #[error("random source: {0}")]
    Rng(#[from] RngError),
}

impl From<DerError> for CsrError {
    fn from(e: DerError) -> Self {
        CsrError::MalformedRequest(e.to_string())
    }
}

impl From<KeystoreError> for CsrError {
    fn from(e: KeystoreError) -> Self {
        CsrError::MalformedRequest(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameAttr {
    CommonName,
    Organization,
    Country,
    EmailAddress,
}

impl NameAttr {
    pub fn oid(self) -> Oid {
        match self {
            NameAttr::CommonName => oids::common_name(),
            NameAttr::Organization => oids::organization_name(),
            NameAttr::Country => oids::country_name(),
            NameAttr::EmailAddress => oids::email_address(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NameAttr::CommonName => "CN",
            NameAttr::Organization => "O",
            NameAttr::Country => "C",
            NameAttr::EmailAddress => "E",
        }
    }

    fn from_oid(oid: &Oid) -> Option<Self> {
        [NameAttr::CommonName, NameAttr::Organization, NameAttr::Country, NameAttr::EmailAddress]
            .into_iter()
            .find(|a| &a.oid() == oid)
    }

    fn encode(self, value: &str) -> Result<DerValue, CsrError> {
        let bad = |_| CsrError::Precondition("name value has the wrong character set");
        match self {
            NameAttr::CommonName | NameAttr::Organization => Ok(DerValue::utf8(value)),
            NameAttr::Country => {
                if value.len() != 2 || !value.bytes().all(|b| b.is_ascii_alphabetic()) {
                    return Err(CsrError::Precondition("country must be two letters"));
                }
                DerValue::printable(value).map_err(bad)
            }
            NameAttr::EmailAddress => DerValue::ia5(value).map_err(bad),
        }
    }

    fn expected_tag(self) -> u32 {
        match self {
            NameAttr::CommonName | NameAttr::Organization => tag::UTF8_STRING,
            NameAttr::Country => tag::PRINTABLE_STRING,
            NameAttr::EmailAddress => tag::IA5_STRING,
        }
    }
}

/// Distinguished name: one attribute per relative name, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Name {
    entries: Vec<(NameAttr, String)>,
}

impl Name {
    pub fn new(entries: Vec<(NameAttr, String)>) -> Result<Self, CsrError> {
        if !entries.iter().any(|(a, v)| *a == NameAttr::CommonName && !v.is_empty()) {
            return Err(CsrError::Precondition("subject needs a common name"));
        }
        for (a, v) in &entries {
            a.encode(v)?;
        }
        Ok(Name { entries })
    }

    pub fn common_name(cn: &str) -> Result<Self, CsrError> {
        Self::new(vec![(NameAttr::CommonName, cn.to_string())])
    }

    pub fn entries(&self) -> &[(NameAttr, String)] {
        &self.entries
    }

    pub fn get(&self, attr: NameAttr) -> Option<&str> {
        self.entries.iter().find(|(a, _)| *a == attr).map(|(_, v)| v.as_str())
    }

    pub fn to_der_value(&self) -> DerValue {
        DerValue::sequence(
            self.entries
                .iter()
                .map(|(a, v)| {
                    let atv = DerValue::sequence(vec![DerValue::oid(&a.oid()), a.encode(v).expect("checked")]);
                    DerValue::set(vec![atv])
                })
                .collect(),
        )
    }

    pub fn from_der_value(v: &DerValue) -> Result<Self, CsrError> {
        let mut entries = Vec::new();
        for rdn in v.as_sequence()? {
            let [atv] = rdn.as_set()? else {
                return Err(CsrError::MalformedRequest("multi-valued relative name".into()));
            };
            let mut r = SeqReader::of_sequence(atv)?;
            let oid = r.next("type")?.as_oid()?;
            let value = r.next("value")?;
            r.finish()?;
            let attr = NameAttr::from_oid(&oid)
                .ok_or_else(|| CsrError::MalformedRequest(format!("unsupported name attribute {oid}")))?;
            value.expect_universal(attr.expected_tag())?;
            entries.push((attr, value.as_str()?.to_string()));
        }
        Name::new(entries).map_err(|e| CsrError::MalformedRequest(e.to_string()))
    }
}

impl std::fmt::Display for Name {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(a, v)| format!("{}={v}", a.label())).collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificationRequestInfo {
    pub subject: Name,
    pub public_key: RsaPublicKey,
    pub attributes: Vec<Attribute>,
}

impl CertificationRequestInfo {
    pub fn to_der_value(&self) -> DerValue {
        DerValue::sequence(vec![
            DerValue::integer_i64(0),
            self.subject.to_der_value(),
            keystore::spki_to_der_value(&self.public_key),
            attribute_set(&self.attributes).implicit(0),
        ])
    }

    pub fn to_der(&self) -> Vec<u8> {
        self.to_der_value().to_der().expect("well-formed")
    }

    pub fn from_der_value(v: &DerValue) -> Result<Self, CsrError> {
        let mut r = SeqReader::of_sequence(v)?;
        if r.next("version")?.as_u64()? != 0 {
            return Err(CsrError::MalformedRequest("version must be 0".into()));
        }
        let subject = Name::from_der_value(r.next("subject")?)?;
        let public_key = keystore::spki_from_der_value(r.next("subjectPKInfo")?)?;
        let attrs = r.next("attributes")?.expect_tag(TagClass::Context, 0)?;
        let attributes = parse_attribute_set(attrs)?;
        r.finish()?;
        Ok(CertificationRequestInfo { subject, public_key, attributes })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificationRequest {
    pub info: CertificationRequestInfo,
    pub signature_algorithm: AlgorithmIdentifier,
    pub signature: Vec<u8>,
}

impl CertificationRequest {
    pub fn to_der(&self) -> Vec<u8> {
        DerValue::sequence(vec![
            self.info.to_der_value(),
            self.signature_algorithm.to_der_value(),
            DerValue::bit_string(&self.signature),
        ])
        .to_der()
        .expect("well-formed")
    }

    pub fn from_der(octets: &[u8]) -> Result<Self, CsrError> {
        let v = DerValue::from_der(octets)?;
        let mut r = SeqReader::of_sequence(&v)?;
        let info = CertificationRequestInfo::from_der_value(r.next("certificationRequestInfo")?)?;
        let signature_algorithm = AlgorithmIdentifier::from_der_value(r.next("signatureAlgorithm")?)?;
        let signature = r.next("signature")?.as_bit_string()?.to_vec();
        r.finish()?;
        Ok(CertificationRequest { info, signature_algorithm, signature })
    }
}

/// Signs `message` with RSASSA-PSS and returns the algorithm identifier
/// naming the salt length actually used.
pub(crate) fn pss_sign(
    message: &[u8],
    sk: &RsaPrivateKey,
    rng: &mut dyn RandomSource,
) -> Result<(AlgorithmIdentifier, Vec<u8>), Pkcs1Error> {
    let params = PssParams::fitted(sk.modulus_bits());
    let sig = pkcs1::sign(message, sk, &params, rng)?;
    Ok((keystore::pss_alg_id(params.salt_len), sig))
}

pub(crate) fn pss_verify(message: &[u8], sig: &[u8], alg: &AlgorithmIdentifier, pk: &RsaPublicKey) -> bool {
    let Ok(salt_len) = keystore::parse_pss_alg_id(alg) else {
        return false;
    };
    let params = PssParams::for_key(pk).with_salt_len(salt_len);
    pkcs1::verify(message, sig, pk, &params)
}

pub fn build_csr(
    subject: Name,
    sk: &RsaPrivateKey,
    mut attributes: Vec<Attribute>,
    rng: &mut dyn RandomSource,
) -> Result<CertificationRequest, CsrError> {
    if !attributes.iter().all(attribute_check) {
        return Err(CsrError::SyntaxViolation);
    }
    sort_attributes(&mut attributes);
    let info = CertificationRequestInfo { subject, public_key: sk.public_key(), attributes };
    let (signature_algorithm, signature) = pss_sign(&info.to_der(), sk, rng).map_err(|e| match e {
        Pkcs1Error::Rng(r) => CsrError::Rng(r),
        _ => CsrError::ModulusTooSmall,
    })?;
    Ok(CertificationRequest { info, signature_algorithm, signature })
}

/// Self-signature check against the embedded public key.
pub fn verify_csr(csr: &CertificationRequest) -> bool {
    pss_verify(&csr.info.to_der(), &csr.signature, &csr.signature_algorithm, &csr.info.public_key)
}

/// Decodes and verifies in one step; undecodable input is
/// [`CsrError::MalformedRequest`].
pub fn verify_csr_der(octets: &[u8]) -> Result<bool, CsrError> {
    Ok(verify_csr(&CertificationRequest::from_der(octets)?))
}
