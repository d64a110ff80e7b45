// SPDX-License-Identifier: Apache-2.0

//! Minimal certificates: a signed-data ContentInfo whose encapsulated
//! content is
//!
//! ```text
//! ToyCertificate ::= SEQUENCE { serial INTEGER, issuer Name, subject Name, subjectPKInfo }
//! ```

use super::{sign_data, verify_signed, CmsError, ContentInfo, SignedData, SignerIdent};
use crate::crypto::RandomSource;
use crate::csr::{verify_csr, CertificationRequest, Name};
use crate::der::{DerValue, SeqReader};
use crate::keystore;
use crate::oids;
use crate::rsa::{RsaPrivateKey, RsaPublicKey};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyCertificate {
    pub serial: u64,
    pub issuer: Name,
    pub subject: Name,
    pub public_key: RsaPublicKey,
}

impl ToyCertificate {
    pub fn to_der_value(&self) -> DerValue {
        DerValue::sequence(vec![
            DerValue::integer_unsigned(&self.serial.into()),
            self.issuer.to_der_value(),
            self.subject.to_der_value(),
            keystore::spki_to_der_value(&self.public_key),
        ])
    }

    pub fn from_der_value(v: &DerValue) -> Result<Self, CmsError> {
        let mut r = SeqReader::of_sequence(v)?;
        let serial = r.next("serial")?.as_u64()?;
        let malformed = |e: crate::csr::CsrError| CmsError::Malformed(e.to_string());
        let issuer = Name::from_der_value(r.next("issuer")?).map_err(malformed)?;
        let subject = Name::from_der_value(r.next("subject")?).map_err(malformed)?;
        let public_key = keystore::spki_from_der_value(r.next("subjectPKInfo")?)?;
        r.finish()?;
        Ok(ToyCertificate { serial, issuer, subject, public_key })
    }

    /// Reads the certificate body without checking the issuer signature.
    pub fn peek(ci: &ContentInfo) -> Result<Self, CmsError> {
        let inner = SignedData::from_content_info(ci)?.inner()?;
        if inner.content_type != oids::toy_certificate() {
            return Err(CmsError::WrongContentType(inner.content_type));
        }
        Self::from_der_value(&inner.content)
    }
}

/// Issues a certificate for the subject and key of a request whose
/// self-signature verifies.
pub fn toy_issue(
    csr: &CertificationRequest,
    ca_key: &RsaPrivateKey,
    ca_name: &Name,
    serial: u64,
    rng: &mut dyn RandomSource,
) -> Result<ContentInfo, CmsError> {
    if !verify_csr(csr) {
        return Err(CmsError::SignatureInvalid);
    }
    let cert = ToyCertificate {
        serial,
        issuer: ca_name.clone(),
        subject: csr.info.subject.clone(),
        public_key: csr.info.public_key.clone(),
    };
    let inner = ContentInfo::new(oids::toy_certificate(), cert.to_der_value());
    let signer = SignerIdent::for_key(ca_name.clone(), &ca_key.public_key());
    sign_data(&inner, ca_key, &signer, &[], &[], rng)
}

pub fn toy_verify(ci: &ContentInfo, ca_key: &RsaPublicKey) -> Result<ToyCertificate, CmsError> {
    let inner = verify_signed(ci, ca_key)?;
    if inner.content_type != oids::toy_certificate() {
        return Err(CmsError::WrongContentType(inner.content_type));
    }
    ToyCertificate::from_der_value(&inner.content)
}
