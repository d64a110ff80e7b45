// SPDX-License-Identifier: Apache-2.0

//! ```text
//! SignedData ::= SEQUENCE {
//!     version, digestAlgorithms SET OF AlgorithmIdentifier, encapContentInfo,
//!     certificates [0] IMPLICIT SET OF ContentInfo OPTIONAL, signerInfos SET OF SignerInfo }
//! SignerInfo ::= SEQUENCE {
//!     version, sid SEQUENCE { issuerAndSubject Name, keyId OCTET STRING },
//!     digestAlgorithm, signedAttrs [0] IMPLICIT OPTIONAL,
//!     signatureAlgorithm, signature OCTET STRING, unsignedAttrs [1] IMPLICIT OPTIONAL }
//! ```
//!
//! Certificates are toy certificates, each itself a signed-data
//! ContentInfo.

use super::{
    attrs_der, augment_attributes, check_bound_attributes, encap_from_der_value, encap_to_der_value, CmsError,
    ContentInfo, ContentKind,
};
use crate::crypto::{HashAlg, RandomSource};
use crate::csr::{pss_sign, pss_verify, Name};
use crate::der::{DerValue, Oid, SeqReader, TagClass};
use crate::keystore::{self, implicit_attributes, read_implicit_attributes, AlgorithmIdentifier, Attribute};
use crate::oids;
use crate::pkcs1::Pkcs1Error;
use crate::rsa::{RsaPrivateKey, RsaPublicKey};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignerIdent {
    pub name: Name,
    pub key_id: Vec<u8>,
}

impl SignerIdent {
    /// Identifier whose key id is derived from `pk`.
    pub fn for_key(name: Name, pk: &RsaPublicKey) -> Self {
        SignerIdent { name, key_id: super::key_id(pk) }
    }

    fn to_der_value(&self) -> DerValue {
        DerValue::sequence(vec![self.name.to_der_value(), DerValue::octet_string(self.key_id.clone())])
    }

    fn from_der_value(v: &DerValue) -> Result<Self, CmsError> {
        let mut r = SeqReader::of_sequence(v)?;
        let name = Name::from_der_value(r.next("name")?).map_err(|e| CmsError::Malformed(e.to_string()))?;
        let key_id = r.next("keyId")?.as_octet_string()?.to_vec();
        r.finish()?;
        Ok(SignerIdent { name, key_id })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignerInfo {
    pub sid: SignerIdent,
    pub digest_algorithm: AlgorithmIdentifier,
    pub signed_attrs: Vec<Attribute>,
    pub signature_algorithm: AlgorithmIdentifier,
    pub signature: Vec<u8>,
    pub unsigned_attrs: Vec<Attribute>,
}

impl SignerInfo {
    fn to_der_value(&self) -> DerValue {
        let mut items = vec![
            DerValue::integer_i64(1),
            self.sid.to_der_value(),
            self.digest_algorithm.to_der_value(),
        ];
        items.extend(implicit_attributes(0, &self.signed_attrs));
        items.push(self.signature_algorithm.to_der_value());
        items.push(DerValue::octet_string(self.signature.clone()));
        items.extend(implicit_attributes(1, &self.unsigned_attrs));
        DerValue::sequence(items)
    }

    fn from_der_value(v: &DerValue) -> Result<Self, CmsError> {
        let mut r = SeqReader::of_sequence(v)?;
        r.next("version")?.as_u64()?;
        let sid = SignerIdent::from_der_value(r.next("sid")?)?;
        let digest_algorithm = AlgorithmIdentifier::from_der_value(r.next("digestAlgorithm")?)?;
        let signed_attrs = read_implicit_attributes(&mut r, 0)?;
        let signature_algorithm = AlgorithmIdentifier::from_der_value(r.next("signatureAlgorithm")?)?;
        let signature = r.next("signature")?.as_octet_string()?.to_vec();
        let unsigned_attrs = read_implicit_attributes(&mut r, 1)?;
        r.finish()?;
        Ok(SignerInfo { sid, digest_algorithm, signed_attrs, signature_algorithm, signature, unsigned_attrs })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedData {
    pub content_type: Oid,
    pub content: Vec<u8>,
    pub certificates: Vec<ContentInfo>,
    pub signer_infos: Vec<SignerInfo>,
}

impl SignedData {
    pub fn to_content_info(&self) -> ContentInfo {
        let mut items = vec![
            DerValue::integer_i64(1),
            DerValue::set(vec![keystore::hash_alg_id(HashAlg::Sha256).to_der_value()]),
            encap_to_der_value(&self.inner_unchecked()),
        ];
        if !self.certificates.is_empty() {
            items.push(DerValue::set(self.certificates.iter().map(ContentInfo::to_der_value).collect()).implicit(0));
        }
        items.push(DerValue::set(self.signer_infos.iter().map(SignerInfo::to_der_value).collect()));
        ContentInfo::new(oids::signed_data(), DerValue::sequence(items))
    }

    pub fn from_content_info(ci: &ContentInfo) -> Result<Self, CmsError> {
        ci.expect_kind(ContentKind::SignedData)?;
        let mut r = SeqReader::of_sequence(&ci.content)?;
        r.next("version")?.as_u64()?;
        for alg in r.next("digestAlgorithms")?.as_set()? {
            keystore::parse_hash_alg_id(&AlgorithmIdentifier::from_der_value(alg)?)?;
        }
        let (content_type, content) = encap_from_der_value(r.next("encapContentInfo")?)?;
        let certificates = match r.next_if(TagClass::Context, 0) {
            Some(set) => set.children()?.iter().map(ContentInfo::from_der_value).collect::<Result<_, _>>()?,
            None => Vec::new(),
        };
        let signer_infos = r
            .next("signerInfos")?
            .as_set()?
            .iter()
            .map(SignerInfo::from_der_value)
            .collect::<Result<_, _>>()?;
        r.finish()?;
        let sd = SignedData { content_type, content, certificates, signer_infos };
        sd.inner()?;
        Ok(sd)
    }

    fn inner_unchecked(&self) -> ContentInfo {
        self.inner().expect("content checked on construction")
    }

    pub fn inner(&self) -> Result<ContentInfo, CmsError> {
        ContentInfo::from_encapsulated(self.content_type.clone(), &self.content)
    }
}

/// Signs `inner` with RSASSA-PSS. A non-empty `signed_attrs` list gains
/// contentType and messageDigest and the signature then covers the DER of
/// the attribute set; otherwise it covers the content octets.
pub fn sign_data(
    inner: &ContentInfo,
    signer_key: &RsaPrivateKey,
    signer: &SignerIdent,
    signed_attrs: &[Attribute],
    certificates: &[ContentInfo],
    rng: &mut dyn RandomSource,
) -> Result<ContentInfo, CmsError> {
    let content = inner.encapsulated_octets();
    let alg = HashAlg::Sha256;
    let attrs = augment_attributes(signed_attrs, &inner.content_type, alg.digest(&content));
    let to_sign = if attrs.is_empty() { content.clone() } else { attrs_der(&attrs) };
    let (signature_algorithm, signature) = pss_sign(&to_sign, signer_key, rng).map_err(|e| match e {
        Pkcs1Error::Rng(r) => CmsError::Rng(r),
        _ => CmsError::ModulusTooSmall,
    })?;
    let si = SignerInfo {
        sid: signer.clone(),
        digest_algorithm: keystore::hash_alg_id(alg),
        signed_attrs: attrs,
        signature_algorithm,
        signature,
        unsigned_attrs: Vec::new(),
    };
    let mut certificates = certificates.to_vec();
    certificates.sort_by_cached_key(ContentInfo::to_der);
    let sd = SignedData {
        content_type: inner.content_type.clone(),
        content,
        certificates,
        signer_infos: vec![si],
    };
    Ok(sd.to_content_info())
}

/// Verifies the signer whose key id matches `trusted` and returns the
/// inner content. The digest binding is checked before the signature.
pub fn verify_signed(ci: &ContentInfo, trusted: &RsaPublicKey) -> Result<ContentInfo, CmsError> {
    let sd = SignedData::from_content_info(ci)?;
    let kid = super::key_id(trusted);
    let si = sd
        .signer_infos
        .iter()
        .find(|s| s.sid.key_id == kid)
        .ok_or(CmsError::SignatureInvalid)?;
    let alg = keystore::parse_hash_alg_id(&si.digest_algorithm)?;
    let signed = if si.signed_attrs.is_empty() {
        sd.content.clone()
    } else {
        check_bound_attributes(&si.signed_attrs, &sd.content_type, &alg.digest(&sd.content))?;
        attrs_der(&si.signed_attrs)
    };
    if !pss_verify(&signed, &si.signature, &si.signature_algorithm, trusted) {
        return Err(CmsError::SignatureInvalid);
    }
    sd.inner()
}
