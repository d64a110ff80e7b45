// SPDX-License-Identifier: Apache-2.0

//! ```text
//! EnvelopedData ::= SEQUENCE {
//!     version, recipientInfos SET OF KeyTransRecipientInfo, encryptedContentInfo }
//! KeyTransRecipientInfo ::= SEQUENCE {
//!     version, rid [0] IMPLICIT OCTET STRING, keyEncryptionAlgorithm, encryptedKey OCTET STRING }
//! ```

use super::{CmsError, ContentInfo, ContentKind, EncryptedContent};
use crate::crypto::{self, HashAlg, RandomSource};
use crate::der::{DerValue, SeqReader, TagClass};
use crate::keystore::{self, AlgorithmIdentifier};
use crate::oids;
use crate::pkcs1::{self, Pkcs1Error, Scheme};
use crate::rsa::{RsaPrivateKey, RsaPublicKey};

/// SHA-256 of the DER public key; names keys in recipient and signer
/// identifiers.
pub fn key_id(pk: &RsaPublicKey) -> Vec<u8> {
    HashAlg::Sha256.digest(&keystore::rsa_public_key_to_der_value(pk).to_der().expect("well-formed"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecipientInfo {
    pub key_id: Vec<u8>,
    pub algorithm: AlgorithmIdentifier,
    pub encrypted_key: Vec<u8>,
}

impl RecipientInfo {
    fn to_der_value(&self) -> DerValue {
        DerValue::sequence(vec![
            DerValue::integer_i64(2),
            DerValue::octet_string(self.key_id.clone()).implicit(0),
            self.algorithm.to_der_value(),
            DerValue::octet_string(self.encrypted_key.clone()),
        ])
    }

    fn from_der_value(v: &DerValue) -> Result<Self, CmsError> {
        let mut r = SeqReader::of_sequence(v)?;
        r.next("version")?.as_u64()?;
        let key_id = r.next("rid")?.expect_tag(TagClass::Context, 0)?.octets()?.to_vec();
        let algorithm = AlgorithmIdentifier::from_der_value(r.next("keyEncryptionAlgorithm")?)?;
        let encrypted_key = r.next("encryptedKey")?.as_octet_string()?.to_vec();
        r.finish()?;
        Ok(RecipientInfo { key_id, algorithm, encrypted_key })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopedData {
    pub recipients: Vec<RecipientInfo>,
    pub content: EncryptedContent,
}

impl EnvelopedData {
    pub fn to_content_info(&self) -> ContentInfo {
        let body = DerValue::sequence(vec![
            DerValue::integer_i64(2),
            DerValue::set(self.recipients.iter().map(RecipientInfo::to_der_value).collect()),
            self.content.to_der_value(),
        ]);
        ContentInfo::new(oids::enveloped_data(), body)
    }

    pub fn from_content_info(ci: &ContentInfo) -> Result<Self, CmsError> {
        ci.expect_kind(ContentKind::EnvelopedData)?;
        let mut r = SeqReader::of_sequence(&ci.content)?;
        r.next("version")?.as_u64()?;
        let recipients = r
            .next("recipientInfos")?
            .as_set()?
            .iter()
            .map(RecipientInfo::from_der_value)
            .collect::<Result<Vec<_>, _>>()?;
        let content = EncryptedContent::from_der_value(r.next("encryptedContentInfo")?)?;
        r.finish()?;
        if recipients.is_empty() {
            return Err(CmsError::Malformed("no recipients".into()));
        }
        Ok(EnvelopedData { recipients, content })
    }
}

/// Encrypts `inner` under a fresh AES-128 key and transports the key to
/// `recipient` with RSAES-OAEP.
pub fn envelope(inner: &ContentInfo, recipient: &RsaPublicKey, rng: &mut dyn RandomSource) -> Result<ContentInfo, CmsError> {
    let mut cek = [0u8; crypto::aes::KEY_LEN];
    rng.fill(&mut cek)?;
    let encrypted_key = pkcs1::encrypt(&cek, recipient, &Scheme::oaep_for(recipient), rng).map_err(|e| match e {
        Pkcs1Error::Rng(r) => CmsError::Rng(r),
        _ => CmsError::ModulusTooSmall,
    })?;
    let content = EncryptedContent::seal(inner, &cek, rng)?;
    let ri = RecipientInfo { key_id: key_id(recipient), algorithm: keystore::oaep_alg_id(), encrypted_key };
    Ok(EnvelopedData { recipients: vec![ri], content }.to_content_info())
}

/// Every key-side or content-side failure is [`CmsError::DecryptionError`].
pub fn open_envelope(ci: &ContentInfo, recipient: &RsaPrivateKey) -> Result<ContentInfo, CmsError> {
    let ed = EnvelopedData::from_content_info(ci)?;
    let kid = key_id(&recipient.public_key());
    let ri = ed.recipients.iter().find(|r| r.key_id == kid).ok_or(CmsError::DecryptionError)?;
    keystore::parse_oaep_alg_id(&ri.algorithm).map_err(|_| CmsError::DecryptionError)?;
    let scheme = Scheme::oaep_for(&recipient.public_key());
    let cek = pkcs1::decrypt(&ri.encrypted_key, recipient, &scheme).map_err(|_| CmsError::DecryptionError)?;
    if cek.len() != crypto::aes::KEY_LEN {
        return Err(CmsError::DecryptionError);
    }
    ed.content.open(&cek)
}
