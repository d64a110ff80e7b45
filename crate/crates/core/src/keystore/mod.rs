// SPDX-License-Identifier: Apache-2.0

//! Private-key containers, algorithm identifiers and the attribute
//! registry.
//!
//! RSA private key body (the `privateKey` octets of a `PrivateKeyInfo`):
//!
//! ```text
//! RsaPrivateKey ::= SEQUENCE {
//!     version          INTEGER,      -- 0 for two primes, 1 otherwise
//!     n, e, d          INTEGER,
//!     r1, r2           INTEGER,
//!     d1, d2           INTEGER,
//!     t2               INTEGER,      -- r1^-1 mod r2
//!     otherPrimeInfos  SEQUENCE OF SEQUENCE { ri, di, ti } OPTIONAL
//! }
//! ```
//!
//! `otherPrimeInfos` is present exactly when version is 1.

mod attributes;

use num_bigint::BigUint;

pub use attributes::{
    attribute_check, attribute_make, attribute_set, find_attribute, natural_person, parse_attribute_set, sort_attributes, AttrInput,
    Attribute, AttributeRegistry, AttributeSpec, Syntax,
};
pub(crate) use attributes::{implicit_attributes, read_implicit_attributes};

use crate::crypto::{HashAlg, RandomSource, RngError};
use crate::der::{tag, DerError, DerValue, Oid, SeqReader};
use crate::oids;
use crate::pkcs5::{self, Pbes2Params, Pbkdf2Params, Pkcs5Error};
use crate::rsa::{RsaPrivateKey, RsaPublicKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KeystoreError {
    #[error("malformed key: {0}")]
    MalformedKey(String),
    #[error("unsupported algorithm {0}")]
    UnsupportedAlgorithm(String),
    #[error("decryption error")]
    DecryptionError,
    #[error("unknown attribute type {0}")]
    UnknownAttributeType(String),
    #[error("syntax violation: {0}")]
    SyntaxViolation(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("random source: {0}")]
    Rng(#[from] RngError),
}

impl From<DerError> for KeystoreError {
    fn from(e: DerError) -> Self {
        KeystoreError::MalformedKey(e.to_string())
    }
}

/// `SEQUENCE { algorithm OBJECT IDENTIFIER, parameters ANY OPTIONAL }`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgorithmIdentifier {
    pub oid: Oid,
    pub params: Option<DerValue>,
}

impl AlgorithmIdentifier {
    pub fn new(oid: Oid, params: Option<DerValue>) -> Self {
        AlgorithmIdentifier { oid, params }
    }

    /// Algorithm with an explicit NULL parameter.
    pub fn with_null(oid: Oid) -> Self {
        Self::new(oid, Some(DerValue::null()))
    }

    pub fn to_der_value(&self) -> DerValue {
        let mut items = vec![DerValue::oid(&self.oid)];
        items.extend(self.params.clone());
        DerValue::sequence(items)
    }

    pub fn from_der_value(v: &DerValue) -> Result<Self, DerError> {
        let items = v.as_sequence()?;
        match items {
            [oid] => Ok(Self::new(oid.as_oid()?, None)),
            [oid, params] => Ok(Self::new(oid.as_oid()?, Some(params.clone()))),
            [] => Err(DerError::MissingField("algorithm")),
            _ => Err(DerError::ExtraField),
        }
    }

    fn expect(&self, oid: &Oid) -> Result<&Self, KeystoreError> {
        if &self.oid == oid {
            Ok(self)
        } else {
            Err(unsupported(&self.oid))
        }
    }
}

fn unsupported(oid: &Oid) -> KeystoreError {
    if oids::pbes1_family().contains(oid) {
        KeystoreError::UnsupportedAlgorithm(format!("{oid} (PBES1)"))
    } else {
        KeystoreError::UnsupportedAlgorithm(oid.to_string())
    }
}

pub fn hash_alg_id(alg: HashAlg) -> AlgorithmIdentifier {
    match alg {
        HashAlg::Sha256 => AlgorithmIdentifier::with_null(oids::sha256()),
    }
}

pub fn parse_hash_alg_id(a: &AlgorithmIdentifier) -> Result<HashAlg, KeystoreError> {
    a.expect(&oids::sha256())?;
    match &a.params {
        None => Ok(HashAlg::Sha256),
        Some(p) if p.is_universal(tag::NULL) => Ok(HashAlg::Sha256),
        Some(_) => Err(KeystoreError::MalformedKey("unexpected hash parameters".into())),
    }
}

fn prf_alg_id(alg: HashAlg) -> AlgorithmIdentifier {
    match alg {
        HashAlg::Sha256 => AlgorithmIdentifier::with_null(oids::hmac_with_sha256()),
    }
}

fn parse_prf(a: &AlgorithmIdentifier) -> Result<HashAlg, KeystoreError> {
    a.expect(&oids::hmac_with_sha256())?;
    Ok(HashAlg::Sha256)
}

/// `pbkdf2 { salt OCTET STRING, iterationCount INTEGER, keyLength INTEGER, prf }`
pub fn pbkdf2_alg_id(p: &Pbkdf2Params) -> AlgorithmIdentifier {
    let params = DerValue::sequence(vec![
        DerValue::octet_string(p.salt.clone()),
        DerValue::integer_i64(i64::from(p.iterations)),
        DerValue::integer_i64(p.dk_len as i64),
        prf_alg_id(p.prf).to_der_value(),
    ]);
    AlgorithmIdentifier::new(oids::pbkdf2(), Some(params))
}

pub fn parse_pbkdf2(a: &AlgorithmIdentifier) -> Result<Pbkdf2Params, KeystoreError> {
    a.expect(&oids::pbkdf2())?;
    let params = a.params.as_ref().ok_or(DerError::MissingField("PBKDF2 parameters"))?;
    let mut r = SeqReader::of_sequence(params)?;
    let salt = r.next("salt")?.as_octet_string()?.to_vec();
    let iterations = u32::try_from(r.next("iterationCount")?.as_u64()?)
        .map_err(|_| KeystoreError::MalformedKey("iteration count out of range".into()))?;
    let dk_len = r.next("keyLength")?.as_u64()? as usize;
    let prf = parse_prf(&AlgorithmIdentifier::from_der_value(r.next("prf")?)?)?;
    r.finish()?;
    Ok(Pbkdf2Params { salt, iterations, dk_len, prf })
}

/// `pbes2 { keyDerivationFunc, encryptionScheme aes128-CBC(iv) }`
pub fn pbes2_alg_id(p: &Pbes2Params) -> AlgorithmIdentifier {
    let scheme = AlgorithmIdentifier::new(oids::aes128_cbc(), Some(DerValue::octet_string(p.iv.clone())));
    let params = DerValue::sequence(vec![pbkdf2_alg_id(&p.kdf).to_der_value(), scheme.to_der_value()]);
    AlgorithmIdentifier::new(oids::pbes2(), Some(params))
}

pub fn parse_pbes2(a: &AlgorithmIdentifier) -> Result<Pbes2Params, KeystoreError> {
    a.expect(&oids::pbes2())?;
    let params = a.params.as_ref().ok_or(DerError::MissingField("PBES2 parameters"))?;
    let mut r = SeqReader::of_sequence(params)?;
    let kdf = parse_pbkdf2(&AlgorithmIdentifier::from_der_value(r.next("keyDerivationFunc")?)?)?;
    let scheme = AlgorithmIdentifier::from_der_value(r.next("encryptionScheme")?)?;
    r.finish()?;
    scheme.expect(&oids::aes128_cbc())?;
    let iv = scheme
        .params
        .as_ref()
        .ok_or(DerError::MissingField("iv"))?
        .as_octet_string()?
        .to_vec();
    Ok(Pbes2Params { kdf, iv })
}

/// `pbmac1 { keyDerivationFunc, messageAuthScheme hmacWithSHA256 }`
pub fn pbmac1_alg_id(kdf: &Pbkdf2Params) -> AlgorithmIdentifier {
    let params = DerValue::sequence(vec![pbkdf2_alg_id(kdf).to_der_value(), prf_alg_id(kdf.prf).to_der_value()]);
    AlgorithmIdentifier::new(oids::pbmac1(), Some(params))
}

pub fn parse_pbmac1(a: &AlgorithmIdentifier) -> Result<Pbkdf2Params, KeystoreError> {
    a.expect(&oids::pbmac1())?;
    let params = a.params.as_ref().ok_or(DerError::MissingField("PBMAC1 parameters"))?;
    let mut r = SeqReader::of_sequence(params)?;
    let kdf = parse_pbkdf2(&AlgorithmIdentifier::from_der_value(r.next("keyDerivationFunc")?)?)?;
    parse_prf(&AlgorithmIdentifier::from_der_value(r.next("messageAuthScheme")?)?)?;
    r.finish()?;
    Ok(kdf)
}

/// `rsassaPss { [0] hashAlgorithm, [1] maskGenAlgorithm, [2] saltLength }`
pub fn pss_alg_id(salt_len: usize) -> AlgorithmIdentifier {
    let hash = hash_alg_id(HashAlg::Sha256).to_der_value();
    let mgf = AlgorithmIdentifier::new(oids::mgf1(), Some(hash.clone())).to_der_value();
    let params = DerValue::sequence(vec![
        DerValue::explicit(0, hash),
        DerValue::explicit(1, mgf),
        DerValue::explicit(2, DerValue::integer_i64(salt_len as i64)),
    ]);
    AlgorithmIdentifier::new(oids::rsassa_pss(), Some(params))
}

/// Salt length from an RSASSA-PSS identifier; hash and MGF must be
/// SHA-256 and MGF1-SHA-256.
pub fn parse_pss_alg_id(a: &AlgorithmIdentifier) -> Result<usize, KeystoreError> {
    a.expect(&oids::rsassa_pss())?;
    let params = a.params.as_ref().ok_or(DerError::MissingField("RSASSA-PSS parameters"))?;
    let mut r = SeqReader::of_sequence(params)?;
    parse_hash_alg_id(&AlgorithmIdentifier::from_der_value(r.next("hashAlgorithm")?.as_explicit(0)?)?)?;
    parse_mgf(r.next("maskGenAlgorithm")?.as_explicit(1)?)?;
    let salt = r.next("saltLength")?.as_explicit(2)?.as_u64()?;
    r.finish()?;
    usize::try_from(salt).map_err(|_| KeystoreError::MalformedKey("salt length out of range".into()))
}

fn parse_mgf(v: &DerValue) -> Result<(), KeystoreError> {
    let mgf = AlgorithmIdentifier::from_der_value(v)?;
    mgf.expect(&oids::mgf1())?;
    let inner = mgf.params.as_ref().ok_or(DerError::MissingField("MGF hash"))?;
    parse_hash_alg_id(&AlgorithmIdentifier::from_der_value(inner)?)?;
    Ok(())
}

/// `rsaesOaep { [0] hashAlgorithm, [1] maskGenAlgorithm }` with the empty
/// label left implicit.
pub fn oaep_alg_id() -> AlgorithmIdentifier {
    let hash = hash_alg_id(HashAlg::Sha256).to_der_value();
    let mgf = AlgorithmIdentifier::new(oids::mgf1(), Some(hash.clone())).to_der_value();
    let params = DerValue::sequence(vec![DerValue::explicit(0, hash), DerValue::explicit(1, mgf)]);
    AlgorithmIdentifier::new(oids::rsaes_oaep(), Some(params))
}

pub fn parse_oaep_alg_id(a: &AlgorithmIdentifier) -> Result<(), KeystoreError> {
    a.expect(&oids::rsaes_oaep())?;
    let params = a.params.as_ref().ok_or(DerError::MissingField("RSAES-OAEP parameters"))?;
    let mut r = SeqReader::of_sequence(params)?;
    parse_hash_alg_id(&AlgorithmIdentifier::from_der_value(r.next("hashAlgorithm")?.as_explicit(0)?)?)?;
    parse_mgf(r.next("maskGenAlgorithm")?.as_explicit(1)?)?;
    r.finish()?;
    Ok(())
}

/// `SubjectPublicKeyInfo { algorithm rsaEncryption, subjectPublicKey BIT STRING }`
pub fn spki_to_der_value(pk: &RsaPublicKey) -> DerValue {
    let key = rsa_public_key_to_der_value(pk).to_der().expect("well-formed");
    DerValue::sequence(vec![
        AlgorithmIdentifier::with_null(oids::rsa_encryption()).to_der_value(),
        DerValue::bit_string(&key),
    ])
}

pub fn spki_from_der_value(v: &DerValue) -> Result<RsaPublicKey, KeystoreError> {
    let mut r = SeqReader::of_sequence(v)?;
    AlgorithmIdentifier::from_der_value(r.next("algorithm")?)?.expect(&oids::rsa_encryption())?;
    let key = DerValue::from_der(r.next("subjectPublicKey")?.as_bit_string()?)?;
    r.finish()?;
    rsa_public_key_from_der_value(&key)
}

/// `SEQUENCE { n INTEGER, e INTEGER }`
pub fn rsa_public_key_to_der_value(pk: &RsaPublicKey) -> DerValue {
    DerValue::sequence(vec![DerValue::integer_unsigned(pk.n()), DerValue::integer_unsigned(pk.e())])
}

pub fn rsa_public_key_from_der_value(v: &DerValue) -> Result<RsaPublicKey, KeystoreError> {
    let mut r = SeqReader::of_sequence(v)?;
    let n = r.next("n")?.as_biguint()?;
    let e = r.next("e")?.as_biguint()?;
    r.finish()?;
    RsaPublicKey::new(n, e).map_err(|e| KeystoreError::MalformedKey(e.to_string()))
}

pub fn rsa_private_key_to_der(sk: &RsaPrivateKey) -> Vec<u8> {
    let int = DerValue::integer_unsigned;
    let p = sk.primes();
    let d = sk.crt_exponents();
    let t = sk.crt_coefficients();
    let mut items = vec![
        DerValue::integer_i64(i64::from(sk.version())),
        int(sk.n()),
        int(sk.e()),
        int(sk.d()),
        int(&p[0]),
        int(&p[1]),
        int(&d[0]),
        int(&d[1]),
        int(&t[0]),
    ];
    if p.len() > 2 {
        let others = (2..p.len())
            .map(|i| DerValue::sequence(vec![int(&p[i]), int(&d[i]), int(&t[i - 1])]))
            .collect();
        items.push(DerValue::sequence(others));
    }
    DerValue::sequence(items).to_der().expect("integers are canonical")
}

pub fn rsa_private_key_from_der(octets: &[u8]) -> Result<RsaPrivateKey, KeystoreError> {
    let v = DerValue::from_der(octets)?;
    let mut r = SeqReader::of_sequence(&v)?;
    let version = r.next("version")?.as_u64()?;
    let mut ints = Vec::with_capacity(8);
    for field in ["n", "e", "d", "r1", "r2", "d1", "d2", "t2"] {
        ints.push(r.next(field)?.as_biguint()?);
    }
    let [n, e, d, r1, r2, d1, d2, t2]: [BigUint; 8] = ints.try_into().expect("eight fields");
    let mut primes = vec![r1, r2];
    let mut exponents = vec![d1, d2];
    let mut coefficients = vec![t2];
    let others = r.next_if(crate::der::TagClass::Universal, tag::SEQUENCE);
    r.finish()?;
    match (version, others) {
        (0, None) => {}
        (1, Some(list)) => {
            let list = list.as_sequence()?;
            if list.is_empty() {
                return Err(KeystoreError::MalformedKey("empty otherPrimeInfos".into()));
            }
            for info in list {
                let mut ir = SeqReader::of_sequence(info)?;
                primes.push(ir.next("ri")?.as_biguint()?);
                exponents.push(ir.next("di")?.as_biguint()?);
                coefficients.push(ir.next("ti")?.as_biguint()?);
                ir.finish()?;
            }
        }
        _ => return Err(KeystoreError::MalformedKey("version does not match the prime count".into())),
    }
    RsaPrivateKey::from_components(n, e, d, primes, exponents, coefficients)
        .map_err(|e| KeystoreError::MalformedKey(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKeyInfo {
    pub version: u8,
    pub algorithm: AlgorithmIdentifier,
    pub private_key: Vec<u8>,
    pub attributes: Vec<Attribute>,
}

impl PrivateKeyInfo {
    pub fn from_key(sk: &RsaPrivateKey, mut attributes: Vec<Attribute>) -> Self {
        sort_attributes(&mut attributes);
        PrivateKeyInfo {
            version: 0,
            algorithm: AlgorithmIdentifier::with_null(oids::rsa_encryption()),
            private_key: rsa_private_key_to_der(sk),
            attributes,
        }
    }

    pub fn key(&self) -> Result<RsaPrivateKey, KeystoreError> {
        self.algorithm.expect(&oids::rsa_encryption())?;
        rsa_private_key_from_der(&self.private_key)
    }

    pub fn to_der_value(&self) -> DerValue {
        let mut items = vec![
            DerValue::integer_i64(i64::from(self.version)),
            self.algorithm.to_der_value(),
            DerValue::octet_string(self.private_key.clone()),
        ];
        items.extend(implicit_attributes(0, &self.attributes));
        DerValue::sequence(items)
    }

    pub fn to_der(&self) -> Vec<u8> {
        self.to_der_value().to_der().expect("well-formed")
    }

    pub fn from_der(octets: &[u8]) -> Result<Self, KeystoreError> {
        let v = DerValue::from_der(octets)?;
        let mut r = SeqReader::of_sequence(&v)?;
        let version = r.next("version")?.as_u64()?;
        if version != 0 {
            return Err(KeystoreError::MalformedKey(format!("version {version}")));
        }
        let algorithm = AlgorithmIdentifier::from_der_value(r.next("privateKeyAlgorithm")?)?;
        let private_key = r.next("privateKey")?.as_octet_string()?.to_vec();
        let attributes = read_implicit_attributes(&mut r, 0)?;
        r.finish()?;
        Ok(PrivateKeyInfo { version: 0, algorithm, private_key, attributes })
    }
}

pub fn encode_private_key(sk: &RsaPrivateKey, attributes: Vec<Attribute>) -> Vec<u8> {
    PrivateKeyInfo::from_key(sk, attributes).to_der()
}

pub fn decode_private_key(octets: &[u8]) -> Result<RsaPrivateKey, KeystoreError> {
    PrivateKeyInfo::from_der(octets)?.key()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptedPrivateKeyInfo {
    pub algorithm: AlgorithmIdentifier,
    pub encrypted_data: Vec<u8>,
}

impl EncryptedPrivateKeyInfo {
    pub fn to_der_value(&self) -> DerValue {
        DerValue::sequence(vec![self.algorithm.to_der_value(), DerValue::octet_string(self.encrypted_data.clone())])
    }

    pub fn to_der(&self) -> Vec<u8> {
        self.to_der_value().to_der().expect("well-formed")
    }

    pub fn from_der_value(v: &DerValue) -> Result<Self, KeystoreError> {
        let mut r = SeqReader::of_sequence(v)?;
        let algorithm = AlgorithmIdentifier::from_der_value(r.next("encryptionAlgorithm")?)?;
        let encrypted_data = r.next("encryptedData")?.as_octet_string()?.to_vec();
        r.finish()?;
        Ok(EncryptedPrivateKeyInfo { algorithm, encrypted_data })
    }

    pub fn from_der(octets: &[u8]) -> Result<Self, KeystoreError> {
        Self::from_der_value(&DerValue::from_der(octets)?)
    }
}

pub fn encrypt_private_key(
    pki: &PrivateKeyInfo,
    password: &[u8],
    salt: &[u8],
    iterations: u32,
    rng: &mut dyn RandomSource,
) -> Result<EncryptedPrivateKeyInfo, KeystoreError> {
    if password.is_empty() {
        return Err(KeystoreError::Precondition("password must not be empty"));
    }
    let (params, ct) = pkcs5::pbes2_encrypt(&pki.to_der(), password, salt, iterations, rng).map_err(|e| match e {
        Pkcs5Error::Rng(r) => KeystoreError::Rng(r),
        Pkcs5Error::InvalidParameter(p) => KeystoreError::Precondition(p),
        _ => KeystoreError::Precondition("invalid PBES2 parameters"),
    })?;
    Ok(EncryptedPrivateKeyInfo { algorithm: pbes2_alg_id(&params), encrypted_data: ct })
}

pub fn decrypt_private_key(epki: &EncryptedPrivateKeyInfo, password: &[u8]) -> Result<PrivateKeyInfo, KeystoreError> {
    let params = parse_pbes2(&epki.algorithm)?;
    let pt = pkcs5::pbes2_decrypt(&params, &epki.encrypted_data, password).map_err(|_| KeystoreError::DecryptionError)?;
    // a wrong password that happens to leave valid padding is caught here
    PrivateKeyInfo::from_der(&pt).map_err(|_| KeystoreError::DecryptionError)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::SeededStream;

    fn toy() -> RsaPrivateKey {
        let p: Vec<BigUint> = [3u32, 5, 7].iter().map(|&x| BigUint::from(x)).collect();
        RsaPrivateKey::from_primes(&p, &BigUint::from(5u32)).unwrap()
    }

    #[test]
    fn toy_key_round_trip() {
        let sk = toy();
        let der = encode_private_key(&sk, vec![]);
        let back = decode_private_key(&der).unwrap();
        assert_eq!(back, sk);
        assert_eq!(encode_private_key(&back, vec![]), der);
        let body = rsa_private_key_to_der(&sk);
        // version 1 and one otherPrimeInfos entry
        let v = DerValue::from_der(&body).unwrap();
        assert_eq!(v.as_sequence().unwrap()[0].as_u64().unwrap(), 1);
        assert_eq!(v.as_sequence().unwrap().len(), 10);
    }

    #[test]
    fn two_prime_has_no_other_infos() {
        let p = [BigUint::from(5u32), BigUint::from(11u32)];
        let sk = RsaPrivateKey::from_primes(&p, &BigUint::from(3u32)).unwrap();
        let v = DerValue::from_der(&rsa_private_key_to_der(&sk)).unwrap();
        assert_eq!(v.as_sequence().unwrap().len(), 9);
        assert_eq!(rsa_private_key_from_der(&v.to_der().unwrap()).unwrap(), sk);
    }

    #[test]
    fn truncated_is_malformed() {
        let der = encode_private_key(&toy(), vec![]);
        for cut in [1, der.len() / 2, der.len() - 1] {
            assert!(matches!(decode_private_key(&der[..cut]), Err(KeystoreError::MalformedKey(_))));
        }
    }

    #[test]
    fn attributes_survive() {
        let attrs = vec![attribute_make("friendlyName", "toy").unwrap(), attribute_make("localKeyId", &[1u8, 2][..]).unwrap()];
        let pki = PrivateKeyInfo::from_key(&toy(), attrs);
        let back = PrivateKeyInfo::from_der(&pki.to_der()).unwrap();
        assert_eq!(back, pki);
    }

    #[test]
    fn encrypted_round_trip() {
        let mut rng = SeededStream::new(b"p8");
        let pki = PrivateKeyInfo::from_key(&toy(), vec![]);
        let epki = encrypt_private_key(&pki, b"pw", b"saltsalt", 10, &mut rng).unwrap();
        let parsed = EncryptedPrivateKeyInfo::from_der(&epki.to_der()).unwrap();
        assert_eq!(parsed, epki);
        assert_eq!(decrypt_private_key(&parsed, b"pw").unwrap(), pki);
        assert_eq!(decrypt_private_key(&parsed, b"pX"), Err(KeystoreError::DecryptionError));
        let other = encrypt_private_key(&pki, b"pw", b"saltsalX", 10, &mut rng).unwrap();
        assert_ne!(other.encrypted_data, epki.encrypted_data);
        assert_eq!(
            encrypt_private_key(&pki, b"", b"saltsalt", 10, &mut rng),
            Err(KeystoreError::Precondition("password must not be empty"))
        );
    }

    #[test]
    fn pbes1_is_refused() {
        let mut rng = SeededStream::new(b"p8");
        let pki = PrivateKeyInfo::from_key(&toy(), vec![]);
        let mut epki = encrypt_private_key(&pki, b"pw", b"saltsalt", 1, &mut rng).unwrap();
        for oid in oids::pbes1_family() {
            epki.algorithm = AlgorithmIdentifier::new(oid, Some(DerValue::sequence(vec![])));
            assert!(matches!(decrypt_private_key(&epki, b"pw"), Err(KeystoreError::UnsupportedAlgorithm(_))));
        }
    }

    #[test]
    fn scheme_identifiers() {
        let a = pss_alg_id(20);
        let back = AlgorithmIdentifier::from_der_value(&DerValue::from_der(&a.to_der_value().to_der().unwrap()).unwrap()).unwrap();
        assert_eq!(parse_pss_alg_id(&back).unwrap(), 20);
        assert!(parse_oaep_alg_id(&oaep_alg_id()).is_ok());
        assert!(parse_oaep_alg_id(&a).is_err());
        let pk = toy().public_key();
        assert_eq!(spki_from_der_value(&spki_to_der_value(&pk)).unwrap(), pk);
    }

    #[test]
    fn pbes2_header_round_trip() {
        let p = Pbes2Params { kdf: Pbkdf2Params::new(b"12345678", 2048, 16), iv: vec![9; 16] };
        let a = pbes2_alg_id(&p);
        let back = AlgorithmIdentifier::from_der_value(&DerValue::from_der(&a.to_der_value().to_der().unwrap()).unwrap()).unwrap();
        assert_eq!(parse_pbes2(&back).unwrap(), p);
        let m = pbmac1_alg_id(&Pbkdf2Params::new(b"s", 5, 32));
        assert_eq!(parse_pbmac1(&m).unwrap(), Pbkdf2Params::new(b"s", 5, 32));
    }
}
