use std::sync::OnceLock;

use num_bigint::BigUint;
use proptest::prelude::*;

use pkcswb::cms;
use pkcswb::crypto::{self, FixedSource, SeededStream};
use pkcswb::der::{DerValue, Oid};
use pkcswb::keystore::{self, PrivateKeyInfo};
use pkcswb::pkcs1::{self, OaepParams, PssParams, Scheme};
use pkcswb::pkcs5;
use pkcswb::rsa::{self, RsaPrivateKey, RsaPublicKey};

fn key1024() -> &'static (RsaPublicKey, RsaPrivateKey) {
    static KEY: OnceLock<(RsaPublicKey, RsaPrivateKey)> = OnceLock::new();
    KEY.get_or_init(|| rsa::generate_key(1024, 2, &BigUint::from(65537u32), &mut SeededStream::new(b"props")).unwrap())
}

fn key512() -> &'static (RsaPublicKey, RsaPrivateKey) {
    static KEY: OnceLock<(RsaPublicKey, RsaPrivateKey)> = OnceLock::new();
    KEY.get_or_init(|| rsa::generate_key(512, 3, &BigUint::from(65537u32), &mut SeededStream::new(b"props512")).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integers_round_trip(v in any::<i64>()) {
        let der = DerValue::integer_i64(v).to_der().unwrap();
        let back = DerValue::from_der(&der).unwrap();
        prop_assert_eq!(back.as_bigint().unwrap(), v.into());
        prop_assert_eq!(back.to_der().unwrap(), der);
    }

    #[test]
    fn unsigned_integers_round_trip(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let n = BigUint::from_bytes_be(&bytes);
        let der = DerValue::integer_unsigned(&n).to_der().unwrap();
        prop_assert_eq!(DerValue::from_der(&der).unwrap().as_biguint().unwrap(), n);
    }

    #[test]
    fn oids_round_trip(first in 0u64..2, second in 0u64..40, rest in proptest::collection::vec(any::<u64>(), 0..8)) {
        let mut arcs = vec![first, second];
        arcs.extend(rest);
        let oid = Oid::new(&arcs).unwrap();
        let back = Oid::from_octets(&oid.to_octets()).unwrap();
        prop_assert_eq!(back.arcs(), &arcs[..]);
    }

    #[test]
    fn i2osp_inverts_os2ip(bytes in proptest::collection::vec(any::<u8>(), 1..80)) {
        let x = pkcs1::os2ip(&bytes);
        prop_assert_eq!(pkcs1::i2osp(&x, bytes.len()).unwrap(), bytes.clone());
        prop_assert!(pkcs1::i2osp(&x, bytes.len() - 1).is_none() || bytes[0] == 0);
    }

    #[test]
    fn cbc_round_trip(key in any::<[u8; 16]>(), iv in any::<[u8; 16]>(), msg in proptest::collection::vec(any::<u8>(), 0..64)) {
        let ct = crypto::cbc_encrypt(&key, &iv, &msg).unwrap();
        prop_assert_eq!(ct.len() % 16, 0);
        prop_assert_eq!(crypto::cbc_decrypt(&key, &iv, &ct).unwrap(), msg);
    }

    #[test]
    fn v15_pad_unpad(msg in proptest::collection::vec(any::<u8>(), 0..=117), seed in any::<u64>()) {
        let em = pkcs1::eme_v15_pad(&msg, 128, &mut SeededStream::from_u64(seed)).unwrap();
        prop_assert!(em[2..em.len() - msg.len() - 1].iter().all(|&b| b != 0));
        prop_assert_eq!(pkcs1::eme_v15_unpad(&em, 128).unwrap(), msg);
    }

    #[test]
    fn oaep_round_trip_and_tamper(msg in proptest::collection::vec(any::<u8>(), 0..=61), seed in any::<[u8; 32]>(), at in 0usize..128, flip in 1u8..) {
        let p = OaepParams::new(128);
        let em = pkcs1::oaep_encode(&msg, &p, &mut FixedSource::new(seed.to_vec())).unwrap();
        prop_assert_eq!(pkcs1::oaep_decode(&em, &p).unwrap(), msg);
        let mut bad = em;
        bad[at] ^= flip;
        prop_assert_eq!(pkcs1::oaep_decode(&bad, &p), Err(pkcs1::Pkcs1Error::DecryptionError));
    }

    #[test]
    fn pss_encoding_round_trip(msg in proptest::collection::vec(any::<u8>(), 0..100), bits in 300usize..1100, seed in any::<u64>()) {
        let p = PssParams::fitted(bits);
        let em = pkcs1::pss_encode(&msg, &p, &mut SeededStream::from_u64(seed)).unwrap();
        prop_assert_eq!(em[em.len() - 1], 0xbc);
        prop_assert!(pkcs1::pss_verify_encoding(&msg, &em, &p));
        let mut other = msg.clone();
        other.push(0);
        prop_assert!(!pkcs1::pss_verify_encoding(&other, &em, &p));
    }

    #[test]
    fn pbkdf2_prefix_property(len in 1usize..100) {
        // a shorter output is a prefix of a longer one
        let long = pkcs5::pbkdf2(b"pw", &pkcs5::Pbkdf2Params::new(b"salt", 3, 100)).unwrap();
        let short = pkcs5::pbkdf2(b"pw", &pkcs5::Pbkdf2Params::new(b"salt", 3, len)).unwrap();
        prop_assert_eq!(&long[..len], &short[..]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rsa_schemes_round_trip(msg in proptest::collection::vec(any::<u8>(), 16..=16), seed in any::<u64>()) {
        let (pk, sk) = key1024();
        let mut rng = SeededStream::from_u64(seed);
        for scheme in [Scheme::V15, Scheme::oaep_for(pk)] {
            let c = pkcs1::encrypt(&msg, pk, &scheme, &mut rng).unwrap();
            prop_assert_eq!(pkcs1::decrypt(&c, sk, &scheme).unwrap(), msg.clone());
        }
        let (pk5, sk5) = key512();
        let c = pkcs1::encrypt(&msg, pk5, &Scheme::V15, &mut rng).unwrap();
        prop_assert_eq!(pkcs1::decrypt(&c, sk5, &Scheme::V15).unwrap(), msg);
    }

    #[test]
    fn signatures_bind_the_message(a in proptest::collection::vec(any::<u8>(), 0..64), b in proptest::collection::vec(any::<u8>(), 0..64)) {
        prop_assume!(a != b);
        let (pk, sk) = key1024();
        let p = PssParams::for_key(pk);
        let s = pkcs1::sign(&a, sk, &p, &mut SeededStream::new(&a)).unwrap();
        prop_assert!(pkcs1::verify(&a, &s, pk, &p));
        prop_assert!(!pkcs1::verify(&b, &s, pk, &p));
    }

    #[test]
    fn wrong_passwords_fail(pw in "[a-z]{1,12}", other in "[a-z]{1,12}") {
        prop_assume!(pw != other);
        let (_, sk) = key512();
        let pki = PrivateKeyInfo::from_key(sk, Vec::new());
        let epki = keystore::encrypt_private_key(&pki, pw.as_bytes(), b"saltsalt", 2, &mut SeededStream::new(b"e")).unwrap();
        prop_assert_eq!(keystore::decrypt_private_key(&epki, pw.as_bytes()).unwrap(), pki);
        prop_assert!(keystore::decrypt_private_key(&epki, other.as_bytes()).is_err());
        prop_assert!(!pkcs5::pbmac1_verify(
            b"msg",
            &pkcs5::pbmac1_tag(b"msg", pw.as_bytes(), b"salt", 2, 32).unwrap(),
            other.as_bytes(),
            b"salt",
            2,
            32
        ));
    }

    #[test]
    fn cms_payloads_round_trip(payload in proptest::collection::vec(any::<u8>(), 0..300)) {
        let (pk, sk) = key1024();
        let mut rng = SeededStream::new(&payload);
        let inner = cms::make_data(&payload);
        let ev = cms::envelope(&inner, pk, &mut rng).unwrap();
        prop_assert_eq!(cms::open_envelope(&cms::ContentInfo::from_der(&ev.to_der()).unwrap(), sk).unwrap(), inner.clone());
        let dg = cms::digest_data(&inner, crypto::HashAlg::Sha256);
        prop_assert!(cms::check_digest(&dg));
        let ad = cms::authenticate_data(&inner, b"k", &[]);
        prop_assert!(cms::check_auth(&ad, b"k"));
        prop_assert!(!cms::check_auth(&ad, b"K"));
    }
}
