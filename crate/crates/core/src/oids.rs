// SPDX-License-Identifier: Apache-2.0

//! Object identifiers used across the containers.

use crate::der::Oid;
use crate::oid;

pub fn rsa_encryption() -> Oid {
    oid!(1, 2, 840, 113549, 1, 1, 1)
}
pub fn rsaes_oaep() -> Oid {
    oid!(1, 2, 840, 113549, 1, 1, 7)
}
pub fn mgf1() -> Oid {
    oid!(1, 2, 840, 113549, 1, 1, 8)
}
pub fn rsassa_pss() -> Oid {
    oid!(1, 2, 840, 113549, 1, 1, 10)
}
pub fn sha256() -> Oid {
    oid!(2, 16, 840, 1, 101, 3, 4, 2, 1)
}
pub fn hmac_with_sha256() -> Oid {
    oid!(1, 2, 840, 113549, 2, 9)
}
pub fn aes128_cbc() -> Oid {
    oid!(2, 16, 840, 1, 101, 3, 4, 1, 2)
}

pub fn pbkdf2() -> Oid {
    oid!(1, 2, 840, 113549, 1, 5, 12)
}
pub fn pbes2() -> Oid {
    oid!(1, 2, 840, 113549, 1, 5, 13)
}
pub fn pbmac1() -> Oid {
    oid!(1, 2, 840, 113549, 1, 5, 14)
}

/// PBES1 identifiers (MD2/MD5/SHA-1 with DES or RC2). Recognised only so
/// they can be refused by name.
pub fn pbes1_family() -> Vec<Oid> {
    [1u64, 3, 4, 6, 10, 11].iter().map(|&n| oid!(1, 2, 840, 113549, 1, 5, n)).collect()
}

// content types
pub fn data() -> Oid {
    oid!(1, 2, 840, 113549, 1, 7, 1)
}
pub fn signed_data() -> Oid {
    oid!(1, 2, 840, 113549, 1, 7, 2)
}
pub fn enveloped_data() -> Oid {
    oid!(1, 2, 840, 113549, 1, 7, 3)
}
pub fn digested_data() -> Oid {
    oid!(1, 2, 840, 113549, 1, 7, 5)
}
pub fn encrypted_data() -> Oid {
    oid!(1, 2, 840, 113549, 1, 7, 6)
}
pub fn authenticated_data() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 16, 1, 2)
}

// attribute types
pub fn email_address() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 1)
}
pub fn unstructured_name() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 2)
}
pub fn content_type() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 3)
}
pub fn message_digest() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 4)
}
pub fn signing_time() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 5)
}
pub fn counter_signature() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 6)
}
pub fn challenge_password() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 7)
}
pub fn unstructured_address() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 8)
}
pub fn extension_request() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 14)
}
pub fn friendly_name() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 20)
}
pub fn local_key_id() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 21)
}
pub fn random_nonce() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 25, 3)
}
pub fn sequence_number() -> Oid {
    oid!(1, 2, 840, 113549, 1, 9, 25, 4)
}

pub fn date_of_birth() -> Oid {
    oid!(1, 3, 6, 1, 5, 5, 7, 9, 1)
}
pub fn place_of_birth() -> Oid {
    oid!(1, 3, 6, 1, 5, 5, 7, 9, 2)
}
pub fn gender() -> Oid {
    oid!(1, 3, 6, 1, 5, 5, 7, 9, 3)
}
pub fn country_of_citizenship() -> Oid {
    oid!(1, 3, 6, 1, 5, 5, 7, 9, 4)
}
pub fn country_of_residence() -> Oid {
    oid!(1, 3, 6, 1, 5, 5, 7, 9, 5)
}
pub fn pseudonym() -> Oid {
    oid!(2, 5, 4, 65)
}
pub fn serial_number() -> Oid {
    oid!(2, 5, 4, 5)
}

// name components
pub fn common_name() -> Oid {
    oid!(2, 5, 4, 3)
}
pub fn country_name() -> Oid {
    oid!(2, 5, 4, 6)
}
pub fn organization_name() -> Oid {
    oid!(2, 5, 4, 10)
}

// PKCS#12 bag types
pub fn key_bag() -> Oid {
    oid!(1, 2, 840, 113549, 1, 12, 10, 1, 1)
}
pub fn shrouded_key_bag() -> Oid {
    oid!(1, 2, 840, 113549, 1, 12, 10, 1, 2)
}
pub fn cert_bag() -> Oid {
    oid!(1, 2, 840, 113549, 1, 12, 10, 1, 3)
}

/// Type of the toy certificate structure carried in cert bags and
/// signed-data. Allocated under the documentation enterprise number.
pub fn toy_certificate() -> Oid {
    oid!(1, 3, 6, 1, 4, 1, 32473, 1)
}
