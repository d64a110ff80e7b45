// SPDX-License-Identifier: Apache-2.0

//! PKCS #15 application directory listing.
//!
//! ```text
//! MF
//!   DF(PKCS15) aid=<hex>
//!     EF(ODF): <n>
//!       EF(PrKDF)
//!     EF(PrKDF): 1
//!       handle=3 id=01 label=alice
//!     EF(TokenInfo): 1
//!       label=<label> serial=<hex> algorithms=<list>
//!     EF(UnusedSpace): 0
//! ```
//!
//! Directory files appear only when non-empty and the ODF points at exactly
//! those. PINs are not objects here, so the AODF is always empty.

use super::object::{class_of, key_type_of, AttrMap};
use super::{AttrType, KeyType, ObjectClass};
use crate::crypto::HashAlg;

/// Placeholder application identifier (12 octets). The real value is
/// defined outside this toolkit; this one is not normative.
pub const PKCS15_AID: [u8; 12] = [0xa0, 0x00, 0x00, 0x00, 0x63, b'P', b'K', b'C', b'S', b'-', b'1', b'5'];

const ALGORITHMS: &str = "rsa-oaep-sha256,rsa-pss-sha256,sha256,hmac-sha256,aes128-cbc";

const DIRECTORIES: [&str; 6] = ["PrKDF", "PuKDF", "SKDF", "CDF", "DODF", "AODF"];

fn directory(attrs: &AttrMap) -> &'static str {
    match (class_of(attrs), key_type_of(attrs)) {
        (ObjectClass::Data, _) => "DODF",
        (ObjectClass::Certificate, _) => "CDF",
        (ObjectClass::Key, Some(KeyType::RsaPrivate)) => "PrKDF",
        (ObjectClass::Key, Some(KeyType::RsaPublic)) => "PuKDF",
        (ObjectClass::Key, _) => "SKDF",
    }
}

pub(crate) fn manifest(label: &str, objects: &[(u64, &AttrMap)]) -> String {
    let entry = |h: u64, a: &AttrMap| {
        let id = a.get(&AttrType::Id).and_then(|v| v.as_bytes()).map(hex::encode).unwrap_or_default();
        let l = a.get(&AttrType::Label).and_then(|v| v.as_text()).unwrap_or_default();
        format!("      handle={h} id={id} label={l}\n")
    };
    let mut dirs: Vec<(&str, String, usize)> = Vec::new();
    for name in DIRECTORIES {
        let listed: Vec<_> = objects.iter().filter(|(_, a)| directory(a) == name).collect();
        if !listed.is_empty() {
            let body: String = listed.iter().map(|(h, a)| entry(*h, a)).collect();
            dirs.push((name, body, listed.len()));
        }
    }
    let serial = hex::encode(&HashAlg::Sha256.digest(label.as_bytes())[..8]);
    let mut out = String::from("MF\n");
    out += &format!("  DF(PKCS15) aid={} (placeholder)\n", hex::encode(PKCS15_AID));
    out += &format!("    EF(ODF): {}\n", dirs.len());
    for (name, _, _) in &dirs {
        out += &format!("      EF({name})\n");
    }
    for (name, body, n) in &dirs {
        out += &format!("    EF({name}): {n}\n{body}");
    }
    out += "    EF(TokenInfo): 1\n";
    out += &format!("      label={label} serial={serial} algorithms={ALGORITHMS}\n");
    out += "    EF(UnusedSpace): 0\n";
    out
}
