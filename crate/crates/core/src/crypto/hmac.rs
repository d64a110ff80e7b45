// SPDX-License-Identifier: Apache-2.0

use super::sha256::Sha256;
use super::HashAlg;

const IPAD: u8 = 0x36;
const OPAD: u8 = 0x5c;

/// HMAC key with the inner and outer pad blocks already absorbed.
#[derive(Clone)]
pub struct HmacKey {
    inner: Sha256,
    outer: Sha256,
}

impl HmacKey {
    pub fn new(alg: HashAlg, key: &[u8]) -> Self {
        let HashAlg::Sha256 = alg;
        let mut block = [0u8; super::sha256::BLOCK_LEN];
        if key.len() > block.len() {
            block[..32].copy_from_slice(&Sha256::digest(key));
        } else {
            block[..key.len()].copy_from_slice(key);
        }
        let mut inner = Sha256::new();
        let mut outer = Sha256::new();
        inner.update(&block.map(|b| b ^ IPAD));
        outer.update(&block.map(|b| b ^ OPAD));
        HmacKey { inner, outer }
    }

    pub fn mac(&self, msg: &[u8]) -> Vec<u8> {
        self.mac_parts(&[msg])
    }

    pub fn mac_parts(&self, parts: &[&[u8]]) -> Vec<u8> {
        let mut inner = self.inner.clone();
        for p in parts {
            inner.update(p);
        }
        let mut outer = self.outer.clone();
        outer.update(&inner.finalize());
        outer.finalize().to_vec()
    }
}

pub fn hmac(alg: HashAlg, key: &[u8], msg: &[u8]) -> Vec<u8> {
    HmacKey::new(alg, key).mac(msg)
}
