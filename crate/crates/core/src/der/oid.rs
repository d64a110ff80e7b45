// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use super::DerError;

/// ASN.1 object identifier.
///
/// At least two arcs; the first arc is 0, 1 or 2 and, below 2, the second
/// arc is at most 39.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Oid(Vec<u64>);

impl Oid {
    pub fn new(arcs: &[u64]) -> Result<Self, DerError> {
        if arcs.len() < 2 || arcs[0] > 2 || (arcs[0] < 2 && arcs[1] > 39) {
            return Err(DerError::InvalidOid);
        }
        // the packed first subidentifier must fit a u64
        if arcs[0] == 2 && arcs[1] > u64::MAX - 80 {
            return Err(DerError::InvalidOid);
        }
        Ok(Oid(arcs.to_vec()))
    }

    pub fn arcs(&self) -> &[u64] {
        &self.0
    }

    /// Content octets: `40*a1 + a2` followed by the remaining arcs, each in
    /// base 128 with the continuation bit set on all but the last octet.
    pub fn to_octets(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.0.len() + 4);
        push_base128(&mut out, self.0[0] * 40 + self.0[1]);
        for &arc in &self.0[2..] {
            push_base128(&mut out, arc);
        }
        out
    }

    pub fn from_octets(bytes: &[u8]) -> Result<Self, DerError> {
        if bytes.is_empty() {
            return Err(DerError::InvalidOid);
        }
        let mut subids = Vec::new();
        let mut acc: u64 = 0;
        let mut in_arc = false;
        for &b in bytes {
            if !in_arc && b == 0x80 {
                // leading 0x80 is a non-minimal encoding
                return Err(DerError::NonCanonical("oid arc has a redundant leading octet"));
            }
            if acc > (u64::MAX >> 7) {
                return Err(DerError::ArcOverflow);
            }
            acc = (acc << 7) | u64::from(b & 0x7f);
            if b & 0x80 != 0 {
                in_arc = true;
            } else {
                subids.push(acc);
                acc = 0;
                in_arc = false;
            }
        }
        if in_arc {
            return Err(DerError::ArcOverflow);
        }
        let first = subids[0];
        let (a1, a2) = match first {
            0..=39 => (0, first),
            40..=79 => (1, first - 40),
            _ => (2, first - 80),
        };
        let mut arcs = Vec::with_capacity(subids.len() + 1);
        arcs.push(a1);
        arcs.push(a2);
        arcs.extend_from_slice(&subids[1..]);
        Ok(Oid(arcs))
    }
}

fn push_base128(out: &mut Vec<u8>, mut v: u64) {
    let mut tmp = [0u8; 10];
    let mut i = tmp.len();
    loop {
        i -= 1;
        tmp[i] = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            break;
        }
    }
    let last = tmp.len() - 1;
    for (j, b) in tmp.iter().enumerate().skip(i) {
        out.push(if j == last { *b } else { *b | 0x80 });
    }
}

impl fmt::Display for Oid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, arc) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{arc}")?;
        }
        Ok(())
    }
}

impl FromStr for Oid {
    type Err = DerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let arcs = s
            .split('.')
            .map(|p| p.parse::<u64>().map_err(|_| DerError::InvalidOid))
            .collect::<Result<Vec<_>, _>>()?;
        Oid::new(&arcs)
    }
}

/// Builds an `Oid` from a literal arc list known to be valid.
#[macro_export]
macro_rules! oid {
    ($($arc:expr),+ $(,)?) => {
        $crate::der::Oid::new(&[$($arc),+]).expect("valid oid literal")
    };
}
