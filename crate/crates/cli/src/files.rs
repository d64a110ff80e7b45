// SPDX-License-Identifier: Apache-2.0

//! File and error plumbing shared by the subcommands.

use std::fmt;
use std::path::Path;

use pkcswb::crypto::{RandomSource, SeededStream, SystemRandom};
use pkcswb::der::DerValue;
use pkcswb::keystore;
use pkcswb::rsa::{RsaPrivateKey, RsaPublicKey};

pub const SEED_VAR: &str = "PKCSWB_SEED";

/// Exit status 1 for a failed check, 2 for misuse or I/O.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
    pub dump: Option<Vec<u8>>,
}

impl CliError {
    pub fn usage(message: impl fmt::Display) -> Self {
        CliError { code: 2, message: message.to_string(), dump: None }
    }

    pub fn failed(message: impl fmt::Display) -> Self {
        CliError { code: 1, message: message.to_string(), dump: None }
    }

    pub fn with_dump(mut self, bytes: &[u8]) -> Self {
        self.dump = Some(bytes.to_vec());
        self
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// `offset: hex  ascii` lines, 16 octets each, at most 8 lines.
pub fn hex_dump(bytes: &[u8]) -> String {
    let mut out = String::new();
    for (i, chunk) in bytes.chunks(16).take(8).enumerate() {
        let hex: Vec<String> = chunk.iter().map(|b| format!("{b:02x}")).collect();
        let ascii: String = chunk.iter().map(|&b| if b.is_ascii_graphic() { b as char } else { '.' }).collect();
        out += &format!("{:04x}: {:<47}  {ascii}\n", i * 16, hex.join(" "));
    }
    if bytes.len() > 128 {
        out += &format!("... ({} octets total)\n", bytes.len());
    }
    out
}

/// Seeded stream when PKCSWB_SEED is set, the system source otherwise.
pub fn rng() -> Box<dyn RandomSource> {
    match std::env::var(SEED_VAR) {
        Ok(seed) => Box::new(SeededStream::new(seed.as_bytes())),
        Err(_) => Box::new(SystemRandom),
    }
}

pub fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Writes `bytes`, then reads the file back and runs `check` on it.
pub fn write_checked(path: &Path, bytes: &[u8], check: impl FnOnce(&[u8]) -> bool) -> CliResult {
    std::fs::write(path, bytes).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let back = read(path)?;
    if back != bytes || !check(&back) {
        return Err(CliError::usage(format!("{}: output does not read back", path.display())).with_dump(&back));
    }
    Ok(())
}

pub fn write(path: &Path, bytes: &[u8]) -> CliResult {
    write_checked(path, bytes, |_| true)
}

/// Decode failure on an input file, with a dump of its first octets.
pub fn malformed(path: &Path, bytes: &[u8], e: impl fmt::Display) -> CliError {
    CliError::usage(format!("{}: {e}", path.display())).with_dump(bytes)
}

pub fn read_private_key(path: &Path) -> CliResult<RsaPrivateKey> {
    let bytes = read(path)?;
    keystore::decode_private_key(&bytes).map_err(|e| malformed(path, &bytes, e))
}

/// A SubjectPublicKeyInfo file, or the public half of a PKCS #8 key.
pub fn read_public_key(path: &Path) -> CliResult<RsaPublicKey> {
    let bytes = read(path)?;
    if let Ok(pk) = DerValue::from_der(&bytes).map_err(|e| e.to_string()).and_then(|v| {
        keystore::spki_from_der_value(&v).map_err(|e| e.to_string())
    }) {
        return Ok(pk);
    }
    keystore::decode_private_key(&bytes).map(|sk| sk.public_key()).map_err(|e| malformed(path, &bytes, e))
}

pub fn spki_der(pk: &RsaPublicKey) -> Vec<u8> {
    keystore::spki_to_der_value(pk).to_der().expect("well-formed")
}

/// `0x`-prefixed hex, or the literal UTF-8 octets.
pub fn parse_octets(s: &str) -> CliResult<Vec<u8>> {
    match s.strip_prefix("0x") {
        Some(h) => hex::decode(h).map_err(|e| CliError::usage(format!("bad hex {s:?}: {e}"))),
        None => Ok(s.as_bytes().to_vec()),
    }
}
