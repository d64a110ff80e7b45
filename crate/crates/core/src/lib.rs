// SPDX-License-Identifier: Apache-2.0

//! Public-key cryptography standards workbench.

pub mod crypto;
pub mod der;
pub mod rsa;
pub mod pkcs1;
pub mod pkcs5;
pub mod oids;
pub mod keystore;
pub mod csr;
pub mod cms;
pub mod pfx;
pub mod token;
pub mod scenario;
