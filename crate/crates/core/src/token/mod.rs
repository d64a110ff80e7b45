// SPDX-License-Identifier: Apache-2.0

//! In-memory software token with a Cryptoki-style object, session and user
//! model.
//!
//! Rules enforced here:
//! - private objects are visible only while the normal user is logged in;
//! - R/O sessions may create, modify and destroy session objects but only
//!   read token objects;
//! - the SO initializes the token and sets the user PIN, and logs in only
//!   while every open session is R/W;
//! - CKA_VALUE of a sensitive or unextractable key is never returned, and
//!   an unextractable key is never wrapped.
//!
//! The token is one logical actor: all state lives behind a mutex, so calls
//! from several threads are serialized.

mod object;
mod pkcs15;

pub use object::{AttrType, AttrValue, KeyType, ObjectClass, Template};
pub use pkcs15::PKCS15_AID;

use std::collections::BTreeMap;
use std::sync::{Mutex, MutexGuard};

use object::{class_of, flag, key_type_of, value_hidden, AttrMap};

use crate::crypto::{self, ct_eq, HashAlg, RandomSource, RngError, SeededStream};
use crate::keystore;
use crate::pkcs1::{self, PssParams, Scheme};
use crate::pkcs5::{self, Pbkdf2Params};
use crate::rsa::{self, RsaPrivateKey, RsaPublicKey};

const PIN_ITERATIONS: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TokenError {
    #[error("token not initialized")]
    NotInitialized,
    #[error("token already initialized")]
    AlreadyInitialized,
    #[error("device removed")]
    DeviceRemoved,
    #[error("session closed or unknown")]
    SessionClosed,
    #[error("session is read-only")]
    ReadOnlySession,
    #[error("a read-only session is open")]
    ReadOnlySessionExists,
    #[error("the SO is logged in; only R/W sessions may be opened")]
    SoSessionExists,
    #[error("not logged in")]
    NotLoggedIn,
    #[error("SO is not logged in")]
    NotLoggedInAsSO,
    #[error("a user is already logged in")]
    AlreadyLoggedIn,
    #[error("PIN incorrect")]
    PinIncorrect,
    #[error("PIN must not be empty")]
    PinInvalid,
    #[error("user PIN not initialized")]
    UserPinNotInitialized,
    #[error("no such object")]
    ObjectNotFound,
    #[error("attribute {0} is sensitive")]
    AttributeSensitive(&'static str),
    #[error("attribute {0} is read-only")]
    AttributeReadOnly(&'static str),
    #[error("template lacks {0}")]
    TemplateIncomplete(&'static str),
    #[error("template inconsistent at {0}")]
    TemplateInconsistent(&'static str),
    #[error("key usage does not permit the operation")]
    KeyUsageViolation,
    #[error("key is unextractable")]
    KeyUnextractable,
    #[error("decryption error")]
    DecryptionError,
    #[error("mechanism error: {0}")]
    Mechanism(String),
    #[error("random source: {0}")]
    Rng(#[from] RngError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SessionHandle(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectHandle(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UserType {
    So,
    User,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoginState {
    Public,
    So,
    User,
}

impl LoginState {
    pub const ALL: [LoginState; 3] = [LoginState::Public, LoginState::So, LoginState::User];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionState {
    RoPublic,
    RwPublic,
    RoUser,
    RwUser,
    RwSo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionEvent {
    LoginSo,
    LoginUser,
    Logout,
    CloseSession(SessionHandle),
    DeviceRemoved,
}

/// Attributes for generated, imported or unwrapped keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyTemplate {
    pub label: String,
    pub id: Vec<u8>,
    pub subject: Vec<u8>,
    pub token: bool,
    pub private: bool,
    pub sensitive: bool,
    pub extractable: bool,
    pub wrap: bool,
}

impl Default for KeyTemplate {
    fn default() -> Self {
        KeyTemplate {
            label: String::new(),
            id: Vec::new(),
            subject: Vec::new(),
            token: true,
            private: true,
            sensitive: true,
            extractable: true,
            wrap: false,
        }
    }
}

impl KeyTemplate {
    fn common(&self, key_type: KeyType, local: bool) -> Template {
        vec![
            (AttrType::Class, ObjectClass::Key.into()),
            (AttrType::KeyType, key_type.into()),
            (AttrType::Label, self.label.as_str().into()),
            (AttrType::Id, self.id.clone().into()),
            (AttrType::Subject, self.subject.clone().into()),
            (AttrType::Token, self.token.into()),
            (AttrType::Local, local.into()),
        ]
    }

    fn secret_flags(&self, local: bool) -> Template {
        vec![
            (AttrType::Private, self.private.into()),
            (AttrType::Sensitive, self.sensitive.into()),
            (AttrType::Extractable, self.extractable.into()),
            (AttrType::AlwaysSensitive, (local && self.sensitive).into()),
            (AttrType::NeverExtractable, (local && !self.extractable).into()),
        ]
    }
}

struct PinHash {
    salt: Vec<u8>,
    hash: Vec<u8>,
}

impl PinHash {
    fn new(pin: &[u8], rng: &mut dyn RandomSource) -> Result<Self, TokenError> {
        if pin.is_empty() {
            return Err(TokenError::PinInvalid);
        }
        let salt = crypto::random_bytes(rng, 16)?;
        let hash = Self::derive(pin, &salt);
        Ok(PinHash { salt, hash })
    }

    fn derive(pin: &[u8], salt: &[u8]) -> Vec<u8> {
        pkcs5::pbkdf2(pin, &Pbkdf2Params::new(salt, PIN_ITERATIONS, 32)).expect("fixed valid parameters")
    }

    fn matches(&self, pin: &[u8]) -> bool {
        !pin.is_empty() && ct_eq(&Self::derive(pin, &self.salt), &self.hash)
    }
}

struct StoredObject {
    attrs: AttrMap,
    /// Owning session of a session object.
    owner: Option<u64>,
}

struct State {
    label: String,
    present: bool,
    so_pin: Option<PinHash>,
    user_pin: Option<PinHash>,
    login: LoginState,
    sessions: BTreeMap<u64, bool>,
    objects: BTreeMap<u64, StoredObject>,
    next_handle: u64,
    events: Vec<SessionEvent>,
    rng: Box<dyn RandomSource + Send>,
}

pub struct Token {
    state: Mutex<State>,
}

impl std::fmt::Debug for Token {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Token").field("label", &self.lock().label).finish_non_exhaustive()
    }
}

impl Token {
    pub fn new(label: &str, rng: Box<dyn RandomSource + Send>) -> Self {
        Token {
            state: Mutex::new(State {
                label: label.to_string(),
                present: true,
                so_pin: None,
                user_pin: None,
                login: LoginState::Public,
                sessions: BTreeMap::new(),
                objects: BTreeMap::new(),
                next_handle: 1,
                events: Vec::new(),
                rng,
            }),
        }
    }

    /// Token driven by a deterministic random stream.
    pub fn seeded(label: &str, seed: &[u8]) -> Self {
        Self::new(label, Box::new(SeededStream::new(seed)))
    }

    fn lock(&self) -> MutexGuard<'_, State> {
        // a panic while holding the lock leaves state consistent enough to read
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn label(&self) -> String {
        self.lock().label.clone()
    }

    pub fn is_initialized(&self) -> bool {
        self.lock().so_pin.is_some()
    }

    /// Sets the SO PIN and wipes every object.
    pub fn initialize(&self, so_pin: &[u8]) -> Result<(), TokenError> {
        let mut st = self.lock();
        if st.so_pin.is_some() {
            return Err(TokenError::AlreadyInitialized);
        }
        let h = PinHash::new(so_pin, st.rng.as_mut())?;
        st.so_pin = Some(h);
        st.objects.clear();
        Ok(())
    }

    pub fn init_user_pin(&self, s: SessionHandle, pin: &[u8]) -> Result<(), TokenError> {
        let mut st = self.lock();
        st.session(s)?;
        if st.login != LoginState::So {
            return Err(TokenError::NotLoggedInAsSO);
        }
        let h = PinHash::new(pin, st.rng.as_mut())?;
        st.user_pin = Some(h);
        Ok(())
    }

    /// Closes every session; returns how many were open.
    pub fn finalize(&self) -> usize {
        let mut st = self.lock();
        let n = st.sessions.len();
        st.close_all();
        n
    }

    pub fn open_session(&self, rw: bool) -> Result<SessionHandle, TokenError> {
        let mut st = self.lock();
        if !st.present {
            return Err(TokenError::DeviceRemoved);
        }
        if st.so_pin.is_none() {
            return Err(TokenError::NotInitialized);
        }
        if !rw && st.login == LoginState::So {
            return Err(TokenError::SoSessionExists);
        }
        let h = st.fresh_handle();
        st.sessions.insert(h, rw);
        Ok(SessionHandle(h))
    }

    pub fn close_session(&self, s: SessionHandle) -> Result<(), TokenError> {
        let mut st = self.lock();
        st.session(s)?;
        st.close(s.0);
        Ok(())
    }

    pub fn close_all_sessions(&self) {
        self.lock().close_all();
    }

    pub fn open_session_count(&self) -> usize {
        self.lock().sessions.len()
    }

    /// The device disappears: sessions close, the login ends, session
    /// objects are gone. Token objects survive reinsertion.
    pub fn remove_device(&self) {
        let mut st = self.lock();
        st.close_all();
        st.present = false;
        st.events.push(SessionEvent::DeviceRemoved);
    }

    pub fn reinsert_device(&self) {
        self.lock().present = true;
    }

    pub fn events(&self) -> Vec<SessionEvent> {
        self.lock().events.clone()
    }

    pub fn login_state(&self) -> LoginState {
        self.lock().login
    }

    pub fn session_state(&self, s: SessionHandle) -> Result<SessionState, TokenError> {
        let st = self.lock();
        let rw = st.session(s)?;
        Ok(match (st.login, rw) {
            (LoginState::Public, false) => SessionState::RoPublic,
            (LoginState::Public, true) => SessionState::RwPublic,
            (LoginState::User, false) => SessionState::RoUser,
            (LoginState::User, true) => SessionState::RwUser,
            (LoginState::So, _) => SessionState::RwSo,
        })
    }

    pub fn login(&self, s: SessionHandle, user: UserType, pin: &[u8]) -> Result<(), TokenError> {
        let mut st = self.lock();
        st.session(s)?;
        if st.login != LoginState::Public {
            return Err(TokenError::AlreadyLoggedIn);
        }
        match user {
            UserType::So => {
                if st.sessions.values().any(|rw| !rw) {
                    return Err(TokenError::ReadOnlySessionExists);
                }
                if !st.so_pin.as_ref().is_some_and(|h| h.matches(pin)) {
                    return Err(TokenError::PinIncorrect);
                }
                st.login = LoginState::So;
                st.events.push(SessionEvent::LoginSo);
            }
            UserType::User => {
                let h = st.user_pin.as_ref().ok_or(TokenError::UserPinNotInitialized)?;
                if !h.matches(pin) {
                    return Err(TokenError::PinIncorrect);
                }
                st.login = LoginState::User;
                st.events.push(SessionEvent::LoginUser);
            }
        }
        Ok(())
    }

    pub fn logout(&self, s: SessionHandle) -> Result<(), TokenError> {
        let mut st = self.lock();
        st.session(s)?;
        if st.login == LoginState::Public {
            return Err(TokenError::NotLoggedIn);
        }
        st.login = LoginState::Public;
        st.events.push(SessionEvent::Logout);
        Ok(())
    }

    pub fn create_object(&self, s: SessionHandle, template: &[(AttrType, AttrValue)]) -> Result<ObjectHandle, TokenError> {
        let mut st = self.lock();
        let rw = st.session(s)?;
        let attrs = object::build(template, false)?;
        st.insert(s, rw, attrs)
    }

    pub fn destroy_object(&self, s: SessionHandle, h: ObjectHandle) -> Result<(), TokenError> {
        let mut st = self.lock();
        let rw = st.session(s)?;
        let obj = st.object(h)?;
        st.check_write(rw, &obj.attrs)?;
        st.objects.remove(&h.0);
        Ok(())
    }

    /// Copies an object, applying `changes`. Token and Private may change;
    /// sensitivity and unextractability can only be tightened.
    pub fn copy_object(
        &self,
        s: SessionHandle,
        h: ObjectHandle,
        changes: &[(AttrType, AttrValue)],
    ) -> Result<ObjectHandle, TokenError> {
        let mut st = self.lock();
        let rw = st.session(s)?;
        let mut attrs = st.object(h)?.attrs.clone();
        for (t, v) in changes {
            object::check_change(&attrs, *t, v, true)?;
            attrs.insert(*t, v.clone());
        }
        st.insert(s, rw, attrs)
    }

    pub fn get_attribute(&self, s: SessionHandle, h: ObjectHandle, t: AttrType) -> Result<AttrValue, TokenError> {
        let st = self.lock();
        st.session(s)?;
        let obj = st.object(h)?;
        if t == AttrType::Value && value_hidden(&obj.attrs) {
            return Err(TokenError::AttributeSensitive(t.name()));
        }
        obj.attrs.get(&t).cloned().ok_or(TokenError::TemplateInconsistent(t.name()))
    }

    pub fn set_attribute(&self, s: SessionHandle, h: ObjectHandle, t: AttrType, v: AttrValue) -> Result<(), TokenError> {
        let mut st = self.lock();
        let rw = st.session(s)?;
        let obj = st.object(h)?;
        st.check_write(rw, &obj.attrs)?;
        object::check_change(&obj.attrs, t, &v, false)?;
        st.objects.get_mut(&h.0).expect("present").attrs.insert(t, v);
        Ok(())
    }

    /// Handles of visible objects matching every pair in `filter`.
    pub fn find_objects(&self, s: SessionHandle, filter: &[(AttrType, AttrValue)]) -> Result<Vec<ObjectHandle>, TokenError> {
        let st = self.lock();
        st.session(s)?;
        Ok(st
            .objects
            .iter()
            .filter(|(_, o)| st.visible(&o.attrs))
            .filter(|(_, o)| filter.iter().all(|(t, v)| o.attrs.get(t) == Some(v)))
            .map(|(h, _)| ObjectHandle(*h))
            .collect())
    }

    pub fn generate_key_pair(
        &self,
        s: SessionHandle,
        bits: usize,
        primes: usize,
        template: &KeyTemplate,
    ) -> Result<(ObjectHandle, ObjectHandle), TokenError> {
        let mut st = self.lock();
        let rw = st.session(s)?;
        let e = num_bigint::BigUint::from(65537u32);
        let (pk, sk) = rsa::generate_key(bits, primes, &e, st.rng.as_mut()).map_err(|e| match e {
            rsa::RsaError::Rng(r) => TokenError::Rng(r),
            e => TokenError::Mechanism(e.to_string()),
        })?;
        let public = public_template(&pk, template, true);
        let private = private_template(&sk, template, true);
        // validate both before storing either
        let public = object::build(&public, true)?;
        let private = object::build(&private, true)?;
        st.check_write(rw, &public)?;
        st.check_write(rw, &private)?;
        Ok((st.insert(s, rw, public)?, st.insert(s, rw, private)?))
    }

    pub fn generate_secret_key(&self, s: SessionHandle, template: &KeyTemplate) -> Result<ObjectHandle, TokenError> {
        let mut st = self.lock();
        let rw = st.session(s)?;
        let value = crypto::random_bytes(st.rng.as_mut(), crypto::aes::KEY_LEN)?;
        let attrs = object::build(&secret_template(value, template, true), true)?;
        st.insert(s, rw, attrs)
    }

    /// Stores a private key that was generated elsewhere (CKA_LOCAL false).
    pub fn import_private_key(&self, s: SessionHandle, sk: &RsaPrivateKey, template: &KeyTemplate) -> Result<ObjectHandle, TokenError> {
        let mut st = self.lock();
        let rw = st.session(s)?;
        let attrs = object::build(&private_template(sk, template, false), true)?;
        st.insert(s, rw, attrs)
    }

    pub fn import_public_key(&self, s: SessionHandle, pk: &RsaPublicKey, template: &KeyTemplate) -> Result<ObjectHandle, TokenError> {
        let mut st = self.lock();
        let rw = st.session(s)?;
        let attrs = object::build(&public_template(pk, template, false), true)?;
        st.insert(s, rw, attrs)
    }

    /// Public half of an RSA key object (public or private).
    pub fn public_key(&self, s: SessionHandle, h: ObjectHandle) -> Result<RsaPublicKey, TokenError> {
        let st = self.lock();
        st.session(s)?;
        let obj = st.object(h)?;
        match key_type_of(&obj.attrs) {
            Some(KeyType::RsaPublic | KeyType::RsaPrivate) => Ok(rsa_public(&obj.attrs)),
            _ => Err(TokenError::KeyUsageViolation),
        }
    }

    /// RSASSA-PSS (SHA-256, largest salt up to 32 octets the modulus
    /// allows) for RSA keys; HMAC-SHA-256 for secret keys.
    pub fn sign(&self, s: SessionHandle, key: ObjectHandle, msg: &[u8]) -> Result<Vec<u8>, TokenError> {
        let mut st = self.lock();
        st.session(s)?;
        let attrs = st.usable_key(key, AttrType::Sign)?;
        match key_type_of(&attrs) {
            Some(KeyType::RsaPrivate) => {
                let sk = rsa_private(&attrs);
                let params = PssParams::fitted(sk.modulus_bits());
                pkcs1::sign(msg, &sk, &params, st.rng.as_mut()).map_err(mechanism)
            }
            Some(KeyType::Secret) => Ok(crypto::hmac(HashAlg::Sha256, secret_value(&attrs), msg)),
            _ => Err(TokenError::KeyUsageViolation),
        }
    }

    pub fn verify(&self, s: SessionHandle, key: ObjectHandle, msg: &[u8], sig: &[u8]) -> Result<bool, TokenError> {
        let st = self.lock();
        st.session(s)?;
        let attrs = st.usable_key(key, AttrType::Verify)?;
        match key_type_of(&attrs) {
            Some(KeyType::RsaPublic) => {
                let pk = rsa_public(&attrs);
                Ok(pkcs1::verify(msg, sig, &pk, &PssParams::fitted(pk.modulus_bits())))
            }
            Some(KeyType::Secret) => Ok(ct_eq(&crypto::hmac(HashAlg::Sha256, secret_value(&attrs), msg), sig)),
            _ => Err(TokenError::KeyUsageViolation),
        }
    }

    /// RSAES-OAEP for RSA public keys; AES-128-CBC with a random IV
    /// prefixed to the output for secret keys.
    pub fn encrypt(&self, s: SessionHandle, key: ObjectHandle, msg: &[u8]) -> Result<Vec<u8>, TokenError> {
        let mut st = self.lock();
        st.session(s)?;
        let attrs = st.usable_key(key, AttrType::Encrypt)?;
        match key_type_of(&attrs) {
            Some(KeyType::RsaPublic) => {
                let pk = rsa_public(&attrs);
                pkcs1::encrypt(msg, &pk, &Scheme::oaep_for(&pk), st.rng.as_mut()).map_err(mechanism)
            }
            Some(KeyType::Secret) => aes_seal(secret_value(&attrs), msg, st.rng.as_mut()),
            _ => Err(TokenError::KeyUsageViolation),
        }
    }

    pub fn decrypt(&self, s: SessionHandle, key: ObjectHandle, ct: &[u8]) -> Result<Vec<u8>, TokenError> {
        let st = self.lock();
        st.session(s)?;
        let attrs = st.usable_key(key, AttrType::Decrypt)?;
        match key_type_of(&attrs) {
            Some(KeyType::RsaPrivate) => {
                let sk = rsa_private(&attrs);
                pkcs1::decrypt(ct, &sk, &Scheme::oaep_for(&sk.public_key())).map_err(|_| TokenError::DecryptionError)
            }
            Some(KeyType::Secret) => aes_open(secret_value(&attrs), ct),
            _ => Err(TokenError::KeyUsageViolation),
        }
    }

    pub fn digest(&self, s: SessionHandle, msg: &[u8]) -> Result<Vec<u8>, TokenError> {
        self.lock().session(s)?;
        Ok(HashAlg::Sha256.digest(msg))
    }

    pub fn random(&self, s: SessionHandle, n: usize) -> Result<Vec<u8>, TokenError> {
        let mut st = self.lock();
        st.session(s)?;
        Ok(crypto::random_bytes(st.rng.as_mut(), n)?)
    }

    /// Encrypts the value of `target` under `wrapping`: AES-128-CBC for a
    /// secret wrapping key, RSAES-OAEP for an RSA public one. Unextractable
    /// targets are refused whatever their other attributes.
    pub fn wrap_key(&self, s: SessionHandle, wrapping: ObjectHandle, target: ObjectHandle) -> Result<Vec<u8>, TokenError> {
        let mut st = self.lock();
        st.session(s)?;
        let w = st.usable_key(wrapping, AttrType::Wrap)?;
        let t = st.object(target)?.attrs.clone();
        if !matches!(key_type_of(&t), Some(KeyType::RsaPrivate | KeyType::Secret)) {
            return Err(TokenError::KeyUsageViolation);
        }
        if !flag(&t, AttrType::Extractable) {
            return Err(TokenError::KeyUnextractable);
        }
        let value = t[&AttrType::Value].as_bytes().expect("typed");
        match key_type_of(&w) {
            Some(KeyType::Secret) => aes_seal(secret_value(&w), value, st.rng.as_mut()),
            Some(KeyType::RsaPublic) => {
                let pk = rsa_public(&w);
                pkcs1::encrypt(value, &pk, &Scheme::oaep_for(&pk), st.rng.as_mut()).map_err(mechanism)
            }
            _ => Err(TokenError::KeyUsageViolation),
        }
    }

    /// Inverse of [`Token::wrap_key`]. The new key is neither local nor
    /// always-sensitive nor never-extractable.
    pub fn unwrap_key(
        &self,
        s: SessionHandle,
        unwrapping: ObjectHandle,
        wrapped: &[u8],
        key_type: KeyType,
        template: &KeyTemplate,
    ) -> Result<ObjectHandle, TokenError> {
        let mut st = self.lock();
        let rw = st.session(s)?;
        let u = st.usable_key(unwrapping, AttrType::Unwrap)?;
        let value = match key_type_of(&u) {
            Some(KeyType::Secret) => aes_open(secret_value(&u), wrapped)?,
            Some(KeyType::RsaPrivate) => {
                let sk = rsa_private(&u);
                pkcs1::decrypt(wrapped, &sk, &Scheme::oaep_for(&sk.public_key())).map_err(|_| TokenError::DecryptionError)?
            }
            _ => return Err(TokenError::KeyUsageViolation),
        };
        let tmpl = match key_type {
            KeyType::Secret => secret_template(value, template, false),
            KeyType::RsaPrivate => {
                let sk = keystore::rsa_private_key_from_der(&value).map_err(|_| TokenError::DecryptionError)?;
                private_template(&sk, template, false)
            }
            KeyType::RsaPublic => return Err(TokenError::TemplateInconsistent(AttrType::KeyType.name())),
        };
        let attrs = object::build(&tmpl, true)?;
        st.insert(s, rw, attrs)
    }

    /// Line-oriented PKCS #15 directory listing of the token objects.
    pub fn export_pkcs15_layout(&self) -> String {
        let st = self.lock();
        let objs: Vec<(u64, &AttrMap)> =
            st.objects.iter().filter(|(_, o)| flag(&o.attrs, AttrType::Token)).map(|(h, o)| (*h, &o.attrs)).collect();
        pkcs15::manifest(&st.label, &objs)
    }
}

fn mechanism(e: pkcs1::Pkcs1Error) -> TokenError {
    match e {
        pkcs1::Pkcs1Error::Rng(r) => TokenError::Rng(r),
        e => TokenError::Mechanism(e.to_string()),
    }
}

fn public_template(pk: &RsaPublicKey, t: &KeyTemplate, local: bool) -> Template {
    let mut v = t.common(KeyType::RsaPublic, local);
    v.extend([
        (AttrType::Private, false.into()),
        (AttrType::Modulus, pk.n().to_bytes_be().into()),
        (AttrType::PublicExponent, pk.e().to_bytes_be().into()),
        (AttrType::Wrap, t.wrap.into()),
    ]);
    v
}

fn private_template(sk: &RsaPrivateKey, t: &KeyTemplate, local: bool) -> Template {
    let mut v = t.common(KeyType::RsaPrivate, local);
    v.extend(t.secret_flags(local));
    v.push((AttrType::Value, keystore::rsa_private_key_to_der(sk).into()));
    v.push((AttrType::Unwrap, t.wrap.into()));
    v
}

fn secret_template(value: Vec<u8>, t: &KeyTemplate, local: bool) -> Template {
    let mut v = t.common(KeyType::Secret, local);
    v.extend(t.secret_flags(local));
    v.extend([(AttrType::Value, value.into()), (AttrType::Wrap, t.wrap.into()), (AttrType::Unwrap, t.wrap.into())]);
    v
}

fn rsa_public(attrs: &AttrMap) -> RsaPublicKey {
    let n = num_bigint::BigUint::from_bytes_be(attrs[&AttrType::Modulus].as_bytes().expect("typed"));
    let e = num_bigint::BigUint::from_bytes_be(attrs[&AttrType::PublicExponent].as_bytes().expect("typed"));
    RsaPublicKey::new(n, e).expect("validated on creation")
}

fn rsa_private(attrs: &AttrMap) -> RsaPrivateKey {
    keystore::rsa_private_key_from_der(attrs[&AttrType::Value].as_bytes().expect("typed")).expect("validated on creation")
}

fn secret_value(attrs: &AttrMap) -> &[u8] {
    attrs[&AttrType::Value].as_bytes().expect("typed")
}

fn aes_seal(key: &[u8], msg: &[u8], rng: &mut dyn RandomSource) -> Result<Vec<u8>, TokenError> {
    let mut out = crypto::random_bytes(rng, crypto::aes::BLOCK_LEN)?;
    let ct = crypto::cbc_encrypt(key, &out, msg).map_err(|e| TokenError::Mechanism(e.to_string()))?;
    out.extend(ct);
    Ok(out)
}

fn aes_open(key: &[u8], data: &[u8]) -> Result<Vec<u8>, TokenError> {
    if data.len() < crypto::aes::BLOCK_LEN {
        return Err(TokenError::DecryptionError);
    }
    let (iv, ct) = data.split_at(crypto::aes::BLOCK_LEN);
    crypto::cbc_decrypt(key, iv, ct).map_err(|_| TokenError::DecryptionError)
}

impl State {
    fn fresh_handle(&mut self) -> u64 {
        let h = self.next_handle;
        self.next_handle += 1;
        h
    }

    fn session(&self, s: SessionHandle) -> Result<bool, TokenError> {
        if !self.present {
            return Err(TokenError::DeviceRemoved);
        }
        self.sessions.get(&s.0).copied().ok_or(TokenError::SessionClosed)
    }

    fn close(&mut self, h: u64) {
        self.sessions.remove(&h);
        self.objects.retain(|_, o| o.owner != Some(h));
        self.events.push(SessionEvent::CloseSession(SessionHandle(h)));
        if self.sessions.is_empty() {
            self.login = LoginState::Public;
        }
    }

    fn close_all(&mut self) {
        let open: Vec<u64> = self.sessions.keys().copied().collect();
        for h in open {
            self.close(h);
        }
        self.login = LoginState::Public;
    }

    fn visible(&self, attrs: &AttrMap) -> bool {
        !flag(attrs, AttrType::Private) || self.login == LoginState::User
    }

    /// Looks up an object the current login may see.
    fn object(&self, h: ObjectHandle) -> Result<&StoredObject, TokenError> {
        let obj = self.objects.get(&h.0).ok_or(TokenError::ObjectNotFound)?;
        if !self.visible(&obj.attrs) {
            return Err(TokenError::NotLoggedIn);
        }
        Ok(obj)
    }

    fn check_write(&self, rw: bool, attrs: &AttrMap) -> Result<(), TokenError> {
        if !self.visible(attrs) {
            return Err(TokenError::NotLoggedIn);
        }
        if flag(attrs, AttrType::Token) && !rw {
            return Err(TokenError::ReadOnlySession);
        }
        Ok(())
    }

    fn insert(&mut self, s: SessionHandle, rw: bool, attrs: AttrMap) -> Result<ObjectHandle, TokenError> {
        self.check_write(rw, &attrs)?;
        let owner = if flag(&attrs, AttrType::Token) { None } else { Some(s.0) };
        let h = self.fresh_handle();
        self.objects.insert(h, StoredObject { attrs, owner });
        Ok(ObjectHandle(h))
    }

    fn usable_key(&self, h: ObjectHandle, usage: AttrType) -> Result<AttrMap, TokenError> {
        let obj = self.object(h)?;
        if class_of(&obj.attrs) != ObjectClass::Key || !flag(&obj.attrs, usage) {
            return Err(TokenError::KeyUsageViolation);
        }
        Ok(obj.attrs.clone())
    }
}

#[cfg(test)]
mod tests;
