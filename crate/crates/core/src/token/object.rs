// SPDX-License-Identifier: Apache-2.0

//! Object classes, attribute types and per-class templates.

use std::collections::BTreeMap;

use super::TokenError;
use crate::keystore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectClass {
    Data,
    Certificate,
    Key,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 3] = [ObjectClass::Data, ObjectClass::Certificate, ObjectClass::Key];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KeyType {
    RsaPublic,
    RsaPrivate,
    /// 16-octet AES / HMAC key.
    Secret,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttrType {
    Class,
    Token,
    Private,
    Label,
    Id,
    KeyType,
    Subject,
    Value,
    Modulus,
    PublicExponent,
    Encrypt,
    Decrypt,
    Sign,
    Verify,
    Wrap,
    Unwrap,
    StartDate,
    EndDate,
    Local,
    Sensitive,
    Extractable,
    AlwaysSensitive,
    NeverExtractable,
}

impl AttrType {
    pub const ALL: [AttrType; 23] = [
        AttrType::Class,
        AttrType::Token,
        AttrType::Private,
        AttrType::Label,
        AttrType::Id,
        AttrType::KeyType,
        AttrType::Subject,
        AttrType::Value,
        AttrType::Modulus,
        AttrType::PublicExponent,
        AttrType::Encrypt,
        AttrType::Decrypt,
        AttrType::Sign,
        AttrType::Verify,
        AttrType::Wrap,
        AttrType::Unwrap,
        AttrType::StartDate,
        AttrType::EndDate,
        AttrType::Local,
        AttrType::Sensitive,
        AttrType::Extractable,
        AttrType::AlwaysSensitive,
        AttrType::NeverExtractable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttrType::Class => "CKA_CLASS",
            AttrType::Token => "CKA_TOKEN",
            AttrType::Private => "CKA_PRIVATE",
            AttrType::Label => "CKA_LABEL",
            AttrType::Id => "CKA_ID",
            AttrType::KeyType => "CKA_KEY_TYPE",
            AttrType::Subject => "CKA_SUBJECT",
            AttrType::Value => "CKA_VALUE",
            AttrType::Modulus => "CKA_MODULUS",
            AttrType::PublicExponent => "CKA_PUBLIC_EXPONENT",
            AttrType::Encrypt => "CKA_ENCRYPT",
            AttrType::Decrypt => "CKA_DECRYPT",
            AttrType::Sign => "CKA_SIGN",
            AttrType::Verify => "CKA_VERIFY",
            AttrType::Wrap => "CKA_WRAP",
            AttrType::Unwrap => "CKA_UNWRAP",
            AttrType::StartDate => "CKA_START_DATE",
            AttrType::EndDate => "CKA_END_DATE",
            AttrType::Local => "CKA_LOCAL",
            AttrType::Sensitive => "CKA_SENSITIVE",
            AttrType::Extractable => "CKA_EXTRACTABLE",
            AttrType::AlwaysSensitive => "CKA_ALWAYS_SENSITIVE",
            AttrType::NeverExtractable => "CKA_NEVER_EXTRACTABLE",
        }
    }

    fn kind(self) -> ValueKind {
        match self {
            AttrType::Class => ValueKind::Class,
            AttrType::KeyType => ValueKind::KeyType,
            AttrType::Label | AttrType::StartDate | AttrType::EndDate => ValueKind::Text,
            AttrType::Id | AttrType::Subject | AttrType::Value | AttrType::Modulus | AttrType::PublicExponent => {
                ValueKind::Bytes
            }
            _ => ValueKind::Bool,
        }
    }

    /// Attributes a caller may change with set_attribute. Sensitive and
    /// Extractable only in one direction.
    pub(crate) fn is_modifiable(self) -> bool {
        matches!(
            self,
            AttrType::Label
                | AttrType::Id
                | AttrType::Subject
                | AttrType::StartDate
                | AttrType::EndDate
                | AttrType::Encrypt
                | AttrType::Decrypt
                | AttrType::Sign
                | AttrType::Verify
                | AttrType::Wrap
                | AttrType::Unwrap
                | AttrType::Sensitive
                | AttrType::Extractable
        )
    }

    /// Attributes only the token itself sets.
    fn is_token_managed(self) -> bool {
        matches!(self, AttrType::Local | AttrType::AlwaysSensitive | AttrType::NeverExtractable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ValueKind {
    Bool,
    Bytes,
    Text,
    Class,
    KeyType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrValue {
    Bool(bool),
    Bytes(Vec<u8>),
    Text(String),
    Class(ObjectClass),
    KeyType(KeyType),
}

impl AttrValue {
    fn kind(&self) -> ValueKind {
        match self {
            AttrValue::Bool(_) => ValueKind::Bool,
            AttrValue::Bytes(_) => ValueKind::Bytes,
            AttrValue::Text(_) => ValueKind::Text,
            AttrValue::Class(_) => ValueKind::Class,
            AttrValue::KeyType(_) => ValueKind::KeyType,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            AttrValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_bytes(&self) -> Option<&[u8]> {
        match self {
            AttrValue::Bytes(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            AttrValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<bool> for AttrValue {
    fn from(b: bool) -> Self {
        AttrValue::Bool(b)
    }
}

impl From<&str> for AttrValue {
    fn from(s: &str) -> Self {
        AttrValue::Text(s.to_string())
    }
}

impl From<&[u8]> for AttrValue {
    fn from(b: &[u8]) -> Self {
        AttrValue::Bytes(b.to_vec())
    }
}

impl From<Vec<u8>> for AttrValue {
    fn from(b: Vec<u8>) -> Self {
        AttrValue::Bytes(b)
    }
}

impl From<ObjectClass> for AttrValue {
    fn from(c: ObjectClass) -> Self {
        AttrValue::Class(c)
    }
}

impl From<KeyType> for AttrValue {
    fn from(k: KeyType) -> Self {
        AttrValue::KeyType(k)
    }
}

pub type Template = Vec<(AttrType, AttrValue)>;
pub(crate) type AttrMap = BTreeMap<AttrType, AttrValue>;

/// Attribute set of a class; `None` marks an attribute without a default.
fn schema(class: ObjectClass, key_type: Option<KeyType>) -> Vec<(AttrType, Option<AttrValue>)> {
    use AttrType as A;
    let b = |v: bool| Some(AttrValue::Bool(v));
    let empty = || Some(AttrValue::Bytes(Vec::new()));
    let text = || Some(AttrValue::Text(String::new()));
    let secretish = matches!(key_type, Some(KeyType::RsaPrivate | KeyType::Secret));
    let mut s = vec![(A::Class, None), (A::Token, b(false)), (A::Private, b(secretish)), (A::Label, text())];
    match class {
        ObjectClass::Data => s.push((A::Value, None)),
        ObjectClass::Certificate => s.extend([(A::Id, empty()), (A::Subject, empty()), (A::Value, None)]),
        ObjectClass::Key => {
            s.extend([
                (A::KeyType, None),
                (A::Id, empty()),
                (A::Subject, empty()),
                (A::StartDate, text()),
                (A::EndDate, text()),
                (A::Local, b(false)),
            ]);
            match key_type {
                Some(KeyType::RsaPublic) => s.extend([
                    (A::Modulus, None),
                    (A::PublicExponent, None),
                    (A::Encrypt, b(true)),
                    (A::Verify, b(true)),
                    (A::Wrap, b(false)),
                ]),
                Some(KeyType::RsaPrivate) => s.extend([
                    (A::Value, None),
                    // filled from Value
                    (A::Modulus, empty()),
                    (A::PublicExponent, empty()),
                    (A::Decrypt, b(true)),
                    (A::Sign, b(true)),
                    (A::Unwrap, b(false)),
                    (A::Sensitive, b(true)),
                    (A::Extractable, b(true)),
                    (A::AlwaysSensitive, b(false)),
                    (A::NeverExtractable, b(false)),
                ]),
                Some(KeyType::Secret) => s.extend([
                    (A::Value, None),
                    (A::Encrypt, b(true)),
                    (A::Decrypt, b(true)),
                    (A::Sign, b(true)),
                    (A::Verify, b(true)),
                    (A::Wrap, b(false)),
                    (A::Unwrap, b(false)),
                    (A::Sensitive, b(true)),
                    (A::Extractable, b(true)),
                    (A::AlwaysSensitive, b(false)),
                    (A::NeverExtractable, b(false)),
                ]),
                None => {}
            }
        }
    }
    s
}

/// Turns a caller template into a complete attribute map, or refuses.
/// `trusted` lets the token itself set token-managed attributes.
pub(crate) fn build(template: &[(AttrType, AttrValue)], trusted: bool) -> Result<AttrMap, TokenError> {
    let mut given = AttrMap::new();
    for (t, v) in template {
        if v.kind() != t.kind() {
            return Err(TokenError::TemplateInconsistent(t.name()));
        }
        if !trusted && t.is_token_managed() {
            return Err(TokenError::AttributeReadOnly(t.name()));
        }
        if given.insert(*t, v.clone()).is_some() {
            return Err(TokenError::TemplateInconsistent(t.name()));
        }
    }
    let class = match given.get(&AttrType::Class) {
        Some(AttrValue::Class(c)) => *c,
        _ => return Err(TokenError::TemplateIncomplete(AttrType::Class.name())),
    };
    let key_type = match (class, given.get(&AttrType::KeyType)) {
        (ObjectClass::Key, Some(AttrValue::KeyType(k))) => Some(*k),
        (ObjectClass::Key, _) => return Err(TokenError::TemplateIncomplete(AttrType::KeyType.name())),
        _ => None,
    };
    let explicit_flags = given.contains_key(&AttrType::AlwaysSensitive);
    let schema = schema(class, key_type);
    if let Some(t) = given.keys().find(|t| !schema.iter().any(|(s, _)| s == *t)) {
        return Err(TokenError::TemplateInconsistent(t.name()));
    }
    if key_type == Some(KeyType::RsaPrivate) && (given.contains_key(&AttrType::Modulus) || given.contains_key(&AttrType::PublicExponent)) {
        return Err(TokenError::AttributeReadOnly(AttrType::Modulus.name()));
    }
    let mut map = AttrMap::new();
    for (t, default) in schema {
        match given.remove(&t).or(default) {
            Some(v) => {
                map.insert(t, v);
            }
            None => return Err(TokenError::TemplateIncomplete(t.name())),
        }
    }
    match key_type {
        Some(KeyType::RsaPrivate) => {
            let der = map[&AttrType::Value].as_bytes().expect("typed");
            let sk = keystore::rsa_private_key_from_der(der).map_err(|_| TokenError::TemplateInconsistent("CKA_VALUE"))?;
            map.insert(AttrType::Modulus, AttrValue::Bytes(sk.n().to_bytes_be()));
            map.insert(AttrType::PublicExponent, AttrValue::Bytes(sk.e().to_bytes_be()));
        }
        Some(KeyType::Secret) => {
            if map[&AttrType::Value].as_bytes().map(<[u8]>::len) != Some(crate::crypto::aes::KEY_LEN) {
                return Err(TokenError::TemplateInconsistent("CKA_VALUE"));
            }
        }
        Some(KeyType::RsaPublic) => {
            let n = num_bigint::BigUint::from_bytes_be(map[&AttrType::Modulus].as_bytes().expect("typed"));
            let e = num_bigint::BigUint::from_bytes_be(map[&AttrType::PublicExponent].as_bytes().expect("typed"));
            crate::rsa::RsaPublicKey::new(n, e).map_err(|_| TokenError::TemplateInconsistent("CKA_MODULUS"))?;
        }
        None => {}
    }
    if !explicit_flags && map.contains_key(&AttrType::Sensitive) {
        let sensitive = map[&AttrType::Sensitive] == AttrValue::Bool(true);
        let extractable = map[&AttrType::Extractable] == AttrValue::Bool(true);
        map.insert(AttrType::AlwaysSensitive, AttrValue::Bool(sensitive));
        map.insert(AttrType::NeverExtractable, AttrValue::Bool(!extractable));
    }
    Ok(map)
}

/// Checks a change to one attribute of an existing object. `copying`
/// additionally allows Token and Private.
pub(crate) fn check_change(map: &AttrMap, t: AttrType, v: &AttrValue, copying: bool) -> Result<(), TokenError> {
    if !map.contains_key(&t) {
        return Err(TokenError::TemplateInconsistent(t.name()));
    }
    if v.kind() != t.kind() {
        return Err(TokenError::TemplateInconsistent(t.name()));
    }
    let allowed = t.is_modifiable() || (copying && matches!(t, AttrType::Token | AttrType::Private));
    if !allowed {
        return Err(TokenError::AttributeReadOnly(t.name()));
    }
    // one-way flags
    match t {
        AttrType::Sensitive if map[&t] == AttrValue::Bool(true) && *v == AttrValue::Bool(false) => {
            Err(TokenError::AttributeReadOnly(t.name()))
        }
        AttrType::Extractable if map[&t] == AttrValue::Bool(false) && *v == AttrValue::Bool(true) => {
            Err(TokenError::AttributeReadOnly(t.name()))
        }
        _ => Ok(()),
    }
}

pub(crate) fn flag(map: &AttrMap, t: AttrType) -> bool {
    map.get(&t).and_then(AttrValue::as_bool).unwrap_or(false)
}

pub(crate) fn class_of(map: &AttrMap) -> ObjectClass {
    match map[&AttrType::Class] {
        AttrValue::Class(c) => c,
        _ => unreachable!("validated on creation"),
    }
}

pub(crate) fn key_type_of(map: &AttrMap) -> Option<KeyType> {
    match map.get(&AttrType::KeyType) {
        Some(AttrValue::KeyType(k)) => Some(*k),
        _ => None,
    }
}

/// Whether CKA_VALUE may be read in plaintext.
pub(crate) fn value_hidden(map: &AttrMap) -> bool {
    map.contains_key(&AttrType::Sensitive) && (flag(map, AttrType::Sensitive) || !flag(map, AttrType::Extractable))
}
