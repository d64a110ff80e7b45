// SPDX-License-Identifier: Apache-2.0

use crate::der::{tag, DerError, DerValue, Oid, SeqReader, TagClass};
use crate::oids;

use super::KeystoreError;

/// `SEQUENCE { attrType OBJECT IDENTIFIER, attrValues SET OF ANY }`.
/// Values are kept in DER order so equality is independent of insertion
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub attr_type: Oid,
    values: Vec<DerValue>,
}

impl Attribute {
    pub fn new(attr_type: Oid, values: Vec<DerValue>) -> Self {
        let values = match DerValue::set(values).content {
            crate::der::Content::Constructed(v) => v,
            crate::der::Content::Primitive(_) => unreachable!(),
        };
        Attribute { attr_type, values }
    }

    pub fn single(attr_type: Oid, value: DerValue) -> Self {
        Self::new(attr_type, vec![value])
    }

    pub fn values(&self) -> &[DerValue] {
        &self.values
    }

    pub fn first(&self) -> Option<&DerValue> {
        self.values.first()
    }

    pub fn to_der_value(&self) -> DerValue {
        DerValue::sequence(vec![DerValue::oid(&self.attr_type), DerValue::set(self.values.clone())])
    }

    pub fn from_der_value(v: &DerValue) -> Result<Self, DerError> {
        let mut r = SeqReader::of_sequence(v)?;
        let attr_type = r.next("attrType")?.as_oid()?;
        let values = r.next("attrValues")?.as_set()?.to_vec();
        r.finish()?;
        Ok(Attribute { attr_type, values })
    }
}

/// `SET OF Attribute`.
pub fn attribute_set(attrs: &[Attribute]) -> DerValue {
    DerValue::set(attrs.iter().map(Attribute::to_der_value).collect())
}

/// Puts attributes into the order a `SET OF Attribute` decodes to.
pub fn sort_attributes(attrs: &mut [Attribute]) {
    attrs.sort_by_cached_key(|a| a.to_der_value().to_der().expect("well-formed"));
}

pub fn parse_attribute_set(v: &DerValue) -> Result<Vec<Attribute>, DerError> {
    v.children()?.iter().map(Attribute::from_der_value).collect()
}

pub fn find_attribute<'a>(attrs: &'a [Attribute], attr_type: &Oid) -> Option<&'a Attribute> {
    attrs.iter().find(|a| &a.attr_type == attr_type)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Syntax {
    /// UTF8String or PrintableString.
    DirectoryString,
    /// Non-empty UTF8String.
    NonEmptyUtf8,
    OctetString,
    ObjectIdentifier,
    /// UTCTime or GeneralizedTime.
    Time,
    GeneralizedTime,
    PositiveInteger,
    /// Any SEQUENCE (SignerInfo, Extensions).
    Sequence,
    Ia5String,
    /// Two-letter PrintableString.
    CountryCode,
    /// One of M, F, m, f.
    Gender,
    PrintableString,
}

impl Syntax {
    pub fn accepts(self, v: &DerValue) -> bool {
        let text = || v.as_str().ok();
        match self {
            Syntax::DirectoryString => {
                (v.is_universal(tag::UTF8_STRING) || v.is_universal(tag::PRINTABLE_STRING))
                    && text().is_some_and(|s| !s.is_empty())
            }
            Syntax::NonEmptyUtf8 => v.is_universal(tag::UTF8_STRING) && text().is_some_and(|s| !s.is_empty()),
            Syntax::OctetString => v.as_octet_string().is_ok(),
            Syntax::ObjectIdentifier => v.as_oid().is_ok(),
            Syntax::Time => v.is_universal(tag::UTC_TIME) || v.is_universal(tag::GENERALIZED_TIME),
            Syntax::GeneralizedTime => v.is_universal(tag::GENERALIZED_TIME),
            Syntax::PositiveInteger => v.as_bigint().is_ok_and(|i| i.sign() == num_bigint::Sign::Plus),
            Syntax::Sequence => v.as_sequence().is_ok(),
            Syntax::Ia5String => v.is_universal(tag::IA5_STRING) && text().is_some_and(|s| !s.is_empty()),
            Syntax::CountryCode => {
                v.is_universal(tag::PRINTABLE_STRING)
                    && text().is_some_and(|s| s.len() == 2 && s.bytes().all(|b| b.is_ascii_alphabetic()))
            }
            Syntax::Gender => {
                v.is_universal(tag::PRINTABLE_STRING) && matches!(text(), Some("M" | "F" | "m" | "f"))
            }
            Syntax::PrintableString => v.is_universal(tag::PRINTABLE_STRING) && text().is_some_and(|s| !s.is_empty()),
        }
    }
}

/// Raw input for [`AttributeRegistry::make`]; converted according to the
/// registered syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrInput {
    Text(String),
    Octets(Vec<u8>),
    Oid(Oid),
    Integer(u64),
    Der(DerValue),
}

impl From<&str> for AttrInput {
    fn from(s: &str) -> Self {
        AttrInput::Text(s.to_string())
    }
}

impl From<&[u8]> for AttrInput {
    fn from(b: &[u8]) -> Self {
        AttrInput::Octets(b.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSpec {
    pub name: &'static str,
    pub oid: Oid,
    pub syntax: Syntax,
    pub single_valued: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeRegistry {
    specs: Vec<AttributeSpec>,
}

fn spec(name: &'static str, oid: Oid, syntax: Syntax) -> AttributeSpec {
    AttributeSpec { name, oid, syntax, single_valued: true }
}

impl AttributeRegistry {
    /// The ten attribute types defined for use in other standards.
    pub fn standard() -> Self {
        AttributeRegistry {
            specs: vec![
                spec("contentType", oids::content_type(), Syntax::ObjectIdentifier),
                spec("messageDigest", oids::message_digest(), Syntax::OctetString),
                spec("signingTime", oids::signing_time(), Syntax::Time),
                spec("sequenceNumber", oids::sequence_number(), Syntax::PositiveInteger),
                spec("randomNonce", oids::random_nonce(), Syntax::OctetString),
                AttributeSpec { single_valued: false, ..spec("counterSignature", oids::counter_signature(), Syntax::Sequence) },
                spec("challengePassword", oids::challenge_password(), Syntax::DirectoryString),
                spec("extensionRequest", oids::extension_request(), Syntax::Sequence),
                spec("friendlyName", oids::friendly_name(), Syntax::NonEmptyUtf8),
                spec("localKeyId", oids::local_key_id(), Syntax::OctetString),
            ],
        }
    }

    /// Attributes describing a human being, for naturalPerson bundles.
    pub fn natural_person() -> Self {
        AttributeRegistry {
            specs: vec![
                spec("emailAddress", oids::email_address(), Syntax::Ia5String),
                spec("unstructuredName", oids::unstructured_name(), Syntax::DirectoryString),
                spec("unstructuredAddress", oids::unstructured_address(), Syntax::DirectoryString),
                spec("dateOfBirth", oids::date_of_birth(), Syntax::GeneralizedTime),
                spec("placeOfBirth", oids::place_of_birth(), Syntax::DirectoryString),
                spec("gender", oids::gender(), Syntax::Gender),
                spec("countryOfCitizenship", oids::country_of_citizenship(), Syntax::CountryCode),
                spec("countryOfResidence", oids::country_of_residence(), Syntax::CountryCode),
                spec("pseudonym", oids::pseudonym(), Syntax::DirectoryString),
                spec("serialNumber", oids::serial_number(), Syntax::PrintableString),
            ],
        }
    }

    pub fn specs(&self) -> &[AttributeSpec] {
        &self.specs
    }

    pub fn by_name(&self, name: &str) -> Option<&AttributeSpec> {
        self.specs.iter().find(|s| s.name == name)
    }

    pub fn by_oid(&self, oid: &Oid) -> Option<&AttributeSpec> {
        self.specs.iter().find(|s| &s.oid == oid)
    }

    pub fn make(&self, name: &str, input: AttrInput) -> Result<Attribute, KeystoreError> {
        let spec = self.by_name(name).ok_or_else(|| KeystoreError::UnknownAttributeType(name.to_string()))?;
        let value = convert(spec.syntax, input)?;
        if !spec.syntax.accepts(&value) {
            return Err(KeystoreError::SyntaxViolation(spec.name));
        }
        Ok(Attribute::single(spec.oid.clone(), value))
    }

    /// Total: unknown types and malformed values give `false`.
    pub fn check(&self, a: &Attribute) -> bool {
        let Some(spec) = self.by_oid(&a.attr_type) else {
            return false;
        };
        !a.values.is_empty()
            && (!spec.single_valued || a.values.len() == 1)
            && a.values.iter().all(|v| spec.syntax.accepts(v))
    }
}

fn convert(syntax: Syntax, input: AttrInput) -> Result<DerValue, KeystoreError> {
    let bad = |_| KeystoreError::SyntaxViolation("value does not fit the attribute syntax");
    Ok(match (syntax, input) {
        (_, AttrInput::Der(v)) => v,
        (Syntax::DirectoryString, AttrInput::Text(s)) => {
            DerValue::printable(&s).unwrap_or_else(|_| DerValue::utf8(&s))
        }
        (Syntax::NonEmptyUtf8, AttrInput::Text(s)) => DerValue::utf8(&s),
        (Syntax::OctetString, AttrInput::Octets(b)) => DerValue::octet_string(b),
        (Syntax::ObjectIdentifier, AttrInput::Oid(o)) => DerValue::oid(&o),
        (Syntax::Time, AttrInput::Text(s)) if s.len() == 13 => DerValue::utc_time(&s).map_err(bad)?,
        (Syntax::Time | Syntax::GeneralizedTime, AttrInput::Text(s)) => DerValue::generalized_time(&s).map_err(bad)?,
        (Syntax::PositiveInteger, AttrInput::Integer(n)) => DerValue::integer_unsigned(&n.into()),
        (Syntax::Ia5String, AttrInput::Text(s)) => DerValue::ia5(&s).map_err(bad)?,
        (Syntax::CountryCode | Syntax::Gender | Syntax::PrintableString, AttrInput::Text(s)) => {
            DerValue::printable(&s).map_err(bad)?
        }
        _ => return Err(KeystoreError::SyntaxViolation("value does not fit the attribute syntax")),
    })
}

pub fn attribute_make(name: &str, input: impl Into<AttrInput>) -> Result<Attribute, KeystoreError> {
    AttributeRegistry::standard().make(name, input.into())
}

/// Checks against the standard and naturalPerson registries.
pub fn attribute_check(a: &Attribute) -> bool {
    AttributeRegistry::standard().check(a) || AttributeRegistry::natural_person().check(a)
}

/// A naturalPerson entry: named attribute values built against
/// [`AttributeRegistry::natural_person`], in caller order.
pub fn natural_person(fields: &[(&str, &str)]) -> Result<Vec<Attribute>, KeystoreError> {
    let reg = AttributeRegistry::natural_person();
    fields.iter().map(|(name, value)| reg.make(name, AttrInput::from(*value))).collect()
}

/// Context-tagged `[n] IMPLICIT SET OF Attribute`, or `None` when empty.
pub(crate) fn implicit_attributes(n: u32, attrs: &[Attribute]) -> Option<DerValue> {
    (!attrs.is_empty()).then(|| attribute_set(attrs).implicit(n))
}

pub(crate) fn read_implicit_attributes(r: &mut SeqReader<'_>, n: u32) -> Result<Vec<Attribute>, DerError> {
    match r.next_if(TagClass::Context, n) {
        Some(v) => parse_attribute_set(v),
        None => Ok(Vec::new()),
    }
}
