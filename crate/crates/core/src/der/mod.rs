// SPDX-License-Identifier: Apache-2.0

//! Distinguished Encoding Rules reader and writer.
//!
//! Values are held as a small tagged tree ([`DerValue`]). Encoding always
//! produces definite, minimal lengths and sorts `SET` members into canonical
//! order. Decoding is strict: anything that would not re-encode to the same
//! octets (indefinite lengths, padded lengths, unsorted sets, padded
//! integers) is rejected, so `to_der(from_der(x)) == x` for every accepted
//! input.

mod oid;

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};

pub use oid::Oid;

/// Universal tag numbers understood by the codec.
pub mod tag {
    pub const BOOLEAN: u32 = 1;
    pub const INTEGER: u32 = 2;
    pub const BIT_STRING: u32 = 3;
    pub const OCTET_STRING: u32 = 4;
    pub const NULL: u32 = 5;
    pub const OID: u32 = 6;
    pub const UTF8_STRING: u32 = 12;
    pub const SEQUENCE: u32 = 16;
    pub const SET: u32 = 17;
    pub const PRINTABLE_STRING: u32 = 19;
    pub const IA5_STRING: u32 = 22;
    pub const UTC_TIME: u32 = 23;
    pub const GENERALIZED_TIME: u32 = 24;
}

/// Largest tag number accepted; four base-128 octets in the high-tag form.
pub const MAX_TAG_NUMBER: u32 = (1 << 28) - 1;

const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DerError {
    #[error("input ends before the encoded length")]
    Truncated,
    #[error("trailing octets after a complete value")]
    TrailingOctets,
    #[error("indefinite length form is not DER")]
    IndefiniteLength,
    #[error("length is not minimally encoded")]
    NonMinimalLength,
    #[error("length does not fit in four octets")]
    LengthTooLarge,
    #[error("non-canonical encoding: {0}")]
    NonCanonical(&'static str),
    #[error("tag number exceeds the supported range")]
    OversizeTag,
    #[error("nesting deeper than {MAX_DEPTH} levels")]
    TooDeep,
    #[error("object identifier arc is unterminated or overflows")]
    ArcOverflow,
    #[error("invalid object identifier")]
    InvalidOid,
    #[error("unexpected tag: expected {expected}, found {found}")]
    UnexpectedTag { expected: String, found: String },
    #[error("missing field: {0}")]
    MissingField(&'static str),
    #[error("unexpected extra field")]
    ExtraField,
    #[error("invalid value: {0}")]
    InvalidValue(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TagClass {
    Universal,
    Application,
    Context,
    Private,
}

impl TagClass {
    fn bits(self) -> u8 {
        match self {
            TagClass::Universal => 0x00,
            TagClass::Application => 0x40,
            TagClass::Context => 0x80,
            TagClass::Private => 0xC0,
        }
    }

    fn from_bits(b: u8) -> Self {
        match b & 0xC0 {
            0x00 => TagClass::Universal,
            0x40 => TagClass::Application,
            0x80 => TagClass::Context,
            _ => TagClass::Private,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Content {
    Primitive(Vec<u8>),
    Constructed(Vec<DerValue>),
}

/// One node of a DER tree. A primitive node owns octets, a constructed node
/// owns its children; the constructed bit is implied by the variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerValue {
    pub class: TagClass,
    pub number: u32,
    pub content: Content,
}

fn tag_name(class: TagClass, number: u32) -> String {
    match (class, number) {
        (TagClass::Universal, tag::BOOLEAN) => "BOOLEAN".into(),
        (TagClass::Universal, tag::INTEGER) => "INTEGER".into(),
        (TagClass::Universal, tag::BIT_STRING) => "BIT STRING".into(),
        (TagClass::Universal, tag::OCTET_STRING) => "OCTET STRING".into(),
        (TagClass::Universal, tag::NULL) => "NULL".into(),
        (TagClass::Universal, tag::OID) => "OBJECT IDENTIFIER".into(),
        (TagClass::Universal, tag::UTF8_STRING) => "UTF8String".into(),
        (TagClass::Universal, tag::SEQUENCE) => "SEQUENCE".into(),
        (TagClass::Universal, tag::SET) => "SET".into(),
        (TagClass::Universal, tag::PRINTABLE_STRING) => "PrintableString".into(),
        (TagClass::Universal, tag::IA5_STRING) => "IA5String".into(),
        (TagClass::Universal, tag::UTC_TIME) => "UTCTime".into(),
        (TagClass::Universal, tag::GENERALIZED_TIME) => "GeneralizedTime".into(),
        (TagClass::Universal, n) => format!("UNIVERSAL {n}"),
        (TagClass::Application, n) => format!("[APPLICATION {n}]"),
        (TagClass::Context, n) => format!("[{n}]"),
        (TagClass::Private, n) => format!("[PRIVATE {n}]"),
    }
}

impl DerValue {
    pub fn primitive(class: TagClass, number: u32, octets: Vec<u8>) -> Self {
        DerValue { class, number, content: Content::Primitive(octets) }
    }

    pub fn constructed(class: TagClass, number: u32, children: Vec<DerValue>) -> Self {
        DerValue { class, number, content: Content::Constructed(children) }
    }

    pub fn boolean(v: bool) -> Self {
        Self::primitive(TagClass::Universal, tag::BOOLEAN, vec![if v { 0xFF } else { 0x00 }])
    }

    pub fn integer_i64(v: i64) -> Self {
        Self::integer_bigint(&BigInt::from(v))
    }

    pub fn integer_bigint(v: &BigInt) -> Self {
        Self::primitive(TagClass::Universal, tag::INTEGER, v.to_signed_bytes_be())
    }

    pub fn integer_unsigned(v: &BigUint) -> Self {
        Self::integer_bigint(&BigInt::from_biguint(Sign::Plus, v.clone()))
    }

    pub fn null() -> Self {
        Self::primitive(TagClass::Universal, tag::NULL, Vec::new())
    }

    pub fn octet_string(bytes: impl Into<Vec<u8>>) -> Self {
        Self::primitive(TagClass::Universal, tag::OCTET_STRING, bytes.into())
    }

    /// BIT STRING with zero unused bits.
    pub fn bit_string(bytes: &[u8]) -> Self {
        let mut c = Vec::with_capacity(bytes.len() + 1);
        c.push(0);
        c.extend_from_slice(bytes);
        Self::primitive(TagClass::Universal, tag::BIT_STRING, c)
    }

    pub fn oid(oid: &Oid) -> Self {
        Self::primitive(TagClass::Universal, tag::OID, oid.to_octets())
    }

    pub fn utf8(s: &str) -> Self {
        Self::primitive(TagClass::Universal, tag::UTF8_STRING, s.as_bytes().to_vec())
    }

    pub fn printable(s: &str) -> Result<Self, DerError> {
        if !s.bytes().all(is_printable_char) {
            return Err(DerError::InvalidValue("character outside PrintableString"));
        }
        Ok(Self::primitive(TagClass::Universal, tag::PRINTABLE_STRING, s.as_bytes().to_vec()))
    }

    pub fn ia5(s: &str) -> Result<Self, DerError> {
        if !s.is_ascii() {
            return Err(DerError::InvalidValue("character outside IA5String"));
        }
        Ok(Self::primitive(TagClass::Universal, tag::IA5_STRING, s.as_bytes().to_vec()))
    }

    /// `YYMMDDHHMMSSZ`
    pub fn utc_time(s: &str) -> Result<Self, DerError> {
        check_time(s.as_bytes(), 12)?;
        Ok(Self::primitive(TagClass::Universal, tag::UTC_TIME, s.as_bytes().to_vec()))
    }

    /// `YYYYMMDDHHMMSSZ`
    pub fn generalized_time(s: &str) -> Result<Self, DerError> {
        check_time(s.as_bytes(), 14)?;
        Ok(Self::primitive(TagClass::Universal, tag::GENERALIZED_TIME, s.as_bytes().to_vec()))
    }

    pub fn sequence(children: Vec<DerValue>) -> Self {
        Self::constructed(TagClass::Universal, tag::SEQUENCE, children)
    }

    /// SET with members already placed in DER order, so that the value
    /// compares equal to its own decoding.
    pub fn set(mut children: Vec<DerValue>) -> Self {
        sort_canonical(&mut children);
        Self::constructed(TagClass::Universal, tag::SET, children)
    }

    /// `[n] EXPLICIT inner`
    pub fn explicit(number: u32, inner: DerValue) -> Self {
        Self::constructed(TagClass::Context, number, vec![inner])
    }

    /// Re-tags the value with a context tag, keeping its content
    /// (`[n] IMPLICIT`). Children of an implicitly tagged SET are kept in
    /// canonical order.
    pub fn implicit(self, number: u32) -> Self {
        let was_set = self.class == TagClass::Universal && self.number == tag::SET;
        let mut v = DerValue { class: TagClass::Context, number, content: self.content };
        if was_set {
            if let Content::Constructed(ref mut c) = v.content {
                sort_canonical(c);
            }
        }
        v
    }

    pub fn is_constructed(&self) -> bool {
        matches!(self.content, Content::Constructed(_))
    }

    pub fn has_tag(&self, class: TagClass, number: u32) -> bool {
        self.class == class && self.number == number
    }

    pub fn is_universal(&self, number: u32) -> bool {
        self.has_tag(TagClass::Universal, number)
    }

    pub fn is_context(&self, number: u32) -> bool {
        self.has_tag(TagClass::Context, number)
    }

    pub fn tag_name(&self) -> String {
        tag_name(self.class, self.number)
    }

    pub fn expect_tag(&self, class: TagClass, number: u32) -> Result<&Self, DerError> {
        if self.has_tag(class, number) {
            Ok(self)
        } else {
            Err(DerError::UnexpectedTag { expected: tag_name(class, number), found: self.tag_name() })
        }
    }

    pub fn expect_universal(&self, number: u32) -> Result<&Self, DerError> {
        self.expect_tag(TagClass::Universal, number)
    }

    pub fn octets(&self) -> Result<&[u8], DerError> {
        match &self.content {
            Content::Primitive(b) => Ok(b),
            Content::Constructed(_) => Err(DerError::InvalidValue("expected a primitive value")),
        }
    }

    pub fn children(&self) -> Result<&[DerValue], DerError> {
        match &self.content {
            Content::Constructed(c) => Ok(c),
            Content::Primitive(_) => Err(DerError::InvalidValue("expected a constructed value")),
        }
    }

    pub fn as_bool(&self) -> Result<bool, DerError> {
        Ok(self.expect_universal(tag::BOOLEAN)?.octets()? == [0xFF])
    }

    pub fn as_bigint(&self) -> Result<BigInt, DerError> {
        Ok(BigInt::from_signed_bytes_be(self.expect_universal(tag::INTEGER)?.octets()?))
    }

    pub fn as_biguint(&self) -> Result<BigUint, DerError> {
        self.as_bigint()?
            .to_biguint()
            .ok_or(DerError::InvalidValue("negative integer"))
    }

    pub fn as_u64(&self) -> Result<u64, DerError> {
        let v = self.as_biguint()?;
        u64::try_from(&v).map_err(|_| DerError::InvalidValue("integer out of range"))
    }

    pub fn as_octet_string(&self) -> Result<&[u8], DerError> {
        self.expect_universal(tag::OCTET_STRING)?.octets()
    }

    /// Octets of a BIT STRING with no unused bits.
    pub fn as_bit_string(&self) -> Result<&[u8], DerError> {
        let c = self.expect_universal(tag::BIT_STRING)?.octets()?;
        match c.split_first() {
            Some((0, rest)) => Ok(rest),
            _ => Err(DerError::InvalidValue("bit string with unused bits")),
        }
    }

    pub fn as_oid(&self) -> Result<Oid, DerError> {
        Oid::from_octets(self.expect_universal(tag::OID)?.octets()?)
    }

    /// Text of any of the character-string types.
    pub fn as_str(&self) -> Result<&str, DerError> {
        match (self.class, self.number) {
            (
                TagClass::Universal,
                tag::UTF8_STRING | tag::PRINTABLE_STRING | tag::IA5_STRING | tag::UTC_TIME
                | tag::GENERALIZED_TIME,
            ) => std::str::from_utf8(self.octets()?)
                .map_err(|_| DerError::InvalidValue("invalid utf-8")),
            _ => Err(DerError::UnexpectedTag {
                expected: "character string".into(),
                found: self.tag_name(),
            }),
        }
    }

    pub fn as_sequence(&self) -> Result<&[DerValue], DerError> {
        self.expect_universal(tag::SEQUENCE)?.children()
    }

    pub fn as_set(&self) -> Result<&[DerValue], DerError> {
        self.expect_universal(tag::SET)?.children()
    }

    /// Inner value of `[n] EXPLICIT`.
    pub fn as_explicit(&self, number: u32) -> Result<&DerValue, DerError> {
        match self.expect_tag(TagClass::Context, number)?.children()? {
            [one] => Ok(one),
            _ => Err(DerError::InvalidValue("explicit tag must wrap exactly one value")),
        }
    }

    pub fn to_der(&self) -> Result<Vec<u8>, DerError> {
        let mut out = Vec::new();
        self.encode_into(&mut out)?;
        Ok(out)
    }

    fn encode_into(&self, out: &mut Vec<u8>) -> Result<(), DerError> {
        write_tag(out, self.class, self.is_constructed(), self.number)?;
        match &self.content {
            Content::Primitive(bytes) => {
                check_primitive(self.class, self.number, bytes)?;
                write_length(out, bytes.len());
                out.extend_from_slice(bytes);
            }
            Content::Constructed(children) => {
                check_constructed(self.class, self.number)?;
                let mut body = Vec::new();
                if self.class == TagClass::Universal && self.number == tag::SET {
                    let mut encs = children
                        .iter()
                        .map(DerValue::to_der)
                        .collect::<Result<Vec<_>, _>>()?;
                    encs.sort();
                    for e in encs {
                        body.extend_from_slice(&e);
                    }
                } else {
                    for c in children {
                        c.encode_into(&mut body)?;
                    }
                }
                write_length(out, body.len());
                out.extend_from_slice(&body);
            }
        }
        Ok(())
    }

    pub fn from_der(input: &[u8]) -> Result<Self, DerError> {
        let (v, used) = parse(input, 0)?;
        if used != input.len() {
            return Err(DerError::TrailingOctets);
        }
        Ok(v)
    }
}

/// Encodes a value; see [`DerValue::to_der`].
pub fn der_encode(v: &DerValue) -> Result<Vec<u8>, DerError> {
    v.to_der()
}

/// Decodes exactly one value; see [`DerValue::from_der`].
pub fn der_decode(input: &[u8]) -> Result<DerValue, DerError> {
    DerValue::from_der(input)
}

/// Lowercase hex, two characters per octet, no separators.
pub fn hex_dump(bytes: &[u8]) -> String {
    hex::encode(bytes)
}

fn sort_canonical(children: &mut [DerValue]) {
    // members that fail to encode sort last; encoding reports the error later
    children.sort_by_cached_key(|c| c.to_der().unwrap_or_else(|_| vec![0xFF; 8]));
}

fn is_printable_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b" '()+,-./:=?".contains(&b)
}

fn check_time(s: &[u8], digits: usize) -> Result<(), DerError> {
    if s.len() == digits + 1 && s[..digits].iter().all(u8::is_ascii_digit) && s[digits] == b'Z' {
        Ok(())
    } else {
        Err(DerError::InvalidValue("time must be digits followed by Z"))
    }
}

fn is_universal_primitive(number: u32) -> bool {
    matches!(
        number,
        tag::BOOLEAN
            | tag::INTEGER
            | tag::BIT_STRING
            | tag::OCTET_STRING
            | tag::NULL
            | tag::OID
            | tag::UTF8_STRING
            | tag::PRINTABLE_STRING
            | tag::IA5_STRING
            | tag::UTC_TIME
            | tag::GENERALIZED_TIME
    )
}

fn check_constructed(class: TagClass, number: u32) -> Result<(), DerError> {
    if class == TagClass::Universal && (number == 0 || is_universal_primitive(number)) {
        return Err(DerError::NonCanonical("type must use the primitive form"));
    }
    Ok(())
}

fn check_primitive(class: TagClass, number: u32, c: &[u8]) -> Result<(), DerError> {
    if class != TagClass::Universal {
        return Ok(());
    }
    match number {
        0 => Err(DerError::NonCanonical("universal tag 0 is reserved")),
        tag::SEQUENCE | tag::SET => Err(DerError::NonCanonical("type must use the constructed form")),
        tag::BOOLEAN => match c {
            [0x00] | [0xFF] => Ok(()),
            _ => Err(DerError::NonCanonical("boolean must be a single 0x00 or 0xFF octet")),
        },
        tag::INTEGER => match c {
            [] => Err(DerError::NonCanonical("empty integer")),
            [0x00, b, ..] if b & 0x80 == 0 => {
                Err(DerError::NonCanonical("integer has a redundant leading octet"))
            }
            [0xFF, b, ..] if b & 0x80 != 0 => {
                Err(DerError::NonCanonical("integer has a redundant leading octet"))
            }
            _ => Ok(()),
        },
        tag::NULL => {
            if c.is_empty() {
                Ok(())
            } else {
                Err(DerError::NonCanonical("null with content"))
            }
        }
        tag::BIT_STRING => match c {
            [] => Err(DerError::NonCanonical("bit string without unused-bits octet")),
            [0] => Ok(()),
            [_] => Err(DerError::NonCanonical("empty bit string with unused bits")),
            [unused, .., last] => {
                if *unused > 7 || last & ((1u8 << unused) - 1) != 0 {
                    Err(DerError::NonCanonical("bit string unused bits must be zero"))
                } else {
                    Ok(())
                }
            }
        },
        tag::OID => Oid::from_octets(c).map(|_| ()),
        tag::UTF8_STRING => std::str::from_utf8(c)
            .map(|_| ())
            .map_err(|_| DerError::InvalidValue("invalid utf-8")),
        tag::PRINTABLE_STRING => {
            if c.iter().copied().all(is_printable_char) {
                Ok(())
            } else {
                Err(DerError::InvalidValue("character outside PrintableString"))
            }
        }
        tag::IA5_STRING => {
            if c.is_ascii() {
                Ok(())
            } else {
                Err(DerError::InvalidValue("character outside IA5String"))
            }
        }
        tag::UTC_TIME => check_time(c, 12),
        tag::GENERALIZED_TIME => check_time(c, 14),
        _ => Ok(()),
    }
}

fn write_tag(out: &mut Vec<u8>, class: TagClass, constructed: bool, number: u32) -> Result<(), DerError> {
    if number > MAX_TAG_NUMBER {
        return Err(DerError::OversizeTag);
    }
    let lead = class.bits() | if constructed { 0x20 } else { 0 };
    if number < 31 {
        out.push(lead | number as u8);
    } else {
        out.push(lead | 0x1F);
        let mut started = false;
        for shift in [21u32, 14, 7, 0] {
            let b = ((number >> shift) & 0x7F) as u8;
            if b != 0 || started || shift == 0 {
                started = true;
                out.push(if shift == 0 { b } else { b | 0x80 });
            }
        }
    }
    Ok(())
}

fn write_length(out: &mut Vec<u8>, len: usize) {
    if len < 0x80 {
        out.push(len as u8);
    } else {
        let bytes = (len as u64).to_be_bytes();
        let skip = bytes.iter().take_while(|b| **b == 0).count();
        out.push(0x80 | (bytes.len() - skip) as u8);
        out.extend_from_slice(&bytes[skip..]);
    }
}

fn parse(input: &[u8], depth: usize) -> Result<(DerValue, usize), DerError> {
    if depth > MAX_DEPTH {
        return Err(DerError::TooDeep);
    }
    let first = *input.first().ok_or(DerError::Truncated)?;
    let class = TagClass::from_bits(first);
    let constructed = first & 0x20 != 0;
    let mut pos = 1;
    let number = if first & 0x1F != 0x1F {
        u32::from(first & 0x1F)
    } else {
        let mut n: u32 = 0;
        let mut count = 0;
        loop {
            let b = *input.get(pos).ok_or(DerError::Truncated)?;
            pos += 1;
            if count == 0 && b == 0x80 {
                return Err(DerError::NonCanonical("tag number has a redundant leading octet"));
            }
            count += 1;
            if count > 4 {
                return Err(DerError::OversizeTag);
            }
            n = (n << 7) | u32::from(b & 0x7F);
            if b & 0x80 == 0 {
                break;
            }
        }
        if n < 31 {
            return Err(DerError::NonCanonical("low tag number in high-tag form"));
        }
        n
    };

    let lb = *input.get(pos).ok_or(DerError::Truncated)?;
    pos += 1;
    let len = if lb < 0x80 {
        usize::from(lb)
    } else if lb == 0x80 {
        return Err(DerError::IndefiniteLength);
    } else {
        let n = usize::from(lb & 0x7F);
        if n > 4 {
            return Err(DerError::LengthTooLarge);
        }
        let bytes = input.get(pos..pos + n).ok_or(DerError::Truncated)?;
        pos += n;
        if bytes[0] == 0 {
            return Err(DerError::NonMinimalLength);
        }
        let len = bytes.iter().fold(0usize, |acc, b| (acc << 8) | usize::from(*b));
        if len < 0x80 {
            return Err(DerError::NonMinimalLength);
        }
        len
    };
    let end = pos.checked_add(len).ok_or(DerError::Truncated)?;
    let body = input.get(pos..end).ok_or(DerError::Truncated)?;

    let value = if constructed {
        check_constructed(class, number)?;
        let mut children = Vec::new();
        let mut off = 0;
        let mut prev: Option<&[u8]> = None;
        let is_set = class == TagClass::Universal && number == tag::SET;
        while off < body.len() {
            let (child, used) = parse(&body[off..], depth + 1)?;
            let enc = &body[off..off + used];
            if is_set {
                if let Some(p) = prev {
                    if p > enc {
                        return Err(DerError::NonCanonical("set members out of canonical order"));
                    }
                }
                prev = Some(enc);
            }
            children.push(child);
            off += used;
        }
        DerValue::constructed(class, number, children)
    } else {
        check_primitive(class, number, body)?;
        DerValue::primitive(class, number, body.to_vec())
    };
    Ok((value, end))
}

impl fmt::Display for DerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn walk(v: &DerValue, indent: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{:indent$}{}", "", v.tag_name(), indent = indent)?;
            match &v.content {
                Content::Primitive(b) => {
                    if v.is_universal(tag::OID) {
                        match Oid::from_octets(b) {
                            Ok(o) => writeln!(f, " {o}"),
                            Err(_) => writeln!(f, " {}", hex_dump(b)),
                        }
                    } else {
                        writeln!(f, " {}", hex_dump(b))
                    }
                }
                Content::Constructed(c) => {
                    writeln!(f)?;
                    for child in c {
                        walk(child, indent + 2, f)?;
                    }
                    Ok(())
                }
            }
        }
        walk(self, 0, f)
    }
}

/// Cursor over the members of a constructed value, for field-by-field
/// decoding of SEQUENCE layouts.
pub struct SeqReader<'a> {
    items: &'a [DerValue],
    pos: usize,
}

impl<'a> SeqReader<'a> {
    pub fn new(items: &'a [DerValue]) -> Self {
        SeqReader { items, pos: 0 }
    }

    pub fn of_sequence(v: &'a DerValue) -> Result<Self, DerError> {
        Ok(Self::new(v.as_sequence()?))
    }

    pub fn next(&mut self, field: &'static str) -> Result<&'a DerValue, DerError> {
        let v = self.items.get(self.pos).ok_or(DerError::MissingField(field))?;
        self.pos += 1;
        Ok(v)
    }

    /// Consumes the next member only if it carries the given tag.
    pub fn next_if(&mut self, class: TagClass, number: u32) -> Option<&'a DerValue> {
        match self.items.get(self.pos) {
            Some(v) if v.has_tag(class, number) => {
                self.pos += 1;
                Some(v)
            }
            _ => None,
        }
    }

    pub fn finish(self) -> Result<(), DerError> {
        if self.pos == self.items.len() {
            Ok(())
        } else {
            Err(DerError::ExtraField)
        }
    }
}
