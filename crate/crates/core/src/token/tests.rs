// SPDX-License-Identifier: Apache-2.0

use super::*;

const SO: &[u8] = b"so-pin";
const USER: &[u8] = b"1234";

fn ready() -> (Token, SessionHandle) {
    let t = Token::seeded("test", b"token");
    t.initialize(SO).unwrap();
    let s = t.open_session(true).unwrap();
    t.login(s, UserType::So, SO).unwrap();
    t.init_user_pin(s, USER).unwrap();
    t.logout(s).unwrap();
    (t, s)
}

fn data(private: bool, token: bool) -> Template {
    vec![
        (AttrType::Class, ObjectClass::Data.into()),
        (AttrType::Value, b"payload".as_slice().into()),
        (AttrType::Private, private.into()),
        (AttrType::Token, token.into()),
    ]
}

#[test]
fn initialization_rules() {
    let t = Token::seeded("t", b"x");
    assert_eq!(t.open_session(true), Err(TokenError::NotInitialized));
    t.initialize(SO).unwrap();
    assert_eq!(t.initialize(SO), Err(TokenError::AlreadyInitialized));
    let s = t.open_session(true).unwrap();
    assert_eq!(t.init_user_pin(s, USER), Err(TokenError::NotLoggedInAsSO));
    assert_eq!(t.login(s, UserType::User, USER), Err(TokenError::UserPinNotInitialized));
    t.login(s, UserType::So, SO).unwrap();
    t.init_user_pin(s, USER).unwrap();
}

#[test]
fn finalize_closes_everything() {
    let (t, _) = ready();
    let extra: Vec<_> = (0..4).map(|_| t.open_session(false).unwrap()).collect();
    assert_eq!(t.finalize(), 5);
    assert_eq!(t.open_session_count(), 0);
    assert_eq!(t.digest(extra[0], b""), Err(TokenError::SessionClosed));
}

#[test]
fn sessions() {
    let (t, s) = ready();
    let a = t.open_session(false).unwrap();
    assert_ne!(a, s);
    t.close_session(a).unwrap();
    assert_eq!(t.close_session(a), Err(TokenError::SessionClosed));
    assert_eq!(t.random(a, 4), Err(TokenError::SessionClosed));
    t.close_all_sessions();
    assert_eq!(t.digest(s, b"x"), Err(TokenError::SessionClosed));
}

#[test]
fn login_transitions() {
    let (t, s) = ready();
    assert_eq!(t.session_state(s).unwrap(), SessionState::RwPublic);
    assert_eq!(t.login(s, UserType::User, b"0000"), Err(TokenError::PinIncorrect));
    assert_eq!(t.login_state(), LoginState::Public);
    t.login(s, UserType::So, SO).unwrap();
    assert_eq!(t.session_state(s).unwrap(), SessionState::RwSo);
    assert_eq!(t.login(s, UserType::User, USER), Err(TokenError::AlreadyLoggedIn));
    assert_eq!(t.open_session(false), Err(TokenError::SoSessionExists));
    t.logout(s).unwrap();
    assert_eq!(t.logout(s), Err(TokenError::NotLoggedIn));
    let ro = t.open_session(false).unwrap();
    assert_eq!(t.login(s, UserType::So, SO), Err(TokenError::ReadOnlySessionExists));
    t.login(ro, UserType::User, USER).unwrap();
    assert_eq!(t.session_state(ro).unwrap(), SessionState::RoUser);
    assert_eq!(t.session_state(s).unwrap(), SessionState::RwUser);
}

#[test]
fn private_objects_hidden_until_login() {
    let (t, s) = ready();
    t.login(s, UserType::User, USER).unwrap();
    let h = t.create_object(s, &data(true, true)).unwrap();
    t.logout(s).unwrap();
    assert!(t.find_objects(s, &[]).unwrap().is_empty());
    assert_eq!(t.get_attribute(s, h, AttrType::Label), Err(TokenError::NotLoggedIn));
    assert_eq!(t.login(s, UserType::User, b"bad"), Err(TokenError::PinIncorrect));
    assert!(t.find_objects(s, &[]).unwrap().is_empty());
    t.login(s, UserType::User, USER).unwrap();
    assert_eq!(t.find_objects(s, &[]).unwrap(), vec![h]);
    t.logout(s).unwrap();
    assert_eq!(t.get_attribute(s, h, AttrType::Value), Err(TokenError::NotLoggedIn));
}

#[test]
fn read_only_sessions() {
    let (t, _) = ready();
    let ro = t.open_session(false).unwrap();
    assert_eq!(t.create_object(ro, &data(false, true)), Err(TokenError::ReadOnlySession));
    let h = t.create_object(ro, &data(false, false)).unwrap();
    t.set_attribute(ro, h, AttrType::Label, "renamed".into()).unwrap();
    t.destroy_object(ro, h).unwrap();
}

#[test]
fn session_objects_die_with_their_session() {
    let (t, s) = ready();
    let other = t.open_session(true).unwrap();
    let h = t.create_object(other, &data(false, false)).unwrap();
    let kept = t.create_object(other, &data(false, true)).unwrap();
    t.close_session(other).unwrap();
    assert_eq!(t.get_attribute(s, h, AttrType::Label), Err(TokenError::ObjectNotFound));
    assert!(t.get_attribute(s, kept, AttrType::Label).is_ok());
}

#[test]
fn templates_must_be_complete() {
    let (t, s) = ready();
    assert_eq!(
        t.create_object(s, &[(AttrType::Class, ObjectClass::Data.into())]),
        Err(TokenError::TemplateIncomplete("CKA_VALUE"))
    );
    assert_eq!(t.create_object(s, &[]), Err(TokenError::TemplateIncomplete("CKA_CLASS")));
    let mut bad = data(false, false);
    bad.push((AttrType::Sign, true.into()));
    assert_eq!(t.create_object(s, &bad), Err(TokenError::TemplateInconsistent("CKA_SIGN")));
    let mut local = data(false, false);
    local[0] = (AttrType::Class, ObjectClass::Key.into());
    local.push((AttrType::KeyType, KeyType::Secret.into()));
    local.push((AttrType::Local, true.into()));
    assert_eq!(t.create_object(s, &local), Err(TokenError::AttributeReadOnly("CKA_LOCAL")));
    let wrong_type = vec![(AttrType::Class, ObjectClass::Data.into()), (AttrType::Value, "text".into())];
    assert_eq!(t.create_object(s, &wrong_type), Err(TokenError::TemplateInconsistent("CKA_VALUE")));
}

#[test]
fn sensitive_and_unextractable() {
    let (t, s) = ready();
    t.login(s, UserType::User, USER).unwrap();
    let sensitive = t.generate_secret_key(s, &KeyTemplate::default()).unwrap();
    assert_eq!(t.get_attribute(s, sensitive, AttrType::Value), Err(TokenError::AttributeSensitive("CKA_VALUE")));
    assert_eq!(t.get_attribute(s, sensitive, AttrType::AlwaysSensitive), Ok(AttrValue::Bool(true)));
    assert_eq!(t.get_attribute(s, sensitive, AttrType::Local), Ok(AttrValue::Bool(true)));
    assert_eq!(
        t.copy_object(s, sensitive, &[(AttrType::Sensitive, false.into())]),
        Err(TokenError::AttributeReadOnly("CKA_SENSITIVE"))
    );
    assert_eq!(
        t.set_attribute(s, sensitive, AttrType::Sensitive, false.into()),
        Err(TokenError::AttributeReadOnly("CKA_SENSITIVE"))
    );

    let plain = t
        .generate_secret_key(s, &KeyTemplate { sensitive: false, ..KeyTemplate::default() })
        .unwrap();
    assert_eq!(t.get_attribute(s, plain, AttrType::Value).unwrap().as_bytes().unwrap().len(), 16);
    t.set_attribute(s, plain, AttrType::Extractable, false.into()).unwrap();
    assert_eq!(t.get_attribute(s, plain, AttrType::Value), Err(TokenError::AttributeSensitive("CKA_VALUE")));
    assert_eq!(
        t.copy_object(s, plain, &[(AttrType::Extractable, true.into())]),
        Err(TokenError::AttributeReadOnly("CKA_EXTRACTABLE"))
    );
    let copy = t.copy_object(s, plain, &[(AttrType::Label, "copy".into())]).unwrap();
    assert_eq!(t.get_attribute(s, copy, AttrType::Extractable), Ok(AttrValue::Bool(false)));
    assert_eq!(t.get_attribute(s, copy, AttrType::NeverExtractable), Ok(AttrValue::Bool(false)));
}

#[test]
fn wrapping() {
    let (t, s) = ready();
    t.login(s, UserType::User, USER).unwrap();
    let kek = t.generate_secret_key(s, &KeyTemplate { wrap: true, ..KeyTemplate::default() }).unwrap();
    let target = t.generate_secret_key(s, &KeyTemplate::default()).unwrap();
    let wrapped = t.wrap_key(s, kek, target).unwrap();
    let back = t.unwrap_key(s, kek, &wrapped, KeyType::Secret, &KeyTemplate::default()).unwrap();
    assert_eq!(t.get_attribute(s, back, AttrType::Local), Ok(AttrValue::Bool(false)));
    assert_eq!(t.get_attribute(s, back, AttrType::AlwaysSensitive), Ok(AttrValue::Bool(false)));
    let mac = t.sign(s, target, b"m").unwrap();
    assert!(t.verify(s, back, b"m", &mac).unwrap());

    let locked = t.generate_secret_key(s, &KeyTemplate { extractable: false, ..KeyTemplate::default() }).unwrap();
    assert_eq!(t.wrap_key(s, kek, locked), Err(TokenError::KeyUnextractable));
    assert_eq!(t.wrap_key(s, target, kek), Err(TokenError::KeyUsageViolation));
}

#[test]
fn rsa_operations() {
    let (t, s) = ready();
    t.login(s, UserType::User, USER).unwrap();
    let (pubh, privh) = t.generate_key_pair(s, 1024, 2, &KeyTemplate::default()).unwrap();
    let sig = t.sign(s, privh, b"challenge").unwrap();
    let pk = t.public_key(s, pubh).unwrap();
    assert!(pkcs1::verify(b"challenge", &sig, &pk, &PssParams::fitted(1024)));
    assert!(t.verify(s, pubh, b"challenge", &sig).unwrap());
    assert!(!t.verify(s, pubh, b"other", &sig).unwrap());
    assert_eq!(t.sign(s, pubh, b"x"), Err(TokenError::KeyUsageViolation));
    assert_eq!(t.verify(s, privh, b"x", &sig), Err(TokenError::KeyUsageViolation));

    let ct = t.encrypt(s, pubh, b"secret").unwrap();
    assert_eq!(t.decrypt(s, privh, &ct).unwrap(), b"secret");
    t.set_attribute(s, privh, AttrType::Sign, false.into()).unwrap();
    assert_eq!(t.sign(s, privh, b"x"), Err(TokenError::KeyUsageViolation));

    t.logout(s).unwrap();
    assert_eq!(t.decrypt(s, privh, &ct), Err(TokenError::NotLoggedIn));
    // public key stays usable without login
    assert!(t.verify(s, pubh, b"challenge", &sig).unwrap());
}

#[test]
fn device_removal() {
    let (t, s) = ready();
    t.login(s, UserType::User, USER).unwrap();
    t.remove_device();
    assert_eq!(t.open_session(true), Err(TokenError::DeviceRemoved));
    assert_eq!(t.digest(s, b""), Err(TokenError::DeviceRemoved));
    t.reinsert_device();
    let s2 = t.open_session(true).unwrap();
    assert_eq!(t.session_state(s2).unwrap(), SessionState::RwPublic);
    assert_eq!(t.events().last(), Some(&SessionEvent::DeviceRemoved));
}

#[test]
fn manifest_layout() {
    let t = Token::seeded("empty", b"m");
    let m = t.export_pkcs15_layout();
    assert!(m.contains("EF(ODF): 0\n"));
    assert!(m.contains("EF(TokenInfo): 1\n"));
    assert!(m.contains("EF(UnusedSpace): 0\n"));
    assert_eq!(m.matches("EF(").count(), 3);

    let (t, s) = ready();
    t.login(s, UserType::User, USER).unwrap();
    let tmpl = KeyTemplate { id: vec![1], label: "alice".into(), ..KeyTemplate::default() };
    let e = num_bigint::BigUint::from(65537u32);
    let (_, sk) = rsa::generate_key(512, 2, &e, &mut SeededStream::new(b"k")).unwrap();
    t.import_private_key(s, &sk, &tmpl).unwrap();
    t.create_object(
        s,
        &[
            (AttrType::Class, ObjectClass::Certificate.into()),
            (AttrType::Token, true.into()),
            (AttrType::Id, vec![1u8].into()),
            (AttrType::Label, "alice".into()),
            (AttrType::Value, b"cert".as_slice().into()),
        ],
    )
    .unwrap();
    // session objects are not on the card
    t.create_object(s, &data(false, false)).unwrap();
    let m = t.export_pkcs15_layout();
    assert!(m.contains("EF(ODF): 2\n      EF(PrKDF)\n      EF(CDF)\n"), "{m}");
    assert!(m.contains("EF(PrKDF): 1\n      handle="));
    assert!(m.contains("id=01 label=alice"));
    assert!(!m.contains("DODF"));
    assert_eq!(m, t.export_pkcs15_layout());
}

#[test]
fn token_is_shareable_across_threads() {
    let (t, s) = ready();
    let t = std::sync::Arc::new(t);
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let t = t.clone();
            std::thread::spawn(move || {
                let own = t.open_session(false).unwrap();
                for _ in 0..10 {
                    t.create_object(own, &data(false, false)).unwrap();
                }
                t.close_session(own).unwrap();
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    assert!(t.find_objects(s, &[]).unwrap().is_empty());
}
