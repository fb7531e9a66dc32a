mod common;

use common::{TWO_ORIGINS, TWO_ORIGINS_RINGED, TWO_ORIGINS_SHEAF};
use glue_core::doc::{parse_document, DocumentError, GluingDocument, Kind};
use serde_json::{json, Value};

fn pointer_of(text: &str) -> String {
    match parse_document(text) {
        Err(DocumentError::Invalid(e)) => e.pointer,
        other => panic!("expected an invalid document, got {other:?}"),
    }
}

fn edited(text: &str, pointer: &str, value: Value) -> String {
    let mut v: Value = serde_json::from_str(text).unwrap();
    *v.pointer_mut(pointer).expect("pointer exists") = value;
    v.to_string()
}

#[test]
fn fixtures_round_trip() {
    for (text, kind) in [(TWO_ORIGINS, Kind::Top), (TWO_ORIGINS_SHEAF, Kind::Sheaf), (TWO_ORIGINS_RINGED, Kind::Ringed)] {
        let doc = parse_document(text).unwrap();
        assert_eq!(doc.kind(), kind);
        let json = doc.to_json();
        let again = parse_document(&json.to_string()).unwrap();
        assert_eq!(again.to_json(), json);
        match (&doc, &again) {
            (GluingDocument::Top { data: a, .. }, GluingDocument::Top { data: b, .. }) => assert_eq!(a, b),
            (GluingDocument::Sheaf { data: a }, GluingDocument::Sheaf { data: b }) => assert_eq!(a, b),
            (GluingDocument::Ringed { data: a }, GluingDocument::Ringed { data: b }) => assert_eq!(a, b),
            _ => panic!("kind changed"),
        }
    }
}

#[test]
fn errors_point_at_the_offending_value() {
    assert_eq!(pointer_of(&edited(TWO_ORIGINS, "/kind", json!("scheme"))), "/kind");
    let bad_assign = edited(TWO_ORIGINS, "/payload/inclusions/0/1/assign", json!([5]));
    assert!(pointer_of(&bad_assign).starts_with("/payload/inclusions/0/1"), "{}", pointer_of(&bad_assign));
    let bad_space = edited(TWO_ORIGINS, "/payload/charts/1", json!("nowhere"));
    assert!(pointer_of(&bad_space).starts_with("/payload/charts/1"), "{}", pointer_of(&bad_space));
    let bad_variant = edited(TWO_ORIGINS, "/variant", json!("lrts"));
    assert_eq!(pointer_of(&bad_variant), "/variant");
    assert_eq!(pointer_of("{"), "/");
}

#[test]
fn scheme_variant_is_unsupported() {
    let sch = edited(TWO_ORIGINS_RINGED, "/variant", json!("sch"));
    assert_eq!(parse_document(&sch).unwrap_err(), DocumentError::SchemeUnsupported);
}

#[test]
fn broken_cocycle_parses_but_fails_validation() {
    // swapping chart 0 on its own overlap: well formed, but not the identity
    let text = edited(TWO_ORIGINS, "/payload/transitions/0/0/assign", json!([1, 0]));
    let Ok(GluingDocument::Top { data, .. }) = parse_document(&text) else { panic!("structurally valid") };
    assert!(!data.violations().is_empty());
    assert!(data.validate().is_err());
}
