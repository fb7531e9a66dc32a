mod common;

use common::{class_of, IndexOracle};
use glue_core::index::{canonicalize, GlueObject, GluingIndexCategory};
use proptest::prelude::*;

#[test]
fn census_matches_raw_tuple_closure() {
    for n in 1..=5 {
        let cat = GluingIndexCategory::new(n).unwrap();
        let oracle = IndexOracle::new(n);
        assert_eq!(cat.objects().len(), oracle.classes.len(), "n={n}");
        assert_eq!(cat.morphism_count(), oracle.morphisms(), "n={n}");
    }
    assert_eq!(GluingIndexCategory::new(2).unwrap().morphism_count(), 10);
    assert_eq!(GluingIndexCategory::new(3).unwrap().objects().len(), 12);
}

#[test]
fn paths_chain_generators() {
    let cat = GluingIndexCategory::new(3).unwrap();
    for a in cat.objects() {
        for b in cat.objects() {
            match cat.path(a, b) {
                None => assert!(!cat.hom_exists(a, b)),
                Some(chain) => {
                    let mut at = *a;
                    for g in &chain {
                        assert_eq!(g.dom(), at);
                        at = g.cod();
                    }
                    assert_eq!(at, *b);
                }
            }
        }
    }
}

#[test]
fn dot_lists_every_object() {
    let cat = GluingIndexCategory::new(2).unwrap();
    let dot = cat.to_dot();
    for o in cat.objects() {
        assert!(dot.contains(&format!("\"{o}\"")), "{o} missing");
    }
}

#[test]
fn out_of_range_and_arity_rejected() {
    assert!(canonicalize(&[0, 3], 3).is_err());
    assert!(canonicalize(&[], 3).is_err());
    assert!(canonicalize(&[0, 1, 2, 0], 3).is_err());
}

proptest! {
    #[test]
    fn canonical_form_keeps_the_class(raw in prop::collection::vec(0usize..5, 1..=3)) {
        let c = canonicalize(&raw, 5).unwrap();
        prop_assert_eq!(class_of(&c.indices()), class_of(&raw));
        prop_assert_eq!(c.first(), raw[0]);
        let support = raw.iter().fold(0u64, |acc, &i| acc | 1 << i);
        prop_assert_eq!(c.support(), support);
    }

    #[test]
    fn composition_is_reachability(n in 1usize..=4, a in 0usize..64, b in 0usize..64, c in 0usize..64) {
        let cat = GluingIndexCategory::new(n).unwrap();
        let objs: Vec<GlueObject> = cat.objects().to_vec();
        let (a, b, c) = (objs[a % objs.len()], objs[b % objs.len()], objs[c % objs.len()]);
        if cat.hom_exists(&a, &b) && cat.hom_exists(&b, &c) {
            prop_assert!(cat.hom_exists(&a, &c));
        }
    }
}
