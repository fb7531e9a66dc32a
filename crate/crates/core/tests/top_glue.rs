mod common;

use std::sync::Arc;

use common::{agrees_with_oracle, glue_oracle, two_origins_data};
use glue_core::gen::Sampler;
use glue_core::index::GlueObject;
use glue_core::space::{ContinuousMap, FinSpace, PointSet, Space};
use glue_core::top_glue::{
    count_mediating, cover_functor, data_from_functor, functor_from_data, is_cone, legs_from_charts, standard_representative,
    verify_glued, TopVariant,
};
use proptest::prelude::*;

fn variant(otop: bool) -> TopVariant {
    if otop {
        TopVariant::OTop
    } else {
        TopVariant::Top
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standard_representative_matches_quotient_oracle(seed in any::<u64>(), otop in any::<bool>()) {
        let mut s = Sampler::new(seed);
        let g = s.top_instance(5, 3, variant(otop)).functor;
        let data = data_from_functor(&g).unwrap();
        let glued = standard_representative(&g).unwrap();
        prop_assert!(agrees_with_oracle(&glue_oracle(&data), &glued));
        let report = verify_glued(&glued.q, &glued.iota, &g);
        prop_assert!(report.verdict, "{:?}", report.conditions);
        prop_assert!(report.conditions.values().all(|&b| b), "{:?}", report.conditions);
    }

    #[test]
    fn cover_gluing_recovers_the_ambient_space(seed in any::<u64>(), otop in any::<bool>()) {
        let mut s = Sampler::new(seed);
        let inst = s.top_instance(5, 3, variant(otop));
        let glued = standard_representative(&inst.functor).unwrap();
        prop_assert_eq!(glued.q.points(), inst.ambient.points());
        prop_assert_eq!(glued.q.opens().len(), inst.ambient.opens().len());
        // every chart image is open and the charts cover
        let images: Vec<PointSet> = (0..inst.cover.len())
            .map(|i| { let f = &glued.iota[&GlueObject::Single(i)]; f.image(f.dom().full()) })
            .collect();
        prop_assert!(images.iter().all(|&u| glued.q.is_open(u)));
        prop_assert_eq!(images.iter().fold(PointSet::EMPTY, |a, &u| a.union(u)), glued.q.full());
    }

    #[test]
    fn relabelled_candidate_is_glued(seed in any::<u64>(), otop in any::<bool>()) {
        let mut s = Sampler::new(seed);
        let g = s.top_instance(5, 3, variant(otop)).functor;
        let glued = standard_representative(&g).unwrap();
        let perm = s.permutation(glued.q.points());
        let copy: Space = Arc::new(glued.q.relabel(&perm));
        let h = ContinuousMap::new(glued.q.clone(), copy.clone(), perm).unwrap();
        let charts: Vec<ContinuousMap> =
            (0..g.n()).map(|i| glued.iota[&GlueObject::Single(i)].then(&h).unwrap()).collect();
        let legs = legs_from_charts(&g, &charts).unwrap();
        prop_assert!(verify_glued(&copy, &legs, &g).verdict);
    }
}

#[test]
fn two_origins_quotient() {
    let data = two_origins_data();
    let g = functor_from_data(&data).unwrap();
    let glued = standard_representative(&g).unwrap();
    assert_eq!(glued.q.points(), 3);
    assert_eq!(glued.q.opens().len(), 5);
    assert!(agrees_with_oracle(&glue_oracle(&data), &glued));
    // the two origins are distinct points that no open separates from the shared point
    let origins: Vec<usize> = (0..2).map(|i| glued.iota[&GlueObject::Single(i)].apply(1)).collect();
    assert_ne!(origins[0], origins[1]);
}

#[test]
fn indiscrete_candidate_fails() {
    let g = functor_from_data(&two_origins_data()).unwrap();
    let glued = standard_representative(&g).unwrap();
    let flat: Space = Arc::new(FinSpace::indiscrete(3));
    let charts: Vec<ContinuousMap> = (0..2)
        .map(|i| {
            let f = &glued.iota[&GlueObject::Single(i)];
            ContinuousMap::new(f.dom().clone(), flat.clone(), f.assignment().to_vec()).unwrap()
        })
        .collect();
    let legs = legs_from_charts(&g, &charts).unwrap();
    let report = verify_glued(&flat, &legs, &g);
    assert!(!report.verdict);
    assert!(!report.conditions["e"]);
}

#[test]
fn collapsed_origins_are_not_glued() {
    let g = functor_from_data(&two_origins_data()).unwrap();
    let glued = standard_representative(&g).unwrap();
    let line: Space = Arc::new(FinSpace::sierpinski());
    let charts: Vec<ContinuousMap> = (0..2)
        .map(|i| ContinuousMap::new(glued.iota[&GlueObject::Single(i)].dom().clone(), line.clone(), vec![0, 1]).unwrap())
        .collect();
    let legs = legs_from_charts(&g, &charts).unwrap();
    let report = verify_glued(&line, &legs, &g);
    for key in ["a", "b", "c", "d", "e"] {
        assert!(report.conditions[key], "{key}");
    }
    assert!(!report.conditions["overlap_law"]);
    assert!(!report.verdict);
    // it is a cone, so it factors uniquely through the glued space
    let cone = glue_core::top_glue::TopCone { apex: line, legs };
    assert!(is_cone(&cone, &g).unwrap().all());
    assert_eq!(count_mediating(&cone, &glued.q, &glued.iota, &g, 1 << 20), Some(1));
}

#[test]
fn cover_must_be_open_for_otop() {
    let s: Space = Arc::new(FinSpace::sierpinski());
    let closed = PointSet::singleton(1);
    assert!(cover_functor(&s, &[closed, s.full()], TopVariant::OTop).is_err());
    assert!(cover_functor(&s, &[closed, s.full()], TopVariant::Top).is_ok());
    assert!(cover_functor(&s, &[PointSet::singleton(0)], TopVariant::Top).is_err());
}

#[test]
fn broken_cocycle_is_rejected() {
    let mut s = Sampler::new(11);
    for _ in 0..200 {
        let g = s.top_instance(5, 3, TopVariant::Top).functor;
        let mut d = data_from_functor(&g).unwrap();
        let Some((i, j)) = (0..d.n()).flat_map(|i| (0..d.n()).map(move |j| (i, j))).find(|&(i, j)| i != j && d.transitions[i][j].dom().points() >= 2)
        else {
            continue;
        };
        let phi = &d.transitions[i][j];
        let mut assign = phi.assignment().to_vec();
        assign.swap(0, 1);
        let broken = ContinuousMap::new(phi.dom().clone(), phi.cod().clone(), assign.clone()).unwrap();
        if broken == *phi {
            continue;
        }
        d.transitions[i][j] = broken;
        assert!(d.validate().is_err() || functor_from_data(&d).is_err());
        return;
    }
    panic!("no instance with a two-point overlap");
}
