mod common;

use std::sync::Arc;

use common::{limit_order_by_enumeration, TWO_ORIGINS_SHEAF};
use glue_core::doc::{parse_document, GluingDocument};
use glue_core::gen::Sampler;
use glue_core::group::AbHom;
use glue_core::presheaf::EnrichedMorphism;
use glue_core::sheaf_glue::{
    build_limit_sheaf, extend_section, sheaf_functor_from_data, verify_sheaf_glued, SheafGluingData,
};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;

fn fixture() -> SheafGluingData {
    match parse_document(TWO_ORIGINS_SHEAF).expect("fixture parses") {
        GluingDocument::Sheaf { data } => data,
        _ => panic!("fixture kind"),
    }
}

#[test]
fn two_origins_constant_sheaf_has_connected_global_sections() {
    let g = sheaf_functor_from_data(&fixture()).unwrap();
    let limit = build_limit_sheaf(&g).unwrap();
    assert!(limit.sheaf.is_sheaf());
    let global = limit.sheaf.sections(g.base().full());
    assert_eq!(global.free_rank(), 1);
    assert!(global.invariant_factors().is_empty());
    let report = verify_sheaf_glued(&limit.sheaf, &limit.projections, &g, &limit).unwrap();
    assert!(report.verdict, "{:?}", report.conditions);
}

#[test]
fn broken_transition_is_rejected() {
    let mut s = Sampler::new(11);
    let mut broken_count = 0;
    for _ in 0..40 {
        let mut d = s.sheaf_data(4, 3, 3);
        let n = d.n();
        let target = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .flat_map(|(i, j)| {
                let t = &d.transitions[i][j];
                t.source().opens().iter().map(move |&w| (i, j, w)).collect::<Vec<_>>()
            })
            .find(|&(i, j, w)| !d.transitions[i][j].component(w).dom().is_trivial());
        let Some((i, j, w)) = target else { continue };
        let t = &d.transitions[i][j];
        let zero = AbHom::zero(t.component(w).dom().clone(), t.component(w).cod().clone());
        d.transitions[i][j] = t.with_component(w, zero).unwrap();
        assert!(d.validate().is_err());
        assert!(sheaf_functor_from_data(&d).is_err());
        broken_count += 1;
    }
    assert!(broken_count > 10);
}

#[test]
fn cover_of_one_sheaf_glues_back_to_it() {
    let mut s = Sampler::new(5);
    for _ in 0..30 {
        let base = s.space(4);
        let cover = s.open_cover(&base, 3);
        let f = Arc::new(s.sheaf(&base, 3));
        let d = SheafGluingData::from_sheaf(&f, cover.clone()).unwrap();
        let g = sheaf_functor_from_data(&d).unwrap();
        let limit = build_limit_sheaf(&g).unwrap();
        let projections: Vec<EnrichedMorphism> =
            cover.iter().map(|&u| EnrichedMorphism::restriction(f.clone(), u).unwrap()).collect();
        let report = verify_sheaf_glued(&f, &projections, &g, &limit).unwrap();
        assert!(report.verdict, "{:?}", report.conditions);
    }
}

#[test]
fn extension_is_refused_outside_the_chart() {
    let g = sheaf_functor_from_data(&fixture()).unwrap();
    let limit = build_limit_sheaf(&g).unwrap();
    let full = g.base().full();
    let s = vec![BigInt::from(1)];
    assert!(extend_section(&g, &limit, 0, full, &s).is_none());
    assert!(extend_section(&g, &limit, 7, full, &s).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn limit_order_matches_enumeration(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let g = sheaf_functor_from_data(&s.sheaf_data(4, 3, 3)).unwrap();
        let limit = build_limit_sheaf(&g).unwrap();
        for &v in limit.sheaf.opens() {
            if let Some(count) = limit_order_by_enumeration(&g, v, 5_000) {
                prop_assert_eq!(limit.sheaf.sections(v).order(), Some(BigInt::from(count)));
            }
        }
    }

    #[test]
    fn extended_sections_project_to_transported_restrictions(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let g = sheaf_functor_from_data(&s.sheaf_data(4, 3, 3)).unwrap();
        let limit = build_limit_sheaf(&g).unwrap();
        let cover = g.cover();
        for (i, &ui) in cover.iter().enumerate() {
            for &v in limit.sheaf.opens().iter().filter(|v| v.is_subset(ui)) {
                let chart = g.chart(i);
                let ambient = chart.sections(v).ambient();
                let sec: Vec<BigInt> = (0..ambient).map(|_| BigInt::from(s.rng().gen_range(-9..=9))).collect();
                let e = extend_section(&g, &limit, i, v, &sec).expect("sections of charts extend");
                prop_assert_eq!(e.len(), limit.sheaf.sections(v).ambient());
                for (j, &uj) in cover.iter().enumerate() {
                    let w = v.intersection(uj);
                    let got = limit.projections[j].component(v).apply(&e);
                    let want = g.transition(i, j).component(w).apply(&chart.restriction(v, w).apply(&sec));
                    prop_assert!(g.chart(j).sections(w).elements_equal(&got, &want), "chart {} -> {} at {}", i, j, v);
                }
            }
        }
    }
}
