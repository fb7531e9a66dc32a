//! Acceptance run: one PASS/FAIL line per criterion with its wall time against the budget.
//! Plain `main` so the lines are printed on every run, not only on failure.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use glue_core::gen::Sampler;
use glue_core::group::{snf, AbHom, IntMatrix};
use glue_core::index::{GlueObject, GluingIndexCategory};
use glue_core::pipeline::{run_text, PipelineOptions};
use glue_core::presheaf::EnrichedMorphism;
use glue_core::ring::{all_homs, FinCommRing};
use glue_core::ringed::{check_stalk_colimit, check_stalk_lemma, glue_ringed, stalk_hom, CoCone, RingedGluingFunctor, RingedVariant};
use glue_core::sheaf_glue::{
    build_limit_sheaf, canonical_twist, data_from_sheaf_functor, sheaf_functor_from_data, transport, verify_sheaf_glued,
};
use glue_core::space::PointSet;
use glue_core::top_glue::{
    count_mediating, data_from_functor, functor_from_data, is_cone, mediating_morphism, standard_representative, verify_glued,
    TopVariant,
};
use glue_core::doc::{ringed_document, sheaf_document, top_document};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

use common::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn census() -> Outcome {
    for (n, objects, morphisms) in [(1, 1, Some(1)), (2, 4, Some(10)), (3, 12, None)] {
        let cat = GluingIndexCategory::new(n).map_err(|e| e.to_string())?;
        let oracle = IndexOracle::new(n);
        ensure(cat.objects().len() == objects, || format!("n={n}: {} objects", cat.objects().len()))?;
        ensure(oracle.classes.len() == objects, || format!("n={n}: oracle has {} objects", oracle.classes.len()))?;
        ensure(cat.morphism_count() == oracle.morphisms(), || format!("n={n}: {} morphisms vs oracle {}", cat.morphism_count(), oracle.morphisms()))?;
        if let Some(m) = morphisms {
            ensure(cat.morphism_count() == m, || format!("n={n}: {} morphisms", cat.morphism_count()))?;
        }
    }
    Ok("n=1: 1/1, n=2: 4/10, n=3: 12 objects".into())
}

fn hom_support() -> Outcome {
    let mut pairs = 0;
    for n in 1..=4 {
        let cat = GluingIndexCategory::new(n).map_err(|e| e.to_string())?;
        let oracle = IndexOracle::new(n);
        for a in cat.objects() {
            for b in cat.objects() {
                let lib = cat.hom_exists(a, b);
                let closure = oracle.reach[oracle.position(a)][oracle.position(b)];
                let support = a.support() & !b.support() == 0;
                ensure(lib == closure && closure == support, || format!("n={n} {a:?}->{b:?}: lib {lib}, closure {closure}, support {support}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} object pairs for n<=4"))
}

fn two_origins() -> Outcome {
    let data = two_origins_data();
    let g = functor_from_data(&data).map_err(|e| e.to_string())?;
    let glued = standard_representative(&g).map_err(|e| e.to_string())?;
    ensure(glued.q.points() == 3 && glued.q.opens().len() == 5, || format!("Q has {} points, {} opens", glued.q.points(), glued.q.opens().len()))?;
    let report = verify_glued(&glued.q, &glued.iota, &g);
    for key in ["a", "b", "c", "d", "e", "final_topology", "overlap_law"] {
        ensure(report.conditions[key], || format!("condition {key} fails"))?;
    }
    ensure(report.verdict, || "verdict false".into())?;
    ensure(agrees_with_oracle(&glue_oracle(&data), &glued), || "quotient oracle disagrees".into())?;
    Ok("Q: 3 points, 5 opens; a-e, final_topology, overlap_law hold".into())
}

fn round_trips(seed: u64) -> Outcome {
    let mut s = Sampler::new(seed);
    for k in 0..200 {
        let variant = if k % 2 == 0 { TopVariant::OTop } else { TopVariant::Top };
        let g = s.top_instance(5, 3, variant).functor;
        let d = data_from_functor(&g).map_err(|e| format!("top {k}: {e}"))?;
        let back = functor_from_data(&d).map_err(|e| format!("top {k}: {e}"))?;
        ensure(back == g, || format!("top {k}: functor -> data -> functor differs"))?;
        let again = data_from_functor(&back).map_err(|e| format!("top {k}: {e}"))?;
        ensure(again == d, || format!("top {k}: data -> functor -> data differs"))?;
    }
    for k in 0..200 {
        let d = s.sheaf_data(4, 3, 3);
        let g = sheaf_functor_from_data(&d).map_err(|e| format!("sheaf {k}: {e}"))?;
        let back = data_from_sheaf_functor(&g).map_err(|e| format!("sheaf {k}: {e}"))?;
        ensure(back == d, || format!("sheaf {k}: data -> functor -> data differs"))?;
        let again = sheaf_functor_from_data(&back).map_err(|e| format!("sheaf {k}: {e}"))?;
        ensure(again == g, || format!("sheaf {k}: functor -> data -> functor differs"))?;
    }
    Ok("200 top and 200 sheaf instances".into())
}

fn universal_property(seed: u64) -> Outcome {
    let mut s = Sampler::new(seed);
    let mut cones = 0;
    for k in 0..100 {
        let variant = if k % 2 == 0 { TopVariant::OTop } else { TopVariant::Top };
        let g = s.top_instance(5, 3, variant).functor;
        let glued = standard_representative(&g).map_err(|e| format!("functor {k}: {e}"))?;
        ensure(glued.q.points() <= 5, || format!("functor {k}: Q has {} points", glued.q.points()))?;
        for c in 0..100 {
            let cone = s.cone(&glued, variant, 2);
            let mu = mediating_morphism(&cone, &glued.q, &glued.iota, &g).map_err(|e| format!("functor {k} cone {c}: {e}"))?;
            let ok = (0..g.n()).all(|i| commutes(&mu, &glued.iota[&GlueObject::Single(i)], &cone.legs[&GlueObject::Single(i)]));
            ensure(ok, || format!("functor {k} cone {c}: mediating map does not commute"))?;
            let count = count_mediating(&cone, &glued.q, &glued.iota, &g, u64::MAX);
            ensure(count == Some(1), || format!("functor {k} cone {c}: {count:?} mediating maps"))?;
            cones += 1;
        }
    }
    Ok(format!("{cones} cones, each with exactly one mediating map"))
}

fn cone_agreement(seed: u64) -> Outcome {
    let mut s = Sampler::new(seed);
    let (mut corrupted, mut rejected) = (0, 0);
    for k in 0..50 {
        let variant = if k % 2 == 0 { TopVariant::OTop } else { TopVariant::Top };
        let g = s.top_instance(5, 3, variant).functor;
        let glued = standard_representative(&g).map_err(|e| e.to_string())?;
        for f in 0..20 {
            let (cone, broken) = s.leg_family(&glued, variant);
            let check = is_cone(&cone, &g).map_err(|e| e.to_string())?;
            // Generator squares checked directly: leg_dom ∘ G(f) = leg_cod.
            let direct = g.arrows().iter().all(|(gen, arrow)| {
                arrow.then(&cone.legs[&gen.dom()]).map(|m| m == cone.legs[&gen.cod()]).unwrap_or(false)
            });
            ensure(check.agree() && check.full_diagram == direct, || format!("functor {k} family {f}: {check:?}, direct {direct}"))?;
            ensure(broken || check.all(), || format!("functor {k} family {f}: valid cone rejected"))?;
            corrupted += usize::from(broken);
            rejected += usize::from(!check.all());
        }
    }
    Ok(format!("1000 families, {corrupted} perturbed, {rejected} not cones"))
}

fn sheaf_limit(seed: u64) -> Outcome {
    let mut s = Sampler::new(seed);
    let (mut twisted, mut corruptions, mut oracle_checked) = (0, 0, 0);
    for k in 0..100 {
        let d = s.sheaf_data(4, 3, 4);
        let g = sheaf_functor_from_data(&d).map_err(|e| format!("{k}: {e}"))?;
        let limit = build_limit_sheaf(&g).map_err(|e| format!("{k}: {e}"))?;
        ensure(limit.sheaf.is_sheaf(), || format!("{k}: L is not a sheaf"))?;
        ensure(limit.projections.iter().all(EnrichedMorphism::is_natural), || format!("{k}: projection not natural"))?;
        for &v in limit.sheaf.opens() {
            if let Some(count) = limit_order_by_enumeration(&g, v, 20_000) {
                let order = limit.sheaf.sections(v).order();
                ensure(order == Some(BigInt::from(count)), || format!("{k}: |L({v})| = {order:?}, oracle {count}"))?;
                oracle_checked += 1;
            }
        }
        let report = verify_sheaf_glued(&limit.sheaf, &limit.projections, &g, &limit).map_err(|e| e.to_string())?;
        ensure(report.verdict, || format!("{k}: (L, pi) rejected: {:?}", report.conditions))?;

        let (canon, psi) = canonical_twist(&limit.sheaf).map_err(|e| e.to_string())?;
        let isos: HashMap<PointSet, (AbHom, AbHom)> =
            limit.sheaf.opens().iter().map(|&v| (v, s.represent(limit.sheaf.sections(v)))).collect();
        let (random, phi) = transport(&limit.sheaf, &isos).map_err(|e| e.to_string())?;
        for (copy, iso) in [(canon, psi), (random, phi)] {
            let moved: Vec<EnrichedMorphism> =
                limit.projections.iter().map(|p| iso.then(p)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            let r = verify_sheaf_glued(&copy, &moved, &g, &limit).map_err(|e| e.to_string())?;
            ensure(r.verdict, || format!("{k}: twisted copy rejected: {:?}", r.conditions))?;
            twisted += 1;
        }

        let nonzero: Vec<(usize, PointSet)> = (0..g.n())
            .flat_map(|i| limit.sheaf.opens().iter().map(move |&v| (i, v)))
            .filter(|&(i, v)| !limit.projections[i].component(v).is_zero())
            .collect();
        if let Some(&(i, v)) = nonzero.choose(s.rng()) {
            let p = &limit.projections[i];
            let zero = AbHom::zero(p.component(v).dom().clone(), p.component(v).cod().clone());
            let mut broken = limit.projections.clone();
            broken[i] = p.with_component(v, zero).map_err(|e| e.to_string())?;
            let r = verify_sheaf_glued(&limit.sheaf, &broken, &g, &limit).map_err(|e| e.to_string())?;
            ensure(!r.verdict, || format!("{k}: corruption of projection {i} at {v} accepted"))?;
            corruptions += 1;
        }
    }
    Ok(format!("100 instances, {twisted} twisted copies, {corruptions} corruptions rejected, {oracle_checked} opens counted"))
}

fn snf_suite(seed: u64) -> Outcome {
    let check = |a: &IntMatrix| -> Result<(), String> {
        let f = snf(a);
        ensure(f.u.mul(a).mul(&f.v) == f.s, || format!("U A V != S for {a:?}"))?;
        ensure(f.u.mul(&f.u_inv) == IntMatrix::identity(a.rows()), || "U not invertible".into())?;
        ensure(f.v.mul(&f.v_inv) == IntMatrix::identity(a.cols()), || "V not invertible".into())?;
        let s = to_i128(&f.s);
        for (r, row) in s.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                ensure(r == c || x == 0, || "S not diagonal".into())?;
            }
        }
        let diag: Vec<BigInt> = f.diagonal();
        for w in diag.windows(2) {
            ensure(w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()), || format!("chain broken: {diag:?}"))?;
        }
        ensure(diag.iter().all(|x| *x >= BigInt::zero()), || format!("negative factor: {diag:?}"))?;
        let nonzero: Vec<i128> = diag.iter().filter(|x| !x.is_zero()).map(|x| i128::try_from(x.clone()).expect("small")).collect();
        let rows = a.to_i64_rows().map_err(|e| e.to_string())?;
        let minors = invariant_factors_by_minors(&rows);
        ensure(nonzero == minors, || format!("factors {nonzero:?}, minors {minors:?}"))?;
        Ok(())
    };
    let d = snf(&IntMatrix::diagonal(&[2, 3]));
    ensure(d.diagonal() == vec![BigInt::one(), BigInt::from(6)], || format!("diag(2,3) -> {:?}", d.diagonal()))?;
    check(&IntMatrix::diagonal(&[2, 3]))?;
    let mut s = Sampler::new(seed);
    for _ in 0..500 {
        let rows = s.rng().gen_range(1..=6);
        let cols = s.rng().gen_range(1..=6);
        let a = s.int_matrix(rows, cols, 9);
        check(&a)?;
    }
    Ok("500 matrices; diag(2,3) -> diag(1,6)".into())
}

fn stalks(seed: u64) -> Outcome {
    ensure(FinCommRing::zmod(4).is_local() && local_by_units(&FinCommRing::zmod(4)), || "Z/4 not local".into())?;
    ensure(!FinCommRing::zmod(6).is_local() && !local_by_units(&FinCommRing::zmod(6)), || "Z/6 local".into())?;
    let mut s = Sampler::new(seed);
    let targets: Vec<Arc<FinCommRing>> =
        [FinCommRing::zmod(2), FinCommRing::zmod(4), FinCommRing::gf4(), FinCommRing::zmod(8)].into_iter().map(Arc::new).collect();
    let mut points = 0;
    for k in 0..120 {
        let variant = if k % 2 == 0 { RingedVariant::Rts } else { RingedVariant::Lrts };
        let d = s.ringed_data(4, 3, variant);
        let g = RingedGluingFunctor::new(d).map_err(|e| format!("{k}: {e}"))?;
        let glued = glue_ringed(&g).map_err(|e| format!("{k}: {e}"))?;
        check_stalk_lemma(&glued).map_err(|e| format!("{k}: {e}"))?;
        for (i, p) in glued.projections.iter().enumerate() {
            for x in 0..p.source.space.points() {
                let h = stalk_hom(p, x);
                ensure(h.is_bijective() && h.inverse().is_some(), || format!("{k}: chart {i} point {x} stalk map not an iso"))?;
                points += 1;
            }
        }
        let q = &glued.ringed;
        for x in 0..q.space.points() {
            let stalk = q.stalk(x);
            ensure(stalk.ring.is_local() == local_by_units(&stalk.ring), || format!("{k}: locality disagrees at {x}"))?;
            let mut cocones = Vec::new();
            for t in &targets {
                if let Some(h) = all_homs(&stalk.ring, t).choose(s.rng()) {
                    let maps = stalk.germs.iter().map(|(&v, germ)| (v, germ.then(h).expect("typed"))).collect();
                    cocones.push(CoCone { apex: t.clone(), maps });
                }
            }
            ensure(check_stalk_colimit(q, &stalk, &cocones), || format!("{k}: stalk at {x} is not the colimit"))?;
        }
        if variant == RingedVariant::Lrts {
            ensure(q.is_locally_ringed(), || format!("{k}: LRTS gluing not locally ringed"))?;
            for x in 0..q.space.points() {
                ensure(local_by_units(&q.stalk(x).ring), || format!("{k}: stalk at {x} not local"))?;
            }
            for p in &glued.projections {
                for x in 0..p.source.space.points() {
                    ensure(stalk_hom(p, x).is_local(), || format!("{k}: stalk map at {x} not local"))?;
                }
            }
        }
    }
    Ok(format!("120 gluings, {points} chart stalks; Z/4 local, Z/6 not"))
}

/// Numbers in a JSON value, addressed by pointer.
fn number_pointers(v: &Value, at: String, out: &mut Vec<String>) {
    match v {
        Value::Number(_) => out.push(at),
        Value::Array(xs) => xs.iter().enumerate().for_each(|(i, x)| number_pointers(x, format!("{at}/{i}"), out)),
        Value::Object(m) => m.iter().for_each(|(k, x)| number_pointers(x, format!("{at}/{}", k.replace('~', "~0").replace('/', "~1")), out)),
        _ => {}
    }
}

fn no_falsification(seed: u64) -> Outcome {
    let mut s = Sampler::new(seed);
    let mut docs: Vec<Value> = Vec::new();
    for k in 0..60 {
        let variant = if k % 2 == 0 { TopVariant::OTop } else { TopVariant::Top };
        let g = s.top_instance(5, 3, variant).functor;
        docs.push(top_document(&data_from_functor(&g).map_err(|e| e.to_string())?, None));
    }
    for _ in 0..60 {
        docs.push(sheaf_document(&s.sheaf_data(4, 3, 3)));
    }
    for k in 0..60 {
        let variant = if k % 2 == 0 { RingedVariant::Rts } else { RingedVariant::Lrts };
        docs.push(ringed_document(&s.ringed_data(4, 3, variant)));
    }
    let opts = PipelineOptions { seed, cones: 8 };
    // a panic is reported as its own failure, not as an exit code
    let exit = |text: &str| -> Result<(i32, String), String> {
        match std::panic::catch_unwind(|| run_text(text, &opts)) {
            Ok(Ok(run)) => Ok((run.report.exit_code(), String::new())),
            Ok(Err(e)) => Ok((e.exit_code(), e.to_string())),
            Err(_) => Err(format!("panic on {text}")),
        }
    };
    let mut codes = [0usize; 4];
    for (k, doc) in docs.iter().enumerate() {
        let (code, msg) = exit(&doc.to_string())?;
        ensure(code == 0, || format!("document {k} exits {code}: {msg}"))?;
        codes[0] += 1;
        let mut pointers = Vec::new();
        number_pointers(&doc["payload"], "/payload".into(), &mut pointers);
        for _ in 0..3 {
            let Some(p) = pointers.choose(s.rng()) else { break };
            let mut bad = doc.clone();
            let slot = bad.pointer_mut(p).expect("pointer from walk");
            let x = slot.as_i64().unwrap_or(0);
            *slot = Value::from(x + s.rng().gen_range(1..=2));
            let (code, msg) = exit(&bad.to_string())?;
            ensure(code != 3, || format!("corrupted document {k} at {p} falsified: {msg}"))?;
            codes[code as usize] += 1;
        }
    }
    Ok(format!("{} runs; exit codes 0/1/2/3: {}/{}/{}/{}", codes.iter().sum::<usize>(), codes[0], codes[1], codes[2], codes[3]))
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|_| {}));
    let seed = glue_core::gen::seed_from_env();
    let criteria: Vec<(&str, u64, Box<dyn FnOnce() -> Outcome>)> = vec![
        ("index census", 1, Box::new(census)),
        ("hom iff support inclusion", 5, Box::new(hom_support)),
        ("two origins", 1, Box::new(two_origins)),
        ("data/functor round trips", 30, Box::new(move || round_trips(seed))),
        ("universal property", 120, Box::new(move || universal_property(seed ^ 1))),
        ("cone characterizations agree", 30, Box::new(move || cone_agreement(seed ^ 2))),
        ("sheaf limit", 120, Box::new(move || sheaf_limit(seed ^ 3))),
        ("smith normal form", 10, Box::new(move || snf_suite(seed ^ 4))),
        ("stalks and locality", 60, Box::new(move || stalks(seed ^ 5))),
        ("no falsification on corpus", 120, Box::new(move || no_falsification(seed ^ 6))),
    ];
    println!("acceptance (seed {seed})");
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > Duration::from_secs(budget) => Err(format!("{detail}; over budget of {budget}s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({:.2}s / {budget}s): {detail}", k + 1, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({:.2}s / {budget}s): {why}", k + 1, took.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} failing");
        ExitCode::FAILURE
    }
}
