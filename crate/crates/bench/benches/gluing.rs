use criterion::{black_box, criterion_group, criterion_main, Criterion};
use glue_core::gen::Sampler;
use glue_core::group::snf;
use glue_core::index::GluingIndexCategory;
use glue_core::ringed::{glue_ringed, RingedGluingFunctor, RingedVariant};
use glue_core::sheaf_glue::{build_limit_sheaf, sheaf_functor_from_data};
use glue_core::top_glue::{standard_representative, TopVariant};

fn index(c: &mut Criterion) {
    c.bench_function("index_category_n4", |b| b.iter(|| GluingIndexCategory::new(black_box(4)).unwrap()));
}

fn top(c: &mut Criterion) {
    let mut s = Sampler::new(1);
    let instances: Vec<_> = (0..16).map(|_| s.top_instance(6, 4, TopVariant::OTop).functor).collect();
    c.bench_function("standard_representative", |b| {
        b.iter(|| instances.iter().map(|g| standard_representative(g).unwrap().q.points()).sum::<usize>())
    });
}

fn sheaf(c: &mut Criterion) {
    let mut s = Sampler::new(2);
    let functors: Vec<_> = (0..8).map(|_| sheaf_functor_from_data(&s.sheaf_data(4, 3, 3)).unwrap()).collect();
    c.bench_function("build_limit_sheaf", |b| b.iter(|| functors.iter().map(|g| build_limit_sheaf(g).unwrap().sheaf.opens().len()).sum::<usize>()));
}

fn ringed(c: &mut Criterion) {
    let mut s = Sampler::new(3);
    let functors: Vec<_> =
        (0..8).map(|_| RingedGluingFunctor::new(s.ringed_data(4, 3, RingedVariant::Lrts)).unwrap()).collect();
    c.bench_function("glue_ringed", |b| b.iter(|| functors.iter().map(|g| glue_ringed(g).unwrap().ringed.space.points()).sum::<usize>()));
}

fn smith(c: &mut Criterion) {
    let mut s = Sampler::new(4);
    let matrices: Vec<_> = (0..32).map(|_| s.int_matrix(6, 6, 50)).collect();
    c.bench_function("snf_6x6", |b| b.iter(|| matrices.iter().map(|a| snf(a).s.rows()).sum::<usize>()));
}

criterion_group!(benches, index, top, sheaf, ringed, smith);
criterion_main!(benches);
