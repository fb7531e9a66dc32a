//! Seeded generators of valid instances and single-field corruptions.
//!
//! Valid data is always built from an ambient object cut along a random open cover
//! and then re-presented (point relabelings, group presentations, ring automorphisms),
//! so the cocycle conditions hold by construction.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::group::{AbHom, FgAbGroup, Group, IntMatrix};
use crate::index::GlueObject;
use crate::presheaf::{direct_sum, locally_constant, skyscraper, EnrichedMorphism, Presheaf, PresheafRef};
use crate::ring::{automorphisms, FinCommRing, Ring, RingHom};
use crate::ringed::{RingSheaf, RingedGluingData, RingedMorphism, RingedSpace, RingedVariant};
use crate::sheaf_glue::{transport, SheafGluingData};
use crate::space::{coproduct, ContinuousMap, FinSpace, PointSet, Space};
use crate::top_glue::{cover_functor, relabel_functor, GluedSpace, TopCone, TopGluingFunctor, TopVariant};

/// Default seed when `GLUE_SEED` is unset.
pub const DEFAULT_SEED: u64 = 0x5eed_91e5;

/// `GLUE_SEED` if set and numeric, else the default.
pub fn seed_from_env() -> u64 {
    std::env::var("GLUE_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

/// A generated topological instance: the ambient space, the cover it was cut along,
/// and the relabelled functor.
#[derive(Debug, Clone)]
pub struct TopInstance {
    pub ambient: Space,
    pub cover: Vec<PointSet>,
    pub functor: TopGluingFunctor,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A space on `1..=max_points` points generated by a random subbasis.
    pub fn space(&mut self, max_points: usize) -> Space {
        let points = self.rng.gen_range(1..=max_points.max(1));
        let k = self.rng.gen_range(0..=2 * points);
        let sets: Vec<PointSet> = (0..k).map(|_| PointSet(self.rng.gen_range(0..1u64 << points))).collect();
        Arc::new(FinSpace::from_subbasis(points, &sets).expect("small subbasis"))
    }

    /// A cover by exactly `n` nonempty opens for a random `n ≤ max_members`.
    pub fn open_cover(&mut self, space: &Space, max_members: usize) -> Vec<PointSet> {
        let nonempty: Vec<PointSet> = space.opens().iter().copied().filter(|o| !o.is_empty()).collect();
        let n = self.rng.gen_range(1..=max_members.max(1));
        let mut cover: Vec<PointSet> = (0..n - 1).map(|_| *nonempty.choose(&mut self.rng).expect("nonempty space")).collect();
        let covered = cover.iter().fold(PointSet::EMPTY, |a, c| a.union(*c));
        let rest = space.full().difference(covered);
        let last = if rest.is_empty() {
            *nonempty.choose(&mut self.rng).expect("nonempty space")
        } else {
            rest.iter().fold(PointSet::EMPTY, |a, x| a.union(space.minimal_open(x)))
        };
        cover.push(last);
        cover
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut self.rng);
        p
    }

    /// A valid gluing functor: a cover functor with every object relabelled.
    pub fn top_instance(&mut self, max_points: usize, max_charts: usize, variant: TopVariant) -> TopInstance {
        let ambient = self.space(max_points);
        let cover = self.open_cover(&ambient, max_charts);
        let (g, _) = cover_functor(&ambient, &cover, variant).expect("open cover");
        let perms: BTreeMap<GlueObject, Vec<usize>> =
            g.objects().iter().map(|(a, s)| (*a, self.permutation(s.points()))).collect();
        TopInstance { ambient, cover, functor: relabel_functor(&g, &perms) }
    }

    /// A morphism out of `q` usable as a cone apex map: an open embedding into a
    /// coproduct for OTop, a random continuous map for Top.
    pub fn apex_map(&mut self, q: &Space, variant: TopVariant, max_extra: usize) -> ContinuousMap {
        if variant == TopVariant::OTop || self.rng.gen_bool(0.3) {
            let perm = self.permutation(q.points());
            let copy: Space = Arc::new(q.relabel(&perm));
            let extra = self.space(max_extra);
            let (_, inj) = coproduct(&[copy.clone(), extra]).expect("small spaces");
            let relabel = ContinuousMap::new(q.clone(), copy, perm).expect("permutation");
            return relabel.then(&inj[0]).expect("typed");
        }
        let apex = self.space(max_extra + 1);
        for _ in 0..100 {
            let assign: Vec<usize> = (0..q.points()).map(|_| self.rng.gen_range(0..apex.points())).collect();
            let h = ContinuousMap::new(q.clone(), apex.clone(), assign).expect("in range");
            if h.is_continuous() {
                return h;
            }
        }
        ContinuousMap::constant(q.clone(), apex, 0)
    }

    /// A cone through the standard representative.
    pub fn cone(&mut self, glued: &GluedSpace, variant: TopVariant, max_extra: usize) -> TopCone {
        let h = self.apex_map(&glued.q, variant, max_extra);
        TopCone::through(&glued.iota, &h).expect("typed")
    }

    /// Legs of a cone, moved at one point of one object with probability one half; the
    /// result may still be a cone when that point lies outside every overlap.
    pub fn leg_family(&mut self, glued: &GluedSpace, variant: TopVariant) -> (TopCone, bool) {
        let mut cone = self.cone(glued, variant, 2);
        if self.rng.gen_bool(0.5) || cone.apex.points() < 2 {
            return (cone, false);
        }
        let keys: Vec<GlueObject> = cone.legs.keys().copied().filter(|a| cone.legs[a].dom().points() > 0).collect();
        let a = *keys.choose(&mut self.rng).expect("nonempty chart");
        let leg = &cone.legs[&a];
        let mut assign = leg.assignment().to_vec();
        let x = self.rng.gen_range(0..assign.len());
        let shift = self.rng.gen_range(1..cone.apex.points());
        assign[x] = (assign[x] + shift) % cone.apex.points();
        let broken = ContinuousMap::new(leg.dom().clone(), leg.cod().clone(), assign).expect("in range");
        cone.legs.insert(a, broken);
        (cone, true)
    }

    /// A random unimodular `n × n` matrix and its inverse.
    pub fn unimodular(&mut self, n: usize) -> (IntMatrix, IntMatrix) {
        let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        let mut inv = m.clone();
        for _ in 0..(2 * n) {
            if n < 2 {
                break;
            }
            let a = self.rng.gen_range(0..n);
            let b = (a + self.rng.gen_range(1..n)) % n;
            let c: i64 = *[-2, -1, 1, 2].choose(&mut self.rng).expect("nonempty");
            // row a += c row b; the inverse gets column b -= c column a
            for k in 0..n {
                m[a][k] += c * m[b][k];
            }
            for row in inv.iter_mut() {
                row[b] -= c * row[a];
            }
        }
        (IntMatrix::from_rows(n, n, &m), IntMatrix::from_rows(n, n, &inv))
    }

    /// `G` re-presented along a random unimodular change of generators, with the two
    /// isomorphisms.
    pub fn represent(&mut self, g: &Group) -> (AbHom, AbHom) {
        let m = g.ambient();
        let (u, inv) = self.unimodular(m);
        let moved = Arc::new(FgAbGroup::new(m, u.mul(g.relations())).expect("same shape"));
        let to = AbHom::new(g.clone(), moved.clone(), u).expect("maps relations to relations");
        let from = AbHom::new(moved, g.clone(), inv).expect("inverse");
        (to, from)
    }

    pub fn cyclic_or_free(&mut self) -> Group {
        match self.rng.gen_range(0..4) {
            0 => Arc::new(FgAbGroup::free(1)),
            _ => Arc::new(FgAbGroup::cyclic(self.rng.gen_range(2..=6))),
        }
    }

    /// A sum of skyscraper and locally constant sheaves with at most `max_rank` cyclic
    /// summands in total.
    pub fn sheaf(&mut self, space: &Space, max_rank: usize) -> Presheaf {
        let mut parts: Vec<PresheafRef> = Vec::new();
        let budget = self.rng.gen_range(1..=max_rank.max(1));
        let mut used = 0;
        while used < budget {
            let rank = if budget - used >= 2 && self.rng.gen_bool(0.3) { 2 } else { 1 };
            let group: Group = if rank == 2 {
                let (a, b) = (self.cyclic_or_free(), self.cyclic_or_free());
                let mut inv: Vec<num_bigint::BigInt> = Vec::new();
                let mut free = 0;
                for g in [a, b] {
                    if g.free_rank() == 1 {
                        free += 1;
                    } else {
                        inv.extend(g.invariant_factors());
                    }
                }
                Arc::new(FgAbGroup::from_invariants(&inv, free))
            } else {
                self.cyclic_or_free()
            };
            let piece = if self.rng.gen_bool(0.5) {
                let y = self.rng.gen_range(0..space.points());
                skyscraper(space.clone(), space.full(), y, group)
            } else {
                locally_constant(space.clone(), space.full(), group)
            };
            parts.push(Arc::new(piece.expect("valid piece")));
            used += rank;
        }
        direct_sum(&parts).expect("same space")
    }

    /// Valid sheaf gluing data: a sheaf cut along an open cover, each chart
    /// re-presented and scaled by a sign, with the induced transitions.
    pub fn sheaf_data(&mut self, max_points: usize, max_charts: usize, max_rank: usize) -> SheafGluingData {
        let base = self.space(max_points);
        let cover = self.open_cover(&base, max_charts);
        let f = Arc::new(self.sheaf(&base, max_rank));
        let mut charts = Vec::new();
        let mut psis = Vec::new();
        for &u in &cover {
            let restricted = Arc::new(f.restrict_to(u).expect("open"));
            let isos: HashMap<PointSet, (AbHom, AbHom)> =
                restricted.opens().iter().map(|&v| (v, self.represent(restricted.sections(v)))).collect();
            let (twisted, psi) = transport(&restricted, &isos).expect("isomorphisms");
            let sign = if self.rng.gen_bool(0.5) { -1 } else { 1 };
            let psi = psi.then(&EnrichedMorphism::scaling(restricted, sign)).expect("typed");
            charts.push(twisted);
            psis.push(psi);
        }
        let n = cover.len();
        let transitions = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let w = cover[i].intersection(cover[j]);
                        let there = psis[j].restrict_to(w).expect("open").inverse().expect("iso");
                        psis[i].restrict_to(w).expect("open").then(&there).expect("typed")
                    })
                    .collect()
            })
            .collect();
        SheafGluingData { base, cover, sheaves: charts, transitions }
    }

    /// Valid ringed gluing data: a ring sheaf cut along an open cover with a random
    /// ring automorphism per chart. LRTS instances use local rings only.
    pub fn ringed_data(&mut self, max_points: usize, max_charts: usize, variant: RingedVariant) -> RingedGluingData {
        let space = self.space(max_points);
        let cover = self.open_cover(&space, max_charts);
        let spec = self.ring_sheaf_spec(&space, variant);
        let sheaf = spec.build(&space);
        let x = Arc::new(RingedSpace::new(space.clone(), sheaf).expect("full support"));
        let n = cover.len();
        let alphas: Vec<(RingHom, Option<RingHom>)> = (0..n)
            .map(|_| {
                let a = automorphisms(&spec.lc).choose(&mut self.rng).expect("identity").clone();
                let b = spec.sky.as_ref().map(|(_, r)| automorphisms(r).choose(&mut self.rng).expect("identity").clone());
                (a, b)
            })
            .collect();
        let embeds: Vec<RingedMorphism> =
            cover.iter().map(|&u| RingedMorphism::open_inclusion(&x, u).expect("open")).collect();
        let charts = embeds.iter().map(|m| m.source.clone()).collect();
        let local = |i: usize, g: usize| embeds[i].top.assignment().iter().position(|&p| p == g);
        let mut overlaps = vec![vec![PointSet::EMPTY; n]; n];
        let mut transitions = vec![vec![BTreeMap::new(); n]; n];
        let mut sheaf_transitions = vec![vec![HashMap::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let emb = &embeds[i].top;
                overlaps[i][j] = emb.preimage(cover[j]);
                transitions[i][j] =
                    overlaps[i][j].iter().map(|p| (p, local(j, emb.apply(p)).expect("in overlap"))).collect();
                for w in emb.dom().opens_within(overlaps[i][j]) {
                    let g = emb.image(w);
                    let ring = x.sheaf.ring(g).clone();
                    let fwd = spec.twist(&space, g, &alphas[i]);
                    let back = invert(&fwd);
                    let to_j = spec.twist(&space, g, &alphas[j]);
                    let map = back.iter().map(|&e| to_j[e]).collect();
                    sheaf_transitions[i][j].insert(w, RingHom::new(ring.clone(), ring, map).expect("automorphism"));
                }
            }
        }
        RingedGluingData { variant, charts, overlaps, transitions, sheaf_transitions }
    }

    fn ring_sheaf_spec(&mut self, space: &Space, variant: RingedVariant) -> RingSheafSpec {
        let local_rings = [FinCommRing::zmod(2), FinCommRing::zmod(4), FinCommRing::zmod(8), FinCommRing::gf4()];
        let all_rings = [FinCommRing::zmod(2), FinCommRing::zmod(4), FinCommRing::zmod(8), FinCommRing::gf4(), FinCommRing::product(&[Arc::new(FinCommRing::zmod(2)), Arc::new(FinCommRing::zmod(2))])];
        let pool: &[FinCommRing] = if variant == RingedVariant::Lrts { &local_rings } else { &all_rings };
        let comps = space.opens().iter().map(|&v| crate::presheaf::components(space, v).len()).max().unwrap_or(0);
        let fits = |r: &FinCommRing, extra: usize| r.order().checked_pow(comps as u32).is_some_and(|o| o * extra <= 64);
        let lc = pool.choose(&mut self.rng).expect("nonempty").clone();
        let lc = if fits(&lc, 1) { lc } else { FinCommRing::zmod(2) };
        let sky = if variant != RingedVariant::Lrts && self.rng.gen_bool(0.4) {
            let r = pool.choose(&mut self.rng).expect("nonempty").clone();
            fits(&lc, r.order()).then(|| (self.rng.gen_range(0..space.points()), Arc::new(r)))
        } else {
            None
        };
        RingSheafSpec { lc: Arc::new(lc), sky }
    }

    /// A random integer matrix with entries in `-bound..=bound`.
    pub fn int_matrix(&mut self, rows: usize, cols: usize, bound: i64) -> IntMatrix {
        let entries: Vec<Vec<i64>> =
            (0..rows).map(|_| (0..cols).map(|_| self.rng.gen_range(-bound..=bound)).collect()).collect();
        IntMatrix::from_rows(rows, cols, &entries)
    }
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut out = vec![0; perm.len()];
    for (x, &y) in perm.iter().enumerate() {
        out[y] = x;
    }
    out
}

/// `A^{π0}` optionally times a skyscraper `B` at one point.
struct RingSheafSpec {
    lc: Ring,
    sky: Option<(usize, Ring)>,
}

impl RingSheafSpec {
    fn build(&self, space: &Space) -> RingSheaf {
        let lc = RingSheaf::locally_constant(space.clone(), space.full(), self.lc.clone()).expect("valid");
        match &self.sky {
            None => lc,
            Some((y, r)) => {
                let sky = RingSheaf::skyscraper(space.clone(), space.full(), *y, r.clone()).expect("valid");
                RingSheaf::product(&[lc, sky]).expect("same space")
            }
        }
    }

    /// The element table of the automorphism of `O(V)` applying `a` to every
    /// locally constant factor and `b` to the skyscraper factor.
    fn twist(&self, space: &Space, v: PointSet, (a, b): &(RingHom, Option<RingHom>)) -> Vec<usize> {
        let comps = crate::presheaf::components(space, v).len();
        let lc_factors = vec![self.lc.clone(); comps];
        let lc_ring = FinCommRing::product(&lc_factors);
        let on_lc = |x: usize| {
            let parts: Vec<usize> = FinCommRing::product_parts(&lc_factors, x).into_iter().map(|p| a.apply(p)).collect();
            FinCommRing::product_id(&lc_factors, &parts)
        };
        match (&self.sky, b) {
            (Some((y, r)), Some(b)) => {
                let sky_ring: Ring = if v.contains(*y) { r.clone() } else { Arc::new(FinCommRing::zero_ring()) };
                let outer = [Arc::new(lc_ring), sky_ring];
                (0..outer[0].order() * outer[1].order())
                    .map(|x| {
                        let p = FinCommRing::product_parts(&outer, x);
                        let s = if v.contains(*y) { b.apply(p[1]) } else { 0 };
                        FinCommRing::product_id(&outer, &[on_lc(p[0]), s])
                    })
                    .collect()
            }
            _ => (0..lc_ring.order()).map(on_lc).collect(),
        }
    }
}
