mod common;

use std::sync::Arc;

use common::{invariant_factors_by_minors, to_i128};
use glue_core::gen::Sampler;
use glue_core::group::{kernel, snf, AbHom, FgAbGroup, IntMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;

fn entries() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snf_agrees_with_determinantal_divisors(rows in entries()) {
        let a = IntMatrix::from_rows(rows.len(), rows[0].len(), &rows);
        let f = snf(&a);
        prop_assert_eq!(f.u.mul(&a).mul(&f.v), f.s.clone());
        prop_assert_eq!(f.u.mul(&f.u_inv), IntMatrix::identity(a.rows()));
        prop_assert_eq!(f.v_inv.mul(&f.v), IntMatrix::identity(a.cols()));
        let nonzero: Vec<i128> = to_i128(&f.s).iter().enumerate().filter_map(|(i, r)| r.get(i).copied()).filter(|&x| x != 0).collect();
        prop_assert_eq!(nonzero.len(), f.rank);
        prop_assert_eq!(nonzero, invariant_factors_by_minors(&rows));
    }

    #[test]
    fn kernel_inclusion_is_injective_and_killed(rows in entries(), orders in prop::collection::vec(0i64..5, 5)) {
        let m = rows.len();
        // an order of 0 leaves a free summand
        let cod = Arc::new(FgAbGroup::new(m, IntMatrix::diagonal(&orders[..m])).unwrap());
        let dom = Arc::new(FgAbGroup::free(rows[0].len()));
        let h = AbHom::new(dom, cod, IntMatrix::from_rows(m, rows[0].len(), &rows)).unwrap();
        let (_, incl) = kernel(&h);
        prop_assert!(incl.is_injective());
        prop_assert!(incl.then(&h).unwrap().is_zero());
    }

    #[test]
    fn represented_groups_are_isomorphic(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let g = s.cyclic_or_free();
        let (to, from) = s.represent(&g);
        prop_assert!(to.then(&from).unwrap().same(&AbHom::identity(g.clone())));
        prop_assert_eq!(to.cod().invariant_factors(), g.invariant_factors());
        prop_assert_eq!(to.cod().free_rank(), g.free_rank());
    }
}

#[test]
fn diag_two_three() {
    let f = snf(&IntMatrix::diagonal(&[2, 3]));
    assert_eq!(f.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    assert_eq!(FgAbGroup::new(2, IntMatrix::diagonal(&[2, 3])).unwrap().order(), Some(BigInt::from(6)));
}
