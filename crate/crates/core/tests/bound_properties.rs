use conductor_core::bounds::{lambda_scan, BoundQuery, LambdaGrid, LambdaSpec};
use conductor_core::sums::{AbelianType, EllipticType, ReductionSpec};
use proptest::prelude::*;

fn elliptic(types: &[(u64, EllipticType)], rank: u32, lambda: f64) -> BoundQuery {
    BoundQuery::elliptic_q(
        ReductionSpec::Elliptic(types.iter().copied().collect()),
        rank,
        LambdaSpec::Fixed(lambda),
    )
}

fn elliptic_type() -> impl Strategy<Value = EllipticType> {
    prop_oneof![
        Just(EllipticType::Good),
        Just(EllipticType::Multiplicative),
        Just(EllipticType::Additive)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn breakdown_adds_up(lambda in 0.5f64..4.0, rank in 0u32..3, t2 in elliptic_type()) {
        let r = lambda_scan(&elliptic(&[(2, t2)], rank, lambda)).unwrap();
        let sum = r.rank_term - r.prime_sum + r.arch_term - r.disc_term;
        prop_assert!((sum - r.log_bound).abs() < 1e-12);
        prop_assert!((r.b_r - r.log_bound.exp()).abs() <= 1e-12 * r.b_r);
    }

    #[test]
    fn rank_only_helps(lambda in 0.5f64..4.0, rank in 0u32..4) {
        let a = lambda_scan(&elliptic(&[], rank, lambda)).unwrap();
        let b = lambda_scan(&elliptic(&[], rank + 1, lambda)).unwrap();
        prop_assert!(b.log_bound > a.log_bound);
    }

    #[test]
    fn constraining_a_prime_never_hurts(lambda in 0.8f64..3.5, p in prop::sample::select(vec![2u64, 3, 5, 7, 11]), t in elliptic_type()) {
        let free = lambda_scan(&elliptic(&[], 0, lambda)).unwrap();
        let fixed = lambda_scan(&elliptic(&[(p, t)], 0, lambda)).unwrap();
        prop_assert!(fixed.log_bound >= free.log_bound - 1e-12);
    }

    #[test]
    fn unconstrained_dimension_scales(lambda in 0.8f64..3.5, g in 1u32..5) {
        let one = lambda_scan(&BoundQuery::abelian_q(ReductionSpec::unconstrained(1), 1, 0, LambdaSpec::Fixed(lambda))).unwrap();
        let many = lambda_scan(&BoundQuery::abelian_q(ReductionSpec::unconstrained(g), g, 0, LambdaSpec::Fixed(lambda))).unwrap();
        prop_assert!((many.log_bound - g as f64 * one.log_bound).abs() < 1e-9);
    }
}

#[test]
fn scan_picks_grid_maximum() {
    let grid = LambdaGrid::new(1.0, 3.0, 0.01).unwrap();
    let q = elliptic(&[], 0, 1.0);
    let best = lambda_scan(&BoundQuery {
        lambda: LambdaSpec::Grid(grid),
        ..q.clone()
    })
    .unwrap();
    for l in grid.points() {
        let r = lambda_scan(&BoundQuery {
            lambda: LambdaSpec::Fixed(l),
            ..q.clone()
        })
        .unwrap();
        assert!(r.log_bound <= best.log_bound);
    }
    assert!((best.b_r - 10.3936).abs() < 1e-3);
    assert!((best.lambda_star - 1.31).abs() < 1e-9);
}

#[test]
fn surface_types_order() {
    // trading a toric part at 2 for a unipotent one raises the bound
    let t = |a: [u32; 3]| {
        let entries = [
            (2, AbelianType::new(a[0], a[1], a[2])),
            (3, AbelianType::new(1, 1, 0)),
        ]
        .into_iter()
        .collect();
        let q = BoundQuery::abelian_q(
            ReductionSpec::Abelian { dim: 2, entries },
            2,
            0,
            LambdaSpec::Fixed(1.8),
        );
        lambda_scan(&q).unwrap().b_r
    };
    assert!(t([0, 2, 0]) < t([0, 1, 1]));
    assert!(t([0, 1, 1]) < t([0, 0, 2]));
}
