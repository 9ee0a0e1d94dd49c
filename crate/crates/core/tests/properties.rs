//! Property-based invariants over generated coefficients.

use kh_core::aut::{moebius_distance, DiscAut};
use kh_core::expr::{boundary_max_modulus, HoloExpr};
use kh_core::jet::JetOrder;
use kh_core::metrics::kappa;
use kh_core::parse::parse;
use kh_core::{C, PlanarDomain};
use proptest::prelude::*;

fn cplx(max: f64) -> impl Strategy<Value = C> {
    (-max..max, -max..max).prop_map(|(re, im)| C::new(re, im))
}

fn in_disc(r: f64) -> impl Strategy<Value = C> {
    (0.0..r * r, 0.0..std::f64::consts::TAU)
        .prop_map(|(s, th)| C::from_polar(s.sqrt(), th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_reparse_preserves_jets(a in in_disc(0.8), m in cplx(1.5), b in cplx(1.0), z in in_disc(0.45)) {
        let f = HoloExpr::exp(
            HoloExpr::prod(
                HoloExpr::moebius(a, HoloExpr::var()).unwrap(),
                HoloExpr::affine(m * 0.5, b, HoloExpr::var()).unwrap(),
            ),
        );
        let g = parse(&f.render()).unwrap();
        let ja = f.eval_jet(z, JetOrder::Second).unwrap();
        let jb = g.eval_jet(z, JetOrder::Second).unwrap();
        prop_assert!((ja.value - jb.value).norm() < 1e-12);
        prop_assert!((ja.d1 - jb.d1).norm() < 1e-12);
    }

    #[test]
    fn jets_match_central_differences(a in in_disc(0.7), s in 0.05f64..0.9, z in in_disc(0.4)) {
        let f = HoloExpr::compose(
            HoloExpr::cover_pdisc(HoloExpr::var()).unwrap(),
            HoloExpr::sum(
                HoloExpr::affine(C::new(s, 0.0), C::new(0.0, 0.0), HoloExpr::var()).unwrap(),
                HoloExpr::affine(a * 0.1, C::new(0.0, 0.0), HoloExpr::powi(HoloExpr::var(), 2)).unwrap(),
            ),
        ).unwrap();
        let j = f.eval_jet(z, JetOrder::First).unwrap();
        let h = 1e-6;
        let fd = (f.eval_value(z + C::new(h, 0.0)).unwrap()
            - f.eval_value(z - C::new(h, 0.0)).unwrap()) / C::new(2.0 * h, 0.0);
        prop_assert!((j.d1 - fd).norm() / j.d1.norm().max(1e-9) < 1e-6);
    }

    #[test]
    fn boundary_max_monotone_under_doubling(s in 0.1f64..0.9, radius in 0.2f64..0.9) {
        let f = HoloExpr::exp(
            HoloExpr::affine(C::new(s, 0.3), C::new(0.0, 0.0), HoloExpr::powi(HoloExpr::var(), 2)).unwrap(),
        );
        let mut prev = 0.0;
        for n in [64usize, 128, 256, 512] {
            let m = boundary_max_modulus(&f, radius, n).unwrap();
            prop_assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn moebius_distance_invariant_under_automorphisms(
        c0 in in_disc(0.85),
        th in 0.0f64..std::f64::consts::TAU,
        z in in_disc(0.85),
        w in in_disc(0.85),
    ) {
        let f = DiscAut::new(C::from_polar(1.0, th), c0).unwrap();
        let before = moebius_distance(z, w).unwrap();
        let after = moebius_distance(f.apply(z), f.apply(w)).unwrap();
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn kappa_scales_absolutely(z in in_disc(0.8), x in cplx(2.0), lam in cplx(3.0)) {
        let d = PlanarDomain::disc();
        let a = kappa(&d, z, lam * x).unwrap();
        let b = lam.norm() * kappa(&d, z, x).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
    }
}
