//! Named verification suites: each runs a module's invariants with seeded
//! sampling and returns a pass/fail report with per-invariant residuals.
//! These are the library side of the CLI `verify` command; the acceptance
//! test target runs the same checks at full size.

use crate::aut::{self, DiscAut};
use crate::counterexample::{
    build_certificate, certify_pair, find_equal_displacement, intersection_persistence,
    normalize, transversality_check,
};
use crate::covering::{covering_of, lift_disc};
use crate::domain::PlanarDomain;
use crate::expr::HoloExpr;
use crate::injectivize::{
    injectivize, injectivize_simply_connected_factor, injectivize_punctured_plane_factor, verify_injectivity_full, CaseTag,
    DiscPair, InjectivizationResult,
};
use crate::metrics::{classify_product, hahn_bounds, kappa, kappa_product, EqualityCase};
use crate::report::{Report, ResidualEntry};
use crate::sample;
use crate::{Error, Result, C};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SUITE_NAMES: [&str; 6] = [
    "auts",
    "coverings",
    "metrics",
    "injectivize",
    "counterexample",
    "all",
];

pub fn run_suite(name: &str, seed: u64) -> Result<Report> {
    match name {
        "auts" => Ok(suite_auts(seed)),
        "coverings" => Ok(suite_coverings(seed)),
        "metrics" => Ok(suite_metrics(seed)),
        "injectivize" => Ok(suite_injectivize(seed)),
        "counterexample" => Ok(suite_counterexample(seed)),
        "all" => Ok(suite_all(seed)),
        other => Err(Error::InvalidArgument(format!(
            "unknown suite `{other}` (expected one of {SUITE_NAMES:?})"
        ))),
    }
}

fn random_aut(rng: &mut ChaCha8Rng) -> DiscAut {
    let phase = C::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU);
    let center = sample::random_in_disc(rng, 0.9);
    DiscAut::new(phase, center).expect("random automorphism")
}

pub fn suite_auts(seed: u64) -> Report {
    let mut rng = sample::rng(seed, 1);
    let pts = sample::disc_points(seed.wrapping_add(1), 20, 0.9);

    let mut assoc: f64 = 0.0;
    let mut inverse: f64 = 0.0;
    let mut minv: f64 = 0.0;
    for _ in 0..100 {
        let f = random_aut(&mut rng);
        let g = random_aut(&mut rng);
        let h = random_aut(&mut rng);
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        let inv = f.compose(&f.invert()).unwrap();
        for &z in &pts {
            assoc = assoc.max((left.apply(z) - right.apply(z)).norm());
            inverse = inverse.max((inv.apply(z) - z).norm());
        }
        let z = sample::random_in_disc(&mut rng, 0.85);
        let w = sample::random_in_disc(&mut rng, 0.85);
        let before = aut::moebius_distance(z, w).unwrap();
        let after = aut::moebius_distance(f.apply(z), f.apply(w)).unwrap();
        minv = minv.max((before - after).abs());
    }

    let mut swap: f64 = 0.0;
    let mut square: f64 = 0.0;
    let mut dprod: f64 = 0.0;
    let mut plus_margin = f64::INFINITY;
    let mut minus_margin = f64::INFINITY;
    for _ in 0..50 {
        let c = -0.1 - 0.8 * rng.gen::<f64>();
        let psi = aut::moebius_h(C::new(c, 0.0)).unwrap();
        let mut a = sample::random_in_disc(&mut rng, 0.8);
        if a.im.abs() < 0.05 {
            a.im = 0.05_f64.copysign(if a.im == 0.0 { 1.0 } else { a.im });
        }
        let phi = aut::phi_involution(a, &psi).unwrap();
        let pa = psi.apply(a);
        swap = swap.max((phi.apply(a) - pa).norm().max((phi.apply(pa) - a).norm()));
        for &z in &pts {
            square = square.max((phi.apply(phi.apply(z)) - z).norm());
        }
        dprod = dprod.max((phi.derivative(a) * phi.derivative(pa) - C::new(1.0, 0.0)).norm());
        plus_margin = plus_margin.min((phi.derivative(a) - psi.derivative(a)).norm());
        minus_margin = minus_margin.min((phi.derivative(a) + psi.derivative(a)).norm());
    }

    let mut real_dichotomy: f64 = 0.0;
    let psi = aut::moebius_h(C::new(-0.8, 0.0)).unwrap();
    for k in 0..20 {
        let a = C::new(-0.85 + 0.085 * k as f64, 0.0);
        let phi = aut::phi_involution(a, &psi).unwrap();
        real_dichotomy = real_dichotomy.max((phi.derivative(a) + psi.derivative(a)).norm());
    }

    let mut interp: f64 = 0.0;
    for _ in 0..50 {
        let f = random_aut(&mut rng);
        let x1 = sample::random_in_disc(&mut rng, 0.8);
        let x2 = sample::random_in_disc(&mut rng, 0.8);
        if (x1 - x2).norm() < 1e-3 {
            continue;
        }
        let h = aut::two_point_interpolant(x1, f.apply(x1), x2, f.apply(x2)).unwrap();
        interp = interp
            .max((h.apply(x1) - f.apply(x1)).norm())
            .max((h.apply(x2) - f.apply(x2)).norm());
    }

    Report::new(
        "verify --suite auts",
        serde_json::json!({"seed": seed, "trials": 100}),
        serde_json::json!({}),
        vec![
            ResidualEntry::new("group_associativity", assoc, 1e-12),
            ResidualEntry::new("group_inverse", inverse, 1e-12),
            ResidualEntry::new("moebius_distance_invariance", minv, 1e-12),
            ResidualEntry::new("involution_swap", swap, 1e-10),
            ResidualEntry::new("involution_square", square, 1e-10),
            ResidualEntry::new("phi_derivative_product", dprod, 1e-10),
            ResidualEntry::lower_bound("plus_branch_margin", plus_margin, 1e-3),
            ResidualEntry::lower_bound("nonreal_dichotomy_margin", minus_margin, 1e-3),
            ResidualEntry::new("real_axis_dichotomy", real_dichotomy, 1e-10),
            ResidualEntry::new("interpolant_images", interp, 1e-10),
        ],
    )
}

fn catalog() -> Vec<PlanarDomain> {
    vec![
        PlanarDomain::disc(),
        PlanarDomain::plane(),
        PlanarDomain::cstar(),
        PlanarDomain::pdisc(),
        PlanarDomain::annulus(0.3).unwrap(),
        PlanarDomain::annulus(0.5).unwrap(),
    ]
}

pub fn suite_coverings(seed: u64) -> Report {
    let mut entries = Vec::new();
    for dom in catalog() {
        let cov = covering_of(&dom).unwrap();
        let tag = dom.descriptor().replace(':', "_");
        entries.push(ResidualEntry::new(
            format!("deck_identity_{tag}"),
            cov.deck_identity_max_residual(1000, 0.9),
            1e-9,
        ));
        let mut violations = 0usize;
        for z in sample::disc_points(seed.wrapping_add(11), 1000, 0.999) {
            let z = match cov.cover {
                crate::covering::CoverSpace::Disc => z,
                crate::covering::CoverSpace::Plane => z * 3.0,
            };
            if !dom.contains(cov.p(z)) {
                violations += 1;
            }
        }
        entries.push(ResidualEntry::new(
            format!("containment_violations_{tag}"),
            violations as f64,
            0.0,
        ));
        if !cov.deck.is_identity() {
            entries.push(ResidualEntry::lower_bound(
                format!("deck_freeness_{tag}"),
                cov.deck_min_displacement_on_grid(),
                1e-3,
            ));
        }
    }

    // lifting: f = p(0.9 z) must lift to 0.9 z
    let mut lift_defect: f64 = 0.0;
    let mut lift_unique: f64 = 0.0;
    let mut fiber_defect: f64 = 0.0;
    for dom in [PlanarDomain::pdisc(), PlanarDomain::annulus(0.3).unwrap()] {
        let cov = covering_of(&dom).unwrap();
        let inner =
            HoloExpr::affine(C::new(0.9, 0.0), C::new(0.0, 0.0), HoloExpr::var()).unwrap();
        let f = HoloExpr::compose(cov.map_expr().clone(), inner).unwrap();
        let a = lift_disc(&cov, &f, C::new(0.0, 0.0), 0.9, 4, 128).unwrap();
        lift_defect = lift_defect.max(a.max_defect(&cov, &f).unwrap());
        let b = lift_disc(&cov, &f, C::new(0.0, 0.0), 0.9, 4, 512).unwrap();
        for ray in 0..4 {
            for s in 0..128 {
                let wa = a.values[ray * 128 + s];
                let wb = b.values[ray * 512 + s * 4 + 3];
                lift_unique = lift_unique.max((wa - wb).norm());
            }
        }
        for w in sample::annulus_points(seed.wrapping_add(13), 100, 0.35, 0.9) {
            if !dom.contains(w) {
                continue;
            }
            let zt = cov.fiber_point(w).unwrap();
            fiber_defect = fiber_defect.max((cov.p(zt) - w).norm());
        }
    }
    entries.push(ResidualEntry::new("lift_defect", lift_defect, 1e-8));
    entries.push(ResidualEntry::new("lift_uniqueness", lift_unique, 1e-8));
    entries.push(ResidualEntry::new("fiber_inversion", fiber_defect, 1e-9));

    let pd = covering_of(&PlanarDomain::pdisc()).unwrap();
    entries.push(ResidualEntry::lower_bound(
        "probe_pdisc",
        pd.sup_displacement_probe(1e-3).unwrap(),
        1.0 - 0.5 * 1e-3f64.sqrt(),
    ));
    let an = covering_of(&PlanarDomain::annulus(0.2).unwrap()).unwrap();
    entries.push(ResidualEntry::lower_bound(
        "probe_annulus_0.2",
        an.sup_displacement_probe(1e-4).unwrap(),
        1.0 - 0.5 * 1e-4f64.sqrt(),
    ));

    Report::new(
        "verify --suite coverings",
        serde_json::json!({"seed": seed}),
        serde_json::json!({}),
        entries,
    )
}

pub fn suite_metrics(seed: u64) -> Report {
    let mut rng = sample::rng(seed, 3);
    let mut entries = Vec::new();

    let mut homo: f64 = 0.0;
    for dom in [
        PlanarDomain::disc(),
        PlanarDomain::pdisc(),
        PlanarDomain::annulus(0.3).unwrap(),
    ] {
        for _ in 0..40 {
            let z = loop {
                let z = sample::random_in_disc(&mut rng, 0.9);
                if dom.contains(z) {
                    break z;
                }
            };
            let x = sample::random_in_disc(&mut rng, 2.0);
            let lam = sample::random_in_disc(&mut rng, 3.0);
            let a = kappa(&dom, z, lam * x).unwrap();
            let b = lam.norm() * kappa(&dom, z, x).unwrap();
            homo = homo.max((a - b).abs() / b.max(1.0));
        }
    }
    entries.push(ResidualEntry::new("kappa_homogeneity", homo, 1e-12));

    let mut fiber: f64 = 0.0;
    for dom in [PlanarDomain::pdisc(), PlanarDomain::annulus(0.3).unwrap()] {
        let cov = covering_of(&dom).unwrap();
        for z in sample::annulus_points(seed.wrapping_add(17), 50, 0.3, 0.9) {
            if !dom.contains(z) {
                continue;
            }
            let zt = cov.fiber_point(z).unwrap();
            let moved = cov.deck_dd().unwrap().apply(crate::dd::DdC::from_c(zt));
            let a = crate::metrics::kappa_via_fiber(&cov, zt, C::new(1.0, 0.0));
            let b = crate::metrics::kappa_via_fiber_dd(&cov, moved, C::new(1.0, 0.0));
            fiber = fiber.max((a - b).abs() / a.max(1.0));
        }
    }
    entries.push(ResidualEntry::new("kappa_fiber_independence", fiber, 1e-9));

    let disc = PlanarDomain::disc();
    let mut sp: f64 = 0.0;
    for z in sample::disc_points(seed.wrapping_add(19), 100, 0.95) {
        let k = kappa(&disc, z, C::new(1.0, 0.0)).unwrap();
        sp = sp.max((k * (1.0 - z.norm_sqr()) - 1.0).abs());
    }
    entries.push(ResidualEntry::new("schwarz_pick_identity", sp, 1e-10));

    let mut prod: f64 = 0.0;
    for _ in 0..100 {
        let a1 = sample::random_in_disc(&mut rng, 0.9);
        let a2 = sample::random_in_disc(&mut rng, 0.9);
        let x1 = sample::random_in_disc(&mut rng, 2.0);
        let x2 = sample::random_in_disc(&mut rng, 2.0);
        let via_product = kappa_product(&disc, &disc, (a1, a2), (x1, x2)).unwrap();
        let direct = (x1.norm() / (1.0 - a1.norm_sqr())).max(x2.norm() / (1.0 - a2.norm_sqr()));
        prod = prod.max((via_product - direct).abs() / direct.max(1.0));
    }
    entries.push(ResidualEntry::new("product_max_formula", prod, 1e-12));

    let mut ordering_defect: f64 = 0.0;
    let mut exactness_defect = 0.0f64;
    for dom in catalog() {
        let z = match dom.kind {
            crate::domain::Kind::Annulus(r) => C::new(0.5 * (1.0 + r), 0.0),
            crate::domain::Kind::PuncturedPlane | crate::domain::Kind::Plane => C::new(1.0, 0.0),
            _ => C::new(0.4, 0.1),
        };
        let b = hahn_bounds(&dom, z, C::new(1.0, 0.0)).unwrap();
        if let Some(u) = b.upper {
            ordering_defect = ordering_defect.max((b.lower - u).max(0.0));
        }
        if b.exact != dom.is_simply_connected() {
            exactness_defect += 1.0;
        }
    }
    entries.push(ResidualEntry::new("hahn_ordering", ordering_defect, 1e-12));
    entries.push(ResidualEntry::new(
        "hahn_exact_iff_simply_connected",
        exactness_defect,
        0.0,
    ));

    // 5x5 classification matrix
    let names = ["disc", "plane", "cstar", "pdisc", "annulus:0.3"];
    let mut mismatches = 0.0f64;
    for (i, n1) in names.iter().enumerate() {
        for (j, n2) in names.iter().enumerate() {
            let d1 = PlanarDomain::parse_descriptor(n1).unwrap();
            let d2 = PlanarDomain::parse_descriptor(n2).unwrap();
            let verdict = classify_product(&d1, &d2);
            let both_multiply_connected = i >= 3 && j >= 3;
            if both_multiply_connected != (verdict.case == EqualityCase::NotEqual) {
                mismatches += 1.0;
            }
        }
    }
    entries.push(ResidualEntry::new("classification_matrix", mismatches, 0.0));

    // operational cross-check of the two halves of the classification:
    // every NotEqual pair of the matrix certifies, Equal pairs injectivize
    let mut cert_failures = 0.0f64;
    for (d1, d2) in [
        ("pdisc", "pdisc"),
        ("pdisc", "annulus:0.3"),
        ("annulus:0.3", "pdisc"),
        ("annulus:0.3", "annulus:0.3"),
    ] {
        let c1 = covering_of(&PlanarDomain::parse_descriptor(d1).unwrap()).unwrap();
        let c2 = covering_of(&PlanarDomain::parse_descriptor(d2).unwrap()).unwrap();
        if !certify_pair(&c1, &c2, None)
            .map(|c| c.absdet() > 1e-6)
            .unwrap_or(false)
        {
            cert_failures += 1.0;
        }
    }
    entries.push(ResidualEntry::new(
        "notequal_pairs_certify",
        cert_failures,
        0.0,
    ));
    let mut inj_failures = 0.0f64;
    let mut rng2 = sample::rng(seed, 5);
    for branch in [
        CaseTag::RigidFactor,
        CaseTag::PuncturedPower,
        CaseTag::PuncturedSwapped,
    ] {
        let pair = random_pair_for_branch(branch, 0.5, &mut rng2);
        let ok = injectivize(&pair, 0.5)
            .and_then(|r| {
                verify_injectivity_full(&r.g, 2000, seed, &r.injective_components)
                    .map(|v| v.pass && r.jet_residual < 1e-10)
            })
            .unwrap_or(false);
        if !ok {
            inj_failures += 1.0;
        }
    }
    entries.push(ResidualEntry::new(
        "equal_pairs_injectivize",
        inj_failures,
        0.0,
    ));

    Report::new(
        "verify --suite metrics",
        serde_json::json!({"seed": seed}),
        serde_json::json!({}),
        entries,
    )
}

/// Targets used by the randomized injectivization sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecondFactor {
    Disc,
    Pdisc,
    Annulus,
    Cstar,
}

/// A random component mapping E into the given factor with a nonzero
/// derivative at the origin.
fn random_component(kind: SecondFactor, rng: &mut ChaCha8Rng) -> (HoloExpr, PlanarDomain) {
    let var = HoloExpr::var;
    match kind {
        SecondFactor::Disc => {
            let a = sample::random_in_disc(rng, 0.6);
            let eta = C::from_polar(0.3 + 0.6 * rng.gen::<f64>(), rng.gen::<f64>() * std::f64::consts::TAU);
            let gamma = sample::random_in_disc(rng, 0.5);
            // h_{-a}(eta (z + gamma z^2)/2): values in E, derivative eta/2 (1-|a|^2) != 0
            let inner = HoloExpr::affine(
                eta * 0.5,
                C::new(0.0, 0.0),
                HoloExpr::sum(
                    var(),
                    HoloExpr::affine(gamma, C::new(0.0, 0.0), HoloExpr::powi(var(), 2)).unwrap(),
                ),
            )
            .unwrap();
            (
                HoloExpr::moebius(-a, inner).unwrap(),
                PlanarDomain::disc(),
            )
        }
        SecondFactor::Pdisc => {
            let sigma = 0.1 + 0.8 * rng.gen::<f64>();
            let f = HoloExpr::exp(
                HoloExpr::affine(C::new(-sigma, 0.0), C::new(-1.0, 0.0), var()).unwrap(),
            );
            (f, PlanarDomain::pdisc())
        }
        SecondFactor::Annulus => {
            let rho = 0.3 + 0.6 * rng.gen::<f64>();
            let f = HoloExpr::cover_annulus(
                0.3,
                HoloExpr::affine(C::new(rho, 0.0), C::new(0.0, 0.0), var()).unwrap(),
            )
            .unwrap();
            (f, PlanarDomain::annulus(0.3).unwrap())
        }
        SecondFactor::Cstar => {
            let b0 = sample::random_in_disc(rng, 0.5);
            let b1 = loop {
                let b = sample::random_in_disc(rng, 0.8);
                if b.norm() > 0.05 {
                    break b;
                }
            };
            let f = HoloExpr::exp(HoloExpr::sum(
                HoloExpr::constant(b0).unwrap(),
                HoloExpr::affine(b1, C::new(0.0, 0.0), var()).unwrap(),
            ));
            (f, PlanarDomain::cstar())
        }
    }
}

/// Random disc pair exercising a specific construction branch at the given θ.
pub fn random_pair_for_branch(
    branch: CaseTag,
    theta: f64,
    rng: &mut ChaCha8Rng,
) -> DiscPair {
    let var = HoloExpr::var;
    let second = match rng.gen_range(0..4) {
        0 => SecondFactor::Disc,
        1 => SecondFactor::Pdisc,
        2 => SecondFactor::Annulus,
        _ => SecondFactor::Cstar,
    };
    match branch {
        CaseTag::RigidFactor => {
            let (f1, t1) = if rng.gen_bool(0.5) {
                random_component(SecondFactor::Disc, rng)
            } else {
                let beta = loop {
                    let b = sample::random_in_disc(rng, 2.0);
                    if b.norm() > 0.1 {
                        break b;
                    }
                };
                (
                    HoloExpr::sum(
                        HoloExpr::affine(beta, sample::random_in_disc(rng, 1.0), var()).unwrap(),
                        HoloExpr::affine(
                            sample::random_in_disc(rng, 1.0),
                            C::new(0.0, 0.0),
                            HoloExpr::powi(var(), 2),
                        )
                        .unwrap(),
                    ),
                    PlanarDomain::plane(),
                )
            };
            let (f2, t2) = random_component(second, rng);
            DiscPair::new(f1, f2, t1, t2).expect("generated pair")
        }
        CaseTag::DisplacedFactor => {
            let a = sample::random_in_disc(rng, 0.5);
            let cq = loop {
                let c = sample::random_in_disc(rng, 0.9 - a.norm() - 1e-3);
                if c.norm() > 0.05 {
                    break c;
                }
            };
            let f1 = HoloExpr::affine(cq, a, HoloExpr::powi(var(), 2)).unwrap();
            let (f2, t2) = random_component(second, rng);
            DiscPair::new(f1, f2, PlanarDomain::disc(), t2).expect("generated pair")
        }
        CaseTag::PuncturedPower => {
            let b0 = sample::random_in_disc(rng, 0.5);
            let b1 = loop {
                let b = sample::random_in_disc(rng, 1.2);
                if b.norm() > 0.05 && (theta * b - C::new(1.0, 0.0)).norm() > 1e-3 {
                    break b;
                }
            };
            let f1 = HoloExpr::exp(HoloExpr::sum(
                HoloExpr::constant(b0).unwrap(),
                HoloExpr::affine(b1, C::new(0.0, 0.0), var()).unwrap(),
            ));
            let second = if second == SecondFactor::Cstar {
                SecondFactor::Disc
            } else {
                second
            };
            let (f2, t2) = random_component(second, rng);
            DiscPair::new(f1, f2, PlanarDomain::cstar(), t2).expect("generated pair")
        }
        CaseTag::PuncturedUnit => {
            let b0 = sample::random_in_disc(rng, 0.5);
            let f1 = HoloExpr::exp(HoloExpr::sum(
                HoloExpr::constant(b0).unwrap(),
                HoloExpr::affine(C::new(1.0 / theta, 0.0), C::new(0.0, 0.0), var()).unwrap(),
            ));
            let second = if second == SecondFactor::Cstar {
                SecondFactor::Pdisc
            } else {
                second
            };
            let (f2, t2) = random_component(second, rng);
            DiscPair::new(f1, f2, PlanarDomain::cstar(), t2).expect("generated pair")
        }
        CaseTag::PuncturedSwapped => {
            let b1 = loop {
                let b = sample::random_in_disc(rng, 1.0);
                if b.norm() > 0.05 {
                    break b;
                }
            };
            let f1 = HoloExpr::exp(
                HoloExpr::affine(b1, sample::random_in_disc(rng, 0.4), var()).unwrap(),
            );
            // constant second component strictly inside its domain
            let (t2, value) = match second {
                SecondFactor::Disc => (PlanarDomain::disc(), sample::random_in_disc(rng, 0.7)),
                SecondFactor::Pdisc => (
                    PlanarDomain::pdisc(),
                    C::from_polar(0.2 + 0.5 * rng.gen::<f64>(), rng.gen::<f64>() * std::f64::consts::TAU),
                ),
                SecondFactor::Annulus => (
                    PlanarDomain::annulus(0.3).unwrap(),
                    C::from_polar(0.4 + 0.4 * rng.gen::<f64>(), rng.gen::<f64>() * std::f64::consts::TAU),
                ),
                SecondFactor::Cstar => (
                    PlanarDomain::pdisc(),
                    C::from_polar(0.3, rng.gen::<f64>() * std::f64::consts::TAU),
                ),
            };
            let f2 = HoloExpr::constant(value).unwrap();
            DiscPair::new(f1, f2, PlanarDomain::cstar(), t2).expect("generated pair")
        }
    }
}

/// Run the branch-specific constructor and check the full contract.
pub fn run_branch_case(
    branch: CaseTag,
    pair: &DiscPair,
    theta: f64,
    seed: u64,
    verify_pairs: usize,
) -> Result<(InjectivizationResult, f64)> {
    let r = match branch {
        CaseTag::RigidFactor | CaseTag::DisplacedFactor => injectivize_simply_connected_factor(pair, theta)?,
        _ => injectivize_punctured_plane_factor(pair, theta)?,
    };
    if r.case != branch {
        return Err(Error::Numerics(format!(
            "generator produced {:?} but the constructor took {:?}",
            branch, r.case
        )));
    }
    let v = verify_injectivity_full(&r.g, verify_pairs, seed, &r.injective_components)?;
    if !v.pass {
        return Err(Error::Numerics(format!(
            "injectivity verification failed: {v:?}"
        )));
    }
    // punctured-plane outputs stay zero-free
    let mut min_abs = f64::INFINITY;
    if matches!(
        branch,
        CaseTag::PuncturedPower | CaseTag::PuncturedUnit | CaseTag::PuncturedSwapped
    ) {
        for z in sample::disc_points(seed.wrapping_add(5), 10_000, 0.999) {
            min_abs = min_abs.min(r.g.comp1.eval_value(z)?.norm());
        }
        if !min_abs.is_finite() || min_abs <= 0.0 {
            return Err(Error::Numerics("punctured-plane output vanished".into()));
        }
    }
    Ok((r, min_abs))
}

pub const ALL_BRANCHES: [CaseTag; 5] = [
    CaseTag::RigidFactor,
    CaseTag::DisplacedFactor,
    CaseTag::PuncturedPower,
    CaseTag::PuncturedUnit,
    CaseTag::PuncturedSwapped,
];

pub fn suite_injectivize(seed: u64) -> Report {
    let mut entries = Vec::new();
    let mut worst_jet: f64 = 0.0;
    let mut failures = 0.0f64;
    let theta = 0.6;
    for branch in ALL_BRANCHES {
        let mut rng = sample::rng(seed, 100 + branch as u64);
        for _ in 0..5 {
            let pair = random_pair_for_branch(branch, theta, &mut rng);
            match run_branch_case(branch, &pair, theta, seed, 2000) {
                Ok((r, _)) => worst_jet = worst_jet.max(r.jet_residual),
                Err(_) => failures += 1.0,
            }
        }
    }
    entries.push(ResidualEntry::new("branch_failures", failures, 0.0));
    entries.push(ResidualEntry::new("jet_residual", worst_jet, 1e-10));

    // θ-family on the worked example
    let f = DiscPair::new(
        HoloExpr::var(),
        HoloExpr::exp(
            HoloExpr::affine(C::new(-0.5, 0.0), C::new(-1.0, 0.0), HoloExpr::var()).unwrap(),
        ),
        PlanarDomain::disc(),
        PlanarDomain::pdisc(),
    )
    .unwrap();
    let rows = crate::injectivize::theta_family_report(&f, &[0.3, 0.6, 0.9, 0.99], seed).unwrap();
    let bad = rows.iter().filter(|r| !r.pass).count() as f64;
    entries.push(ResidualEntry::new("theta_family_failures", bad, 0.0));

    Report::new(
        "verify --suite injectivize",
        serde_json::json!({"seed": seed, "per_branch": 5, "theta": theta}),
        serde_json::json!({}),
        entries,
    )
}

pub fn suite_counterexample(seed: u64) -> Report {
    let _ = seed; // the pipeline is deterministic
    let mut entries = Vec::new();
    let pairs = [
        ("pdisc", "pdisc"),
        ("annulus:0.3", "pdisc"),
        ("annulus:0.3", "annulus:0.5"),
        ("annulus:0.3", "annulus:0.3"),
    ];
    let mut cover_eq: f64 = 0.0;
    let mut involution: f64 = 0.0;
    let mut det_rel: f64 = 0.0;
    let mut min_det = f64::INFINITY;
    let mut transversal: f64 = 0.0;
    let mut newton_res: f64 = 0.0;
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi: f64 = 0.0;
    let mut failures = 0.0f64;
    for (d1, d2) in pairs {
        let c1 = covering_of(&PlanarDomain::parse_descriptor(d1).unwrap()).unwrap();
        let c2 = covering_of(&PlanarDomain::parse_descriptor(d2).unwrap()).unwrap();
        match certify_pair(&c1, &c2, None) {
            Ok(cert) => {
                cover_eq = cover_eq
                    .max(cert.residuals["cover_equality_1"])
                    .max(cert.residuals["cover_equality_2"]);
                involution = involution.max(cert.residuals["involution_defect"]);
                det_rel = det_rel.max(cert.residuals["det_two_route_rel"]);
                min_det = min_det.min(cert.absdet());
                let (s1, s2) = cert.difference_surfaces();
                let jac = transversality_check(&s1, &s2, &cert);
                transversal =
                    transversal.max((jac + cert.det_value).norm() / cert.det_value.norm());
                match (
                    intersection_persistence(&s1, &s2, &cert, 1e-3),
                    intersection_persistence(&s1, &s2, &cert, 1e-2),
                ) {
                    (Ok(a), Ok(b)) => {
                        newton_res = newton_res.max(a.residual).max(b.residual);
                        let ratio = b.displacement / a.displacement;
                        ratio_lo = ratio_lo.min(ratio);
                        ratio_hi = ratio_hi.max(ratio);
                    }
                    _ => failures += 1.0,
                }
            }
            Err(_) => failures += 1.0,
        }
    }
    entries.push(ResidualEntry::new("pipeline_failures", failures, 0.0));
    entries.push(ResidualEntry::new("cover_equality", cover_eq, 1e-9));
    entries.push(ResidualEntry::new("involution_defect", involution, 1e-10));
    entries.push(ResidualEntry::new("det_two_route_rel", det_rel, 1e-9));
    entries.push(ResidualEntry::lower_bound("abs_det", min_det, 1e-6));
    entries.push(ResidualEntry::new("transversality_sign", transversal, 1e-9));
    entries.push(ResidualEntry::new("persistence_residual", newton_res, 1e-10));
    entries.push(ResidualEntry::lower_bound("persistence_ratio_low", ratio_lo, 5.0));
    entries.push(ResidualEntry::new("persistence_ratio_high", ratio_hi, 20.0));

    // the equal-displacement level and reduced-branch guards
    let c1 = covering_of(&PlanarDomain::annulus(0.3).unwrap()).unwrap();
    let eq = find_equal_displacement(&c1, &c1).unwrap();
    let np = normalize(&c1, &c1, &eq).unwrap();
    entries.push(ResidualEntry::new(
        "reduced_branch_detected",
        if np.reduced { 0.0 } else { 1.0 },
        0.0,
    ));
    entries.push(ResidualEntry::new(
        "real_base_point_rejected",
        if build_certificate(&np, Some(C::new(0.25, 0.0))).is_err() {
            0.0
        } else {
            1.0
        },
        0.0,
    ));

    Report::new(
        "verify --suite counterexample",
        serde_json::json!({"pairs": ["pdisc x pdisc", "annulus:0.3 x pdisc", "annulus:0.3 x annulus:0.5", "annulus:0.3 x annulus:0.3"]}),
        serde_json::json!({}),
        entries,
    )
}

pub fn suite_all(seed: u64) -> Report {
    let reports = [
        suite_auts(seed),
        suite_coverings(seed),
        suite_metrics(seed),
        suite_injectivize(seed),
        suite_counterexample(seed),
    ];
    let mut entries = Vec::new();
    for r in &reports {
        let prefix = r
            .command
            .rsplit(' ')
            .next()
            .unwrap_or("suite")
            .to_string();
        for e in &r.residuals {
            entries.push(ResidualEntry::new(
                format!("{prefix}/{}", e.name),
                e.value,
                e.tolerance,
            ));
        }
    }
    Report::new(
        "verify --suite all",
        serde_json::json!({"seed": seed}),
        serde_json::json!({}),
        entries,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for name in ["auts", "coverings", "metrics"] {
            let r = run_suite(name, 0).unwrap();
            assert!(r.passed(), "{name}:\n{}", r.table());
        }
    }

    #[test]
    fn injectivize_and_counterexample_suites_pass() {
        for name in ["injectivize", "counterexample"] {
            let r = run_suite(name, 0).unwrap();
            assert!(r.passed(), "{name}:\n{}", r.table());
        }
    }

    #[test]
    fn unknown_suite_is_an_input_error() {
        assert!(matches!(
            run_suite("nope", 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn suite_all_is_deterministic() {
        let a = suite_all(0).to_json();
        let b = suite_all(0).to_json();
        assert_eq!(a, b);
        let c = suite_all(1).to_json();
        assert_ne!(a, c);
    }
}
