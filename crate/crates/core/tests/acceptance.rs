//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured extremes. Run with
//! `cargo test -p kh-core --test acceptance -- --nocapture`.

use kh_core::aut::{moebius_h, phi_involution};
use kh_core::counterexample::{certify_pair, intersection_persistence, transversality_check};
use kh_core::covering::covering_of;
use kh_core::injectivize::CaseTag;
use kh_core::metrics::{kappa, kappa_product, EqualityCase};
use kh_core::suites::{random_pair_for_branch, run_branch_case, ALL_BRANCHES};
use kh_core::{sample, C, PlanarDomain};
use std::time::Instant;

fn budget(name: &str, start: Instant, limit_s: f64) {
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < limit_s,
        "{name}: runtime {elapsed:.2}s exceeds the {limit_s}s budget"
    );
}

#[test]
fn criterion_1_classification_truth_table() {
    let start = Instant::now();
    let names = ["disc", "plane", "cstar", "pdisc", "annulus:0.3"];
    let mut checked = 0;
    for (i, n1) in names.iter().enumerate() {
        for (j, n2) in names.iter().enumerate() {
            let d1 = PlanarDomain::parse_descriptor(n1).unwrap();
            let d2 = PlanarDomain::parse_descriptor(n2).unwrap();
            let verdict = kh_core::metrics::classify_product(&d1, &d2);
            let expect_not_equal = i >= 3 && j >= 3;
            assert_eq!(
                verdict.case == EqualityCase::NotEqual,
                expect_not_equal,
                "{n1} x {n2} -> {:?}",
                verdict.case
            );
            // the equal cases name the right witness kind
            if !expect_not_equal {
                let sc = d1.is_simply_connected() || d2.is_simply_connected();
                assert_eq!(
                    verdict.case,
                    if sc {
                        EqualityCase::SimplyConnectedFactor
                    } else {
                        EqualityCase::CstarFactor
                    }
                );
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 25);
    budget("criterion 1", start, 1.0);
    println!("criterion 1: PASS — classification matrix 25/25 in {:.3}s", start.elapsed().as_secs_f64());
}

#[test]
fn criterion_2_injectivization_contract() {
    let start = Instant::now();
    let thetas = [0.3, 0.6, 0.9];
    let per_branch = 50usize;
    let mut worst_jet: f64 = 0.0;
    let mut min_zero_free = f64::INFINITY;
    let mut runs = 0usize;
    for branch in ALL_BRANCHES {
        for &theta in &thetas {
            let results = kh_core::par::map_collect(per_branch, |i| {
                let mut rng = sample::rng(1000 + branch as u64, (i as u64) * 31 + (theta * 100.0) as u64);
                let pair = random_pair_for_branch(branch, theta, &mut rng);
                run_branch_case(branch, &pair, theta, i as u64, 10_000)
            });
            for r in results {
                let (res, min_abs) = r.unwrap_or_else(|e| panic!("{branch:?} θ={theta}: {e}"));
                worst_jet = worst_jet.max(res.jet_residual);
                if matches!(
                    branch,
                    CaseTag::PuncturedPower | CaseTag::PuncturedUnit | CaseTag::PuncturedSwapped
                ) {
                    min_zero_free = min_zero_free.min(min_abs);
                }
                runs += 1;
            }
        }
    }
    assert_eq!(runs, 5 * 3 * per_branch);
    assert!(worst_jet < 1e-10, "worst jet residual {worst_jet:.3e}");
    assert!(min_zero_free > 0.0);
    budget("criterion 2", start, 20.0);
    println!(
        "criterion 2: PASS — {runs} constructions, worst jet residual {worst_jet:.2e}, min |g1| {min_zero_free:.2e}, {:.2}s",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_3_counterexample_certificates() {
    let start = Instant::now();
    let pairs = [
        ("pdisc", "pdisc"),
        ("annulus:0.3", "pdisc"),
        ("annulus:0.3", "annulus:0.5"),
    ];
    let mut worst_cover: f64 = 0.0;
    let mut worst_inv: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    let mut worst_trans: f64 = 0.0;
    let mut min_det = f64::INFINITY;
    for (d1, d2) in pairs {
        let c1 = covering_of(&PlanarDomain::parse_descriptor(d1).unwrap()).unwrap();
        let c2 = covering_of(&PlanarDomain::parse_descriptor(d2).unwrap()).unwrap();
        let cert = certify_pair(&c1, &c2, None).unwrap();
        worst_cover = worst_cover
            .max(cert.residuals["cover_equality_1"])
            .max(cert.residuals["cover_equality_2"]);
        worst_inv = worst_inv.max(cert.residuals["involution_defect"]);
        worst_rel = worst_rel.max(cert.residuals["det_two_route_rel"]);
        min_det = min_det.min(cert.absdet());
        let (s1, s2) = cert.difference_surfaces();
        let jac = transversality_check(&s1, &s2, &cert);
        worst_trans =
            worst_trans.max((jac + cert.det_value).norm() / cert.det_value.norm());
        println!(
            "  {d1} x {d2}: branch {:?}, |det| = {:.6e}",
            cert.branch,
            cert.absdet()
        );
    }
    assert!(worst_cover < 1e-9, "covering equality {worst_cover:.3e}");
    assert!(worst_inv < 1e-10, "involution {worst_inv:.3e}");
    assert!(min_det > 1e-6, "|det| {min_det:.3e}");
    assert!(worst_rel < 1e-9, "det route agreement {worst_rel:.3e}");
    assert!(worst_trans < 1e-9, "transversality sign {worst_trans:.3e}");
    budget("criterion 3", start, 10.0);
    println!(
        "criterion 3: PASS — 3 certificates, covering equality ≤ {worst_cover:.2e}, det agreement ≤ {worst_rel:.2e}, min |det| {min_det:.2e}, {:.2}s",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_4_real_a_dichotomy() {
    let start = Instant::now();
    let psi = moebius_h(C::new(-0.8, 0.0)).unwrap();
    let mut worst_real: f64 = 0.0;
    for k in 0..20 {
        let a = C::new(-0.85 + 0.085 * k as f64, 0.0);
        let phi = phi_involution(a, &psi).unwrap();
        worst_real = worst_real.max((phi.derivative(a) + psi.derivative(a)).norm());
    }
    assert!(worst_real < 1e-10, "real margin {worst_real:.3e}");

    let mut min_nonreal = f64::INFINITY;
    let mut rng = sample::rng(4, 0);
    let mut tried = 0;
    while tried < 20 {
        let mut a = sample::random_in_disc(&mut rng, 0.8);
        if a.im.abs() < 0.05 {
            a.im = 0.2;
        }
        let phi = phi_involution(a, &psi).unwrap();
        min_nonreal = min_nonreal.min((phi.derivative(a) + psi.derivative(a)).norm());
        tried += 1;
    }
    assert!(min_nonreal > 1e-3, "non-real margin {min_nonreal:.3e}");
    budget("criterion 4", start, 1.0);
    println!(
        "criterion 4: PASS — real-axis defect ≤ {worst_real:.2e}, non-real margin ≥ {min_nonreal:.2e}, {:.3}s",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_5_covering_metric_consistency() {
    let start = Instant::now();
    // p ∘ ψ ≡ p on 1e3 points per catalog entry
    let mut worst_deck: f64 = 0.0;
    for desc in ["disc", "plane", "cstar", "pdisc", "annulus:0.3", "annulus:0.5"] {
        let cov = covering_of(&PlanarDomain::parse_descriptor(desc).unwrap()).unwrap();
        worst_deck = worst_deck.max(cov.deck_identity_max_residual(1000, 0.9));
    }
    assert!(worst_deck < 1e-9, "deck identity {worst_deck:.3e}");

    // κ fiber independence
    let mut worst_fiber: f64 = 0.0;
    for dom in [PlanarDomain::pdisc(), PlanarDomain::annulus(0.3).unwrap()] {
        let cov = covering_of(&dom).unwrap();
        for z in sample::annulus_points(71, 60, 0.3, 0.9) {
            if !dom.contains(z) {
                continue;
            }
            let zt = cov.fiber_point(z).unwrap();
            let moved = cov.deck_dd().unwrap().apply(kh_core::dd::DdC::from_c(zt));
            let a = kh_core::metrics::kappa_via_fiber(&cov, zt, C::new(1.0, 0.0));
            let b = kh_core::metrics::kappa_via_fiber_dd(&cov, moved, C::new(1.0, 0.0));
            worst_fiber = worst_fiber.max((a - b).abs() / a.max(1.0));
        }
    }
    assert!(worst_fiber < 1e-9, "fiber independence {worst_fiber:.3e}");

    // Schwarz-Pick normalization on 100 points
    let disc = PlanarDomain::disc();
    let mut worst_sp: f64 = 0.0;
    for z in sample::disc_points(73, 100, 0.95) {
        let k = kappa(&disc, z, C::new(1.0, 0.0)).unwrap();
        worst_sp = worst_sp.max((k * (1.0 - z.norm_sqr()) - 1.0).abs());
    }
    assert!(worst_sp < 1e-10, "Schwarz-Pick identity {worst_sp:.3e}");

    // product max formula vs direct disc computation on 100 random points
    let mut rng = sample::rng(5, 0);
    let mut worst_prod: f64 = 0.0;
    for _ in 0..100 {
        let a1 = sample::random_in_disc(&mut rng, 0.9);
        let a2 = sample::random_in_disc(&mut rng, 0.9);
        let x1 = sample::random_in_disc(&mut rng, 2.0);
        let x2 = sample::random_in_disc(&mut rng, 2.0);
        let v = kappa_product(&disc, &disc, (a1, a2), (x1, x2)).unwrap();
        let d = (x1.norm() / (1.0 - a1.norm_sqr())).max(x2.norm() / (1.0 - a2.norm_sqr()));
        worst_prod = worst_prod.max((v - d).abs() / d.max(1.0));
    }
    assert!(worst_prod < 1e-12, "product formula {worst_prod:.3e}");
    budget("criterion 5", start, 5.0);
    println!(
        "criterion 5: PASS — deck ≤ {worst_deck:.2e}, fiber ≤ {worst_fiber:.2e}, Schwarz-Pick ≤ {worst_sp:.2e}, product ≤ {worst_prod:.2e}, {:.2}s",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_6_intersection_persistence() {
    let start = Instant::now();
    let pairs = [
        ("pdisc", "pdisc"),
        ("annulus:0.3", "pdisc"),
        ("annulus:0.3", "annulus:0.5"),
    ];
    for (d1, d2) in pairs {
        let c1 = covering_of(&PlanarDomain::parse_descriptor(d1).unwrap()).unwrap();
        let c2 = covering_of(&PlanarDomain::parse_descriptor(d2).unwrap()).unwrap();
        let cert = certify_pair(&c1, &c2, None).unwrap();
        let (s1, s2) = cert.difference_surfaces();
        let small = intersection_persistence(&s1, &s2, &cert, 1e-3).unwrap();
        let large = intersection_persistence(&s1, &s2, &cert, 1e-2).unwrap();
        assert!(small.residual < 1e-10 && large.residual < 1e-10);
        assert!(small.zero.0 != small.zero.1, "off-diagonal zero");
        let ratio = large.displacement / small.displacement;
        assert!(
            (5.0..20.0).contains(&ratio),
            "{d1} x {d2}: displacement ratio {ratio}"
        );
        println!(
            "  {d1} x {d2}: displacement {:.3e} -> {:.3e} (ratio {ratio:.2}), C = {:.3e}",
            small.displacement, large.displacement, small.scaled_constant
        );
    }
    budget("criterion 6", start, 5.0);
    println!(
        "criterion 6: PASS — Newton persistence linear within factor 2 on 3 certificates, {:.2}s",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_7_deterministic_reports() {
    let a = kh_core::suites::suite_all(0).to_json();
    let b = kh_core::suites::suite_all(0).to_json();
    assert_eq!(a, b, "verify --suite all --seed 0 must be byte-identical");
    println!("criterion 7: PASS — two verify-all runs byte-identical ({} bytes)", a.len());
}
