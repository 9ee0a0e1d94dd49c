//! Counterexample certificates for products of disc-covered domains with
//! non-injective coverings: equal-displacement normalization, the direct and
//! reduced determinant branches, transversality of the difference surfaces,
//! and Newton persistence of the intersection under perturbation.
//!
//! Pipeline: locate z_1, z_2 with equal deck displacement 1-ε, pull both
//! coverings back by interpolating automorphisms h_j with h_j(-d) = z_j,
//! h_j(d) = ψ_j(z_j) where m(-d,d) = 1-ε, then either read the certificate at
//! q = (-d, d) directly (possibly precomposing -id on one row) or, when both
//! pulled-back decks have derivative ±1 at -d, reduce to the common deck h_c
//! and certify at q = (a, ψ(a)) through the swap involution φ_a.
//!
//! All certificate-grade evaluation runs on the double-double layer: annulus
//! decks displace by 1-1e-12 and the covering derivatives reach ~1e11 at the
//! certificate points, far past plain f64 position resolution.

use crate::aut::DiscAut;
use crate::covering::{
    best_displacement_direction, deck_displacement_dd, Covering, CoverSpace,
};
use crate::dd::{moebius_distance_dd, Dd, DdAut, DdC};
use crate::{Error, Result, C};
use serde::Serialize;
use std::collections::BTreeMap;

const DET_FLOOR: f64 = 1e-6;
const PM_MATCH_REL: f64 = 1e-8;
const DEFAULT_A: C = C::new(0.0, 0.5);
const FALLBACK_A: [C; 4] = [
    C::new(0.0, 0.3),
    C::new(0.0, 0.7),
    C::new(0.2, 0.4),
    C::new(-0.4, 0.3),
];

/// Output of the equal-displacement search.
#[derive(Clone, Debug)]
pub struct EqualDisplacement {
    pub epsilon: f64,
    pub z1: C,
    pub z2: C,
    /// 1 - ε.
    pub level: f64,
    level_dd: Dd,
    z_dd: [DdC; 2],
}

fn require_certifiable(cov: &Covering) -> Result<()> {
    if cov.cover != CoverSpace::Disc {
        return Err(Error::CaseMismatch(format!(
            "{} is covered by the plane; the product carries no counterexample",
            cov.domain.descriptor()
        )));
    }
    if cov.deck.is_identity() {
        return Err(Error::CaseMismatch(format!(
            "{} has an injective covering; the product carries no counterexample",
            cov.domain.descriptor()
        )));
    }
    Ok(())
}

/// First crossing of the displacement level along the ray t*dir, bisected to
/// the f64 resolution of t against the double-double displacement.
fn crossing(deck: &DdAut, dir: C, level: Dd) -> Result<DdC> {
    let disp = |t: f64| -> Dd {
        let z = DdC::from_c(dir * t);
        deck_displacement_dd(deck, z)
    };
    if !disp(0.0).lt(level) {
        return Ok(DdC::ZERO);
    }
    let mut lo = 0.0f64;
    let mut hi = f64::NAN;
    let steps = 400;
    for k in 1..=steps {
        let frac = k as f64 / steps as f64;
        let t = (1.0 - 1e-13) * (1.0 - (1.0 - frac).powi(4));
        if !disp(t).lt(level) {
            hi = t;
            break;
        }
        lo = t;
    }
    if hi.is_nan() {
        return Err(Error::Numerics(
            "displacement level unreachable along the search ray".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if disp(mid).lt(level) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DdC::from_c(dir * hi))
}

/// Find ε in (0,1) and z_1, z_2 with m(z_j, ψ_j(z_j)) = 1-ε for both decks.
/// The shared level is max(m(0, ψ_1(0)), m(0, ψ_2(0)), 0.9); the factor whose
/// displacement floor equals the level sits exactly at z_j = 0.
pub fn find_equal_displacement(
    cov1: &Covering,
    cov2: &Covering,
) -> Result<EqualDisplacement> {
    require_certifiable(cov1)?;
    require_certifiable(cov2)?;
    let d1 = cov1.deck_dd().expect("disc cover has an automorphism deck");
    let d2 = cov2.deck_dd().expect("disc cover has an automorphism deck");
    let floor1 = deck_displacement_dd(d1, DdC::ZERO);
    let floor2 = deck_displacement_dd(d2, DdC::ZERO);
    let mut level = Dd::from_f64(0.9);
    if level.lt(floor1) {
        level = floor1;
    }
    if level.lt(floor2) {
        level = floor2;
    }
    let gap = Dd::ONE.sub(level).to_f64();
    // measured: the determinant two-route agreement degrades like 1/gap^2 and
    // crosses 1e-9 near gap ~ 3e-17; stop with headroom
    if gap < 1e-15 {
        return Err(Error::InvalidArgument(format!(
            "deck displacement floor 1-{gap:.2e} exceeds the certificate precision range \
             (annulus radii up to ~0.57 are certifiable)"
        )));
    }
    let z_dd = [
        crossing(d1, best_displacement_direction(d1), level)?,
        crossing(d2, best_displacement_direction(d2), level)?,
    ];
    // public f64 contract: displacement within 1e-10 of the shared level
    #[cfg(debug_assertions)]
    for (deck, z) in [(d1, z_dd[0]), (d2, z_dd[1])] {
        let m = deck_displacement_dd(deck, z);
        debug_assert!(m.sub(level).abs().to_f64() < 1e-10);
    }
    Ok(EqualDisplacement {
        epsilon: gap,
        z1: z_dd[0].to_c(),
        z2: z_dd[1].to_c(),
        level: level.to_f64(),
        level_dd: level,
        z_dd,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BranchTag {
    /// q = (-d, d), φ = (id, id).
    DirectId,
    /// q = (-d, d), φ = (-id, id).
    DirectNegId,
    /// q = (a, ψ(a)), φ = (id, φ_a).
    Reduced,
}

/// Normalized pair: interpolated h_j, pulled-back derivative data, and the
/// branch decision.
#[derive(Clone, Debug)]
pub struct NormalizedPair {
    pub d: f64,
    pub level: f64,
    pub h1: DiscAut,
    pub h2: DiscAut,
    /// (p_j ∘ h_j)'(-d) and (p_j ∘ h_j)'(d).
    pub entries: [(C, C); 2],
    /// Conjugated deck derivatives ψ̃_j'(-d).
    pub conjugated_derivatives: (C, C),
    /// True when both factors satisfy (p∘h)'(-d) = ±(p∘h)'(d) and the proof
    /// reduces to the common deck h_c.
    pub reduced: bool,
    /// c = -2d/(1+d²) (reduced branch).
    pub c: f64,
    pub interpolation_mismatch: [f64; 2],
    covs: [Covering; 2],
    d_dd: Dd,
    h_dd: [DdAut; 2],
    entries_dd: [(DdC, DdC); 2],
    s_dd: [DdC; 2],
}

fn ptilde_deriv(cov: &Covering, h: &DdAut, z: DdC) -> DdC {
    let (_, dp) = cov.p_dd(h.apply(z));
    dp.mul(h.derivative(z))
}

fn interpolant_dd(x1: DdC, y1: DdC, x2: DdC, y2: DdC) -> DdAut {
    let hx = DdAut::moebius(x1);
    let hy = DdAut::moebius(y1);
    let u = hy.apply(y2);
    let v = hx.apply(x2);
    let rot = if v.abs().to_f64() == 0.0 || u.abs().to_f64() == 0.0 {
        DdAut::identity()
    } else {
        // unnormalized rotation keeps h(x2) = y2 exact in dd arithmetic
        DdAut::rotation(u.div(v))
    };
    hy.invert().compose(&rot.compose(&hx))
}

/// Interpolate h_j with h_j(-d) = z_j, h_j(d) = ψ_j(z_j) for the shared d
/// with m(-d, d) = 1-ε, and decide the determinant branch.
pub fn normalize(
    cov1: &Covering,
    cov2: &Covering,
    eq: &EqualDisplacement,
) -> Result<NormalizedPair> {
    let level = eq.level_dd;
    // d solves 2d/(1+d^2) = level
    let d_dd = Dd::ONE
        .sub(Dd::ONE.sub(level.mul(level)).sqrt())
        .div(level);
    let d = d_dd.to_f64();
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Numerics(format!("normalized offset d = {d}")));
    }
    let x1 = DdC::new(d_dd.neg(), Dd::ZERO);
    let x2 = DdC::new(d_dd, Dd::ZERO);
    let m_base = moebius_distance_dd(x1, x2);

    let covs = [cov1.clone(), cov2.clone()];
    let mut h_dd = [DdAut::identity(), DdAut::identity()];
    let mut entries_dd = [(DdC::ZERO, DdC::ZERO); 2];
    let mut s_dd = [DdC::ZERO; 2];
    let mut mismatch = [0.0f64; 2];
    for j in 0..2 {
        let deck = covs[j].deck_dd().expect("certifiable covering");
        let zj = eq.z_dd[j];
        let wj = deck.apply(zj);
        let m_target = moebius_distance_dd(zj, wj);
        mismatch[j] = m_target.sub(m_base).abs().to_f64();
        if mismatch[j] > 1e-10 {
            return Err(Error::Numerics(format!(
                "interpolation invariant mismatch {:.3e} on factor {}",
                mismatch[j],
                j + 1
            )));
        }
        let h = interpolant_dd(x1, zj, x2, wj);
        entries_dd[j] = (
            ptilde_deriv(&covs[j], &h, x1),
            ptilde_deriv(&covs[j], &h, x2),
        );
        s_dd[j] = h.invert().compose(&deck.compose(&h)).derivative(x1);
        h_dd[j] = h;
    }

    let pm_matched = |(a, b): (DdC, DdC)| -> bool {
        let scale = a.abs().to_f64();
        a.sub(b).abs().to_f64() <= PM_MATCH_REL * scale
            || a.add(b).abs().to_f64() <= PM_MATCH_REL * scale
    };
    let reduced = pm_matched(entries_dd[0]) && pm_matched(entries_dd[1]);

    let to_aut = |a: &DdAut| -> DiscAut {
        let (phase, center) = a.to_aut_f64();
        DiscAut::new(phase, center).expect("interpolant is a disc automorphism")
    };
    Ok(NormalizedPair {
        d,
        level: eq.level,
        h1: to_aut(&h_dd[0]),
        h2: to_aut(&h_dd[1]),
        entries: [
            (entries_dd[0].0.to_c(), entries_dd[0].1.to_c()),
            (entries_dd[1].0.to_c(), entries_dd[1].1.to_c()),
        ],
        conjugated_derivatives: (s_dd[0].to_c(), s_dd[1].to_c()),
        reduced,
        c: level.neg().to_f64(),
        interpolation_mismatch: mismatch,
        covs,
        d_dd,
        h_dd,
        entries_dd,
        s_dd,
    })
}

/// A certified witness: p_j(φ_j(q_1)) = p_j(φ_j(q_2)) for both factors with
/// det[(p̃_j∘φ_j)'(q_k)] away from zero.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub domain1: String,
    pub domain2: String,
    pub branch: BranchTag,
    pub q: (C, C),
    pub phi1: DiscAut,
    pub phi2: DiscAut,
    pub h1: DiscAut,
    pub h2: DiscAut,
    pub d: f64,
    pub epsilon: f64,
    /// Reduced-branch data.
    pub c: Option<f64>,
    pub a: Option<C>,
    pub det_value: C,
    /// The determinant through the automorphism-derivative route.
    pub det_alt: C,
    pub residuals: BTreeMap<String, f64>,
    ctx: CertContext,
}

#[derive(Clone, Debug)]
struct CertContext {
    covs: [Covering; 2],
    h: [DdAut; 2],
    phi: [DdAut; 2],
    q: [DdC; 2],
    det: DdC,
}

/// One factor's pulled-back covering P_j = p_j ∘ h_j ∘ φ_j together with the
/// difference function h0(z1, z2) = P_j(z1) - P_j(z2) on E².
#[derive(Clone, Debug)]
pub struct DifferenceSurface {
    cov: Covering,
    h: DdAut,
    phi: DdAut,
}

impl DifferenceSurface {
    pub(crate) fn value_dd(&self, z: DdC) -> DdC {
        let (v, _) = self.cov.p_dd(self.h.apply(self.phi.apply(z)));
        v
    }

    pub(crate) fn deriv_dd(&self, z: DdC) -> DdC {
        let w = self.phi.apply(z);
        let (_, dp) = self.cov.p_dd(self.h.apply(w));
        dp.mul(self.h.derivative(w)).mul(self.phi.derivative(z))
    }

    /// h0(z1, z2) = P(z1) - P(z2); vanishes on the diagonal and at the
    /// certificate's q.
    pub fn difference(&self, z1: C, z2: C) -> C {
        self.value_dd(DdC::from_c(z1))
            .sub(self.value_dd(DdC::from_c(z2)))
            .to_c()
    }
}

impl Certificate {
    pub fn difference_surfaces(&self) -> (DifferenceSurface, DifferenceSurface) {
        (
            DifferenceSurface {
                cov: self.ctx.covs[0].clone(),
                h: self.ctx.h[0],
                phi: self.ctx.phi[0],
            },
            DifferenceSurface {
                cov: self.ctx.covs[1].clone(),
                h: self.ctx.h[1],
                phi: self.ctx.phi[1],
            },
        )
    }

    pub fn absdet(&self) -> f64 {
        self.det_value.norm()
    }

    fn q_dd(&self) -> [DdC; 2] {
        self.ctx.q
    }

    /// JSON payload with every field, residual, and hi/lo pairs for the
    /// position-critical quantities.
    pub fn to_json_value(&self) -> serde_json::Value {
        fn ddc(v: DdC) -> serde_json::Value {
            serde_json::json!({
                "re_hi": v.re.hi, "re_lo": v.re.lo,
                "im_hi": v.im.hi, "im_lo": v.im.lo,
            })
        }
        fn cplx(z: C) -> serde_json::Value {
            serde_json::json!({"re": z.re, "im": z.im})
        }
        fn aut(a: &DiscAut) -> serde_json::Value {
            serde_json::json!({"phase": cplx(a.phase), "center": cplx(a.center)})
        }
        serde_json::json!({
            "schema_version": crate::report::SCHEMA_VERSION,
            "domain1": self.domain1,
            "domain2": self.domain2,
            "branch": format!("{:?}", self.branch),
            "q": [cplx(self.q.0), cplx(self.q.1)],
            "q_dd": [ddc(self.ctx.q[0]), ddc(self.ctx.q[1])],
            "phi1": aut(&self.phi1),
            "phi2": aut(&self.phi2),
            "h1": aut(&self.h1),
            "h2": aut(&self.h2),
            "d": self.d,
            "epsilon": self.epsilon,
            "c": self.c,
            "a": self.a.map(cplx),
            "det_value": cplx(self.det_value),
            "det_alt": cplx(self.det_alt),
            "abs_det": self.absdet(),
            "residuals": self.residuals,
        })
    }
}

fn involution_defect(phi: &DdAut) -> f64 {
    let mut worst: f64 = 0.0;
    for z in [
        C::new(0.1, 0.2),
        C::new(-0.4, 0.1),
        C::new(0.3, -0.5),
        C::new(0.0, 0.6),
        C::new(-0.2, -0.3),
    ] {
        let zd = DdC::from_c(z);
        let w = phi.apply(phi.apply(zd));
        worst = worst.max(w.sub(zd).abs().to_f64());
    }
    worst
}

/// Assemble the certificate from a normalized pair. `a` seeds the reduced
/// branch (default 0.5i with a fallback sweep) and must be non-real there;
/// the direct branch ignores it.
pub fn build_certificate(np: &NormalizedPair, a: Option<C>) -> Result<Certificate> {
    let d_dd = np.d_dd;
    let x1 = DdC::new(d_dd.neg(), Dd::ZERO);
    let x2 = DdC::new(d_dd, Dd::ZERO);
    let (a1, b1) = np.entries_dd[0];
    let (a2, b2) = np.entries_dd[1];

    let mut residuals = BTreeMap::new();
    residuals.insert(
        "interpolation_mismatch_1".to_string(),
        np.interpolation_mismatch[0],
    );
    residuals.insert(
        "interpolation_mismatch_2".to_string(),
        np.interpolation_mismatch[1],
    );

    if !np.reduced {
        // direct branch: q = (-d, d); try (id, id) then (-id, id)
        let det1 = a1.mul(b2).sub(b1.mul(a2));
        let det1_alt = b1.mul(b2).mul(np.s_dd[0].sub(np.s_dd[1]));
        let (branch, phi, det, det_alt) = if det1.abs().to_f64() > DET_FLOOR {
            (
                BranchTag::DirectId,
                [DdAut::identity(), DdAut::identity()],
                det1,
                det1_alt,
            )
        } else {
            let det2 = a1.mul(a2).sub(b1.mul(b2));
            let det2_alt = b1.mul(b2).mul(np.s_dd[0].mul(np.s_dd[1]).sub(DdC::ONE));
            if det2.abs().to_f64() <= DET_FLOOR {
                return Err(Error::Numerics(
                    "both direct-branch determinants vanish numerically".into(),
                ));
            }
            (
                BranchTag::DirectNegId,
                [DdAut::neg_id(), DdAut::identity()],
                det2,
                det2_alt,
            )
        };
        let q = [x1, x2];
        #[allow(clippy::needless_range_loop)]
        for j in 0..2 {
            let u1 = np.h_dd[j].apply(phi[j].apply(q[0]));
            let u2 = np.h_dd[j].apply(phi[j].apply(q[1]));
            let (v1, _) = np.covs[j].p_dd(u1);
            let (v2, _) = np.covs[j].p_dd(u2);
            residuals.insert(
                format!("cover_equality_{}", j + 1),
                v1.sub(v2).abs().to_f64(),
            );
        }
        residuals.insert(
            "involution_defect".to_string(),
            involution_defect(&phi[0]).max(involution_defect(&phi[1])),
        );
        let rel = det.sub(det_alt).abs().div(det.abs()).to_f64();
        residuals.insert("det_two_route_rel".to_string(), rel);
        residuals.insert("abs_det".to_string(), det.abs().to_f64());
        enforce_certificate_invariants(&residuals)?;
        let to_aut = |a: &DdAut| {
            let (p, c) = a.to_aut_f64();
            DiscAut::new(p, c).expect("involution is an automorphism")
        };
        return Ok(Certificate {
            domain1: np.covs[0].domain.descriptor(),
            domain2: np.covs[1].domain.descriptor(),
            branch,
            q: (q[0].to_c(), q[1].to_c()),
            phi1: to_aut(&phi[0]),
            phi2: to_aut(&phi[1]),
            h1: np.h1,
            h2: np.h2,
            d: np.d,
            epsilon: 1.0 - np.level,
            c: None,
            a: None,
            det_value: det.to_c(),
            det_alt: det_alt.to_c(),
            residuals,
            ctx: CertContext {
                covs: np.covs.clone(),
                h: np.h_dd,
                phi,
                q,
                det,
            },
        });
    }

    // reduced branch: both conjugated decks are h_c with c = -2d/(1+d^2)
    let c_exact = np
        .d_dd
        .mul_f64(2.0)
        .div(Dd::ONE.add(np.d_dd.mul(np.d_dd)))
        .neg();
    let psi = DdAut::moebius(DdC::new(c_exact, Dd::ZERO));

    // deck agreement: conjugated decks coincide with h_c on samples
    let mut deck_defect: f64 = 0.0;
    for j in 0..2 {
        let conj = np.h_dd[j]
            .invert()
            .compose(&np.covs[j].deck_dd().expect("certifiable").compose(&np.h_dd[j]));
        for z in [C::new(0.2, 0.1), C::new(-0.3, 0.4), C::new(0.1, -0.5)] {
            let zd = DdC::from_c(z);
            deck_defect =
                deck_defect.max(conj.apply(zd).sub(psi.apply(zd)).abs().to_f64());
        }
        residuals.insert(
            format!("conjugated_fixed_point_{}", j + 1),
            conj.apply(DdC::new(np.d_dd.neg(), Dd::ZERO))
                .sub(DdC::new(np.d_dd, Dd::ZERO))
                .abs()
                .to_f64(),
        );
        let s = np.s_dd[j];
        residuals.insert(
            format!("conjugated_derivative_square_{}", j + 1),
            s.mul(s).sub(DdC::ONE).abs().to_f64(),
        );
    }
    residuals.insert("deck_normal_form_defect".to_string(), deck_defect);

    let mut candidates = Vec::new();
    if let Some(given) = a {
        if given.im.abs() < 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "reduced-branch base point a = {} must be non-real: real a forces \
                 φ_a'(a) = -ψ'(a) and a vanishing determinant",
                crate::format_complex(given)
            )));
        }
        candidates.push(given);
    } else {
        candidates.push(DEFAULT_A);
        candidates.extend_from_slice(&FALLBACK_A);
    }

    let mut last_err = None;
    for cand in candidates {
        if cand.norm() >= 1.0 {
            last_err = Some(Error::InvalidArgument("base point outside E".into()));
            continue;
        }
        let a_dd = DdC::from_c(cand);
        let pa = psi.apply(a_dd);
        // φ_a = h_{-a} ∘ (-id) ∘ h_{h_a(ψ(a))} ∘ h_a
        let ha = DdAut::moebius(a_dd);
        let b = ha.apply(pa);
        let phi = DdAut::moebius(a_dd.neg())
            .compose(&DdAut::neg_id().compose(&DdAut::moebius(b).compose(&ha)));
        let q = [a_dd, pa];

        let dp1 = |z: DdC| ptilde_deriv(&np.covs[0], &np.h_dd[0], z);
        let dp2 = |z: DdC| {
            let w = phi.apply(z);
            ptilde_deriv(&np.covs[1], &np.h_dd[1], w).mul(phi.derivative(z))
        };
        let det = dp1(q[0]).mul(dp2(q[1])).sub(dp1(q[1]).mul(dp2(q[0])));
        let spa = psi.derivative(a_dd);
        let fpa = phi.derivative(a_dd);
        let det_simpl = ptilde_deriv(&np.covs[0], &np.h_dd[0], pa)
            .mul(ptilde_deriv(&np.covs[1], &np.h_dd[1], pa))
            .mul(spa.mul(spa).div(fpa).sub(fpa));
        let raw_margin = fpa.add(spa).abs().to_f64();
        let rel_margin = raw_margin / spa.abs().to_f64();
        if det.abs().to_f64() <= DET_FLOOR || rel_margin <= 1e-3 {
            last_err = Some(Error::Numerics(format!(
                "degenerate base point {} (|det| = {:.3e}, relative margin {:.3e})",
                crate::format_complex(cand),
                det.abs().to_f64(),
                rel_margin
            )));
            continue;
        }

        let mut res = residuals.clone();
        #[allow(clippy::needless_range_loop)]
        for j in 0..2 {
            let phis = if j == 0 { DdAut::identity() } else { phi };
            let u1 = np.h_dd[j].apply(phis.apply(q[0]));
            let u2 = np.h_dd[j].apply(phis.apply(q[1]));
            let (v1, _) = np.covs[j].p_dd(u1);
            let (v2, _) = np.covs[j].p_dd(u2);
            res.insert(format!("cover_equality_{}", j + 1), v1.sub(v2).abs().to_f64());
        }
        res.insert("involution_defect".to_string(), involution_defect(&phi));
        res.insert(
            "phi_derivative_product".to_string(),
            phi.derivative(q[0])
                .mul(phi.derivative(q[1]))
                .sub(DdC::ONE)
                .abs()
                .to_f64(),
        );
        res.insert("dichotomy_margin_raw".to_string(), raw_margin);
        res.insert("dichotomy_margin_rel".to_string(), rel_margin);
        res.insert(
            "det_two_route_rel".to_string(),
            det.sub(det_simpl).abs().div(det.abs()).to_f64(),
        );
        res.insert("abs_det".to_string(), det.abs().to_f64());
        enforce_certificate_invariants(&res)?;

        let to_aut = |a: &DdAut| {
            let (p, c) = a.to_aut_f64();
            DiscAut::new(p, c).expect("involution is an automorphism")
        };
        return Ok(Certificate {
            domain1: np.covs[0].domain.descriptor(),
            domain2: np.covs[1].domain.descriptor(),
            branch: BranchTag::Reduced,
            q: (q[0].to_c(), q[1].to_c()),
            phi1: DiscAut::identity(),
            phi2: to_aut(&phi),
            h1: np.h1,
            h2: np.h2,
            d: np.d,
            epsilon: 1.0 - np.level,
            c: Some(c_exact.to_f64()),
            a: Some(cand),
            det_value: det.to_c(),
            det_alt: det_simpl.to_c(),
            residuals: res,
            ctx: CertContext {
                covs: np.covs.clone(),
                h: np.h_dd,
                phi: [DdAut::identity(), phi],
                q,
                det,
            },
        });
    }
    Err(last_err.unwrap_or_else(|| Error::Numerics("no usable base point".into())))
}

/// A certificate must actually certify: the covering equalities, involution
/// and determinant agreement are hard invariants, not just report entries.
fn enforce_certificate_invariants(res: &BTreeMap<String, f64>) -> Result<()> {
    for (name, tol) in [
        ("cover_equality_1", 1e-9),
        ("cover_equality_2", 1e-9),
        ("involution_defect", 1e-10),
        ("det_two_route_rel", 1e-9),
    ] {
        if let Some(v) = res.get(name) {
            if !(v.is_finite() && *v <= tol) {
                return Err(Error::Numerics(format!(
                    "certificate invariant {name} = {v:.3e} exceeds {tol:.0e}"
                )));
            }
        }
    }
    Ok(())
}

/// Jacobian determinant of (h0_1, h0_2) at q; equals -det_value.
pub fn transversality_check(
    s1: &DifferenceSurface,
    s2: &DifferenceSurface,
    cert: &Certificate,
) -> C {
    let [q1, q2] = cert.q_dd();
    let j11 = s1.deriv_dd(q1);
    let j12 = s1.deriv_dd(q2).neg();
    let j21 = s2.deriv_dd(q1);
    let j22 = s2.deriv_dd(q2).neg();
    j11.mul(j22).sub(j12.mul(j21)).to_c()
}

#[derive(Clone, Debug, Serialize)]
pub struct PersistenceResult {
    pub delta: f64,
    pub zero: (C, C),
    pub displacement: f64,
    pub residual: f64,
    pub iterations: usize,
    /// displacement * |det| / δ, the recorded conditioning constant.
    pub scaled_constant: f64,
}

/// Newton continuation of the certificate intersection under the perturbation
/// p̃_j -> p̃_j + δ e_j with e = {1, z}: the non-constant perturbation sits on
/// the factor with the larger derivative scale, which keeps the perturbed zero
/// inside E for every certifiable pair.
pub fn intersection_persistence(
    s1: &DifferenceSurface,
    s2: &DifferenceSurface,
    cert: &Certificate,
    delta: f64,
) -> Result<PersistenceResult> {
    if !(0.0..=1e-2).contains(&delta) {
        return Err(Error::InvalidArgument(format!(
            "perturbation size {delta} must lie in [0, 1e-2]"
        )));
    }
    let [q1, q2] = cert.q_dd();
    let scale1 = s1.deriv_dd(q1).abs().to_f64().max(s1.deriv_dd(q2).abs().to_f64());
    let scale2 = s2.deriv_dd(q1).abs().to_f64().max(s2.deriv_dd(q2).abs().to_f64());
    let stiff_first = scale1 >= scale2;
    let dl = Dd::from_f64(delta);

    let f1 = |x: DdC, y: DdC| -> DdC {
        let base = s1.value_dd(x).sub(s1.value_dd(y));
        if stiff_first {
            base.add(x.sub(y).mul_dd(dl))
        } else {
            base
        }
    };
    let f2 = |x: DdC, y: DdC| -> DdC {
        let base = s2.value_dd(x).sub(s2.value_dd(y));
        if stiff_first {
            base
        } else {
            base.add(x.sub(y).mul_dd(dl))
        }
    };
    let g1 = |z: DdC| -> DdC {
        let d = s1.deriv_dd(z);
        if stiff_first {
            d.add(DdC::new(dl, Dd::ZERO))
        } else {
            d
        }
    };
    let g2 = |z: DdC| -> DdC {
        let d = s2.deriv_dd(z);
        if stiff_first {
            d
        } else {
            d.add(DdC::new(dl, Dd::ZERO))
        }
    };

    let mut x = q1;
    let mut y = q2;
    let mut iterations = 0;
    let mut residual = f1(x, y).abs().to_f64().max(f2(x, y).abs().to_f64());
    while residual > 1e-12 && iterations < 40 {
        let v1 = f1(x, y);
        let v2 = f2(x, y);
        let j11 = g1(x);
        let j12 = g1(y).neg();
        let j21 = g2(x);
        let j22 = g2(y).neg();
        let det = j11.mul(j22).sub(j12.mul(j21));
        if det.abs().to_f64() < 1e-14 {
            return Err(Error::Numerics(format!(
                "Newton Jacobian degenerated after {iterations} iteration(s)"
            )));
        }
        let dx = v1.mul(j22).sub(v2.mul(j12)).div(det);
        let dy = j11.mul(v2).sub(j21.mul(v1)).div(det);
        x = x.sub(dx);
        y = y.sub(dy);
        iterations += 1;
        if x.abs().to_f64() >= 1.0 || y.abs().to_f64() >= 1.0 {
            return Err(Error::Numerics(format!(
                "perturbed zero escaped the disc after {iterations} iteration(s) \
                 (δ = {delta} too large for this certificate's conditioning)"
            )));
        }
        residual = f1(x, y).abs().to_f64().max(f2(x, y).abs().to_f64());
    }
    if residual > 1e-10 {
        return Err(Error::Numerics(format!(
            "Newton stalled at residual {residual:.3e} after {iterations} iterations"
        )));
    }
    let diff = (x.sub(q1).abs().to_f64(), y.sub(q2).abs().to_f64());
    let displacement = (diff.0 * diff.0 + diff.1 * diff.1).sqrt();
    // the located zero stays off-diagonal
    if x.sub(y).abs().to_f64() < 1e-6 {
        return Err(Error::Numerics("perturbed zero collapsed to the diagonal".into()));
    }
    Ok(PersistenceResult {
        delta,
        zero: (x.to_c(), y.to_c()),
        displacement,
        residual,
        iterations,
        scaled_constant: displacement * cert.ctx.det.abs().to_f64() / delta.max(f64::MIN_POSITIVE),
    })
}

/// Full pipeline: equal displacement, normalization, certificate.
pub fn certify_pair(cov1: &Covering, cov2: &Covering, a: Option<C>) -> Result<Certificate> {
    let eq = find_equal_displacement(cov1, cov2)?;
    let np = normalize(cov1, cov2, &eq)?;
    build_certificate(&np, a)
}
