//! Injective analytic discs with prescribed first-order jets: given
//! f = (f1, f2) into D1 x D2 and θ in (0,1), build an injective g with
//! g(0) = f(0) and g'(0) = θ f'(0).
//!
//! The constructions are closed-form expression trees:
//! - simply connected first factor, f1'(0) != 0: Möbius-affine competitor in
//!   the factor, second component shrunk by θ;
//! - simply connected first factor, f1'(0) = 0: g1 = f1(0) + d/(M+1)(h - θz)
//!   with h the normalized shrunk second component and M its boundary max;
//! - punctured-plane first factor: g1 = f1(0)(1+z)h^k with h zero-free, the
//!   smallest k pushing |c_k| over the boundary max M, and the unit-derivative
//!   and constant-second-component cases split off.

use crate::domain::{AffineMap, Kind, PlanarDomain};
use crate::expr::{boundary_max_modulus, HoloExpr, BOUNDARY_SAMPLES};
use crate::jet::{Jet2, JetOrder};
use crate::sample::{circle_points, disc_pairs, disc_points};
use crate::{par, Error, Result, C};
use serde::Serialize;

const CONTAINMENT_SAMPLES: usize = 1000;

/// Analytic disc into a product: two expression components with declared
/// target domains. Construction samples image containment (1e3 points).
#[derive(Clone, Debug)]
pub struct DiscPair {
    pub comp1: HoloExpr,
    pub comp2: HoloExpr,
    pub target1: PlanarDomain,
    pub target2: PlanarDomain,
}

impl DiscPair {
    pub fn new(
        comp1: HoloExpr,
        comp2: HoloExpr,
        target1: PlanarDomain,
        target2: PlanarDomain,
    ) -> Result<DiscPair> {
        for (i, (comp, target)) in [(&comp1, &target1), (&comp2, &target2)]
            .into_iter()
            .enumerate()
        {
            if comp.region_radius() < 1.0 {
                return Err(Error::Region(format!(
                    "component {} is only certified on radius {}",
                    i + 1,
                    comp.region_radius()
                )));
            }
            comp.eval_jet(C::new(0.0, 0.0), JetOrder::First)?;
            let mut pts = disc_points(41 + i as u64, CONTAINMENT_SAMPLES, 0.999);
            pts.push(C::new(0.0, 0.0)); // the base point itself must be inside
            for z in pts {
                let w = comp.eval_value(z)?;
                if !target.contains(w) {
                    return Err(Error::Region(format!(
                        "component {} leaves {} near z = {} (value {})",
                        i + 1,
                        target.descriptor(),
                        crate::format_complex(z),
                        crate::format_complex(w)
                    )));
                }
            }
        }
        Ok(DiscPair {
            comp1,
            comp2,
            target1,
            target2,
        })
    }

    pub fn jets_at_zero(&self) -> Result<(Jet2, Jet2)> {
        Ok((
            self.comp1.eval_jet(C::new(0.0, 0.0), JetOrder::First)?,
            self.comp2.eval_jet(C::new(0.0, 0.0), JetOrder::First)?,
        ))
    }

    fn swapped(self) -> DiscPair {
        DiscPair {
            comp1: self.comp2,
            comp2: self.comp1,
            target1: self.target2,
            target2: self.target1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// Simply connected factor, nonvanishing first derivative.
    RigidFactor,
    /// Simply connected factor, vanishing first derivative.
    DisplacedFactor,
    /// Punctured-plane factor, general position.
    PuncturedPower,
    /// Punctured-plane factor with θ f1'(0)/f1(0) = 1.
    PuncturedUnit,
    /// Punctured-plane factor with constant-jet second component.
    PuncturedSwapped,
}

#[derive(Clone, Debug)]
pub struct InjectivizationResult {
    pub g: DiscPair,
    pub case: CaseTag,
    /// max over components of |g(0)-f(0)| and |g'(0)-θf'(0)|.
    pub jet_residual: f64,
    /// Power used by the punctured-plane construction.
    pub k: Option<u32>,
    /// Separation constant of the punctured-plane construction.
    pub c_k: Option<C>,
    /// True when the construction ran with the factors swapped.
    pub swapped: bool,
    /// Components (0-based) that are injective on their own.
    pub injective_components: Vec<usize>,
}

fn theta_shrink(f: &HoloExpr, theta: f64) -> Result<HoloExpr> {
    let scaled = HoloExpr::affine(C::new(theta, 0.0), C::new(0.0, 0.0), HoloExpr::var())?;
    HoloExpr::compose(f.clone(), scaled)
}

fn from_model_expr(domain: &PlanarDomain, e: HoloExpr) -> Result<HoloExpr> {
    match &domain.post {
        None => Ok(e),
        Some(p) => HoloExpr::affine(p.mul, p.add, e),
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "theta = {theta} must lie in the open interval (0,1)"
        )));
    }
    Ok(())
}

fn jet_residual(f: &DiscPair, g: &DiscPair, theta: f64) -> Result<f64> {
    let (f1, f2) = f.jets_at_zero()?;
    let (g1, g2) = g.jets_at_zero()?;
    Ok([
        (g1.value - f1.value).norm(),
        (g2.value - f2.value).norm(),
        (g1.d1 - theta * f1.d1).norm(),
        (g2.d1 - theta * f2.d1).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// Injectivization when the first target is simply connected.
pub fn injectivize_simply_connected_factor(f: &DiscPair, theta: f64) -> Result<InjectivizationResult> {
    check_theta(theta)?;
    if !f.target1.is_simply_connected() {
        return Err(Error::CaseMismatch(format!(
            "first target {} is not a simply connected model",
            f.target1.descriptor()
        )));
    }
    let (j1, j2) = f.jets_at_zero()?;
    if j1.d1.norm() == 0.0 && j2.d1.norm() == 0.0 {
        return Err(Error::Degenerate("f'(0) = (0,0)".into()));
    }
    let g2 = theta_shrink(&f.comp2, theta)?;
    let post_mul = f.target1.post.map_or(C::new(1.0, 0.0), |p| p.mul);
    let a = f.target1.to_model(j1.value);
    let d1m = j1.d1 / post_mul;

    if j1.d1.norm() > 0.0 {
        // rigid competitor in the factor
        let g1_model = match f.target1.kind {
            Kind::Disc => {
                let lam = theta * d1m / (1.0 - a.norm_sqr());
                if lam.norm() >= 1.0 {
                    return Err(Error::Degenerate(format!(
                        "factor derivative exceeds the Schwarz-Pick bound (|lam| = {})",
                        lam.norm()
                    )));
                }
                let scaled =
                    HoloExpr::affine(lam, C::new(0.0, 0.0), HoloExpr::var())?;
                HoloExpr::moebius(-a, scaled)?
            }
            Kind::Plane => HoloExpr::affine(theta * d1m, a, HoloExpr::var())?,
            _ => unreachable!(),
        };
        let g1 = from_model_expr(&f.target1, g1_model)?;
        let g = DiscPair::new(g1, g2, f.target1, f.target2)?;
        let jet_residual = jet_residual(f, &g, theta)?;
        return Ok(InjectivizationResult {
            g,
            case: CaseTag::RigidFactor,
            jet_residual,
            k: None,
            c_k: None,
            swapped: false,
            injective_components: vec![0],
        });
    }

    // f1'(0) = 0: displace f1(0) by d/(M+1) (h - θz)
    if j2.d1.norm() == 0.0 {
        return Err(Error::Degenerate(
            "both factor derivatives vanish at the origin".into(),
        ));
    }
    let shrunk = theta_shrink(&f.comp2, theta)?;
    let h = HoloExpr::quot(
        HoloExpr::diff(shrunk, HoloExpr::constant(j2.value)?),
        HoloExpr::constant(j2.d1)?,
    )?;
    let m = boundary_max_modulus(&h, 1.0, BOUNDARY_SAMPLES)?;
    let dist = f.target1.boundary_distance(j1.value)?;
    let d = if dist.is_finite() { 0.5 * dist } else { 1.0 };
    let drift = HoloExpr::diff(
        h,
        HoloExpr::affine(C::new(theta, 0.0), C::new(0.0, 0.0), HoloExpr::var())?,
    );
    let g1 = HoloExpr::affine(C::new(d / (m + 1.0), 0.0), j1.value, drift)?;
    let g = DiscPair::new(g1, g2, f.target1, f.target2)?;
    let jet_residual = jet_residual(f, &g, theta)?;
    Ok(InjectivizationResult {
        g,
        case: CaseTag::DisplacedFactor,
        jet_residual,
        k: None,
        c_k: None,
        swapped: false,
        injective_components: vec![],
    })
}

/// Injectivization when the first target is a punctured plane.
pub fn injectivize_punctured_plane_factor(f: &DiscPair, theta: f64) -> Result<InjectivizationResult> {
    check_theta(theta)?;
    if !f.target1.is_cstar_like() {
        return Err(Error::CaseMismatch(format!(
            "first target {} is not a punctured-plane model",
            f.target1.descriptor()
        )));
    }
    if matches!(f.target2.kind, Kind::Plane) {
        return Err(Error::InvalidArgument(
            "second target is the full plane; use the simply connected construction with the roles swapped".into(),
        ));
    }
    let (j1, j2) = f.jets_at_zero()?;
    if j1.d1.norm() == 0.0 && j2.d1.norm() == 0.0 {
        return Err(Error::Degenerate("f'(0) = (0,0)".into()));
    }

    // constant-jet second component: run the simply connected construction on
    // (const f2(0), f1) into (f2(0) + dist*E) x C_* and swap back
    if j2.d1.norm() == 0.0 {
        let dist = f.target2.boundary_distance(j2.value)?;
        if !dist.is_finite() {
            return Err(Error::InvalidArgument(
                "second target has no finite boundary distance".into(),
            ));
        }
        let d1t = PlanarDomain::disc()
            .with_post(AffineMap::new(C::new(dist, 0.0), j2.value)?);
        let swapped_pair = DiscPair::new(
            HoloExpr::constant(j2.value)?,
            f.comp1.clone(),
            d1t,
            f.target1,
        )?;
        let inner = injectivize_simply_connected_factor(&swapped_pair, theta)?;
        let g = DiscPair::new(
            inner.g.comp2,
            inner.g.comp1,
            f.target1,
            f.target2,
        )?;
        let jet_residual = jet_residual(f, &g, theta)?;
        return Ok(InjectivizationResult {
            g,
            case: CaseTag::PuncturedSwapped,
            jet_residual,
            k: None,
            c_k: None,
            swapped: true,
            injective_components: vec![],
        });
    }

    // normalize the factor to f1(0) = 1
    let post_mul = f.target1.post.map_or(C::new(1.0, 0.0), |p| p.mul);
    let f10m = f.target1.to_model(j1.value);
    let w1 = (j1.d1 / post_mul) / f10m; // normalized derivative at 0
    let g2 = theta_shrink(&f.comp2, theta)?;

    if (theta * w1 - 1.0).norm() < 1e-12 {
        let g1_model = HoloExpr::affine(
            f10m,
            C::new(0.0, 0.0),
            HoloExpr::affine(C::new(1.0, 0.0), C::new(1.0, 0.0), HoloExpr::var())?,
        )?;
        let g1 = from_model_expr(&f.target1, g1_model)?;
        let g = DiscPair::new(g1, g2, f.target1, f.target2)?;
        let jet_residual = jet_residual(f, &g, theta)?;
        return Ok(InjectivizationResult {
            g,
            case: CaseTag::PuncturedUnit,
            jet_residual,
            k: None,
            c_k: None,
            swapped: false,
            injective_components: vec![0],
        });
    }

    // general case: smallest k with |c_k| > M (relative margin 1e-6)
    let m = boundary_max_modulus(&f.comp2, theta, BOUNDARY_SAMPLES)?;
    let step = theta * j2.d1 / (theta * w1 - 1.0);
    let mut k = 0u32;
    let mut ck = C::new(0.0, 0.0);
    for kk in 1..=1_000_000u32 {
        ck = j2.value - kk as f64 * step;
        if ck.norm() > m * (1.0 + 1e-6) {
            k = kk;
            break;
        }
    }
    if k == 0 {
        return Err(Error::Numerics(
            "no separation constant below the iteration cap".into(),
        ));
    }
    let shrunk = theta_shrink(&f.comp2, theta)?;
    let h = HoloExpr::quot(
        HoloExpr::diff(shrunk, HoloExpr::constant(ck)?),
        HoloExpr::constant(j2.value - ck)?,
    )?;
    let one_plus_z =
        HoloExpr::affine(C::new(1.0, 0.0), C::new(1.0, 0.0), HoloExpr::var())?;
    let g1_norm = HoloExpr::prod(one_plus_z, HoloExpr::powi(h, k));
    let g1_model = HoloExpr::affine(f10m, C::new(0.0, 0.0), g1_norm)?;
    let g1 = from_model_expr(&f.target1, g1_model)?;
    let g = DiscPair::new(g1, g2, f.target1, f.target2)?;
    let jet_residual = jet_residual(f, &g, theta)?;
    Ok(InjectivizationResult {
        g,
        case: CaseTag::PuncturedPower,
        jet_residual,
        k: Some(k),
        c_k: Some(ck),
        swapped: false,
        injective_components: vec![],
    })
}

/// Dispatch on the targets: the first factor's construction wins (simply
/// connected, then punctured-plane); the roles are swapped only when the
/// first factor offers neither.
pub fn injectivize(f: &DiscPair, theta: f64) -> Result<InjectivizationResult> {
    check_theta(theta)?;
    let (j1, j2) = f.jets_at_zero()?;
    if j1.d1.norm() == 0.0 && j2.d1.norm() == 0.0 {
        return Err(Error::Degenerate("f'(0) = (0,0)".into()));
    }
    let run_swapped = |ctor: fn(&DiscPair, f64) -> Result<InjectivizationResult>| {
        let sw = f.clone().swapped();
        let mut r = ctor(&sw, theta)?;
        r.g = r.g.swapped();
        r.swapped = !r.swapped;
        r.injective_components = r
            .injective_components
            .iter()
            .map(|i| 1 - i)
            .collect();
        Ok(r)
    };
    if f.target1.is_simply_connected() {
        injectivize_simply_connected_factor(f, theta)
    } else if f.target1.is_cstar_like() && !matches!(f.target2.kind, Kind::Plane) {
        injectivize_punctured_plane_factor(f, theta)
    } else if f.target2.is_simply_connected() {
        run_swapped(injectivize_simply_connected_factor)
    } else if f.target2.is_cstar_like() {
        run_swapped(injectivize_punctured_plane_factor)
    } else {
        Err(Error::CaseMismatch(format!(
            "no constructive branch for targets ({}, {}): neither factor is simply connected or a punctured plane",
            f.target1.descriptor(),
            f.target2.descriptor()
        )))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InjectivityReport {
    pub pairs_checked: usize,
    /// min over sampled pairs of max-component image distance / |z1 - z2|.
    pub min_separation_ratio: f64,
    pub collisions: usize,
    /// (component index, winding counts around 8 interior image targets).
    pub windings: Vec<(usize, Vec<i64>)>,
    pub pass: bool,
}

/// Pairwise injectivity check over n quasi-random pairs in |z| < 0.999, plus
/// argument-principle winding counts for components the construction claims
/// injective on their own.
pub fn verify_injectivity_full(
    g: &DiscPair,
    n: usize,
    seed: u64,
    winding_components: &[usize],
) -> Result<InjectivityReport> {
    if n < 1000 {
        return Err(Error::InvalidArgument(format!(
            "injectivity verification needs at least 1e3 pairs, got {n}"
        )));
    }
    // independent pairs plus structured families: antipodal pairs catch
    // even-symmetric collisions the independent sampling almost never hits,
    // near pairs probe local separation
    let mut pairs = disc_pairs(seed, n / 2, 0.999);
    for (i, z) in disc_points(seed.wrapping_add(7), n / 4, 0.99)
        .into_iter()
        .enumerate()
    {
        if z.norm() > 1e-6 {
            pairs.push((z, -z));
        }
        let rot = C::from_polar(1e-3, i as f64);
        pairs.push((z, z * (C::new(1.0, 0.0) + rot)));
    }
    let stats = par::map_collect(pairs.len(), |i| {
        let (z1, z2) = pairs[i];
        let a1 = g.comp1.eval_value(z1).unwrap_or(C::new(f64::NAN, 0.0));
        let a2 = g.comp1.eval_value(z2).unwrap_or(C::new(f64::NAN, 0.0));
        let b1 = g.comp2.eval_value(z1).unwrap_or(C::new(f64::NAN, 0.0));
        let b2 = g.comp2.eval_value(z2).unwrap_or(C::new(f64::NAN, 0.0));
        let dist = (a1 - a2).norm().max((b1 - b2).norm());
        (dist / (z1 - z2).norm(), dist < 1e-12)
    });
    let mut min_ratio = f64::INFINITY;
    let mut collisions = 0usize;
    for (ratio, collided) in &stats {
        if !ratio.is_finite() {
            return Err(Error::NonFinite("injectivity sampling".into()));
        }
        min_ratio = min_ratio.min(*ratio);
        if *collided {
            collisions += 1;
        }
    }
    let mut windings = Vec::new();
    let mut windings_ok = true;
    for &ci in winding_components {
        let comp = if ci == 0 { &g.comp1 } else { &g.comp2 };
        let mut counts = Vec::with_capacity(8);
        for zeta in disc_points(seed.wrapping_add(97), 8, 0.9) {
            let w0 = comp.eval_value(zeta)?;
            let wc = winding_count(comp, w0, 0.999, 1024)?;
            windings_ok &= wc == 1;
            counts.push(wc);
        }
        windings.push((ci, counts));
    }
    Ok(InjectivityReport {
        pairs_checked: pairs.len(),
        min_separation_ratio: min_ratio,
        collisions,
        pass: collisions == 0 && windings_ok,
        windings,
    })
}

/// Pairwise-only verification (no winding counts).
pub fn verify_injectivity(g: &DiscPair, n: usize, seed: u64) -> Result<InjectivityReport> {
    verify_injectivity_full(g, n, seed, &[])
}

/// Zeros of comp - w0 inside |z| < radius, by accumulated argument.
pub fn winding_count(comp: &HoloExpr, w0: C, radius: f64, samples: usize) -> Result<i64> {
    let pts = circle_points(samples, radius);
    let mut total = 0.0;
    let mut prev = comp.eval_value(pts[0])? - w0;
    for k in 1..=samples {
        let cur = comp.eval_value(pts[k % samples])? - w0;
        if cur.norm() == 0.0 || prev.norm() == 0.0 {
            return Err(Error::Numerics("winding contour hit a zero".into()));
        }
        total += (cur / prev).arg();
        prev = cur;
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(Error::Numerics(format!(
            "winding count did not converge to an integer: {turns}"
        )));
    }
    Ok(rounded as i64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaRow {
    pub theta: f64,
    pub case: CaseTag,
    pub jet_residual: f64,
    pub min_separation_ratio: f64,
    pub collisions: usize,
    pub pass: bool,
}

/// Run the applicable construction for each θ and tabulate residuals and
/// separation ratios. An empty grid yields an empty table.
pub fn theta_family_report(f: &DiscPair, thetas: &[f64], seed: u64) -> Result<Vec<ThetaRow>> {
    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let r = injectivize(f, theta)?;
        let v = verify_injectivity_full(&r.g, 2000, seed, &r.injective_components)?;
        rows.push(ThetaRow {
            theta,
            case: r.case,
            jet_residual: r.jet_residual,
            min_separation_ratio: v.min_separation_ratio,
            collisions: v.collisions,
            pass: r.jet_residual < 1e-10 && v.pass,
        });
    }
    Ok(rows)
}
