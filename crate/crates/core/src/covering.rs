//! Universal coverings of the model domains, with closed-form maps, deck
//! generators, fiber inversion, numerical lifting of analytic discs, and the
//! boundary displacement probe.
//!
//! Catalog: disc and plane cover themselves by the identity; the punctured
//! plane is covered by the plane through exp with deck z -> z + 2πi; the
//! punctured disc and annuli are covered by E through the Cayley map, with
//! parabolic (translation) and hyperbolic (scaling) decks respectively.
//! Covering values and derivatives are also exposed in double-double form:
//! annulus decks sit within ~1e-12 of the boundary, where the covering
//! identity p∘ψ ≡ p is not checkable in plain f64.

use crate::aut::DiscAut;
use crate::dd::{moebius_distance_dd, Dd, DdAut, DdC};
use crate::domain::{AffineMap, Kind, PlanarDomain};
use crate::expr::HoloExpr;
use crate::jet::JetOrder;
use crate::sample::{circle_points, disc_points};
use crate::{Error, Result, C};
use std::f64::consts::{PI, TAU};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverSpace {
    /// The unit disc E.
    Disc,
    /// The complex plane.
    Plane,
}

/// Closed-form covering primitive (before any affine post-map).
#[derive(Clone, Copy, Debug)]
enum Primitive {
    Identity,
    Exp,
    Pdisc,
    Annulus { mu: f64 },
}

/// Generator of the deck transformation group. Disc-cover decks are stored in
/// double-double matrix form: thin-scale annulus decks have centers whose f64
/// rounding lands on the unit circle.
#[derive(Clone, Debug)]
pub enum DeckMap {
    Identity,
    /// z -> z + by (plane covers).
    Translation { by: C },
    /// A fixed-point-free disc automorphism (disc covers).
    Aut { dd: DdAut },
}

impl DeckMap {
    pub fn is_identity(&self) -> bool {
        matches!(self, DeckMap::Identity)
    }

    pub fn apply(&self, z: C) -> C {
        match self {
            DeckMap::Identity => z,
            DeckMap::Translation { by } => z + by,
            DeckMap::Aut { dd } => dd.apply(DdC::from_c(z)).to_c(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Covering {
    pub domain: PlanarDomain,
    pub cover: CoverSpace,
    pub deck: DeckMap,
    prim: Primitive,
    post: Option<AffineMap>,
    map_expr: HoloExpr,
}

/// Universal covering of a model domain (or its affine image).
pub fn covering_of(domain: &PlanarDomain) -> Result<Covering> {
    let (prim, cover, deck) = match domain.kind {
        Kind::Disc => (Primitive::Identity, CoverSpace::Disc, DeckMap::Identity),
        Kind::Plane => (Primitive::Identity, CoverSpace::Plane, DeckMap::Identity),
        Kind::PuncturedPlane => (
            Primitive::Exp,
            CoverSpace::Plane,
            DeckMap::Translation { by: C::new(0.0, TAU) },
        ),
        Kind::PuncturedDisc => {
            // Cayley-conjugated translation by 2π: matrix [[1+πi, -πi],[πi, 1-πi]]
            let dd = DdAut::from_matrix([
                DdC::new(Dd::ONE, Dd::PI),
                DdC::new(Dd::ZERO, Dd::PI.neg()),
                DdC::new(Dd::ZERO, Dd::PI),
                DdC::new(Dd::ONE, Dd::PI.neg()),
            ]);
            (Primitive::Pdisc, CoverSpace::Disc, DeckMap::Aut { dd })
        }
        Kind::Annulus(r) => {
            let lambda = (2.0 * PI * PI / r.ln()).exp(); // in (0,1)
            if lambda < 1e-300 {
                return Err(Error::InvalidArgument(format!(
                    "annulus radius {r} has an unrepresentable deck scale"
                )));
            }
            let c = Dd::ONE.sub(Dd::from_f64(lambda)).div(Dd::ONE.add_f64(lambda));
            let dd = DdAut::moebius(DdC::new(c, Dd::ZERO));
            (
                Primitive::Annulus { mu: r.ln() / PI },
                CoverSpace::Disc,
                DeckMap::Aut { dd },
            )
        }
    };
    let base_expr = match prim {
        Primitive::Identity => HoloExpr::var(),
        Primitive::Exp => HoloExpr::exp(HoloExpr::var()),
        Primitive::Pdisc => HoloExpr::cover_pdisc(HoloExpr::var())?,
        Primitive::Annulus { .. } => match domain.kind {
            Kind::Annulus(r) => HoloExpr::cover_annulus(r, HoloExpr::var())?,
            _ => unreachable!(),
        },
    };
    let map_expr = match &domain.post {
        None => base_expr,
        Some(p) => HoloExpr::affine(p.mul, p.add, base_expr)?,
    };
    Ok(Covering {
        domain: *domain,
        cover,
        deck,
        prim,
        post: domain.post,
        map_expr,
    })
}

impl Covering {
    /// The covering map as an expression in the input grammar.
    pub fn map_expr(&self) -> &HoloExpr {
        &self.map_expr
    }

    /// The deck generator in f64 normal form; None when its center rounds
    /// onto the unit circle (extreme annulus radii).
    pub fn deck_aut(&self) -> Option<DiscAut> {
        match &self.deck {
            DeckMap::Aut { dd } => {
                let (phase, center) = dd.to_aut_f64();
                DiscAut::new(phase, center).ok()
            }
            _ => None,
        }
    }

    /// Double-double deck generator (disc covers).
    pub fn deck_dd(&self) -> Option<&DdAut> {
        match &self.deck {
            DeckMap::Aut { dd } => Some(dd),
            _ => None,
        }
    }

    /// p(z).
    pub fn p(&self, z: C) -> C {
        let v = match self.prim {
            Primitive::Identity => z,
            Primitive::Exp => z.exp(),
            Primitive::Pdisc => (-(1.0 + z) / (1.0 - z)).exp(),
            Primitive::Annulus { mu } => {
                let c = C::new(0.0, 1.0) * (1.0 + z) / (1.0 - z);
                (C::new(0.0, -mu) * c.ln()).exp()
            }
        };
        match &self.post {
            None => v,
            Some(p) => p.apply(v),
        }
    }

    /// p'(z).
    pub fn dp(&self, z: C) -> C {
        let d = match self.prim {
            Primitive::Identity => C::new(1.0, 0.0),
            Primitive::Exp => z.exp(),
            Primitive::Pdisc => {
                let e = (-(1.0 + z) / (1.0 - z)).exp();
                e * (-2.0) / ((1.0 - z) * (1.0 - z))
            }
            Primitive::Annulus { mu } => {
                let c = C::new(0.0, 1.0) * (1.0 + z) / (1.0 - z);
                let v = (C::new(0.0, -mu) * c.ln()).exp();
                v * C::new(0.0, -mu) * 2.0 / ((1.0 - z) * (1.0 + z))
            }
        };
        match &self.post {
            None => d,
            Some(p) => p.mul * d,
        }
    }

    /// (p(z), p'(z)) in double-double.
    pub fn p_dd(&self, z: DdC) -> (DdC, DdC) {
        let one = DdC::ONE;
        let (v, d) = match self.prim {
            Primitive::Identity => (z, one),
            Primitive::Exp => {
                let e = z.exp();
                (e, e)
            }
            Primitive::Pdisc => {
                let den = one.sub(z);
                let w = one.add(z).div(den).neg();
                let v = w.exp();
                let d = v.mul_f64(-2.0).div(den.mul(den));
                (v, d)
            }
            Primitive::Annulus { mu } => {
                let den = one.sub(z);
                let num = one.add(z);
                let c = num.div(den).mul_i();
                let lg = c.ln();
                // exp(-i*mu*Log c)
                let v = lg.mul_i().neg().mul_dd(Dd::from_f64(mu)).exp();
                let d = v
                    .mul(DdC::I.neg())
                    .mul_f64(2.0 * mu)
                    .div(den.mul(num));
                (v, d)
            }
        };
        match &self.post {
            None => (v, d),
            Some(p) => {
                let m = DdC::from_c(p.mul);
                (m.mul(v).add(DdC::from_c(p.add)), m.mul(d))
            }
        }
    }

    /// One point of the fiber p^{-1}(w), from the closed-form inverse on the
    /// principal branch.
    pub fn fiber_point(&self, w: C) -> Result<C> {
        if !self.domain.contains(w) {
            return Err(Error::InvalidArgument(format!(
                "{} is not in {}",
                crate::format_complex(w),
                self.domain.descriptor()
            )));
        }
        let wm = self.domain.to_model(w);
        let z = match self.prim {
            Primitive::Identity => wm,
            Primitive::Exp => wm.ln(),
            Primitive::Pdisc => {
                let tau = -wm.ln();
                (tau - 1.0) / (tau + 1.0)
            }
            Primitive::Annulus { mu } => {
                let zeta = (C::new(0.0, 1.0) * wm.ln() / mu).exp();
                (zeta - C::new(0.0, 1.0)) / (zeta + C::new(0.0, 1.0))
            }
        };
        let res = (self.p(z) - w).norm();
        if res > 1e-9 {
            return Err(Error::Numerics(format!(
                "fiber inversion residual {res:.3e}"
            )));
        }
        Ok(z)
    }

    /// Max of |p(ψ(z)) - p(z)| over n quasi-random points with |z| <= radius,
    /// evaluated on the double-double path.
    pub fn deck_identity_max_residual(&self, n: usize, radius: f64) -> f64 {
        let pts = disc_points(17, n, radius);
        crate::par::max_map(n, |k| {
            let z = DdC::from_c(pts[k]);
            let moved = match &self.deck {
                DeckMap::Identity => z,
                DeckMap::Translation { .. } => z.add(DdC::new(Dd::ZERO, Dd::TAU)),
                DeckMap::Aut { dd } => dd.apply(z),
            };
            let (a, _) = self.p_dd(moved);
            let (b, _) = self.p_dd(z);
            a.sub(b).abs().to_f64()
        })
    }

    /// Min of |ψ(z) - z| over a 64x64 grid on [-0.95, 0.95]^2 ∩ E; positive
    /// for the catalog decks (no fixed point in E).
    pub fn deck_min_displacement_on_grid(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..64 {
            for j in 0..64 {
                let x = -0.95 + 1.9 * i as f64 / 63.0;
                let y = -0.95 + 1.9 * j as f64 / 63.0;
                let z = C::new(x, y);
                if z.norm() >= 1.0 {
                    continue;
                }
                let d = (self.deck.apply(z) - z).norm();
                min = min.min(d);
            }
        }
        min
    }

    /// Max Möbius displacement m(z, ψ(z)) along the best search ray out to
    /// radius 1-δ. The ray is chosen transverse to the deck's fixed points
    /// (displacement does not grow toward a parabolic fixed point, and is
    /// constant along a hyperbolic axis), where it tends to 1.
    pub fn sup_displacement_probe(&self, delta: f64) -> Result<f64> {
        if self.cover != CoverSpace::Disc {
            return Err(Error::InvalidArgument(
                "displacement probe requires a disc cover".into(),
            ));
        }
        let dd = match &self.deck {
            DeckMap::Aut { dd, .. } => dd,
            _ => {
                return Err(Error::Degenerate(
                    "identity deck: displacement is identically zero".into(),
                ))
            }
        };
        if !(delta > 0.0 && delta <= 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "probe margin delta = {delta} must lie in (0, 1e-2]"
            )));
        }
        let dir = best_displacement_direction(dd);
        let mut max = Dd::ZERO;
        let steps = 200;
        for k in 0..=steps {
            // refinement toward the boundary
            let frac = k as f64 / steps as f64;
            let t = (1.0 - delta) * (1.0 - (1.0 - frac).powi(4));
            let z = DdC::from_c(dir * t);
            let m = moebius_distance_dd(z, dd.apply(z));
            if max.lt(m) {
                max = m;
            }
        }
        Ok(max.to_f64())
    }
}

/// Direction (unit vector) maximizing the deck displacement at radius 0.9.
pub(crate) fn best_displacement_direction(deck: &DdAut) -> C {
    let mut best = f64::NEG_INFINITY;
    let mut dir = C::new(1.0, 0.0);
    for u in circle_points(64, 1.0) {
        let z = DdC::from_c(u * 0.9);
        let m = moebius_distance_dd(z, deck.apply(z)).to_f64();
        if m > best {
            best = m;
            dir = u;
        }
    }
    dir
}

/// Möbius displacement of a deck automorphism at a double-double point.
pub(crate) fn deck_displacement_dd(deck: &DdAut, z: DdC) -> Dd {
    moebius_distance_dd(z, deck.apply(z))
}

/// A lifted analytic disc f̃ with p ∘ f̃ = f, sampled on a radial grid.
#[derive(Clone, Debug)]
pub struct SampledLift {
    pub base: C,
    pub radius: f64,
    pub rays: usize,
    pub steps: usize,
    /// Grid nodes, ray-major: nodes[ray * steps + s] at t = (s+1)/steps.
    pub nodes: Vec<C>,
    /// f̃ at the corresponding node.
    pub values: Vec<C>,
}

impl SampledLift {
    /// Max |p(f̃(z)) - f(z)| over the grid.
    pub fn max_defect(&self, cov: &Covering, f: &HoloExpr) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (z, w) in self.nodes.iter().zip(&self.values) {
            let target = f.eval_value(*z)?;
            worst = worst.max((cov.p(*w) - target).norm());
        }
        Ok(worst)
    }

    /// Max |f̃ - g̃| over shared nodes (grids must have the same shape).
    pub fn max_difference(&self, other: &SampledLift) -> Result<f64> {
        if self.nodes.len() != other.nodes.len() {
            return Err(Error::InvalidArgument("lift grids differ".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Lift f through the covering: continuation of f̃' = f'/(p'∘f̃) along rays
/// with fourth-order steps, one Newton correction per node. The lift is
/// pinned by f̃(0) = base, which must satisfy p(base) = f(0) to 1e-9.
pub fn lift_disc(
    cov: &Covering,
    f: &HoloExpr,
    base: C,
    radius: f64,
    rays: usize,
    steps: usize,
) -> Result<SampledLift> {
    let f0 = f.eval_value(C::new(0.0, 0.0))?;
    if (cov.p(base) - f0).norm() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "base point is not on the fiber: |p(base) - f(0)| = {:.3e}",
            (cov.p(base) - f0).norm()
        )));
    }
    if radius >= f.region_radius() {
        return Err(Error::Region("lift radius outside the disc region".into()));
    }
    let mut nodes = Vec::with_capacity(rays * steps);
    let mut values = Vec::with_capacity(rays * steps);
    for ray in 0..rays {
        let dir = C::from_polar(radius, TAU * ray as f64 / rays as f64);
        let mut w = base;
        let dt = 1.0 / steps as f64;
        for s in 0..steps {
            let t0 = s as f64 * dt;
            let slope = |t: f64, w: C| -> Result<C> {
                let z = dir * t;
                let fd = f.eval_jet(z, JetOrder::First)?.d1;
                let pd = cov.dp(w);
                if pd.norm() < 1e-14 {
                    return Err(Error::Numerics(
                        "covering derivative vanished during lifting".into(),
                    ));
                }
                Ok(fd * dir / pd)
            };
            let k1 = slope(t0, w)?;
            let k2 = slope(t0 + 0.5 * dt, w + 0.5 * dt * k1)?;
            let k3 = slope(t0 + 0.5 * dt, w + 0.5 * dt * k2)?;
            let k4 = slope(t0 + dt, w + dt * k3)?;
            w += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            // one Newton correction onto the fiber of f(z)
            let z = dir * (t0 + dt);
            let target = f.eval_value(z)?;
            let pd = cov.dp(w);
            if pd.norm() < 1e-14 {
                return Err(Error::Numerics(
                    "covering derivative vanished during correction".into(),
                ));
            }
            w -= (cov.p(w) - target) / pd;
            nodes.push(z);
            values.push(w);
        }
    }
    Ok(SampledLift {
        base,
        radius,
        rays,
        steps,
        nodes,
        values,
    })
}

/// Lift with the default grid (radius 0.9, 16 rays, 512 steps).
pub fn lift_disc_default(cov: &Covering, f: &HoloExpr, base: C) -> Result<SampledLift> {
    lift_disc(cov, f, base, 0.9, 16, 512)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn all_catalog() -> Vec<Covering> {
        [
            PlanarDomain::disc(),
            PlanarDomain::plane(),
            PlanarDomain::cstar(),
            PlanarDomain::pdisc(),
            PlanarDomain::annulus(0.3).unwrap(),
            PlanarDomain::annulus(0.5).unwrap(),
        ]
        .iter()
        .map(|d| covering_of(d).unwrap())
        .collect()
    }

    #[test]
    fn disc_and_plane_are_trivial() {
        let d = covering_of(&PlanarDomain::disc()).unwrap();
        assert!(d.deck.is_identity());
        assert_eq!(d.p(c(0.3, 0.1)), c(0.3, 0.1));
        let p = covering_of(&PlanarDomain::plane()).unwrap();
        assert_eq!(p.cover, CoverSpace::Plane);
    }

    #[test]
    fn cstar_deck_is_exp_period() {
        let cov = covering_of(&PlanarDomain::cstar()).unwrap();
        for z in sample::disc_points(21, 100, 2.0) {
            let moved = cov.deck.apply(z);
            assert!((cov.p(moved) - cov.p(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn pdisc_catalog_values() {
        let cov = covering_of(&PlanarDomain::pdisc()).unwrap();
        assert!((cov.p(c(0.0, 0.0)) - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
        let psi0 = cov.deck.apply(c(0.0, 0.0));
        // pi/(pi+i)
        assert!((psi0 - c(0.908_000_331_649_624_8, -0.289_025_482_222_236_24)).norm() < 1e-12);
    }

    #[test]
    fn annulus_image_containment_with_positive_orientation() {
        let dom = PlanarDomain::annulus(0.3).unwrap();
        let cov = covering_of(&dom).unwrap();
        assert!((cov.p(c(0.0, 0.0)) - c(0.3f64.sqrt(), 0.0)).norm() < 1e-14);
        for z in sample::disc_points(23, 1000, 0.999) {
            let w = cov.p(z);
            assert!(dom.contains(w), "p({z}) = {w} escaped the annulus");
        }
    }

    #[test]
    fn pdisc_image_avoids_origin() {
        let dom = PlanarDomain::pdisc();
        let cov = covering_of(&dom).unwrap();
        for z in sample::disc_points(25, 1000, 0.999) {
            let w = cov.p(z);
            assert!(dom.contains(w));
            assert!(w.norm() > 0.0);
        }
    }

    #[test]
    fn deck_identities_hold_to_1e9() {
        for cov in all_catalog() {
            let res = cov.deck_identity_max_residual(1000, 0.9);
            assert!(
                res < 1e-9,
                "{}: deck identity residual {res:.3e}",
                cov.domain.descriptor()
            );
        }
    }

    #[test]
    fn decks_are_fixed_point_free_on_the_grid() {
        for d in [
            PlanarDomain::cstar(),
            PlanarDomain::pdisc(),
            PlanarDomain::annulus(0.3).unwrap(),
        ] {
            let cov = covering_of(&d).unwrap();
            let min = cov.deck_min_displacement_on_grid();
            assert!(min > 1e-3, "{}: min displacement {min}", d.descriptor());
        }
    }

    #[test]
    fn dd_and_f64_covering_paths_agree_mid_disc() {
        for cov in all_catalog() {
            if cov.cover != CoverSpace::Disc {
                continue;
            }
            for z in sample::disc_points(27, 200, 0.8) {
                let (v, d) = cov.p_dd(DdC::from_c(z));
                assert!((v.to_c() - cov.p(z)).norm() < 1e-12);
                assert!((d.to_c() - cov.dp(z)).norm() < 1e-10 * cov.dp(z).norm().max(1.0));
            }
        }
    }

    #[test]
    fn fiber_points_round_trip() {
        let pd = covering_of(&PlanarDomain::pdisc()).unwrap();
        let z = pd.fiber_point(c(-0.5, 0.0)).unwrap();
        assert!((z - c(0.734_123_678_378_055_1, -0.493_326_928_905_697_94)).norm() < 1e-12);
        assert!((pd.p(z) - c(-0.5, 0.0)).norm() < 1e-13);

        let an = covering_of(&PlanarDomain::annulus(0.3).unwrap()).unwrap();
        let z = an.fiber_point(c(0.5, 0.1)).unwrap();
        assert!((an.p(z) - c(0.5, 0.1)).norm() < 1e-13);

        assert!(pd.fiber_point(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn lift_of_p_itself_is_identity() {
        let cov = covering_of(&PlanarDomain::pdisc()).unwrap();
        let lift = lift_disc(&cov, cov.map_expr(), c(0.0, 0.0), 0.9, 8, 256).unwrap();
        for (z, w) in lift.nodes.iter().zip(&lift.values) {
            assert!((z - w).norm() < 1e-8);
        }
    }

    #[test]
    fn lift_of_constant_is_constant() {
        let cov = covering_of(&PlanarDomain::pdisc()).unwrap();
        let f = HoloExpr::constant(cov.p(c(0.0, 0.0))).unwrap();
        let lift = lift_disc(&cov, &f, c(0.0, 0.0), 0.9, 4, 64).unwrap();
        for w in &lift.values {
            assert!(w.norm() < 1e-10);
        }
    }

    #[test]
    fn lift_of_shrunk_covering_is_the_shrink() {
        let cov = covering_of(&PlanarDomain::annulus(0.3).unwrap()).unwrap();
        let inner = HoloExpr::affine(c(0.9, 0.0), c(0.0, 0.0), HoloExpr::var()).unwrap();
        let f = HoloExpr::compose(cov.map_expr().clone(), inner).unwrap();
        let lift = lift_disc(&cov, &f, c(0.0, 0.0), 0.9, 8, 256).unwrap();
        for (z, w) in lift.nodes.iter().zip(&lift.values) {
            assert!((w - 0.9 * z).norm() < 1e-8, "lift({z}) = {w}");
        }
        assert!(lift.max_defect(&cov, &f).unwrap() < 1e-8);
    }

    #[test]
    fn lifts_with_same_base_agree() {
        let cov = covering_of(&PlanarDomain::pdisc()).unwrap();
        let inner = HoloExpr::affine(c(0.7, 0.1), c(0.0, 0.0), HoloExpr::var()).unwrap();
        let f = HoloExpr::compose(cov.map_expr().clone(), inner).unwrap();
        let a = lift_disc(&cov, &f, c(0.0, 0.0), 0.9, 4, 128).unwrap();
        let b = lift_disc(&cov, &f, c(0.0, 0.0), 0.9, 4, 512).unwrap();
        // compare on the coarse grid nodes (every node of `a` is in `b` at stride 4)
        let mut worst: f64 = 0.0;
        for ray in 0..4 {
            for s in 0..128 {
                let wa = a.values[ray * 128 + s];
                let wb = b.values[ray * 512 + s * 4 + 3];
                worst = worst.max((wa - wb).norm());
            }
        }
        assert!(worst < 1e-8, "lift uniqueness defect {worst}");
    }

    #[test]
    fn lift_rejects_radius_outside_the_disc_region() {
        let cov = covering_of(&PlanarDomain::pdisc()).unwrap();
        let f = cov.map_expr().clone();
        assert!(lift_disc(&cov, &f, c(0.0, 0.0), 1.5, 4, 64).is_err());
    }

    #[test]
    fn lift_rejects_off_fiber_base() {
        let cov = covering_of(&PlanarDomain::pdisc()).unwrap();
        let f = HoloExpr::constant(cov.p(c(0.0, 0.0))).unwrap();
        assert!(lift_disc(&cov, &f, c(0.4, 0.0), 0.9, 4, 64).is_err());
    }

    #[test]
    fn probe_examples() {
        let pd = covering_of(&PlanarDomain::pdisc()).unwrap();
        let m0 = 0.952_890_513_988_687_3;
        let probe = pd.sup_displacement_probe(1e-2).unwrap();
        assert!(probe >= m0);
        assert!(probe > 0.999);

        let an = covering_of(&PlanarDomain::annulus(0.2).unwrap()).unwrap();
        let probe = an.sup_displacement_probe(1e-4).unwrap();
        assert!(probe > 0.999);
        // 1 - c*sqrt(delta) with the recorded c = 0.5
        assert!(probe > 1.0 - 0.5 * 1e-2);

        let disc = covering_of(&PlanarDomain::disc()).unwrap();
        assert!(disc.sup_displacement_probe(1e-3).is_err());
        let plane = covering_of(&PlanarDomain::plane()).unwrap();
        assert!(plane.sup_displacement_probe(1e-3).is_err());
    }

    #[test]
    fn probe_rejects_bad_delta() {
        let pd = covering_of(&PlanarDomain::pdisc()).unwrap();
        assert!(pd.sup_displacement_probe(0.0).is_err());
        assert!(pd.sup_displacement_probe(0.5).is_err());
    }

    #[test]
    fn affine_image_covering() {
        let dom = PlanarDomain::pdisc()
            .with_post(AffineMap::new(c(2.0, 0.0), c(1.0, 0.0)).unwrap());
        let cov = covering_of(&dom).unwrap();
        assert!((cov.p(c(0.0, 0.0)) - (2.0 * (-1.0f64).exp() + 1.0)).norm() < 1e-14);
        for z in sample::disc_points(29, 200, 0.95) {
            assert!(dom.contains(cov.p(z)));
        }
        let res = cov.deck_identity_max_residual(500, 0.9);
        assert!(res < 1e-9);
    }
}
