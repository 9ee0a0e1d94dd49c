//! Holomorphic expression trees with exact jet evaluation.
//!
//! Every expression carries a certified analyticity radius (an open disc about
//! the origin). Quotient, Möbius and composition nodes validate their
//! denominators and image containment by sampling at construction time; the
//! formulas produced by the constructions here are zero-free by design, so the
//! sampling is a tripwire, not a proof.

use crate::jet::{Jet, Jet2, JetOrder};
use crate::sample::{circle_points, disc_points};
use crate::{ensure_finite, format_complex, par, Error, Result, C};

const QUOTIENT_SAMPLES: usize = 1024;
const COMPOSE_SAMPLES: usize = 256;
const DEN_FLOOR: f64 = 1e-12;
/// Default boundary sampling density for [`boundary_max_modulus`].
pub const BOUNDARY_SAMPLES: usize = 4096;
/// Relative inflation applied to sampled boundary maxima; the constructions
/// only need an upper bound for M, so over-estimating is safe and
/// under-estimating is not.
pub const BOUNDARY_INFLATION: f64 = 1e-6;

#[derive(Clone, Debug)]
pub enum Node {
    Var,
    Const(C),
    Sum(Box<HoloExpr>, Box<HoloExpr>),
    Diff(Box<HoloExpr>, Box<HoloExpr>),
    Prod(Box<HoloExpr>, Box<HoloExpr>),
    Quot(Box<HoloExpr>, Box<HoloExpr>),
    Pow(Box<HoloExpr>, u32),
    Exp(Box<HoloExpr>),
    /// h_a applied to the inner expression.
    Moebius(C, Box<HoloExpr>),
    /// mul * inner + add.
    Affine { mul: C, add: C, inner: Box<HoloExpr> },
    Compose { outer: Box<HoloExpr>, inner: Box<HoloExpr> },
    /// exp(-(1+w)/(1-w)) on the inner value w; covers the punctured disc.
    CoverPdisc(Box<HoloExpr>),
    /// exp(-(i ln r / pi) Log(i(1+w)/(1-w))); covers the annulus {r<|z|<1}.
    CoverAnnulus { r: f64, inner: Box<HoloExpr> },
}

#[derive(Clone, Debug)]
pub struct HoloExpr {
    node: Node,
    region: f64,
}

impl HoloExpr {
    pub fn node(&self) -> &Node {
        &self.node
    }

    /// Radius of the certified analyticity disc (infinite for entire trees).
    pub fn region_radius(&self) -> f64 {
        self.region
    }

    pub fn var() -> HoloExpr {
        HoloExpr {
            node: Node::Var,
            region: f64::INFINITY,
        }
    }

    pub fn constant(c: C) -> Result<HoloExpr> {
        ensure_finite(c, "constant")?;
        Ok(HoloExpr {
            node: Node::Const(c),
            region: f64::INFINITY,
        })
    }

    pub fn sum(a: HoloExpr, b: HoloExpr) -> HoloExpr {
        let region = a.region.min(b.region);
        HoloExpr {
            node: Node::Sum(Box::new(a), Box::new(b)),
            region,
        }
    }

    pub fn diff(a: HoloExpr, b: HoloExpr) -> HoloExpr {
        let region = a.region.min(b.region);
        HoloExpr {
            node: Node::Diff(Box::new(a), Box::new(b)),
            region,
        }
    }

    pub fn prod(a: HoloExpr, b: HoloExpr) -> HoloExpr {
        let region = a.region.min(b.region);
        HoloExpr {
            node: Node::Prod(Box::new(a), Box::new(b)),
            region,
        }
    }

    /// Quotient with a sampled zero-free certificate for the denominator.
    pub fn quot(num: HoloExpr, den: HoloExpr) -> Result<HoloExpr> {
        if let Node::Const(c) = den.node {
            if c.norm() <= DEN_FLOOR {
                return Err(Error::Degenerate("division by (near-)zero constant".into()));
            }
            let region = num.region;
            return Ok(HoloExpr {
                node: Node::Quot(Box::new(num), Box::new(den)),
                region,
            });
        }
        let region = num.region.min(den.region).min(1.0);
        let sample_r = 0.999 * region;
        for z in disc_points(1, QUOTIENT_SAMPLES, sample_r) {
            let v = den.eval(Jet::variable(z))?;
            if v.value.norm() <= DEN_FLOOR {
                return Err(Error::Region(format!(
                    "denominator vanishes near z = {} (|den| = {:.3e})",
                    format_complex(z),
                    v.value.norm()
                )));
            }
        }
        zero_free_winding_certificate(&den, sample_r)?;
        Ok(HoloExpr {
            node: Node::Quot(Box::new(num), Box::new(den)),
            region,
        })
    }

    pub fn powi(base: HoloExpr, k: u32) -> HoloExpr {
        if k == 1 {
            return base;
        }
        let region = base.region;
        HoloExpr {
            node: Node::Pow(Box::new(base), k),
            region,
        }
    }

    pub fn exp(inner: HoloExpr) -> HoloExpr {
        let region = inner.region;
        HoloExpr {
            node: Node::Exp(Box::new(inner)),
            region,
        }
    }

    /// h_a applied to `inner`; requires |a| < 1.
    pub fn moebius(a: C, inner: HoloExpr) -> Result<HoloExpr> {
        ensure_finite(a, "moebius parameter")?;
        if a.norm() >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "moebius parameter |a| = {} must be < 1",
                a.norm()
            )));
        }
        let region = inner.region.min(1.0);
        if a.norm() > 0.0 {
            let sample_r = 0.999 * region;
            for z in disc_points(2, QUOTIENT_SAMPLES, sample_r) {
                let v = inner.eval(Jet::variable(z))?;
                let den = C::new(1.0, 0.0) - a.conj() * v.value;
                if den.norm() <= DEN_FLOOR {
                    return Err(Error::Region(format!(
                        "moebius denominator vanishes near z = {}",
                        format_complex(z)
                    )));
                }
            }
            let den = HoloExpr::diff(
                HoloExpr::constant(C::new(1.0, 0.0))?,
                HoloExpr::affine(a.conj(), C::new(0.0, 0.0), inner.clone())?,
            );
            zero_free_winding_certificate(&den, sample_r)?;
        }
        Ok(HoloExpr {
            node: Node::Moebius(a, Box::new(inner)),
            region,
        })
    }

    pub fn affine(mul: C, add: C, inner: HoloExpr) -> Result<HoloExpr> {
        ensure_finite(mul, "affine mul")?;
        ensure_finite(add, "affine add")?;
        let region = inner.region;
        Ok(HoloExpr {
            node: Node::Affine {
                mul,
                add,
                inner: Box::new(inner),
            },
            region,
        })
    }

    /// outer ∘ inner. The certified radius is exact when `inner` is affine in
    /// z; otherwise it is located by bisection on sampled boundary maxima.
    pub fn compose(outer: HoloExpr, inner: HoloExpr) -> Result<HoloExpr> {
        let region = composed_region(&outer, &inner)?;
        let expr = HoloExpr {
            node: Node::Compose {
                outer: Box::new(outer),
                inner: Box::new(inner),
            },
            region,
        };
        // tripwire: sampled inner images must stay in the outer region
        if let Node::Compose { outer, inner } = &expr.node {
            if outer.region.is_finite() {
                let sample_r = 0.999 * expr.region.min(1e6);
                for z in disc_points(3, COMPOSE_SAMPLES, sample_r) {
                    let v = inner.eval(Jet::variable(z))?;
                    if v.value.norm() >= outer.region {
                        return Err(Error::Region(format!(
                            "composition image |{}| leaves the outer region {}",
                            v.value.norm(),
                            outer.region
                        )));
                    }
                }
            }
        }
        Ok(expr)
    }

    pub fn cover_pdisc(inner: HoloExpr) -> Result<HoloExpr> {
        let region = primitive_region(&inner)?;
        Ok(HoloExpr {
            node: Node::CoverPdisc(Box::new(inner)),
            region,
        })
    }

    pub fn cover_annulus(r: f64, inner: HoloExpr) -> Result<HoloExpr> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "annulus parameter r = {r} must lie in (0,1)"
            )));
        }
        let region = primitive_region(&inner)?;
        Ok(HoloExpr {
            node: Node::CoverAnnulus {
                r,
                inner: Box::new(inner),
            },
            region,
        })
    }

    pub fn contains_var(&self) -> bool {
        match &self.node {
            Node::Var => true,
            Node::Const(_) => false,
            Node::Sum(a, b) | Node::Diff(a, b) | Node::Prod(a, b) | Node::Quot(a, b) => {
                a.contains_var() || b.contains_var()
            }
            Node::Pow(a, _) | Node::Exp(a) | Node::Moebius(_, a) | Node::CoverPdisc(a) => {
                a.contains_var()
            }
            Node::Affine { inner, .. } | Node::CoverAnnulus { inner, .. } => inner.contains_var(),
            Node::Compose { outer, inner } => outer.contains_var() && inner.contains_var(),
        }
    }

    /// Jet at z; order selects whether the second derivative is reported.
    pub fn eval_jet(&self, z: C, order: JetOrder) -> Result<Jet2> {
        ensure_finite(z, "evaluation point")?;
        if z.norm() >= self.region {
            return Err(Error::Region(format!(
                "point |z| = {} outside certified radius {}",
                z.norm(),
                self.region
            )));
        }
        let jet = self.eval(Jet::variable(z))?;
        if !jet.is_finite() {
            return Err(Error::NonFinite("jet evaluation".into()));
        }
        Ok(jet.truncate(order))
    }

    /// Value only.
    pub fn eval_value(&self, z: C) -> Result<C> {
        Ok(self.eval_jet(z, JetOrder::First)?.value)
    }

    /// Core recursion: evaluate with the variable bound to an arbitrary jet, so
    /// composition is jet substitution and the chain rule is automatic.
    pub(crate) fn eval(&self, seed: Jet) -> Result<Jet> {
        Ok(match &self.node {
            Node::Var => seed,
            Node::Const(c) => Jet::constant(*c),
            Node::Sum(a, b) => a.eval(seed)?.add(b.eval(seed)?),
            Node::Diff(a, b) => a.eval(seed)?.sub(b.eval(seed)?),
            Node::Prod(a, b) => a.eval(seed)?.mul(b.eval(seed)?),
            Node::Quot(a, b) => {
                let den = b.eval(seed)?;
                if den.value.norm() == 0.0 {
                    return Err(Error::Region("evaluation at a pole".into()));
                }
                a.eval(seed)?.div(den)
            }
            Node::Pow(a, k) => a.eval(seed)?.powi(*k),
            Node::Exp(a) => a.eval(seed)?.exp(),
            Node::Moebius(p, inner) => {
                let j = inner.eval(seed)?;
                let num = j.shift(-p);
                let den = j.scale(-p.conj()).shift(C::new(1.0, 0.0));
                if den.value.norm() == 0.0 {
                    return Err(Error::Region("moebius evaluation at its pole".into()));
                }
                num.div(den)
            }
            Node::Affine { mul, add, inner } => inner.eval(seed)?.scale(*mul).shift(*add),
            Node::Compose { outer, inner } => outer.eval(inner.eval(seed)?)?,
            Node::CoverPdisc(inner) => {
                let j = inner.eval(seed)?;
                let one = Jet::constant(C::new(1.0, 0.0));
                let den = one.sub(j);
                if den.value.norm() == 0.0 {
                    return Err(Error::Region("covering evaluation at the boundary".into()));
                }
                one.add(j).div(den).scale(C::new(-1.0, 0.0)).exp()
            }
            Node::CoverAnnulus { r, inner } => {
                let j = inner.eval(seed)?;
                let one = Jet::constant(C::new(1.0, 0.0));
                let den = one.sub(j);
                if den.value.norm() == 0.0 {
                    return Err(Error::Region("covering evaluation at the boundary".into()));
                }
                let c = one.add(j).div(den).scale(C::new(0.0, 1.0));
                // principal log jet: c stays in the upper half-plane, off the cut
                let lv = c.value.ln();
                let ld1 = 1.0 / c.value;
                let ld2 = -ld1 * ld1;
                let lg = c.chain(lv, ld1, ld2);
                let mu = C::new(0.0, -(r.ln()) / std::f64::consts::PI);
                lg.scale(mu).exp()
            }
        })
    }

    /// Render in the input grammar. Round-trips through [`crate::parse::parse`]
    /// to an expression with identical jets.
    pub fn render(&self) -> String {
        self.render_prec("z", 0)
    }

    /// Precedence-aware rendering: 1 additive, 2 multiplicative, 3 power
    /// base, 4 atom. The result is parenthesized when its own level is below
    /// `need`.
    fn render_prec(&self, var: &str, need: u8) -> String {
        let lit = |c: &C| -> (String, u8) {
            let s = format_complex(*c);
            let level = if c.im == 0.0 && c.re >= 0.0 { 4 } else { 0 };
            (s, level)
        };
        let (raw, level): (String, u8) = match &self.node {
            Node::Var => (var.to_string(), 4),
            Node::Const(c) => lit(c),
            Node::Sum(a, b) => (
                format!("{}+{}", a.render_prec(var, 1), b.render_prec(var, 2)),
                1,
            ),
            Node::Diff(a, b) => (
                format!("{}-{}", a.render_prec(var, 1), b.render_prec(var, 2)),
                1,
            ),
            Node::Prod(a, b) => (
                format!("{}*{}", a.render_prec(var, 2), b.render_prec(var, 3)),
                2,
            ),
            Node::Quot(a, b) => (
                format!(
                    "({})/({})",
                    a.render_prec(var, 0),
                    b.render_prec(var, 0)
                ),
                2,
            ),
            Node::Pow(a, k) => (format!("{}^{}", a.render_prec(var, 4), k), 3),
            Node::Exp(a) => (format!("exp({})", a.render_prec(var, 0)), 4),
            Node::Moebius(p, a) => (
                format!(
                    "moebius({}; {})",
                    format_complex(*p),
                    a.render_prec(var, 0)
                ),
                4,
            ),
            Node::Affine { mul, add, inner } => {
                let one = C::new(1.0, 0.0);
                let zero = C::new(0.0, 0.0);
                match (*mul == one, *add == zero) {
                    (true, true) => (inner.render_prec(var, need), need),
                    (true, false) => (
                        format!(
                            "{}+{}",
                            inner.render_prec(var, 1),
                            lit_wrap(lit(add), 2)
                        ),
                        1,
                    ),
                    (false, true) => (
                        format!(
                            "{}*{}",
                            lit_wrap(lit(mul), 2),
                            inner.render_prec(var, 3)
                        ),
                        2,
                    ),
                    (false, false) => (
                        format!(
                            "{}*{}+{}",
                            lit_wrap(lit(mul), 2),
                            inner.render_prec(var, 3),
                            lit_wrap(lit(add), 2)
                        ),
                        1,
                    ),
                }
            }
            Node::Compose { outer, inner } => {
                let i = format!("({})", inner.render_prec(var, 0));
                (outer.render_prec(&i, need), need)
            }
            Node::CoverPdisc(a) => (format!("cover_pdisc({})", a.render_prec(var, 0)), 4),
            Node::CoverAnnulus { r, inner } => (
                format!("cover_annulus({}; {})", r, inner.render_prec(var, 0)),
                4,
            ),
        };
        if level < need {
            format!("({raw})")
        } else {
            raw
        }
    }
}

fn lit_wrap((s, level): (String, u8), need: u8) -> String {
    if level < need {
        format!("({s})")
    } else {
        s
    }
}

/// Accumulated-argument zero count of `den` on |z| = radius; nonzero winding
/// means zeros inside the claimed region, which the point sampling can miss.
fn zero_free_winding_certificate(den: &HoloExpr, radius: f64) -> Result<()> {
    let pts = circle_points(QUOTIENT_SAMPLES, radius);
    let mut total = 0.0;
    let mut prev = den.eval(Jet::variable(pts[0]))?.value;
    for k in 1..=QUOTIENT_SAMPLES {
        let cur = den.eval(Jet::variable(pts[k % QUOTIENT_SAMPLES]))?.value;
        if cur.norm() <= DEN_FLOOR || prev.norm() <= DEN_FLOOR {
            return Err(Error::Region(
                "denominator vanishes on the certificate circle".into(),
            ));
        }
        total += (cur / prev).arg();
        prev = cur;
    }
    let winding = (total / std::f64::consts::TAU).round();
    if winding != 0.0 {
        return Err(Error::Region(format!(
            "denominator has {winding} zero(s) inside the certified region"
        )));
    }
    Ok(())
}

/// Exact composed radius for affine inners, sampled bisection otherwise.
fn composed_region(outer: &HoloExpr, inner: &HoloExpr) -> Result<f64> {
    if outer.region.is_infinite() {
        return Ok(inner.region);
    }
    if let Some((mul, add)) = affine_of_var(inner) {
        if mul.norm() == 0.0 {
            return if add.norm() < outer.region {
                Ok(f64::INFINITY)
            } else {
                Err(Error::Region("constant composition outside outer region".into()))
            };
        }
        let r = (outer.region - add.norm()) / mul.norm();
        if r <= 0.0 {
            return Err(Error::Region(
                "affine composition has empty certified region".into(),
            ));
        }
        return Ok(r.min(inner.region));
    }
    // sampled bisection on the boundary max of |inner|
    let cap = inner.region.min(1e6);
    let fits = |r: f64| -> Result<bool> {
        for z in circle_points(128, r) {
            if inner.eval(Jet::variable(z))?.value.norm() >= outer.region {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut lo = 0.0;
    let mut hi = cap * 0.999;
    if fits(hi)? {
        return Ok(hi);
    }
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        if fits(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        return Err(Error::Region("composition has empty certified region".into()));
    }
    Ok(lo)
}

/// Region for the covering primitives: the inner value must stay in E.
fn primitive_region(inner: &HoloExpr) -> Result<f64> {
    if let Some((mul, add)) = affine_of_var(inner) {
        if mul.norm() == 0.0 {
            return Err(Error::Region("constant inside a covering primitive".into()));
        }
        let r = (1.0 - add.norm()) / mul.norm();
        if r <= 0.0 {
            return Err(Error::Region("covering primitive has empty region".into()));
        }
        return Ok(r.min(inner.region));
    }
    let unit = HoloExpr {
        node: Node::Var,
        region: 1.0,
    };
    composed_region(&unit, inner)
}

fn affine_of_var(e: &HoloExpr) -> Option<(C, C)> {
    match &e.node {
        Node::Var => Some((C::new(1.0, 0.0), C::new(0.0, 0.0))),
        Node::Const(c) => Some((C::new(0.0, 0.0), *c)),
        Node::Affine { mul, add, inner } => {
            let (m, a) = affine_of_var(inner)?;
            Some((mul * m, mul * a + add))
        }
        _ => None,
    }
}

/// Max of |f| over `samples` equispaced points on |z| = radius, inflated by
/// [`BOUNDARY_INFLATION`]. By the maximum principle this over-estimates the
/// closed-disc maximum as samples grow; doubling the count keeps all points,
/// so the result is monotone along doublings.
pub fn boundary_max_modulus(f: &HoloExpr, radius: f64, samples: usize) -> Result<f64> {
    if samples < 64 {
        return Err(Error::InvalidArgument(format!(
            "boundary sampling needs at least 64 points, got {samples}"
        )));
    }
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    if radius >= f.region_radius() {
        return Err(Error::Region(format!(
            "radius {} reaches outside the certified region {}",
            radius,
            f.region_radius()
        )));
    }
    let pts = circle_points(samples, radius);
    let max = par::max_map(samples, |k| {
        f.eval(Jet::variable(pts[k]))
            .map(|j| j.value.norm())
            .unwrap_or(f64::NAN)
    });
    if !max.is_finite() {
        return Err(Error::NonFinite("boundary sampling".into()));
    }
    Ok(max * (1.0 + BOUNDARY_INFLATION))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn var() -> HoloExpr {
        HoloExpr::var()
    }

    #[test]
    fn identity_region_and_jets() {
        let f = var();
        let j = f.eval_jet(c(3.0, 0.0), JetOrder::Second).unwrap();
        assert_eq!(j.value, c(3.0, 0.0));
        assert_eq!(j.d1, c(1.0, 0.0));
        assert_eq!(j.d2, Some(c(0.0, 0.0)));
    }

    #[test]
    fn pdisc_cover_value_at_zero() {
        let p = HoloExpr::cover_pdisc(var()).unwrap();
        assert_eq!(p.region_radius(), 1.0);
        let j = p.eval_jet(c(0.0, 0.0), JetOrder::First).unwrap();
        assert!((j.value - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
        assert!((j.d1 - c(-2.0 * (-1.0f64).exp(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn compose_exp_with_cayley_jet() {
        // exp(-(1+z)/(1-z)) via generic nodes; jet at 0 is (1/e, -2/e)
        let num = HoloExpr::affine(c(-1.0, 0.0), c(-1.0, 0.0), var()).unwrap();
        let den = HoloExpr::affine(c(-1.0, 0.0), c(1.0, 0.0), var()).unwrap();
        let inner = HoloExpr::quot(num, den).unwrap();
        let f = HoloExpr::compose(HoloExpr::exp(var()), inner).unwrap();
        let j = f.eval_jet(c(0.0, 0.0), JetOrder::First).unwrap();
        assert!((j.value.re - 0.367_879_441_171_442_33).abs() < 1e-15);
        assert!((j.d1.re - (-0.735_758_882_342_884_6)).abs() < 1e-14);
    }

    #[test]
    fn compose_with_constant_inner_is_constant() {
        let zero = HoloExpr::affine(c(0.0, 0.0), c(0.0, 0.0), var()).unwrap();
        let f = HoloExpr::compose(HoloExpr::exp(var()), zero).unwrap();
        assert!(f.region_radius().is_infinite());
        for z in sample::disc_points(15, 20, 3.0) {
            let j = f.eval_jet(z, JetOrder::First).unwrap();
            assert!((j.value - c(1.0, 0.0)).norm() < 1e-15);
            assert!(j.d1.norm() < 1e-15);
        }
    }

    #[test]
    fn compose_affine_region_is_exact() {
        // f2 with region 1, shrunk by theta = 0.5: region 2
        let f2 = HoloExpr::moebius(c(0.3, 0.0), var()).unwrap();
        assert_eq!(f2.region_radius(), 1.0);
        let shift = HoloExpr::affine(c(0.5, 0.0), c(0.0, 0.0), var()).unwrap();
        let g = HoloExpr::compose(f2, shift).unwrap();
        assert!((g.region_radius() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quotient_pole_detected_at_construction() {
        // 1/(z - 0.5) has a pole inside E
        let den = HoloExpr::affine(c(1.0, 0.0), c(-0.5, 0.0), var()).unwrap();
        let err = HoloExpr::quot(var(), den);
        assert!(err.is_err());
    }

    #[test]
    fn eval_outside_region_errors() {
        let p = HoloExpr::cover_pdisc(var()).unwrap();
        assert!(p.eval_jet(c(1.5, 0.0), JetOrder::First).is_err());
    }

    #[test]
    fn boundary_max_examples() {
        let f = var();
        let m = boundary_max_modulus(&f, 1.0, 256).unwrap();
        assert!((m - 1.0).abs() < 3e-6);

        let g = HoloExpr::affine(c(0.5, 0.0), c(0.1, 0.0), var()).unwrap();
        let m = boundary_max_modulus(&g, 0.5, 256).unwrap();
        assert!((m - 0.35).abs() < 1e-6);

        let e = HoloExpr::exp(var());
        let m = boundary_max_modulus(&e, 1.0, 4096).unwrap();
        assert!((m - std::f64::consts::E).abs() < 1e-5);
    }

    #[test]
    fn boundary_max_monotone_under_doubling() {
        let e = HoloExpr::exp(HoloExpr::prod(var(), var()));
        let mut prev = 0.0;
        for k in [256usize, 512, 1024, 2048] {
            let m = boundary_max_modulus(&e, 0.8, k).unwrap();
            assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn d1_matches_central_differences() {
        // randomized sweep over a family built from the grammar
        let mut worst: f64 = 0.0;
        for (i, z) in sample::disc_points(7, 200, 0.4).into_iter().enumerate() {
            let a = c(0.3 + (i % 5) as f64 * 0.08, -0.2);
            let f = HoloExpr::exp(
                HoloExpr::prod(
                    HoloExpr::moebius(a, var()).unwrap(),
                    HoloExpr::affine(c(0.5, 0.1), c(0.0, 0.3), var()).unwrap(),
                ),
            );
            let j = f.eval_jet(z, JetOrder::First).unwrap();
            let h = 1e-6;
            let fd = (f.eval_value(z + c(h, 0.0)).unwrap()
                - f.eval_value(z - c(h, 0.0)).unwrap())
                / c(2.0 * h, 0.0);
            let rel = (j.d1 - fd).norm() / j.d1.norm().max(1e-12);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-6, "worst fd mismatch {worst}");
    }

    #[test]
    fn compose_follows_the_chain_rule() {
        let f = HoloExpr::exp(HoloExpr::powi(var(), 2));
        let g = HoloExpr::moebius(c(0.3, 0.1), var()).unwrap();
        let fg = HoloExpr::compose(f.clone(), g.clone()).unwrap();
        for z in sample::disc_points(19, 60, 0.85) {
            let lhs = fg.eval_jet(z, JetOrder::First).unwrap().d1;
            let gz = g.eval_jet(z, JetOrder::First).unwrap();
            let rhs = f.eval_jet(gz.value, JetOrder::First).unwrap().d1 * gz.d1;
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn composition_associates() {
        let f = HoloExpr::exp(var());
        let g = HoloExpr::moebius(c(0.2, 0.1), var()).unwrap();
        let h = HoloExpr::affine(c(0.4, 0.0), c(0.1, 0.0), var()).unwrap();
        let left = HoloExpr::compose(HoloExpr::compose(f.clone(), g.clone()).unwrap(), h.clone())
            .unwrap();
        let right = HoloExpr::compose(f, HoloExpr::compose(g, h).unwrap()).unwrap();
        for z in sample::disc_points(11, 50, 0.7) {
            let a = left.eval_jet(z, JetOrder::Second).unwrap();
            let b = right.eval_jet(z, JetOrder::Second).unwrap();
            assert!((a.value - b.value).norm() < 1e-12);
            assert!((a.d1 - b.d1).norm() < 1e-12);
            assert!((a.d2.unwrap() - b.d2.unwrap()).norm() < 1e-11);
        }
    }

    #[test]
    fn second_derivative_matches_differences_of_first() {
        let f = HoloExpr::cover_annulus(0.3, var()).unwrap();
        for z in sample::disc_points(13, 25, 0.5) {
            let j = f.eval_jet(z, JetOrder::Second).unwrap();
            let h = 1e-5;
            let dp = f.eval_jet(z + c(h, 0.0), JetOrder::First).unwrap().d1;
            let dm = f.eval_jet(z - c(h, 0.0), JetOrder::First).unwrap().d1;
            let fd = (dp - dm) / c(2.0 * h, 0.0);
            let rel = (j.d2.unwrap() - fd).norm() / j.d2.unwrap().norm().max(1e-9);
            assert!(rel < 1e-5, "rel {rel} at z {z}");
        }
    }
}
