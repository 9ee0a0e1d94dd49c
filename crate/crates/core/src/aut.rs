//! Automorphisms of the unit disc in (phase, center) normal form:
//! z -> phase * (z - center) / (1 - conj(center) z), |phase| = 1, |center| < 1.
//! Closed-form composition and inversion through 2x2 matrix representatives,
//! Möbius distance, two-point interpolation, and the swap involution used by
//! the counterexample construction.

use crate::expr::HoloExpr;
use crate::{ensure_finite, Error, Result, C};
use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiscAut {
    pub phase: C,
    pub center: C,
}

impl DiscAut {
    pub fn new(phase: C, center: C) -> Result<DiscAut> {
        ensure_finite(phase, "automorphism phase")?;
        ensure_finite(center, "automorphism center")?;
        let pn = phase.norm();
        if pn == 0.0 {
            return Err(Error::InvalidArgument("zero phase".into()));
        }
        if center.norm() >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "automorphism center |c| = {} must be < 1",
                center.norm()
            )));
        }
        Ok(DiscAut {
            phase: phase / pn,
            center,
        })
    }

    pub fn identity() -> DiscAut {
        DiscAut {
            phase: C::new(1.0, 0.0),
            center: C::new(0.0, 0.0),
        }
    }

    /// z -> -z.
    pub fn neg_id() -> DiscAut {
        DiscAut {
            phase: C::new(-1.0, 0.0),
            center: C::new(0.0, 0.0),
        }
    }

    pub fn rotation(phase: C) -> Result<DiscAut> {
        DiscAut::new(phase, C::new(0.0, 0.0))
    }

    pub fn apply(&self, z: C) -> C {
        self.phase * (z - self.center) / (C::new(1.0, 0.0) - self.center.conj() * z)
    }

    pub fn derivative(&self, z: C) -> C {
        let den = C::new(1.0, 0.0) - self.center.conj() * z;
        self.phase * (1.0 - self.center.norm_sqr()) / (den * den)
    }

    fn matrix(&self) -> [C; 4] {
        [
            self.phase,
            -self.phase * self.center,
            -self.center.conj(),
            C::new(1.0, 0.0),
        ]
    }

    fn from_matrix(m: [C; 4]) -> Result<DiscAut> {
        if m[0].norm() == 0.0 || m[3].norm() == 0.0 {
            return Err(Error::Numerics("degenerate automorphism matrix".into()));
        }
        DiscAut::new(m[0] / m[3], -m[1] / m[0])
    }

    /// self ∘ other, back in normal form.
    pub fn compose(&self, other: &DiscAut) -> Result<DiscAut> {
        let a = self.matrix();
        let b = other.matrix();
        DiscAut::from_matrix([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }

    pub fn invert(&self) -> DiscAut {
        let m = self.matrix();
        // entries of the adjugate; A-entry is nonzero for any disc automorphism
        DiscAut::from_matrix([m[3], -m[1], -m[2], m[0]])
            .expect("inverse of a disc automorphism is a disc automorphism")
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        (self.phase - C::new(1.0, 0.0)).norm() <= tol && self.center.norm() <= tol
    }

    /// The automorphism as an expression tree (phase * h_center).
    pub fn to_expr(&self) -> Result<HoloExpr> {
        let h = HoloExpr::moebius(self.center, HoloExpr::var())?;
        HoloExpr::affine(self.phase, C::new(0.0, 0.0), h)
    }
}

/// h_a: the automorphism with h_a(a) = 0 and h_a'(a) = 1/(1-|a|^2).
pub fn moebius_h(a: C) -> Result<DiscAut> {
    DiscAut::new(C::new(1.0, 0.0), a)
}

/// Möbius distance m(z, w) = |(z - w)/(1 - z conj(w))| on E.
pub fn moebius_distance(z: C, w: C) -> Result<f64> {
    ensure_finite(z, "moebius distance argument")?;
    ensure_finite(w, "moebius distance argument")?;
    if z.norm() >= 1.0 || w.norm() >= 1.0 {
        return Err(Error::InvalidArgument(
            "moebius distance needs both points inside E".into(),
        ));
    }
    // ratio of norms, not norm of the ratio: bit-exact symmetry in (z, w)
    Ok((z - w).norm() / (C::new(1.0, 0.0) - z * w.conj()).norm())
}

/// The unique automorphism with h(x1) = y1, h(x2) = y2; exists iff the Möbius
/// distances m(x1,x2) and m(y1,y2) agree (checked to 1e-10).
pub fn two_point_interpolant(x1: C, y1: C, x2: C, y2: C) -> Result<DiscAut> {
    let mx = moebius_distance(x1, x2)?;
    let my = moebius_distance(y1, y2)?;
    if (mx - my).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "no such automorphism: invariant mismatch m(x)={mx} vs m(y)={my}"
        )));
    }
    let hx = moebius_h(x1)?;
    let hy = moebius_h(y1)?;
    let u = hy.apply(y2);
    let v = hx.apply(x2);
    let rot = if v.norm() == 0.0 || u.norm() == 0.0 {
        DiscAut::identity()
    } else {
        DiscAut::rotation(u / v)?
    };
    hy.invert().compose(&rot.compose(&hx)?)
}

/// The involution φ_a = h_{-a} ∘ (-id) ∘ h_{h_a(ψ(a))} ∘ h_a; it swaps a and
/// ψ(a) and is its own inverse. Requires ψ(a) != a.
pub fn phi_involution(a: C, psi: &DiscAut) -> Result<DiscAut> {
    let pa = psi.apply(a);
    if (pa - a).norm() < 1e-14 {
        return Err(Error::Degenerate(
            "a is a fixed point of the automorphism".into(),
        ));
    }
    let ha = moebius_h(a)?;
    let b = ha.apply(pa);
    let chain = moebius_h(b)?.compose(&ha)?;
    let chain = DiscAut::neg_id().compose(&chain)?;
    moebius_h(-a)?.compose(&chain)
}
