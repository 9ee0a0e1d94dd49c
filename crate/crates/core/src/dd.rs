//! Double-double (two-f64) scalars, complex numbers and disc automorphisms.
//!
//! The counterexample pipeline evaluates covering maps at points whose
//! derivative scale reaches ~1e11 (annulus decks sit within ~1e-12 of the
//! boundary), so certificate points and Möbius parameters are carried as
//! hi+lo pairs; one ulp of plain f64 position error would already cost ~1e-5
//! of covering-equality residual. Field operations here are exact double-double
//! kernels; transcendentals are f64-backed with one correction step, which
//! bounds their absolute error around 1e-16 -- far below the 1e-9 contracts,
//! since evaluation error (unlike position error) is not derivative-amplified.

use crate::C;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

#[allow(clippy::should_implement_trait)] // value-passing kernel methods, not operator sugar
impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// pi to double-double precision.
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    /// 2*pi to double-double precision.
    pub const TAU: Dd = Dd {
        hi: std::f64::consts::TAU,
        lo: 2.449_293_598_294_706_4e-16,
    };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s1, e1) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s1, e1 + f);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, b: Dd) -> Dd {
        self.add(b.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Dd {
        self.add(Dd::from_f64(b))
    }

    pub fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self.sub(b.mul_f64(q1));
        let q2 = r.hi / b.hi;
        let r = r.sub(b.mul_f64(q2));
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add_f64(q3)
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        let y0 = self.hi.sqrt();
        let y = Dd::from_f64(y0);
        // one Newton step: y <- (y + x/y) / 2
        y.add(self.div(y)).mul_f64(0.5)
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn lt(self, b: Dd) -> bool {
        self.hi < b.hi || (self.hi == b.hi && self.lo < b.lo)
    }

    /// Natural log of a positive value; f64-backed with one correction step.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0);
        let y0 = self.hi.ln();
        let t = self.mul_f64((-y0).exp());
        let u = t.sub(Dd::ONE);
        // ln(1+u) ~ u - u^2/2, |u| ~ 1e-16
        Dd::from_f64(y0).add(u).sub(u.mul(u).mul_f64(0.5))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DdC {
    pub re: Dd,
    pub im: Dd,
}

#[allow(clippy::should_implement_trait)]
impl DdC {
    pub const ZERO: DdC = DdC {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: DdC = DdC {
        re: Dd::ONE,
        im: Dd::ZERO,
    };
    pub const I: DdC = DdC {
        re: Dd::ZERO,
        im: Dd::ONE,
    };

    #[inline]
    pub fn from_c(z: C) -> DdC {
        DdC {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    pub fn new(re: Dd, im: Dd) -> DdC {
        DdC { re, im }
    }

    #[inline]
    pub fn to_c(self) -> C {
        C::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline]
    pub fn add(self, b: DdC) -> DdC {
        DdC {
            re: self.re.add(b.re),
            im: self.im.add(b.im),
        }
    }

    #[inline]
    pub fn sub(self, b: DdC) -> DdC {
        DdC {
            re: self.re.sub(b.re),
            im: self.im.sub(b.im),
        }
    }

    #[inline]
    pub fn neg(self) -> DdC {
        DdC {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    #[inline]
    pub fn conj(self) -> DdC {
        DdC {
            re: self.re,
            im: self.im.neg(),
        }
    }

    #[inline]
    pub fn mul(self, b: DdC) -> DdC {
        DdC {
            re: self.re.mul(b.re).sub(self.im.mul(b.im)),
            im: self.re.mul(b.im).add(self.im.mul(b.re)),
        }
    }

    #[inline]
    pub fn mul_dd(self, s: Dd) -> DdC {
        DdC {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    #[inline]
    pub fn mul_f64(self, s: f64) -> DdC {
        DdC {
            re: self.re.mul_f64(s),
            im: self.im.mul_f64(s),
        }
    }

    /// Multiplication by i.
    #[inline]
    pub fn mul_i(self) -> DdC {
        DdC {
            re: self.im.neg(),
            im: self.re,
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }

    pub fn abs(self) -> Dd {
        self.norm_sqr().sqrt()
    }

    pub fn div(self, b: DdC) -> DdC {
        let d = b.norm_sqr();
        let n = self.mul(b.conj());
        DdC {
            re: n.re.div(d),
            im: n.im.div(d),
        }
    }

    /// exp of a complex double-double; |result| error ~1e-16 relative.
    pub fn exp(self) -> DdC {
        let m0 = self.re.hi.exp();
        let mag = Dd::from_f64(m0).mul(Dd::ONE.add_f64(self.re.lo));
        // range-reduce the angle mod 2*pi
        let k = (self.im.hi / std::f64::consts::TAU).round();
        let red = self.im.sub(Dd::TAU.mul_f64(k));
        let (s0, c0) = red.hi.sin_cos();
        let sin = Dd::from_f64(s0).add_f64(red.lo * c0);
        let cos = Dd::from_f64(c0).add_f64(-red.lo * s0);
        DdC {
            re: mag.mul(cos),
            im: mag.mul(sin),
        }
    }

    /// Principal log; arg is f64-backed (absolute error ~2e-16).
    pub fn ln(self) -> DdC {
        let r = self.abs().ln();
        let th = self.im.to_f64().atan2(self.re.to_f64());
        DdC {
            re: r,
            im: Dd::from_f64(th),
        }
    }
}

/// Disc automorphism as an exact 2x2 Möbius matrix in double-double.
///
/// Composition is the matrix product and inversion the adjugate, both exact
/// field operations; no unit-modulus phase normalization is ever applied, so
/// group identities hold to double-double rounding even when parameters enter
/// with f64-level modulus defects.
#[derive(Clone, Copy, Debug)]
pub struct DdAut {
    m: [DdC; 4],
}

impl DdAut {
    pub fn identity() -> DdAut {
        DdAut {
            m: [DdC::ONE, DdC::ZERO, DdC::ZERO, DdC::ONE],
        }
    }

    pub fn neg_id() -> DdAut {
        DdAut {
            m: [DdC::ONE.neg(), DdC::ZERO, DdC::ZERO, DdC::ONE],
        }
    }

    /// h_a(z) = (z - a)/(1 - conj(a) z).
    pub fn moebius(a: DdC) -> DdAut {
        DdAut {
            m: [DdC::ONE, a.neg(), a.conj().neg(), DdC::ONE],
        }
    }

    pub fn rotation(phase: DdC) -> DdAut {
        DdAut {
            m: [phase, DdC::ZERO, DdC::ZERO, DdC::ONE],
        }
    }

    pub fn from_matrix(m: [DdC; 4]) -> DdAut {
        DdAut { m }
    }

    pub fn apply(&self, z: DdC) -> DdC {
        let num = self.m[0].mul(z).add(self.m[1]);
        let den = self.m[2].mul(z).add(self.m[3]);
        num.div(den)
    }

    pub fn derivative(&self, z: DdC) -> DdC {
        let det = self.m[0].mul(self.m[3]).sub(self.m[1].mul(self.m[2]));
        let den = self.m[2].mul(z).add(self.m[3]);
        det.div(den.mul(den))
    }

    /// self after other.
    pub fn compose(&self, other: &DdAut) -> DdAut {
        let a = &self.m;
        let b = &other.m;
        DdAut {
            m: [
                a[0].mul(b[0]).add(a[1].mul(b[2])),
                a[0].mul(b[1]).add(a[1].mul(b[3])),
                a[2].mul(b[0]).add(a[3].mul(b[2])),
                a[2].mul(b[1]).add(a[3].mul(b[3])),
            ],
        }
    }

    pub fn invert(&self) -> DdAut {
        let m = &self.m;
        DdAut {
            m: [m[3], m[1].neg(), m[2].neg(), m[0]],
        }
    }

    /// Zero of the map: the (phase, center) center in double-double.
    pub fn center_dd(&self) -> DdC {
        self.m[1].div(self.m[0]).neg()
    }

    /// (phase, center) normal form rounded to f64.
    pub fn to_aut_f64(&self) -> (C, C) {
        let phase = self.m[0].div(self.m[3]);
        let phase = phase.div(DdC {
            re: phase.abs(),
            im: Dd::ZERO,
        });
        (phase.to_c(), self.center_dd().to_c())
    }
}

/// Möbius distance |(z-w)/(1-z*conj(w))| in double-double.
pub fn moebius_distance_dd(z: DdC, w: DdC) -> Dd {
    let num = z.sub(w);
    let den = DdC::ONE.sub(z.mul(w.conj()));
    num.abs().div(den.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> Dd {
        Dd::from_f64(x)
    }

    #[test]
    fn field_identities_hold_beyond_f64() {
        let a = dd(1.0).add_f64(1e-17); // not representable in f64
        assert_eq!(a.hi, 1.0);
        assert_eq!(a.lo, 1e-17);
        let b = a.sub(dd(1.0));
        assert!((b.to_f64() - 1e-17).abs() < 1e-33);

        let x = dd(std::f64::consts::PI).mul(dd(std::f64::consts::E));
        let y = x.div(dd(std::f64::consts::E));
        let err = y.sub(dd(std::f64::consts::PI));
        assert!(err.to_f64().abs() < 1e-30);

        let s = dd(2.0).sqrt();
        let back = s.mul(s).sub(dd(2.0));
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn ln_is_accurate() {
        let x = dd(0.3);
        let l = x.ln();
        // ln 0.3 = -1.2039728043259360...
        assert!((l.to_f64() - (-1.203_972_804_325_936)).abs() < 1e-15);
        // exp(ln x) = x to ~1e-16 relative
        let back = DdC { re: l, im: Dd::ZERO }.exp();
        assert!((back.re.to_f64() - 0.3).abs() < 1e-16);
    }

    #[test]
    fn complex_division_round_trips() {
        let a = DdC::from_c(C::new(0.3, -1.7));
        let b = DdC::from_c(C::new(-0.9, 0.4));
        let q = a.div(b).mul(b);
        assert!(q.sub(a).abs().to_f64() < 1e-30);
    }

    #[test]
    fn exp_of_i_pi_is_minus_one() {
        let w = DdC {
            re: Dd::ZERO,
            im: Dd::PI,
        };
        let e = w.exp();
        assert!((e.re.to_f64() + 1.0).abs() < 1e-16);
        assert!(e.im.to_f64().abs() < 1e-16);
    }

    #[test]
    fn aut_compose_invert_is_identity() {
        let rot = DdAut::rotation(DdC::from_c(C::from_polar(1.0, 0.7)));
        let f = rot.compose(&DdAut::moebius(DdC::from_c(C::new(0.3, -0.4))));
        let id = f.compose(&f.invert());
        for z in [C::new(0.1, 0.2), C::new(-0.5, 0.1), C::new(0.0, -0.8)] {
            let zd = DdC::from_c(z);
            let w = id.apply(zd);
            assert!(w.sub(zd).abs().to_f64() < 1e-28);
            // pointwise as well, composing applications
            let w2 = f.invert().apply(f.apply(zd));
            assert!(w2.sub(zd).abs().to_f64() < 1e-28);
        }
    }

    #[test]
    fn deep_center_cancellation_survives() {
        // 1 - |c|^2 for |c| within 1e-13 of 1 keeps ~16 significant digits
        let lam = 4.3e-13;
        let c = Dd::ONE.sub(dd(lam)).div(Dd::ONE.add(dd(lam)));
        let one_minus = Dd::ONE.sub(c.mul(c));
        let expected = 4.0 * lam / (1.0 + lam) / (1.0 + lam); // to first order
        assert!(((one_minus.to_f64() - expected) / expected).abs() < 1e-12);
    }
}
