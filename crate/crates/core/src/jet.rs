//! Forward-mode jets: (value, f', f'') triples propagated exactly through
//! field operations, exp, integer powers and Möbius maps. No differencing,
//! no symbolic rewriting.

use crate::C;
use serde::Serialize;

/// Evaluation order for [`crate::HoloExpr::eval_jet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetOrder {
    First,
    Second,
}

/// Public jet: value and first derivative always, second derivative when
/// requested.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Jet2 {
    pub value: C,
    pub d1: C,
    pub d2: Option<C>,
}

/// Internal full jet; all arithmetic tracks the second derivative (the cost
/// is negligible next to tree traversal).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: C,
    pub d1: C,
    pub d2: C,
}

#[allow(clippy::should_implement_trait)] // value-passing jet kernels
impl Jet {
    pub fn constant(c: C) -> Jet {
        Jet {
            value: c,
            d1: C::new(0.0, 0.0),
            d2: C::new(0.0, 0.0),
        }
    }

    pub fn variable(z: C) -> Jet {
        Jet {
            value: z,
            d1: C::new(1.0, 0.0),
            d2: C::new(0.0, 0.0),
        }
    }

    pub fn add(self, b: Jet) -> Jet {
        Jet {
            value: self.value + b.value,
            d1: self.d1 + b.d1,
            d2: self.d2 + b.d2,
        }
    }

    pub fn sub(self, b: Jet) -> Jet {
        Jet {
            value: self.value - b.value,
            d1: self.d1 - b.d1,
            d2: self.d2 - b.d2,
        }
    }

    pub fn mul(self, b: Jet) -> Jet {
        Jet {
            value: self.value * b.value,
            d1: self.d1 * b.value + self.value * b.d1,
            d2: self.d2 * b.value + 2.0 * self.d1 * b.d1 + self.value * b.d2,
        }
    }

    /// Quotient; caller checks the denominator value against zero.
    pub fn div(self, b: Jet) -> Jet {
        let q = self.value / b.value;
        let d1 = (self.d1 - q * b.d1) / b.value;
        let d2 = (self.d2 - 2.0 * d1 * b.d1 - q * b.d2) / b.value;
        Jet { value: q, d1, d2 }
    }

    pub fn scale(self, s: C) -> Jet {
        Jet {
            value: s * self.value,
            d1: s * self.d1,
            d2: s * self.d2,
        }
    }

    pub fn shift(self, s: C) -> Jet {
        Jet {
            value: self.value + s,
            ..self
        }
    }

    pub fn exp(self) -> Jet {
        let e = self.value.exp();
        Jet {
            value: e,
            d1: e * self.d1,
            d2: e * (self.d2 + self.d1 * self.d1),
        }
    }

    pub fn powi(self, k: u32) -> Jet {
        match k {
            0 => Jet::constant(C::new(1.0, 0.0)),
            1 => self,
            _ => {
                let w = self.value;
                let kf = k as f64;
                let p2 = w.powu(k - 2);
                let p1 = p2 * w;
                let outer_v = p1 * w;
                let outer_d1 = kf * p1;
                let outer_d2 = kf * (kf - 1.0) * p2;
                self.chain(outer_v, outer_d1, outer_d2)
            }
        }
    }

    /// Chain an outer 2-jet (value/d1/d2 of the outer map at `self.value`)
    /// through this jet.
    pub fn chain(self, outer_v: C, outer_d1: C, outer_d2: C) -> Jet {
        Jet {
            value: outer_v,
            d1: outer_d1 * self.d1,
            d2: outer_d2 * self.d1 * self.d1 + outer_d1 * self.d2,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    pub fn truncate(self, order: JetOrder) -> Jet2 {
        Jet2 {
            value: self.value,
            d1: self.d1,
            d2: match order {
                JetOrder::First => None,
                JetOrder::Second => Some(self.d2),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn square_at_three() {
        let j = Jet::variable(c(3.0, 0.0)).powi(2);
        assert_eq!(j.value, c(9.0, 0.0));
        assert_eq!(j.d1, c(6.0, 0.0));
        assert_eq!(j.d2, c(2.0, 0.0));
    }

    #[test]
    fn exp_at_zero() {
        let j = Jet::variable(c(0.0, 0.0)).exp();
        assert_eq!(j.value, c(1.0, 0.0));
        assert_eq!(j.d1, c(1.0, 0.0));
        assert_eq!(j.d2, c(1.0, 0.0));
    }

    #[test]
    fn product_rule_second_order() {
        // (1+z)(1-0.5z) = 1 + 0.5 z - 0.5 z^2
        let z = Jet::variable(c(0.0, 0.0));
        let f = z.shift(c(1.0, 0.0)).mul(z.scale(c(-0.5, 0.0)).shift(c(1.0, 0.0)));
        assert_eq!(f.value, c(1.0, 0.0));
        assert_eq!(f.d1, c(0.5, 0.0));
        assert_eq!(f.d2, c(-1.0, 0.0));
    }

    #[test]
    fn quotient_matches_closed_form() {
        // f = 1/(1-z): f' = 1/(1-z)^2, f'' = 2/(1-z)^3 at z=0.3
        let z = Jet::variable(c(0.3, 0.0));
        let one = Jet::constant(c(1.0, 0.0));
        let f = one.div(one.sub(z));
        let s = 1.0 / 0.7;
        assert!((f.value - c(s, 0.0)).norm() < 1e-14);
        assert!((f.d1 - c(s * s, 0.0)).norm() < 1e-14);
        assert!((f.d2 - c(2.0 * s * s * s, 0.0)).norm() < 1e-13);
    }
}
