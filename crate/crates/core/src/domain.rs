//! Model planar domains and their affine images: membership, boundary
//! distance, and the text descriptors used by the CLI.

use crate::{ensure_finite, Error, Result, C};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Kind {
    /// The unit disc E.
    Disc,
    /// The complex plane.
    Plane,
    /// The punctured plane C \ {0}.
    PuncturedPlane,
    /// The punctured unit disc E \ {0}.
    PuncturedDisc,
    /// The annulus { r < |z| < 1 }, 0 < r < 1.
    Annulus(f64),
}

/// z -> mul*z + add with mul != 0.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AffineMap {
    pub mul: C,
    pub add: C,
}

impl AffineMap {
    pub fn new(mul: C, add: C) -> Result<AffineMap> {
        ensure_finite(mul, "affine mul")?;
        ensure_finite(add, "affine add")?;
        if mul.norm() == 0.0 {
            return Err(Error::InvalidArgument("affine map with mul = 0".into()));
        }
        Ok(AffineMap { mul, add })
    }

    pub fn apply(&self, z: C) -> C {
        self.mul * z + self.add
    }

    pub fn invert(&self, w: C) -> C {
        (w - self.add) / self.mul
    }
}

/// A model domain, optionally moved by an affine map. Affine images keep
/// membership and boundary distances exact, which the disc constructions
/// rely on; more general biholomorphic images are out of scope.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PlanarDomain {
    pub kind: Kind,
    pub post: Option<AffineMap>,
}

impl PlanarDomain {
    pub fn new(kind: Kind) -> Result<PlanarDomain> {
        if let Kind::Annulus(r) = kind {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "annulus radius {r} must lie strictly in (0,1)"
                )));
            }
        }
        Ok(PlanarDomain { kind, post: None })
    }

    pub fn disc() -> PlanarDomain {
        PlanarDomain { kind: Kind::Disc, post: None }
    }

    pub fn plane() -> PlanarDomain {
        PlanarDomain { kind: Kind::Plane, post: None }
    }

    pub fn cstar() -> PlanarDomain {
        PlanarDomain { kind: Kind::PuncturedPlane, post: None }
    }

    pub fn pdisc() -> PlanarDomain {
        PlanarDomain { kind: Kind::PuncturedDisc, post: None }
    }

    pub fn annulus(r: f64) -> Result<PlanarDomain> {
        PlanarDomain::new(Kind::Annulus(r))
    }

    pub fn with_post(mut self, post: AffineMap) -> PlanarDomain {
        self.post = Some(post);
        self
    }

    /// Parse `disc | plane | cstar | pdisc | annulus:<r>`.
    pub fn parse_descriptor(text: &str) -> Result<PlanarDomain> {
        let t = text.trim();
        match t {
            "disc" => Ok(PlanarDomain::disc()),
            "plane" => Ok(PlanarDomain::plane()),
            "cstar" => Ok(PlanarDomain::cstar()),
            "pdisc" => Ok(PlanarDomain::pdisc()),
            _ => {
                if let Some(rest) = t.strip_prefix("annulus:") {
                    let r: f64 = rest.parse().map_err(|_| Error::InvalidArgument(
                        format!("bad annulus radius `{rest}`"),
                    ))?;
                    PlanarDomain::annulus(r)
                } else {
                    Err(Error::InvalidArgument(format!(
                        "unknown domain descriptor `{t}` (expected disc | plane | cstar | pdisc | annulus:<r>)"
                    )))
                }
            }
        }
    }

    pub fn descriptor(&self) -> String {
        let base = match self.kind {
            Kind::Disc => "disc".to_string(),
            Kind::Plane => "plane".to_string(),
            Kind::PuncturedPlane => "cstar".to_string(),
            Kind::PuncturedDisc => "pdisc".to_string(),
            Kind::Annulus(r) => format!("annulus:{r}"),
        };
        match &self.post {
            None => base,
            Some(p) => format!(
                "{base} (affine image: mul={}, add={})",
                crate::format_complex(p.mul),
                crate::format_complex(p.add)
            ),
        }
    }

    fn model_contains(kind: Kind, z: C) -> bool {
        let n = z.norm();
        match kind {
            Kind::Disc => n < 1.0,
            Kind::Plane => true,
            Kind::PuncturedPlane => n > 0.0,
            Kind::PuncturedDisc => n > 0.0 && n < 1.0,
            Kind::Annulus(r) => n > r && n < 1.0,
        }
    }

    /// Exact membership.
    pub fn contains(&self, w: C) -> bool {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return false;
        }
        let z = match &self.post {
            None => w,
            Some(p) => p.invert(w),
        };
        Self::model_contains(self.kind, z)
    }

    /// Distance from w to the boundary (infinite for the plane).
    pub fn boundary_distance(&self, w: C) -> Result<f64> {
        if !self.contains(w) {
            return Err(Error::InvalidArgument(format!(
                "point {} is not in {}",
                crate::format_complex(w),
                self.descriptor()
            )));
        }
        let (z, scale) = match &self.post {
            None => (w, 1.0),
            Some(p) => (p.invert(w), p.mul.norm()),
        };
        let n = z.norm();
        let d = match self.kind {
            Kind::Disc => 1.0 - n,
            Kind::Plane => f64::INFINITY,
            Kind::PuncturedPlane => n,
            Kind::PuncturedDisc => n.min(1.0 - n),
            Kind::Annulus(r) => (n - r).min(1.0 - n),
        };
        Ok(scale * d)
    }

    /// Simply connected: the pseudometrics agree on any product with this factor.
    pub fn is_simply_connected(&self) -> bool {
        matches!(self.kind, Kind::Disc | Kind::Plane)
    }

    /// Biholomorphic to the punctured plane: same conclusion through the plane cover.
    pub fn is_cstar_like(&self) -> bool {
        matches!(self.kind, Kind::PuncturedPlane)
    }

    pub fn to_model(&self, w: C) -> C {
        match &self.post {
            None => w,
            Some(p) => p.invert(w),
        }
    }

    pub fn from_model(&self, z: C) -> C {
        match &self.post {
            None => z,
            Some(p) => p.apply(z),
        }
    }
}
