//! Deterministic sample generators: the R2 low-discrepancy sequence mapped to
//! discs and circles, plus seeded RNG helpers for randomized invariant trials.

use crate::C;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

// Plastic-constant parameters of the R2 sequence.
const G: f64 = 1.324_717_957_244_746;
const A1: f64 = 1.0 / G;
const A2: f64 = 1.0 / (G * G);

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// n-th point of the seeded R2 sequence in the unit square.
pub fn r2_point(seed: u64, n: usize) -> (f64, f64) {
    let base = (seed.wrapping_mul(7919) % 65_536) as f64 + n as f64 + 1.0;
    (frac(0.5 + A1 * base), frac(0.5 + A2 * base))
}

/// Quasi-random points filling the disc |z| < radius (area-uniform).
pub fn disc_points(seed: u64, n: usize, radius: f64) -> Vec<C> {
    (0..n)
        .map(|k| {
            let (u, v) = r2_point(seed, k);
            let r = radius * u.sqrt();
            C::from_polar(r, TAU * v)
        })
        .collect()
}

/// Quasi-random points in the annulus r0 < |z| < r1 (area-uniform).
pub fn annulus_points(seed: u64, n: usize, r0: f64, r1: f64) -> Vec<C> {
    (0..n)
        .map(|k| {
            let (u, v) = r2_point(seed, k);
            let r = (r0 * r0 + u * (r1 * r1 - r0 * r0)).sqrt();
            C::from_polar(r, TAU * v)
        })
        .collect()
}

/// `n` equispaced points on |z| = radius starting at angle 0, so that doubling
/// `n` keeps every existing point.
pub fn circle_points(n: usize, radius: f64) -> Vec<C> {
    (0..n)
        .map(|k| C::from_polar(radius, TAU * k as f64 / n as f64))
        .collect()
}

/// Quasi-random point pairs (z1, z2) in |z| < radius, z1 != z2.
pub fn disc_pairs(seed: u64, n: usize, radius: f64) -> Vec<(C, C)> {
    let pts = disc_points(seed, 2 * n, radius);
    pts.chunks_exact(2)
        .filter(|p| p[0] != p[1])
        .map(|p| (p[0], p[1]))
        .collect()
}

/// Seeded RNG for randomized trials; one stream per (seed, stream) pair.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream))
}

/// Random point in |z| <= radius.
pub fn random_in_disc<R: Rng>(rng: &mut R, radius: f64) -> C {
    let r = radius * rng.gen::<f64>().sqrt();
    let th = TAU * rng.gen::<f64>();
    C::from_polar(r, th)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_points_stay_inside() {
        for z in disc_points(0, 500, 0.9) {
            assert!(z.norm() < 0.9 + 1e-12);
        }
    }

    #[test]
    fn circle_doubling_nests() {
        let a = circle_points(8, 1.0);
        let b = circle_points(16, 1.0);
        for p in &a {
            assert!(b.iter().any(|q| (p - q).norm() < 1e-15));
        }
    }

    #[test]
    fn sequences_are_deterministic() {
        assert_eq!(disc_points(3, 16, 0.5), disc_points(3, 16, 0.5));
        assert_ne!(disc_points(3, 16, 0.5), disc_points(4, 16, 0.5));
    }
}
