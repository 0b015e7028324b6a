//! Numerical Chow-ring arithmetic for rank-2 bundles on a principally
//! polarized abelian threefold of Picard number 1.
//!
//! Divisor classes are integer multiples of the principal polarization,
//! 1-cycles are integer multiples of half its square, and the only
//! intersection number needed is the cube, which is 6. Chern data of a
//! rank-2 bundle is the integer pair `(m, n)` with `c1 = m.theta` and
//! `c2 = n.theta^2/2`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{rat, Rat};

/// Triple self-intersection of the principal polarization.
pub const THETA_CUBED: i64 = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChowError {
    #[error("chi is non-integral for (m, n) = ({m}, {n}): both are odd")]
    NonIntegralChi { m: i64, n: i64 },
}

/// Chern data `(c1, c2) = (m.theta, n.theta^2/2)` of a rank-2 bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChernPair {
    pub m: i64,
    pub n: i64,
}

impl ChernPair {
    pub fn new(m: i64, n: i64) -> Self {
        ChernPair { m, n }
    }

    /// Bundle-realizable pairs have integral Euler characteristic, which
    /// forces `m` or `n` even.
    pub fn chi_is_integral(&self) -> bool {
        self.m % 2 == 0 || self.n % 2 == 0
    }
}

/// Existence verdict for `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// Strict Bogomolov holds and the divisibility condition is met: stable
    /// bundles exist.
    Exists,
    /// Equality in Bogomolov: only semihomogeneous, semistable-not-stable
    /// bundles.
    BoundarySemihomogeneous,
    /// Strict Bogomolov holds but divisibility fails; existence is open and
    /// the engine asserts nothing.
    UnknownHalf,
    /// Strict Bogomolov fails: no semistable bundle.
    OutsideBogomolov,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Exists => "EXISTS",
            Verdict::BoundarySemihomogeneous => "BOUNDARY_SEMIHOMOGENEOUS",
            Verdict::UnknownHalf => "UNKNOWN_HALF",
            Verdict::OutsideBogomolov => "OUTSIDE_BOGOMOLOV",
        };
        f.write_str(s)
    }
}

/// Euler characteristic `chi = m^3 - (3/2) n m` of a rank-2 bundle.
pub fn chi_rank2(c: ChernPair) -> Result<i64, ChowError> {
    if !c.chi_is_integral() {
        return Err(ChowError::NonIntegralChi { m: c.m, n: c.n });
    }
    let (m, n) = (c.m as i128, c.n as i128);
    let twice = 2 * m * m * m - 3 * n * m;
    debug_assert_eq!(twice % 2, 0);
    Ok((twice / 2) as i64)
}

/// Existence gate for stable rank-2 bundles with Chern data `c`.
pub fn existence_gate(c: ChernPair) -> Verdict {
    let (m, n) = (c.m as i128, c.n as i128);
    let excess = 2 * n - m * m;
    if excess < 0 {
        Verdict::OutsideBogomolov
    } else if excess == 0 {
        Verdict::BoundarySemihomogeneous
    } else if n % 2 == 0 && (m * n) % 4 == 0 {
        Verdict::Exists
    } else {
        Verdict::UnknownHalf
    }
}

/// Discriminant against the polarization: `(4 c2 - c1^2) . theta = 6 (2n - m^2)`.
pub fn discriminant_dot_theta(c: ChernPair) -> i64 {
    let (m, n) = (c.m as i128, c.n as i128);
    ((2 * n - m * m) * THETA_CUBED as i128) as i64
}

/// Expected dimension of the first-order deformation space of the bundles
/// built here: one third of the discriminant degree, plus five.
pub fn ext1_dim_formula(c: ChernPair) -> i64 {
    discriminant_dot_theta(c) / 3 + 5
}

/// Chern data after tensoring with a line bundle of class `k.theta`.
pub fn twist(c: ChernPair, k: i64) -> ChernPair {
    let (m, n, k) = (c.m as i128, c.n as i128, k as i128);
    ChernPair { m: (m + 2 * k) as i64, n: (n + 2 * m * k + 2 * k * k) as i64 }
}

/// Numerical class on the threefold with exact rational coefficients against
/// the basis `(1, theta, theta^2/2, theta^3/6)`.
///
/// This is enough ring structure to expand Chern characters and Whitney
/// products without ever leaving exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericalClass {
    /// Coefficients by codimension.
    pub c: [Rat; 4],
}

impl NumericalClass {
    pub fn zero() -> Self {
        NumericalClass { c: [rat(0), rat(0), rat(0), rat(0)] }
    }

    pub fn from_coeffs(c: [Rat; 4]) -> Self {
        NumericalClass { c }
    }

    /// Chern character of the line bundle `P_x(k.theta)`; the homogeneous
    /// part is numerically trivial, so this is `exp(k.theta)`.
    pub fn line_bundle_ch(k: i64) -> Self {
        NumericalClass {
            c: [rat(1), rat(k), rat(k) * rat(k), rat(k) * rat(k) * rat(k)],
        }
    }

    /// Chern character of a rank-2 bundle with Chern data `c`.
    pub fn rank2_ch(p: ChernPair) -> Self {
        // ch = 2 + c1 + (c1^2 - 2 c2)/2 + (c1^3 - 3 c1 c2)/6, with c3 = 0
        let c1 = NumericalClass::from_coeffs([rat(0), rat(p.m), rat(0), rat(0)]);
        let c2 = NumericalClass::from_coeffs([rat(0), rat(0), rat(p.n), rat(0)]);
        let c1sq = c1.mul(&c1);
        let c1cu = c1sq.mul(&c1);
        let mut ch = NumericalClass::from_coeffs([rat(2), rat(p.m), rat(0), rat(0)]);
        ch.c[2] = (c1sq.c[2].clone() - rat(2) * c2.c[2].clone()) / rat(2);
        ch.c[3] = (c1cu.c[3].clone() - rat(3) * c1.mul(&c2).c[3].clone()) / rat(6);
        ch
    }

    pub fn add(&self, other: &Self) -> Self {
        NumericalClass {
            c: std::array::from_fn(|i| self.c[i].clone() + other.c[i].clone()),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        NumericalClass {
            c: std::array::from_fn(|i| self.c[i].clone() - other.c[i].clone()),
        }
    }

    /// Intersection product, truncated above codimension 3.
    ///
    /// The basis multiplies as `theta.theta = 2 (theta^2/2)` and
    /// `theta.(theta^2/2) = 3 (theta^3/6)`.
    pub fn mul(&self, other: &Self) -> Self {
        let a = &self.c;
        let b = &other.c;
        let c0 = a[0].clone() * b[0].clone();
        let c1 = a[0].clone() * b[1].clone() + a[1].clone() * b[0].clone();
        let c2 = a[0].clone() * b[2].clone()
            + a[2].clone() * b[0].clone()
            + rat(2) * a[1].clone() * b[1].clone();
        let c3 = a[0].clone() * b[3].clone()
            + a[3].clone() * b[0].clone()
            + rat(3) * (a[1].clone() * b[2].clone() + a[2].clone() * b[1].clone());
        NumericalClass { c: [c0, c1, c2, c3] }
    }

    /// Degree of the codimension-3 part (`theta^3/6` is a single point).
    pub fn integral(&self) -> Rat {
        self.c[3].clone()
    }

    /// Rank and Chern pair of a rank-2 Chern character, if the coefficients
    /// are the integers they must be for an actual bundle.
    pub fn chern_pair_of_rank2_ch(&self) -> Option<ChernPair> {
        if self.c[0] != rat(2) {
            return None;
        }
        let m = rat_to_i64(&self.c[1])?;
        // ch2 = (c1^2 - 2 c2)/2, in theta^2/2 units: ch2 = m^2 - n
        let n = rat_to_i64(&(rat(m) * rat(m) - self.c[2].clone()))?;
        Some(ChernPair { m, n })
    }
}

fn rat_to_i64(r: &Rat) -> Option<i64> {
    use num::ToPrimitive;
    if !r.is_integer() {
        return None;
    }
    r.to_integer().to_i64()
}
