//! Exact-arithmetic engine for rank-2 bundles on principally polarized
//! abelian threefolds, built from monads of theta-translate line bundles.
//!
//! The engine works at desk scale and entirely over the rationals: Chern
//! class arithmetic and the existence gate ([`chow`]), formal point groups
//! labelling homogeneous line bundles ([`points`]), a seeded exact model of
//! the relevant section spaces ([`sections`]), decomposable monads and their
//! chain-map spaces ([`complexes`]), the hyperext spectral sequence with its
//! explicit obstruction differential ([`hyperext`]), bookkeeping for the
//! associated curves ([`serre`]) and for the two-pair moduli description
//! ([`moduli2`]).
//!
//! All linear algebra runs through [`linalg`], which is generic over the
//! scalar field; the engine instantiates it at [`Rat`] and contains no
//! floating point anywhere.

pub mod chow;
pub mod complexes;
pub mod hyperext;
pub mod linalg;
pub mod moduli2;
pub mod points;
pub mod sections;
pub mod serre;

/// Exact scalar used throughout the engine.
pub type Rat = num::BigRational;

/// Arbitrary-precision integer backing [`Rat`].
pub type Int = num::BigInt;

/// Dense matrix over [`Rat`].
pub type Mat = linalg::Matrix<Rat>;

/// Subspace of a rational coordinate space.
pub type QSubspace = linalg::Subspace<Rat>;

/// Engine version embedded in machine-readable reports.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shorthand used everywhere: the rational `n/1`.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// The rational `n/d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}
