//! Bookkeeping for the curve side of the construction: components cut out
//! by pairs of opposite theta-translates, the Chern data of the
//! corresponding bundles, the stability predicate in terms of declared
//! translate containments, and family dimensions.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::chow::ChernPair;
use crate::points::{PointExpr, PointGroup, PointsError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SerreError {
    #[error("curve has no components")]
    EmptyCurve,
    #[error("containment data only covers twists 2 and 3, got {0}")]
    UnsupportedTwist(i64),
    #[error("need at least 2 components, got {0}")]
    TooFewComponents(usize),
    #[error(transparent)]
    Points(#[from] PointsError),
}

/// One curve component: the intersection of the translates by a point and
/// its opposite. The set of translates containing it is exactly those two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveComponent {
    pub point: PointExpr,
    pub containing_translates: BTreeSet<PointExpr>,
}

/// Union of pairwise-disjoint components over a common point group.
#[derive(Debug, Clone)]
pub struct CurveSpec {
    components: Vec<CurveComponent>,
}

impl CurveSpec {
    /// Builds the curve with components labelled by the given points; each
    /// component records its two containing translates.
    pub fn new(group: &PointGroup, points: &[PointExpr]) -> Result<Self, SerreError> {
        let mut components = Vec::with_capacity(points.len());
        for p in points {
            let mut set = BTreeSet::new();
            set.insert(p.clone());
            set.insert(group.neg(p)?);
            components.push(CurveComponent { point: p.clone(), containing_translates: set });
        }
        Ok(CurveSpec { components })
    }

    /// The standard configuration: `n` generic points in a free group.
    pub fn standard(n: usize) -> Result<Self, SerreError> {
        let group = crate::points::standard_free_group(n);
        let points: Result<Vec<_>, _> =
            (1..=n).map(|i| group.generator(&format!("a{i}"))).collect();
        Self::new(&group, &points?)
    }

    pub fn components(&self) -> &[CurveComponent] {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }
}

/// Chern data of the twisted bundle the curve corresponds to: determinant
/// twice the polarization, second class the number of components times its
/// square.
pub fn correspondence_chern(c: &CurveSpec) -> Result<ChernPair, SerreError> {
    let n = c.n_components();
    if n == 0 {
        return Err(SerreError::EmptyCurve);
    }
    Ok(ChernPair::new(2, 2 * n as i64))
}

/// Slope stability of the corresponding bundle with first class `m`, for
/// the twists whose containment data the components carry (`m` in `{2, 3}`,
/// where halving rounds down to 1): stable iff no single translate contains
/// every component.
pub fn stable(c: &CurveSpec, m: i64) -> Result<bool, SerreError> {
    if !(2..=3).contains(&m) {
        return Err(SerreError::UnsupportedTwist(m));
    }
    let mut common: Option<BTreeSet<PointExpr>> = None;
    for comp in &c.components {
        common = Some(match common {
            None => comp.containing_translates.clone(),
            Some(acc) => acc.intersection(&comp.containing_translates).cloned().collect(),
        });
    }
    Ok(match common {
        None => false,
        Some(set) => set.is_empty(),
    })
}

/// Dimension of the family of bundles corresponding to a fixed curve with
/// `n` components: the scaling torus of the components modulo the global
/// one.
pub fn family_dim(n: usize) -> Result<usize, SerreError> {
    if n < 2 {
        return Err(SerreError::TooFewComponents(n));
    }
    Ok(n - 1)
}

/// Dimensions of the extension groups against the individual components:
/// one per connected component.
pub fn ext_decomposition_dims(c: &CurveSpec) -> Vec<usize> {
    vec![1; c.n_components()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::{existence_gate, twist, Verdict};
    use crate::points::standard_free_group;

    #[test]
    fn correspondence_chern_examples() {
        assert_eq!(
            correspondence_chern(&CurveSpec::standard(2).unwrap()).unwrap(),
            ChernPair::new(2, 4)
        );
        assert_eq!(
            correspondence_chern(&CurveSpec::standard(3).unwrap()).unwrap(),
            ChernPair::new(2, 6)
        );
        let empty = CurveSpec { components: vec![] };
        assert_eq!(correspondence_chern(&empty), Err(SerreError::EmptyCurve));
    }

    #[test]
    fn untwisting_matches_the_monad_chern_data() {
        for n in 2..=6 {
            let c = correspondence_chern(&CurveSpec::standard(n).unwrap()).unwrap();
            assert_eq!(twist(c, -1), ChernPair::new(0, 2 * (n as i64 - 1)));
        }
    }

    #[test]
    fn construction_lands_in_the_existence_region() {
        for n in 2..=8 {
            let c = correspondence_chern(&CurveSpec::standard(n).unwrap()).unwrap();
            assert_eq!(existence_gate(c), Verdict::Exists);
        }
    }

    #[test]
    fn stability_examples() {
        assert!(stable(&CurveSpec::standard(2).unwrap(), 2).unwrap());
        assert!(stable(&CurveSpec::standard(2).unwrap(), 3).unwrap());
        assert!(stable(&CurveSpec::standard(5).unwrap(), 2).unwrap());
        // a single pair is contained in its own translates
        assert!(!stable(&CurveSpec::standard(1).unwrap(), 2).unwrap());
    }

    #[test]
    fn shared_point_destroys_stability() {
        let group = standard_free_group(2);
        let a1 = group.generator("a1").unwrap();
        let curve = CurveSpec::new(&group, &[a1.clone(), a1]).unwrap();
        assert!(!stable(&curve, 2).unwrap());
    }

    #[test]
    fn unsupported_twist_rejected() {
        let c = CurveSpec::standard(2).unwrap();
        assert_eq!(stable(&c, 4), Err(SerreError::UnsupportedTwist(4)));
        assert_eq!(stable(&c, 0), Err(SerreError::UnsupportedTwist(0)));
    }

    #[test]
    fn family_dims() {
        assert_eq!(family_dim(2).unwrap(), 1);
        assert_eq!(family_dim(5).unwrap(), 4);
        assert_eq!(family_dim(1), Err(SerreError::TooFewComponents(1)));
    }

    #[test]
    fn ext_decomposition() {
        assert_eq!(ext_decomposition_dims(&CurveSpec::standard(2).unwrap()), vec![1, 1]);
        assert_eq!(ext_decomposition_dims(&CurveSpec::standard(4).unwrap()), vec![1; 4]);
        for n in 2..=6 {
            let dims = ext_decomposition_dims(&CurveSpec::standard(n).unwrap());
            assert_eq!(dims.iter().sum::<usize>(), n);
        }
    }
}
