//! Formal arithmetic of points on the abelian threefold.
//!
//! Points are elements of a finitely generated free abelian group modulo
//! declared relations; they label homogeneous line bundles `P_x` and, with a
//! twist, the line bundles `P_x(m.theta)` the monads are built from. The
//! genericity convention is built in: an expression vanishes only when it
//! lies in the relation lattice, so in a free group distinct formal points
//! stay distinct (no accidental torsion or coincidences).

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PointsError {
    #[error("unknown generator name `{0}`")]
    UnknownGenerator(String),
    #[error("expression has {got} coefficients, group has {expected} generators")]
    ExprLength { expected: usize, got: usize },
    #[error("relation has {got} coefficients, group has {expected} generators")]
    RelationLength { expected: usize, got: usize },
    #[error("mismatched point groups")]
    MismatchedGroups,
}

/// Finitely generated abelian group with named generators and integer
/// relations. Immutable after construction; the relation lattice is put in
/// row Hermite form once so that coset representatives are canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointGroup {
    generators: Vec<String>,
    relations: Vec<Vec<i64>>,
    /// Hermite-form rows of the relation lattice, each paired with its pivot
    /// column.
    hermite: Vec<(usize, Vec<i64>)>,
}

impl PointGroup {
    /// Free group: no relations, so expressions vanish only identically.
    pub fn free(generators: &[&str]) -> Arc<Self> {
        Self::with_relations(generators, &[]).expect("no relations to mismatch")
    }

    /// Group with declared integer relations (each combination is zero).
    pub fn with_relations(
        generators: &[&str],
        relations: &[Vec<i64>],
    ) -> Result<Arc<Self>, PointsError> {
        let n = generators.len();
        for r in relations {
            if r.len() != n {
                return Err(PointsError::RelationLength { expected: n, got: r.len() });
            }
        }
        let hermite = hermite_rows(relations.to_vec(), n);
        Ok(Arc::new(PointGroup {
            generators: generators.iter().map(|s| s.to_string()).collect(),
            relations: relations.to_vec(),
            hermite,
        }))
    }

    pub fn n_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generators
    }

    pub fn relations(&self) -> &[Vec<i64>] {
        &self.relations
    }

    pub fn zero(&self) -> PointExpr {
        PointExpr { coeffs: vec![0; self.generators.len()] }
    }

    /// The expression `1 . name`.
    pub fn generator(&self, name: &str) -> Result<PointExpr, PointsError> {
        self.expr(&[(name, 1)])
    }

    /// Builds and canonicalizes an integer combination of named generators.
    pub fn expr(&self, terms: &[(&str, i64)]) -> Result<PointExpr, PointsError> {
        let mut coeffs = vec![0i64; self.generators.len()];
        for (name, c) in terms {
            let idx = self
                .generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| PointsError::UnknownGenerator(name.to_string()))?;
            coeffs[idx] += c;
        }
        Ok(self.canonical(PointExpr { coeffs }))
    }

    pub fn from_coeffs(&self, coeffs: Vec<i64>) -> Result<PointExpr, PointsError> {
        if coeffs.len() != self.generators.len() {
            return Err(PointsError::ExprLength {
                expected: self.generators.len(),
                got: coeffs.len(),
            });
        }
        Ok(self.canonical(PointExpr { coeffs }))
    }

    /// Canonical coset representative modulo the relation lattice.
    fn canonical(&self, mut e: PointExpr) -> PointExpr {
        for (pivot, row) in &self.hermite {
            let p = row[*pivot];
            let q = e.coeffs[*pivot].div_euclid(p);
            if q != 0 {
                for (c, r) in e.coeffs.iter_mut().zip(row) {
                    *c -= q * r;
                }
            }
        }
        e
    }

    fn check(&self, e: &PointExpr) -> Result<(), PointsError> {
        if e.coeffs.len() != self.generators.len() {
            return Err(PointsError::ExprLength {
                expected: self.generators.len(),
                got: e.coeffs.len(),
            });
        }
        Ok(())
    }

    /// Whether the expression lies in the relation lattice, i.e. names the
    /// zero point of the group.
    pub fn is_zero(&self, e: &PointExpr) -> Result<bool, PointsError> {
        self.check(e)?;
        Ok(self.canonical(e.clone()).coeffs.iter().all(|&c| c == 0))
    }

    pub fn add(&self, a: &PointExpr, b: &PointExpr) -> Result<PointExpr, PointsError> {
        self.check(a)?;
        self.check(b)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Ok(self.canonical(PointExpr { coeffs }))
    }

    pub fn sub(&self, a: &PointExpr, b: &PointExpr) -> Result<PointExpr, PointsError> {
        self.check(a)?;
        self.check(b)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Ok(self.canonical(PointExpr { coeffs }))
    }

    pub fn neg(&self, a: &PointExpr) -> Result<PointExpr, PointsError> {
        self.check(a)?;
        Ok(self.canonical(PointExpr { coeffs: a.coeffs.iter().map(|x| -x).collect() }))
    }

    pub fn exprs_equal(&self, a: &PointExpr, b: &PointExpr) -> Result<bool, PointsError> {
        Ok(self.sub(a, b)?.coeffs.iter().all(|&c| c == 0))
    }

    pub fn labels_equal(
        &self,
        a: &LineBundleLabel,
        b: &LineBundleLabel,
    ) -> Result<bool, PointsError> {
        Ok(a.twist == b.twist && self.exprs_equal(&a.point, &b.point)?)
    }

    /// Cohomology dimensions `[h0, h1, h2, h3]` of `Hom(L1, L2)`-data, i.e.
    /// of the line bundle `P_{x2-x1}((m2-m1).theta)`.
    ///
    /// Positive twist difference concentrates in degree 0 with dimension the
    /// cube of the difference, negative in top degree; a nontrivial
    /// homogeneous bundle has no cohomology, and the trivial bundle has the
    /// exterior algebra on a 3-dimensional space.
    pub fn ext_dims(
        &self,
        l1: &LineBundleLabel,
        l2: &LineBundleLabel,
    ) -> Result<[usize; 4], PointsError> {
        let d = l2.twist - l1.twist;
        let diff = self.sub(&l2.point, &l1.point)?;
        Ok(if d > 0 {
            let h0 = (d * d * d) as usize;
            [h0, 0, 0, 0]
        } else if d < 0 {
            let h3 = (-d * -d * -d) as usize;
            [0, 0, 0, h3]
        } else if diff.coeffs.iter().all(|&c| c == 0) {
            [1, 3, 3, 1]
        } else {
            [0, 0, 0, 0]
        })
    }
}

/// Element of a [`PointGroup`], stored as a canonical coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PointExpr {
    coeffs: Vec<i64>,
}

impl PointExpr {
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }
}

/// Label for the line bundle `P_point(twist . theta)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineBundleLabel {
    pub twist: i64,
    pub point: PointExpr,
}

impl LineBundleLabel {
    pub fn new(twist: i64, point: PointExpr) -> Self {
        LineBundleLabel { twist, point }
    }
}

/// Row Hermite form of the lattice spanned by the given rows.
///
/// Plain integer row reduction with Euclidean pivot shrinking; rows are
/// sorted by pivot column, pivots made positive, and entries above each
/// pivot reduced into `[0, pivot)`.
fn hermite_rows(mut rows: Vec<Vec<i64>>, n: usize) -> Vec<(usize, Vec<i64>)> {
    rows.retain(|r| r.iter().any(|&c| c != 0));
    let mut result: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut col = 0;
    while col < n && !rows.is_empty() {
        // shrink column `col` of the remaining rows to a single pivot by gcd steps
        loop {
            let mut nz: Vec<usize> =
                (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by_key(|&i| rows[i][col].abs());
            let (small, other) = (nz[0], nz[1]);
            let q = rows[other][col] / rows[small][col];
            let small_row = rows[small].clone();
            for (x, s) in rows[other].iter_mut().zip(&small_row) {
                *x -= q * s;
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| rows[i][col] != 0) {
            let mut pivot_row = rows.swap_remove(i);
            if pivot_row[col] < 0 {
                for x in &mut pivot_row {
                    *x = -*x;
                }
            }
            result.push((col, pivot_row));
        }
        col += 1;
    }
    // reduce entries above each pivot so reduction is independent of order
    result.sort_by_key(|(p, _)| *p);
    for k in (0..result.len()).rev() {
        let (pivot, row) = result[k].clone();
        let p = row[pivot];
        for (_, above) in result.iter_mut().take(k) {
            let q = above[pivot].div_euclid(p);
            if q != 0 {
                for (c, r) in above.iter_mut().zip(&row) {
                    *c -= q * r;
                }
            }
        }
    }
    result
}

/// Generator names `a1..aN` for the standard pair configuration.
pub fn standard_generator_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("a{i}")).collect()
}

/// Free group on `a1..aN`, labelling `N` generic point pairs.
pub fn standard_free_group(n: usize) -> Arc<PointGroup> {
    let names = standard_generator_names(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    PointGroup::free(&refs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn moduli_group() -> Arc<PointGroup> {
        // a1 + a1' = b + b', a2 + a2' = b + b'
        PointGroup::with_relations(
            &["a1", "a1p", "a2", "a2p", "b", "bp"],
            &[vec![1, 1, 0, 0, -1, -1], vec![0, 0, 1, 1, -1, -1]],
        )
        .unwrap()
    }

    #[test]
    fn zero_detection_free_group() {
        let g = standard_free_group(3);
        let a1 = g.generator("a1").unwrap();
        let a2 = g.generator("a2").unwrap();
        let diff = g.sub(&a1, &a1).unwrap();
        assert!(g.is_zero(&diff).unwrap());
        let diff = g.sub(&a1, &a2).unwrap();
        assert!(!g.is_zero(&diff).unwrap());
    }

    #[test]
    fn zero_detection_with_relations() {
        let g = moduli_group();
        let e = g.expr(&[("a1", 1), ("a1p", 1), ("b", -1), ("bp", -1)]).unwrap();
        assert!(g.is_zero(&e).unwrap());
        // consequence of the two relations
        let e = g.expr(&[("a1", 1), ("a1p", 1), ("a2", -1), ("a2p", -1)]).unwrap();
        assert!(g.is_zero(&e).unwrap());
        let e = g.expr(&[("a1", 1), ("a2", -1)]).unwrap();
        assert!(!g.is_zero(&e).unwrap());
    }

    #[test]
    fn torsion_relation_lattice_membership() {
        // relation 2x = 0: x itself is NOT in the lattice
        let g = PointGroup::with_relations(&["x"], &[vec![2]]).unwrap();
        let x = g.generator("x").unwrap();
        assert!(!g.is_zero(&x).unwrap());
        let two_x = g.expr(&[("x", 2)]).unwrap();
        assert!(g.is_zero(&two_x).unwrap());
        let three_x = g.expr(&[("x", 3)]).unwrap();
        assert!(g.exprs_equal(&three_x, &x).unwrap());
    }

    #[test]
    fn unknown_generator_is_an_error() {
        let g = standard_free_group(2);
        assert!(matches!(g.expr(&[("c9", 1)]), Err(PointsError::UnknownGenerator(_))));
    }

    #[test]
    fn mismatched_expr_length_is_an_error() {
        let g = standard_free_group(2);
        assert!(matches!(
            g.from_coeffs(vec![1, 2, 3]),
            Err(PointsError::ExprLength { expected: 2, got: 3 })
        ));
    }

    fn label(g: &PointGroup, twist: i64, terms: &[(&str, i64)]) -> LineBundleLabel {
        LineBundleLabel::new(twist, g.expr(terms).unwrap())
    }

    #[test]
    fn ext_dims_examples() {
        let g = standard_free_group(2);
        let o_minus = label(&g, -1, &[]);
        let o_plus = label(&g, 1, &[]);
        let p_a1 = label(&g, 0, &[("a1", 1)]);
        let p_a2 = label(&g, 0, &[("a2", 1)]);

        assert_eq!(g.ext_dims(&o_minus, &p_a1).unwrap(), [1, 0, 0, 0]);
        assert_eq!(g.ext_dims(&o_minus, &o_plus).unwrap(), [8, 0, 0, 0]);
        assert_eq!(g.ext_dims(&p_a1, &p_a1).unwrap(), [1, 3, 3, 1]);
        assert_eq!(g.ext_dims(&p_a1, &p_a2).unwrap(), [0, 0, 0, 0]);
        assert_eq!(g.ext_dims(&o_plus, &o_minus).unwrap(), [0, 0, 0, 8]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        /// Canonical forms are sound: declared relations vanish, adding a
        /// lattice element never changes the class, and reduction is
        /// idempotent.
        #[test]
        fn canonical_form_respects_the_lattice(
            relations in proptest::collection::vec(
                proptest::collection::vec(-4i64..=4, 3), 0..3),
            coeffs in proptest::collection::vec(-6i64..=6, 3),
            mults in proptest::collection::vec(-3i64..=3, 3),
        ) {
            let g = PointGroup::with_relations(&["x", "y", "z"], &relations).unwrap();
            for r in &relations {
                prop_assert!(g.is_zero(&g.from_coeffs(r.clone()).unwrap()).unwrap());
            }
            let e = g.from_coeffs(coeffs.clone()).unwrap();
            // shift by a lattice element
            let mut shifted = coeffs;
            for (rel, m) in relations.iter().zip(&mults) {
                for (c, r) in shifted.iter_mut().zip(rel) {
                    *c += m * r;
                }
            }
            let e2 = g.from_coeffs(shifted).unwrap();
            prop_assert!(g.exprs_equal(&e, &e2).unwrap());
            prop_assert_eq!(g.from_coeffs(e.coeffs().to_vec()).unwrap(), e.clone());
        }

        /// Serre duality with trivial canonical bundle, and line-bundle
        /// Riemann-Roch on the threefold.
        #[test]
        fn ext_dims_duality_and_chi(
            t1 in -2i64..=2, t2 in -2i64..=2,
            c1 in proptest::collection::vec(-2i64..=2, 2),
            c2 in proptest::collection::vec(-2i64..=2, 2),
        ) {
            let g = standard_free_group(2);
            let l1 = LineBundleLabel::new(t1, g.from_coeffs(c1).unwrap());
            let l2 = LineBundleLabel::new(t2, g.from_coeffs(c2).unwrap());
            let fwd = g.ext_dims(&l1, &l2).unwrap();
            let bwd = g.ext_dims(&l2, &l1).unwrap();
            for q in 0..4 {
                prop_assert_eq!(fwd[q], bwd[3 - q]);
            }
            let chi: i64 = (0..4).map(|q| (fwd[q] as i64) * if q % 2 == 0 { 1 } else { -1 }).sum();
            let d = t2 - t1;
            prop_assert_eq!(chi, d * d * d);
        }
    }
}
