//! Monads of line bundles: graded objects, the decomposable builder, the
//! skew transposition rule, Chern bookkeeping, and chain-map spaces.
//!
//! A monad here is a three-term complex `A -> B -> C` whose objects are
//! labelled line bundles and whose differentials are scalar matrices against
//! the one-dimensional Hom spaces between summands. The middle object's
//! summands come in pairs; the only products of sections the engine ever
//! needs couple the two maps through a summand of pair `i` and land on the
//! model vector `t_i`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chow::{ChernPair, NumericalClass};
use crate::points::{standard_free_group, LineBundleLabel, PointGroup, PointsError};
use crate::sections::{CheckItem, GenericModel, SectionsError, V2_DIM};
use crate::{rat, Mat, QSubspace, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexesError {
    #[error("section scalar for pair {index} ({sign}) is zero")]
    ZeroScalar { index: usize, sign: char },
    #[error("monads are over different models")]
    MismatchedModels,
    #[error("monads have different graded objects")]
    MismatchedObjects,
    #[error("middle-object labels are not pairwise distinct")]
    DuplicateMiddleLabels,
    #[error("matrix shapes do not match the graded object")]
    ShapeMismatch,
    #[error("pair index {index} out of range for model with {n} pairs")]
    PairOutOfRange { index: usize, n: usize },
    #[error("expected {expected} scalar pairs, got {got}")]
    ScalarCount { expected: usize, got: usize },
    #[error("cohomology Chern character is not that of a rank-2 bundle")]
    NonRankTwo,
    #[error(transparent)]
    Points(#[from] PointsError),
    #[error(transparent)]
    Sections(#[from] SectionsError),
}

/// Ordered line-bundle labels of the three graded pieces (degrees -1, 0, 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedObject {
    pub a: Vec<LineBundleLabel>,
    pub b: Vec<LineBundleLabel>,
    pub c: Vec<LineBundleLabel>,
}

/// Matrix with entries in the modeled 8-dimensional section space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Rat>>,
}

impl SectionMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SectionMatrix { rows, cols, entries: vec![vec![rat(0); V2_DIM]; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &[Rat] {
        &self.entries[r * self.cols + c]
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut Vec<Rat> {
        &mut self.entries[r * self.cols + c]
    }

    pub fn add_into(&mut self, r: usize, c: usize, v: &[Rat], scale: &Rat) {
        let e = self.entry_mut(r, c);
        for (ek, vk) in e.iter_mut().zip(v) {
            *ek = ek.clone() + scale.clone() * vk.clone();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(num::Zero::is_zero)
    }

    /// Flattens row-major into coordinates of `Hom(A, C)`: entry `(r, c)`
    /// occupies the 8 slots starting at `(r * cols + c) * 8`.
    pub fn flatten(&self) -> Vec<Rat> {
        self.entries.iter().flatten().cloned().collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect())
            .collect();
        SectionMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn transpose(&self) -> Self {
        let mut out = SectionMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *out.entry_mut(c, r) = self.entry(r, c).to_vec();
            }
        }
        out
    }
}

/// Monad of labelled line bundles over a sampled section model.
///
/// `phi` is `|B| x |A|`, `psi` is `|C| x |B|`, both scalar against the fixed
/// bases of the one-dimensional Hom spaces. `pair[s]` names the model pair
/// the `s`-th middle summand belongs to: composing the two differentials
/// through that summand multiplies onto `t_{pair[s]}`.
#[derive(Debug, Clone)]
pub struct Monad {
    model: Arc<GenericModel>,
    group: Arc<PointGroup>,
    objects: GradedObject,
    pair: Vec<usize>,
    phi: Mat,
    psi: Mat,
}

impl Monad {
    /// Structural constructor; checks shapes, not the monad identity.
    pub fn new(
        model: Arc<GenericModel>,
        group: Arc<PointGroup>,
        objects: GradedObject,
        pair: Vec<usize>,
        phi: Mat,
        psi: Mat,
    ) -> Result<Self, ComplexesError> {
        let (n_a, n_b, n_c) = (objects.a.len(), objects.b.len(), objects.c.len());
        if phi.rows() != n_b || phi.cols() != n_a || psi.rows() != n_c || psi.cols() != n_b {
            return Err(ComplexesError::ShapeMismatch);
        }
        if pair.len() != n_b {
            return Err(ComplexesError::ShapeMismatch);
        }
        for &p in &pair {
            if p >= model.n() {
                return Err(ComplexesError::PairOutOfRange { index: p, n: model.n() });
            }
        }
        for s in 0..n_b {
            for s2 in s + 1..n_b {
                if group.labels_equal(&objects.b[s], &objects.b[s2])? {
                    return Err(ComplexesError::DuplicateMiddleLabels);
                }
            }
        }
        Ok(Monad { model, group, objects, pair, phi, psi })
    }

    pub fn model(&self) -> &Arc<GenericModel> {
        &self.model
    }

    pub fn group(&self) -> &Arc<PointGroup> {
        &self.group
    }

    pub fn objects(&self) -> &GradedObject {
        &self.objects
    }

    pub fn pair(&self) -> &[usize] {
        &self.pair
    }

    pub fn phi(&self) -> &Mat {
        &self.phi
    }

    pub fn psi(&self) -> &Mat {
        &self.psi
    }

    /// Number of point pairs of the underlying model.
    pub fn n_pairs(&self) -> usize {
        self.model.n()
    }

    /// Same ordered labels in every degree. The pair assignment may differ:
    /// it is model bookkeeping, not part of the objects.
    pub fn same_objects(&self, other: &Monad) -> bool {
        self.objects == other.objects
    }

    /// Composite `psi . phi` as a matrix of section-space vectors.
    pub fn composition(&self) -> SectionMatrix {
        let (n_a, n_b, n_c) = (self.objects.a.len(), self.objects.b.len(), self.objects.c.len());
        let mut out = SectionMatrix::zero(n_c, n_a);
        for k in 0..n_c {
            for j in 0..n_a {
                for s in 0..n_b {
                    let coef = self.psi[(k, s)].clone() * self.phi[(s, j)].clone();
                    if !num::Zero::is_zero(&coef) {
                        let t = self.model.t_ambient(self.pair[s]).expect("pair checked");
                        out.add_into(k, j, &t, &coef);
                    }
                }
            }
        }
        out
    }

    /// Decomposable-monad serialization: the model reference plus the two
    /// scalar matrices, rationals as `p/q` strings.
    pub fn to_json(&self) -> String {
        let ser = MonadJson {
            model_ref: ModelRef { n: self.model.n(), seed: self.model.seed() },
            phi: mat_to_strings(&self.phi),
            psi: mat_to_strings(&self.psi),
        };
        serde_json::to_string(&ser).expect("monad serialization cannot fail")
    }

    /// Rebuilds a decomposable-shaped monad serialized by [`Monad::to_json`].
    pub fn from_json(s: &str) -> Result<Self, Box<dyn std::error::Error>> {
        let ser: MonadJson = serde_json::from_str(s)?;
        let model = Arc::new(crate::sections::sample_model(ser.model_ref.n, ser.model_ref.seed)?);
        let skeleton = build_decomposable(&model, None)?;
        let phi = strings_to_mat(&ser.phi)?;
        let psi = strings_to_mat(&ser.psi)?;
        Ok(Monad::new(
            model,
            skeleton.group.clone(),
            skeleton.objects.clone(),
            skeleton.pair.clone(),
            phi,
            psi,
        )?)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelRef {
    #[serde(rename = "N")]
    n: usize,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct MonadJson {
    model_ref: ModelRef,
    phi: Vec<Vec<String>>,
    psi: Vec<Vec<String>>,
}

fn mat_to_strings(m: &Mat) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols()).map(|j| format!("{}/{}", m[(i, j)].numer(), m[(i, j)].denom())).collect()
        })
        .collect()
}

fn strings_to_mat(rows: &[Vec<String>]) -> Result<Mat, Box<dyn std::error::Error>> {
    let parsed: Result<Vec<Vec<Rat>>, _> = rows
        .iter()
        .map(|r| r.iter().map(|s| s.parse::<Rat>()).collect::<Result<Vec<_>, _>>())
        .collect();
    Ok(Mat::from_rows(parsed?)?)
}

/// The decomposable pattern: entry `(pair, col)` may be nonzero iff the pair
/// is the column's own or the last one.
fn pattern_allows(pair: usize, col: usize, n: usize) -> bool {
    pair == col || pair == n - 1
}

/// Builds the decomposable monad over `model`, with optional nonzero scalar
/// coefficients `(c_plus, c_minus)` per point pair (all 1 when omitted).
///
/// The first map has the diagonal-plus-bottom-row pattern in each sign, the
/// second is its skew transpose, and the composite vanishes identically.
pub fn build_decomposable(
    model: &Arc<GenericModel>,
    scalars: Option<&[(Rat, Rat)]>,
) -> Result<Monad, ComplexesError> {
    let n = model.n();
    let n_a = n - 1;
    let default: Vec<(Rat, Rat)> = vec![(rat(1), rat(1)); n];
    let scalars = match scalars {
        None => &default[..],
        Some(s) => {
            if s.len() != n {
                return Err(ComplexesError::ScalarCount { expected: n, got: s.len() });
            }
            for (i, (cp, cm)) in s.iter().enumerate() {
                if num::Zero::is_zero(cp) {
                    return Err(ComplexesError::ZeroScalar { index: i, sign: '+' });
                }
                if num::Zero::is_zero(cm) {
                    return Err(ComplexesError::ZeroScalar { index: i, sign: '-' });
                }
            }
            s
        }
    };

    let group = standard_free_group(n);
    let zero = group.zero();
    let mut b_labels = Vec::with_capacity(2 * n);
    let mut pair = Vec::with_capacity(2 * n);
    for i in 0..n {
        let name = format!("a{}", i + 1);
        let plus = group.generator(&name)?;
        let minus = group.neg(&plus)?;
        b_labels.push(LineBundleLabel::new(0, plus));
        b_labels.push(LineBundleLabel::new(0, minus));
        pair.push(i);
        pair.push(i);
    }
    let objects = GradedObject {
        a: vec![LineBundleLabel::new(-1, zero.clone()); n_a],
        b: b_labels,
        c: vec![LineBundleLabel::new(1, zero); n_a],
    };

    let mut phi = Mat::zero(2 * n, n_a);
    for i in 0..n {
        for j in 0..n_a {
            if pattern_allows(i, j, n) {
                phi[(2 * i, j)] = scalars[i].0.clone();
                phi[(2 * i + 1, j)] = scalars[i].1.clone();
            }
        }
    }
    let psi = transpose_via_iota(&phi);

    let monad = Monad::new(model.clone(), group, objects, pair, phi, psi)?;
    debug_assert!(validate_monad(&monad).all_pass());
    Ok(monad)
}

/// Skew transposition `f -> dual(f) . iota` for a map into the middle
/// object, with the pairwise symplectic form on each summand pair.
///
/// Rows of the input are middle summands interleaved as `(+, -, +, -, ...)`;
/// column `s` of the output reads the partner row of the input, with a sign
/// on the `-` slots.
pub fn transpose_via_iota(phi: &Mat) -> Mat {
    let n_b = phi.rows();
    let n_a = phi.cols();
    assert_eq!(n_b % 2, 0, "middle summands must come in pairs");
    Mat::from_fn(n_a, n_b, |j, s| {
        let partner = s ^ 1;
        let sign = if s % 2 == 0 { rat(1) } else { rat(-1) };
        sign * phi[(partner, j)].clone()
    })
}

/// Inverse-direction rule, taking a map out of the middle object back to a
/// map into it. Composing with [`transpose_via_iota`] gives minus the
/// identity, as the symplectic form squares to -1.
pub fn transpose_via_iota_rev(psi: &Mat) -> Mat {
    let n_a = psi.rows();
    let n_b = psi.cols();
    assert_eq!(n_b % 2, 0, "middle summands must come in pairs");
    Mat::from_fn(n_b, n_a, |s, j| {
        let partner = s ^ 1;
        let sign = if s % 2 == 0 { rat(1) } else { rat(-1) };
        sign * psi[(j, partner)].clone()
    })
}

/// Itemized monad validation report.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub items: Vec<CheckItem>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.items.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

/// Checks the monad identity (the composite vanishes exactly) and the
/// decomposable shape: entries off the pattern are zero, entries on it are
/// nonzero.
pub fn validate_monad(m: &Monad) -> ValidationReport {
    let mut items = Vec::new();
    let n = m.n_pairs();

    items.push(CheckItem { name: "psi . phi = 0".to_string(), pass: m.composition().is_zero() });

    let mut on_pattern_nonzero = true;
    let mut off_pattern_zero = true;
    for s in 0..m.phi.rows() {
        for j in 0..m.phi.cols() {
            if pattern_allows(m.pair[s], j, n) {
                on_pattern_nonzero &= !num::Zero::is_zero(&m.phi[(s, j)]);
            } else {
                off_pattern_zero &= num::Zero::is_zero(&m.phi[(s, j)]);
            }
        }
    }
    for k in 0..m.psi.rows() {
        for s in 0..m.psi.cols() {
            if pattern_allows(m.pair[s], k, n) {
                on_pattern_nonzero &= !num::Zero::is_zero(&m.psi[(k, s)]);
            } else {
                off_pattern_zero &= num::Zero::is_zero(&m.psi[(k, s)]);
            }
        }
    }
    items.push(CheckItem { name: "pattern entries nonzero".to_string(), pass: on_pattern_nonzero });
    items.push(CheckItem { name: "off-pattern entries zero".to_string(), pass: off_pattern_zero });

    ValidationReport { items }
}

/// Chern data of the cohomology bundle, by Chern-character additivity over
/// the monad.
pub fn chern_of_cohomology(m: &Monad) -> Result<ChernPair, ComplexesError> {
    cohomology_ch(m).chern_pair_of_rank2_ch().ok_or(ComplexesError::NonRankTwo)
}

/// Chern character `ch(B) - ch(A) - ch(C)` of the cohomology.
pub fn cohomology_ch(m: &Monad) -> NumericalClass {
    let mut ch = NumericalClass::zero();
    for l in &m.objects.b {
        ch = ch.add(&NumericalClass::line_bundle_ch(l.twist));
    }
    for l in m.objects.a.iter().chain(&m.objects.c) {
        ch = ch.sub(&NumericalClass::line_bundle_ch(l.twist));
    }
    ch
}

/// Basis layout of the degree-0 endomorphism-type space
/// `Hom(A1,A2) + Hom(B1,B2) + Hom(C1,C2)`, restricted to the label-allowed
/// entries. Pairs are `(source summand, target summand)`.
#[derive(Debug, Clone)]
pub struct EndoBasis {
    pub alpha: Vec<(usize, usize)>,
    pub beta: Vec<(usize, usize)>,
    pub gamma: Vec<(usize, usize)>,
}

impl EndoBasis {
    pub fn dim(&self) -> usize {
        self.alpha.len() + self.beta.len() + self.gamma.len()
    }

    pub fn beta_offset(&self) -> usize {
        self.alpha.len()
    }

    pub fn gamma_offset(&self) -> usize {
        self.alpha.len() + self.beta.len()
    }

    pub fn alpha_index(&self, src: usize, tgt: usize) -> Option<usize> {
        self.alpha.iter().position(|&p| p == (src, tgt))
    }

    pub fn beta_index(&self, src: usize, tgt: usize) -> Option<usize> {
        self.beta.iter().position(|&p| p == (src, tgt)).map(|i| self.beta_offset() + i)
    }

    pub fn gamma_index(&self, src: usize, tgt: usize) -> Option<usize> {
        self.gamma.iter().position(|&p| p == (src, tgt)).map(|i| self.gamma_offset() + i)
    }
}

fn allowed_pairs(
    group: &PointGroup,
    src: &[LineBundleLabel],
    tgt: &[LineBundleLabel],
) -> Result<Vec<(usize, usize)>, PointsError> {
    let mut out = Vec::new();
    for (i, ls) in src.iter().enumerate() {
        for (j, lt) in tgt.iter().enumerate() {
            if group.labels_equal(ls, lt)? {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

/// Computes the label-allowed degree-0 basis between two monads with the
/// same shape.
pub fn endo_basis(m1: &Monad, m2: &Monad) -> Result<EndoBasis, ComplexesError> {
    let g = m1.group.as_ref();
    Ok(EndoBasis {
        alpha: allowed_pairs(g, &m1.objects.a, &m2.objects.a)?,
        beta: allowed_pairs(g, &m1.objects.b, &m2.objects.b)?,
        gamma: allowed_pairs(g, &m1.objects.c, &m2.objects.c)?,
    })
}

/// The three-term Hom complex between two monads over the same model and
/// objects, with explicit differentials.
///
/// Degree 0 is the label-allowed endomorphism space, degree 1 is
/// `Hom(A1,B2) + Hom(B1,C2)` (scalar coordinates against the section
/// symbols), degree 2 is `Hom(A1,C2)` (eight coordinates per entry). The
/// differential is `f -> d.f - (-1)^{deg f} f.d`.
#[derive(Debug, Clone)]
pub struct HomComplex {
    pub basis0: EndoBasis,
    pub dims: [usize; 3],
    /// `dims[1] x dims[0]`.
    pub d0: Mat,
    /// `dims[2] x dims[1]`.
    pub d1: Mat,
    n_a: usize,
    n_b: usize,
}

impl HomComplex {
    /// Coordinate of the `Hom(A1, B2)` entry `(s, j)` in degree 1.
    pub fn mu_index(&self, s: usize, j: usize) -> usize {
        s * self.n_a + j
    }

    /// Coordinate of the `Hom(B1, C2)` entry `(k, s)` in degree 1.
    pub fn g_index(&self, k: usize, s: usize) -> usize {
        self.n_b * self.n_a + k * self.n_b + s
    }
}

/// Assembles the Hom complex of the pair `(m1, m2)`.
pub fn hom_complex(m1: &Monad, m2: &Monad) -> Result<HomComplex, ComplexesError> {
    if m1.model != m2.model {
        return Err(ComplexesError::MismatchedModels);
    }
    if !m1.same_objects(m2) {
        return Err(ComplexesError::MismatchedObjects);
    }
    let n_a = m1.objects.a.len();
    let n_b = m1.objects.b.len();
    let basis0 = endo_basis(m1, m2)?;
    let dims = [basis0.dim(), 2 * n_b * n_a, V2_DIM * n_a * n_a];

    // d0(alpha, beta, gamma) = (phi2.alpha - beta.phi1, psi2.beta - gamma.psi1)
    let mut d0 = Mat::zero(dims[1], dims[0]);
    for (col, &(src, tgt)) in basis0.alpha.iter().enumerate() {
        // phi2.alpha at entry (s, src): coefficient phi2[s][tgt]
        for s in 0..n_b {
            if !num::Zero::is_zero(&m2.phi[(s, tgt)]) {
                d0[(s * n_a + src, col)] = m2.phi[(s, tgt)].clone();
            }
        }
    }
    for (i, &(src, tgt)) in basis0.beta.iter().enumerate() {
        let col = basis0.beta_offset() + i;
        // -beta.phi1 at entry (tgt, j): coefficient -phi1[src][j]
        for j in 0..n_a {
            if !num::Zero::is_zero(&m1.phi[(src, j)]) {
                d0[(tgt * n_a + j, col)] = -m1.phi[(src, j)].clone();
            }
        }
        // psi2.beta at entry (k, src): coefficient psi2[k][tgt]
        for k in 0..n_a {
            if !num::Zero::is_zero(&m2.psi[(k, tgt)]) {
                d0[(n_b * n_a + k * n_b + src, col)] = m2.psi[(k, tgt)].clone();
            }
        }
    }
    for (i, &(src, tgt)) in basis0.gamma.iter().enumerate() {
        let col = basis0.gamma_offset() + i;
        // -gamma.psi1 at entry (tgt, s): coefficient -psi1[src][s]
        for s in 0..n_b {
            if !num::Zero::is_zero(&m1.psi[(src, s)]) {
                let row = n_b * n_a + tgt * n_b + s;
                d0[(row, col)] = d0[(row, col)].clone() - m1.psi[(src, s)].clone();
            }
        }
    }

    // d1(mu, g) = psi2.mu + g.phi1, valued in Hom(A1, C2) over the section
    // space; each composite multiplies onto the product vector of the middle
    // summand it passes through, in that monad's own pair bookkeeping
    let mut d1 = Mat::zero(dims[2], dims[1]);
    for s in 0..n_b {
        let t2 = m2.model.t_ambient(m2.pair[s]).expect("pair checked at construction");
        for k in 0..n_a {
            if !num::Zero::is_zero(&m2.psi[(k, s)]) {
                for j in 0..n_a {
                    let col = s * n_a + j;
                    for (v, tv) in t2.iter().enumerate() {
                        let row = (k * n_a + j) * V2_DIM + v;
                        d1[(row, col)] = d1[(row, col)].clone() + m2.psi[(k, s)].clone() * tv.clone();
                    }
                }
            }
        }
        let t1 = m1.model.t_ambient(m1.pair[s]).expect("pair checked at construction");
        for j in 0..n_a {
            if !num::Zero::is_zero(&m1.phi[(s, j)]) {
                for k in 0..n_a {
                    let col = n_b * n_a + k * n_b + s;
                    for (v, tv) in t1.iter().enumerate() {
                        let row = (k * n_a + j) * V2_DIM + v;
                        d1[(row, col)] = d1[(row, col)].clone() + m1.phi[(s, j)].clone() * tv.clone();
                    }
                }
            }
        }
    }

    Ok(HomComplex { basis0, dims, d0, d1, n_a, n_b })
}

/// Basis of the space of degree-`d` chain maps `M1 -> M2`, as the kernel of
/// the Hom-complex differential (for `d = 2` there is no condition).
pub fn chain_maps(m1: &Monad, m2: &Monad, d: u8) -> Result<QSubspace, ComplexesError> {
    let hc = hom_complex(m1, m2)?;
    Ok(match d {
        0 => hc.d0.kernel_basis(),
        1 => hc.d1.kernel_basis(),
        2 => Mat::zero(0, hc.dims[2]).kernel_basis(),
        _ => panic!("chain maps only live in degrees 0..=2"),
    })
}

/// Dimension of degree-`p` chain self-maps modulo homotopy: the cohomology
/// of the three-term Hom complex at position `p`.
pub fn homotopy_classes(m: &Monad, p: u8) -> Result<usize, ComplexesError> {
    let hc = hom_complex(m, m)?;
    Ok(match p {
        0 => hc.dims[0] - hc.d0.rank(),
        1 => (hc.dims[1] - hc.d1.rank()) - hc.d0.rank(),
        2 => hc.dims[2] - hc.d1.rank(),
        _ => panic!("the Hom complex is concentrated in degrees 0..=2"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::twist;
    use crate::sections::sample_model;

    fn model(n: usize, seed: u64) -> Arc<GenericModel> {
        Arc::new(sample_model(n, seed).unwrap())
    }

    #[test]
    fn decomposable_n2_has_four_nonzero_phi_entries_and_zero_composite() {
        let m = build_decomposable(&model(2, 1), None).unwrap();
        let nonzero = (0..4).filter(|&s| !num::Zero::is_zero(&m.phi()[(s, 0)])).count();
        assert_eq!(nonzero, 4);
        assert!(m.composition().is_zero());
    }

    #[test]
    fn composite_vanishes_for_every_seed_and_scalars() {
        for n in 2..=5 {
            for seed in [1, 2, 3] {
                let m = build_decomposable(&model(n, seed), None).unwrap();
                assert!(validate_monad(&m).all_pass());
            }
        }
        let scalars: Vec<(Rat, Rat)> =
            vec![(rat(2), rat(3)), (rat(-1), rat(5)), (crate::ratio(1, 2), rat(7))];
        let m = build_decomposable(&model(3, 4), Some(&scalars)).unwrap();
        assert!(validate_monad(&m).all_pass());
    }

    #[test]
    fn zero_scalar_is_rejected() {
        let scalars = vec![(rat(0), rat(1)), (rat(1), rat(1))];
        assert_eq!(
            build_decomposable(&model(2, 1), Some(&scalars)).unwrap_err(),
            ComplexesError::ZeroScalar { index: 0, sign: '+' }
        );
    }

    #[test]
    fn unsigned_transpose_fails_validation_with_diagonal_residue() {
        let m = build_decomposable(&model(2, 5), None).unwrap();
        // drop the sign flip: both signs get the plain partner transpose
        let bad_psi = Mat::from_fn(1, 4, |j, s| m.phi()[(s ^ 1, j)].clone());
        let bad = Monad::new(
            m.model().clone(),
            m.group().clone(),
            m.objects().clone(),
            m.pair().to_vec(),
            m.phi().clone(),
            bad_psi,
        )
        .unwrap();
        let report = validate_monad(&bad);
        assert!(!report.all_pass());
        assert!(report.failures().contains(&"psi . phi = 0"));
        // the composite is twice the t-sum on the diagonal
        let comp = bad.composition();
        let t0 = bad.model().t_ambient(0).unwrap();
        let t1 = bad.model().t_ambient(1).unwrap();
        let expected: Vec<Rat> =
            (0..V2_DIM).map(|v| rat(2) * (t0[v].clone() + t1[v].clone())).collect();
        assert_eq!(comp.entry(0, 0), &expected[..]);
    }

    #[test]
    fn zero_phi_passes_composition_but_fails_shape() {
        let m = build_decomposable(&model(2, 6), None).unwrap();
        let zeroed = Monad::new(
            m.model().clone(),
            m.group().clone(),
            m.objects().clone(),
            m.pair().to_vec(),
            Mat::zero(4, 1),
            Mat::zero(1, 4),
        )
        .unwrap();
        let report = validate_monad(&zeroed);
        assert!(report.items.iter().any(|c| c.name == "psi . phi = 0" && c.pass));
        assert!(report.failures().contains(&"pattern entries nonzero"));
    }

    #[test]
    fn iota_transpose_matches_decomposable_and_squares_to_minus_one() {
        for n in 2..=4 {
            let m = build_decomposable(&model(n, 7), None).unwrap();
            assert_eq!(&transpose_via_iota(m.phi()), m.psi());
            let back = transpose_via_iota_rev(m.psi());
            let minus_phi = Mat::from_fn(2 * n, n - 1, |s, j| -m.phi()[(s, j)].clone());
            assert_eq!(back, minus_phi);
        }
        let z = Mat::zero(4, 1);
        assert_eq!(transpose_via_iota(&z), Mat::zero(1, 4));
    }

    #[test]
    fn chern_of_cohomology_examples() {
        for (n, expected) in [(2usize, (0i64, 2i64)), (3, (0, 4)), (5, (0, 8))] {
            let m = build_decomposable(&model(n, 1), None).unwrap();
            let c = chern_of_cohomology(&m).unwrap();
            assert_eq!((c.m, c.n), expected);
            assert_eq!(twist(c, 1), ChernPair::new(2, 2 * n as i64));
            // rank additivity over the monad
            assert_eq!(cohomology_ch(&m).c[0], rat(2));
        }
    }

    /// Direct expansion of the cohomology Chern character as `2N` constants
    /// minus `N-1` copies of each unit twist, kept apart from the engine's
    /// additivity path.
    #[test]
    fn chern_against_direct_expansion() {
        for n in 2..=6i64 {
            let m = build_decomposable(&model(n as usize, 2), None).unwrap();
            let ch = cohomology_ch(&m);
            let expected: [Rat; 4] =
                [rat(2 * n) - rat(2 * (n - 1)), rat(0), rat(-2 * (n - 1)), rat(0)];
            assert_eq!(ch.c, expected);
        }
    }

    #[test]
    fn chain_maps_dimensions() {
        for n in 2..=3usize {
            let mdl = model(n, 3);
            let m = build_decomposable(&mdl, None).unwrap();
            assert_eq!(chain_maps(&m, &m, 0).unwrap().dim(), 1);
            let d1 = chain_maps(&m, &m, 1).unwrap().dim();
            assert_eq!(d1, 2 * n * (n - 1) + n);
            assert_eq!(chain_maps(&m, &m, 2).unwrap().dim(), 8 * (n - 1) * (n - 1));
        }
    }

    #[test]
    fn degree_one_chain_maps_at_n3_have_dimension_fifteen() {
        let m = build_decomposable(&model(3, 9), None).unwrap();
        assert_eq!(chain_maps(&m, &m, 1).unwrap().dim(), 15);
    }

    #[test]
    fn identity_is_a_chain_map() {
        let mdl = model(3, 11);
        let m = build_decomposable(&mdl, None).unwrap();
        let hc = hom_complex(&m, &m).unwrap();
        let mut id = vec![rat(0); hc.dims[0]];
        for (i, &(s, t)) in hc.basis0.alpha.iter().enumerate() {
            if s == t {
                id[i] = rat(1);
            }
        }
        for (i, &(s, t)) in hc.basis0.beta.iter().enumerate() {
            if s == t {
                id[hc.basis0.beta_offset() + i] = rat(1);
            }
        }
        for (i, &(s, t)) in hc.basis0.gamma.iter().enumerate() {
            if s == t {
                id[hc.basis0.gamma_offset() + i] = rat(1);
            }
        }
        assert!(hc.d0.mul_vec(&id).iter().all(num::Zero::is_zero));
        // and it lies in the computed chain-map space
        assert!(chain_maps(&m, &m, 0).unwrap().contains(&id));
    }

    #[test]
    fn hom_complex_is_a_complex() {
        let mdl = model(3, 13);
        let m = build_decomposable(&mdl, None).unwrap();
        let hc = hom_complex(&m, &m).unwrap();
        assert!(hc.d1.mul(&hc.d0).is_zero_matrix());
        assert_eq!(hc.dims[0], 2 * 4 + 2 * 3);
        assert_eq!(hc.dims[1], 4 * 3 * 2);
        assert_eq!(hc.dims[2], 8 * 4);
    }

    #[test]
    fn homotopy_class_dimensions() {
        for n in 2..=4usize {
            let m = build_decomposable(&model(n, 1), None).unwrap();
            assert_eq!(homotopy_classes(&m, 0).unwrap(), 1);
            assert_eq!(homotopy_classes(&m, 1).unwrap(), n - 1);
            assert_eq!(homotopy_classes(&m, 2).unwrap(), 6 * (n - 1) * (n - 1) - n + 2);
        }
    }

    #[test]
    fn euler_characteristic_bookkeeping() {
        for n in 2..=4usize {
            let m = build_decomposable(&model(n, 5), None).unwrap();
            let hc = hom_complex(&m, &m).unwrap();
            let chain_alt = hc.dims[0] as i64 - hc.dims[1] as i64 + hc.dims[2] as i64;
            let homotopy_alt = homotopy_classes(&m, 0).unwrap() as i64
                - homotopy_classes(&m, 1).unwrap() as i64
                + homotopy_classes(&m, 2).unwrap() as i64;
            assert_eq!(chain_alt, homotopy_alt);
        }
    }

    #[test]
    fn mismatched_models_rejected() {
        let m1 = build_decomposable(&model(2, 1), None).unwrap();
        let m2 = build_decomposable(&model(2, 2), None).unwrap();
        assert_eq!(chain_maps(&m1, &m2, 0).unwrap_err(), ComplexesError::MismatchedModels);
    }

    /// Two scalar choices over the same model give isomorphic monads exactly
    /// when their per-pair products agree up to one common factor: the
    /// family over a fixed curve is the product torus modulo scale.
    #[test]
    fn scalar_families_are_isomorphic_iff_products_match() {
        let mdl = model(3, 10);
        let base: Vec<(Rat, Rat)> = vec![(rat(2), rat(3)), (rat(-1), rat(4)), (rat(5), rat(2))];
        let m1 = build_decomposable(&mdl, Some(&base)).unwrap();

        // rescale each pair without moving the products, then double all of
        // them at once: still isomorphic
        let same: Vec<(Rat, Rat)> = vec![
            (rat(4), rat(3)),
            (rat(-2), rat(4)),
            (rat(10), rat(2)),
        ];
        let m2 = build_decomposable(&mdl, Some(&same)).unwrap();
        assert_eq!(chain_maps(&m1, &m2, 0).unwrap().dim(), 1);

        // move a single product: no isomorphism
        let moved: Vec<(Rat, Rat)> = vec![(rat(2), rat(3)), (rat(1), rat(4)), (rat(5), rat(2))];
        let m3 = build_decomposable(&mdl, Some(&moved)).unwrap();
        assert_eq!(chain_maps(&m1, &m3, 0).unwrap().dim(), 0);
    }

    #[test]
    fn monad_json_round_trip() {
        let m = build_decomposable(&model(3, 8), None).unwrap();
        let json = m.to_json();
        let back = Monad::from_json(&json).unwrap();
        assert_eq!(back.phi(), m.phi());
        assert_eq!(back.psi(), m.psi());
        assert!(back.same_objects(&m));
        assert_eq!(back.model(), m.model());
    }
}
