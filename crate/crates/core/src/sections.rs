//! Seeded exact model of the section spaces the engine's linear algebra
//! runs through.
//!
//! The model realizes, over the rationals: the 8-dimensional space of
//! sections of twice the polarization, one 4-dimensional subspace `W_i` per
//! point pair (sections vanishing on the pair's curve), the distinguished
//! product vector `t_i` in each `W_i`, a surjective boundary map
//! `beta_i : W_i -> H^1` with kernel exactly the line through `t_i`, and a
//! fixed complement `U_i` used to canonicalize lifts.
//!
//! Sampling draws small integer coordinates from a seeded stream and rejects
//! until the genericity predicates hold, so a `(N, seed)` pair names one
//! model forever; the serialized form is byte-stable.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{rat, Mat, Rat};

/// Dimension of the modeled space of sections of twice the polarization.
pub const V2_DIM: usize = 8;

/// Dimension of each subspace `W_i`.
pub const W_DIM: usize = 4;

/// Dimension of the modeled `H^1(X, O_X)`.
pub const H1_DIM: usize = 3;

/// Coordinates are drawn uniformly from `[-SAMPLE_RANGE, SAMPLE_RANGE]`.
pub const SAMPLE_RANGE: i64 = 9;

/// Default number of full-model attempts before giving up.
pub const DEFAULT_RETRY_BUDGET: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SectionsError {
    #[error("sampling exhausted after {attempts} attempts; budget {budget}")]
    SamplingExhausted { attempts: usize, budget: usize },
    #[error("pair index {index} out of range for N = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("expected an element of {expected}, got one of {got}")]
    WrongSpaceTag { expected: String, got: String },
    #[error("need at least 2 point pairs, got {0}")]
    TooFewPairs(usize),
    #[error("boundary map of pair {0} is not invertible on the complement")]
    DegenerateBoundary(usize),
}

/// Which modeled space an element's coordinates refer to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceTag {
    /// Sections of twice the polarization, ambient coordinates.
    V2,
    /// The one-dimensional span of the `+` section of pair `i`.
    ThetaPlus(usize),
    /// The one-dimensional span of the `-` section of pair `i`.
    ThetaMinus(usize),
    /// Subspace `W_i`, coordinates against its stored basis.
    W(usize),
    /// The modeled `H^1(X, O_X)`.
    H1,
}

impl std::fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpaceTag::V2 => write!(f, "V2"),
            SpaceTag::ThetaPlus(i) => write!(f, "span(theta+_{i})"),
            SpaceTag::ThetaMinus(i) => write!(f, "span(theta-_{i})"),
            SpaceTag::W(i) => write!(f, "W_{i}"),
            SpaceTag::H1 => write!(f, "H1"),
        }
    }
}

/// Element of one of the modeled spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionElement {
    pub space: SpaceTag,
    pub coords: Vec<Rat>,
}

impl SectionElement {
    pub fn new(space: SpaceTag, coords: Vec<Rat>) -> Self {
        SectionElement { space, coords }
    }

    pub fn h1(coords: Vec<Rat>) -> Self {
        assert_eq!(coords.len(), H1_DIM);
        SectionElement { space: SpaceTag::H1, coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(num::Zero::is_zero)
    }
}

/// Integer-seeded generic realization of the section spaces for `N` point
/// pairs. Immutable after sampling.
///
/// Serialized layout (canonical JSON, integers only): `{N, seed, t, W,
/// beta, U}` where `t[i]` is the product vector in ambient coordinates,
/// `W[i]` the four basis vectors of `W_i` (the first is `t[i]`), `beta[i]`
/// the matrix of the boundary map against that basis, and `U[i]` the three
/// ambient vectors spanning the lift complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericModel {
    #[serde(rename = "N")]
    n: usize,
    seed: u64,
    t: Vec<Vec<i64>>,
    #[serde(rename = "W")]
    w: Vec<Vec<Vec<i64>>>,
    beta: Vec<Vec<Vec<i64>>>,
    #[serde(rename = "U")]
    u: Vec<Vec<Vec<i64>>>,
}

/// One named genericity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
}

/// Itemized result of [`check_genericity`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenericityReport {
    pub items: Vec<CheckItem>,
}

impl GenericityReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.items.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

/// Draws a genericity-passing model for `n >= 2` pairs; deterministic in
/// `(n, seed)`.
pub fn sample_model(n: usize, seed: u64) -> Result<GenericModel, SectionsError> {
    sample_model_with_budget(n, seed, DEFAULT_RETRY_BUDGET)
}

/// As [`sample_model`] with an explicit attempt budget. Exhausting the
/// budget signals a bug or an absurd budget, not expected behavior.
pub fn sample_model_with_budget(
    n: usize,
    seed: u64,
    budget: usize,
) -> Result<GenericModel, SectionsError> {
    if n < 2 {
        return Err(SectionsError::TooFewPairs(n));
    }
    let mut rng = seeded_rng(n, seed);
    let mut attempts = 0;
    while attempts < budget.max(1) {
        attempts += 1;
        let candidate = draw_candidate(n, seed, &mut rng);
        if check_genericity(&candidate).all_pass() {
            return Ok(candidate);
        }
    }
    Err(SectionsError::SamplingExhausted { attempts, budget })
}

fn seeded_rng(n: usize, seed: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&(n as u64).to_le_bytes());
    bytes[8..16].copy_from_slice(&seed.to_le_bytes());
    bytes[16..].copy_from_slice(b"theta-monad/mdl1");
    ChaCha8Rng::from_seed(bytes)
}

fn draw_i64(rng: &mut ChaCha8Rng) -> i64 {
    let span = (2 * SAMPLE_RANGE + 1) as u64;
    (rng.next_u64() % span) as i64 - SAMPLE_RANGE
}

fn draw_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<i64> {
    (0..len).map(|_| draw_i64(rng)).collect()
}

fn draw_candidate(n: usize, seed: u64, rng: &mut ChaCha8Rng) -> GenericModel {
    let mut t = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    for _ in 0..n {
        let ti = draw_vec(rng, V2_DIM);
        let ui: Vec<Vec<i64>> = (0..W_DIM - 1).map(|_| draw_vec(rng, V2_DIM)).collect();
        let g: Vec<Vec<i64>> = (0..H1_DIM).map(|_| draw_vec(rng, H1_DIM)).collect();
        let mut wi = vec![ti.clone()];
        wi.extend(ui.iter().cloned());
        // boundary kills the product vector and sends the complement basis
        // to the columns of g
        let bi: Vec<Vec<i64>> =
            (0..H1_DIM).map(|r| (0..W_DIM).map(|c| if c == 0 { 0 } else { g[r][c - 1] }).collect()).collect();
        t.push(ti);
        w.push(wi);
        beta.push(bi);
        u.push(ui);
    }
    GenericModel { n, seed, t, w, beta, u }
}

impl GenericModel {
    /// Builds a model from raw parts without any genericity verification.
    /// Intended for tests and diagnostics of degenerate configurations.
    pub fn from_parts_unchecked(
        n: usize,
        seed: u64,
        t: Vec<Vec<i64>>,
        w: Vec<Vec<Vec<i64>>>,
        beta: Vec<Vec<Vec<i64>>>,
        u: Vec<Vec<Vec<i64>>>,
    ) -> Self {
        GenericModel { n, seed, t, w, beta, u }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn check_index(&self, index: usize) -> Result<(), SectionsError> {
        if index >= self.n {
            return Err(SectionsError::IndexOutOfRange { index, n: self.n });
        }
        Ok(())
    }

    /// Product vector `t_i` in ambient coordinates.
    pub fn t_ambient(&self, i: usize) -> Result<Vec<Rat>, SectionsError> {
        self.check_index(i)?;
        Ok(self.t[i].iter().map(|&x| rat(x)).collect())
    }

    /// Basis of `W_i` as the columns of an 8x4 matrix.
    pub fn w_basis_matrix(&self, i: usize) -> Result<Mat, SectionsError> {
        self.check_index(i)?;
        Ok(Mat::from_fn(V2_DIM, W_DIM, |r, c| rat(self.w[i][c][r])))
    }

    /// Matrix of `beta_i` against the stored basis of `W_i`.
    pub fn beta_matrix(&self, i: usize) -> Result<Mat, SectionsError> {
        self.check_index(i)?;
        Ok(Mat::from_fn(H1_DIM, W_DIM, |r, c| rat(self.beta[i][r][c])))
    }

    /// Ambient coordinates of an element of `W_i` given in basis coordinates.
    pub fn w_to_ambient(&self, i: usize, coords: &[Rat]) -> Result<Vec<Rat>, SectionsError> {
        assert_eq!(coords.len(), W_DIM);
        Ok(self.w_basis_matrix(i)?.mul_vec(coords))
    }

    /// The only product the model defines: scalar multiples of the two
    /// sections of pair `i` multiply onto `t_i`.
    pub fn mul(&self, i: usize, c_plus: &Rat, c_minus: &Rat) -> Result<SectionElement, SectionsError> {
        self.check_index(i)?;
        let scale = c_plus.clone() * c_minus.clone();
        let coords = self.t[i].iter().map(|&x| rat(x) * scale.clone()).collect();
        Ok(SectionElement::new(SpaceTag::V2, coords))
    }

    /// Boundary map `beta_i` applied to an element of `W_i`.
    pub fn boundary(&self, i: usize, u: &SectionElement) -> Result<SectionElement, SectionsError> {
        self.check_index(i)?;
        if u.space != SpaceTag::W(i) {
            return Err(SectionsError::WrongSpaceTag {
                expected: SpaceTag::W(i).to_string(),
                got: u.space.to_string(),
            });
        }
        let coords = self.beta_matrix(i)?.mul_vec(&u.coords);
        Ok(SectionElement::new(SpaceTag::H1, coords))
    }

    /// The unique preimage of `xi` under `beta_i` inside the stored
    /// complement `U_i`; any other preimage differs by a multiple of `t_i`.
    pub fn lift(&self, i: usize, xi: &SectionElement) -> Result<SectionElement, SectionsError> {
        self.check_index(i)?;
        if xi.space != SpaceTag::H1 {
            return Err(SectionsError::WrongSpaceTag {
                expected: SpaceTag::H1.to_string(),
                got: xi.space.to_string(),
            });
        }
        let coords = self.lift_w_coords(i, &xi.coords)?;
        Ok(SectionElement::new(SpaceTag::W(i), coords))
    }

    /// Lift in `W_i` basis coordinates.
    pub fn lift_w_coords(&self, i: usize, xi: &[Rat]) -> Result<Vec<Rat>, SectionsError> {
        self.check_index(i)?;
        assert_eq!(xi.len(), H1_DIM);
        // beta restricted to the complement: the last three columns
        let g = Mat::from_fn(H1_DIM, H1_DIM, |r, c| rat(self.beta[i][r][c + 1]));
        let x = g.solve(xi).ok_or(SectionsError::DegenerateBoundary(i))?;
        let mut coords = vec![rat(0); W_DIM];
        coords[1..].clone_from_slice(&x);
        Ok(coords)
    }

    /// Lift in ambient coordinates.
    pub fn lift_ambient(&self, i: usize, xi: &[Rat]) -> Result<Vec<Rat>, SectionsError> {
        let coords = self.lift_w_coords(i, xi)?;
        self.w_to_ambient(i, &coords)
    }

    /// Copy with pair `dst`'s subspace data overwritten by pair `src`'s,
    /// deliberately violating transversality. Diagnostic hook for
    /// failure-path testing; the result fails [`check_genericity`].
    pub fn with_collapsed_pair(&self, src: usize, dst: usize) -> Result<Self, SectionsError> {
        self.check_index(src)?;
        self.check_index(dst)?;
        let mut out = self.clone();
        out.t[dst] = out.t[src].clone();
        out.w[dst] = out.w[src].clone();
        out.u[dst] = out.u[src].clone();
        out.beta[dst] = out.beta[src].clone();
        Ok(out)
    }

    /// Canonical JSON document; byte-stable for a given `(N, seed)` and
    /// engine version.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Itemized verification of the model's genericity axioms.
pub fn check_genericity(model: &GenericModel) -> GenericityReport {
    let mut items = Vec::new();
    let n = model.n;
    let mut push = |name: String, pass: bool| items.push(CheckItem { name, pass });

    for i in 0..n {
        let t_nonzero = model.t[i].iter().any(|&x| x != 0);
        push(format!("t_{i} nonzero"), t_nonzero);

        let wm = model.w_basis_matrix(i).expect("index in range");
        push(format!("W_{i} has dimension 4"), wm.rank() == W_DIM);

        let t_amb = model.t_ambient(i).expect("index in range");
        push(format!("t_{i} lies in W_{i}"), wm.solve(&t_amb).is_some());

        let bm = model.beta_matrix(i).expect("index in range");
        push(format!("beta_{i} surjective"), bm.rank() == H1_DIM);
        let t_coords = wm.solve(&t_amb).unwrap_or_else(|| vec![rat(0); W_DIM]);
        let kills_t = bm.mul_vec(&t_coords).iter().all(num::Zero::is_zero);
        push(format!("beta_{i} kills t_{i}"), kills_t);

        // complement: U_i inside W_i, transverse to t_i
        let u_ok = model.u[i].iter().all(|uv| {
            let v: Vec<Rat> = uv.iter().map(|&x| rat(x)).collect();
            wm.solve(&v).is_some()
        });
        push(format!("U_{i} contained in W_{i}"), u_ok);
        let span = Mat::from_fn(V2_DIM, 1 + model.u[i].len(), |r, c| {
            if c == 0 {
                rat(model.t[i][r])
            } else {
                rat(model.u[i][c - 1][r])
            }
        });
        push(format!("U_{i} complements t_{i} in W_{i}"), span.rank() == W_DIM);
    }

    for i in 0..n {
        for j in i + 1..n {
            let stacked = model
                .w_basis_matrix(i)
                .expect("index in range")
                .hstack(&model.w_basis_matrix(j).expect("index in range"));
            push(format!("W_{i} + W_{j} spans"), stacked.rank() == V2_DIM);
        }
    }

    let t_matrix = |idx: &[usize]| {
        Mat::from_fn(V2_DIM, idx.len(), |r, c| rat(model.t[idx[c]][r]))
    };
    if n == 2 {
        push("t_0, t_1 independent".to_string(), t_matrix(&[0, 1]).rank() == 2);
    } else {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    push(
                        format!("t_{i}, t_{j}, t_{k} independent"),
                        t_matrix(&[i, j, k]).rank() == 3,
                    );
                }
            }
        }
    }

    GenericityReport { items }
}
