//! The hyperext spectral sequence of a monad acting on itself: first-sheet
//! assembly from the cohomology rules of the labels, passage to the second
//! sheet, the explicit obstruction differential with its dual, third-sheet
//! dimensions, degeneration, and total Ext dimensions.
//!
//! Only the bottom row of the first sheet carries differentials; the top row
//! is realized by transposed matrices, and the duality checks at later
//! levels stay meaningful because both halves go through their own
//! eliminations. The one nonzero second-level differential is assembled
//! columnwise from the three matrix recipes for classes on the left, middle
//! and right objects.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::{
    chern_of_cohomology, hom_complex, ComplexesError, HomComplex, Monad, SectionMatrix,
};
use crate::linalg::SpanReducer;
use crate::sections::{SectionsError, H1_DIM};
use crate::{chow, rat, Mat, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HyperextError {
    #[error("generator index {index} out of range ({context})")]
    GeneratorIndex { index: usize, context: &'static str },
    #[error("class vector has length {got}, expected 3")]
    XiLength { got: usize },
    #[error("expected a level-{expected} sheet, got level {got}")]
    WrongLevel { expected: u8, got: u8 },
    #[error(transparent)]
    Complexes(#[from] ComplexesError),
    #[error(transparent)]
    Sections(#[from] SectionsError),
}

/// Grid position `(p, q)`.
pub type Pos = (i32, i32);

/// One sheet of the spectral sequence: dimensions over a window of
/// positions, plus the differentials the level carries.
#[derive(Debug, Clone)]
pub struct SpectralSheet {
    level: u8,
    dims: BTreeMap<Pos, usize>,
    monad: Monad,
    inner: SheetInner,
}

#[derive(Debug, Clone)]
enum SheetInner {
    E1 {
        hc: HomComplex,
        d00t: Mat,
        d10t: Mat,
    },
    E2 {
        hc: HomComplex,
        ranks: E1Ranks,
        /// Obstruction differential columns as representatives in the
        /// level-1 `(2,0)` coordinates.
        ob_lift: Mat,
        /// Canonical reduction modulo the image of the bottom-row
        /// differential, i.e. class coordinates on the `(2,0)` quotient.
        reducer: SpanReducer<Rat>,
    },
}

#[derive(Debug, Clone, Copy)]
struct E1Ranks {
    d00: usize,
    d10: usize,
    d00t: usize,
    d10t: usize,
}

impl SpectralSheet {
    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn monad(&self) -> &Monad {
        &self.monad
    }

    /// Dimension at `(p, q)`; positions outside the stored window are zero.
    pub fn dim(&self, p: i32, q: i32) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<Pos, usize> {
        &self.dims
    }

    pub fn support(&self) -> Vec<Pos> {
        self.dims.iter().filter(|(_, &d)| d > 0).map(|(&p, _)| p).collect()
    }

    /// Differential leaving `(p, q)` at this level, when one is stored.
    ///
    /// At level 1 these are the bottom-row Hom-complex differentials and
    /// their transposes on the top row. At level 2 the `(0,1)` entry is the
    /// obstruction map with columns written as representatives in level-1
    /// `(2,0)` coordinates; compose with [`ObstructionMap::class_coords`]
    /// for the quotient form.
    pub fn differential(&self, p: i32, q: i32) -> Option<&Mat> {
        match (&self.inner, p, q) {
            (SheetInner::E1 { hc, .. }, 0, 0) => Some(&hc.d0),
            (SheetInner::E1 { hc, .. }, 1, 0) => Some(&hc.d1),
            (SheetInner::E1 { d00t, .. }, -1, 3) => Some(d00t),
            (SheetInner::E1 { d10t, .. }, -2, 3) => Some(d10t),
            (SheetInner::E2 { ob_lift, .. }, 0, 1) => Some(ob_lift),
            _ => None,
        }
    }

    /// Whether `dim(p, q) = dim(-p, 3-q)` across the stored window.
    pub fn duality_holds(&self) -> bool {
        self.dims.iter().all(|(&(p, q), &d)| self.dim(-p, 3 - q) == d)
    }

    /// On a level-2 sheet, class coordinates in the `(2,0)` subquotient of a
    /// representative vector given in level-1 `(2,0)` coordinates.
    pub fn class_coords_20(&self, v: &[Rat]) -> Result<Vec<Rat>, HyperextError> {
        match &self.inner {
            SheetInner::E2 { reducer, .. } => Ok(reducer.quotient_coords(v)),
            _ => Err(HyperextError::WrongLevel { expected: 2, got: self.level }),
        }
    }
}

/// Assembles the first sheet: dimensions from the cohomology rules of the
/// label pairs (nothing hardcoded), differentials on the bottom row from the
/// Hom complex, and their transposes on the top row.
pub fn e1_sheet(m: &Monad) -> Result<SpectralSheet, HyperextError> {
    let mut dims = BTreeMap::new();
    let group = m.group();
    let objects = [&m.objects().a, &m.objects().b, &m.objects().c];
    for p in -3i32..=3 {
        for q in 0i32..=3 {
            let mut dim = 0;
            for (idx, src) in objects.iter().enumerate() {
                let tgt_degree = idx as i32 - 1 + p;
                if !(-1..=1).contains(&tgt_degree) {
                    continue;
                }
                let tgt = objects[(tgt_degree + 1) as usize];
                for ls in src.iter() {
                    for lt in tgt.iter() {
                        dim += group.ext_dims(ls, lt).map_err(ComplexesError::from)?[q as usize];
                    }
                }
            }
            dims.insert((p, q), dim);
        }
    }

    let hc = hom_complex(m, m)?;
    debug_assert_eq!(dims[&(0, 0)], hc.dims[0]);
    debug_assert_eq!(dims[&(1, 0)], hc.dims[1]);
    debug_assert_eq!(dims[&(2, 0)], hc.dims[2]);
    let d00t = hc.d0.transpose();
    let d10t = hc.d1.transpose();
    Ok(SpectralSheet {
        level: 1,
        dims,
        monad: m.clone(),
        inner: SheetInner::E1 { hc, d00t, d10t },
    })
}

/// Cohomology passage to the second sheet. Bottom-row dimensions come from
/// the level-1 eliminations, top-row ones from independent eliminations of
/// the transposed matrices; the obstruction differential is installed from
/// its matrix recipes.
pub fn e2_sheet(e1: &SpectralSheet) -> Result<SpectralSheet, HyperextError> {
    let SheetInner::E1 { hc, d00t, d10t } = &e1.inner else {
        return Err(HyperextError::WrongLevel { expected: 1, got: e1.level });
    };
    let m = &e1.monad;
    let ranks = E1Ranks {
        d00: hc.d0.rank(),
        d10: hc.d1.rank(),
        d00t: d00t.rank(),
        d10t: d10t.rank(),
    };

    let mut dims = BTreeMap::new();
    for (&pos, &d) in &e1.dims {
        let new_dim = match pos {
            (0, 0) => d - ranks.d00,
            (1, 0) => (d - ranks.d10) - ranks.d00,
            (2, 0) => d - ranks.d10,
            (0, 3) => d - ranks.d00t,
            (-1, 3) => (d - ranks.d00t) - ranks.d10t,
            (-2, 3) => d - ranks.d10t,
            _ => d,
        };
        dims.insert(pos, new_dim);
    }

    let ob_lift = assemble_ob_lift(m)?;
    let reducer = SpanReducer::new(&hc.d1);
    Ok(SpectralSheet {
        level: 2,
        dims,
        monad: m.clone(),
        inner: SheetInner::E2 { hc: hc.clone(), ranks, ob_lift, reducer },
    })
}

/// Sign slot of a middle-object summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Generator of the domain of the obstruction map: a first-order class on
/// one object, tagged by the summand data and a vector in the modeled
/// `H^1`. Indices are 0-based; `F`/`H` indices run over the outer summands
/// (`< N-1`), `G` over the pairs (`< N`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObGenerator {
    F { i: usize, j: usize, xi: Vec<Rat> },
    G { i: usize, sign: Sign, xi: Vec<Rat> },
    H { i: usize, j: usize, xi: Vec<Rat> },
}

impl ObGenerator {
    fn xi(&self) -> &[Rat] {
        match self {
            ObGenerator::F { xi, .. } | ObGenerator::G { xi, .. } | ObGenerator::H { xi, .. } => xi,
        }
    }
}

/// Shift applied to the canonical lifts when re-deriving an obstruction
/// matrix: the first lift moves by `u_shift` times its pair's product
/// vector, the second by `v_shift` times the last pair's.
#[derive(Debug, Clone, Default)]
pub struct LiftShift {
    pub u_shift: Rat,
    pub v_shift: Rat,
}

/// The obstruction matrix of a single generator, per the three recipes:
/// a class on the left object fills one column, a class on the middle
/// object one diagonal entry (or everything, for the last pair), a class on
/// the right object one row.
pub fn obstruction_matrix(m: &Monad, gen: &ObGenerator) -> Result<SectionMatrix, HyperextError> {
    obstruction_matrix_shifted(m, gen, &LiftShift::default())
}

/// As [`obstruction_matrix`] with shifted lifts; shifting must not change
/// the class of the result modulo the bottom-row image.
pub fn obstruction_matrix_shifted(
    m: &Monad,
    gen: &ObGenerator,
    shift: &LiftShift,
) -> Result<SectionMatrix, HyperextError> {
    let n = m.n_pairs();
    let n_a = m.objects().a.len();
    let last = n - 1;
    let xi = gen.xi();
    if xi.len() != H1_DIM {
        return Err(HyperextError::XiLength { got: xi.len() });
    }

    let lift = |pair: usize, amount: &Rat| -> Result<Vec<Rat>, HyperextError> {
        let mut v = m.model().lift_ambient(pair, xi)?;
        if !num::Zero::is_zero(amount) {
            let t = m.model().t_ambient(pair)?;
            for (vk, tk) in v.iter_mut().zip(&t) {
                *vk = vk.clone() + amount.clone() * tk.clone();
            }
        }
        Ok(v)
    };

    let mut out = SectionMatrix::zero(n_a, n_a);
    match gen {
        ObGenerator::F { i, j, .. } => {
            if *i >= n_a {
                return Err(HyperextError::GeneratorIndex {
                    index: *i,
                    context: "left-object source",
                });
            }
            if *j >= n_a {
                return Err(HyperextError::GeneratorIndex {
                    index: *j,
                    context: "left-object target",
                });
            }
            let u = lift(*i, &shift.u_shift)?;
            let v = lift(last, &shift.v_shift)?;
            for r in 0..n_a {
                out.add_into(r, *j, &v, &rat(1));
            }
            out.add_into(*i, *j, &u, &rat(1));
        }
        ObGenerator::G { i, .. } => {
            if *i >= n {
                return Err(HyperextError::GeneratorIndex {
                    index: *i,
                    context: "middle-object pair",
                });
            }
            let u = lift(*i, &shift.u_shift)?;
            if *i == last {
                for r in 0..n_a {
                    for c in 0..n_a {
                        out.add_into(r, c, &u, &rat(1));
                    }
                }
            } else {
                out.add_into(*i, *i, &u, &rat(1));
            }
        }
        ObGenerator::H { i, j, .. } => {
            if *i >= n_a {
                return Err(HyperextError::GeneratorIndex {
                    index: *i,
                    context: "right-object target",
                });
            }
            if *j >= n_a {
                return Err(HyperextError::GeneratorIndex {
                    index: *j,
                    context: "right-object source",
                });
            }
            let u = lift(*j, &shift.u_shift)?;
            let v = lift(last, &shift.v_shift)?;
            for c in 0..n_a {
                out.add_into(*i, c, &v, &rat(1));
            }
            out.add_into(*i, *j, &u, &rat(1));
        }
    }
    Ok(out)
}

/// Domain basis order of the assembled obstruction map: all left-object
/// generators (source-major, then target, then the three class coordinates),
/// then the middle-object ones (pair-major, plus slot before minus), then
/// the right-object ones (target-major, then source).
pub fn ob_domain_generators(n: usize) -> Vec<ObGenerator> {
    let n_a = n - 1;
    let mut gens = Vec::new();
    let basis = |c: usize| {
        let mut xi = vec![rat(0); H1_DIM];
        xi[c] = rat(1);
        xi
    };
    for i in 0..n_a {
        for j in 0..n_a {
            for c in 0..H1_DIM {
                gens.push(ObGenerator::F { i, j, xi: basis(c) });
            }
        }
    }
    for i in 0..n {
        for sign in [Sign::Plus, Sign::Minus] {
            for c in 0..H1_DIM {
                gens.push(ObGenerator::G { i, sign, xi: basis(c) });
            }
        }
    }
    for i in 0..n_a {
        for j in 0..n_a {
            for c in 0..H1_DIM {
                gens.push(ObGenerator::H { i, j, xi: basis(c) });
            }
        }
    }
    gens
}

fn assemble_ob_lift(m: &Monad) -> Result<Mat, HyperextError> {
    let n = m.n_pairs();
    let n_a = m.objects().a.len();
    let gens = ob_domain_generators(n);
    let mut cols = Vec::with_capacity(gens.len());
    for gen in &gens {
        cols.push(obstruction_matrix(m, gen)?.flatten());
    }
    let rows = 8 * n_a * n_a;
    Ok(Mat::from_fn(rows, cols.len(), |r, c| cols[c][r].clone()))
}

/// The obstruction map with its rank data and the canonical reduction onto
/// the second-sheet codomain.
#[derive(Debug, Clone)]
pub struct ObstructionMap {
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    lift: Mat,
    reducer: SpanReducer<Rat>,
}

impl ObstructionMap {
    pub fn is_surjective(&self) -> bool {
        self.rank == self.codomain_dim
    }

    /// Columns as representatives in the level-1 `(2,0)` coordinates.
    pub fn lift_matrix(&self) -> &Mat {
        &self.lift
    }

    /// Class coordinates on the codomain quotient of a representative vector.
    pub fn class_coords(&self, v: &[Rat]) -> Vec<Rat> {
        self.reducer.quotient_coords(v)
    }

    /// The matrix with domain the second-sheet `(0,1)` entry and codomain
    /// the `(2,0)` entry, in class coordinates. Intended for desk-scale
    /// inspection; the rank data is computed by joint elimination instead.
    pub fn reduced_matrix(&self) -> Mat {
        let mut cols = Vec::with_capacity(self.lift.cols());
        for c in 0..self.lift.cols() {
            cols.push(self.reducer.quotient_coords(&self.lift.col(c)));
        }
        Mat::from_fn(self.codomain_dim, cols.len(), |r, c| cols[c][r].clone())
    }

    /// Whether the obstruction class of `gen` is unchanged when its lifts
    /// are shifted along the kernel directions: the difference of matrix
    /// representatives must reduce to zero modulo the bottom-row image.
    pub fn well_defined(
        &self,
        m: &Monad,
        gen: &ObGenerator,
        shift: &LiftShift,
    ) -> Result<bool, HyperextError> {
        let base = obstruction_matrix(m, gen)?;
        let shifted = obstruction_matrix_shifted(m, gen, shift)?;
        Ok(self.reducer.contains(&shifted.sub(&base).flatten()))
    }
}

/// Assembles the obstruction map of the monad and computes its rank against
/// the image of the bottom-row differential in one fraction-free
/// elimination of the joint matrix.
pub fn obstruction_map(m: &Monad) -> Result<ObstructionMap, HyperextError> {
    let hc = hom_complex(m, m)?;
    obstruction_map_from_parts(m, &hc)
}

fn obstruction_map_from_parts(m: &Monad, hc: &HomComplex) -> Result<ObstructionMap, HyperextError> {
    let lift = assemble_ob_lift(m)?;
    let reducer = SpanReducer::new(&hc.d1);
    let rank_d1 = reducer.span_dim();
    let joint_rank = hc.d1.hstack(&lift).rank_fast();
    let rank = joint_rank - rank_d1;
    let codomain_dim = hc.dims[2] - rank_d1;
    Ok(ObstructionMap {
        domain_dim: lift.cols(),
        codomain_dim,
        rank,
        kernel_dim: lift.cols() - rank,
        lift,
        reducer,
    })
}

/// Checks that a single generator's obstruction class is independent of the
/// lift choices. Builds the reduction structure on each call; use
/// [`ObstructionMap::well_defined`] for sweeps.
pub fn ob_well_defined(
    m: &Monad,
    gen: &ObGenerator,
    shift: &LiftShift,
) -> Result<bool, HyperextError> {
    let hc = hom_complex(m, m)?;
    let reducer = SpanReducer::new(&hc.d1);
    let base = obstruction_matrix(m, gen)?;
    let shifted = obstruction_matrix_shifted(m, gen, shift)?;
    Ok(reducer.contains(&shifted.sub(&base).flatten()))
}

/// Third-sheet dimensions, degeneration verdict and total Ext dimensions.
#[derive(Debug, Clone)]
pub struct ExtSummary {
    pub e3_dims: BTreeMap<Pos, usize>,
    pub ext_dims: [usize; 4],
    pub degenerate: bool,
    pub ob_rank: usize,
    pub ob_kernel_dim: usize,
    /// Rank of the dual second-level differential, from its own elimination.
    pub dual_rank: usize,
}

impl ExtSummary {
    pub fn e3_dim(&self, p: i32, q: i32) -> usize {
        self.e3_dims.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn duality_holds(&self) -> bool {
        self.e3_dims.iter().all(|(&(p, q), &d)| self.e3_dim(-p, 3 - q) == d)
    }
}

/// Passage from the second to the third sheet plus the abutment bookkeeping.
///
/// The lower route eliminates the joint matrix of the bottom-row
/// differential and the obstruction lift; the upper route independently
/// eliminates the stacked transposes. Degeneration is then structural:
/// every later differential has zero domain or codomain.
pub fn e3_from_e2(e2: &SpectralSheet) -> Result<ExtSummary, HyperextError> {
    let SheetInner::E2 { hc, ranks, ob_lift, .. } = &e2.inner else {
        return Err(HyperextError::WrongLevel { expected: 2, got: e2.level });
    };

    let joint_lower = hc.d1.hstack(ob_lift).rank_fast();
    let ob_rank = joint_lower - ranks.d10;
    let joint_upper = hc.d1.transpose().vstack(&ob_lift.transpose()).rank_fast();
    let dual_rank = joint_upper - ranks.d10t;

    let mut e3_dims = e2.dims.clone();
    for (&pos, d) in e3_dims.iter_mut() {
        match pos {
            (0, 1) => *d -= ob_rank,
            (2, 0) => *d -= ob_rank,
            (0, 2) => *d -= dual_rank,
            (-2, 3) => *d -= dual_rank,
            _ => {}
        }
    }

    // structural degeneration: no later differential connects two nonzero
    // entries (beyond shift 5 everything leaves the support window)
    let mut degenerate = true;
    for r in 3i32..=5 {
        for (&(p, q), &d) in &e3_dims {
            if d == 0 {
                continue;
            }
            let target = (p + r, q - r + 1);
            if e3_dims.get(&target).copied().unwrap_or(0) > 0 {
                degenerate = false;
            }
        }
    }

    let mut ext_dims = [0usize; 4];
    for (&(p, q), &d) in &e3_dims {
        let total = p + q;
        if (0..4).contains(&total) {
            ext_dims[total as usize] += d;
        }
    }

    Ok(ExtSummary {
        e3_dims,
        ext_dims,
        degenerate,
        ob_rank,
        ob_kernel_dim: ob_lift.cols() - ob_rank,
        dual_rank,
    })
}

/// Full pipeline: first sheet, second sheet, third-sheet summary.
pub fn e3_and_ext(m: &Monad) -> Result<ExtSummary, HyperextError> {
    let e1 = e1_sheet(m)?;
    let e2 = e2_sheet(&e1)?;
    e3_from_e2(&e2)
}

/// Dual of the obstruction differential on the second sheet, as an explicit
/// matrix: the transpose of the lift composed with a kernel basis of the
/// transposed bottom-row differential. Quadratic-size product; used for
/// desk-scale cross-checks of the duality bookkeeping.
pub fn dual_d2_matrix(e2: &SpectralSheet) -> Result<Mat, HyperextError> {
    let SheetInner::E2 { hc, ob_lift, .. } = &e2.inner else {
        return Err(HyperextError::WrongLevel { expected: 2, got: e2.level });
    };
    let kernel = hc.d1.transpose().kernel_basis().basis_matrix();
    Ok(ob_lift.transpose().mul(&kernel))
}

/// One grid entry of a serialized sheet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEntry {
    pub p: i32,
    pub q: i32,
    pub dim: usize,
}

fn grid_entries(dims: &BTreeMap<Pos, usize>) -> Vec<GridEntry> {
    dims.iter().filter(|(_, &d)| d > 0).map(|(&(p, q), &dim)| GridEntry { p, q, dim }).collect()
}

/// Machine-readable record of one spectral run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub engine_version: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub e1_dims: Vec<GridEntry>,
    pub e2_dims: Vec<GridEntry>,
    pub e3_dims: Vec<GridEntry>,
    pub ob_rank: usize,
    pub ob_kernel: usize,
    pub ext_dims: [usize; 4],
    pub degenerate: bool,
    pub formula_match: bool,
}

/// Runs the full pipeline and records every dimension the sheets carry,
/// plus agreement with the closed deformation-dimension formula.
pub fn spectral_report(m: &Monad) -> Result<SpectralReport, HyperextError> {
    let e1 = e1_sheet(m)?;
    let e2 = e2_sheet(&e1)?;
    let summary = e3_from_e2(&e2)?;
    let chern = chern_of_cohomology(m)?;
    let formula = chow::ext1_dim_formula(chern);
    Ok(SpectralReport {
        engine_version: crate::ENGINE_VERSION.to_string(),
        n: m.n_pairs(),
        seed: m.model().seed(),
        e1_dims: grid_entries(e1.dims()),
        e2_dims: grid_entries(e2.dims()),
        e3_dims: grid_entries(&summary.e3_dims),
        ob_rank: summary.ob_rank,
        ob_kernel: summary.ob_kernel_dim,
        ext_dims: summary.ext_dims,
        degenerate: summary.degenerate,
        formula_match: summary.ext_dims[1] as i64 == formula
            && summary.ext_dims[2] as i64 == formula,
    })
}
