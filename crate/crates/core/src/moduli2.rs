//! The two-pair moduli description: the parameter space of sixtuples with
//! its two sum relations, the order-8 relabelling group, the scalar quads
//! parametrizing the monad maps with their torus normal form, the
//! isomorphism test through chain maps, and the dimension bookkeeping.

use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::{chain_maps, ComplexesError, GradedObject, Monad};
use crate::points::{LineBundleLabel, PointExpr, PointGroup, PointsError};
use crate::sections::{GenericModel, SectionsError};
use crate::{rat, Mat, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Moduli2Error {
    #[error("scalar quad entry {0} is zero")]
    ZeroQuadEntry(usize),
    #[error("sixtuple violates the sum relation for pair {0}")]
    RelationViolated(usize),
    #[error("middle-object label not found when reordering")]
    LabelNotFound,
    #[error("model must have at least 2 point pairs, has {0}")]
    ModelTooSmall(usize),
    #[error(transparent)]
    Points(#[from] PointsError),
    #[error(transparent)]
    Complexes(#[from] ComplexesError),
    #[error(transparent)]
    Sections(#[from] SectionsError),
}

/// The group of points for the two-pair configuration: six generators with
/// both pair sums equal to the base sum.
pub fn moduli_point_group() -> Arc<PointGroup> {
    PointGroup::with_relations(
        &["a1", "a1p", "a2", "a2p", "b", "bp"],
        &[vec![1, 1, 0, 0, -1, -1], vec![0, 0, 1, 1, -1, -1]],
    )
    .expect("relation lengths match")
}

/// Parameter point: `(a1, a1', a2, a2', b, b')` with both pair sums equal
/// to `b + b'`. Slots 0..3 are the middle-object points, 4 and 5 the outer
/// ones.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sixtuple {
    entries: [PointExpr; 6],
}

impl Sixtuple {
    /// Validates the two sum relations; distinctness of the leading four
    /// entries is a separate, queryable condition.
    pub fn new(group: &PointGroup, entries: [PointExpr; 6]) -> Result<Self, Moduli2Error> {
        let sum_b = group.add(&entries[4], &entries[5])?;
        for pair in 0..2 {
            let sum = group.add(&entries[2 * pair], &entries[2 * pair + 1])?;
            if !group.exprs_equal(&sum, &sum_b)? {
                return Err(Moduli2Error::RelationViolated(pair));
            }
        }
        Ok(Sixtuple { entries })
    }

    pub fn entries(&self) -> &[PointExpr; 6] {
        &self.entries
    }

    /// The open condition: the four middle points pairwise distinct.
    pub fn in_open_set(&self, group: &PointGroup) -> Result<bool, Moduli2Error> {
        for i in 0..4 {
            for j in i + 1..4 {
                if group.exprs_equal(&self.entries[i], &self.entries[j])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The sixtuple of generators themselves.
pub fn standard_sixtuple(group: &PointGroup) -> Sixtuple {
    let e = |name: &str| group.generator(name).expect("generator exists");
    Sixtuple {
        entries: [e("a1"), e("a1p"), e("a2"), e("a2p"), e("b"), e("bp")],
    }
}

/// Element of the relabelling group: swap within either pair, and swap the
/// two pairs; the outer points are fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GElement {
    pub swap1: bool,
    pub swap2: bool,
    pub swap_pairs: bool,
}

impl GElement {
    pub const IDENTITY: GElement = GElement { swap1: false, swap2: false, swap_pairs: false };

    pub fn all() -> Vec<GElement> {
        let mut out = Vec::with_capacity(8);
        for swap1 in [false, true] {
            for swap2 in [false, true] {
                for swap_pairs in [false, true] {
                    out.push(GElement { swap1, swap2, swap_pairs });
                }
            }
        }
        out
    }
}

/// Nonzero scalar coefficients of the four middle-object sections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarQuad {
    values: [Rat; 4],
}

impl ScalarQuad {
    pub fn new(values: [Rat; 4]) -> Result<Self, Moduli2Error> {
        for (i, v) in values.iter().enumerate() {
            if num::Zero::is_zero(v) {
                return Err(Moduli2Error::ZeroQuadEntry(i));
            }
        }
        Ok(ScalarQuad { values })
    }

    pub fn of_integers(values: [i64; 4]) -> Result<Self, Moduli2Error> {
        Self::new(values.map(rat))
    }

    pub fn values(&self) -> &[Rat; 4] {
        &self.values
    }
}

/// Point of the fibre line bundle with both excluded sections removed,
/// normalized so the first coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectivePair {
    pub coords: [Rat; 2],
}

/// Normal form `[q0 q1 : q2 q3]` of a quad under the torus of rescalings
/// preserving both pair products up to a common factor: two quads have the
/// same normal form iff they lie in one orbit.
pub fn gamma_normal_form(q: &ScalarQuad) -> ProjectivePair {
    let v1 = q.values[0].clone() * q.values[1].clone();
    let v2 = q.values[2].clone() * q.values[3].clone();
    ProjectivePair { coords: [rat(1), v2 / v1] }
}

/// Transported parameter data: applies the in-pair swaps with the sign that
/// keeps the skew pattern consistent, then the pair swap. The monads built
/// on the two sides are isomorphic as complexes.
pub fn g_transport(
    group: &PointGroup,
    s: &Sixtuple,
    q: &ScalarQuad,
    g: &GElement,
) -> Result<(Sixtuple, ScalarQuad), Moduli2Error> {
    let mut entries = s.entries.clone();
    let mut values = q.values.clone();
    if g.swap1 {
        entries.swap(0, 1);
        values = [values[1].clone(), -values[0].clone(), values[2].clone(), values[3].clone()];
    }
    if g.swap2 {
        entries.swap(2, 3);
        values = [values[0].clone(), values[1].clone(), values[3].clone(), -values[2].clone()];
    }
    if g.swap_pairs {
        entries.swap(0, 2);
        entries.swap(1, 3);
        values = [values[2].clone(), values[3].clone(), values[0].clone(), values[1].clone()];
    }
    Ok((Sixtuple::new(group, entries)?, ScalarQuad::new(values)?))
}

/// Orbit of a sixtuple under the relabelling group, deduplicated; its size
/// is 8 exactly when the middle points are pairwise distinct.
pub fn g_orbit(group: &PointGroup, s: &Sixtuple) -> Result<Vec<Sixtuple>, Moduli2Error> {
    let quad = ScalarQuad::of_integers([1, 1, 1, 1])?;
    let mut orbit = Vec::new();
    for g in GElement::all() {
        let (moved, _) = g_transport(group, s, &quad, &g)?;
        if !orbit.contains(&moved) {
            orbit.push(moved);
        }
    }
    orbit.sort();
    Ok(orbit)
}

/// The two-pair monad attached to a sixtuple and a scalar quad: outer
/// objects twisted by the base points, middle object the four labelled
/// bundles, second map the skew transpose of the first.
pub fn quad_monad(
    model: &Arc<GenericModel>,
    group: &Arc<PointGroup>,
    s: &Sixtuple,
    q: &ScalarQuad,
) -> Result<Monad, Moduli2Error> {
    if model.n() < 2 {
        return Err(Moduli2Error::ModelTooSmall(model.n()));
    }
    let e = &s.entries;
    let objects = GradedObject {
        a: vec![LineBundleLabel::new(-1, e[5].clone())],
        b: (0..4).map(|i| LineBundleLabel::new(0, e[i].clone())).collect(),
        c: vec![LineBundleLabel::new(1, e[4].clone())],
    };
    let phi = Mat::from_fn(4, 1, |s, _| q.values[s].clone());
    let psi = crate::complexes::transpose_via_iota(&phi);
    Ok(Monad::new(model.clone(), group.clone(), objects, vec![0, 0, 1, 1], phi, psi)?)
}

/// Whether the two monads (same objects required) are isomorphic as
/// complexes: the chain-map space has dimension one; there are no
/// homotopies in sight since the shape has nothing in negative degrees.
pub fn iso_test(m1: &Monad, m2: &Monad) -> Result<bool, Moduli2Error> {
    Ok(chain_maps(m1, m2, 0)?.dim() == 1)
}

/// Reorders the middle summands of `m` to match the label order of
/// `target`, carrying maps and pair data along. A pure relisting of the
/// same complex.
pub fn reorder_b_to_match(target: &Monad, m: &Monad) -> Result<Monad, Moduli2Error> {
    let group = target.group();
    let mut perm = Vec::with_capacity(target.objects().b.len());
    for want in &target.objects().b {
        let found = m
            .objects()
            .b
            .iter()
            .position(|have| group.labels_equal(want, have).unwrap_or(false))
            .ok_or(Moduli2Error::LabelNotFound)?;
        perm.push(found);
    }
    let objects = GradedObject {
        a: m.objects().a.clone(),
        b: perm.iter().map(|&i| m.objects().b[i].clone()).collect(),
        c: m.objects().c.clone(),
    };
    let pair = perm.iter().map(|&i| m.pair()[i]).collect();
    let phi = Mat::from_fn(perm.len(), m.phi().cols(), |s, j| m.phi()[(perm[s], j)].clone());
    let psi = Mat::from_fn(m.psi().rows(), perm.len(), |k, s| m.psi()[(k, perm[s])].clone());
    Ok(Monad::new(m.model().clone(), m.group().clone(), objects, pair, phi, psi)?)
}

/// Dimension bookkeeping of the moduli description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliDims {
    /// Parameter threefold-sixtuples modulo the two sum relations.
    pub t: usize,
    /// The rescaling torus acting on quads.
    pub gamma: usize,
    /// The bundle of normal forms over the parameter space.
    pub p: usize,
    /// Order of the relabelling group.
    pub g_order: usize,
}

/// Computes the dimensions from explicit relation matrices: six sum
/// equations on eighteen coordinates, one product relation on the
/// four-dimensional torus, and the enumeration of the relabelling group.
/// The bundle total is cross-checked against the closed deformation
/// formula at the untwisted Chern data.
pub fn moduli_dims() -> ModuliDims {
    let mut rel = Mat::zero(6, 18);
    for coord in 0..3 {
        for (row, pair) in [(coord, 0), (3 + coord, 1)] {
            rel[(row, 3 * (2 * pair) + coord)] = rat(1);
            rel[(row, 3 * (2 * pair + 1) + coord)] = rat(1);
            rel[(row, 12 + coord)] = rat(-1);
            rel[(row, 15 + coord)] = rat(-1);
        }
    }
    let t = 18 - rel.rank();

    // log-derivative of the product relation on the quad torus
    let gamma_rel = Mat::from_rows(vec![vec![rat(1), rat(1), rat(-1), rat(-1)]]).expect("one row");
    let gamma = 4 - gamma_rel.rank();

    let dims = ModuliDims { t, gamma, p: t + 1, g_order: GElement::all().len() };
    debug_assert_eq!(
        dims.p as i64,
        crate::chow::ext1_dim_formula(crate::chow::ChernPair::new(0, 2))
    );
    dims
}

fn seeded_rng(seed: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[16..].copy_from_slice(b"theta-monad/mod2");
    ChaCha8Rng::from_seed(bytes)
}

fn draw_nonzero(rng: &mut ChaCha8Rng) -> Rat {
    loop {
        let v = (rng.next_u64() % 19) as i64 - 9;
        if v != 0 {
            return rat(v);
        }
    }
}

/// Deterministic generic sixtuple: random points for one slot of each pair
/// and the outer points, partners forced by the sum relations, resampled
/// until the middle points are pairwise distinct.
pub fn sample_sixtuple(
    group: &PointGroup,
    rng: &mut ChaCha8Rng,
) -> Result<Sixtuple, Moduli2Error> {
    let names = group.generator_names();
    let draw_expr = |rng: &mut ChaCha8Rng| -> Result<PointExpr, Moduli2Error> {
        let coeffs: Vec<i64> = (0..names.len()).map(|_| (rng.next_u64() % 7) as i64 - 3).collect();
        Ok(group.from_coeffs(coeffs)?)
    };
    loop {
        let b = draw_expr(rng)?;
        let bp = draw_expr(rng)?;
        let sum = group.add(&b, &bp)?;
        let a1 = draw_expr(rng)?;
        let a1p = group.sub(&sum, &a1)?;
        let a2 = draw_expr(rng)?;
        let a2p = group.sub(&sum, &a2)?;
        let s = Sixtuple::new(group, [a1, a1p, a2, a2p, b, bp])?;
        if s.in_open_set(group)? {
            return Ok(s);
        }
    }
}

/// Deterministic nonzero quad with small integer entries.
pub fn sample_quad(rng: &mut ChaCha8Rng) -> ScalarQuad {
    ScalarQuad {
        values: [
            draw_nonzero(rng),
            draw_nonzero(rng),
            draw_nonzero(rng),
            draw_nonzero(rng),
        ],
    }
}

/// Random element of the rescaling torus applied to a quad; the normal form
/// is unchanged.
pub fn gamma_translate(rng: &mut ChaCha8Rng, q: &ScalarQuad) -> ScalarQuad {
    let l1 = draw_nonzero(rng);
    let l1p = draw_nonzero(rng);
    let l2 = draw_nonzero(rng);
    let l2p = l1.clone() * l1p.clone() / l2.clone();
    ScalarQuad {
        values: [
            l1 * q.values[0].clone(),
            l1p * q.values[1].clone(),
            l2 * q.values[2].clone(),
            l2p * q.values[3].clone(),
        ],
    }
}

/// Orbit sizes of the standard sixtuple followed by deterministically
/// sampled generic ones.
pub fn orbit_statistics(
    group: &PointGroup,
    samples: usize,
    seed: u64,
) -> Result<Vec<usize>, Moduli2Error> {
    let mut rng = seeded_rng(seed ^ 0x6f72_6269);
    let mut sizes = vec![g_orbit(group, &standard_sixtuple(group))?.len()];
    for _ in 0..samples {
        let s = sample_sixtuple(group, &mut rng)?;
        sizes.push(g_orbit(group, &s)?.len());
    }
    Ok(sizes)
}

/// Outcome of an isomorphism-versus-normal-form sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsoSweepReport {
    pub trials: usize,
    pub agreements: usize,
    pub isomorphic_pairs: usize,
}

impl IsoSweepReport {
    pub fn all_agree(&self) -> bool {
        self.agreements == self.trials
    }
}

/// Compares the chain-map isomorphism test against normal-form equality on
/// random same-object quad pairs; even trials use a torus translate of the
/// first quad so both outcomes occur.
pub fn iso_vs_normal_form_sweep(
    model: &Arc<GenericModel>,
    group: &Arc<PointGroup>,
    s: &Sixtuple,
    trials: usize,
    seed: u64,
) -> Result<IsoSweepReport, Moduli2Error> {
    let mut rng = seeded_rng(seed);
    let mut agreements = 0;
    let mut isomorphic_pairs = 0;
    for trial in 0..trials {
        let q1 = sample_quad(&mut rng);
        let q2 = if trial % 2 == 0 { gamma_translate(&mut rng, &q1) } else { sample_quad(&mut rng) };
        let m1 = quad_monad(model, group, s, &q1)?;
        let m2 = quad_monad(model, group, s, &q2)?;
        let iso = iso_test(&m1, &m2)?;
        let nf_equal = gamma_normal_form(&q1) == gamma_normal_form(&q2);
        if iso == nf_equal {
            agreements += 1;
        }
        if iso {
            isomorphic_pairs += 1;
        }
    }
    Ok(IsoSweepReport { trials, agreements, isomorphic_pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sections::sample_model;

    fn setup() -> (Arc<GenericModel>, Arc<PointGroup>, Sixtuple) {
        let model = Arc::new(sample_model(2, 1).unwrap());
        let group = moduli_point_group();
        let s = standard_sixtuple(&group);
        (model, group, s)
    }

    #[test]
    fn standard_sixtuple_is_generic() {
        let (_, group, s) = setup();
        assert!(s.in_open_set(&group).unwrap());
    }

    #[test]
    fn relation_violation_rejected() {
        let group = moduli_point_group();
        let e = |n: &str| group.generator(n).unwrap();
        let bad = Sixtuple::new(
            &group,
            [e("a1"), e("a1"), e("a2"), e("a2p"), e("b"), e("bp")],
        );
        assert_eq!(bad.unwrap_err(), Moduli2Error::RelationViolated(0));
    }

    #[test]
    fn generic_orbit_has_size_eight() {
        let (_, group, s) = setup();
        let orbit = g_orbit(&group, &s).unwrap();
        assert_eq!(orbit.len(), 8);
        assert!(orbit.contains(&s));
    }

    #[test]
    fn identity_fixes_every_sixtuple() {
        let (_, group, s) = setup();
        let q = ScalarQuad::of_integers([1, 2, 3, 4]).unwrap();
        let (moved, moved_q) = g_transport(&group, &s, &q, &GElement::IDENTITY).unwrap();
        assert_eq!(moved, s);
        assert_eq!(moved_q, q);
    }

    #[test]
    fn degenerate_orbits_divide_eight() {
        let group = moduli_point_group();
        let e = |n: &str| group.generator(n).unwrap();
        // both pairs equal: stabilized by the pair swap
        let s4 = Sixtuple::new(
            &group,
            [e("a1"), e("a1p"), e("a1"), e("a1p"), e("b"), e("bp")],
        )
        .unwrap();
        assert!(!s4.in_open_set(&group).unwrap());
        let orbit = g_orbit(&group, &s4).unwrap();
        assert_eq!(orbit.len(), 4);
        assert_eq!(8 % orbit.len(), 0);

        // fully symmetric: 2 a1 = b + b'
        let half = group.expr(&[("a1", 1)]).unwrap();
        let b = group.expr(&[("a1", 2), ("bp", -1)]).unwrap();
        let s1 = Sixtuple::new(
            &group,
            [half.clone(), half.clone(), half.clone(), half, b, e("bp")],
        )
        .unwrap();
        let orbit = g_orbit(&group, &s1).unwrap();
        assert_eq!(orbit.len(), 1);
    }

    #[test]
    fn normal_form_examples() {
        let nf = |vals: [i64; 4]| gamma_normal_form(&ScalarQuad::of_integers(vals).unwrap());
        assert_eq!(nf([1, 1, 1, 1]).coords, [rat(1), rat(1)]);
        assert_eq!(nf([2, 3, 1, 6]), nf([1, 1, 1, 1]));
        assert_eq!(nf([1, 1, 2, 1]).coords, [rat(1), rat(2)]);
        assert_ne!(nf([1, 1, 2, 1]), nf([1, 1, 1, 1]));
    }

    #[test]
    fn zero_quad_entry_rejected() {
        assert_eq!(
            ScalarQuad::of_integers([1, 0, 1, 1]).unwrap_err(),
            Moduli2Error::ZeroQuadEntry(1)
        );
    }

    #[test]
    fn quad_monad_is_a_monad() {
        let (model, group, s) = setup();
        let q = ScalarQuad::of_integers([3, -2, 5, 7]).unwrap();
        let m = quad_monad(&model, &group, &s, &q).unwrap();
        assert!(m.composition().is_zero());
    }

    #[test]
    fn iso_test_examples() {
        let (model, group, s) = setup();
        let q1 = ScalarQuad::of_integers([1, 1, 1, 1]).unwrap();
        let m1 = quad_monad(&model, &group, &s, &q1).unwrap();
        assert!(iso_test(&m1, &m1).unwrap());

        // torus translate: same normal form, isomorphic
        let q2 = ScalarQuad::of_integers([2, 3, 1, 6]).unwrap();
        let m2 = quad_monad(&model, &group, &s, &q2).unwrap();
        assert!(iso_test(&m1, &m2).unwrap());

        // different normal form: not isomorphic
        let q3 = ScalarQuad::of_integers([1, 1, 2, 1]).unwrap();
        let m3 = quad_monad(&model, &group, &s, &q3).unwrap();
        assert!(!iso_test(&m1, &m3).unwrap());
    }

    #[test]
    fn iso_agrees_with_normal_form_on_sweeps() {
        let (model, group, s) = setup();
        let report = iso_vs_normal_form_sweep(&model, &group, &s, 100, 42).unwrap();
        assert_eq!(report.trials, 100);
        assert!(report.all_agree(), "agreements {}", report.agreements);
        // the translate trials guarantee genuine positives
        assert!(report.isomorphic_pairs >= 50);
        assert!(report.isomorphic_pairs < 100);
    }

    #[test]
    fn relabelling_preserves_the_isomorphism_class() {
        let (model, group, s) = setup();
        let q = ScalarQuad::of_integers([2, -3, 5, 1]).unwrap();
        let m = quad_monad(&model, &group, &s, &q).unwrap();
        for g in GElement::all() {
            let (s2, q2) = g_transport(&group, &s, &q, &g).unwrap();
            let moved = quad_monad(&model, &group, &s2, &q2).unwrap();
            let back = reorder_b_to_match(&m, &moved).unwrap();
            assert!(iso_test(&m, &back).unwrap(), "failed for {g:?}");
        }
    }

    #[test]
    fn dims_add_up() {
        let dims = moduli_dims();
        assert_eq!(dims.t, 12);
        assert_eq!(dims.gamma, 3);
        assert_eq!(dims.p, 13);
        assert_eq!(dims.g_order, 8);
        assert_eq!(dims.p as i64, crate::chow::ext1_dim_formula(crate::chow::ChernPair::new(0, 2)));
    }
}
