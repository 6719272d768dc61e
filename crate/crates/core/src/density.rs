//! Absolutely continuous measures `dμ = φ dx` carried by rational step
//! densities, and the machinery deciding when the integer-frequency
//! exponentials `e_n(x) = e^{2πi n·x}` are orthonormal or form a full
//! orthonormal basis in `L²(μ)`.
//!
//! The decisions are exact: a step density is refined onto a residue grid of
//! the unit cube `Q = [0,1)^d`, and "almost everywhere" statements become
//! literal statements about finitely many half-open grid cells.
//!
//! Three levels of structure appear:
//!
//! * orthonormality of `{e_n : n ∈ ℤᵈ}` holds exactly when the integer
//!   translates of `φ` sum to one ([`StepDensity::verify_partition_of_unity`]);
//! * the family is a complete basis exactly when `φ` is the indicator of a
//!   set translation congruent to `Q`
//!   ([`StepDensity::integer_spectrum_verdict`], [`check_translation_congruent`]);
//! * congruence partitions of `Q` index the iso-spectral family of all such
//!   measures ([`CongruencePartition::indicator_density`]).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactnum::{
    box_exp_integral, frac, to_f64, unit_exp_f64, Complex, Rational, RationalBox,
};

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("density must contain at least one cell of positive mass")]
    EmptyDensity,
    #[error("cell dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative cell value {value}")]
    NegativeValue { value: Rational },
    #[error("overlapping cells {a} and {b}")]
    OverlappingCells { a: RationalBox, b: RationalBox },
    #[error("total mass is {mass}, expected 1")]
    MassNotOne { mass: Rational },
    #[error("translates do not sum to one: residue cell {cell} sums to {sum}")]
    NotPartitionOfUnity { cell: RationalBox, sum: Rational },
    #[error("point lies outside the unit cube")]
    PointOutsideCube,
    #[error("congruence input has volume {volume}, expected 1")]
    VolumeNotOne { volume: Rational },
    #[error("partition piece {piece} for shift {shift:?} is not contained in the unit cube")]
    PieceOutsideCube {
        shift: Vec<BigInt>,
        piece: RationalBox,
    },
    #[error("duplicate shift {shift:?} in partition")]
    DuplicateShift { shift: Vec<BigInt> },
    #[error("partition pieces {a} and {b} overlap")]
    OverlappingPieces { a: RationalBox, b: RationalBox },
    #[error("partition pieces have total volume {volume}, expected 1")]
    PartitionVolume { volume: Rational },
}

/// Outcome of the translate-sum check `Σ_k φ(x+k) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnityCheck {
    Holds,
    /// A residue cell of `Q` on which the translate sum differs from one.
    Fails {
        cell: RationalBox,
        sum: Rational,
    },
}

impl UnityCheck {
    pub fn holds(&self) -> bool {
        matches!(self, UnityCheck::Holds)
    }
}

/// Trichotomy for the integer-frequency exponentials in `L²(φ dx)`.
#[derive(Debug, Clone)]
pub enum SpectrumVerdict {
    /// `{e_n}` is an orthonormal basis; the certificate exhibits the support
    /// as translation congruent to the unit cube.
    OrthonormalAndComplete { certificate: CongruencePartition },
    /// `{e_n}` is orthonormal but spans a proper subspace; the witness is a
    /// residue cell on which `φ` takes a value other than 0 or 1.
    OrthonormalIncomplete {
        witness: Option<(RationalBox, Rational)>,
    },
    /// `{e_n}` is not even orthonormal; the witness cell violates the
    /// translate-sum identity.
    NotOrthonormal { cell: RationalBox, sum: Rational },
}

impl SpectrumVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            SpectrumVerdict::OrthonormalAndComplete { .. } => "orthonormal_and_complete",
            SpectrumVerdict::OrthonormalIncomplete { .. } => "orthonormal_incomplete",
            SpectrumVerdict::NotOrthonormal { .. } => "not_orthonormal",
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, SpectrumVerdict::OrthonormalAndComplete { .. })
    }

    pub fn certificate(&self) -> Option<&CongruencePartition> {
        match self {
            SpectrumVerdict::OrthonormalAndComplete { certificate } => Some(certificate),
            _ => None,
        }
    }
}

/// Finitely supported piecewise-constant density over disjoint half-open
/// rational boxes.
///
/// Cells with value zero are dropped on construction, so the stored cells all
/// carry positive mass and the sorted cell list is a canonical representation
/// of the function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepDensity {
    dim: usize,
    cells: Vec<(RationalBox, Rational)>,
}

impl StepDensity {
    /// Probability density: cell values `≥ 0` on pairwise disjoint boxes with
    /// total integral exactly one.
    pub fn new(cells: Vec<(RationalBox, Rational)>) -> Result<Self, DensityError> {
        let d = Self::unnormalized(cells)?;
        if !d.is_probability() {
            return Err(DensityError::MassNotOne {
                mass: d.total_mass(),
            });
        }
        Ok(d)
    }

    /// Same validation as [`StepDensity::new`] but any positive total mass is
    /// accepted; used for folded and partial measures.
    pub fn unnormalized(cells: Vec<(RationalBox, Rational)>) -> Result<Self, DensityError> {
        let mut kept: Vec<(RationalBox, Rational)> = Vec::new();
        for (bx, v) in cells {
            if v.is_negative() {
                return Err(DensityError::NegativeValue { value: v });
            }
            if v.is_zero() {
                continue;
            }
            kept.push((bx, v));
        }
        let dim = match kept.first() {
            Some((bx, _)) => bx.dim(),
            None => return Err(DensityError::EmptyDensity),
        };
        for (bx, _) in &kept {
            if bx.dim() != dim {
                return Err(DensityError::DimensionMismatch {
                    expected: dim,
                    got: bx.dim(),
                });
            }
        }
        for i in 0..kept.len() {
            for j in (i + 1)..kept.len() {
                if kept[i].0.intersect(&kept[j].0).is_some() {
                    return Err(DensityError::OverlappingCells {
                        a: kept[i].0.clone(),
                        b: kept[j].0.clone(),
                    });
                }
            }
        }
        kept.sort();
        Ok(StepDensity { dim, cells: kept })
    }

    /// Indicator density `χ_Q` of the unit cube.
    pub fn unit_cube_indicator(dim: usize) -> Self {
        StepDensity {
            dim,
            cells: vec![(RationalBox::unit_cube(dim), Rational::one())],
        }
    }

    /// Indicator of a union of disjoint boxes (value one on each box).
    pub fn indicator(boxes: Vec<RationalBox>) -> Result<Self, DensityError> {
        Self::unnormalized(boxes.into_iter().map(|b| (b, Rational::one())).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[(RationalBox, Rational)] {
        &self.cells
    }

    pub fn total_mass(&self) -> Rational {
        self.cells.iter().map(|(bx, v)| bx.volume() * v).sum()
    }

    pub fn is_probability(&self) -> bool {
        self.total_mass().is_one()
    }

    /// Density value at a point (zero off all cells).
    pub fn value_at(&self, x: &[Rational]) -> Rational {
        for (bx, v) in &self.cells {
            if bx.contains(x) {
                return v.clone();
            }
        }
        Rational::zero()
    }

    /// Integer translate of the whole density.
    pub fn translated(&self, shift: &[BigInt]) -> Self {
        assert_eq!(shift.len(), self.dim);
        StepDensity {
            dim: self.dim,
            cells: self
                .cells
                .iter()
                .map(|(bx, v)| (bx.translated(shift), v.clone()))
                .collect(),
        }
    }

    /// Own breakpoints in every dimension, sorted and deduplicated.
    fn breakpoints(&self) -> Vec<Vec<Rational>> {
        let mut breaks: Vec<Vec<Rational>> = vec![Vec::new(); self.dim];
        for (bx, _) in &self.cells {
            for (i, (lo, hi)) in bx.intervals().iter().enumerate() {
                breaks[i].push(lo.clone());
                breaks[i].push(hi.clone());
            }
        }
        for b in &mut breaks {
            b.sort();
            b.dedup();
        }
        breaks
    }

    /// Splits every cell along the given per-dimension breakpoints.
    fn refine_with(&self, breaks: &[Vec<Rational>]) -> Vec<(RationalBox, Rational)> {
        let mut out: Vec<(RationalBox, Rational)> = Vec::new();
        for (bx, v) in &self.cells {
            let per_dim: Vec<Vec<(Rational, Rational)>> = bx
                .intervals()
                .iter()
                .enumerate()
                .map(|(i, (lo, hi))| {
                    let mut cuts: Vec<Rational> = vec![lo.clone()];
                    cuts.extend(breaks[i].iter().filter(|z| *z > lo && *z < hi).cloned());
                    cuts.push(hi.clone());
                    cuts.windows(2)
                        .map(|w| (w[0].clone(), w[1].clone()))
                        .collect()
                })
                .collect();
            let sizes: Vec<usize> = per_dim.iter().map(Vec::len).collect();
            for idx in MultiIndex::new(&sizes) {
                let intervals = idx
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| per_dim[i][j].clone())
                    .collect();
                out.push((
                    RationalBox::new(intervals).expect("split of a nonempty box"),
                    v.clone(),
                ));
            }
        }
        out.sort();
        out
    }

    /// Rewrites the density on the coarsest common grid spanned by its own
    /// breakpoints in every dimension. Equal as a measure, idempotent.
    pub fn refine_to_grid(&self) -> Self {
        StepDensity {
            dim: self.dim,
            cells: self.refine_with(&self.breakpoints()),
        }
    }

    /// Exact equality as measures: both densities are refined onto the union
    /// of their breakpoint grids and compared cell by cell.
    pub fn measure_eq(&self, other: &StepDensity) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let mut breaks = self.breakpoints();
        for (i, b) in other.breakpoints().into_iter().enumerate() {
            breaks[i].extend(b);
            breaks[i].sort();
            breaks[i].dedup();
        }
        self.refine_with(&breaks) == other.refine_with(&breaks)
    }

    /// Exactly decides whether `Σ_{k∈ℤᵈ} φ(x+k) = 1` for a.e. `x`.
    pub fn verify_partition_of_unity(&self) -> UnityCheck {
        FoldedTable::from_densities(&[self], 0).unity_check()
    }

    /// `∫ e^{2πi n·x} φ(x) dx` for an integer frequency vector.
    pub fn moment(&self, n: &[i64]) -> Complex {
        let t: Vec<f64> = n.iter().map(|&v| v as f64).collect();
        self.fourier_transform(&t)
    }

    /// `μ̂(t) = ∫ e^{2πi t·x} φ(x) dx` in closed form.
    pub fn fourier_transform(&self, t: &[f64]) -> Complex {
        assert_eq!(t.len(), self.dim, "frequency dimension must match density");
        self.cells
            .iter()
            .map(|(bx, v)| box_exp_integral(bx, t) * to_f64(v))
            .sum()
    }

    /// Character-twisted periodization `Σ_k e^{2πi k·t} φ(x+k)` for `x ∈ Q`.
    ///
    /// The sum is finite (one term per translate meeting the support) and its
    /// modulus never exceeds the translate sum, so it is bounded by one
    /// whenever the partition of unity holds.
    pub fn twisted_periodization(
        &self,
        t: &[f64],
        x: &[Rational],
    ) -> Result<Complex, DensityError> {
        if x.len() != self.dim || t.len() != self.dim {
            return Err(DensityError::DimensionMismatch {
                expected: self.dim,
                got: x.len().max(t.len()),
            });
        }
        if !RationalBox::unit_cube(self.dim).contains(x) {
            return Err(DensityError::PointOutsideCube);
        }
        let table = FoldedTable::from_densities(&[self], 0);
        let idx = table.grid.locate(x);
        Ok(table.fiber_character_sum(&idx, t))
    }

    /// `Σ_{residue cells c} vol(c) · |F(t, x_c)|²` where `F` is the twisted
    /// periodization, constant on each residue cell.
    ///
    /// Requires the partition of unity; the value then lies in `[0, 1]`, and
    /// equals one for every `t` exactly when the density is an indicator of a
    /// set congruent to the unit cube.
    pub fn parseval_sum(&self, t: &[f64]) -> Result<f64, DensityError> {
        assert_eq!(t.len(), self.dim, "frequency dimension must match density");
        let table = FoldedTable::from_densities(&[self], 0);
        if let UnityCheck::Fails { cell, sum } = table.unity_check() {
            return Err(DensityError::NotPartitionOfUnity { cell, sum });
        }
        let mut acc = 0.0;
        for idx in MultiIndex::new(&table.grid.sizes()) {
            let f = table.fiber_character_sum(&idx, t);
            acc += to_f64(&table.grid.cell_box(&idx).volume()) * f.norm_sqr();
        }
        Ok(acc)
    }

    /// Truncated frequency-side sum `Σ_{|n|_∞ ≤ max_norm} |μ̂(t+n)|²`.
    ///
    /// Nondecreasing in the truncation radius and converging to
    /// [`StepDensity::parseval_sum`] from below.
    pub fn parseval_sum_partial(&self, t: &[f64], max_norm: u32) -> f64 {
        assert_eq!(t.len(), self.dim, "frequency dimension must match density");
        let m = max_norm as i64;
        let side = (2 * m + 1) as usize;
        let mut acc = 0.0;
        for idx in MultiIndex::new(&vec![side; self.dim]) {
            let shifted: Vec<f64> = idx
                .iter()
                .zip(t)
                .map(|(&j, ti)| ti + (j as i64 - m) as f64)
                .collect();
            acc += self.fourier_transform(&shifted).norm_sqr();
        }
        acc
    }

    /// Full trichotomy for `Γ = ℤᵈ`: not orthonormal, orthonormal but
    /// incomplete, or a complete basis with a congruence certificate.
    ///
    /// Completeness is decided structurally — the density must be `{0,1}`
    /// valued on the residue grid — rather than by sampling the Parseval sum
    /// at finitely many frequencies.
    pub fn integer_spectrum_verdict(&self) -> SpectrumVerdict {
        let table = FoldedTable::from_densities(&[self], 0);
        if let UnityCheck::Fails { cell, sum } = table.unity_check() {
            return SpectrumVerdict::NotOrthonormal { cell, sum };
        }
        // Zero-value cells are never stored, so indicator == all values one.
        for (idx, fiber) in &table.fibers {
            for value in fiber.values() {
                if !value.is_one() {
                    return SpectrumVerdict::OrthonormalIncomplete {
                        witness: Some((table.grid.cell_box(idx), value.clone())),
                    };
                }
            }
        }
        let certificate = table
            .to_partition()
            .expect("indicator partition of unity folds to a congruence partition");
        SpectrumVerdict::OrthonormalAndComplete { certificate }
    }

    /// Pushes the measure into the unit cube: density `x ↦ Σ_k φ(x+k)` on
    /// `Q`. Preserves the total mass; a result of mass below one flags a
    /// subprobability fold.
    pub fn fold_to_cube(&self) -> StepDensity {
        let table = FoldedTable::from_densities(&[self], 0);
        let mut cells = Vec::new();
        for (idx, fiber) in &table.fibers {
            let sum: Rational = fiber.values().sum();
            cells.push((table.grid.cell_box(idx), sum));
        }
        StepDensity::unnormalized(cells).expect("fold of a nonempty density is nonempty")
    }
}

impl fmt::Display for StepDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (bx, v)) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{v}·χ{bx}")?;
        }
        Ok(())
    }
}

/// Measurable partition `{E_k}` of the unit cube together with the integer
/// shifts sending each piece into the congruent set `E = ⋃ (E_k + k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruencePartition {
    dim: usize,
    pieces: Vec<(Vec<BigInt>, Vec<RationalBox>)>,
}

impl CongruencePartition {
    /// Validates the partition invariants: pieces inside `Q`, pairwise
    /// disjoint, distinct shifts, total volume one.
    pub fn new(pieces: Vec<(Vec<BigInt>, Vec<RationalBox>)>) -> Result<Self, DensityError> {
        let mut pieces: Vec<(Vec<BigInt>, Vec<RationalBox>)> = pieces
            .into_iter()
            .filter(|(_, boxes)| !boxes.is_empty())
            .collect();
        let dim = match pieces.first() {
            Some((shift, _)) => shift.len(),
            None => return Err(DensityError::EmptyDensity),
        };
        let cube = RationalBox::unit_cube(dim);
        let mut volume = Rational::zero();
        let mut all_boxes: Vec<RationalBox> = Vec::new();
        for (shift, boxes) in &mut pieces {
            if shift.len() != dim {
                return Err(DensityError::DimensionMismatch {
                    expected: dim,
                    got: shift.len(),
                });
            }
            boxes.sort();
            for bx in boxes.iter() {
                if bx.dim() != dim {
                    return Err(DensityError::DimensionMismatch {
                        expected: dim,
                        got: bx.dim(),
                    });
                }
                if !bx.subset_of(&cube) {
                    return Err(DensityError::PieceOutsideCube {
                        shift: shift.clone(),
                        piece: bx.clone(),
                    });
                }
                volume += bx.volume();
                all_boxes.push(bx.clone());
            }
        }
        for i in 0..all_boxes.len() {
            for j in (i + 1)..all_boxes.len() {
                if all_boxes[i].intersect(&all_boxes[j]).is_some() {
                    return Err(DensityError::OverlappingPieces {
                        a: all_boxes[i].clone(),
                        b: all_boxes[j].clone(),
                    });
                }
            }
        }
        pieces.sort();
        for w in pieces.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(DensityError::DuplicateShift {
                    shift: w[0].0.clone(),
                });
            }
        }
        if !volume.is_one() {
            return Err(DensityError::PartitionVolume { volume });
        }
        Ok(CongruencePartition { dim, pieces })
    }

    /// The trivial partition `{(0, Q)}`.
    pub fn trivial(dim: usize) -> Self {
        CongruencePartition {
            dim,
            pieces: vec![(vec![BigInt::zero(); dim], vec![RationalBox::unit_cube(dim)])],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[(Vec<BigInt>, Vec<RationalBox>)] {
        &self.pieces
    }

    /// Volume carried by each shift, the invariant preserved by refolding.
    pub fn shift_volumes(&self) -> BTreeMap<Vec<BigInt>, Rational> {
        self.pieces
            .iter()
            .map(|(shift, boxes)| (shift.clone(), boxes.iter().map(RationalBox::volume).sum()))
            .collect()
    }

    /// Boxes of the reassembled set `E = ⋃ (E_k + k)`.
    pub fn union_boxes(&self) -> Vec<RationalBox> {
        let mut out: Vec<RationalBox> = self
            .pieces
            .iter()
            .flat_map(|(shift, boxes)| boxes.iter().map(|b| b.translated(shift)))
            .collect();
        out.sort();
        out
    }

    /// The indicator density `χ_E` of the reassembled set. Always a
    /// probability density whose integer exponentials form a complete
    /// orthonormal basis.
    pub fn indicator_density(&self) -> StepDensity {
        StepDensity::indicator(self.union_boxes())
            .expect("congruence pieces translate to disjoint boxes of total volume one")
    }
}

/// Decides translation congruence of `E = ⋃ boxes` to the unit cube.
///
/// Returns the congruence partition when the folded pieces tile `Q` exactly,
/// `None` when translates overlap or leave a gap. The input must be a
/// disjoint family with total volume one.
pub fn check_translation_congruent(
    boxes: &[RationalBox],
) -> Result<Option<CongruencePartition>, DensityError> {
    let density = StepDensity::indicator(boxes.to_vec())?;
    let volume = density.total_mass();
    if !volume.is_one() {
        return Err(DensityError::VolumeNotOne { volume });
    }
    let table = FoldedTable::from_densities(&[&density], 0);
    if !table.unity_check().holds() {
        return Ok(None);
    }
    Ok(Some(table.to_partition().expect(
        "unity check guarantees one unit value per residue cell",
    )))
}

/// A piece of a translation-equivalence witness: the box `source` (a subset
/// of the support of the first measure) is carried onto the second measure by
/// the integer `shift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalencePiece {
    pub source: RationalBox,
    pub shift: Vec<BigInt>,
}

/// Decides translation equivalence of two step densities.
///
/// The criterion is fiberwise: over every residue cell of the common grid,
/// the multisets of nonzero translate values of the two densities must agree.
/// On success the returned pieces cut the support of `a` and shift it onto
/// the support of `b`, matching density values piece by piece.
pub fn translation_equivalent(a: &StepDensity, b: &StepDensity) -> Option<Vec<EquivalencePiece>> {
    if a.dim() != b.dim() {
        return None;
    }
    let ta = FoldedTable::from_densities(&[a, b], 0);
    let tb = FoldedTable::from_densities(&[a, b], 1);
    let empty = BTreeMap::new();
    let mut witness = Vec::new();
    for idx in MultiIndex::new(&ta.grid.sizes()) {
        let fa = ta.fibers.get(&idx).unwrap_or(&empty);
        let fb = tb.fibers.get(&idx).unwrap_or(&empty);
        if fa.len() != fb.len() {
            return None;
        }
        // Sort each fiber by value (ties broken by shift for determinism)
        // and match in order; equal multisets pair equal values.
        let mut va: Vec<(&Rational, &Vec<BigInt>)> = fa.iter().map(|(k, v)| (v, k)).collect();
        let mut vb: Vec<(&Rational, &Vec<BigInt>)> = fb.iter().map(|(k, v)| (v, k)).collect();
        va.sort();
        vb.sort();
        let cell = ta.grid.cell_box(&idx);
        for ((value_a, shift_a), (value_b, shift_b)) in va.iter().zip(&vb) {
            if value_a != value_b {
                return None;
            }
            let source = cell.translated(shift_a);
            let shift: Vec<BigInt> = shift_b
                .iter()
                .zip(shift_a.iter())
                .map(|(kb, ka)| kb - ka)
                .collect();
            witness.push(EquivalencePiece { source, shift });
        }
    }
    Some(witness)
}

// ---------------------------------------------------------------------------
// Residue grid machinery
// ---------------------------------------------------------------------------

/// Per-dimension breakpoints in `[0,1)` (always containing 0) cutting the
/// unit cube into the residue cells on which folded densities are constant.
struct ResidueGrid {
    breaks: Vec<Vec<Rational>>,
}

impl ResidueGrid {
    fn from_densities(densities: &[&StepDensity]) -> Self {
        let dim = densities[0].dim();
        let mut breaks: Vec<Vec<Rational>> = vec![vec![Rational::zero()]; dim];
        for d in densities {
            for (bx, _) in d.cells() {
                for (i, (lo, hi)) in bx.intervals().iter().enumerate() {
                    breaks[i].push(frac(lo));
                    breaks[i].push(frac(hi));
                }
            }
        }
        for b in &mut breaks {
            b.sort();
            b.dedup();
        }
        ResidueGrid { breaks }
    }

    fn dim(&self) -> usize {
        self.breaks.len()
    }

    fn sizes(&self) -> Vec<usize> {
        self.breaks.iter().map(Vec::len).collect()
    }

    /// Residue interval `j` of dimension `i`.
    fn interval(&self, i: usize, j: usize) -> (Rational, Rational) {
        let lo = self.breaks[i][j].clone();
        let hi = match self.breaks[i].get(j + 1) {
            Some(next) => next.clone(),
            None => Rational::one(),
        };
        (lo, hi)
    }

    fn cell_box(&self, idx: &[usize]) -> RationalBox {
        RationalBox::new(
            idx.iter()
                .enumerate()
                .map(|(i, &j)| self.interval(i, j))
                .collect(),
        )
        .expect("residue breakpoints are strictly increasing")
    }

    /// Residue index of a point of the unit cube.
    fn locate(&self, x: &[Rational]) -> Vec<usize> {
        x.iter()
            .enumerate()
            .map(|(i, xi)| self.breaks[i].partition_point(|s| s <= xi) - 1)
            .collect()
    }
}

/// Values of one density on `residue cell + integer shift`: the normal form
/// underlying every fold-based decision. The grid is shared by construction
/// when several densities must be compared fiberwise.
struct FoldedTable {
    grid: ResidueGrid,
    fibers: BTreeMap<Vec<usize>, BTreeMap<Vec<BigInt>, Rational>>,
}

impl FoldedTable {
    /// Builds the table of `densities[which]` on the residue grid common to
    /// all listed densities.
    fn from_densities(densities: &[&StepDensity], which: usize) -> Self {
        let grid = ResidueGrid::from_densities(densities);
        let density = densities[which];
        let dim = grid.dim();
        let mut fibers: BTreeMap<Vec<usize>, BTreeMap<Vec<BigInt>, Rational>> = BTreeMap::new();
        for (bx, v) in density.cells() {
            // Slice each dimension along every integer translate of the
            // residue breakpoints; each slice is residue interval + shift.
            let per_dim: Vec<Vec<(usize, BigInt)>> = (0..dim)
                .map(|i| {
                    let (lo, hi) = &bx.intervals()[i];
                    let mut cuts: Vec<Rational> = vec![lo.clone()];
                    let mut k = lo.floor().to_integer();
                    let hi_floor = hi.floor().to_integer();
                    while k <= hi_floor {
                        let base = Rational::from_integer(k.clone());
                        for s in &grid.breaks[i] {
                            let z = &base + s;
                            if &z > lo && &z < hi {
                                cuts.push(z);
                            }
                        }
                        k += 1;
                    }
                    cuts.sort();
                    cuts.iter()
                        .map(|u| {
                            let shift = u.floor().to_integer();
                            let offset = u - Rational::from_integer(shift.clone());
                            let j = grid.breaks[i]
                                .binary_search(&offset)
                                .expect("slice start lies on the residue grid");
                            (j, shift)
                        })
                        .collect()
                })
                .collect();
            let sizes: Vec<usize> = per_dim.iter().map(Vec::len).collect();
            for idx in MultiIndex::new(&sizes) {
                let mut residue = Vec::with_capacity(dim);
                let mut shift = Vec::with_capacity(dim);
                for (i, &j) in idx.iter().enumerate() {
                    let (r, k) = &per_dim[i][j];
                    residue.push(*r);
                    shift.push(k.clone());
                }
                let prior = fibers.entry(residue).or_default().insert(shift, v.clone());
                debug_assert!(prior.is_none(), "disjoint cells cannot share a grid slice");
            }
        }
        FoldedTable { grid, fibers }
    }

    /// Translate-sum check over every residue cell of the full grid.
    fn unity_check(&self) -> UnityCheck {
        for idx in MultiIndex::new(&self.grid.sizes()) {
            let sum: Rational = self
                .fibers
                .get(&idx)
                .map(|fiber| fiber.values().sum())
                .unwrap_or_else(Rational::zero);
            if !sum.is_one() {
                return UnityCheck::Fails {
                    cell: self.grid.cell_box(&idx),
                    sum,
                };
            }
        }
        UnityCheck::Holds
    }

    /// `Σ_shift value · e^{2πi shift·t}` over one fiber.
    fn fiber_character_sum(&self, idx: &[usize], t: &[f64]) -> Complex {
        let Some(fiber) = self.fibers.get(idx) else {
            return Complex::new(0.0, 0.0);
        };
        fiber
            .iter()
            .map(|(shift, v)| {
                let phase: f64 = shift
                    .iter()
                    .zip(t)
                    .map(|(k, ti)| k.to_f64().expect("shift fits in f64") * ti)
                    .sum();
                unit_exp_f64(phase) * to_f64(v)
            })
            .sum()
    }

    /// Reads a congruence partition off an indicator table in which every
    /// fiber holds exactly one unit value.
    fn to_partition(&self) -> Option<CongruencePartition> {
        let mut by_shift: BTreeMap<Vec<BigInt>, Vec<RationalBox>> = BTreeMap::new();
        for idx in MultiIndex::new(&self.grid.sizes()) {
            let fiber = self.fibers.get(&idx)?;
            if fiber.len() != 1 {
                return None;
            }
            let (shift, value) = fiber.iter().next()?;
            if !value.is_one() {
                return None;
            }
            by_shift
                .entry(shift.clone())
                .or_default()
                .push(self.grid.cell_box(&idx));
        }
        CongruencePartition::new(by_shift.into_iter().collect()).ok()
    }
}

/// Row-major iterator over the index product `0..sizes[0] × … × 0..sizes[d-1]`.
#[derive(Clone)]
pub(crate) struct MultiIndex {
    sizes: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndex {
    pub(crate) fn new(sizes: &[usize]) -> Self {
        let next = if sizes.iter().all(|&s| s > 0) {
            Some(vec![0; sizes.len()])
        } else {
            None
        };
        MultiIndex {
            sizes: sizes.to_vec(),
            next,
        }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut bumped = current.clone();
        for i in (0..bumped.len()).rev() {
            bumped[i] += 1;
            if bumped[i] < self.sizes[i] {
                self.next = Some(bumped);
                break;
            }
            bumped[i] = 0;
        }
        Some(current)
    }
}
