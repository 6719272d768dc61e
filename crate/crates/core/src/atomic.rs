//! Uniform atomic measures `δ_A = (1/N) Σ_{a∈A} δ_a` and the matrix test
//! deciding when a finite integer frequency set is a spectrum for them.
//!
//! A frequency set `Λ` with `|Λ| = |A| = N` is a spectrum exactly when the
//! normalized exponential matrix `(1/√N)(e^{2πi a·λ})` is unitary. In one
//! dimension with `Λ = {0,…,N−1}` this holds exactly when `N·(A − min A)` is
//! a complete residue system mod `N` ([`residue_form`]).

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

use crate::exactnum::{frac, rat_int, unit_exp, unit_exp_f64, unitarity_defect, Complex, Rational};

pub use crate::exactnum::UNITARITY_TOL;

#[derive(Debug, Error)]
pub enum AtomicError {
    #[error("atomic measure needs at least one atom")]
    Empty,
    #[error("atom dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("duplicate atom at {0:?}")]
    DuplicateAtom(Vec<Rational>),
    #[error("duplicate frequency {0:?}")]
    DuplicateFrequency(Vec<i64>),
    #[error("size mismatch: {atoms} atoms vs {frequencies} frequencies")]
    SizeMismatch { atoms: usize, frequencies: usize },
    #[error("operation requires dimension 1, measure has dimension {0}")]
    NotOneDimensional(usize),
    #[error("expected {expected} atoms, got {got}")]
    WrongAtomCount { expected: usize, got: usize },
}

/// Finitely many distinct rational atoms, each carrying weight `1/N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicMeasure {
    dim: usize,
    points: Vec<Vec<Rational>>,
}

impl AtomicMeasure {
    pub fn new(points: Vec<Vec<Rational>>) -> Result<Self, AtomicError> {
        let dim = match points.first() {
            Some(p) => p.len(),
            None => return Err(AtomicError::Empty),
        };
        for p in &points {
            if p.len() != dim {
                return Err(AtomicError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
        }
        let mut sorted = points.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(AtomicError::DuplicateAtom(w[0].clone()));
            }
        }
        Ok(AtomicMeasure {
            dim,
            points: sorted,
        })
    }

    /// One-dimensional measure from scalar atoms.
    pub fn from_scalars(atoms: Vec<Rational>) -> Result<Self, AtomicError> {
        Self::new(atoms.into_iter().map(|a| vec![a]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    /// Translation by an arbitrary rational vector.
    pub fn translated(&self, shift: &[Rational]) -> Self {
        assert_eq!(shift.len(), self.dim);
        AtomicMeasure {
            dim: self.dim,
            points: self
                .points
                .iter()
                .map(|p| p.iter().zip(shift).map(|(a, s)| a + s).collect())
                .collect(),
        }
    }

    /// `δ̂_A(t) = (1/N) Σ_a e^{2πi a·t}`.
    pub fn fourier_transform(&self, t: &[f64]) -> Complex {
        assert_eq!(t.len(), self.dim, "frequency dimension must match measure");
        let n = self.points.len() as f64;
        self.points
            .iter()
            .map(|p| {
                let phase: f64 = p
                    .iter()
                    .zip(t)
                    .map(|(a, ti)| crate::exactnum::to_f64(a) * ti)
                    .sum();
                unit_exp_f64(phase)
            })
            .sum::<Complex>()
            / n
    }
}

/// Finite set of distinct integer frequency vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencySet {
    dim: usize,
    frequencies: Vec<Vec<i64>>,
}

impl FrequencySet {
    pub fn new(frequencies: Vec<Vec<i64>>) -> Result<Self, AtomicError> {
        let dim = match frequencies.first() {
            Some(f) => f.len(),
            None => return Err(AtomicError::Empty),
        };
        for f in &frequencies {
            if f.len() != dim {
                return Err(AtomicError::DimensionMismatch {
                    expected: dim,
                    got: f.len(),
                });
            }
        }
        let mut sorted = frequencies;
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(AtomicError::DuplicateFrequency(w[0].clone()));
            }
        }
        Ok(FrequencySet {
            dim,
            frequencies: sorted,
        })
    }

    /// One-dimensional set from scalar frequencies.
    pub fn from_scalars(frequencies: Vec<i64>) -> Result<Self, AtomicError> {
        Self::new(frequencies.into_iter().map(|f| vec![f]).collect())
    }

    /// The canonical spectrum `{0, 1, …, n−1}` in dimension one.
    pub fn range(n: usize) -> Self {
        FrequencySet {
            dim: 1,
            frequencies: (0..n as i64).map(|f| vec![f]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[Vec<i64>] {
        &self.frequencies
    }
}

/// The normalized exponential matrix `(1/√N)(e^{2πi a·λ})`, rows indexed by
/// atoms and columns by frequencies.
pub fn exp_matrix(
    measure: &AtomicMeasure,
    freqs: &FrequencySet,
) -> Result<Vec<Vec<Complex>>, AtomicError> {
    if measure.len() != freqs.len() {
        return Err(AtomicError::SizeMismatch {
            atoms: measure.len(),
            frequencies: freqs.len(),
        });
    }
    if measure.dim() != freqs.dim() {
        return Err(AtomicError::DimensionMismatch {
            expected: measure.dim(),
            got: freqs.dim(),
        });
    }
    let scale = 1.0 / (measure.len() as f64).sqrt();
    Ok(measure
        .points()
        .iter()
        .map(|a| {
            freqs
                .frequencies()
                .iter()
                .map(|lambda| {
                    let dot: Rational =
                        a.iter().zip(lambda).map(|(ai, &li)| ai * rat_int(li)).sum();
                    unit_exp(&dot) * scale
                })
                .collect()
        })
        .collect())
}

/// Worst deviation of the exponential matrix from unitarity.
pub fn spectrum_defect(measure: &AtomicMeasure, freqs: &FrequencySet) -> Result<f64, AtomicError> {
    Ok(unitarity_defect(&exp_matrix(measure, freqs)?))
}

/// Whether `freqs` is a spectrum for the atomic measure, i.e. whether the
/// exponential matrix is unitary within `tol`.
pub fn is_spectrum(
    measure: &AtomicMeasure,
    freqs: &FrequencySet,
    tol: f64,
) -> Result<bool, AtomicError> {
    Ok(spectrum_defect(measure, freqs)? < tol)
}

/// Successful residue-form decomposition: `atoms = shift + representatives/n`
/// with the representatives a complete residue system mod `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueForm {
    pub shift: Rational,
    pub representatives: Vec<BigInt>,
}

/// Decides whether a one-dimensional `n`-atom measure is, up to a common
/// translation, of the form `(1/n)·A'` with `A'` a complete residue system
/// mod `n`. Normalizes by the smallest atom; orthogonality depends only on
/// atom differences, so the choice of translate is immaterial.
pub fn residue_form(measure: &AtomicMeasure, n: usize) -> Result<Option<ResidueForm>, AtomicError> {
    if measure.dim() != 1 {
        return Err(AtomicError::NotOneDimensional(measure.dim()));
    }
    if measure.len() != n {
        return Err(AtomicError::WrongAtomCount {
            expected: n,
            got: measure.len(),
        });
    }
    let shift = measure.points()[0][0].clone(); // points are sorted: min atom
    let big_n = BigInt::from(n);
    let mut reps = Vec::with_capacity(n);
    for p in measure.points() {
        let scaled = (&p[0] - &shift) * rat_int(n as i64);
        if !scaled.is_integer() {
            return Ok(None);
        }
        reps.push(scaled.to_integer());
    }
    let mut residues: Vec<BigInt> = reps
        .iter()
        .map(|r| {
            let mut m = r % &big_n;
            if m.is_negative() {
                m += &big_n;
            }
            m
        })
        .collect();
    residues.sort();
    residues.dedup();
    if residues.len() != n {
        return Ok(None);
    }
    Ok(Some(ResidueForm {
        shift,
        representatives: reps,
    }))
}

/// One matched pair of a translation-equivalence bijection between two atom
/// sets: atom `from` of the first measure maps onto atom `to = from + shift`
/// of the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomPairing {
    pub from: Vec<Rational>,
    pub to: Vec<Rational>,
    pub shift: Vec<BigInt>,
}

/// Decides translation equivalence of two uniform atomic measures: the
/// multisets of atoms mod 1 must coincide exactly. Returns the atom-to-atom
/// integer-shift bijection on success.
pub fn translation_equivalent(a: &AtomicMeasure, b: &AtomicMeasure) -> Option<Vec<AtomPairing>> {
    if a.dim() != b.dim() || a.len() != b.len() {
        return None;
    }
    let key = |p: &Vec<Rational>| -> (Vec<Rational>, Vec<Rational>) {
        (p.iter().map(frac).collect(), p.clone())
    };
    let mut fa: Vec<(Vec<Rational>, Vec<Rational>)> = a.points().iter().map(key).collect();
    let mut fb: Vec<(Vec<Rational>, Vec<Rational>)> = b.points().iter().map(key).collect();
    fa.sort();
    fb.sort();
    let mut pairing = Vec::with_capacity(fa.len());
    for ((ra, pa), (rb, pb)) in fa.into_iter().zip(fb) {
        if ra != rb {
            return None;
        }
        let shift: Vec<BigInt> = pb
            .iter()
            .zip(&pa)
            .map(|(y, x)| (y - x).to_integer())
            .collect();
        pairing.push(AtomPairing {
            from: pa,
            to: pb,
            shift,
        });
    }
    Some(pairing)
}
