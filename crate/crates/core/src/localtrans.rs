//! Finite spectral expansions, the group of local translations acting on
//! them, and the intertwiner exchanging the exponential bases of two
//! measures with a common spectrum.
//!
//! An expansion stores the coefficients `c_λ = ⟨f, e_λ⟩` of a function
//! against finitely many exponentials. Local translation by `t` multiplies
//! the coefficient at `λ` by `e^{2πi t·λ}` — a diagonal action, so the group
//! law and norm preservation are exact at every truncation. The intertwiner
//! between two verified iso-spectral measures is the identity on
//! coefficients; it is exposed as an operation so the commutation law with
//! local translations is directly testable.

use thiserror::Error;

use crate::atomic::{self, AtomicMeasure, FrequencySet};
use crate::density::StepDensity;
use crate::exactnum::{unit_exp_f64, Complex, UNITARITY_TOL};
use crate::ifs::SpectrumSlice;

#[derive(Debug, Error)]
pub enum LocaltransError {
    #[error("spectrum and coefficient lengths differ: {frequencies} vs {coefficients}")]
    LengthMismatch {
        frequencies: usize,
        coefficients: usize,
    },
    #[error("frequency dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expansions live on different spectra")]
    SpectrumMismatch,
    #[error("measure failed its spectrum check for the expansion's spectrum: {0}")]
    NotVerifiedIsoSpectral(String),
}

/// Coefficients of a function against the exponentials of a finite spectrum
/// slice. Frequencies are real vectors; integer spectra embed canonically.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralExpansion {
    frequencies: Vec<Vec<f64>>,
    coefficients: Vec<Complex>,
}

impl SpectralExpansion {
    pub fn new(
        frequencies: Vec<Vec<f64>>,
        coefficients: Vec<Complex>,
    ) -> Result<Self, LocaltransError> {
        if frequencies.len() != coefficients.len() {
            return Err(LocaltransError::LengthMismatch {
                frequencies: frequencies.len(),
                coefficients: coefficients.len(),
            });
        }
        if let Some(first) = frequencies.first() {
            let dim = first.len();
            for f in &frequencies {
                if f.len() != dim {
                    return Err(LocaltransError::DimensionMismatch {
                        expected: dim,
                        got: f.len(),
                    });
                }
            }
        }
        Ok(SpectralExpansion {
            frequencies,
            coefficients,
        })
    }

    /// The empty expansion (empty spectrum slice).
    pub fn empty() -> Self {
        SpectralExpansion {
            frequencies: Vec::new(),
            coefficients: Vec::new(),
        }
    }

    pub fn frequencies(&self) -> &[Vec<f64>] {
        &self.frequencies
    }

    pub fn coefficients(&self) -> &[Complex] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.frequencies.first().map_or(0, Vec::len)
    }

    /// `ℓ²` norm of the coefficient sequence.
    pub fn l2_norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Pointwise synthesis `Σ_λ c_λ e^{2πi λ·x}` of the finite expansion.
    /// Meaningful as a function value on the support of the measure the
    /// coefficients were analyzed against.
    pub fn synthesize(&self, x: &[f64]) -> Complex {
        if !self.is_empty() {
            assert_eq!(x.len(), self.dim(), "point dimension must match spectrum");
        }
        self.frequencies
            .iter()
            .zip(&self.coefficients)
            .map(|(lambda, c)| {
                let phase: f64 = lambda.iter().zip(x).map(|(l, xi)| l * xi).sum();
                c * unit_exp_f64(phase)
            })
            .sum()
    }
}

/// Frequency lists convertible into expansion spectra.
pub trait IntoFrequencies {
    fn frequency_vectors(&self) -> Vec<Vec<f64>>;
}

impl IntoFrequencies for FrequencySet {
    fn frequency_vectors(&self) -> Vec<Vec<f64>> {
        self.frequencies()
            .iter()
            .map(|f| f.iter().map(|&v| v as f64).collect())
            .collect()
    }
}

impl IntoFrequencies for SpectrumSlice {
    fn frequency_vectors(&self) -> Vec<Vec<f64>> {
        self.frequencies().iter().map(|&f| vec![f as f64]).collect()
    }
}

impl IntoFrequencies for [Vec<f64>] {
    fn frequency_vectors(&self) -> Vec<Vec<f64>> {
        self.to_vec()
    }
}

/// A measure whose inner products with exponentials are computable in closed
/// form; the two measure families that can verify a common spectrum.
#[derive(Debug, Clone)]
pub enum SpectralMeasure {
    Density(StepDensity),
    Atomic(AtomicMeasure),
}

impl SpectralMeasure {
    pub fn dim(&self) -> usize {
        match self {
            SpectralMeasure::Density(d) => d.dim(),
            SpectralMeasure::Atomic(a) => a.dim(),
        }
    }

    /// `μ̂(t)` dispatched to the closed form of the underlying family.
    pub fn fourier_transform(&self, t: &[f64]) -> Complex {
        match self {
            SpectralMeasure::Density(d) => d.fourier_transform(t),
            SpectralMeasure::Atomic(a) => a.fourier_transform(t),
        }
    }

    /// Checks that the listed frequencies index an orthonormal basis of the
    /// measure's `L²` space: densities must pass the integer-spectrum
    /// verdict (and the frequencies must be integers), atomic measures the
    /// exponential-matrix unitarity test.
    fn verify_spectrum(&self, frequencies: &[Vec<f64>]) -> Result<(), LocaltransError> {
        let as_integers = || -> Result<Vec<Vec<i64>>, LocaltransError> {
            frequencies
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|&v| {
                            if v.fract() == 0.0 {
                                Ok(v as i64)
                            } else {
                                Err(LocaltransError::NotVerifiedIsoSpectral(format!(
                                    "non-integer frequency {v} cannot index this spectrum"
                                )))
                            }
                        })
                        .collect()
                })
                .collect()
        };
        match self {
            SpectralMeasure::Density(d) => {
                as_integers()?;
                if d.integer_spectrum_verdict().is_complete() {
                    Ok(())
                } else {
                    Err(LocaltransError::NotVerifiedIsoSpectral(
                        "density is not Lebesgue on a set congruent to the unit cube".into(),
                    ))
                }
            }
            SpectralMeasure::Atomic(a) => {
                let freqs = FrequencySet::new(as_integers()?)
                    .map_err(|e| LocaltransError::NotVerifiedIsoSpectral(e.to_string()))?;
                match atomic::is_spectrum(a, &freqs, UNITARITY_TOL) {
                    Ok(true) => Ok(()),
                    Ok(false) => Err(LocaltransError::NotVerifiedIsoSpectral(
                        "exponential matrix is not unitary".into(),
                    )),
                    Err(e) => Err(LocaltransError::NotVerifiedIsoSpectral(e.to_string())),
                }
            }
        }
    }
}

/// Analyzes the exponential `e_t` against a finite spectrum slice:
/// coefficients `c_λ = ⟨e_t, e_λ⟩ = μ̂(t−λ)` in closed form.
pub fn analyze<F: IntoFrequencies + ?Sized>(
    measure: &SpectralMeasure,
    t: &[f64],
    spectrum: &F,
) -> SpectralExpansion {
    assert_eq!(t.len(), measure.dim(), "probe dimension must match measure");
    let frequencies = spectrum.frequency_vectors();
    let coefficients = frequencies
        .iter()
        .map(|lambda| {
            assert_eq!(
                lambda.len(),
                t.len(),
                "frequency dimension must match probe"
            );
            let diff: Vec<f64> = t.iter().zip(lambda).map(|(ti, li)| ti - li).collect();
            measure.fourier_transform(&diff)
        })
        .collect();
    SpectralExpansion {
        frequencies,
        coefficients,
    }
}

/// Local translation by `t`: multiplies the coefficient at `λ` by
/// `e^{2πi t·λ}`. Unitary and diagonal, hence exact on finite slices.
pub fn local_translate(t: &[f64], f: &SpectralExpansion) -> SpectralExpansion {
    let coefficients = f
        .frequencies
        .iter()
        .zip(&f.coefficients)
        .map(|(lambda, c)| {
            let phase: f64 = t.iter().zip(lambda).map(|(ti, li)| ti * li).sum();
            c * unit_exp_f64(phase)
        })
        .collect();
    SpectralExpansion {
        frequencies: f.frequencies.clone(),
        coefficients,
    }
}

/// The basis-exchanging map between two measures sharing the expansion's
/// spectrum: the identity on coefficient sequences, defined only after both
/// measures pass their spectrum check. Commutes with [`local_translate`].
pub fn intertwine(
    from: &SpectralMeasure,
    to: &SpectralMeasure,
    f: &SpectralExpansion,
) -> Result<SpectralExpansion, LocaltransError> {
    from.verify_spectrum(f.frequencies())?;
    to.verify_spectrum(f.frequencies())?;
    Ok(f.clone())
}
