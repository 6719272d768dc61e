//! Exact rational scalars, roots of unity and closed-form integrals of
//! complex exponentials over rational intervals.
//!
//! Every set-theoretic decision in this crate (congruence, cycle search,
//! partition checks) routes through [`Rational`] arithmetic and stays exact;
//! floating point enters only through [`Complex`] values of transforms, so a
//! tight tolerance suffices everywhere floats are compared.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Double-precision complex value.
pub type Complex = num_complex::Complex64;

/// Default tolerance for unitarity defects: matrices of genuine spectra
/// produce defects at machine-precision level, failures sit many orders of
/// magnitude higher.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumError {
    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),
    #[error("zero denominator in rational literal {0:?}")]
    ZeroDenominator(String),
    #[error("empty interval: lower bound {lo} must be below upper bound {hi}")]
    EmptyInterval {
        lo: Box<Rational>,
        hi: Box<Rational>,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// `p/q` as a reduced rational.
///
/// Panics if `q == 0`; use [`parse_rational`] for untrusted input.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer `n` as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` (arbitrary-precision literals) into a rational.
pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let s = s.trim();
    let bad = || NumError::InvalidRational(s.to_string());
    match s.split_once('/') {
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
        Some((ps, qs)) => {
            let p: BigInt = ps.trim().parse().map_err(|_| bad())?;
            let q: BigInt = qs.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(NumError::ZeroDenominator(s.to_string()));
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Nearest `f64` to a rational.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().expect("finite rational fits in f64 range")
}

/// Fractional part `q - floor(q)`, in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// Evaluates `e^{2πiq}` on the unit circle.
///
/// The argument is reduced mod 1 before evaluation, and quarter-turn inputs
/// (denominator dividing 4) produce exact `±1`, `±i`.
pub fn unit_exp(q: &Rational) -> Complex {
    let f = frac(q);
    let four_f = &f * rat_int(4);
    if four_f.is_integer() {
        return match four_f.to_integer().to_u8() {
            Some(0) => Complex::new(1.0, 0.0),
            Some(1) => Complex::new(0.0, 1.0),
            Some(2) => Complex::new(-1.0, 0.0),
            Some(3) => Complex::new(0.0, -1.0),
            _ => unreachable!("reduced fraction lies in [0,1)"),
        };
    }
    let theta = TAU * to_f64(&f);
    Complex::new(theta.cos(), theta.sin())
}

/// `e^{2πit}` for a real argument; quarter-turn arguments representable as
/// exact floats produce exact `±1`, `±i`, matching [`unit_exp`].
pub fn unit_exp_f64(t: f64) -> Complex {
    let quarters = 4.0 * t;
    if quarters.fract() == 0.0 && quarters.abs() < 9.0e15 {
        return match quarters.rem_euclid(4.0) as u8 {
            0 => Complex::new(1.0, 0.0),
            1 => Complex::new(0.0, 1.0),
            2 => Complex::new(-1.0, 0.0),
            _ => Complex::new(0.0, -1.0),
        };
    }
    let theta = TAU * t;
    Complex::new(theta.cos(), theta.sin())
}

/// `sin(z)/z`, switching to the 4-term Taylor expansion near the removable
/// singularity so small phase spreads never divide by a tiny `z`.
fn sinc(z: f64) -> f64 {
    if z.abs() < PI * 1e-6 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0
    } else {
        z.sin() / z
    }
}

/// `∫_a^b e^{2πitx} dx` in closed form.
///
/// Evaluated as `(b−a)·e^{2πit(a+b)/2}·sinc(πt(b−a))`, which equals the
/// antiderivative difference `(e^{2πitb} − e^{2πita})/(2πit)` for `t ≠ 0` and
/// extends continuously to `b−a` at `t = 0`.
pub fn interval_exp_integral(a: &Rational, b: &Rational, t: f64) -> Complex {
    debug_assert!(a < b, "interval must be nonempty");
    let len = to_f64(&(b - a));
    if t == 0.0 {
        return Complex::new(len, 0.0);
    }
    let mid = to_f64(&((a + b) / rat_int(2)));
    let modulus = len * sinc(PI * t * len);
    unit_exp_f64(t * mid) * modulus
}

/// Axis-aligned box `∏ [a_i, b_i)` with rational endpoints, nonempty in every
/// dimension.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalBox {
    intervals: Vec<(Rational, Rational)>,
}

impl RationalBox {
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Self, NumError> {
        for (lo, hi) in &intervals {
            if lo >= hi {
                return Err(NumError::EmptyInterval {
                    lo: Box::new(lo.clone()),
                    hi: Box::new(hi.clone()),
                });
            }
        }
        Ok(RationalBox { intervals })
    }

    /// 1-D interval `[lo, hi)`.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self, NumError> {
        Self::new(vec![(lo, hi)])
    }

    /// The unit cube `[0,1)^d`.
    pub fn unit_cube(dim: usize) -> Self {
        RationalBox {
            intervals: vec![(rat_int(0), rat_int(1)); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn volume(&self) -> Rational {
        self.intervals.iter().map(|(lo, hi)| hi - lo).product()
    }

    /// Componentwise integer translate `box + k`.
    pub fn translated(&self, shift: &[BigInt]) -> Self {
        assert_eq!(shift.len(), self.dim());
        RationalBox {
            intervals: self
                .intervals
                .iter()
                .zip(shift)
                .map(|((lo, hi), k)| {
                    let k = Rational::from_integer(k.clone());
                    (lo + &k, hi + &k)
                })
                .collect(),
        }
    }

    /// Intersection, or `None` when the overlap has measure zero.
    pub fn intersect(&self, other: &RationalBox) -> Option<RationalBox> {
        if self.dim() != other.dim() {
            return None;
        }
        let mut out = Vec::with_capacity(self.dim());
        for ((alo, ahi), (blo, bhi)) in self.intervals.iter().zip(&other.intervals) {
            let lo = alo.max(blo).clone();
            let hi = ahi.min(bhi).clone();
            if lo >= hi {
                return None;
            }
            out.push((lo, hi));
        }
        Some(RationalBox { intervals: out })
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        point.len() == self.dim()
            && self
                .intervals
                .iter()
                .zip(point)
                .all(|((lo, hi), x)| lo <= x && x < hi)
    }

    /// True when every point of `self` lies in `other`.
    pub fn subset_of(&self, other: &RationalBox) -> bool {
        self.dim() == other.dim()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|((alo, ahi), (blo, bhi))| blo <= alo && ahi <= bhi)
    }
}

impl fmt::Display for RationalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, "×")?;
            }
            write!(f, "[{lo},{hi})")?;
        }
        Ok(())
    }
}

/// `∫_box e^{2πi t·x} dx` as a product of per-dimension interval integrals.
pub fn box_exp_integral(bx: &RationalBox, t: &[f64]) -> Complex {
    assert_eq!(t.len(), bx.dim(), "frequency dimension must match box");
    bx.intervals()
        .iter()
        .zip(t)
        .map(|((lo, hi), ti)| interval_exp_integral(lo, hi, *ti))
        .product()
}

/// Maximum absolute entry of `M*M − I` for a square complex matrix given by
/// rows; zero exactly when the matrix is unitary.
pub fn unitarity_defect(rows: &[Vec<Complex>]) -> f64 {
    let n = rows.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            // entry (i, j) of M* M = sum_k conj(M[k][i]) M[k][j]
            let mut s = Complex::new(0.0, 0.0);
            for row in rows {
                s += row[i].conj() * row[j];
            }
            let target = if i == j {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// Greatest common divisor of all pairwise differences of a set of integers.
pub fn gcd_of_differences(values: &[i64]) -> i128 {
    let mut g: i128 = 0;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let diff = i128::from(values[j]) - i128::from(values[i]);
            g = num_integer::gcd(g, diff.abs());
        }
    }
    g
}

/// True when both components are within `tol` of the target.
pub fn complex_close(a: Complex, b: Complex, tol: f64) -> bool {
    (a.re - b.re).abs() <= tol && (a.im - b.im).abs() <= tol
}
