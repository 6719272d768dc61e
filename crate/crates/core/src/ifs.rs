//! One-dimensional affine iterated function systems `τ_b(x) = (x+b)/R` with
//! integer digit sets, their invariant measures, and the combinatorics that
//! certifies a candidate frequency set as a spectrum.
//!
//! A dual digit set `L` forming a Hadamard pair with the system's digits
//! produces the candidate spectrum of all digit expansions
//! `Σ R^k l_k` ([`gamma_slice`]). The certification obstruction is the
//! existence of nontrivial extreme cycles: finite `L`-transition cycles of
//! points where the digit filter has full modulus. [`extreme_cycles`]
//! enumerates them exactly — the points with `|m_B| = 1` form the lattice of
//! multiples of the reciprocal gcd of digit differences, so the search is a
//! directed-cycle enumeration over finitely many rationals in the attractor
//! of the dual system.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactnum::{
    gcd_of_differences, rat, rat_int, unit_exp, unit_exp_f64, unitarity_defect, Complex, Rational,
    UNITARITY_TOL,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IfsError {
    #[error("scale must be at least 2, got {0}")]
    ScaleTooSmall(i64),
    #[error("need at least two digits, got {0}")]
    TooFewDigits(usize),
    #[error("duplicate digit {0}")]
    DuplicateDigit(i64),
    #[error("digit sets must have equal size: {digits} vs {dual}")]
    SizeMismatch { digits: usize, dual: usize },
    #[error("digit sets do not form a Hadamard pair")]
    NotHadamardPair,
    #[error("frequency overflow at depth {0}")]
    DepthOverflow(usize),
    #[error("candidate lattice has {0} points, above the search limit")]
    LatticeTooLarge(u128),
    #[error("spectrum slice would hold {0} frequencies, above the limit")]
    SliceTooLarge(u128),
    #[error("digit arithmetic overflowed")]
    ArithmeticOverflow,
}

/// Hard ceilings keeping degenerate digit sets from exhausting memory.
const MAX_LATTICE_POINTS: u128 = 100_000;
const MAX_SLICE_FREQUENCIES: u128 = 1 << 20;

/// Scale `R ≥ 2` and a finite set of distinct integer digits `B`; the maps
/// `τ_b(x) = (x+b)/R` generate the invariant measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineIfs {
    scale: i64,
    digits: Vec<i64>,
}

impl AffineIfs {
    pub fn new(scale: i64, digits: Vec<i64>) -> Result<Self, IfsError> {
        if scale < 2 {
            return Err(IfsError::ScaleTooSmall(scale));
        }
        if digits.len() < 2 {
            return Err(IfsError::TooFewDigits(digits.len()));
        }
        let mut digits = digits;
        digits.sort_unstable();
        for w in digits.windows(2) {
            if w[0] == w[1] {
                return Err(IfsError::DuplicateDigit(w[0]));
            }
        }
        Ok(AffineIfs { scale, digits })
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    /// Convex hull `[min B, max B]/(R−1)` of the attractor.
    pub fn attractor_hull(&self) -> (Rational, Rational) {
        attractor_hull(self.scale, &self.digits)
    }

    /// Truncated infinite-product transform `Π_{k=1}^{K} m_B(t/R^k)` of the
    /// invariant measure. Factors tend to one geometrically, so moderate `K`
    /// saturates double precision.
    pub fn fourier_transform(&self, t: f64, factors: usize) -> Complex {
        assert!(factors >= 1, "at least one product factor is required");
        let mut product = Complex::new(1.0, 0.0);
        let mut arg = t;
        for _ in 0..factors {
            arg /= self.scale as f64;
            product *= digit_filter(&self.digits, arg);
        }
        product
    }
}

/// Convex hull `[min digits, max digits]/(scale−1)` of the attractor of the
/// maps `x ↦ (x+digit)/scale`.
pub fn attractor_hull(scale: i64, digits: &[i64]) -> (Rational, Rational) {
    let lo = digits.iter().min().expect("nonempty digit set");
    let hi = digits.iter().max().expect("nonempty digit set");
    (rat(*lo, scale - 1), rat(*hi, scale - 1))
}

/// The digit filter `m_B(x) = (1/|B|) Σ_b e^{2πi b x}` at a real argument.
pub fn digit_filter(digits: &[i64], x: f64) -> Complex {
    digits
        .iter()
        .map(|&b| unit_exp_f64(b as f64 * x))
        .sum::<Complex>()
        / digits.len() as f64
}

/// The digit filter at an exact rational argument.
pub fn digit_filter_exact(digits: &[i64], x: &Rational) -> Complex {
    digits
        .iter()
        .map(|&b| unit_exp(&(x * rat_int(b))))
        .sum::<Complex>()
        / digits.len() as f64
}

/// True exactly when `|m_B(x)| = 1`: all unit terms must coincide, i.e.
/// every digit difference times `x` must be an integer.
pub fn digit_filter_has_full_modulus(digits: &[i64], x: &Rational) -> bool {
    let b0 = i128::from(digits[0]);
    digits.iter().all(|&b| {
        let diff = Rational::from_integer((i128::from(b) - b0).into());
        (x * diff).is_integer()
    })
}

/// Worst deviation from unitarity of the matrix `(1/√N)(e^{2πi b l / R})`.
pub fn hadamard_defect(ifs: &AffineIfs, dual: &[i64]) -> Result<f64, IfsError> {
    if dual.len() != ifs.digits().len() {
        return Err(IfsError::SizeMismatch {
            digits: ifs.digits().len(),
            dual: dual.len(),
        });
    }
    let mut sorted = dual.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(IfsError::DuplicateDigit(w[0]));
        }
    }
    let n = ifs.digits().len();
    let scale = (n as f64).sqrt().recip();
    let rows: Vec<Vec<Complex>> = ifs
        .digits()
        .iter()
        .map(|&b| {
            sorted
                .iter()
                .map(|&l| {
                    let phase =
                        Rational::new((i128::from(b) * i128::from(l)).into(), ifs.scale().into());
                    unit_exp(&phase) * scale
                })
                .collect()
        })
        .collect();
    Ok(unitarity_defect(&rows))
}

/// Whether `(B, L)` is a Hadamard pair for the system's scale.
pub fn is_hadamard_pair(ifs: &AffineIfs, dual: &[i64]) -> Result<bool, IfsError> {
    Ok(hadamard_defect(ifs, dual)? < UNITARITY_TOL)
}

/// A cycle of the dual maps `x ↦ (x+l)/R` along which the digit filter keeps
/// full modulus: `points[i+1] = (points[i] + digits[i])/R`, cyclically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub points: Vec<Rational>,
    pub digits: Vec<i64>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact validity: closure under the stated transitions and full modulus
    /// of the digit filter at every point.
    pub fn is_valid(&self, ifs: &AffineIfs, dual: &[i64]) -> bool {
        let p = self.points.len();
        if p == 0 || self.digits.len() != p {
            return false;
        }
        for i in 0..p {
            let l = self.digits[i];
            if !dual.contains(&l) {
                return false;
            }
            let next = (&self.points[i] + rat_int(l)) / rat_int(ifs.scale());
            if next != self.points[(i + 1) % p] {
                return false;
            }
            if !digit_filter_has_full_modulus(ifs.digits(), &self.points[i]) {
                return false;
            }
        }
        true
    }
}

/// Result of the exact extreme-cycle search: the full candidate lattice that
/// was traversed and every nontrivial cycle found in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSearch {
    pub candidates: Vec<Rational>,
    pub cycles: Vec<Cycle>,
}

/// Enumerates all nontrivial extreme cycles of a Hadamard system.
///
/// Candidates are exactly the multiples of `1/g` (`g` = gcd of pairwise digit
/// differences of `B`) inside the attractor hull of the dual maps; on these
/// points all exponential terms of the digit filter coincide, so
/// `|m_B| = 1` automatically. Edges follow `x ↦ (x+l)/R` when the image is
/// again a candidate, and every elementary directed cycle is returned except
/// the fixed point `{0}`. Cycles are normalized to start at their smallest
/// point and sorted.
pub fn extreme_cycles(ifs: &AffineIfs, dual: &[i64]) -> Result<CycleSearch, IfsError> {
    if !is_hadamard_pair(ifs, dual)? {
        return Err(IfsError::NotHadamardPair);
    }
    let g = gcd_of_differences(ifs.digits());
    debug_assert!(g >= 1, "distinct digits have a positive difference gcd");
    let g_rat = Rational::from_integer(g.into());
    let (lo, hi) = attractor_hull(ifs.scale(), dual);
    let k_lo = (lo * &g_rat).ceil().to_integer();
    let k_hi = (hi * &g_rat).floor().to_integer();
    let span = (&k_hi - &k_lo) + 1;
    if let Ok(points) = u128::try_from(&span) {
        if points > MAX_LATTICE_POINTS {
            return Err(IfsError::LatticeTooLarge(points));
        }
    }
    let mut ks: Vec<i128> = Vec::new();
    let mut k = k_lo.clone();
    while k <= k_hi {
        ks.push(i128::try_from(&k).map_err(|_| IfsError::ArithmeticOverflow)?);
        k += 1;
    }
    let candidates: Vec<Rational> = ks
        .iter()
        .map(|&k| Rational::new(k.into(), g.into()))
        .collect();

    // adjacency with the digit labelling each edge
    let index_of = |k: i128| ks.binary_search(&k).ok();
    let scale = i128::from(ifs.scale());
    let mut adjacency: Vec<Vec<(usize, i64)>> = Vec::with_capacity(ks.len());
    for &k in &ks {
        let mut out = Vec::new();
        for &l in dual {
            let num = i128::from(l)
                .checked_mul(g)
                .and_then(|lg| k.checked_add(lg))
                .ok_or(IfsError::ArithmeticOverflow)?;
            if num % scale == 0 {
                if let Some(j) = index_of(num / scale) {
                    out.push((j, l));
                }
            }
        }
        adjacency.push(out);
    }

    let mut cycles: Vec<Cycle> = elementary_cycles(&adjacency)
        .into_iter()
        .map(|path| {
            let points: Vec<Rational> = path.iter().map(|&i| candidates[i].clone()).collect();
            let digits: Vec<i64> = (0..path.len())
                .map(|i| {
                    let from = path[i];
                    let to = path[(i + 1) % path.len()];
                    adjacency[from]
                        .iter()
                        .find(|(j, _)| *j == to)
                        .map(|(_, l)| *l)
                        .expect("cycle edges come from the adjacency")
                })
                .collect();
            Cycle { points, digits }
        })
        .filter(|c| !(c.points.len() == 1 && c.points[0].is_zero()))
        .collect();
    cycles.sort_by(|a, b| a.points.cmp(&b.points));
    Ok(CycleSearch { candidates, cycles })
}

/// All elementary directed cycles, each reported once as the node path
/// starting from its smallest node.
fn elementary_cycles(adjacency: &[Vec<(usize, i64)>]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut cycles = Vec::new();
    let mut blocked = vec![false; n];
    let mut block_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for start in 0..n {
        for b in blocked.iter_mut() {
            *b = false;
        }
        for l in block_list.iter_mut() {
            l.clear();
        }
        let mut path = Vec::new();
        circuit(
            start,
            start,
            adjacency,
            &mut blocked,
            &mut block_list,
            &mut path,
            &mut cycles,
        );
    }
    cycles
}

fn circuit(
    v: usize,
    start: usize,
    adjacency: &[Vec<(usize, i64)>],
    blocked: &mut [bool],
    block_list: &mut [Vec<usize>],
    path: &mut Vec<usize>,
    cycles: &mut Vec<Vec<usize>>,
) -> bool {
    let mut found = false;
    blocked[v] = true;
    path.push(v);
    for &(w, _) in &adjacency[v] {
        if w < start {
            continue;
        }
        if w == start {
            cycles.push(path.clone());
            found = true;
        } else if !blocked[w] && circuit(w, start, adjacency, blocked, block_list, path, cycles) {
            found = true;
        }
    }
    if found {
        unblock(v, blocked, block_list);
    } else {
        for &(w, _) in &adjacency[v] {
            if w >= start && !block_list[w].contains(&v) {
                block_list[w].push(v);
            }
        }
    }
    path.pop();
    found
}

fn unblock(v: usize, blocked: &mut [bool], block_list: &mut [Vec<usize>]) {
    blocked[v] = false;
    let waiting = std::mem::take(&mut block_list[v]);
    for w in waiting {
        if blocked[w] {
            unblock(w, blocked, block_list);
        }
    }
}

/// Finite slice of the candidate spectrum: all depth-`n` digit expansions
/// `Σ_{k<n} R^k l_k`, deduplicated and ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumSlice {
    scale: i64,
    digits: Vec<i64>,
    depth: usize,
    frequencies: Vec<i64>,
}

impl SpectrumSlice {
    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn dual_digits(&self) -> &[i64] {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn frequencies(&self) -> &[i64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

/// Builds the depth-`n` spectrum slice for the dual digit set.
pub fn gamma_slice(scale: i64, dual: &[i64], depth: usize) -> Result<SpectrumSlice, IfsError> {
    let mut digits = dual.to_vec();
    digits.sort_unstable();
    digits.dedup();
    let words = (digits.len() as u128).checked_pow(depth.min(128) as u32);
    match words {
        Some(w) if w <= MAX_SLICE_FREQUENCIES => {}
        _ => return Err(IfsError::SliceTooLarge(words.unwrap_or(u128::MAX))),
    }
    let mut frequencies: Vec<i64> = vec![0];
    let mut power: i64 = 1;
    for level in 0..depth {
        if level > 0 {
            power = power
                .checked_mul(scale)
                .ok_or(IfsError::DepthOverflow(depth))?;
        }
        let mut next = Vec::with_capacity(frequencies.len() * digits.len());
        for &f in &frequencies {
            for &l in &digits {
                let term = l.checked_mul(power).ok_or(IfsError::DepthOverflow(depth))?;
                next.push(f.checked_add(term).ok_or(IfsError::DepthOverflow(depth))?);
            }
        }
        next.sort_unstable();
        next.dedup();
        frequencies = next;
    }
    Ok(SpectrumSlice {
        scale,
        digits,
        depth,
        frequencies,
    })
}

/// Truncated spectral sum `Σ_{λ∈Γ_n} |μ̂(t−λ)|²` of the system against a
/// spectrum slice.
///
/// Bounded by one when the exponentials indexed by the full spectrum are
/// orthonormal, nondecreasing in the slice depth, and converging to one when
/// the slice exhausts a genuine spectrum.
pub fn spectral_sum(ifs: &AffineIfs, slice: &SpectrumSlice, t: f64, factors: usize) -> f64 {
    slice
        .frequencies()
        .iter()
        .map(|&lambda| ifs.fourier_transform(t - lambda as f64, factors).norm_sqr())
        .sum()
}

/// Union of the depth-`n` images `τ_w(hull)` over all digit words `w`,
/// merged into maximal disjoint closed intervals. The invariant measure is
/// supported inside every such cover, and covers are nested in the depth.
pub fn support_cover(ifs: &AffineIfs, depth: usize) -> Vec<(Rational, Rational)> {
    let mut cover = vec![ifs.attractor_hull()];
    let scale = rat_int(ifs.scale());
    for _ in 0..depth {
        let mut next: Vec<(Rational, Rational)> = Vec::new();
        for &b in ifs.digits() {
            let b = rat_int(b);
            for (lo, hi) in &cover {
                next.push(((lo + &b) / &scale, (hi + &b) / &scale));
            }
        }
        cover = merge_closed_intervals(next);
    }
    cover
}

fn merge_closed_intervals(mut intervals: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    intervals.sort();
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(intervals.len());
    for (lo, hi) in intervals {
        match out.last_mut() {
            Some((_, prev_hi)) if lo <= *prev_hi => {
                if hi > *prev_hi {
                    *prev_hi = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// A support-based witness that the second system's measure cannot be a
/// piecewise integer translate of the first's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportCertificate {
    /// Fixed point `b/(R−1)` of one of the second system's maps; the measure
    /// has positive mass in every neighbourhood of it.
    pub point: Rational,
    /// Exact distance mod 1 from that point to the first system's cover.
    pub distance: Rational,
}

/// Searches the fixed points of the second system's maps for one whose class
/// mod 1 keeps a positive distance to the depth-`n` support cover of the
/// first system. A returned certificate is sound; absence of one proves
/// nothing.
pub fn non_equivalence_certificate(
    first: &AffineIfs,
    second: &AffineIfs,
    depth: usize,
) -> Option<SupportCertificate> {
    let folded = fold_cover_mod_one(&support_cover(first, depth));
    for &b in second.digits() {
        let point = rat(b, second.scale() - 1);
        let x = &point - point.floor();
        let distance = folded
            .iter()
            .map(|iv| circle_distance(&x, iv))
            .min()
            .unwrap_or_else(Rational::one);
        if distance.is_positive() {
            return Some(SupportCertificate { point, distance });
        }
    }
    None
}

/// Folds closed intervals into `[0,1]` modulo 1, merging the pieces.
fn fold_cover_mod_one(intervals: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let whole = (Rational::zero(), Rational::one());
    let mut pieces = Vec::new();
    for (lo, hi) in intervals {
        if hi - lo >= Rational::one() {
            return vec![whole];
        }
        let base = lo.floor();
        let a = lo - &base;
        let b = hi - &base;
        if b <= Rational::one() {
            pieces.push((a, b));
        } else {
            pieces.push((a, Rational::one()));
            pieces.push((Rational::zero(), b - Rational::one()));
        }
    }
    merge_closed_intervals(pieces)
}

/// Distance on the circle from a point of `[0,1)` to a closed subinterval of
/// `[0,1]`.
fn circle_distance(x: &Rational, (lo, hi): &(Rational, Rational)) -> Rational {
    if lo <= x && x <= hi {
        return Rational::zero();
    }
    let d = |y: &Rational| {
        let straight = (x - y).abs();
        let wrapped = Rational::one() - &straight;
        straight.min(wrapped)
    };
    d(lo).min(d(hi))
}
