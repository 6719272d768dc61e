//! Shared test machinery: a naive brute-force extreme-cycle enumerator kept
//! deliberately independent of the library's graph search, and an exhaustive
//! generator of small Hadamard systems.

use num_traits::Zero;

use spectrapair_core::exactnum::{rat, rat_int, Rational};
use spectrapair_core::ifs::{digit_filter_exact, is_hadamard_pair, AffineIfs};

/// Gcd of all pairwise digit differences, computed from scratch.
fn difference_gcd(digits: &[i64]) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let mut g = 0;
    for i in 0..digits.len() {
        for j in (i + 1)..digits.len() {
            g = gcd(g, digits[j] - digits[i]);
        }
    }
    g
}

/// A cycle as the naive enumerator reports it: points anchored at the
/// smallest one, with the transition digits.
pub type NaiveCycle = (Vec<Rational>, Vec<i64>);

/// Brute-force extreme-cycle search.
///
/// Enumerates every rational with denominator dividing the difference gcd
/// inside the closed attractor hull of the dual maps, verifies the
/// full-modulus property numerically at each, checks by sampling that no
/// refined off-lattice point comes close to full modulus, and then finds all
/// cycles by raw backtracking over digit words up to the candidate count.
pub fn naive_extreme_cycles(scale: i64, digits: &[i64], dual: &[i64]) -> Vec<NaiveCycle> {
    let g = difference_gcd(digits);
    assert!(g >= 1);
    let lo = rat(*dual.iter().min().unwrap(), scale - 1);
    let hi = rat(*dual.iter().max().unwrap(), scale - 1);

    // Candidate lattice, with a numerical check of the full-modulus claim.
    let mut candidates: Vec<Rational> = Vec::new();
    let k_lo = (lo.clone() * rat_int(g)).ceil().to_integer();
    let k_hi = (hi.clone() * rat_int(g)).floor().to_integer();
    let mut k = k_lo;
    while k <= k_hi {
        let x = Rational::new(k.clone(), g.into());
        assert!(
            (digit_filter_exact(digits, &x).norm() - 1.0).abs() < 1e-12,
            "lattice point {x} must have full modulus"
        );
        candidates.push(x);
        k += 1;
    }

    // Off-lattice refinement: strictly smaller modulus everywhere sampled.
    for h in [2i64, 3, 5] {
        let m_lo = (lo.clone() * rat_int(g * h)).ceil().to_integer();
        let m_hi = (hi.clone() * rat_int(g * h)).floor().to_integer();
        let mut m = m_lo;
        while m <= m_hi {
            if (&m % h) != 0.into() {
                let x = Rational::new(m.clone(), (g * h).into());
                let modulus = digit_filter_exact(digits, &x).norm();
                assert!(
                    modulus < 0.999,
                    "off-lattice point {x} has near-full modulus {modulus}"
                );
            }
            m += 1;
        }
    }

    // Raw backtracking over digit words, cycles anchored at their smallest
    // point (index `start`), nodes visited at most once.
    let n = candidates.len();
    let mut cycles: Vec<NaiveCycle> = Vec::new();
    for start in 0..n {
        let mut visited = vec![false; n];
        visited[start] = true;
        let mut node_path = vec![start];
        let mut digit_path: Vec<i64> = Vec::new();
        backtrack(
            scale,
            dual,
            &candidates,
            start,
            start,
            &mut visited,
            &mut node_path,
            &mut digit_path,
            &mut cycles,
        );
    }
    cycles.retain(|(points, _)| !(points.len() == 1 && points[0].is_zero()));
    cycles.sort();
    cycles
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    scale: i64,
    dual: &[i64],
    candidates: &[Rational],
    current: usize,
    start: usize,
    visited: &mut Vec<bool>,
    node_path: &mut Vec<usize>,
    digit_path: &mut Vec<i64>,
    cycles: &mut Vec<NaiveCycle>,
) {
    for &l in dual {
        let image = (&candidates[current] + rat_int(l)) / rat_int(scale);
        let Some(next) = candidates.iter().position(|c| *c == image) else {
            continue;
        };
        if next == start {
            let points = node_path.iter().map(|&i| candidates[i].clone()).collect();
            let mut digits = digit_path.clone();
            digits.push(l);
            cycles.push((points, digits));
            continue;
        }
        if next < start || visited[next] {
            continue;
        }
        visited[next] = true;
        node_path.push(next);
        digit_path.push(l);
        backtrack(
            scale, dual, candidates, next, start, visited, node_path, digit_path, cycles,
        );
        digit_path.pop();
        node_path.pop();
        visited[next] = false;
    }
}

/// All size-`k` subsets of a pool, ascending.
fn subsets(pool: &[i64], k: usize) -> Vec<Vec<i64>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &first) in pool.iter().enumerate() {
        for mut rest in subsets(&pool[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every Hadamard system with scale in `scales`, digits from `digit_pool`,
/// dual digits from `dual_pool` and matching sizes in `sizes`.
pub fn hadamard_systems(
    scales: &[i64],
    digit_pool: &[i64],
    dual_pool: &[i64],
    sizes: &[usize],
) -> Vec<(AffineIfs, Vec<i64>)> {
    let mut out = Vec::new();
    for &scale in scales {
        for &size in sizes {
            for b in subsets(digit_pool, size) {
                let Ok(ifs) = AffineIfs::new(scale, b) else {
                    continue;
                };
                for l in subsets(dual_pool, size) {
                    if is_hadamard_pair(&ifs, &l).unwrap() {
                        out.push((ifs.clone(), l));
                    }
                }
            }
        }
    }
    out
}
