//! Seeded random generators for congruence partitions and step densities.
//!
//! Every generator takes the RNG by argument so the CLI and the test suites
//! control determinism: a fixed seed reproduces the same family byte for
//! byte.

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;

use crate::density::{CongruencePartition, StepDensity};
use crate::exactnum::{rat, rat_int, Rational, RationalBox};

/// Random congruence partition of the unit interval: `pieces` half-open
/// subintervals with rational breakpoints (denominators up to
/// `max_denominator`) carrying integer shifts in `[-max_shift, max_shift]`.
pub fn random_congruence_partition(
    rng: &mut impl Rng,
    pieces: usize,
    max_denominator: u64,
    max_shift: i64,
) -> CongruencePartition {
    assert!(pieces >= 1, "a partition needs at least one piece");
    assert!(max_denominator >= 2);
    let mut breakpoints: Vec<Rational> = Vec::new();
    while breakpoints.len() < pieces - 1 {
        let q = rng.gen_range(2..=max_denominator) as i64;
        let p = rng.gen_range(1..q);
        let b = rat(p, q);
        if !breakpoints.contains(&b) {
            breakpoints.push(b);
        }
    }
    breakpoints.sort();
    breakpoints.insert(0, rat_int(0));
    breakpoints.push(rat_int(1));

    // Group intervals by shift; the partition type wants one piece per shift.
    let mut by_shift: std::collections::BTreeMap<Vec<BigInt>, Vec<RationalBox>> =
        std::collections::BTreeMap::new();
    for w in breakpoints.windows(2) {
        let shift = vec![BigInt::from(rng.gen_range(-max_shift..=max_shift))];
        by_shift
            .entry(shift)
            .or_default()
            .push(RationalBox::interval(w[0].clone(), w[1].clone()).expect("increasing breaks"));
    }
    CongruencePartition::new(by_shift.into_iter().collect())
        .expect("random splits of the interval form a partition")
}

/// Random residue breakpoints for one dimension: `0` plus up to `extra`
/// distinct rationals in `(0,1)`.
fn random_breaks(rng: &mut impl Rng, extra: usize, max_denominator: u64) -> Vec<Rational> {
    let mut breaks = vec![rat_int(0)];
    for _ in 0..extra {
        let q = rng.gen_range(2..=max_denominator) as i64;
        let p = rng.gen_range(1..q);
        let b = rat(p, q);
        if !breaks.contains(&b) {
            breaks.push(b);
        }
    }
    breaks.sort();
    breaks
}

/// Random gridded probability density satisfying the translate-sum identity
/// by construction: over every residue cell the chosen translates carry
/// exact weights summing to one.
///
/// Cell shifts are drawn from `[-4, 3]`, so the support stays inside
/// `[-4, 4]^dim`.
pub fn random_unity_density(rng: &mut impl Rng, dim: usize, max_denominator: u64) -> StepDensity {
    let breaks: Vec<Vec<Rational>> = (0..dim)
        .map(|_| {
            let extra = rng.gen_range(0..=2);
            random_breaks(rng, extra, max_denominator)
        })
        .collect();
    let mut cells: Vec<(RationalBox, Rational)> = Vec::new();
    for idx in crate::density::MultiIndex::new(&breaks.iter().map(Vec::len).collect::<Vec<_>>()) {
        let cell = residue_cell(&breaks, &idx);
        let translates = rng.gen_range(1..=3usize);
        let mut shifts: Vec<Vec<BigInt>> = Vec::new();
        while shifts.len() < translates {
            let s: Vec<BigInt> = (0..dim)
                .map(|_| BigInt::from(rng.gen_range(-4i64..=3)))
                .collect();
            if !shifts.contains(&s) {
                shifts.push(s);
            }
        }
        for (shift, weight) in shifts
            .iter()
            .zip(random_weights(rng, translates, max_denominator))
        {
            cells.push((cell.translated(shift), weight));
        }
    }
    StepDensity::new(cells).expect("unit fiber weights integrate to one")
}

/// Random gridded probability density with no structural constraint beyond
/// mass one; generically fails the translate-sum identity.
pub fn random_generic_density(rng: &mut impl Rng, dim: usize, max_denominator: u64) -> StepDensity {
    let breaks: Vec<Vec<Rational>> = (0..dim)
        .map(|_| {
            let extra = rng.gen_range(0..=2);
            random_breaks(rng, extra, max_denominator)
        })
        .collect();
    let mut cells: Vec<(RationalBox, Rational)> = Vec::new();
    for idx in crate::density::MultiIndex::new(&breaks.iter().map(Vec::len).collect::<Vec<_>>()) {
        let cell = residue_cell(&breaks, &idx);
        // Skip some cells entirely, put 1..=2 translates elsewhere.
        if rng.gen_bool(0.3) {
            continue;
        }
        let translates = rng.gen_range(1..=2usize);
        let mut shifts: Vec<Vec<BigInt>> = Vec::new();
        while shifts.len() < translates {
            let s: Vec<BigInt> = (0..dim)
                .map(|_| BigInt::from(rng.gen_range(-4i64..=3)))
                .collect();
            if !shifts.contains(&s) {
                shifts.push(s);
            }
        }
        for shift in &shifts {
            let q = rng.gen_range(2..=max_denominator) as i64;
            let p = rng.gen_range(1..=2 * q);
            cells.push((cell.translated(shift), rat(p, q)));
        }
    }
    if cells.is_empty() {
        return StepDensity::unit_cube_indicator(dim);
    }
    let density = StepDensity::unnormalized(cells).expect("disjoint translated cells");
    let mass = density.total_mass();
    let normalized = density
        .cells()
        .iter()
        .map(|(bx, v)| (bx.clone(), v / &mass))
        .collect();
    StepDensity::new(normalized).expect("normalized cells integrate to one")
}

fn residue_cell(breaks: &[Vec<Rational>], idx: &[usize]) -> RationalBox {
    RationalBox::new(
        idx.iter()
            .enumerate()
            .map(|(i, &j)| {
                let lo = breaks[i][j].clone();
                let hi = breaks[i].get(j + 1).cloned().unwrap_or_else(Rational::one);
                (lo, hi)
            })
            .collect(),
    )
    .expect("breaks are strictly increasing")
}

/// `count` positive rational weights summing exactly to one, denominators
/// bounded by `max_denominator`.
fn random_weights(rng: &mut impl Rng, count: usize, max_denominator: u64) -> Vec<Rational> {
    let total = rng.gen_range(count as i64..=max_denominator.max(count as u64) as i64);
    // Composition of `total` into `count` positive parts.
    let mut parts = vec![1i64; count];
    let mut remaining = total - count as i64;
    for part in parts.iter_mut().take(count - 1) {
        let extra = rng.gen_range(0..=remaining);
        *part += extra;
        remaining -= extra;
    }
    parts[count - 1] += remaining;
    parts.into_iter().map(|p| rat(p, total)).collect()
}
