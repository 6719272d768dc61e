//! Properties of atomic spectra: translation invariance of the unitarity
//! test, orthogonality as vanishing of the transform at frequency
//! differences, and the equivalence-relation laws of atom-set equivalence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectrapair_core::atomic::{
    is_spectrum, translation_equivalent, AtomicMeasure, FrequencySet, UNITARITY_TOL,
};
use spectrapair_core::exactnum::{rat, Rational};

fn random_measure(rng: &mut impl Rng, n: usize) -> AtomicMeasure {
    loop {
        let mut atoms: Vec<Rational> = Vec::new();
        while atoms.len() < n {
            let q = rng.gen_range(1..=12i64);
            let p = rng.gen_range(-4 * q..=4 * q);
            let a = rat(p, q);
            if !atoms.contains(&a) {
                atoms.push(a);
            }
        }
        if let Ok(m) = AtomicMeasure::from_scalars(atoms) {
            return m;
        }
    }
}

fn random_residue_spectrum(rng: &mut impl Rng, n: usize) -> AtomicMeasure {
    let mut residues: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        residues.swap(i, rng.gen_range(0..=i));
    }
    AtomicMeasure::from_scalars(
        residues
            .iter()
            .map(|&r| rat((r + n * rng.gen_range(0..=4usize)) as i64, n as i64))
            .collect(),
    )
    .unwrap()
}

#[test]
fn spectrum_test_depends_only_on_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    for _ in 0..50 {
        let n = rng.gen_range(2..=8usize);
        let measure = if rng.gen_bool(0.5) {
            random_residue_spectrum(&mut rng, n)
        } else {
            random_measure(&mut rng, n)
        };
        let gamma = FrequencySet::range(n);
        let before = is_spectrum(&measure, &gamma, UNITARITY_TOL).unwrap();
        let q = rng.gen_range(1..=10i64);
        let p = rng.gen_range(-3 * q..=3 * q);
        let shifted = measure.translated(&[rat(p, q)]);
        let after = is_spectrum(&shifted, &gamma, UNITARITY_TOL).unwrap();
        assert_eq!(
            before, after,
            "shift by {p}/{q} must not change the verdict"
        );
    }
}

#[test]
fn spectra_kill_the_transform_at_frequency_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(302);
    for _ in 0..30 {
        let n = rng.gen_range(2..=10usize);
        let measure = random_residue_spectrum(&mut rng, n);
        let gamma = FrequencySet::range(n);
        assert!(is_spectrum(&measure, &gamma, UNITARITY_TOL).unwrap());
        for li in gamma.frequencies() {
            for lj in gamma.frequencies() {
                if li != lj {
                    let t = (li[0] - lj[0]) as f64;
                    let v = measure.fourier_transform(&[t]).norm();
                    assert!(
                        v < 1e-10,
                        "transform must vanish at difference {t}, got {v}"
                    );
                }
            }
        }
    }
}

#[test]
fn equivalence_is_an_equivalence_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..40 {
        let n = rng.gen_range(2..=6usize);
        let a = random_measure(&mut rng, n);

        // Reflexive.
        assert!(translation_equivalent(&a, &a).is_some());

        // Symmetric: compare against an integer-translated rearrangement.
        let mut moved: Vec<Rational> = a
            .points()
            .iter()
            .map(|p| &p[0] + rat(rng.gen_range(-5i64..=5), 1))
            .collect();
        moved.sort();
        moved.dedup();
        if moved.len() == n {
            let b = AtomicMeasure::from_scalars(moved).unwrap();
            assert_eq!(
                translation_equivalent(&a, &b).is_some(),
                translation_equivalent(&b, &a).is_some()
            );

            // Transitive through a second rearrangement.
            let mut third: Vec<Rational> = b
                .points()
                .iter()
                .map(|p| &p[0] + rat(rng.gen_range(-5i64..=5), 1))
                .collect();
            third.sort();
            third.dedup();
            if third.len() == n {
                let c = AtomicMeasure::from_scalars(third).unwrap();
                if translation_equivalent(&a, &b).is_some()
                    && translation_equivalent(&b, &c).is_some()
                {
                    assert!(translation_equivalent(&a, &c).is_some());
                }
            }
        }

        // Unrelated fractional parts are never equivalent.
        let disjoint =
            AtomicMeasure::from_scalars((0..n).map(|k| rat(1, (k + 7) as i64)).collect()).unwrap();
        if a.points()
            .iter()
            .map(|p| &p[0])
            .ne(disjoint.points().iter().map(|p| &p[0]))
        {
            let forward = translation_equivalent(&a, &disjoint).is_some();
            let backward = translation_equivalent(&disjoint, &a).is_some();
            assert_eq!(forward, backward);
        }
    }
}
