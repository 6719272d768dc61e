//! Theorem-level properties of the density module, exercised on seeded
//! random families: orthonormality ⟺ translate-sum identity, Parseval sums
//! and their truncated frequency-side route, spectrum transport along
//! translation equivalence, and the partition round trip.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectrapair_core::density::{check_translation_congruent, translation_equivalent, StepDensity};
use spectrapair_core::exactnum::{rat, rat_int, Rational, RationalBox};
use spectrapair_core::sampling::{
    random_congruence_partition, random_generic_density, random_unity_density,
};

fn weighted_two_cell() -> StepDensity {
    StepDensity::new(vec![
        (
            RationalBox::interval(rat_int(0), rat_int(1)).unwrap(),
            rat(2, 3),
        ),
        (
            RationalBox::interval(rat_int(1), rat_int(2)).unwrap(),
            rat(1, 3),
        ),
    ])
    .unwrap()
}

/// Moment test at infinity-norm radius `max_norm`: all nonzero integer
/// moments vanish and the zeroth is one, within `tol`.
fn moments_look_orthonormal(d: &StepDensity, max_norm: i64, tol: f64) -> bool {
    match d.dim() {
        1 => {
            for n in -max_norm..=max_norm {
                let m = d.moment(&[n]);
                let target = if n == 0 { 1.0 } else { 0.0 };
                if (m.re - target).abs() >= tol || m.im.abs() >= tol {
                    return false;
                }
            }
        }
        2 => {
            for n0 in -max_norm..=max_norm {
                for n1 in -max_norm..=max_norm {
                    let m = d.moment(&[n0, n1]);
                    let target = if n0 == 0 && n1 == 0 { 1.0 } else { 0.0 };
                    if (m.re - target).abs() >= tol || m.im.abs() >= tol {
                        return false;
                    }
                }
            }
        }
        other => panic!("unexpected dimension {other}"),
    }
    true
}

#[test]
fn orthonormality_matches_moment_test_on_random_densities() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for round in 0..40 {
        let dim = if round % 4 == 3 { 2 } else { 1 };
        let d = if round % 2 == 0 {
            random_unity_density(&mut rng, dim, 32)
        } else {
            random_generic_density(&mut rng, dim, 32)
        };
        let unity = d.verify_partition_of_unity().holds();
        let moments = moments_look_orthonormal(&d, 10, 1e-10);
        assert_eq!(unity, moments, "round {round}: {d}");
    }
}

#[test]
fn twisted_periodization_is_bounded_by_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..20 {
        let d = random_unity_density(&mut rng, 1, 32);
        for _ in 0..10 {
            let t = rng.gen_range(-5.0..5.0);
            let q = rng.gen_range(1..64i64);
            let p = rng.gen_range(0..q);
            let x = vec![rat(p, q)];
            let f = d.twisted_periodization(&[t], &x).unwrap();
            assert!(f.norm() <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn parseval_sum_is_one_on_congruent_indicators() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..10 {
        let pieces = rng.gen_range(1..=6);
        let p = random_congruence_partition(&mut rng, pieces, 64, 8);
        let d = p.indicator_density();
        for _ in 0..20 {
            let t = rng.gen_range(-10.0..10.0);
            let c = d.parseval_sum(&[t]).unwrap();
            assert!((c - 1.0).abs() < 1e-10, "c_phi({t}) = {c}");
        }
    }
}

#[test]
fn parseval_sum_stays_in_unit_band() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..20 {
        let d = random_unity_density(&mut rng, 1, 32);
        for _ in 0..10 {
            let t = rng.gen_range(-5.0..5.0);
            let c = d.parseval_sum(&[t]).unwrap();
            assert!((-1e-12..=1.0 + 1e-9).contains(&c), "c_phi({t}) = {c}");
        }
    }
}

#[test]
fn truncated_route_is_monotone_and_converges() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..8 {
        let d = random_unity_density(&mut rng, 1, 16);
        let t = rng.gen_range(-2.0..2.0);
        let exact = d.parseval_sum(&[t]).unwrap();
        let mut prev = -1.0;
        for max_norm in [0u32, 2, 10, 50, 200] {
            let partial = d.parseval_sum_partial(&[t], max_norm);
            assert!(
                partial + 1e-10 >= prev,
                "partial sums must be nondecreasing"
            );
            prev = partial;
        }
        assert!(
            (prev - exact).abs() < 1e-3,
            "expected convergence to {exact}, stalled at {prev}"
        );
    }
}

#[test]
fn equivalence_transports_the_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..10 {
        let n1 = rng.gen_range(1..=5);
        let n2 = rng.gen_range(1..=5);
        let p1 = random_congruence_partition(&mut rng, n1, 64, 8);
        let p2 = random_congruence_partition(&mut rng, n2, 64, 8);
        let d1 = p1.indicator_density();
        let d2 = p2.indicator_density();
        // Any two members of the congruence family are translation
        // equivalent, and completeness transports across the equivalence.
        assert!(translation_equivalent(&d1, &d2).is_some());
        assert!(d1.integer_spectrum_verdict().is_complete());
        assert!(d2.integer_spectrum_verdict().is_complete());
    }

    // A genuine weighted density is not equivalent to the cube indicator.
    let q = StepDensity::unit_cube_indicator(1);
    assert!(translation_equivalent(&weighted_two_cell(), &q).is_none());
}

#[test]
fn equivalence_witness_transports_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let p = random_congruence_partition(&mut rng, 4, 64, 8);
    let d = p.indicator_density();
    let q = StepDensity::unit_cube_indicator(1);
    let witness = translation_equivalent(&d, &q).unwrap();
    // Pieces tile the support of d and land inside Q.
    let total: Rational = witness.iter().map(|p| p.source.volume()).sum();
    assert_eq!(total, rat_int(1));
    for piece in &witness {
        let image = piece.source.translated(&piece.shift);
        assert!(image.subset_of(&RationalBox::unit_cube(1)));
    }
}

#[test]
fn congruence_round_trip_preserves_shift_volumes() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    for _ in 0..20 {
        let pieces = rng.gen_range(1..=6);
        let p = random_congruence_partition(&mut rng, pieces, 64, 8);
        let boxes = p.union_boxes();
        let back = check_translation_congruent(&boxes)
            .unwrap()
            .expect("reassembled set is congruent");
        assert_eq!(p.shift_volumes(), back.shift_volumes());
    }
}

#[test]
fn fold_is_idempotent_inside_the_cube() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for _ in 0..10 {
        let d = random_unity_density(&mut rng, 1, 32);
        let folded = d.fold_to_cube();
        assert!(folded.fold_to_cube().measure_eq(&folded));
        // A unity density folds to Lebesgue on the cube.
        assert!(folded.measure_eq(&StepDensity::unit_cube_indicator(1)));
    }
}

#[test]
fn integer_translates_are_equivalent() {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    for _ in 0..10 {
        let d = random_unity_density(&mut rng, 1, 32);
        let shift = vec![BigInt::from(rng.gen_range(-6i64..=6))];
        let moved = d.translated(&shift);
        let witness = translation_equivalent(&d, &moved).expect("translates are equivalent");
        assert!(witness.iter().all(|p| p.shift == shift));
    }
}
