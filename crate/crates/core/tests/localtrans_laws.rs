//! Laws of the local translation group on random expansions: the
//! eigenrelation, the group law, unitarity, and the intertwining identity
//! for measures sharing a spectrum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectrapair_core::atomic::{AtomicMeasure, FrequencySet};
use spectrapair_core::exactnum::{rat, rat_int, Complex};
use spectrapair_core::localtrans::{
    analyze, intertwine, local_translate, IntoFrequencies, SpectralExpansion, SpectralMeasure,
};
use spectrapair_core::sampling::random_congruence_partition;

fn shared_spectrum_pair() -> (SpectralMeasure, SpectralMeasure, FrequencySet) {
    let a = AtomicMeasure::from_scalars(vec![rat_int(0), rat(1, 8), rat(4, 8), rat(5, 8)]).unwrap();
    let b = AtomicMeasure::from_scalars(vec![rat_int(0), rat(3, 8), rat(4, 8), rat(7, 8)]).unwrap();
    let gamma = FrequencySet::from_scalars(vec![0, 1, 4, 5]).unwrap();
    (
        SpectralMeasure::Atomic(a),
        SpectralMeasure::Atomic(b),
        gamma,
    )
}

fn random_expansion(rng: &mut impl Rng, freqs: &[Vec<f64>]) -> SpectralExpansion {
    let coefficients = freqs
        .iter()
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    SpectralExpansion::new(freqs.to_vec(), coefficients).unwrap()
}

#[test]
fn group_law_and_unitarity_on_random_expansions() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    let freqs: Vec<Vec<f64>> = vec![vec![0.0], vec![1.0], vec![4.0], vec![5.0], vec![-3.0]];
    for _ in 0..100 {
        let f = random_expansion(&mut rng, &freqs);
        let s = rng.gen_range(-2.0..2.0);
        let t = rng.gen_range(-2.0..2.0);
        let sequential = local_translate(&[s], &local_translate(&[t], &f));
        let combined = local_translate(&[s + t], &f);
        for (a, b) in sequential
            .coefficients()
            .iter()
            .zip(combined.coefficients())
        {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((sequential.l2_norm() - f.l2_norm()).abs() < 1e-12);
    }
}

#[test]
fn eigenrelation_on_basis_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..100 {
        let lambda = rng.gen_range(-10i64..=10) as f64;
        let basis =
            SpectralExpansion::new(vec![vec![lambda]], vec![Complex::new(1.0, 0.0)]).unwrap();
        let t = rng.gen_range(-3.0..3.0);
        let moved = local_translate(&[t], &basis);
        let expected = Complex::from_polar(1.0, std::f64::consts::TAU * t * lambda);
        assert!((moved.coefficients()[0] - expected).norm() < 1e-12);
    }
}

#[test]
fn intertwining_identity_for_the_atomic_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    let (ma, mb, gamma) = shared_spectrum_pair();
    let freqs = gamma.frequency_vectors();
    for _ in 0..100 {
        let f = random_expansion(&mut rng, &freqs);
        let t = [rng.gen_range(-2.0..2.0)];
        let left = local_translate(&t, &intertwine(&ma, &mb, &f).unwrap());
        let right = intertwine(&ma, &mb, &local_translate(&t, &f)).unwrap();
        for (a, b) in left.coefficients().iter().zip(right.coefficients()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn intertwining_identity_for_density_family_members() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    let p1 = random_congruence_partition(&mut rng, 3, 64, 8);
    let p2 = random_congruence_partition(&mut rng, 4, 64, 8);
    let m1 = SpectralMeasure::Density(p1.indicator_density());
    let m2 = SpectralMeasure::Density(p2.indicator_density());
    let gamma = FrequencySet::from_scalars((-5..=5).collect()).unwrap();
    let freqs = gamma.frequency_vectors();
    for _ in 0..100 {
        let f = random_expansion(&mut rng, &freqs);
        let t = [rng.gen_range(-2.0..2.0)];
        let left = local_translate(&t, &intertwine(&m1, &m2, &f).unwrap());
        let right = intertwine(&m1, &m2, &local_translate(&t, &f)).unwrap();
        for (a, b) in left.coefficients().iter().zip(right.coefficients()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn parseval_truncations_increase_toward_one_on_verified_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(205);
    let p = random_congruence_partition(&mut rng, 3, 64, 8);
    let d = p.indicator_density();
    let measure = SpectralMeasure::Density(d);
    for _ in 0..10 {
        let t = rng.gen_range(-3.0..3.0);
        let mut prev = -1.0;
        for radius in [0i64, 1, 2, 5, 10, 30] {
            let gamma = FrequencySet::from_scalars((-radius..=radius).collect()).unwrap();
            let f = analyze(&measure, &[t], &gamma);
            let norm_sq: f64 = f.coefficients().iter().map(|c| c.norm_sqr()).sum();
            assert!(norm_sq <= 1.0 + 1e-9, "Bessel bound");
            assert!(norm_sq + 1e-12 >= prev, "nondecreasing in the radius");
            prev = norm_sq;
        }
    }
}

#[test]
fn synthesis_shifts_on_the_cube() {
    use spectrapair_core::density::StepDensity;
    let measure = SpectralMeasure::Density(StepDensity::unit_cube_indicator(1));
    let gamma = FrequencySet::from_scalars((-12..=12).collect()).unwrap();
    let f = analyze(&measure, &[0.15], &gamma);
    let t = 0.3;
    let g = local_translate(&[t], &f);
    for x in [0.05, 0.2, 0.55] {
        let moved = g.synthesize(&[x]);
        let plain = f.synthesize(&[x + t]);
        assert!(
            (moved - plain).norm() < 1e-12,
            "local translation acts as translation inside the cube"
        );
    }
}
