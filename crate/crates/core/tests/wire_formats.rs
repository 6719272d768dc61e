//! Round-trip invariants of the JSON wire formats over randomly generated
//! values, and a concurrency smoke test for the shared-read contracts.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectrapair_core::io::{parse_measure, partition_to_json, step_density_to_json, MeasureInput};
use spectrapair_core::sampling::{random_congruence_partition, random_unity_density};

#[test]
fn partitions_and_densities_round_trip_through_json() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    for _ in 0..25 {
        let pieces = rng.gen_range(1..=6);
        let partition = random_congruence_partition(&mut rng, pieces, 64, 8);
        let encoded = partition_to_json(&partition).to_string();
        let MeasureInput::Partition(back) = parse_measure(&encoded).unwrap() else {
            panic!("partition JSON must parse as a partition");
        };
        assert_eq!(partition, back);

        let density = partition.indicator_density();
        let encoded = step_density_to_json(&density).to_string();
        let MeasureInput::Step(back) = parse_measure(&encoded).unwrap() else {
            panic!("density JSON must parse as a step density");
        };
        assert_eq!(density, back);
    }
    for dim in [1usize, 2] {
        for _ in 0..10 {
            let density = random_unity_density(&mut rng, dim, 32);
            let encoded = step_density_to_json(&density).to_string();
            let MeasureInput::Step(back) = parse_measure(&encoded).unwrap() else {
                panic!("density JSON must parse as a step density");
            };
            assert_eq!(density, back);
        }
    }
}

#[test]
fn densities_are_safely_shared_across_threads() {
    let mut rng = ChaCha8Rng::seed_from_u64(402);
    let density = Arc::new(random_unity_density(&mut rng, 1, 32));
    let sequential: Vec<f64> = (0..8)
        .map(|i| density.parseval_sum(&[0.1 * i as f64]).unwrap())
        .collect();
    let handles: Vec<_> = (0..8)
        .map(|i| {
            let d = Arc::clone(&density);
            std::thread::spawn(move || d.parseval_sum(&[0.1 * i as f64]).unwrap())
        })
        .collect();
    for (i, handle) in handles.into_iter().enumerate() {
        assert_eq!(handle.join().unwrap(), sequential[i]);
    }
}
