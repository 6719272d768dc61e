//! Convergence study behind the frozen spectral-sum thresholds in the
//! acceptance suite: for both scale-4 systems sharing the candidate spectrum,
//! print the worst truncated spectral sum over a 21-point grid of [0,1] as
//! the slice depth grows.
//!
//! Run with `cargo run -p spectrapair-core --release --example convergence_study`.

use spectrapair_core::ifs::{self, AffineIfs};

fn main() {
    for digits in [vec![0i64, 2], vec![0, 10]] {
        let system = AffineIfs::new(4, digits.clone()).unwrap();
        println!("== B = {digits:?} ==");
        for depth in 4..=12 {
            let slice = ifs::gamma_slice(4, &[0, 1], depth).unwrap();
            let mut min = f64::INFINITY;
            let mut argmin = 0.0;
            for i in 0..=20 {
                let t = i as f64 / 20.0;
                let s = ifs::spectral_sum(&system, &slice, t, 40);
                if s < min {
                    min = s;
                    argmin = t;
                }
            }
            println!(
                "  depth={depth:2}  |slice|={:5}  min over grid = {min:.9}  at t={argmin}",
                slice.len()
            );
        }
    }
}
