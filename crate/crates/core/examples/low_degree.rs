//! The degree-d tester on a random polynomial and on the same polynomial with a bump.

use linten::low_degree::{low_degree_trial, LowDegreeConfig};
use linten::real::{Distribution, ZooFunction};
use rand::SeedableRng;

fn main() -> linten::Result<()> {
    let cfg = LowDegreeConfig::default();
    for d in 1..=3 {
        let p = ZooFunction::random_poly(2, d, &mut rand_chacha::ChaCha8Rng::seed_from_u64(u64::from(d)));
        let bumped = ZooFunction::bump(p.clone(), 100.0, 5.0);
        let dist = Distribution::gaussian_with_atom(0.2, vec![110.0, 0.0]);
        for (label, f) in [("poly", &p), ("bumped", &bumped)] {
            let out = low_degree_trial(f, d, &dist, 0.1, &cfg, 5, 0)?;
            println!("d={d} {label:<7} {:?} in {:?} after {} queries", out.verdict, out.phase, out.queries_used);
        }
    }
    Ok(())
}
