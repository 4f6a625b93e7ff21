//! A pair eraser playing against BLR rounds, with the transcript printed.

use linten::f2::{LinearFn, PointF2};
use linten::oracle::{open_session, AdversaryConfig, ManipulationKind, PairEraser, RateMode};
use linten::testers::k_point_round;
use rand::SeedableRng;

fn main() -> linten::Result<()> {
    let n = 8;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let f = LinearFn::new(PointF2::random(n, &mut rng));
    let config = AdversaryConfig::new(ManipulationKind::Erasure, RateMode::FixedRate, 1.0)?;
    let mut session = open_session(&f, config, Box::new(PairEraser::default()), 4);
    for round in 1..=3 {
        let r = k_point_round(&mut session, 2)?;
        println!("round {round}: {r:?}");
    }
    println!("manipulations: {}", session.manipulations_applied());
    print!("{}", session.dump_transcript());
    Ok(())
}
