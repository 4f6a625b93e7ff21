//! The additivity tester on an additive function and on one with a jump.

use linten::real::{additivity_trial, AdditivityConfig, Distribution, ZooFunction};

fn main() -> linten::Result<()> {
    let cfg = AdditivityConfig::default();
    let dist = Distribution::gaussian_with_atom(0.2, vec![6.0, 0.0]);
    for text in ["additive(1,-2.5)", "bump(additive(1,1),5,5)", "affine(1,1,0.5)"] {
        let f: ZooFunction = text.parse()?;
        let out = additivity_trial(&f, &dist, 0.1, &cfg, 3, 0)?;
        println!("{text:<26} {:?} in {:?} after {} queries", out.verdict, out.phase, out.queries_used);
        if let Some(w) = out.witness {
            println!("  failed {:?}: lhs {} rhs {}", w.check, w.lhs.to_f64(), w.rhs.to_f64());
        }
    }
    Ok(())
}
