//! Exact distance to linearity from the Walsh spectrum.

use linten::f2::{distance_to_linear, make_far_function, walsh_hadamard};

fn main() -> linten::Result<()> {
    let n = 10;
    let f = make_far_function(n, 100, 1)?;
    let spectrum = walsh_hadamard(&f);
    let d = distance_to_linear(&f)?;
    println!("n = {n}, ones = {}", f.ones());
    println!("parseval holds: {}", spectrum.parseval_holds());
    println!("distance to linear: {} ({})", d.distance.to_f64(), d.distance.numerator_over(n).unwrap_or(0));
    println!("nearest linear function: {:?}", d.nearest);
    Ok(())
}
