//! A corrupting adversary that makes a far function look linear to a sample-based tester.

use linten::harness::{impossibility_demo, DemoConfig};

fn main() -> linten::Result<()> {
    let cfg = DemoConfig::new(12, 0.125);
    let report = impossibility_demo(&cfg)?;
    println!("ell = {}, t = {}, m0 = {}", report.ell, report.t, report.m0);
    for arm in &report.arms {
        println!("{:<8} accept(g) = {:.3} accept(f) = {:.3} gap = {:.3}", arm.name, arm.accept_g, arm.accept_gd, arm.gap);
    }
    for b in &report.bounds {
        println!("{}", b.line());
    }
    Ok(())
}
