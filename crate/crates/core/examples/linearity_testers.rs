//! Every Boolean tester on a linear and a far function.

use linten::f2::{make_far_function, LinearFn, PointF2};
use linten::oracle::{open_session, AdversaryConfig, Null};
use linten::testers::{run_tester, TesterId, TesterParams};

fn main() -> linten::Result<()> {
    let n = 14;
    let eps = 0.1;
    let linear = LinearFn::new(PointF2::from_index(n, 0x2b5)?);
    let far = make_far_function(n, (eps * f64::from(1u32 << n)).ceil() as u64, 9)?;
    let mut params = TesterParams::new(n, eps, 0.0);
    params.force_case_one = true;
    for id in TesterId::ALL {
        for (label, f) in [("linear", &linear as &dyn linten::f2::BoolFunction), ("far", &far)] {
            let mut session = open_session(f, AdversaryConfig::none(), Box::new(Null), 1);
            let out = run_tester(id, &mut session, &params, 4)?;
            println!("{:<6} {label:<6} {:?} after {} queries", id.name(), out.verdict, out.queries_used);
        }
    }
    Ok(())
}
