//! European calls under an NTS process run on a CIR stochastic clock, with
//! the two-cone agreement check the contour method makes possible.

use sinh_accel::levy::OptionKind;
use sinh_accel::models::{LevyModel, NtsParams};
use sinh_accel::subordinated::{
    strip_subordinated, subordinated_european_with, CirSubordinatorParams,
};
use sinh_accel::Tuning;

fn main() -> sinh_accel::Result<()> {
    let levy = LevyModel::Nts(NtsParams::from_second_moment(0.0, 0.1, 1.6, 3.0, 0.0)?);
    let sub = CirSubordinatorParams { kappa: 1.6, theta: 0.01, lambda: 0.25, y0: 0.02 };
    let (lo, hi) = strip_subordinated(&levy, &sub)?;
    println!("composed analyticity strip: ({lo:.4}, {hi:.4})");

    let t = Tuning::default();
    for x in [-0.1_f64, -0.04, 0.0] {
        let k = 100.0 * (-x).exp();
        let (v, params) = subordinated_european_with(
            &levy, &sub, 100.0, k, 0.02, 0.004, OptionKind::Call, 1e-15, None, &t,
        )?;
        println!("ln(S/K) = {x:>5}: call = {v:.9}  (N = {})", params.n);
    }

    // two different decay cones must land on the same number
    let k = 100.0 * 0.1_f64.exp();
    let (a, _) = subordinated_european_with(
        &levy, &sub, 100.0, k, 0.02, 0.004, OptionKind::Call, 1e-15,
        Some((-std::f64::consts::PI / 3.0, 0.0)), &t,
    )?;
    let (b, _) = subordinated_european_with(
        &levy, &sub, 100.0, k, 0.02, 0.004, OptionKind::Call, 1e-15,
        Some((-std::f64::consts::FRAC_PI_2, 0.0)), &t,
    )?;
    println!("\ncone (-pi/3,0) vs (-pi/2,0): {a:.15} vs {b:.15} (gap {:.1e})", (a - b).abs());
    Ok(())
}
