//! Zero-coupon bond prices and bond options in the CIR short-rate model,
//! with the residue-based parity identity checked across three strips.

use sinh_accel::cir::{bond_option_with, bond_price, strike_from_z, CirParams, CirStrip};
use sinh_accel::levy::OptionKind;
use sinh_accel::Tuning;

fn main() -> sinh_accel::Result<()> {
    let p = CirParams { kappa: 1.6, theta: 0.01, sigma: 0.5 };
    let r0 = 0.01;
    println!("bond prices per 100 notional at r0 = {r0}:");
    for t in [1.0, 2.0, 3.0] {
        println!("  P(0, {t}) = {:.6}", 100.0 * bond_price(t, r0, &p)?);
    }

    // option maturing in 1y on the bond with 2y left at expiry
    println!("\ncalls per 100 notional (option 1y, bond 3y):");
    for z in [-0.02, -0.01, -0.005] {
        let k = strike_from_z(z, 2.0, &p)?;
        let t = Tuning::default();
        let (bottom, params) =
            bond_option_with(OptionKind::Call, 1.0, 2.0, k, r0, &p, 1e-13, CirStrip::Bottom, &t)?;
        let (top, _) =
            bond_option_with(OptionKind::Call, 1.0, 2.0, k, r0, &p, 1e-13, CirStrip::Top, &t)?;
        println!(
            "  z = {z:>7}: K = {:>11.7}, call = {:.9} (N = {}), strip gap = {:.1e}",
            100.0 * k,
            100.0 * bottom,
            params.n,
            (bottom - top).abs()
        );
    }
    Ok(())
}
