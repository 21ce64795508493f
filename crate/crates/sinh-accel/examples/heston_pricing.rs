//! Heston European puts: single strikes and a shared-contour strike grid
//! priced from one set of arrays.

use sinh_accel::heston::{heston_batch, heston_european, heston_tuning, HestonParams, HestonState};
use sinh_accel::levy::OptionKind;

fn main() -> sinh_accel::Result<()> {
    let p = HestonParams {
        kappa: 0.30,
        m: 0.18,
        sigma0: 2.44,
        rho: -0.58,
        r: 0.02,
        delta_div: 0.0,
    };
    for tau in [0.004, 1.0, 15.0] {
        let st = HestonState { s: 100.0, v: 0.18, tau };
        let put = heston_european(&p, &st, 100.0, OptionKind::Put, 1e-12)?;
        println!("T = {tau:>6}: put(K=100) = {put:.10}");
    }

    let st = HestonState { s: 100.0, v: 0.18, tau: 0.004 };
    let strikes: Vec<f64> = (0..7).map(|i| 85.0 + 5.0 * i as f64).collect();
    let (puts, params) = heston_batch(&p, &st, &strikes, OptionKind::Put, 1e-12, &heston_tuning())?;
    println!("\nshared contour (zeta = {:.5}, N = {}):", params.zeta, params.n);
    for (k, v) in strikes.iter().zip(puts) {
        println!("  K = {k:>5}: put = {v:.10}");
    }
    Ok(())
}
