//! Inverse-transform Monte-Carlo: Lévy increments from a quantile grid,
//! a regime-switching chain, and Heston paths from the cached step law.

use sinh_accel::heston::HestonParams;
use sinh_accel::mc::{simulate_heston, simulate_levy, simulate_regime_switching};
use sinh_accel::models::{CharExponent, KoBoLParams, LevyModel};
use sinh_accel::quantile::{build_grid, GridPolicy};

fn main() -> sinh_accel::Result<()> {
    let model = LevyModel::KoBoL(KoBoLParams::new(0.0, 0.6, 0.7, 5.0, -10.0)?);
    let t_step = 0.001;
    let grid = build_grid(&model, t_step, 1e-10, &GridPolicy::default())?;

    let n_paths = 20_000;
    let paths = simulate_levy(&grid, 1, n_paths, 7)?;
    let mean: f64 = paths.iter().map(|p| p[1]).sum::<f64>() / n_paths as f64;
    let var: f64 =
        paths.iter().map(|p| (p[1] - mean).powi(2)).sum::<f64>() / (n_paths - 1) as f64;
    println!("Levy increments: mean = {mean:.3e}, var = {var:.4e} (m2 t = {:.4e})",
        model.m2() * t_step);

    // two-state modulating chain with stationary occupation (0.6, 0.4)
    let gen = vec![vec![-4.0, 4.0], vec![6.0, -6.0]];
    let grids = vec![grid.clone(), grid];
    let rs = simulate_regime_switching(&gen, &grids, 0, 50, 0.01, 200, 3)?;
    let occ: f64 = rs.state.iter().flatten().filter(|&&s| s == 0).count() as f64
        / (200.0 * 50.0);
    println!("regime switching: state-0 occupation = {occ:.3} (stationary 0.6)");

    let p = HestonParams {
        kappa: 0.30, m: 0.18, sigma0: 2.44, rho: -0.58, r: 0.02, delta_div: 0.0,
    };
    let h = simulate_heston(&p, 0.18, 0.01, 4, 20_000, 17, 1e-9)?;
    let disc = (-p.r * 0.04_f64).exp();
    let mart: f64 = h.x.iter().map(|xp| disc * xp[4].exp()).sum::<f64>() / 20_000.0;
    println!("Heston: discounted terminal mean = {mart:.5} (martingale target 1)");
    Ok(())
}
