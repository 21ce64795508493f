//! Quantile evaluation through conformal principal components: the cached
//! arrays, the non-uniform ln-cdf grid, and tail Newton inversion.

use sinh_accel::models::{KoBoLParams, LevyModel};
use sinh_accel::quantile::{
    build_components, build_grid, eval_f, eval_fp, quantile, quantile_newton_from, GridPolicy,
    Tail,
};

fn main() -> sinh_accel::Result<()> {
    let model = LevyModel::KoBoL(KoBoLParams::new(0.0, 0.6, 0.7, 5.0, -10.0)?);
    let t = 0.001;

    // cached components anchored at -1 serve every x below it
    let pc = build_components(&model, t, Tail::Left, -1.0, 1e-13)?;
    println!("left components: N = {} nodes", pc.n);
    for x in [-1.0, -1.4, -1.8] {
        println!("  F({x}) = {:.6e}, pdf({x}) = {:.6e}", eval_f(&pc, x), eval_fp(&pc, x));
    }

    // the deep-tail quantile the components make cheap
    let (x, iters) = quantile_newton_from(&pc, -1.0, 1e-8, 5e-11, 12)?;
    println!("\nF^-1(1e-8) = {x:.13} in {iters} Newton steps from -1");

    // a full grid drives lookups across the whole unit interval
    let grid = build_grid(&model, t, 1e-12, &GridPolicy::default())?;
    println!("\ngrid: {} nodes on [{:.4}, {:.4}]", grid.x.len(), grid.x[0],
        grid.x.last().unwrap());
    for a in [1e-6, 0.01, 0.5, 0.99, 1.0 - 1e-6] {
        println!("  F^-1({a:.1e}) = {:+.8}", quantile(&grid, a)?);
    }
    Ok(())
}
