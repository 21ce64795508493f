//! Density of an NTS process evaluated by sinh-accelerated Fourier
//! inversion, at the peak and in the left tail, with the contour parameters
//! the selection pipeline picked.

use sinh_accel::levy::{self, LevyQuery};
use sinh_accel::models::{LevyModel, NtsParams};
use sinh_accel::Tuning;

fn main() -> sinh_accel::Result<()> {
    // completely symmetric NTS with second instantaneous moment 0.1
    for nu in [0.3, 0.9, 1.5] {
        let model = LevyModel::Nts(NtsParams::from_second_moment(0.0, 0.1, nu, 10.0, 0.0)?);
        let q = LevyQuery { model, t: 0.004, x: 0.0, eps: 1e-15 };
        let (peak, params) = levy::pdf_with(&q, &Tuning::default())?;
        println!(
            "nu = {nu}: p(0) = {peak:.10}   (zeta = {:.4}, N = {})",
            params.zeta, params.n
        );
    }

    let model = LevyModel::Nts(NtsParams::from_second_moment(0.0, 0.1, 0.3, 10.0, 0.0)?);
    println!("\nleft tail, nu = 0.3:");
    for x in [-0.3, -0.1, -0.01] {
        let q = LevyQuery { model, t: 0.004, x, eps: 1e-15 };
        let (v, params) = levy::pdf_with(&q, &Tuning::default())?;
        println!("  p({x}) = {v:.10}   (N = {})", params.n);
    }

    // cumulative distribution and its pointwise consistency with the density
    let q = LevyQuery { model, t: 0.004, x: -0.1, eps: 1e-12 };
    let f = levy::cdf(&q)?;
    let h = 1e-6;
    let fd = (levy::cdf(&LevyQuery { x: -0.1 + h, ..q })?
        - levy::cdf(&LevyQuery { x: -0.1 - h, ..q })?)
        / (2.0 * h);
    println!("\nF(-0.1) = {f:.12}, dF/dx by finite difference = {fd:.8} vs pdf = {:.8}",
        levy::pdf(&q)?);
    Ok(())
}
