//! Flat inverse Fourier transform and the fractional-parabolic deformation,
//! kept as independent oracles and for the comparison rows of the benchmark
//! tables.

use num_complex::Complex64;

use crate::error::{Result, SinhError};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// ζ·Σ_{|j|≤N} g(jζ + iω₀): the simplified trapezoid rule on the flat line
/// Im ξ = ω₀.
pub fn flat_ift<G>(g: G, omega0: f64, zeta: f64, n: usize) -> Result<Complex64>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    if !(zeta > 0.0) {
        return Err(SinhError::InvalidParameter(format!("zeta = {zeta}")));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in -(n as i64)..=(n as i64) {
        let xi = Complex64::new(j as f64 * zeta, omega0);
        let term = g(xi)?;
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(SinhError::NonFiniteTerm { j, detail: format!("term = {term}") });
        }
        acc += term;
    }
    Ok(acc * zeta)
}

/// Symmetric (conjugate-pair) variant returning the real value directly.
pub fn flat_ift_symmetric<G>(g: G, omega0: f64, zeta: f64, n: usize) -> Result<f64>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    let mut acc = 0.0;
    for j in 0..=(n as i64) {
        let xi = Complex64::new(j as f64 * zeta, omega0);
        let term = g(xi)?.re;
        if !term.is_finite() {
            return Err(SinhError::NonFiniteTerm { j, detail: format!("Re term = {term}") });
        }
        acc += if j == 0 { 0.5 * term } else { term };
    }
    Ok(2.0 * zeta * acc)
}

/// Parameters of the fractional-parabolic change of variables
/// ξ = iω ± iσ(1 ∓ iη)^α.
#[derive(Debug, Clone, Copy)]
pub struct FracParabolicParams {
    pub omega: f64,
    pub sigma: f64,
    /// Order α > 1.
    pub alpha: f64,
    pub zeta: f64,
    pub n: usize,
}

impl FracParabolicParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            // beyond alpha = 2 the wings turn past vertical and the traversal
            // wraps back over the axis, sweeping cuts in the half-plane
            return Err(SinhError::InvalidParameter(format!(
                "alpha = {} outside the supported (1, 2]",
                self.alpha
            )));
        }
        if !(self.sigma > 0.0 && self.zeta > 0.0) {
            return Err(SinhError::InvalidParameter("sigma, zeta must be > 0".into()));
        }
        Ok(())
    }
}

/// Trapezoid sum after ξ = iω ± iσ(1 ∓ iη)^α; dξ/dη = σα(1 ∓ iη)^{α-1} on
/// either branch. For α in (1, 2] the `+` branch is a dome with downward
/// wings (apex i(ω+σ)) and the `-` branch a bowl with upward wings.
pub fn frac_parabolic<G>(g: G, p: &FracParabolicParams, branch_plus: bool) -> Result<Complex64>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    p.validate()?;
    let s = if branch_plus { 1.0 } else { -1.0 };
    let mut acc = Complex64::new(0.0, 0.0);
    for j in -(p.n as i64)..=(p.n as i64) {
        let eta = j as f64 * p.zeta;
        let base = 1.0 - s * I * eta;
        let xi = I * p.omega + s * I * p.sigma * base.powf(p.alpha);
        let w = p.sigma * p.alpha * base.powf(p.alpha - 1.0);
        let term = g(xi)? * w;
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(SinhError::NonFiniteTerm { j, detail: format!("term = {term}") });
        }
        acc += term;
    }
    Ok(acc * p.zeta)
}

/// Tolerance-driven parameter pick for the parabolic baseline: mesh from the
/// crude Hardy bound on an η-strip of half-width 0.4/α, truncation by
/// marching outward until the terms stay below ε/10 (capped at a million).
pub fn frac_parabolic_auto<G>(
    g: &G,
    omega: f64,
    sigma: f64,
    alpha: f64,
    eps: f64,
    branch_plus: bool,
) -> Result<(Complex64, FracParabolicParams)>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    if !(eps > 0.0 && eps < 1.0) {
        return Err(SinhError::InvalidParameter(format!("eps = {eps}")));
    }
    let s = if branch_plus { 1.0 } else { -1.0 };
    let d = 0.4 / alpha;
    let f_at = |y: Complex64| -> Result<Complex64> {
        let base = 1.0 - s * I * y;
        let xi = I * omega + s * I * sigma * base.powf(alpha);
        Ok(g(xi)? * sigma * alpha * base.powf(alpha - 1.0))
    };
    let h = crate::contour::hardy_estimate(f_at, d)?;
    let zeta = crate::contour::mesh_size(d, &h, eps)?;
    // outward march on the positive side (conjugate symmetry covers the other)
    let mut n = 8usize;
    loop {
        if n > 1_000_000 {
            break;
        }
        let eta = n as f64 * zeta;
        let base = 1.0 - s * I * eta;
        let xi = I * omega + s * I * sigma * base.powf(alpha);
        let t = (g(xi)? * sigma * alpha * base.powf(alpha - 1.0)).norm() * zeta;
        if !t.is_finite() {
            return Err(SinhError::DegenerateContour(
                "parabolic branch diverges; flip the branch".into(),
            ));
        }
        if t < 0.1 * eps {
            break;
        }
        n = (n as f64 * 1.3).ceil() as usize;
    }
    let params = FracParabolicParams { omega, sigma, alpha, zeta, n };
    let v = frac_parabolic(g, &params, branch_plus)?;
    Ok((v, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{self, LevyQuery};
    use crate::models::{CharExponent, LevyModel, NtsParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn gaussian_closed_form() {
        // (1/2pi) Int e^{-xi^2/2} dxi = standard normal density at 0
        let g = |xi: Complex64| Ok((-xi * xi / 2.0).exp() / TWO_PI);
        let v = flat_ift(g, 0.0, 0.05, 400).unwrap();
        assert_relative_eq!(v.re, 1.0 / TWO_PI.sqrt(), max_relative = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-16);
        let vs = flat_ift_symmetric(g, 0.0, 0.05, 400).unwrap();
        assert_relative_eq!(vs, v.re, max_relative = 1e-14);
    }

    fn nts(nu: f64) -> LevyModel {
        LevyModel::Nts(NtsParams::from_second_moment(0.0, 0.1, nu, 10.0, 0.0).unwrap())
    }

    #[test]
    fn flat_error_monotone_in_n() {
        // NTS nu=0.5 peak: truncation error shrinks as N grows at fixed zeta
        let model = nts(0.5);
        let truth = 1077.36379734891;
        let g = |xi: Complex64| Ok((-0.004 * model.psi0(xi)?).exp() / TWO_PI);
        // iFT-style mesh for eps=1e-7 with the oscillation relaxation 0.6
        let zeta = 2.0 * std::f64::consts::PI * 0.95 * 10.0
            / ((1.0 / 1e-7f64).ln() + 3.0)
            / 0.6
            / TWO_PI;
        let zeta = zeta.min(3.5);
        let mut prev = f64::MAX;
        for n in [10_000usize, 100_000, 1_000_000] {
            let v = flat_ift_symmetric(g, 0.0, zeta, n).unwrap();
            let err = (v - truth).abs();
            assert!(err <= prev * (1.0 + 1e-9), "error grew at N = {n}: {err} > {prev}");
            prev = err;
        }
        // N = 1e5 leaves a visible truncation error; N = 1e6 reaches the
        // discretization floor of the eps = 1e-7 mesh
        let e5 = (flat_ift_symmetric(g, 0.0, zeta, 100_000).unwrap() - truth).abs();
        let e6 = (flat_ift_symmetric(g, 0.0, zeta, 1_000_000).unwrap() - truth).abs();
        assert!(e5 > 1e-6, "N=1e5 error unexpectedly small: {e5}");
        assert!(e6 < 5e-6, "N=1e6 error too large: {e6}");
    }

    #[test]
    fn parabolic_agrees_with_sinh_on_nts_tail() {
        let model = nts(0.3);
        let x = -0.1;
        let sinh_v = levy::pdf(&LevyQuery { model, t: 0.004, x, eps: 1e-13 }).unwrap();
        let g = |xi: Complex64| {
            Ok(((-I * x * xi) - 0.004 * model.psi0(xi)?).exp() / TWO_PI)
        };
        // x < 0 needs upward wings: the `-` branch bowl, apex at -i sigma
        let (v, params) = frac_parabolic_auto(&g, 0.0, 5.0, 2.0, 1e-13, false).unwrap();
        assert_abs_diff_eq!(v.re, sinh_v, epsilon = 3e-13);
        assert!(params.n > 0);
    }

    #[test]
    fn parabolic_needs_more_terms_at_the_peak() {
        let model = nts(0.3);
        let g = |xi: Complex64| Ok((-0.004 * model.psi0(xi)?).exp() / TWO_PI);
        let (v, params) = frac_parabolic_auto(&g, 0.0, 5.0, 2.0, 1e-10, false).unwrap();
        assert_relative_eq!(v.re, 27813.7583243051, max_relative = 1e-8);
        let (_, sinh_params) =
            levy::pdf_with(&LevyQuery { model, t: 0.004, x: 0.0, eps: 1e-10 }, &Default::default())
                .unwrap();
        assert!(
            params.n >= 5 * sinh_params.n,
            "parabolic N = {} vs sinh N = {}",
            params.n,
            sinh_params.n
        );
    }

    #[test]
    fn cir_parabolic_cross_check() {
        // alpha = 2.8 run against the sinh bond-option value
        use crate::cir::{self, CirParams};
        use crate::levy::OptionKind;
        let p = CirParams { kappa: 1.6, theta: 0.01, sigma: 0.5 };
        let k = cir::strike_from_z(-0.02, 2.0, &p).unwrap();
        let sinh_v =
            cir::bond_option(OptionKind::Call, 1.0, 2.0, k, 0.01, &p, 1e-13).unwrap();
        let (b_t, c_t) = cir::cir_bc(2.0, Complex64::new(0.0, 0.0), &p).unwrap();
        let z = (c_t.re - k.ln()) / b_t.re;
        let pref = k * b_t.re / TWO_PI;
        let g = |xi: Complex64| {
            let (b, c) = cir::cir_bc(1.0, xi, &p)?;
            Ok(pref * (I * z * xi + b * 0.01 + c).exp() / (xi * (xi + I * b_t.re)))
        };
        // z < 0 needs downward wings: the `+` branch dome inside the bottom
        // strip; alpha capped at 2 so the wings stay vertical and the cut
        // below -i B_++ is never swept
        let (v, _) = frac_parabolic_auto(&g, -0.9, 0.4, 2.0, 1e-13, true).unwrap();
        let p3 = cir::bond_price(3.0, 0.01, &p).unwrap();
        let p1 = cir::bond_price(1.0, 0.01, &p).unwrap();
        let call = v.re + p3 - k * p1; // bottom-strip residues
        assert_abs_diff_eq!(call, sinh_v, epsilon = 1e-11);
    }
}
