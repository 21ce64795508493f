//! CIR short-rate characteristic function, zero-coupon bond price, and
//! bond call/put options. The discounted transform decays only algebraically
//! (|ξ|^{-2κθ/σ²}), so the truncation rule is the power-law one rather than
//! the Lévy exponential family.

use num_complex::Complex64;

use crate::contour::{
    self, select_geometry, solve_lambda1, sum_trapezoid_symmetric, ContourParams, IntegrandKind,
    KernelKind, SinhRegularType, Tuning,
};
use crate::error::{Result, SinhError};
use crate::levy::OptionKind;
use crate::math::principal_ln;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct CirParams {
    pub kappa: f64,
    pub theta: f64,
    pub sigma: f64,
}

impl CirParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.theta > 0.0 && self.sigma > 0.0) {
            return Err(SinhError::InvalidParameter(
                "kappa, theta, sigma must be positive".into(),
            ));
        }
        Ok(())
    }

    /// √(κ² + 2σ²).
    pub fn gamma(&self) -> f64 {
        (self.kappa * self.kappa + 2.0 * self.sigma * self.sigma).sqrt()
    }

    /// B± = (κ ± √(κ²+2σ²))/σ².
    pub fn b_pm(&self) -> (f64, f64) {
        let g = self.gamma();
        let s2 = self.sigma * self.sigma;
        ((self.kappa + g) / s2, (self.kappa - g) / s2)
    }

    /// B₊ₙ(τ) = (B₊e^{-τγ} - B₋)/(1 - e^{-τγ}).
    pub fn b_pn(&self, tau: f64) -> f64 {
        let (bp, bm) = self.b_pm();
        let e = (-tau * self.gamma()).exp();
        (bp * e - bm) / (1.0 - e)
    }

    /// B₊₊(τ) = (B₊ - B₋e^{-τγ})/(1 - e^{-τγ}); the cut of the transform runs
    /// down i(-∞, -B₊₊].
    pub fn b_pp(&self, tau: f64) -> f64 {
        let (bp, bm) = self.b_pm();
        let e = (-tau * self.gamma()).exp();
        (bp - bm * e) / (1.0 - e)
    }

    /// 2κθ/σ² — the power of the algebraic wing decay beyond the 1/ξ².
    pub fn gamma_cir(&self) -> f64 {
        2.0 * self.kappa * self.theta / (self.sigma * self.sigma)
    }
}

/// (B, C) of the discounted transform E[exp(-∫r) e^{iξ r_τ}] = e^{Br + C}.
pub fn cir_bc(tau: f64, xi: Complex64, p: &CirParams) -> Result<(Complex64, Complex64)> {
    p.validate()?;
    if !(tau > 0.0) {
        return Err(SinhError::InvalidParameter(format!("tau = {tau}")));
    }
    let (bp, bm) = p.b_pm();
    let bpp = p.b_pp(tau);
    let den = bpp - I * xi;
    if den.norm() < 1e-12 {
        return Err(SinhError::BranchCut(format!(
            "xi = {xi} at the pole -iB_++ of the CIR transform"
        )));
    }
    let b = (bp * bm + I * xi * p.b_pn(tau)) / den;
    let e = (-tau * p.gamma()).exp();
    let s2 = p.sigma * p.sigma;
    let ln_term = principal_ln(den, "B_++ - i xi")?;
    let c = p.kappa
        * p.theta
        * (bm * tau + (2.0 / s2) * ((bp - bm) / (1.0 - e)).ln() - (2.0 / s2) * ln_term);
    Ok((b, c))
}

/// Zero-coupon bond price P(T, r) = exp[B(T,0)r + C(T,0)].
pub fn bond_price(t: f64, r: f64, p: &CirParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(SinhError::InvalidParameter(format!("t = {t}")));
    }
    if r < 0.0 {
        return Err(SinhError::InvalidParameter(format!("r = {r}")));
    }
    let (b, c) = cir_bc(t, Complex64::new(0.0, 0.0), p)?;
    Ok((b.re * r + c.re).exp())
}

/// Wing constant C_∞(τ, r) of |e^{Br+C}| ~ C_∞ |ξ|^{-2κθ/σ²}.
pub fn cir_wing_constant(tau: f64, r: f64, p: &CirParams) -> f64 {
    let (bp, bm) = p.b_pm();
    let g = p.gamma();
    let eg = (tau * g).exp();
    ((bp - bm) / (1.0 - (-tau * g).exp())).powf(p.gamma_cir())
        * (r * (bp - bm * eg) / (1.0 - eg) + p.kappa * p.theta * bm * tau).exp()
}

/// Which of the three analyticity strips carries the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CirStrip {
    Auto,
    /// S_(-B₊₊, 0): a put crosses no pole; call = value + P(τ+T) - K·P(τ).
    Bottom,
    /// S_(0, -B(T,0)): call = value + P(τ+T).
    Middle,
    /// S_(-B(T,0), ·): direct call, Λ extended by the upper-half-plane leg.
    Top,
}

/// Price of a call/put with option maturity `tau` on a unit-notional bond
/// with `t_bond` years remaining at expiry (the bond matures at tau + t_bond).
/// `k` is per unit notional. z = (C(T,0) - ln K)/B(T,0); z ≥ 0 means the
/// strike is unreachable and the call is worth ~0.
pub fn bond_option(
    kind: OptionKind,
    tau: f64,
    t_bond: f64,
    k: f64,
    r: f64,
    p: &CirParams,
    eps: f64,
) -> Result<f64> {
    bond_option_with(kind, tau, t_bond, k, r, p, eps, CirStrip::Auto, &Tuning::default())
        .map(|(v, _)| v)
}

#[allow(clippy::too_many_arguments)]
pub fn bond_option_with(
    kind: OptionKind,
    tau: f64,
    t_bond: f64,
    k: f64,
    r: f64,
    p: &CirParams,
    eps: f64,
    strip: CirStrip,
    tuning: &Tuning,
) -> Result<(f64, ContourParams)> {
    p.validate()?;
    if !(tau > 0.0 && t_bond > 0.0 && k > 0.0 && r >= 0.0 && eps > 0.0 && eps < 1.0) {
        return Err(SinhError::InvalidParameter(
            "requires tau, T, K > 0, r >= 0, eps in (0,1)".into(),
        ));
    }
    if kind == OptionKind::CoveredCall {
        return Err(SinhError::UnsupportedModel(
            "covered call not defined for bond options".into(),
        ));
    }
    let (b_t, c_t) = cir_bc(t_bond, Complex64::new(0.0, 0.0), p)?;
    let (b_t, c_t) = (b_t.re, c_t.re);
    let z = (c_t - k.ln()) / b_t;
    let bpp = p.b_pp(tau);
    let pole_upper = -b_t; // second pole at -iB(T,0); B(T,0) < 0

    let strip = match strip {
        CirStrip::Auto => {
            if z < 0.0 && bpp >= 0.05 {
                CirStrip::Bottom
            } else {
                CirStrip::Middle
            }
        }
        s => s,
    };
    let (mu_lo, mu_hi) = match strip {
        CirStrip::Bottom => (-bpp, 0.0),
        CirStrip::Middle => (0.0, pole_upper),
        CirStrip::Top => (pole_upper, 2.0 * pole_upper),
        CirStrip::Auto => unreachable!(),
    };
    if mu_hi - mu_lo <= 0.0 {
        return Err(SinhError::EmptyStrip(format!("CIR strip ({mu_lo}, {mu_hi})")));
    }

    // residues picked up moving down from the top strip: at -iB(T,0) the
    // transform collapses to P(tau + T), at 0 to K P(tau)
    let p_long = bond_price(tau + t_bond, r, p)?;
    let p_short = bond_price(tau, r, p)?;
    let call_correction = match strip {
        CirStrip::Bottom => p_long - k * p_short,
        CirStrip::Middle => p_long,
        CirStrip::Top => 0.0,
        CirStrip::Auto => unreachable!(),
    };

    let typ = SinhRegularType {
        mu_minus: mu_lo.min(0.0),
        mu_plus: mu_hi.max(0.0),
        gamma_minus: -std::f64::consts::FRAC_PI_2,
        gamma_plus: std::f64::consts::FRAC_PI_2,
        // order placeholder below the tilt threshold so the cone is the hard
        // one-sided kind; the truncation below never consults the Lévy solver
        nu: 0.5,
        c_inf0: 0.0,
        c0: 0.0,
    };
    let kind_c = IntegrandKind::Custom {
        mu_minus: mu_lo,
        mu_plus: mu_hi,
        kernel: KernelKind::Payoff,
        decay_power: 2,
    };
    let geom = select_geometry(&typ, z, 1.0, kind_c, tuning)?;
    let pref = k * b_t / TWO_PI;
    let g = |xi: Complex64| {
        let (b, c) = cir_bc(tau, xi, p)?;
        Ok(pref * (I * z * xi + b * r + c).exp() / (xi * (xi + I * b_t)))
    };
    let (d, b_scale, zeta) = contour::select_mesh(&typ, &geom, &g, z, 1.0, eps, tuning)?;

    // truncation: |integrand| ~ K|B(T,0)| C_inf(tau,r) e^{-|z sin w| rho} rho^{-2-2kth/s^2}
    let gamma_cir = p.gamma_cir();
    let c_inf = cir_wing_constant(tau, r, p);
    let scale = k * b_t.abs() * c_inf;
    let a_gain = (z * geom.omega.sin()).max(0.0);
    let lambda1 = if a_gain > 1e-12 {
        let eps1 = std::f64::consts::PI * eps / scale;
        // -z omega1: constant kernel offset of the shifted contour
        solve_lambda1(a_gain, 0.0, 1.0, 1.0 + gamma_cir, (1.0 / eps1).ln() - z * geom.omega1)
    } else {
        let eps1 = eps * (1.0 + gamma_cir) / scale;
        eps1.powf(-1.0 / (1.0 + gamma_cir))
    };
    let mut lambda = tuning.k_lambda * (2.0 * lambda1 / b_scale).ln().max(zeta);
    // contour crossing above the real axis with downward wings: add the
    // upper-half-plane leg
    let crossing = geom.omega1 + b_scale * geom.omega.sin();
    if crossing > 0.0 && z < 0.0 && geom.omega < 0.0 {
        let s = -geom.omega1 / (b_scale * geom.omega.sin());
        if s > 0.0 {
            lambda += s + (s * s + 1.0).sqrt();
        }
    }
    let n = ((lambda / zeta).ceil() as usize).max(2);
    let params = ContourParams::new(geom.omega1, geom.omega, b_scale, d, zeta, n)?;

    let integral = sum_trapezoid_symmetric(g, &params)?;
    let call = integral + call_correction;
    let value = match kind {
        OptionKind::Call => call,
        OptionKind::Put => call - p_long + k * p_short,
        OptionKind::CoveredCall => unreachable!(),
    };
    let value = if value >= 0.0 {
        value
    } else if value >= -10.0 * eps {
        0.0
    } else {
        return Err(SinhError::AccuracyAlarm(format!(
            "negative bond option value {value}"
        )));
    };
    Ok((value, params))
}

/// Strike per unit notional at a given z = (C(T,0) - ln K)/B(T,0).
pub fn strike_from_z(z: f64, t_bond: f64, p: &CirParams) -> Result<f64> {
    let (b, c) = cir_bc(t_bond, Complex64::new(0.0, 0.0), p)?;
    Ok((c.re - z * b.re).exp())
}
