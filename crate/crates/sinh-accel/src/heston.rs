//! Heston conditional characteristic-exponent terms, strip bounds,
//! asymptotics, and European put/call pricing through the sinh-accelerated
//! trapezoid rule. The conditional law of the log-price is SINH-regular of
//! order 1, so the order-1 machinery of the contour module applies with
//! c_∞(0) = (v + κmτ)σ₀√(1-ρ²).

use num_complex::Complex64;

use crate::contour::{
    self, select_geometry, solve_lambda1, sum_trapezoid_symmetric, ContourParams, IntegrandKind,
    KernelKind, SinhRegularType, Tuning,
};
use crate::error::{Result, SinhError};
use crate::levy::OptionKind;
use crate::math::sqrt_re_nonneg;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct HestonParams {
    /// Mean-reversion rate κ > 0.
    pub kappa: f64,
    /// Long-run variance m > 0.
    pub m: f64,
    /// Vol-of-vol σ₀ > 0.
    pub sigma0: f64,
    /// Correlation ρ in (-1, 1).
    pub rho: f64,
    pub r: f64,
    pub delta_div: f64,
}

impl HestonParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.m > 0.0 && self.sigma0 > 0.0) {
            return Err(SinhError::InvalidParameter(
                "kappa, m, sigma0 must be positive".into(),
            ));
        }
        if !(self.rho.abs() < 1.0) {
            return Err(SinhError::InvalidParameter(format!("rho = {}", self.rho)));
        }
        Ok(())
    }

    /// Drift μ₀ = r - δ - κmρ/σ₀ of the pricing variable z_t.
    pub fn mu0(&self) -> f64 {
        self.r - self.delta_div - self.kappa * self.m * self.rho / self.sigma0
    }

    /// Coefficient of iξ in R(ξ)². The paper displays σ₀² - 2ρκ; the table
    /// values require σ₀² - 2ρκσ₀.
    fn r_lin(&self) -> f64 {
        self.sigma0 * self.sigma0 - 2.0 * self.rho * self.kappa * self.sigma0
    }

    fn r_quad(&self) -> f64 {
        self.sigma0 * self.sigma0 * (1.0 - self.rho * self.rho)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HestonState {
    pub s: f64,
    /// Instantaneous variance v ≥ 0.
    pub v: f64,
    /// Time to maturity τ > 0.
    pub tau: f64,
}

impl HestonState {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.v >= 0.0 && self.tau > 0.0) {
            return Err(SinhError::InvalidParameter(
                "requires S > 0, v >= 0, tau > 0".into(),
            ));
        }
        Ok(())
    }

    /// z_t = ln(S/K) - (ρ/σ₀)v + μ₀τ.
    pub fn z(&self, p: &HestonParams, k: f64) -> f64 {
        (self.s / k).ln() - (p.rho / p.sigma0) * self.v + p.mu0() * self.tau
    }
}

/// (B₀, C₀) of the conditional characteristic function exp[(v·B₀ + C₀)/σ₀²],
/// in the branch-stable quotient form with Re R ≥ 0 and the ξ → 0 singularity
/// of D₁ removed via (κ-R)·D₁ = D·(κ+R).
pub fn heston_terms(tau: f64, xi: Complex64, p: &HestonParams) -> Result<(Complex64, Complex64)> {
    let (lm, lp) = strip_bounds(p);
    if xi.re.abs() < 1e-14 * (1.0 + xi.im.abs()) && (xi.im >= lp || xi.im <= lm) {
        return Err(SinhError::BranchCut(format!(
            "xi = {xi} on the imaginary cuts beyond ({lm}, {lp})"
        )));
    }
    let kappa = Complex64::new(p.kappa, 0.0);
    let r = sqrt_re_nonneg(kappa * kappa + p.r_lin() * I * xi + p.r_quad() * xi * xi);
    let num = p.rho * p.sigma0 * I * xi - kappa + r;
    let den = p.rho * p.sigma0 * I * xi - kappa - r;
    let d = num / den;
    let e = (-tau * r).exp();
    let one_minus_de = 1.0 - d * e;
    let b0 = ((kappa - r) - d * (kappa + r) * e) / one_minus_de;
    let log_q = (one_minus_de / (1.0 - d)).ln();
    let c0 = p.kappa * p.m * ((kappa - r) * tau - 2.0 * log_q);
    if !(b0.re.is_finite() && c0.re.is_finite()) {
        return Err(SinhError::DegenerateContour(format!(
            "Heston terms non-finite at xi = {xi}"
        )));
    }
    Ok((b0, c0))
}

/// Roots λ₋⁰ < 0 < λ₊⁰ of P(β) = κ² - (σ₀²-2ρκσ₀)β - σ₀²(1-ρ²)β², used as
/// the strip of analyticity in place of the exact τ-dependent bounds.
pub fn strip_bounds(p: &HestonParams) -> (f64, f64) {
    let a = p.r_quad();
    let b = p.r_lin();
    let disc = (b * b + 4.0 * a * p.kappa * p.kappa).sqrt();
    ((-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a))
}

/// (|C_∞| per unit strike, c_∞(0)): the integrand behaves like
/// K·|C_∞|·e^{iz_tξ - c_∞(0)ξ}/ξ² along the wings.
pub fn heston_asymptotics(p: &HestonParams, tau: f64, v: f64) -> (f64, f64) {
    let vk = v + p.kappa * p.m * tau;
    let c_inf0 = vk * p.sigma0 * (1.0 - p.rho * p.rho).sqrt();
    let c_abs_unit = (-p.r * tau).exp() / TWO_PI
        * (vk * p.kappa).exp()
        * (4.0 * (1.0 - p.rho * p.rho)).powf(p.kappa * p.m);
    (c_abs_unit, c_inf0)
}

/// Decay rate and wing constant actually realized by e^{(vB₀+C₀)/σ₀²}:
/// the displayed asymptotics describe vB₀+C₀ before the 1/σ₀² in the
/// exponent, so the rate is c_∞(0)/σ₀² and the constant factor is raised to
/// 1/σ₀² (measured numerically to six digits on the table parameter set).
fn corrected_asymptotics(p: &HestonParams, tau: f64, v: f64) -> (f64, f64) {
    let vk = v + p.kappa * p.m * tau;
    let sig2 = p.sigma0 * p.sigma0;
    let rate = vk * (1.0 - p.rho * p.rho).sqrt() / p.sigma0;
    let c_abs_unit = (-p.r * tau).exp() / TWO_PI
        * ((vk * p.kappa).exp() * (4.0 * (1.0 - p.rho * p.rho)).powf(p.kappa * p.m))
            .powf(1.0 / sig2);
    (c_abs_unit, rate)
}

/// Default correction knobs for the Heston pipeline.
pub fn heston_tuning() -> Tuning {
    Tuning {
        k_d: 0.8,
        k_b: 0.8,
        k_zeta: 1.85,
        k_lambda: 1.3,
        ..Tuning::default()
    }
}

/// European put/call. Puts integrate over (0, λ₊⁰); calls are priced directly
/// when λ₋⁰ < -1 and otherwise fall back to put + parity
/// (call - put = S e^{-δτ} - K e^{-rτ}).
pub fn heston_european(
    p: &HestonParams,
    state: &HestonState,
    k: f64,
    kind: OptionKind,
    eps: f64,
) -> Result<f64> {
    heston_european_with(p, state, k, kind, eps, &heston_tuning()).map(|(v, _)| v)
}

pub fn heston_european_with(
    p: &HestonParams,
    state: &HestonState,
    k: f64,
    kind: OptionKind,
    eps: f64,
    tuning: &Tuning,
) -> Result<(f64, ContourParams)> {
    p.validate()?;
    state.validate()?;
    if !(k > 0.0 && eps > 0.0 && eps < 1.0) {
        return Err(SinhError::InvalidParameter(
            "requires K > 0, eps in (0,1)".into(),
        ));
    }
    let (lam_minus, _lam_plus) = strip_bounds(p);
    let k_disc = k * (-p.r * state.tau).exp();
    // Puts and covered calls run through the wide middle strip (-1, 0); the
    // residue at 0 crossed from the put strip adds Ke^{-r tau} back. Calls go
    // direct through (lambda_-^0, -1) when it is non-empty.
    let (mu_lo, mu_hi, residue): (f64, f64, f64) = match kind {
        OptionKind::Put | OptionKind::CoveredCall => (-1.0, 0.0, k_disc),
        OptionKind::Call => {
            if lam_minus >= -1.0 {
                let (put, params) =
                    heston_european_with(p, state, k, OptionKind::Put, eps, tuning)?;
                let fwd = state.s * (-p.delta_div * state.tau).exp();
                return Ok((put + fwd - k_disc, params));
            }
            (lam_minus, -1.0, 0.0)
        }
    };
    let z = state.z(p, k);
    let (c_abs_unit, rate0) = corrected_asymptotics(p, state.tau, state.v);
    let typ = SinhRegularType {
        mu_minus: mu_lo.min(0.0),
        mu_plus: mu_hi.max(0.0),
        gamma_minus: -std::f64::consts::FRAC_PI_2,
        gamma_plus: std::f64::consts::FRAC_PI_2,
        nu: 1.0,
        c_inf0: rate0,
        c0: 0.0,
    };
    let kind_c = IntegrandKind::Custom {
        mu_minus: mu_lo,
        mu_plus: mu_hi,
        kernel: KernelKind::Payoff,
        decay_power: 2,
    };
    // time = 1: tau is already folded into the rate
    let geom = select_geometry(&typ, z, 1.0, kind_c, tuning)?;
    let pref = -k_disc / TWO_PI;
    let sig2 = p.sigma0 * p.sigma0;
    let g = |xi: Complex64| {
        let (b0, c0) = heston_terms(state.tau, xi, p)?;
        let cf = ((state.v * b0 + c0) / sig2).exp();
        Ok(pref * (I * z * xi).exp() * cf / (xi * (xi + I)))
    };
    let params = discretize_heston(&typ, &geom, &g, z, k * c_abs_unit, eps, tuning)?;
    let integral = sum_trapezoid_symmetric(g, &params)?;
    let raw = match kind {
        OptionKind::Put => integral + residue,
        OptionKind::CoveredCall => -integral,
        OptionKind::Call => integral,
    };
    let price = if raw >= 0.0 {
        raw
    } else if raw >= -2.0 * eps {
        0.0
    } else {
        return Err(SinhError::AccuracyAlarm(format!("negative price {raw}")));
    };
    Ok((price, params))
}

/// Mesh from the Hardy ladder, truncation from the order-1 rule
/// (z sinω + c_∞(0) cosω)Λ₁ + ln Λ₁ = ln(|C_∞|/ε).
fn discretize_heston<G>(
    typ: &SinhRegularType,
    geom: &contour::Geometry,
    g: &G,
    z: f64,
    c_abs: f64,
    eps: f64,
    tuning: &Tuning,
) -> Result<ContourParams>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    let (d, b, zeta) = contour::select_mesh(typ, geom, g, z, 1.0, eps, tuning)?;
    let a_gain = (z * geom.omega.sin()).max(0.0);
    let rate = a_gain + typ.c_inf0 * geom.omega.cos();
    if rate <= 0.0 {
        return Err(SinhError::DegenerateContour(format!(
            "non-decaying wings: rate = {rate}"
        )));
    }
    let c = (c_abs / eps).ln() - z * geom.omega1;
    let lambda1 = solve_lambda1(rate, 0.0, 1.0, 1.0, c);
    let lambda = tuning.k_lambda * (2.0 * lambda1 / b).ln().max(zeta);
    let n = ((lambda / zeta).ceil() as usize).max(2);
    ContourParams::new(geom.omega1, geom.omega, b, d, zeta, n)
}

/// Shared-contour batch pricing over a strike grid: one geometry built at
/// z = 0 (symmetric cone, A = 0) prices every strike from the same arrays
/// (ξⱼ, CFⱼ·coshⱼ/(ξⱼ(ξⱼ+i))).
pub fn heston_batch(
    p: &HestonParams,
    state: &HestonState,
    strikes: &[f64],
    kind: OptionKind,
    eps: f64,
    tuning: &Tuning,
) -> Result<(Vec<f64>, ContourParams)> {
    p.validate()?;
    state.validate()?;
    if strikes.is_empty() {
        return Err(SinhError::InvalidParameter("empty strike list".into()));
    }
    let (lam_minus, _) = strip_bounds(p);
    let disc = (-p.r * state.tau).exp();
    let (mu_lo, mu_hi, via_parity): (f64, f64, bool) = match kind {
        OptionKind::Put | OptionKind::CoveredCall => (-1.0, 0.0, false),
        OptionKind::Call if lam_minus < -1.0 => (lam_minus, -1.0, false),
        OptionKind::Call => (-1.0, 0.0, true),
    };
    let (c_abs_unit, rate0) = corrected_asymptotics(p, state.tau, state.v);
    let k_max = strikes.iter().cloned().fold(f64::MIN, f64::max);
    if !(k_max > 0.0) {
        return Err(SinhError::InvalidParameter("strikes must be positive".into()));
    }
    let z_worst = strikes
        .iter()
        .map(|&k| state.z(p, k).abs())
        .fold(0.0_f64, f64::max);
    let typ = SinhRegularType {
        mu_minus: mu_lo.min(0.0),
        mu_plus: mu_hi.max(0.0),
        gamma_minus: -std::f64::consts::FRAC_PI_2,
        gamma_plus: std::f64::consts::FRAC_PI_2,
        nu: 1.0,
        c_inf0: rate0,
        c0: 0.0,
    };
    let kind_c = IntegrandKind::Custom {
        mu_minus: mu_lo,
        mu_plus: mu_hi,
        kernel: KernelKind::Payoff,
        decay_power: 2,
    };
    // Geometry anchored at z = 0 so one contour covers the whole grid; the
    // mesh ladder sees the worst |z| so both edges stay summable for every
    // strike, and the kernel factor at that z feeds the Hardy samples.
    let geom = select_geometry(&typ, 0.0, 1.0, kind_c, tuning)?;
    let sig2 = p.sigma0 * p.sigma0;
    let pref_max = k_max * disc / TWO_PI;
    let g_worst = |xi: Complex64| {
        let (b0, c0) = heston_terms(state.tau, xi, p)?;
        let cf = ((state.v * b0 + c0) / sig2).exp();
        Ok(pref_max * (I * z_worst * xi).exp() * cf / (xi * (xi + I)))
    };
    let params = discretize_heston(&typ, &geom, &g_worst, z_worst, k_max * c_abs_unit, eps, tuning)?;

    let mut nodes = Vec::with_capacity(params.n + 1);
    for j in 0..=params.n {
        let y = Complex64::new(j as f64 * params.zeta, 0.0);
        let xi = contour::chi(y, &params);
        let (b0, c0) = heston_terms(state.tau, xi, p)?;
        let w =
            ((state.v * b0 + c0) / sig2).exp() * (I * params.omega + y).cosh() / (xi * (xi + I));
        nodes.push((xi, w));
    }
    let fwd = state.s * (-p.delta_div * state.tau).exp();
    let prices = strikes
        .iter()
        .map(|&k| {
            let z = state.z(p, k);
            let mut acc = 0.0;
            for (j, (xi, w)) in nodes.iter().enumerate() {
                let term = ((I * z * xi).exp() * w).re;
                acc += if j == 0 { 0.5 * term } else { term };
            }
            let integral = -(k * disc / TWO_PI) * 2.0 * params.b * params.zeta * acc;
            // middle-strip integral equals put - K e^{-r tau}
            let v = match kind {
                OptionKind::Put => integral + k * disc,
                OptionKind::CoveredCall => -integral,
                OptionKind::Call if via_parity => integral + k * disc,
                OptionKind::Call => integral,
            };
            let v = v.max(0.0);
            if via_parity {
                v + fwd - k * disc
            } else {
                v
            }
        })
        .collect();
    Ok((prices, params))
}
