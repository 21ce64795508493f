//! CIR-clock characteristic function and European pricing for Lévy processes
//! time-changed by the integrated square-root process. The composed transform
//! Φ_CIR(τ, y₀; iψ(ξ)) decays like e^{-B·ρ^{ν/2}} along the wings, so the
//! Lévy pipeline applies with the effective order ν/2.

use num_complex::Complex64;

use crate::contour::{
    self, chi, select_geometry, sum_trapezoid_symmetric, ContourParams, IntegrandKind, KernelKind,
    SinhRegularType, TiltMode, Tuning,
};
use crate::error::{Result, SinhError};
use crate::levy::OptionKind;
use crate::math::sqrt_re_nonneg;
use crate::models::{CharExponent, LevyModel};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct CirSubordinatorParams {
    pub kappa: f64,
    pub theta: f64,
    /// Vol parameter λ > 0 of the clock.
    pub lambda: f64,
    /// Initial state y₀ ≥ 0.
    pub y0: f64,
}

impl CirSubordinatorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.theta > 0.0 && self.lambda > 0.0 && self.y0 >= 0.0) {
            return Err(SinhError::InvalidParameter(
                "kappa, theta, lambda must be positive, y0 >= 0".into(),
            ));
        }
        Ok(())
    }

    /// 2κθ/λ².
    pub fn gamma_exp(&self) -> f64 {
        2.0 * self.kappa * self.theta / (self.lambda * self.lambda)
    }

    /// The cut of u(η) sits at η = -iκ²/(2λ²); admissibility against a host
    /// exponent requires κ²/(2λ²) > -ψ(-i).
    pub fn cut_level(&self) -> f64 {
        self.kappa * self.kappa / (2.0 * self.lambda * self.lambda)
    }
}

/// Characteristic function of the integrated clock, E[e^{iηY_t} | y₀],
/// through the overflow-free factorization
/// [cosh(ut/2) + κ sinh(ut/2)/u]^γ =
/// e^{γut/2}(2u)^{-γ}(1+w²)^γ(u + κ(1-w²)/(1+w²))^γ with w² = e^{-ut}.
pub fn phi_cir(t: f64, y0: f64, eta: Complex64, p: &CirSubordinatorParams) -> Result<Complex64> {
    p.validate()?;
    if !(t > 0.0) {
        return Err(SinhError::InvalidParameter(format!("t = {t}")));
    }
    let arg = p.kappa * p.kappa - 2.0 * p.lambda * p.lambda * I * eta;
    if arg.re <= 0.0 && arg.im.abs() < 1e-14 * (1.0 + arg.re.abs()) {
        return Err(SinhError::BranchCut(format!(
            "eta = {eta} maps onto the cut of u(eta)"
        )));
    }
    let u = sqrt_re_nonneg(arg);
    let gamma = p.gamma_exp();
    let w2 = (-u * t).exp();
    let tanh_half = (1.0 - w2) / (1.0 + w2);
    let denom_log = gamma * (u * t / 2.0) - gamma * (2.0 * u).ln()
        + gamma * (1.0 + w2).ln()
        + gamma * (u + p.kappa * tanh_half).ln();
    let num = p.kappa * p.kappa * p.theta * t / (p.lambda * p.lambda)
        + 2.0 * y0 * I * eta / (p.kappa + u / tanh_half);
    let v = (num - denom_log).exp();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(SinhError::DegenerateContour(format!(
            "phi_cir non-finite at eta = {eta}"
        )));
    }
    Ok(v)
}

/// Direct textbook evaluation (no overflow guard); kept for the stable-form
/// equivalence check.
pub fn phi_cir_direct(
    t: f64,
    y0: f64,
    eta: Complex64,
    p: &CirSubordinatorParams,
) -> Result<Complex64> {
    let u = sqrt_re_nonneg(p.kappa * p.kappa - 2.0 * p.lambda * p.lambda * I * eta);
    let gamma = p.gamma_exp();
    let half = u * t / 2.0;
    let denom = (half.cosh() + p.kappa * half.sinh() / u).powc(Complex64::new(gamma, 0.0));
    let num = ((p.kappa * p.kappa * p.theta * t / (p.lambda * p.lambda))
        + 2.0 * y0 * I * eta / (p.kappa + u / half.tanh()))
    .exp();
    Ok(num / denom)
}

/// Strip (μ₋, μ₊) of analyticity of ξ ↦ Φ_CIR(t, y₀; iψ(ξ)): the host strip,
/// shrunk where κ² + 2λ²ψ(iμ) crosses zero (bisection on the convex ψ(i·)).
pub fn strip_subordinated(levy: &LevyModel, p: &CirSubordinatorParams) -> Result<(f64, f64)> {
    p.validate()?;
    let host = levy.sinh_type();
    let psi_im = |mu: f64| -> Result<f64> { Ok(levy.psi(Complex64::new(0.0, mu))?.re) };
    // admissibility at the pricing pole xi = -i
    if host.mu_minus < -1.0 {
        let at_pole = psi_im(-1.0)?;
        if p.cut_level() <= -at_pole {
            return Err(SinhError::UnsupportedModel(format!(
                "subordinator violates kappa^2/(2 lambda^2) > -psi(-i): {} <= {}",
                p.cut_level(),
                -at_pole
            )));
        }
    }
    let crit =
        |mu: f64| -> Result<f64> { Ok(p.kappa * p.kappa + 2.0 * p.lambda * p.lambda * psi_im(mu)?) };
    let edge = 1.0 - 1e-9;
    let mut mu_plus = host.mu_plus;
    if crit(edge * host.mu_plus)? < 0.0 {
        mu_plus = bisect_root(&crit, 0.0, edge * host.mu_plus)?;
    }
    let mut mu_minus = host.mu_minus;
    if crit(edge * host.mu_minus)? < 0.0 {
        mu_minus = bisect_root(&crit, edge * host.mu_minus, 0.0)?;
    }
    Ok((mu_minus, mu_plus))
}

fn bisect_root<F>(f: &F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let flo = f(lo)?;
    if flo * f(hi)? > 0.0 {
        return Err(SinhError::Convergence(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-12 {
            return Ok(mid);
        }
        if f(mid)? * flo <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// European call/put under the CIR-subordinated Lévy model,
/// -(Ke^{-rτ}/2π) ∫ e^{ixξ} Φ_CIR(τ, y₀; iψ(ξ)) / (ξ(ξ+i)) dξ, x = ln(S/K).
#[allow(clippy::too_many_arguments)]
pub fn subordinated_european(
    levy: &LevyModel,
    p: &CirSubordinatorParams,
    s: f64,
    k: f64,
    r: f64,
    tau: f64,
    kind: OptionKind,
    eps: f64,
) -> Result<f64> {
    subordinated_european_with(levy, p, s, k, r, tau, kind, eps, None, &Tuning::default())
        .map(|(v, _)| v)
}

/// Full-control variant; `cone` overrides the decay cone (γ⁻, γ⁺).
#[allow(clippy::too_many_arguments)]
pub fn subordinated_european_with(
    levy: &LevyModel,
    p: &CirSubordinatorParams,
    s: f64,
    k: f64,
    r: f64,
    tau: f64,
    kind: OptionKind,
    eps: f64,
    cone: Option<(f64, f64)>,
    tuning: &Tuning,
) -> Result<(f64, ContourParams)> {
    p.validate()?;
    if !(s > 0.0 && k > 0.0 && tau > 0.0 && eps > 0.0 && eps < 1.0) {
        return Err(SinhError::InvalidParameter(
            "requires S, K, tau > 0 and eps in (0,1)".into(),
        ));
    }
    let (mut mu_minus, mut mu_plus) = strip_subordinated(levy, p)?;
    let x = (s / k).ln();
    let host = levy.sinh_type();

    for attempt in 0..2 {
        let (mu_lo, mu_hi) = match kind {
            OptionKind::Call => (mu_minus, -1.0),
            OptionKind::Put => (0.0, mu_plus),
            OptionKind::CoveredCall => (-1.0, 0.0),
        };
        if mu_hi - mu_lo <= 0.0 {
            return Err(SinhError::EmptyStrip(format!(
                "subordinated strip ({mu_lo}, {mu_hi}) for {kind:?}"
            )));
        }
        // Composed wing decay: u(i psi) ~ lambda sqrt(2 c_inf) rho^{nu/2} e^{i nu phi/2},
        // so the effective order is nu/2 with coefficient sqrt(2 c_inf) kappa theta/lambda;
        // the e^{kappa^2 theta t / lambda^2} prefactor plays the C0 role. The cone
        // tolerates |phi| < pi/nu before Re u flips sign.
        let eff = SinhRegularType {
            mu_minus: mu_lo.min(0.0),
            mu_plus: mu_hi.max(0.0),
            gamma_minus: -(std::f64::consts::PI / host.nu).min(std::f64::consts::FRAC_PI_2),
            gamma_plus: (std::f64::consts::PI / host.nu).min(std::f64::consts::FRAC_PI_2),
            nu: host.nu / 2.0,
            c_inf0: (2.0 * host.c_inf0).sqrt() * p.kappa * p.theta / p.lambda,
            c0: p.kappa * p.kappa * p.theta / (p.lambda * p.lambda),
        };
        let kind_c = IntegrandKind::Custom {
            mu_minus: mu_lo,
            mu_plus: mu_hi,
            kernel: KernelKind::Payoff,
            decay_power: 2,
        };
        // one-sided cones whenever x != 0 (the Lambda rule is built around
        // A = |x sin w|), symmetric only at the money
        let tuning_eff = Tuning {
            tilt: if cone.is_some() { tuning.tilt } else { TiltMode::ForceTilt },
            cone_override: cone,
            ..*tuning
        };
        let geom = select_geometry(&eff, x, tau, kind_c, &tuning_eff)?;
        let pref = -k * (-r * tau).exp() / TWO_PI;
        let g = |xi: Complex64| {
            let eta = I * levy.psi(xi)?;
            Ok(pref * (I * x * xi).exp() * phi_cir(tau, p.y0, eta, p)? / (xi * (xi + I)))
        };
        let eps_trunc = eps / (k * (-r * tau).exp());
        let params =
            match contour::discretize(&eff, &geom, &g, x, tau, eps, eps_trunc, 2, &tuning_eff) {
                Ok(ps) => ps,
                Err(e) => {
                    if attempt == 0 {
                        mu_minus *= 0.5;
                        mu_plus *= 0.5;
                        continue;
                    }
                    return Err(e);
                }
            };
        // the image of the contour under kappa^2 + 2 lambda^2 psi must stay
        // off the cut (-inf, 0]
        if let Err(e) = verify_cut_clearance(levy, p, &params) {
            if attempt == 0 {
                mu_minus *= 0.5;
                mu_plus *= 0.5;
                continue;
            }
            return Err(e);
        }
        let raw = sum_trapezoid_symmetric(g, &params)?;
        let raw = if kind == OptionKind::CoveredCall { -raw } else { raw };
        let value = if raw >= 0.0 {
            raw
        } else if raw >= -2.0 * eps {
            0.0
        } else {
            return Err(SinhError::AccuracyAlarm(format!("negative price {raw}")));
        };
        return Ok((value, params));
    }
    unreachable!()
}

fn verify_cut_clearance(
    levy: &LevyModel,
    p: &CirSubordinatorParams,
    params: &ContourParams,
) -> Result<()> {
    let two_l2 = 2.0 * p.lambda * p.lambda;
    for j in 0..=32 {
        let y = (j as f64 / 32.0) * params.lambda;
        for sign in [-1.0, 1.0] {
            let xi = chi(Complex64::new(sign * y, 0.0), params);
            let w = p.kappa * p.kappa + two_l2 * levy.psi(xi)?;
            if w.re <= 0.0 && w.im.abs() < 1e-12 * (1.0 + w.re.abs()) {
                return Err(SinhError::DegenerateContour(format!(
                    "contour image touches the subordinator cut at xi = {xi}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::NtsParams;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn sub_params() -> CirSubordinatorParams {
        CirSubordinatorParams { kappa: 1.6, theta: 0.01, lambda: 0.25, y0: 0.02 }
    }

    fn nts_host() -> LevyModel {
        // the table displays delta = 0.097; the prices pin the exact
        // second-moment normalization 0.1 * 3^{0.4} / 1.6 = 0.09699...
        LevyModel::Nts(NtsParams::from_second_moment(0.0, 0.1, 1.6, 3.0, 0.0).unwrap())
    }

    #[test]
    fn phi_at_zero_is_one() {
        let p = sub_params();
        for (t, y0) in [(0.004, 0.02), (1.0, 0.0), (2.5, 1.3)] {
            let v = phi_cir(t, y0, Complex64::new(0.0, 0.0), &p).unwrap();
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-14);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn phi_bounded_on_reals() {
        let p = sub_params();
        for eta in [-500.0, -3.0, 0.1, 40.0, 900.0] {
            let v = phi_cir(0.4, 0.02, Complex64::new(eta, 0.0), &p).unwrap();
            assert!(v.norm() <= 1.0 + 1e-12, "|phi| = {} at eta = {eta}", v.norm());
        }
    }

    #[test]
    fn stable_and_direct_forms_agree() {
        let p = sub_params();
        for eta in [-1000.0, -10.0, 0.5, 10.0, 1000.0] {
            let a = phi_cir(0.4, 0.02, Complex64::new(eta, 0.0), &p).unwrap();
            let b = phi_cir_direct(0.4, 0.02, Complex64::new(eta, 0.0), &p).unwrap();
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-13);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-13);
        }
    }

    #[test]
    fn w_squared_in_unit_disc() {
        let p = sub_params();
        for (re, im) in [(3.0, 0.2), (-7.0, 1.5), (100.0, -20.0)] {
            let eta = Complex64::new(re, im);
            let u = sqrt_re_nonneg(p.kappa * p.kappa - 2.0 * p.lambda * p.lambda * I * eta);
            let w2 = (-u * 0.4).exp();
            assert!(w2.norm() < 1.0);
        }
    }

    #[test]
    fn strip_of_table_host() {
        let (lo, hi) = strip_subordinated(&nts_host(), &sub_params()).unwrap();
        // kappa^2 + 2 lambda^2 psi stays positive on the whole host strip
        assert_relative_eq!(hi, 3.0, max_relative = 1e-9);
        assert_relative_eq!(lo, -3.0, max_relative = 1e-9);
        // root-finding branch: crank lambda until the strip must shrink
        let strong = CirSubordinatorParams { lambda: 4.0, ..sub_params() };
        let (lo2, hi2) = strip_subordinated(&nts_host(), &strong).unwrap();
        assert!(hi2 < 3.0 && lo2 > -3.0);
        let crit = |mu: f64| {
            strong.kappa * strong.kappa
                + 2.0
                    * strong.lambda
                    * strong.lambda
                    * nts_host().psi(Complex64::new(0.0, mu)).unwrap().re
        };
        assert_abs_diff_eq!(crit(hi2), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(crit(lo2), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_clock_recovers_host_strip() {
        let weak = CirSubordinatorParams { lambda: 1e-6, ..sub_params() };
        let (lo, hi) = strip_subordinated(&nts_host(), &weak).unwrap();
        assert_relative_eq!(hi, 3.0, max_relative = 1e-9);
        assert_relative_eq!(lo, -3.0, max_relative = 1e-9);
    }

    #[test]
    fn table_call_prices() {
        let levy = nts_host();
        let p = sub_params();
        for (x, expect) in [(-0.1_f64, 0.000439001), (0.0, 0.047791256)] {
            let k = 100.0 * (-x).exp();
            let v =
                subordinated_european(&levy, &p, 100.0, k, 0.02, 0.004, OptionKind::Call, 1e-15)
                    .unwrap();
            assert_abs_diff_eq!(v, expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn cone_choices_agree() {
        let levy = nts_host();
        let p = sub_params();
        let k = 100.0 * 0.1_f64.exp();
        let t = Tuning::default();
        let (a, _) = subordinated_european_with(
            &levy,
            &p,
            100.0,
            k,
            0.02,
            0.004,
            OptionKind::Call,
            1e-15,
            Some((-std::f64::consts::PI / 3.0, 0.0)),
            &t,
        )
        .unwrap();
        let (b, _) = subordinated_european_with(
            &levy,
            &p,
            100.0,
            k,
            0.02,
            0.004,
            OptionKind::Call,
            1e-15,
            Some((-std::f64::consts::FRAC_PI_2, 0.0)),
            &t,
        )
        .unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-13);
    }

    #[test]
    fn truncation_honesty() {
        // extending Lambda by 20% moves the price by less than eps
        let levy = nts_host();
        let p = sub_params();
        let eps = 1e-12;
        let t = Tuning::default();
        let t_long = Tuning { k_lambda: 1.2, ..t };
        let k = 100.0 * 0.1_f64.exp();
        let (a, _) = subordinated_european_with(
            &levy, &p, 100.0, k, 0.02, 0.004, OptionKind::Call, eps, None, &t,
        )
        .unwrap();
        let (b, _) = subordinated_european_with(
            &levy, &p, 100.0, k, 0.02, 0.004, OptionKind::Call, eps, None, &t_long,
        )
        .unwrap();
        assert_abs_diff_eq!(a, b, epsilon = eps);
    }

    #[test]
    fn clock_pdf_integrates_to_one() {
        // pdf of Y_t through a lower-half-plane cone integrates to ~1 on
        // [0, 20 E[Y_t]]
        let p = sub_params();
        let t = 0.25;
        let mean = p.theta * t + (p.y0 - p.theta) * (1.0 - (-p.kappa * t).exp()) / p.kappa;
        let params = ContourParams::new(
            0.0,
            -std::f64::consts::FRAC_PI_4,
            0.9 * p.cut_level(),
            0.5,
            0.05,
            400,
        )
        .unwrap();
        let pdf = |y: f64| {
            sum_trapezoid_symmetric(
                |eta| Ok((-I * y * eta).exp() * phi_cir(t, p.y0, eta, &p)? / TWO_PI),
                &params,
            )
            .unwrap()
        };
        let m = 2000;
        let h = 20.0 * mean / m as f64;
        let mut total = 0.5 * (pdf(1e-12) + pdf(20.0 * mean));
        for i in 1..m {
            total += pdf(i as f64 * h);
        }
        total *= h;
        assert_relative_eq!(total, 1.0, max_relative = 1e-6);
    }
}
