//! pdf, cdf, pdf-derivative and European vanilla prices for SINH-regular
//! Lévy models through the sinh-accelerated trapezoid rule.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::contour::{
    discretize, sum_trapezoid_symmetric, ContourParams, IntegrandKind, Tuning,
};
use crate::error::{Result, SinhError};
use crate::models::{CharExponent, LevyModel};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

static NEGATIVE_CLAMPS: AtomicU64 = AtomicU64::new(0);

/// Number of pdf/price evaluations whose slightly negative result (within the
/// tolerance band) was clamped to zero.
pub fn negative_clamp_count() -> u64 {
    NEGATIVE_CLAMPS.load(Ordering::Relaxed)
}

fn clamp_nonnegative(value: f64, band: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        return Ok(value);
    }
    if value >= -band {
        NEGATIVE_CLAMPS.fetch_add(1, Ordering::Relaxed);
        return Ok(0.0);
    }
    Err(SinhError::AccuracyAlarm(format!(
        "{what} = {value} below -{band}"
    )))
}

/// A density/cdf evaluation request.
#[derive(Debug, Clone, Copy)]
pub struct LevyQuery {
    pub model: LevyModel,
    /// Time horizon in years, > 0.
    pub t: f64,
    /// Evaluation point; the shifted argument is x' = x - mu t.
    pub x: f64,
    pub eps: f64,
}

impl LevyQuery {
    fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) {
            return Err(SinhError::InvalidParameter(format!("t = {}", self.t)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(SinhError::InvalidParameter(format!("eps = {}", self.eps)));
        }
        Ok(())
    }

    pub fn x_prime(&self) -> f64 {
        self.x - self.model.mu() * self.t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptionKind {
    Call,
    Put,
    CoveredCall,
}

/// A European vanilla pricing request; x' = ln(S/K) + mu tau.
#[derive(Debug, Clone, Copy)]
pub struct EuropeanQuery {
    pub model: LevyModel,
    pub r: f64,
    pub tau: f64,
    pub s: f64,
    pub k: f64,
    pub kind: OptionKind,
    pub eps: f64,
}

impl EuropeanQuery {
    fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.s > 0.0 && self.k > 0.0) {
            return Err(SinhError::InvalidParameter(
                "tau, S, K must be positive".into(),
            ));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(SinhError::InvalidParameter(format!("eps = {}", self.eps)));
        }
        Ok(())
    }

    pub fn x_prime(&self) -> f64 {
        (self.s / self.k).ln() + self.model.mu() * self.tau
    }
}

/// pdf via (1/2π)∫ e^{-ix'ξ - tψ⁰(ξ)} dξ on the deformed contour.
pub fn pdf(q: &LevyQuery) -> Result<f64> {
    pdf_with(q, &Tuning::default()).map(|(v, _)| v)
}

pub fn pdf_with(q: &LevyQuery, tuning: &Tuning) -> Result<(f64, ContourParams)> {
    q.validate()?;
    let typ = q.model.sinh_type();
    let xp = q.x_prime();
    let geom = crate::contour::select_geometry(&typ, xp, q.t, IntegrandKind::Pdf, tuning)?;
    let g = |xi: Complex64| Ok(((-I * xp * xi) - q.t * q.model.psi0(xi)?).exp() / TWO_PI);
    let p = discretize(&typ, &geom, &g, xp, q.t, q.eps, q.eps, 0, tuning)?;
    let raw = sum_trapezoid_symmetric(g, &p)?;
    Ok((clamp_nonnegative(raw, 2.0 * q.eps, "pdf")?, p))
}

/// pdf derivative: the factor -iξ inserted under the integral.
pub fn pdf_derivative(q: &LevyQuery) -> Result<f64> {
    pdf_derivative_with(q, &Tuning::default()).map(|(v, _)| v)
}

pub fn pdf_derivative_with(q: &LevyQuery, tuning: &Tuning) -> Result<(f64, ContourParams)> {
    q.validate()?;
    let typ = q.model.sinh_type();
    let xp = q.x_prime();
    let geom = crate::contour::select_geometry(&typ, xp, q.t, IntegrandKind::Pdf, tuning)?;
    let g = |xi: Complex64| {
        Ok((-I * xi) * ((-I * xp * xi) - q.t * q.model.psi0(xi)?).exp() / TWO_PI)
    };
    let p = discretize(&typ, &geom, &g, xp, q.t, q.eps, q.eps, 0, tuning)?;
    Ok((sum_trapezoid_symmetric(g, &p)?, p))
}

/// Which strip the cdf integral runs through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfRoute {
    Auto,
    Upper,
    Lower,
}

/// cdf via the upper-strip integral, or 1 + the lower-strip integral after
/// the residue at ξ = 0 is crossed. The lower route is taken when x' > 0, or
/// when the upper strip is much thinner than the lower one.
pub fn cdf(q: &LevyQuery) -> Result<f64> {
    cdf_with(q, CdfRoute::Auto, &Tuning::default()).map(|(v, _)| v)
}

pub fn cdf_with(q: &LevyQuery, route: CdfRoute, tuning: &Tuning) -> Result<(f64, ContourParams)> {
    q.validate()?;
    let typ = q.model.sinh_type();
    let xp = q.x_prime();
    let lower = match route {
        CdfRoute::Upper => false,
        CdfRoute::Lower => true,
        CdfRoute::Auto => xp > 0.0 || (-typ.mu_minus > typ.mu_plus && typ.mu_plus < 0.1),
    };
    let kind = if lower {
        IntegrandKind::CdfLower
    } else {
        IntegrandKind::CdfUpper
    };
    let geom = crate::contour::select_geometry(&typ, xp, q.t, kind, tuning)?;
    let g = |xi: Complex64| {
        Ok(((-I * xp * xi) - q.t * q.model.psi0(xi)?).exp() / (-I * xi) / TWO_PI)
    };
    let p = discretize(&typ, &geom, &g, xp, q.t, q.eps, q.eps, 1, tuning)?;
    let correction = if lower { 1.0 } else { 0.0 };
    Ok((correction + sum_trapezoid_symmetric(g, &p)?, p))
}

/// European vanilla price
/// -(Ke^{-rτ}/2π)∫ e^{ix'ξ - τψ⁰(ξ)} / (ξ(ξ+i)) dξ
/// over the strip fixed by the payoff kind. The covered-call integral runs in
/// the middle strip (-1, 0); its value is put - Ke^{-rτ}, i.e. minus the price
/// of the min(S_T, K) claim, so the covered-call price is the negated integral.
pub fn european_price(q: &EuropeanQuery) -> Result<f64> {
    european_price_with(q, &Tuning::default()).map(|(v, _)| v)
}

pub fn european_price_with(
    q: &EuropeanQuery,
    tuning: &Tuning,
) -> Result<(f64, ContourParams)> {
    q.validate()?;
    let typ = q.model.sinh_type();
    if q.kind == OptionKind::Call && typ.mu_minus >= -1.0 {
        return Err(SinhError::UnsupportedModel(format!(
            "call pricing needs mu_- < -1, model strip starts at {}",
            typ.mu_minus
        )));
    }
    let kind = match q.kind {
        OptionKind::Call => IntegrandKind::Call,
        OptionKind::Put => IntegrandKind::Put,
        OptionKind::CoveredCall => IntegrandKind::CoveredCall,
    };
    let xp = q.x_prime();
    let pref = -q.k * (-q.r * q.tau).exp() / TWO_PI;
    let geom = crate::contour::select_geometry(&typ, xp, q.tau, kind, tuning)?;
    let g = |xi: Complex64| {
        let num = ((I * xp * xi) - q.tau * q.model.psi0(xi)?).exp();
        Ok(pref * num / (xi * (xi + I)))
    };
    let eps_trunc = q.eps / (q.k * (-q.r * q.tau).exp());
    let p = discretize(&typ, &geom, &g, xp, q.tau, q.eps, eps_trunc, 2, tuning)?;
    let mut raw = sum_trapezoid_symmetric(g, &p)?;
    if q.kind == OptionKind::CoveredCall {
        raw = -raw;
    }
    Ok((clamp_nonnegative(raw, 2.0 * q.eps, "price")?, p))
}

/// Forward factor of the parity identity: call - put = S·e^{-(r+ψ(-i))τ} - K·e^{-rτ}.
pub fn parity_forward_factor(model: &LevyModel, r: f64, tau: f64) -> Result<f64> {
    let psi_mi = model.psi(-I)?;
    Ok((-(r + psi_mi.re) * tau).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::TiltMode;
    use crate::models::{KoBoLParams, NtsParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn nts(nu: f64) -> LevyModel {
        LevyModel::Nts(NtsParams::from_second_moment(0.0, 0.1, nu, 10.0, 0.0).unwrap())
    }

    fn kobol_61() -> LevyModel {
        LevyModel::KoBoL(KoBoLParams::new(0.0, 0.6, 0.7, 5.0, -10.0).unwrap())
    }

    #[test]
    fn nts_peak_table_values() {
        // Frozen 12-digit oracle values (high-precision quadrature of the
        // flat integral after the xi = alpha sinh s substitution).
        let cases = [
            (0.3, 27813.7583243051),
            (0.5, 1077.36379734891),
            (0.9, 111.103246642154),
            (1.1, 64.5381219540775),
            (1.5, 32.7368301790363),
            (1.9, 21.6193635942162),
        ];
        for (nu, expect) in cases {
            let q = LevyQuery { model: nts(nu), t: 0.004, x: 0.0, eps: 1e-15 };
            let (v, p) = pdf_with(&q, &Tuning::default()).unwrap();
            assert_relative_eq!(v, expect, max_relative = 1e-11);
            assert!(p.n <= 40, "nu={nu}: N = {}", p.n);
        }
    }

    #[test]
    fn nts_left_tail_table_values() {
        let model = nts(0.3);
        // Frozen 12-digit oracle values (oscillatory quadrature); the table
        // displays 0.0029428 for the first one, half an ulp off its own
        // benchmark, so the display comparison allows one ulp.
        for (x, oracle, displayed, ulp) in [
            (-0.3, 0.00294274816969, 0.0029428, 1e-7),
            (-0.1, 0.0777611864468, 0.0777612, 1e-7),
            (-0.01, 2.9383583927, 2.93835839, 1e-8),
        ] {
            let q = LevyQuery { model, t: 0.004, x, eps: 1e-15 };
            let v = pdf(&q).unwrap();
            assert_relative_eq!(v, oracle, max_relative = 1e-9);
            assert_abs_diff_eq!(v, displayed, epsilon = 1.0 * ulp);
        }
        // eps = 1e-7 runs stay compact and accurate
        for (x, expect) in [(-0.3, 0.0029428), (-0.1, 0.0777612), (-0.01, 2.93835839)] {
            let q = LevyQuery { model, t: 0.004, x, eps: 1e-7 };
            let (v, p) = pdf_with(&q, &Tuning::default()).unwrap();
            assert!(p.n <= 25, "N = {} at x = {x}", p.n);
            assert_abs_diff_eq!(v, expect, epsilon = 5e-7);
        }
    }

    #[test]
    fn pdf_symmetric_model_even() {
        let q1 = LevyQuery { model: nts(0.7), t: 0.004, x: 0.07, eps: 1e-12 };
        let q2 = LevyQuery { model: nts(0.7), t: 0.004, x: -0.07, eps: 1e-12 };
        assert_abs_diff_eq!(pdf(&q1).unwrap(), pdf(&q2).unwrap(), epsilon = 2e-12);
    }

    #[test]
    fn cdf_limits_and_monotone() {
        let model = kobol_61();
        // far enough out that the exponential tail e^{-lambda_+ x} is below
        // tolerance (40 sd of this short-horizon law is not; the jump tail
        // dominates the Gaussian scale)
        let sd = (model.m2() * 0.001_f64).sqrt();
        let hi = LevyQuery { model, t: 0.001, x: (40.0 * sd).max(3.0), eps: 1e-10 };
        assert_abs_diff_eq!(cdf(&hi).unwrap(), 1.0, epsilon = 2e-10);
        let mut prev = -1.0;
        for i in 0..21 {
            let x = -0.05 + 0.005 * i as f64;
            let q = LevyQuery { model, t: 0.001, x, eps: 1e-10 };
            let v = cdf(&q).unwrap();
            assert!(v >= prev - 2e-10, "cdf not monotone at {x}");
            prev = v;
        }
    }

    #[test]
    fn cdf_kobol_quantile_point() {
        let q = LevyQuery { model: kobol_61(), t: 0.001, x: -1.6707581397416, eps: 1e-12 };
        let v = cdf(&q).unwrap();
        assert_abs_diff_eq!(v, 1e-8, epsilon = 1e-11);
    }

    #[test]
    fn cdf_routes_agree() {
        let model = kobol_61();
        for x in [-0.02, 0.0, 0.015] {
            let q = LevyQuery { model, t: 0.001, x, eps: 1e-12 };
            let (u, _) = cdf_with(&q, CdfRoute::Upper, &Tuning::default()).unwrap();
            let (l, _) = cdf_with(&q, CdfRoute::Lower, &Tuning::default()).unwrap();
            assert_abs_diff_eq!(u, l, epsilon = 4e-12);
        }
    }

    #[test]
    fn cdf_derivative_is_pdf() {
        let model = kobol_61();
        let h = 1e-5;
        for x in [-0.02, 0.01] {
            let c = |x: f64| cdf(&LevyQuery { model, t: 0.001, x, eps: 1e-12 }).unwrap();
            let fd = (c(x + h) - c(x - h)) / (2.0 * h);
            let p = pdf(&LevyQuery { model, t: 0.001, x, eps: 1e-12 }).unwrap();
            assert_relative_eq!(fd, p, max_relative = 1e-6);
        }
    }

    #[test]
    fn pdf_derivative_against_finite_difference() {
        let model = kobol_61();
        for x in [-1.0, -0.01, 0.004, 0.3] {
            let d = pdf_derivative(&LevyQuery { model, t: 0.001, x, eps: 1e-13 }).unwrap();
            let f = |x: f64| pdf(&LevyQuery { model, t: 0.001, x, eps: 1e-13 }).unwrap();
            let fd_at = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
            let fd = (4.0 * fd_at(5e-6) - fd_at(1e-5)) / 3.0;
            assert_relative_eq!(d, fd, max_relative = 1e-6, epsilon = 1e-9);
        }
        // odd integrand at the peak of a symmetric model
        let d0 = pdf_derivative(&LevyQuery { model: nts(0.7), t: 0.004, x: 0.0, eps: 1e-12 })
            .unwrap();
        assert_abs_diff_eq!(d0, 0.0, epsilon = 2e-12);
        // negative beyond the mode
        for x in [0.01, 0.05, 0.2] {
            let d = pdf_derivative(&LevyQuery { model: nts(0.7), t: 0.004, x, eps: 1e-12 })
                .unwrap();
            assert!(d < 0.0);
        }
    }

    #[test]
    fn parity_identity() {
        // call - put = S e^{-(r + psi(-i)) tau} - K e^{-r tau}
        let model = LevyModel::KoBoL(KoBoLParams::new(0.05, 0.6, 0.7, 5.0, -10.0).unwrap());
        let eps = 1e-12;
        let (r, tau, s) = (0.02, 0.25, 100.0);
        for k in [90.0, 100.0, 111.0] {
            let call = european_price(&EuropeanQuery {
                model, r, tau, s, k, kind: OptionKind::Call, eps,
            })
            .unwrap();
            let put = european_price(&EuropeanQuery {
                model, r, tau, s, k, kind: OptionKind::Put, eps,
            })
            .unwrap();
            let fwd = s * parity_forward_factor(&model, r, tau).unwrap();
            assert_abs_diff_eq!(call - put, fwd - k * (-r * tau).exp(), epsilon = 4.0 * eps * 100.0);
        }
    }

    #[test]
    fn covered_call_residue_accounting() {
        let model = kobol_61();
        let eps = 1e-12;
        let (r, tau, s, k) = (0.03, 0.5, 100.0, 98.0);
        let put = european_price(&EuropeanQuery { model, r, tau, s, k, kind: OptionKind::Put, eps })
            .unwrap();
        let cc = european_price(&EuropeanQuery {
            model, r, tau, s, k, kind: OptionKind::CoveredCall, eps,
        })
        .unwrap();
        assert_abs_diff_eq!(cc + put, k * (-r * tau).exp(), epsilon = 4.0 * eps * 100.0);
    }

    #[test]
    fn call_requires_deep_lower_strip() {
        // lambda_- = -0.8 > -1: the call transform strip is empty
        let model = LevyModel::KoBoL(KoBoLParams::new(0.0, 0.6, 0.7, 5.0, -0.8).unwrap());
        let q = EuropeanQuery {
            model, r: 0.0, tau: 0.1, s: 100.0, k: 100.0, kind: OptionKind::Call, eps: 1e-10,
        };
        assert!(matches!(european_price(&q), Err(SinhError::UnsupportedModel(_))));
    }

    #[test]
    fn price_homogeneity() {
        let model = kobol_61();
        let base = EuropeanQuery {
            model, r: 0.02, tau: 0.5, s: 100.0, k: 95.0, kind: OptionKind::Put, eps: 1e-12,
        };
        let v = european_price(&base).unwrap();
        let scaled = EuropeanQuery { s: 250.0, k: 237.5, ..base };
        let vs = european_price(&scaled).unwrap();
        assert_relative_eq!(vs, 2.5 * v, max_relative = 1e-11);
    }

    #[test]
    fn tilted_and_symmetric_cones_agree_for_high_order() {
        let model = nts(1.5);
        let eps = 1e-12;
        for x in [-0.04, 0.03] {
            let q = LevyQuery { model, t: 0.004, x, eps };
            let sym = pdf_with(&q, &Tuning { tilt: TiltMode::ForceSymmetric, ..Tuning::default() })
                .unwrap()
                .0;
            let tilt = pdf_with(&q, &Tuning { tilt: TiltMode::ForceTilt, ..Tuning::default() })
                .unwrap()
                .0;
            assert_abs_diff_eq!(sym, tilt, epsilon = 2.0 * eps * (1.0 + sym.abs()));
        }
    }

    #[test]
    fn deep_itm_dominates_intrinsic() {
        let model = kobol_61();
        let q = EuropeanQuery {
            model, r: 0.02, tau: 0.1, s: 80.0, k: 100.0, kind: OptionKind::Put, eps: 1e-12,
        };
        let put = european_price(&q).unwrap();
        let fwd = 80.0 * parity_forward_factor(&model, 0.02, 0.1).unwrap();
        let intrinsic = (100.0 * (-0.02_f64 * 0.1).exp() - fwd).max(0.0);
        assert!(put >= intrinsic - 2e-12 * 100.0);
    }
}
