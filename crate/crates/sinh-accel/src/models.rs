//! Characteristic exponents ψ(ξ) = -iμξ + ψ⁰(ξ) of the KoBoL/CGMY and NTS
//! families, their asymptotic coefficients and SINH-regularity descriptors.

use num_complex::Complex64;

use crate::contour::SinhRegularType;
use crate::error::{Result, SinhError};
use crate::math::{gamma_neg, gamma_pos, principal_pow};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// KoBoL (CGMY) parameters: ψ⁰(ξ) = cΓ(-ν)[λ₊^ν - (λ₊+iξ)^ν + (-λ₋)^ν - (-λ₋-iξ)^ν].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KoBoLParams {
    pub mu: f64,
    pub c: f64,
    pub nu: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl KoBoLParams {
    pub fn new(mu: f64, c: f64, nu: f64, lambda_plus: f64, lambda_minus: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(SinhError::InvalidParameter(format!("KoBoL c = {c} must be > 0")));
        }
        if !(nu > 0.0 && nu < 2.0) || (nu - 1.0).abs() < 1e-12 {
            return Err(SinhError::InvalidParameter(format!(
                "KoBoL nu = {nu} must be in (0,2) \\ {{1}}"
            )));
        }
        if !(lambda_minus < 0.0 && lambda_plus > 0.0) {
            return Err(SinhError::InvalidParameter(format!(
                "KoBoL requires lambda_- < 0 < lambda_+ (got {lambda_minus}, {lambda_plus})"
            )));
        }
        Ok(KoBoLParams { mu, c, nu, lambda_plus, lambda_minus })
    }

    /// Second instantaneous moment m₂ = ψ″(0) = cΓ(2-ν)[λ₊^{ν-2} + (-λ₋)^{ν-2}].
    pub fn m2(&self) -> f64 {
        self.c
            * gamma_pos(2.0 - self.nu)
            * (self.lambda_plus.powf(self.nu - 2.0) + (-self.lambda_minus).powf(self.nu - 2.0))
    }
}

/// NTS parameters: ψ⁰(ξ) = δ[(α² + (ξ+iβ)²)^{ν/2} - (α²-β²)^{ν/2}].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NtsParams {
    pub mu: f64,
    pub delta: f64,
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl NtsParams {
    pub fn new(mu: f64, delta: f64, nu: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(SinhError::InvalidParameter(format!("NTS delta = {delta} must be > 0")));
        }
        if !(nu > 0.0 && nu < 2.0) {
            return Err(SinhError::InvalidParameter(format!("NTS nu = {nu} must be in (0,2)")));
        }
        if !(alpha > 0.0 && beta.abs() < alpha) {
            return Err(SinhError::InvalidParameter(format!(
                "NTS requires |beta| < alpha (got alpha={alpha}, beta={beta})"
            )));
        }
        Ok(NtsParams { mu, delta, nu, alpha, beta })
    }

    /// Parameterize by the second instantaneous moment: δ = m₂·α^{2-ν}/ν for
    /// β = 0 (so that ψ″(0) = m₂); the general-β scale follows the same moment
    /// identity.
    pub fn from_second_moment(mu: f64, m2: f64, nu: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(m2 > 0.0) {
            return Err(SinhError::InvalidParameter(format!("m2 = {m2} must be > 0")));
        }
        let a2b2 = alpha * alpha - beta * beta;
        if a2b2 <= 0.0 {
            return Err(SinhError::InvalidParameter("requires |beta| < alpha".into()));
        }
        // psi''(0) = delta nu (alpha^2-beta^2)^{nu/2-2} (alpha^2 - (nu-1) beta^2)
        let scale = nu * a2b2.powf(nu / 2.0 - 2.0) * (alpha * alpha - (nu - 1.0) * beta * beta);
        NtsParams::new(mu, m2 / scale, nu, alpha, beta)
    }

    pub fn m2(&self) -> f64 {
        let a2b2 = self.alpha * self.alpha - self.beta * self.beta;
        self.delta
            * self.nu
            * a2b2.powf(self.nu / 2.0 - 2.0)
            * (self.alpha * self.alpha - (self.nu - 1.0) * self.beta * self.beta)
    }
}

/// Tagged union of the shipped exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevyModel {
    KoBoL(KoBoLParams),
    Nts(NtsParams),
}

/// ψ⁰ of KoBoL on the principal branch.
pub fn psi0_kobol(xi: Complex64, p: &KoBoLParams) -> Result<Complex64> {
    let g = gamma_neg(p.nu)?;
    let up = principal_pow(p.lambda_plus + I * xi, p.nu, "lambda_+ + i xi")?;
    let dn = principal_pow(-p.lambda_minus - I * xi, p.nu, "-lambda_- - i xi")?;
    Ok(p.c
        * g
        * (Complex64::new(
            p.lambda_plus.powf(p.nu) + (-p.lambda_minus).powf(p.nu),
            0.0,
        ) - up
            - dn))
}

/// ψ⁰ of NTS on the principal branch.
pub fn psi0_nts(xi: Complex64, p: &NtsParams) -> Result<Complex64> {
    let z = xi + I * p.beta;
    let w = principal_pow(p.alpha * p.alpha + z * z, p.nu / 2.0, "alpha^2 + (xi + i beta)^2")?;
    let c = (p.alpha * p.alpha - p.beta * p.beta).powf(p.nu / 2.0);
    Ok(p.delta * (w - c))
}

/// The open model registry: a characteristic exponent plugs in by providing
/// ψ⁰, the drift, the asymptotic coefficient and the type descriptor.
pub trait CharExponent {
    fn psi0(&self, xi: Complex64) -> Result<Complex64>;
    fn mu(&self) -> f64;
    /// ψ(ξ) = -iμξ + ψ⁰(ξ).
    fn psi(&self, xi: Complex64) -> Result<Complex64> {
        Ok(-I * self.mu() * xi + self.psi0(xi)?)
    }
    fn c_inf(&self, phi: f64) -> Complex64;
    fn sinh_type(&self) -> SinhRegularType;
    /// Second instantaneous moment ψ″(0).
    fn m2(&self) -> f64;
}

impl CharExponent for LevyModel {
    fn psi0(&self, xi: Complex64) -> Result<Complex64> {
        match self {
            LevyModel::KoBoL(p) => psi0_kobol(xi, p),
            LevyModel::Nts(p) => psi0_nts(xi, p),
        }
    }

    fn mu(&self) -> f64 {
        match self {
            LevyModel::KoBoL(p) => p.mu,
            LevyModel::Nts(p) => p.mu,
        }
    }

    fn c_inf(&self, phi: f64) -> Complex64 {
        c_inf(self, phi)
    }

    fn sinh_type(&self) -> SinhRegularType {
        type_of(self)
    }

    fn m2(&self) -> f64 {
        match self {
            LevyModel::KoBoL(p) => p.m2(),
            LevyModel::Nts(p) => p.m2(),
        }
    }
}

/// Asymptotic coefficient c_∞(φ): KoBoL → -2cΓ(-ν)cos(πν/2)e^{iνφ},
/// NTS → δe^{iνφ}.
pub fn c_inf(model: &LevyModel, phi: f64) -> Complex64 {
    match model {
        LevyModel::KoBoL(p) => {
            let c0 = -2.0
                * p.c
                * gamma_neg(p.nu).expect("validated nu")
                * (std::f64::consts::FRAC_PI_2 * p.nu).cos();
            c0 * (I * (p.nu * phi)).exp()
        }
        LevyModel::Nts(p) => p.delta * (I * (p.nu * phi)).exp(),
    }
}

/// SINH-regularity descriptor: strip from the poles/cuts, cone clamped to
/// ±min{π/2, π/(2ν)}, C₀ from the constant terms of ψ⁰.
pub fn type_of(model: &LevyModel) -> SinhRegularType {
    match model {
        LevyModel::KoBoL(p) => {
            let gamma = (std::f64::consts::FRAC_PI_2 / p.nu).min(std::f64::consts::FRAC_PI_2);
            SinhRegularType {
                mu_minus: p.lambda_minus,
                mu_plus: p.lambda_plus,
                gamma_minus: -gamma,
                gamma_plus: gamma,
                nu: p.nu,
                c_inf0: c_inf(model, 0.0).re,
                c0: p.c
                    * gamma_neg(p.nu).expect("validated nu")
                    * (p.lambda_plus.powf(p.nu) + (-p.lambda_minus).powf(p.nu)),
            }
        }
        LevyModel::Nts(p) => {
            let gamma = (std::f64::consts::FRAC_PI_2 / p.nu).min(std::f64::consts::FRAC_PI_2);
            // Cut points of (alpha^2 + (xi + i beta)^2)^{nu/2} sit at
            // xi = i(-beta +- alpha): strip (-alpha-beta, alpha-beta).
            SinhRegularType {
                mu_minus: -p.alpha - p.beta,
                mu_plus: p.alpha - p.beta,
                gamma_minus: -gamma,
                gamma_plus: gamma,
                nu: p.nu,
                c_inf0: p.delta,
                c0: p.delta * (p.alpha * p.alpha - p.beta * p.beta).powf(p.nu / 2.0),
            }
        }
    }
}
