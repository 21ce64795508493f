//! Small special-function kit: log-gamma, gamma on the negative axis via
//! reflection, and principal-branch complex powers with cut detection.

use num_complex::Complex64;

use crate::error::{Result, SinhError};

/// Lanczos coefficients, g = 607/128, 15 terms (Boost/GSL-grade accuracy).
const LANCZOS_G: f64 = 4.7421875;
const LANCZOS: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
];

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut sum = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (x + k as f64 - 1.0);
    }
    let t = x + LANCZOS_G - 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x - 0.5) * t.ln() - t + sum.ln()
}

/// Γ(x) for x > 0.
pub fn gamma_pos(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Γ(-nu) for nu in (0, 2), nu != 1, via the reflection identity
/// Γ(-nu)Γ(1+nu) = -π / (nu · sin(π nu)).
pub fn gamma_neg(nu: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&nu) || (nu - 1.0).abs() < 1e-12 {
        return Err(SinhError::InvalidParameter(format!(
            "gamma_neg requires nu in (0,2) \\ {{1}}, got {nu}"
        )));
    }
    Ok(-std::f64::consts::PI / ((std::f64::consts::PI * nu).sin() * gamma_pos(1.0 + nu)))
}

/// z^p on the principal branch, rejecting arguments on the cut (-inf, 0].
///
/// `what` names the quantity for the error message.
pub fn principal_pow(z: Complex64, p: f64, what: &str) -> Result<Complex64> {
    if z.re <= 0.0 && z.im.abs() < 1e-14 * (1.0 + z.re.abs()) {
        return Err(SinhError::BranchCut(format!(
            "{what} = {z} lies on the cut (-inf, 0]"
        )));
    }
    Ok(z.powf(p))
}

/// Principal log with the same cut check.
pub fn principal_ln(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re <= 0.0 && z.im.abs() < 1e-14 * (1.0 + z.re.abs()) {
        return Err(SinhError::BranchCut(format!(
            "{what} = {z} lies on the cut (-inf, 0]"
        )));
    }
    Ok(z.ln())
}

/// sqrt with Re >= 0 enforced (the branch used for R(ξ) and u(η)).
pub fn sqrt_re_nonneg(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re < 0.0 {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_known_values() {
        assert_relative_eq!(gamma_pos(0.5), std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_pos(1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_pos(5.0), 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_pos(1.3), 0.8974706963062772, max_relative = 1e-14);
    }

    #[test]
    fn gamma_neg_reflection() {
        // Γ(-1/2) = -2 sqrt(pi), Γ(-3/2) = 4 sqrt(pi)/3
        assert_relative_eq!(
            gamma_neg(0.5).unwrap(),
            -2.0 * std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gamma_neg(1.5).unwrap(),
            4.0 * std::f64::consts::PI.sqrt() / 3.0,
            max_relative = 1e-14
        );
        assert!(gamma_neg(1.0).is_err());
    }

    #[test]
    fn principal_pow_rejects_cut() {
        assert!(principal_pow(Complex64::new(-1.0, 0.0), 0.5, "z").is_err());
        assert!(principal_pow(Complex64::new(-1.0, 0.5), 0.5, "z").is_ok());
        let r = principal_pow(Complex64::new(4.0, 0.0), 0.5, "z").unwrap();
        assert_relative_eq!(r.re, 2.0, max_relative = 1e-15);
    }
}
