//! Conformal-principal-component caching, cdf/pdf evaluation from the cached
//! arrays, quantile-grid construction over the ln-cdf, and quantile inversion
//! (quadratic on the log, Newton in the tails, bisection fallback).

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;

use crate::contour::{self, select_geometry, IntegrandKind, Tuning};
use crate::error::{Result, SinhError};
use crate::levy::{self, LevyQuery};
use crate::models::{CharExponent, LevyModel};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

static NEWTON_FALLBACKS: AtomicU64 = AtomicU64::new(0);

/// Number of tail inversions that fell back from Newton to bisection.
pub fn newton_fallback_count() -> u64 {
    NEWTON_FALLBACKS.load(Ordering::Relaxed)
}

/// Which side of the distribution a component set serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// Valid for x <= anchor; upper-strip cdf (no residue).
    Left,
    /// Valid for x >= anchor; lower-strip cdf (cdf = 1 + sum).
    Right,
    /// Anchored at the peak; upper-strip cdf, valid near the center.
    Center,
}

/// The cached arrays (xi_j, Exp_j): contour nodes and exponential weights
/// Exp_j = e^{-t psi(xi_j)} cosh(i w + j zeta), reusable across evaluation
/// points on the tail's side of the anchor.
#[derive(Debug, Clone)]
pub struct PrincipalComponents {
    pub xi: Vec<Complex64>,
    pub exp_terms: Vec<Complex64>,
    pub zeta: f64,
    pub b: f64,
    pub n: usize,
    pub tail: Tail,
    /// Anchoring edge (x_1 for Left, x_M for Right, the peak for Center).
    pub anchor: f64,
    /// 0 above the pole, 1 below (the crossed residue).
    cdf_offset: f64,
    /// tolerance the arrays were built for
    pub eps: f64,
}

/// Build components for a tail, anchored at `anchor` (ignored for Center,
/// which anchors at x' = 0).
pub fn build_components(
    model: &LevyModel,
    t: f64,
    tail: Tail,
    anchor: f64,
    eps: f64,
) -> Result<PrincipalComponents> {
    build_components_with(model, t, tail, anchor, eps, &Tuning::default())
}

pub fn build_components_with(
    model: &LevyModel,
    t: f64,
    tail: Tail,
    anchor: f64,
    eps: f64,
    tuning: &Tuning,
) -> Result<PrincipalComponents> {
    let typ = model.sinh_type();
    let mu = model.mu();
    let (x_anchor, kind, offset) = match tail {
        Tail::Left => (anchor, IntegrandKind::CdfUpper, 0.0),
        Tail::Right => (anchor, IntegrandKind::CdfLower, 1.0),
        Tail::Center => (mu * t, IntegrandKind::CdfUpper, 0.0),
    };
    let xp = x_anchor - mu * t;
    let geom = select_geometry(&typ, xp, t, kind, tuning)?;
    // Deep-tail quantiles need the cdf RELATIVELY accurate where F is 1e-8
    // and smaller, so the arrays are built to a much finer absolute target;
    // the term count only grows logarithmically with it.
    let eps_int = (eps * 1e-8).max(1e-24);
    // mesh selected on the xi-weighted integrand so the same arrays serve
    // F'' (and F') to the tolerance, not only the damped cdf sum
    let g_weighted = |xi: Complex64| {
        Ok((-I * xi) * ((-I * xp * xi) - t * model.psi0(xi)?).exp()
            / (2.0 * std::f64::consts::PI))
    };
    let (d, b, zeta) = contour::select_mesh(&typ, &geom, &g_weighted, xp, t, eps_int, tuning)?;
    let (_, _, n) =
        contour::truncation_xi_weighted(&typ, &geom, xp, t, eps_int, zeta, b, tuning.k_lambda)?;
    let params = contour::ContourParams::new(geom.omega1, geom.omega, b, d, zeta, n)?;
    let mut xi = Vec::with_capacity(params.n + 1);
    let mut exp_terms = Vec::with_capacity(params.n + 1);
    for j in 0..=params.n {
        let y = Complex64::new(j as f64 * params.zeta, 0.0);
        let node = contour::chi(y, &params);
        let w = (-t * model.psi(node)?).exp() * (I * params.omega + y).cosh();
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(SinhError::NonFiniteTerm {
                j: j as i64,
                detail: format!("Exp_j = {w}"),
            });
        }
        xi.push(node);
        exp_terms.push(w);
    }
    Ok(PrincipalComponents {
        xi,
        exp_terms,
        zeta: params.zeta,
        b: params.b,
        n: params.n,
        tail,
        anchor: x_anchor,
        cdf_offset: offset,
        eps,
    })
}

impl PrincipalComponents {
    fn weighted_sum<W>(&self, x: f64, weight: W) -> f64
    where
        W: Fn(Complex64) -> Complex64,
    {
        let mut acc = 0.0;
        for (j, (&xi, &e)) in self.xi.iter().zip(&self.exp_terms).enumerate() {
            let term = ((-I * x * xi).exp() * e * weight(xi)).re;
            acc += if j == 0 { 0.5 * term } else { term };
        }
        self.b * self.zeta * acc / std::f64::consts::PI
    }
}

/// F(x) = offset + (b zeta/pi) sum' Re[i e^{-ix xi_j} Exp_j / xi_j].
pub fn eval_f(pc: &PrincipalComponents, x: f64) -> f64 {
    pc.cdf_offset + pc.weighted_sum(x, |xi| I / xi)
}

/// F'(x) = (b zeta/pi) sum' Re[e^{-ix xi_j} Exp_j] - the pdf.
pub fn eval_fp(pc: &PrincipalComponents, x: f64) -> f64 {
    pc.weighted_sum(x, |_| Complex64::new(1.0, 0.0))
}

/// F''(x) = -(b zeta/pi) sum' Re[i xi_j e^{-ix xi_j} Exp_j].
pub fn eval_fpp(pc: &PrincipalComponents, x: f64) -> f64 {
    -pc.weighted_sum(x, |xi| I * xi)
}

/// Grid spacing and truncation policy of the quantile grid.
#[derive(Debug, Clone, Copy)]
pub struct GridPolicy {
    /// Center spacing; None derives it from t (1e-5 for t <= 0.01, 1e-3 for
    /// t >= 1, log-interpolated between).
    pub h_center: Option<f64>,
    pub a_low: f64,
    pub a_high: f64,
    /// Tail step rule h = factor |f|/f'.
    pub tail_factor: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy { h_center: None, a_low: 0.001, a_high: 0.999, tail_factor: 0.01 }
    }
}

impl GridPolicy {
    pub fn center_spacing(&self, t: f64) -> f64 {
        if let Some(h) = self.h_center {
            return h;
        }
        if t <= 0.01 {
            1e-5
        } else if t >= 1.0 {
            1e-3
        } else {
            let w = (t.ln() - 0.01f64.ln()) / (1.0f64.ln() - 0.01f64.ln());
            (1e-5f64.ln() + w * (1e-3f64.ln() - 1e-5f64.ln())).exp()
        }
    }
}

/// Non-uniform grid of (x, ln F, f', f'') plus the two tail component sets.
#[derive(Debug, Clone)]
pub struct QuantileGrid {
    pub x: Vec<f64>,
    /// ln F at the nodes, strictly increasing.
    pub f: Vec<f64>,
    pub fp: Vec<f64>,
    pub fpp: Vec<f64>,
    pub pc_left: PrincipalComponents,
    pub pc_right: PrincipalComponents,
    pub a_low: f64,
    pub a_high: f64,
    pub eps: f64,
    model: LevyModel,
    t: f64,
}

struct NodeVals {
    f_cdf: f64,
    pdf: f64,
    pdf_p: f64,
}

fn node_vals(model: &LevyModel, t: f64, x: f64, eps: f64) -> Result<NodeVals> {
    let q = LevyQuery { model: *model, t, x, eps };
    Ok(NodeVals {
        f_cdf: levy::cdf(&q)?,
        pdf: levy::pdf(&q)?,
        pdf_p: levy::pdf_derivative(&q)?,
    })
}

fn log_triplet(v: &NodeVals) -> (f64, f64, f64) {
    let f = v.f_cdf.max(1e-300).ln();
    let fp = v.pdf / v.f_cdf;
    let fpp = (v.pdf_p * v.f_cdf - v.pdf * v.pdf) / (v.f_cdf * v.f_cdf);
    (f, fp, fpp)
}

/// Cold quantile search from scratch (bracket expansion + bisection + Newton
/// on ln F), used to seed the grid construction.
fn cold_quantile(model: &LevyModel, t: f64, a_target: f64, eps: f64) -> Result<f64> {
    let sd = (model.m2() * t).sqrt();
    let mean = model.mu() * t;
    let cdf_at = |x: f64| -> Result<f64> { levy::cdf(&LevyQuery { model: *model, t, x, eps }) };
    let mut lo = mean - sd;
    let mut hi = mean + sd;
    for _ in 0..200 {
        if cdf_at(lo)? < a_target {
            break;
        }
        lo = mean + (lo - mean) * 2.0;
    }
    for _ in 0..200 {
        if cdf_at(hi)? > a_target {
            break;
        }
        hi = mean + (hi - mean) * 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..60 {
        if hi - lo < 1e-3 * sd {
            break;
        }
        x = 0.5 * (lo + hi);
        if cdf_at(x)? < a_target {
            lo = x;
        } else {
            hi = x;
        }
    }
    // polish on ln F
    let a_ln = a_target.ln();
    for _ in 0..20 {
        let q = LevyQuery { model: *model, t, x, eps };
        let f = levy::cdf(&q)?;
        let p = levy::pdf(&q)?;
        if p <= 0.0 {
            break;
        }
        let step = (f.max(1e-300).ln() - a_ln) * f / p;
        x -= step;
        if step.abs() < 1e-14 * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(x)
}

/// Grid construction: central region [F^-1(0.3), F^-1(0.7)] at the policy
/// spacing, geometric tail steps h = 0.01 |f|/f' down to F^-1(a_low) and up
/// to F^-1(a_high), log-cdf triplets at every node, and the two tail
/// component sets anchored at the edges.
pub fn build_grid(
    model: &LevyModel,
    t: f64,
    eps: f64,
    policy: &GridPolicy,
) -> Result<QuantileGrid> {
    if !(t > 0.0 && eps > 0.0 && eps < 1.0) {
        return Err(SinhError::InvalidParameter("t > 0, eps in (0,1)".into()));
    }
    if !(policy.a_low > 0.0 && policy.a_high < 1.0 && policy.a_low < policy.a_high) {
        return Err(SinhError::InvalidParameter(
            "grid policy needs 0 < a_low < a_high < 1".into(),
        ));
    }
    let h = policy.center_spacing(t);
    let x30 = cold_quantile(model, t, 0.3, eps)?;
    let x70 = cold_quantile(model, t, 0.7, eps)?;

    let mut xs: Vec<f64> = Vec::new();
    // left tail, marched downward then reversed
    {
        let mut x = x30;
        let mut v = node_vals(model, t, x, eps)?;
        loop {
            let (f, fp, _) = log_triplet(&v);
            if v.f_cdf <= policy.a_low {
                break;
            }
            let step = policy.tail_factor * (-f) / fp.max(1e-300);
            x -= step.max(1e-12);
            xs.push(x);
            v = node_vals(model, t, x, eps)?;
            if xs.len() > 100_000 {
                return Err(SinhError::Convergence("left tail march stalled".into()));
            }
        }
        xs.reverse();
    }
    // center
    {
        let mut x = x30;
        while x < x70 {
            xs.push(x);
            x += h;
        }
        xs.push(x70);
    }
    // right tail
    {
        let mut x = x70;
        loop {
            let v = node_vals(model, t, x, eps)?;
            if 1.0 - v.f_cdf <= 1.0 - policy.a_high {
                break;
            }
            let g = (1.0 - v.f_cdf).max(1e-300).ln();
            let gp = v.pdf / (1.0 - v.f_cdf).max(1e-300);
            let step = policy.tail_factor * (-g) / gp.max(1e-300);
            x += step.max(1e-12);
            xs.push(x);
            if xs.len() > 200_000 {
                return Err(SinhError::Convergence("right tail march stalled".into()));
            }
        }
    }

    let mut x_nodes = Vec::with_capacity(xs.len());
    let mut f = Vec::with_capacity(xs.len());
    let mut fp = Vec::with_capacity(xs.len());
    let mut fpp = Vec::with_capacity(xs.len());
    let mut prev_f = f64::MIN;
    for &x in &xs {
        let v = node_vals(model, t, x, eps)?;
        let (fv, fpv, fppv) = log_triplet(&v);
        if fv <= prev_f {
            continue; // keep the stored ln-cdf strictly increasing
        }
        prev_f = fv;
        x_nodes.push(x);
        f.push(fv);
        fp.push(fpv);
        fpp.push(fppv);
    }
    if x_nodes.len() < 4 {
        return Err(SinhError::Convergence("quantile grid degenerate".into()));
    }
    let pc_left = build_components(model, t, Tail::Left, x_nodes[0], eps)?;
    let pc_right = build_components(model, t, Tail::Right, *x_nodes.last().unwrap(), eps)?;
    Ok(QuantileGrid {
        x: x_nodes,
        f,
        fp,
        fpp,
        pc_left,
        pc_right,
        a_low: policy.a_low,
        a_high: policy.a_high,
        eps,
        model: *model,
        t,
    })
}

/// Interpolation/inversion variants on a bracketing interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseMethod {
    /// Linear interpolation of F.
    Linear,
    /// One Newton step on F from the right node.
    NewtonLin,
    /// Linear interpolation of f = ln F.
    LinearLog,
    /// One Newton step on f from the right node.
    NewtonLog,
    /// Quadratic inversion of f (the default).
    QuadraticLog,
}

/// One grid node of the ln-cdf with derivatives.
#[derive(Debug, Clone, Copy)]
pub struct LnCdfNode {
    pub x: f64,
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
}

/// Solve f(x) = a on [left.x, right.x] by the requested local rule.
pub fn invert_between(method: InverseMethod, a_ln: f64, left: &LnCdfNode, right: &LnCdfNode) -> f64 {
    match method {
        InverseMethod::Linear => {
            let (fa, fb) = (left.f.exp(), right.f.exp());
            left.x + (right.x - left.x) * (a_ln.exp() - fa) / (fb - fa)
        }
        InverseMethod::NewtonLin => {
            let fb = right.f.exp();
            right.x - (fb - a_ln.exp()) / (right.fp * fb)
        }
        InverseMethod::LinearLog => {
            left.x + (right.x - left.x) * (a_ln - left.f) / (right.f - left.f)
        }
        InverseMethod::NewtonLog => right.x - (right.f - a_ln) / right.fp,
        InverseMethod::QuadraticLog => {
            let num = 2.0 * (right.f - a_ln);
            let disc = right.fp * right.fp - num * right.fpp;
            right.x - num / (right.fp + disc.max(0.0).sqrt())
        }
    }
}

/// Newton on ln F - ln A from `x0` over cached components; returns the root
/// and the iteration count.
pub fn quantile_newton_from(
    pc: &PrincipalComponents,
    x0: f64,
    a: f64,
    tol_log: f64,
    max_iter: usize,
) -> Result<(f64, usize)> {
    let a_ln = a.ln();
    let mut x = x0;
    for it in 0..max_iter {
        let (f_val, side) = tail_cdf(pc, x);
        if f_val > 0.0 && (f_val.ln() - a_ln).abs() <= tol_log {
            return Ok((x, it));
        }
        let p = eval_fp(pc, x);
        if !(p > 0.0) || !side || !(f_val > 0.0) {
            break;
        }
        // second-order (quadratic) step on f = ln F; this is what keeps the
        // deep-tail inversion inside three iterations
        let fp_log = p / f_val;
        let fpp_log = (eval_fpp(pc, x) * f_val - p * p) / (f_val * f_val);
        let resid = f_val.ln() - a_ln;
        let disc = fp_log * fp_log - 2.0 * resid * fpp_log;
        if disc > 0.0 {
            x -= 2.0 * resid / (fp_log + disc.sqrt().copysign(fp_log));
        } else {
            x -= resid / fp_log;
        }
    }
    Err(SinhError::Convergence(format!(
        "tail Newton did not reach |ln F - ln A| <= {tol_log} from {x0}"
    )))
}

/// cdf from a tail component set plus a flag for staying on the valid side.
fn tail_cdf(pc: &PrincipalComponents, x: f64) -> (f64, bool) {
    let valid = match pc.tail {
        Tail::Left => x <= pc.anchor + 1e-12,
        Tail::Right => x >= pc.anchor - 1e-12,
        Tail::Center => true,
    };
    (eval_f(pc, x), valid)
}

/// Quantile lookup: QT on the grid interior, Newton from the edges on the
/// cached tail components outside [a_low, a_high], with a bisection fallback.
pub fn quantile(grid: &QuantileGrid, a: f64) -> Result<f64> {
    quantile_with(grid, a, InverseMethod::QuadraticLog)
}

pub fn quantile_with(grid: &QuantileGrid, a: f64, method: InverseMethod) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(SinhError::InvalidParameter(format!("A = {a}")));
    }
    // relative (log-scale) residual target; the absolute reading of the
    // stopping rule cannot deliver tail quantiles to 1e-10 in x
    let tol_log = 5e-11f64.max(grid.eps * 10.0);
    if a < grid.a_low {
        let x0 = grid.x[0];
        match quantile_newton_from(&grid.pc_left, x0, a, tol_log, 50) {
            Ok((x, _)) => return Ok(x),
            Err(_) => {
                NEWTON_FALLBACKS.fetch_add(1, Ordering::Relaxed);
                return bisect_tail(&grid.pc_left, a, x0, -1.0, tol_log * a);
            }
        }
    }
    if a > grid.a_high {
        let x0 = *grid.x.last().unwrap();
        match quantile_newton_from(&grid.pc_right, x0, a, tol_log, 50) {
            Ok((x, _)) => return Ok(x),
            Err(_) => {
                NEWTON_FALLBACKS.fetch_add(1, Ordering::Relaxed);
                return bisect_tail(&grid.pc_right, a, x0, 1.0, tol_log * a);
            }
        }
    }
    let a_ln = a.ln();
    // bracketing interval by binary search on the strictly increasing f array
    let j = grid.f.partition_point(|&fv| fv < a_ln).min(grid.f.len() - 1).max(1);
    let left =
        LnCdfNode { x: grid.x[j - 1], f: grid.f[j - 1], fp: grid.fp[j - 1], fpp: grid.fpp[j - 1] };
    let right = LnCdfNode { x: grid.x[j], f: grid.f[j], fp: grid.fp[j], fpp: grid.fpp[j] };
    let seed = invert_between(method, a_ln, &left, &right);
    if method != InverseMethod::QuadraticLog {
        return Ok(seed);
    }
    // Polish with fresh cdf/pdf evaluations: the fixed center spacing cannot
    // hold the curvature of a sharp short-horizon peak to full precision.
    // (The raw QT lookup stays available through quantile_lookup for the
    // simulation hot path.)
    let mut x = seed.clamp(left.x, right.x);
    for _ in 0..6 {
        let q = LevyQuery { model: grid.model, t: grid.t, x, eps: grid.eps };
        let f_val = levy::cdf(&q)?;
        if !(f_val > 0.0) {
            break;
        }
        let resid = f_val.ln() - a_ln;
        if resid.abs() <= tol_log {
            break;
        }
        let p = levy::pdf(&q)?;
        if !(p > 0.0) {
            break;
        }
        x -= resid * f_val / p;
    }
    Ok(x)
}

/// Grid-only lookup (no polishing): QT between the bracketing nodes inside
/// [a_low, a_high], cached-component Newton in the tails. The simulation hot
/// path.
pub fn quantile_lookup(grid: &QuantileGrid, a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(SinhError::InvalidParameter(format!("A = {a}")));
    }
    let tol_log = 5e-11f64.max(grid.eps * 10.0);
    if a < grid.a_low {
        let x0 = grid.x[0];
        return match quantile_newton_from(&grid.pc_left, x0, a, tol_log, 50) {
            Ok((x, _)) => Ok(x),
            Err(_) => {
                NEWTON_FALLBACKS.fetch_add(1, Ordering::Relaxed);
                bisect_tail(&grid.pc_left, a, x0, -1.0, tol_log * a)
            }
        };
    }
    if a > grid.a_high {
        let x0 = *grid.x.last().unwrap();
        return match quantile_newton_from(&grid.pc_right, x0, a, tol_log, 50) {
            Ok((x, _)) => Ok(x),
            Err(_) => {
                NEWTON_FALLBACKS.fetch_add(1, Ordering::Relaxed);
                bisect_tail(&grid.pc_right, a, x0, 1.0, tol_log * a)
            }
        };
    }
    let a_ln = a.ln();
    let j = grid.f.partition_point(|&fv| fv < a_ln).min(grid.f.len() - 1).max(1);
    let left =
        LnCdfNode { x: grid.x[j - 1], f: grid.f[j - 1], fp: grid.fp[j - 1], fpp: grid.fpp[j - 1] };
    let right = LnCdfNode { x: grid.x[j], f: grid.f[j], fp: grid.fp[j], fpp: grid.fpp[j] };
    Ok(invert_between(InverseMethod::QuadraticLog, a_ln, &left, &right))
}

fn bisect_tail(
    pc: &PrincipalComponents,
    a: f64,
    edge: f64,
    direction: f64,
    tol: f64,
) -> Result<f64> {
    let mut step = 0.5;
    let mut far = edge;
    for _ in 0..200 {
        far = edge + direction * step;
        let (f_val, _) = tail_cdf(pc, far);
        if (direction < 0.0 && f_val < a) || (direction > 0.0 && f_val > a) {
            break;
        }
        step *= 2.0;
    }
    let (mut lo, mut hi) = if direction < 0.0 { (far, edge) } else { (edge, far) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-14 * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        let (f_val, _) = tail_cdf(pc, mid);
        if (f_val - a).abs() <= tol {
            return Ok(mid);
        }
        if f_val < a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{KoBoLParams, NtsParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn kobol_61() -> LevyModel {
        LevyModel::KoBoL(KoBoLParams::new(0.0, 0.6, 0.7, 5.0, -10.0).unwrap())
    }

    #[test]
    fn components_reproduce_cdf_below_anchor() {
        let model = kobol_61();
        let eps = 1e-12;
        let pc = build_components(&model, 0.001, Tail::Left, -0.5, eps).unwrap();
        for x in [-0.5, -0.7, -1.0, -1.4, -2.0] {
            let direct = levy::cdf(&LevyQuery { model, t: 0.001, x, eps }).unwrap();
            assert_abs_diff_eq!(eval_f(&pc, x), direct, epsilon = 2.0 * eps);
        }
    }

    #[test]
    fn components_reproduce_pdf_and_derivative() {
        let model = kobol_61();
        let eps = 1e-12;
        let pc = build_components(&model, 0.001, Tail::Left, -0.5, eps).unwrap();
        let direct = levy::pdf(&LevyQuery { model, t: 0.001, x: -1.0, eps }).unwrap();
        assert_abs_diff_eq!(eval_fp(&pc, -1.0), direct, epsilon = 2.0 * eps * 30.0);
        // F'' against a finite difference of F'
        let h = 1e-6;
        let fd = (eval_fp(&pc, -1.0 + h) - eval_fp(&pc, -1.0 - h)) / (2.0 * h);
        assert_relative_eq!(eval_fpp(&pc, -1.0), fd, max_relative = 1e-6);
    }

    #[test]
    fn center_components_reproduce_peak_density() {
        let model =
            LevyModel::Nts(NtsParams::from_second_moment(0.0, 0.1, 0.3, 10.0, 0.0).unwrap());
        let pc = build_components(&model, 0.004, Tail::Center, 0.0, 1e-12).unwrap();
        assert_relative_eq!(eval_fp(&pc, 0.0), 27813.7583243051, max_relative = 1e-9);
    }

    #[test]
    fn right_components_carry_residue() {
        let model = kobol_61();
        let eps = 1e-12;
        let pc = build_components(&model, 0.001, Tail::Right, 0.3, eps).unwrap();
        for x in [0.3, 0.5, 1.0] {
            let direct = levy::cdf(&LevyQuery { model, t: 0.001, x, eps }).unwrap();
            assert_abs_diff_eq!(eval_f(&pc, x), direct, epsilon = 2.0 * eps);
        }
    }

    #[test]
    fn paper_tail_point_from_components() {
        let model = kobol_61();
        let pc = build_components(&model, 0.001, Tail::Left, -1.0, 1e-13).unwrap();
        let v = eval_f(&pc, -1.6707581397416);
        assert_abs_diff_eq!(v, 1e-8, epsilon = 1e-12);
    }

    #[test]
    fn newton_from_minus_one_in_three_steps() {
        let model = kobol_61();
        let pc = build_components(&model, 0.001, Tail::Left, -1.0, 1e-13).unwrap();
        let (x, iters) = quantile_newton_from(&pc, -1.0, 1e-8, 1e-11, 12).unwrap();
        assert!(iters <= 3, "needed {iters} Newton steps");
        assert_abs_diff_eq!(x, -1.6707581397416, epsilon = 1e-10);
    }

    #[test]
    fn grid_roundtrip_and_monotonicity() {
        let model = kobol_61();
        let eps = 1e-12;
        let grid = build_grid(&model, 0.001, eps, &GridPolicy::default()).unwrap();
        for w in grid.f.windows(2) {
            assert!(w[1] > w[0]);
        }
        for a in [1e-8, 1e-5, 0.001, 0.3, 0.5, 0.9] {
            let x = quantile(&grid, a).unwrap();
            let f = levy::cdf(&LevyQuery { model, t: 0.001, x, eps }).unwrap();
            assert_abs_diff_eq!(f, a, epsilon = 1e-10 * (1.0 + a / 1e-4));
        }
        let mut prev = f64::MIN;
        for i in 1..1000 {
            let a = i as f64 / 1000.0;
            let x = quantile(&grid, a).unwrap();
            assert!(x >= prev - 1e-12);
            prev = x;
        }
    }

    #[test]
    fn grid_nodes_match_fresh_cdf() {
        let model = kobol_61();
        let eps = 1e-12;
        let grid = build_grid(&model, 0.001, eps, &GridPolicy::default()).unwrap();
        let m = grid.x.len();
        for k in 0..20 {
            let idx = k * (m - 1) / 19;
            let direct = levy::cdf(&LevyQuery { model, t: 0.001, x: grid.x[idx], eps }).unwrap();
            assert_abs_diff_eq!(grid.f[idx].exp(), direct, epsilon = 2.0 * eps);
        }
    }

    #[test]
    fn qt_error_is_cubic_in_h() {
        // shrinking the bracket by 10 shrinks the QT error by >= 100
        let model = kobol_61();
        let t = 0.001;
        let eps = 1e-13;
        let a = (-16.0f64).exp();
        let pc = build_components(&model, t, Tail::Left, -1.0, eps).unwrap();
        let (x_true, _) = quantile_newton_from(&pc, -1.0, a, 1e-11, 25).unwrap();
        let qt_err = |h: f64| {
            let mk = |x: f64| {
                let v = NodeVals {
                    f_cdf: eval_f(&pc, x),
                    pdf: eval_fp(&pc, x),
                    pdf_p: eval_fpp(&pc, x),
                };
                let (f, fp, fpp) = log_triplet(&v);
                LnCdfNode { x, f, fp, fpp }
            };
            let left = mk(x_true - 0.6 * h);
            let right = mk(x_true + 0.4 * h);
            (invert_between(InverseMethod::QuadraticLog, a.ln(), &left, &right) - x_true).abs()
        };
        let e1 = qt_err(0.01);
        let e2 = qt_err(0.001);
        assert!(e1 / e2 >= 100.0, "QT errors {e1} vs {e2}");
    }

    #[test]
    fn method_error_ordering() {
        // |QT| < |LN| <= |LL| < |L| on a representative bracket
        let model = kobol_61();
        let t = 0.001;
        let eps = 1e-13;
        let a = (-16.0f64).exp();
        let pc = build_components(&model, t, Tail::Left, -1.0, eps).unwrap();
        let (x_true, _) = quantile_newton_from(&pc, -1.0, a, 1e-11, 25).unwrap();
        let h = 0.001;
        let mk = |x: f64| {
            let v = NodeVals {
                f_cdf: eval_f(&pc, x),
                pdf: eval_fp(&pc, x),
                pdf_p: eval_fpp(&pc, x),
            };
            let (f, fp, fpp) = log_triplet(&v);
            LnCdfNode { x, f, fp, fpp }
        };
        let left = mk(x_true - 0.6 * h);
        let right = mk(x_true + 0.4 * h);
        let err = |m: InverseMethod| (invert_between(m, a.ln(), &left, &right) - x_true).abs();
        let (l, ln_, ll, qt) = (
            err(InverseMethod::Linear),
            err(InverseMethod::NewtonLog),
            err(InverseMethod::LinearLog),
            err(InverseMethod::QuadraticLog),
        );
        assert!(qt < ln_ && ln_ <= ll && ll < l, "ordering: qt={qt} ln={ln_} ll={ll} l={l}");
        assert!(qt <= 5e-11, "qt = {qt}");
        assert!(l >= 1e-7, "l = {l}");
    }
}
