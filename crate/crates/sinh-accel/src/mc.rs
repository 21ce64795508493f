//! Inverse-transform Monte-Carlo path simulation for Lévy, regime-switching
//! Lévy, and Heston models. Streams are split per path index, so paths are
//! independent of the scheduling order and bit-reproducible under a fixed
//! seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::contour::{self, select_geometry, IntegrandKind, KernelKind, SinhRegularType, Tuning};
use crate::error::{Result, SinhError};
use crate::heston::{self, HestonParams};
use crate::quantile::{quantile_lookup, QuantileGrid};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Uniform draw clipped away from the endpoints.
fn draw_uniform(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen();
    u.clamp(1e-300, 1.0 - 1e-16)
}

fn path_rng(seed: u64, path: u64, substream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((path << 8) | substream);
    rng
}

/// Cumulative paths of a Lévy process sampled by inverse transform on the
/// quantile grid; one increment per step of the grid's horizon. Row k holds
/// X_0 = 0, X_1, ..., X_{n_steps}.
pub fn simulate_levy(
    grid: &QuantileGrid,
    n_steps: usize,
    n_paths: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if n_steps == 0 || n_paths == 0 {
        return Err(SinhError::InvalidParameter(
            "n_steps and n_paths must be positive".into(),
        ));
    }
    (0..n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(seed, p, 0);
            let mut path = Vec::with_capacity(n_steps + 1);
            let mut x = 0.0;
            path.push(x);
            for _ in 0..n_steps {
                let u = draw_uniform(&mut rng);
                x += quantile_lookup(grid, u)?;
                path.push(x);
            }
            Ok(path)
        })
        .collect()
}

/// Continuous-time Markov chain + per-state Lévy increments.
pub struct RegimePaths {
    pub x: Vec<Vec<f64>>,
    /// State occupied at the start of each step (n_steps entries per path).
    pub state: Vec<Vec<usize>>,
}

/// Validate a generator matrix: off-diagonal >= 0, row sums ~ 0.
pub fn validate_generator(q: &[Vec<f64>]) -> Result<()> {
    let n = q.len();
    if n == 0 {
        return Err(SinhError::InvalidParameter("empty generator".into()));
    }
    for (i, row) in q.iter().enumerate() {
        if row.len() != n {
            return Err(SinhError::InvalidParameter(format!(
                "generator row {i} has length {} != {n}",
                row.len()
            )));
        }
        let mut sum = 0.0;
        for (j, &v) in row.iter().enumerate() {
            if i != j && v < 0.0 {
                return Err(SinhError::InvalidParameter(format!(
                    "negative off-diagonal rate q[{i}][{j}] = {v}"
                )));
            }
            sum += v;
        }
        if sum.abs() > 1e-10 * (1.0 + row.iter().map(|v| v.abs()).sum::<f64>()) {
            return Err(SinhError::InvalidParameter(format!(
                "generator row {i} sums to {sum}, not 0"
            )));
        }
    }
    Ok(())
}

/// Markov-modulated Lévy paths: the chain is simulated exactly (exponential
/// holding times, from a separate substream so the increment draws align with
/// `simulate_levy`), and each step's increment comes from the grid of the
/// state occupied at the step start.
pub fn simulate_regime_switching(
    generator: &[Vec<f64>],
    grids: &[QuantileGrid],
    initial_state: usize,
    n_steps: usize,
    t_step: f64,
    n_paths: usize,
    seed: u64,
) -> Result<RegimePaths> {
    validate_generator(generator)?;
    if grids.len() != generator.len() {
        return Err(SinhError::InvalidParameter(format!(
            "{} grids for {} states",
            grids.len(),
            generator.len()
        )));
    }
    if initial_state >= grids.len() {
        return Err(SinhError::InvalidParameter("initial state out of range".into()));
    }
    let results: Result<Vec<(Vec<f64>, Vec<usize>)>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_rng(seed, p, 0);
            let mut chain_rng = path_rng(seed, p, 1);
            // exact chain path sampled on step boundaries
            let mut states = Vec::with_capacity(n_steps);
            let mut s = initial_state;
            let mut t_now = 0.0;
            let mut next_jump = t_now + hold_time(&mut chain_rng, generator, s);
            for k in 0..n_steps {
                let t_start = k as f64 * t_step;
                while next_jump <= t_start {
                    t_now = next_jump;
                    s = jump_to(&mut chain_rng, generator, s);
                    next_jump = t_now + hold_time(&mut chain_rng, generator, s);
                }
                states.push(s);
            }
            let mut path = Vec::with_capacity(n_steps + 1);
            let mut x = 0.0;
            path.push(x);
            for &sk in &states {
                let u = draw_uniform(&mut rng);
                x += quantile_lookup(&grids[sk], u)?;
                path.push(x);
            }
            Ok((path, states))
        })
        .collect();
    let results = results?;
    let (x, state) = results.into_iter().unzip();
    Ok(RegimePaths { x, state })
}

fn hold_time(rng: &mut ChaCha8Rng, generator: &[Vec<f64>], s: usize) -> f64 {
    let rate = -generator[s][s];
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    -u.ln() / rate
}

fn jump_to(rng: &mut ChaCha8Rng, generator: &[Vec<f64>], s: usize) -> usize {
    let rate = -generator[s][s];
    let mut u: f64 = rng.gen::<f64>() * rate;
    for (j, &v) in generator[s].iter().enumerate() {
        if j == s {
            continue;
        }
        if u < v {
            return j;
        }
        u -= v;
    }
    // numerical leftovers land on the last admissible state
    generator[s].iter().enumerate().rev().find(|&(j, &v)| j != s && v > 0.0).map(|(j, _)| j).unwrap_or(s)
}

/// Cached arrays for the conditional law of one Heston log-price step:
/// (ξⱼ, B₀ⱼ, C₀ⱼ, coshⱼ) so that e^{(vB₀ⱼ+C₀ⱼ)/σ₀²} prices any v in the
/// bucket from the same nodes.
struct HestonComponents {
    xi: Vec<Complex64>,
    b0: Vec<Complex64>,
    c0: Vec<Complex64>,
    cosh_w: Vec<Complex64>,
    zeta: f64,
    b: f64,
    cdf_offset: f64,
}

impl HestonComponents {
    fn eval_cdf(&self, p: &HestonParams, v: f64, z: f64) -> f64 {
        let sig2 = p.sigma0 * p.sigma0;
        let mut acc = 0.0;
        for j in 0..self.xi.len() {
            let xi = self.xi[j];
            let cf = ((v * self.b0[j] + self.c0[j]) / sig2).exp();
            let term = ((-I * z * xi).exp() * cf * self.cosh_w[j] * (I / xi)).re;
            acc += if j == 0 { 0.5 * term } else { term };
        }
        self.cdf_offset + self.b * self.zeta * acc / std::f64::consts::PI
    }

    fn eval_pdf(&self, p: &HestonParams, v: f64, z: f64) -> f64 {
        let sig2 = p.sigma0 * p.sigma0;
        let mut acc = 0.0;
        for j in 0..self.xi.len() {
            let xi = self.xi[j];
            let cf = ((v * self.b0[j] + self.c0[j]) / sig2).exp();
            let term = ((-I * z * xi).exp() * cf * self.cosh_w[j]).re;
            acc += if j == 0 { 0.5 * term } else { term };
        }
        self.b * self.zeta * acc / std::f64::consts::PI
    }
}

/// Per-bucket, per-anchor component table for the Heston step law.
pub struct HestonMcEngine {
    p: HestonParams,
    tau: f64,
    /// bucket lower edges; bucket i covers [edges[i], edges[i+1])
    edges: Vec<f64>,
    /// components[bucket][anchor] with anchor 0 = left (-a), 1 = center, 2 = right (+a)
    comps: Vec<[HestonComponents; 3]>,
    a_anchor: f64,
}

/// Convexity switch points x±(v) = ±max(0.03, 3√(vτ)): Newton starts outside,
/// bisection runs inside.
pub fn x_switch(v: f64, tau: f64) -> f64 {
    (3.0 * (v * tau).sqrt()).max(0.03)
}

impl HestonMcEngine {
    pub fn new(p: &HestonParams, tau: f64, eps: f64) -> Result<Self> {
        p.validate()?;
        if !(tau > 0.0 && eps > 0.0 && eps < 1.0) {
            return Err(SinhError::InvalidParameter("tau > 0, eps in (0,1)".into()));
        }
        let edges = vec![0.0, 0.01, 0.05, 0.15];
        let a_anchor = 0.04;
        let (lam_minus, lam_plus) = heston::strip_bounds(p);
        let mut comps = Vec::new();
        for (i, &lo) in edges.iter().enumerate() {
            // conservative member of the bucket: smallest v has the widest law
            let v_ref = if i == 0 { 0.0 } else { lo };
            let mk = |anchor: f64| -> Result<HestonComponents> {
                build_heston_components(p, tau, v_ref, anchor, eps, lam_minus, lam_plus)
            };
            comps.push([mk(-a_anchor)?, mk(0.0)?, mk(a_anchor)?]);
        }
        Ok(HestonMcEngine { p: *p, tau, edges, comps, a_anchor })
    }

    fn bucket(&self, v: f64) -> usize {
        self.edges.iter().rposition(|&e| v >= e).unwrap_or_default()
    }

    /// cdf of the step variable Z given variance v.
    pub fn cdf(&self, v: f64, z: f64) -> f64 {
        let set = &self.comps[self.bucket(v)];
        let c = if z < -self.a_anchor {
            &set[0]
        } else if z > self.a_anchor {
            &set[2]
        } else {
            &set[1]
        };
        c.eval_cdf(&self.p, v, z)
    }

    pub fn pdf(&self, v: f64, z: f64) -> f64 {
        let set = &self.comps[self.bucket(v)];
        let c = if z < -self.a_anchor {
            &set[0]
        } else if z > self.a_anchor {
            &set[2]
        } else {
            &set[1]
        };
        c.eval_pdf(&self.p, v, z)
    }

    /// Quantile of Z given v: Newton from ±x_switch outside, bisection inside.
    pub fn quantile(&self, v: f64, a: f64) -> f64 {
        let xs = x_switch(v, self.tau);
        let f_lo = self.cdf(v, -xs);
        let f_hi = self.cdf(v, xs);
        if a <= f_lo {
            self.newton_tail(v, a, -xs)
        } else if a >= f_hi {
            self.newton_tail(v, a, xs)
        } else {
            self.bisect(v, a, -xs, xs)
        }
    }

    fn newton_tail(&self, v: f64, a: f64, x0: f64) -> f64 {
        // bracket the root first so stray Newton steps cannot escape
        let going_left = a < self.cdf(v, x0);
        let (mut lo, mut hi) = (x0, x0);
        let mut step = 0.1;
        for _ in 0..80 {
            if going_left {
                lo = x0 - step;
                if self.cdf(v, lo) < a {
                    break;
                }
            } else {
                hi = x0 + step;
                if self.cdf(v, hi) > a {
                    break;
                }
            }
            step *= 2.0;
        }
        let a_ln = a.ln();
        let mut x = 0.5 * (lo + hi);
        for _ in 0..60 {
            let f = self.cdf(v, x).clamp(1e-300, 1.0 - 1e-16);
            if f < a {
                lo = x;
            } else {
                hi = x;
            }
            let p = self.pdf(v, x);
            if !(p > 0.0) {
                x = 0.5 * (lo + hi);
                continue;
            }
            let delta = (f.ln() - a_ln) * f / p;
            let next = x - delta;
            x = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if delta.abs() <= 1e-12 * (1.0 + x.abs()) || hi - lo <= 1e-13 * (1.0 + x.abs()) {
                break;
            }
        }
        x
    }

    fn bisect(&self, v: f64, a: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-12 * (1.0 + mid.abs()) {
                return mid;
            }
            if self.cdf(v, mid) < a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn build_heston_components(
    p: &HestonParams,
    tau: f64,
    v_ref: f64,
    anchor: f64,
    eps: f64,
    lam_minus: f64,
    lam_plus: f64,
) -> Result<HestonComponents> {
    let (_, c_inf0_disp) = heston::heston_asymptotics(p, tau, v_ref.max(1e-6));
    let rate = c_inf0_disp / (p.sigma0 * p.sigma0);
    // left tail and center run through the upper strip (0, lam_+^0); the
    // right tail picks the residue crossing the pole at 0
    let (mu_lo, mu_hi, offset) = if anchor > 0.0 {
        (lam_minus, 0.0, 1.0)
    } else {
        (0.0, lam_plus, 0.0)
    };
    let typ = SinhRegularType {
        mu_minus: mu_lo.min(0.0),
        mu_plus: mu_hi.max(0.0),
        gamma_minus: -std::f64::consts::FRAC_PI_2,
        gamma_plus: std::f64::consts::FRAC_PI_2,
        nu: 1.0,
        c_inf0: rate,
        c0: 0.0,
    };
    let kind = IntegrandKind::Custom {
        mu_minus: mu_lo,
        mu_plus: mu_hi,
        kernel: KernelKind::Density,
        decay_power: 1,
    };
    let tuning = Tuning { k_d: 0.8, k_b: 0.8, ..Tuning::default() };
    let geom = select_geometry(&typ, anchor, 1.0, kind, &tuning)?;
    let sig2 = p.sigma0 * p.sigma0;
    let g = |xi: Complex64| {
        let (b0, c0) = heston::heston_terms(tau, xi, p)?;
        Ok(((-I * anchor * xi) + (v_ref * b0 + c0) / sig2).exp()
            / (-I * xi)
            / TWO_PI)
    };
    let eps_int = (eps * 1e-6).max(1e-22);
    let (d, b, zeta) = contour::select_mesh(&typ, &geom, &g, anchor, 1.0, eps_int, &tuning)?;
    let (_, _, n) =
        contour::truncation_xi_weighted(&typ, &geom, anchor, 1.0, eps_int, zeta, b, 1.0)?;
    let params = contour::ContourParams::new(geom.omega1, geom.omega, b, d, zeta, n)?;
    let mut xi = Vec::with_capacity(n + 1);
    let mut b0s = Vec::with_capacity(n + 1);
    let mut c0s = Vec::with_capacity(n + 1);
    let mut cosh_w = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let y = Complex64::new(j as f64 * params.zeta, 0.0);
        let node = contour::chi(y, &params);
        let (b0, c0) = heston::heston_terms(tau, node, p)?;
        xi.push(node);
        b0s.push(b0);
        c0s.push(c0);
        cosh_w.push((I * params.omega + y).cosh());
    }
    Ok(HestonComponents {
        xi,
        b0: b0s,
        c0: c0s,
        cosh_w,
        zeta: params.zeta,
        b: params.b,
        cdf_offset: offset,
    })
}

/// Heston paths: full-truncation Euler for the variance, inverse transform
/// through the cached step law for the log-price. Returns (v, X = ln S/S_0)
/// paths with n_steps+1 entries each.
pub struct HestonPaths {
    pub v: Vec<Vec<f64>>,
    pub x: Vec<Vec<f64>>,
}

#[allow(clippy::too_many_arguments)]
pub fn simulate_heston(
    p: &HestonParams,
    v0: f64,
    tau_step: f64,
    n_steps: usize,
    n_paths: usize,
    seed: u64,
    eps: f64,
) -> Result<HestonPaths> {
    if !(v0 >= 0.0) {
        return Err(SinhError::InvalidParameter(format!("v0 = {v0}")));
    }
    let engine = HestonMcEngine::new(p, tau_step, eps)?;
    let mu0 = p.mu0();
    let ros = p.rho / p.sigma0;
    let results: Result<Vec<(Vec<f64>, Vec<f64>)>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|pid| {
            let mut rng = path_rng(seed, pid, 0);
            let mut v_rng = path_rng(seed, pid, 1);
            let mut v_path = Vec::with_capacity(n_steps + 1);
            let mut x_path = Vec::with_capacity(n_steps + 1);
            let mut v_raw = v0;
            let mut x = 0.0;
            v_path.push(v0);
            x_path.push(0.0);
            for _ in 0..n_steps {
                let v_now = v_raw.max(0.0);
                let a = draw_uniform(&mut rng);
                let z = engine.quantile(v_now, a);
                let y = z - ros * v_now + mu0 * tau_step;
                x += y;
                // full-truncation Euler keeps the diffusion argument at v+
                let dw: f64 = normal_draw(&mut v_rng) * tau_step.sqrt();
                v_raw += p.kappa * (p.m - v_now) * tau_step + p.sigma0 * v_now.sqrt() * dw;
                v_path.push(v_raw.max(0.0));
                x_path.push(x);
            }
            Ok((v_path, x_path))
        })
        .collect();
    let results = results?;
    let (v, x) = results.into_iter().unzip();
    Ok(HestonPaths { v, x })
}

fn normal_draw(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on clipped uniforms
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (TWO_PI * u2).cos()
}

/// Write paths as delimited text: one row per step, columns
/// path_id, step, [v,] x.
pub fn write_paths<W: std::io::Write>(
    out: &mut W,
    x: &[Vec<f64>],
    v: Option<&[Vec<f64>]>,
) -> std::io::Result<()> {
    if v.is_some() {
        writeln!(out, "path,step,v,x")?;
    } else {
        writeln!(out, "path,step,x")?;
    }
    for (pid, path) in x.iter().enumerate() {
        for (k, val) in path.iter().enumerate() {
            match v {
                Some(vp) => writeln!(out, "{pid},{k},{:.17e},{:.17e}", vp[pid][k], val)?,
                None => writeln!(out, "{pid},{k},{val:.17e}")?,
            }
        }
    }
    Ok(())
}
