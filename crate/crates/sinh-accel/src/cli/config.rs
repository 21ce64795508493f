//! RunConfig assembly: flat key-value config files plus flag overrides.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Result, SinhError};
use crate::levy::OptionKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Sinh,
    FracParabolic,
    FlatIft,
}

impl MethodKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sinh" => Ok(MethodKind::Sinh),
            "frac-parabolic" => Ok(MethodKind::FracParabolic),
            "flat-ift" => Ok(MethodKind::FlatIft),
            other => Err(SinhError::Config(format!("unknown method {other}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MethodKind::Sinh => "sinh",
            MethodKind::FracParabolic => "frac-parabolic",
            MethodKind::FlatIft => "flat-ift",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Kv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "kv" => Ok(OutputFormat::Kv),
            other => Err(SinhError::Config(format!("unknown format {other}"))),
        }
    }
}

pub fn parse_option_kind(s: &str) -> Result<OptionKind> {
    match s {
        "call" => Ok(OptionKind::Call),
        "put" => Ok(OptionKind::Put),
        "covered-call" => Ok(OptionKind::CoveredCall),
        other => Err(SinhError::Config(format!("unknown option kind {other}"))),
    }
}

/// Flat hierarchical key-value store: `a.b = value` lines, `#` comments.
#[derive(Debug, Clone, Default)]
pub struct KvConfig {
    map: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                SinhError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(KvConfig { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SinhError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.map.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| SinhError::Config(format!("{key} = {s} is not a number"))),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn f64_req(&self, key: &str) -> Result<f64> {
        self.f64_opt(key)?
            .ok_or_else(|| SinhError::Config(format!("missing required key {key}")))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<usize>()
                .map_err(|_| SinhError::Config(format!("{key} = {s} is not an integer"))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<u64>()
                .map_err(|_| SinhError::Config(format!("{key} = {s} is not an integer"))),
        }
    }

    /// Comma-separated list of numbers.
    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(s) => s
                .split(',')
                .map(|p| p.trim())
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.parse::<f64>()
                        .map_err(|_| SinhError::Config(format!("{key}: {p} is not a number")))
                })
                .collect(),
        }
    }
}

/// Tuning knobs read from the method block.
pub fn tuning_from(cfg: &KvConfig) -> Result<crate::contour::Tuning> {
    let base = crate::contour::Tuning::default();
    Ok(crate::contour::Tuning {
        k_d: cfg.f64_or("method.k-d", base.k_d)?,
        k_b: cfg.f64_or("method.k-b", base.k_b)?,
        k_zeta: cfg.f64_or("method.k-zeta", base.k_zeta)?,
        k_lambda: cfg.f64_or("method.k-lambda", base.k_lambda)?,
        ..base
    })
}

/// Lévy model block (family = kobol | nts).
pub fn levy_model_from(cfg: &KvConfig) -> Result<crate::models::LevyModel> {
    let family = cfg
        .get("model.family")
        .ok_or_else(|| SinhError::Config("missing model.family".into()))?;
    match family {
        "kobol" => {
            let p = crate::models::KoBoLParams::new(
                cfg.f64_or("model.mu", 0.0)?,
                cfg.f64_req("model.c")?,
                cfg.f64_req("model.nu")?,
                cfg.f64_req("model.lambda-plus")?,
                cfg.f64_req("model.lambda-minus")?,
            )?;
            Ok(crate::models::LevyModel::KoBoL(p))
        }
        "nts" => {
            let nu = cfg.f64_req("model.nu")?;
            let alpha = cfg.f64_req("model.alpha")?;
            let beta = cfg.f64_or("model.beta", 0.0)?;
            let mu = cfg.f64_or("model.mu", 0.0)?;
            let p = if let Some(delta) = cfg.f64_opt("model.delta")? {
                crate::models::NtsParams::new(mu, delta, nu, alpha, beta)?
            } else {
                let m2 = cfg.f64_req("model.m2")?;
                crate::models::NtsParams::from_second_moment(mu, m2, nu, alpha, beta)?
            };
            Ok(crate::models::LevyModel::Nts(p))
        }
        other => Err(SinhError::Config(format!(
            "model.family = {other} is not a Levy family (kobol | nts)"
        ))),
    }
}

pub fn heston_from(cfg: &KvConfig) -> Result<crate::heston::HestonParams> {
    Ok(crate::heston::HestonParams {
        kappa: cfg.f64_req("model.kappa")?,
        m: cfg.f64_req("model.m")?,
        sigma0: cfg.f64_req("model.sigma0")?,
        rho: cfg.f64_req("model.rho")?,
        r: cfg.f64_or("instrument.r", 0.0)?,
        delta_div: cfg.f64_or("instrument.div", 0.0)?,
    })
}

pub fn cir_from(cfg: &KvConfig) -> Result<crate::cir::CirParams> {
    Ok(crate::cir::CirParams {
        kappa: cfg.f64_req("model.kappa")?,
        theta: cfg.f64_req("model.theta")?,
        sigma: cfg.f64_req("model.sigma")?,
    })
}

pub fn subordinator_from(cfg: &KvConfig) -> Result<Option<crate::subordinated::CirSubordinatorParams>> {
    if cfg.get("sub.kappa").is_none() {
        return Ok(None);
    }
    Ok(Some(crate::subordinated::CirSubordinatorParams {
        kappa: cfg.f64_req("sub.kappa")?,
        theta: cfg.f64_req("sub.theta")?,
        lambda: cfg.f64_req("sub.lambda")?,
        y0: cfg.f64_or("sub.y0", 0.0)?,
    }))
}
