//! Command-line front end: config ingestion, single evaluations, batch
//! grids, table reproduction, and Monte-Carlo runs with structured output.

pub mod config;
pub mod output;
pub mod tables;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::cli::config::{
    cir_from, heston_from, levy_model_from, parse_option_kind, subordinator_from, tuning_from,
    KvConfig, MethodKind, OutputFormat,
};
use crate::cli::output::{time_us, write_rows, Row};
use crate::error::{Result, SinhError};
use crate::levy::{self, LevyQuery};
use crate::quantile::{self, GridPolicy};

#[derive(Parser)]
#[command(
    name = "sinh-accel",
    about = "Sinh-accelerated Fourier inversion: densities, option prices, quantiles, Monte-Carlo",
    version
)]
struct Cli {
    /// Key-value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Error tolerance.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Mesh refinement knob (zeta divided by this).
    #[arg(long = "k-zeta", global = true)]
    k_zeta: Option<f64>,
    /// Truncation multiplier.
    #[arg(long = "k-lambda", global = true)]
    k_lambda: Option<f64>,
    /// Scale shrink factor.
    #[arg(long = "k-b", global = true)]
    k_b: Option<f64>,
    /// Strip shrink factor.
    #[arg(long = "k-d", global = true)]
    k_d: Option<f64>,
    /// sinh | frac-parabolic | flat-ift (densities only).
    #[arg(long, global = true)]
    method: Option<String>,
    /// RNG seed for simulation runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv | kv.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Timing repeat count per row (0 = deterministic artifact, no timing).
    #[arg(long, global = true)]
    repeat: Option<usize>,
    #[command(subcommand)]
    command: Option<CliCommand>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Probability density of a Lévy model at the given points.
    Pdf {
        #[arg(long, value_delimiter = ',')]
        points: Vec<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Cumulative distribution of a Lévy model at the given points.
    Cdf {
        #[arg(long, value_delimiter = ',')]
        points: Vec<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// European option prices (family chosen by the model block).
    Price {
        #[arg(long, value_delimiter = ',')]
        strikes: Vec<f64>,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        spot: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
    },
    /// Quantiles of a Lévy model at the given probabilities.
    Quantile {
        #[arg(long, value_delimiter = ',')]
        points: Vec<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Monte-Carlo path simulation (Lévy or Heston family).
    Simulate {
        #[arg(long = "n-paths")]
        n_paths: Option<usize>,
        #[arg(long = "n-steps")]
        n_steps: Option<usize>,
        #[arg(long = "t-step")]
        t_step: Option<f64>,
    },
    /// Reproduce benchmark table k (1..12) with an error column.
    ReproduceTable { table: u32 },
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run_cli(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_cli(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => KvConfig::load(p)?,
        None => KvConfig::default(),
    };
    // flag overrides
    if let Some(v) = cli.eps {
        cfg.set("method.eps", v.to_string());
    }
    if let Some(v) = cli.k_zeta {
        cfg.set("method.k-zeta", v.to_string());
    }
    if let Some(v) = cli.k_lambda {
        cfg.set("method.k-lambda", v.to_string());
    }
    if let Some(v) = cli.k_b {
        cfg.set("method.k-b", v.to_string());
    }
    if let Some(v) = cli.k_d {
        cfg.set("method.k-d", v.to_string());
    }
    if let Some(v) = &cli.method {
        cfg.set("method.method", v.clone());
    }
    if let Some(v) = cli.seed {
        cfg.set("seed", v.to_string());
    }
    if let Some(v) = &cli.format {
        cfg.set("output.format", v.clone());
    }
    if let Some(v) = cli.repeat {
        cfg.set("output.repeat", v.to_string());
    }
    if let Some(v) = &cli.out {
        cfg.set("output.path", v.display().to_string());
    }

    let command = match &cli.command {
        Some(c) => c,
        None => {
            let name = cfg
                .get("command")
                .ok_or_else(|| SinhError::Config("no subcommand and no command key".into()))?;
            return run_config_command(name.to_string(), cfg);
        }
    };

    match command {
        CliCommand::Pdf { points, t } => {
            merge_points(&mut cfg, points, *t);
            run_density(&cfg, false)
        }
        CliCommand::Cdf { points, t } => {
            merge_points(&mut cfg, points, *t);
            run_density(&cfg, true)
        }
        CliCommand::Price { strikes, kind, tau, spot, r } => {
            if !strikes.is_empty() {
                let joined =
                    strikes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
                cfg.set("instrument.strikes", joined);
            }
            if let Some(k) = kind {
                cfg.set("instrument.kind", k.clone());
            }
            if let Some(v) = tau {
                cfg.set("instrument.tau", v.to_string());
            }
            if let Some(v) = spot {
                cfg.set("instrument.spot", v.to_string());
            }
            if let Some(v) = r {
                cfg.set("instrument.r", v.to_string());
            }
            run_price(&cfg)
        }
        CliCommand::Quantile { points, t } => {
            merge_points(&mut cfg, points, *t);
            run_quantile(&cfg)
        }
        CliCommand::Simulate { n_paths, n_steps, t_step } => {
            if let Some(v) = n_paths {
                cfg.set("sim.n-paths", v.to_string());
            }
            if let Some(v) = n_steps {
                cfg.set("sim.n-steps", v.to_string());
            }
            if let Some(v) = t_step {
                cfg.set("levy.t", v.to_string());
            }
            run_simulate(&cfg)
        }
        CliCommand::ReproduceTable { table } => run_table(&cfg, *table),
    }
}

fn run_config_command(name: String, cfg: KvConfig) -> Result<()> {
    match name.as_str() {
        "pdf" => run_density(&cfg, false),
        "cdf" => run_density(&cfg, true),
        "price" => run_price(&cfg),
        "quantile" => run_quantile(&cfg),
        "simulate" => run_simulate(&cfg),
        "reproduce-table" => {
            let t = cfg
                .get("table")
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(|| SinhError::Config("reproduce-table needs table = k".into()))?;
            run_table(&cfg, t)
        }
        other => Err(SinhError::Config(format!("unknown command {other}"))),
    }
}

fn merge_points(cfg: &mut KvConfig, points: &[f64], t: Option<f64>) {
    if !points.is_empty() {
        let joined = points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        cfg.set("points", joined);
    }
    if let Some(v) = t {
        cfg.set("levy.t", v.to_string());
    }
}

fn emit(cfg: &KvConfig, rows: &[Row]) -> Result<()> {
    let format = cfg.get("output.format").map(OutputFormat::parse).transpose()?.unwrap_or(OutputFormat::Csv);
    match cfg.get("output.path") {
        Some(p) => {
            let mut f = std::fs::File::create(p)
                .map_err(|e| SinhError::Config(format!("cannot create {p}: {e}")))?;
            write_rows(&mut f, rows, format)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_rows(&mut lock, rows, format)
        }
    }
}

fn repeat_of(cfg: &KvConfig) -> Result<usize> {
    cfg.usize_or("output.repeat", 1000)
}

fn run_density(cfg: &KvConfig, cumulative: bool) -> Result<()> {
    let model = levy_model_from(cfg)?;
    let t = cfg.f64_req("levy.t")?;
    let eps = cfg.f64_or("method.eps", 1e-12)?;
    let method = match cfg.get("method.method") {
        Some(s) => MethodKind::parse(s)?,
        None => MethodKind::Sinh,
    };
    let points = cfg.f64_list("points")?;
    if points.is_empty() {
        return Err(SinhError::Config("no evaluation points given".into()));
    }
    let tuning = tuning_from(cfg)?;
    let repeat = repeat_of(cfg)?;
    let mut rows = Vec::new();
    for &x in &points {
        let q = LevyQuery { model, t, x, eps };
        let (value, zeta, n) = if cumulative {
            if method != MethodKind::Sinh {
                return Err(SinhError::Config("cdf supports method = sinh only".into()));
            }
            let (v, p) = levy::cdf_with(&q, levy::CdfRoute::Auto, &tuning)?;
            (v, p.zeta, p.n)
        } else if method == MethodKind::Sinh {
            let (v, p) = levy::pdf_with(&q, &tuning)?;
            (v, p.zeta, p.n)
        } else {
            tables::density_by_method(
                method,
                &model,
                t,
                x,
                eps,
                cfg.f64_opt("method.zeta")?,
                cfg.get("method.n").map(|s| s.parse().unwrap_or(0)),
            )?
        };
        let elapsed = time_us(repeat, || {
            let _ = if cumulative { levy::cdf(&q) } else { levy::pdf(&q) };
        });
        rows.push(Row {
            label: if cumulative { "cdf".into() } else { "pdf".into() },
            point: x,
            value,
            method: method.name(),
            eps,
            zeta,
            n,
            elapsed_us: elapsed,
            benchmark: None,
        });
    }
    emit(cfg, &rows)
}

fn run_price(cfg: &KvConfig) -> Result<()> {
    let family = cfg
        .get("model.family")
        .ok_or_else(|| SinhError::Config("missing model.family".into()))?
        .to_string();
    let eps = cfg.f64_or("method.eps", 1e-12)?;
    let kind = parse_option_kind(cfg.get("instrument.kind").unwrap_or("put"))?;
    let strikes = cfg.f64_list("instrument.strikes")?;
    if strikes.is_empty() {
        return Err(SinhError::Config("empty strike list".into()));
    }
    let repeat = repeat_of(cfg)?;
    let tuning = tuning_from(cfg)?;
    let mut rows = Vec::new();
    match family.as_str() {
        "heston" => {
            let p = heston_from(cfg)?;
            let st = crate::heston::HestonState {
                s: cfg.f64_req("instrument.spot")?,
                v: cfg.f64_req("instrument.v0")?,
                tau: cfg.f64_req("instrument.tau")?,
            };
            let tuning = if cfg.get("method.k-zeta").is_none() {
                crate::heston::heston_tuning()
            } else {
                tuning
            };
            for &k in &strikes {
                let (v, params) =
                    crate::heston::heston_european_with(&p, &st, k, kind, eps, &tuning)?;
                let elapsed = time_us(repeat, || {
                    let _ = crate::heston::heston_european_with(&p, &st, k, kind, eps, &tuning);
                });
                rows.push(Row {
                    label: family.to_string(),
                    point: k,
                    value: v,
                    method: "sinh",
                    eps,
                    zeta: params.zeta,
                    n: params.n,
                    elapsed_us: elapsed,
                    benchmark: None,
                });
            }
        }
        "cir" => {
            let p = cir_from(cfg)?;
            let tau = cfg.f64_req("instrument.tau")?;
            let t_bond = cfg.f64_req("instrument.t-bond")?;
            let r0 = cfg.f64_req("instrument.r0")?;
            for &k in &strikes {
                let (v, params) = crate::cir::bond_option_with(
                    kind,
                    tau,
                    t_bond,
                    k,
                    r0,
                    &p,
                    eps,
                    crate::cir::CirStrip::Auto,
                    &tuning,
                )?;
                let elapsed = time_us(repeat, || {
                    let _ = crate::cir::bond_option(kind, tau, t_bond, k, r0, &p, eps);
                });
                rows.push(Row {
                    label: "cir-bond".into(),
                    point: k,
                    value: v,
                    method: "sinh",
                    eps,
                    zeta: params.zeta,
                    n: params.n,
                    elapsed_us: elapsed,
                    benchmark: None,
                });
            }
        }
        _ => {
            let model = levy_model_from(cfg)?;
            let r = cfg.f64_or("instrument.r", 0.0)?;
            let tau = cfg.f64_req("instrument.tau")?;
            let s = cfg.f64_req("instrument.spot")?;
            let sub = subordinator_from(cfg)?;
            for &k in &strikes {
                let (v, params, label) = match &sub {
                    Some(subp) => {
                        let (v, params) = crate::subordinated::subordinated_european_with(
                            &model, subp, s, k, r, tau, kind, eps, None, &tuning,
                        )?;
                        (v, params, "levy-cir-clock")
                    }
                    None => {
                        let q = levy::EuropeanQuery { model, r, tau, s, k, kind, eps };
                        let (v, params) = levy::european_price_with(&q, &tuning)?;
                        (v, params, "levy")
                    }
                };
                let elapsed = time_us(repeat, || match &sub {
                    Some(subp) => {
                        let _ = crate::subordinated::subordinated_european(
                            &model, subp, s, k, r, tau, kind, eps,
                        );
                    }
                    None => {
                        let q = levy::EuropeanQuery { model, r, tau, s, k, kind, eps };
                        let _ = levy::european_price(&q);
                    }
                });
                rows.push(Row {
                    label: label.into(),
                    point: k,
                    value: v,
                    method: "sinh",
                    eps,
                    zeta: params.zeta,
                    n: params.n,
                    elapsed_us: elapsed,
                    benchmark: None,
                });
            }
        }
    }
    emit(cfg, &rows)
}

fn run_quantile(cfg: &KvConfig) -> Result<()> {
    let model = levy_model_from(cfg)?;
    let t = cfg.f64_req("levy.t")?;
    let eps = cfg.f64_or("method.eps", 1e-12)?;
    let probabilities = cfg.f64_list("points")?;
    if probabilities.is_empty() {
        return Err(SinhError::Config("no probabilities given".into()));
    }
    let policy = GridPolicy {
        h_center: cfg.f64_opt("grid.h-center")?,
        a_low: cfg.f64_or("grid.a-low", 0.001)?,
        a_high: cfg.f64_or("grid.a-high", 0.999)?,
        tail_factor: cfg.f64_or("grid.tail-factor", 0.01)?,
    };
    let grid = quantile::build_grid(&model, t, eps, &policy)?;
    let repeat = repeat_of(cfg)?;
    let mut rows = Vec::new();
    for &a in &probabilities {
        let x = quantile::quantile(&grid, a)?;
        let elapsed = time_us(repeat, || {
            let _ = quantile::quantile(&grid, a);
        });
        rows.push(Row {
            label: "quantile".into(),
            point: a,
            value: x,
            method: "sinh",
            eps,
            zeta: grid.pc_left.zeta,
            n: grid.pc_left.n,
            elapsed_us: elapsed,
            benchmark: None,
        });
    }
    emit(cfg, &rows)
}

fn run_simulate(cfg: &KvConfig) -> Result<()> {
    let family = cfg.get("model.family").unwrap_or("").to_string();
    let seed = cfg.u64_or("seed", 1)?;
    let n_paths = cfg.usize_or("sim.n-paths", 1000)?;
    let n_steps = cfg.usize_or("sim.n-steps", 10)?;
    let eps = cfg.f64_or("method.eps", 1e-9)?;
    let path_out: Box<dyn Write> = match cfg.get("output.path") {
        Some(p) => Box::new(
            std::fs::File::create(p)
                .map_err(|e| SinhError::Config(format!("cannot create {p}: {e}")))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let mut path_out = std::io::BufWriter::new(path_out);
    if family == "heston" {
        let p = heston_from(cfg)?;
        let v0 = cfg.f64_req("instrument.v0")?;
        let t_step = cfg.f64_req("levy.t")?;
        let paths = crate::mc::simulate_heston(&p, v0, t_step, n_steps, n_paths, seed, eps)?;
        crate::mc::write_paths(&mut path_out, &paths.x, Some(&paths.v))
            .map_err(|e| SinhError::Config(format!("write failed: {e}")))?;
    } else {
        let model = levy_model_from(cfg)?;
        let t_step = cfg.f64_req("levy.t")?;
        let policy = GridPolicy {
            h_center: cfg.f64_opt("grid.h-center")?,
            a_low: cfg.f64_or("grid.a-low", 0.001)?,
            a_high: cfg.f64_or("grid.a-high", 0.999)?,
            tail_factor: cfg.f64_or("grid.tail-factor", 0.01)?,
        };
        let grid = quantile::build_grid(&model, t_step, eps, &policy)?;
        let paths = crate::mc::simulate_levy(&grid, n_steps, n_paths, seed)?;
        crate::mc::write_paths(&mut path_out, &paths, None)
            .map_err(|e| SinhError::Config(format!("write failed: {e}")))?;
    }
    Ok(())
}

fn run_table(cfg: &KvConfig, table: u32) -> Result<()> {
    let repeat = cfg.usize_or("output.repeat", 1000)?;
    let rows = tables::reproduce(table, repeat)?;
    emit(cfg, &rows)
}
