use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use zetaclt::chain::Normalization;
use zetaclt::experiment::{
    in_pool, run_chain_experiment, run_cutoff_ladder, run_identity_sweep, run_moment_check,
    run_rate_ladder, RunConfig,
};
use zetaclt::zeta::{find_zeros_with, zeta, SPoint, DEFAULT_ZERO_HEIGHT_CAP};

#[derive(Parser)]
#[command(
    name = "zetaclt",
    version,
    about = "Numerical lab for the Selberg central limit theorem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stagewise bounded-Lipschitz distances along the approximation chain (CSV).
    Chain {
        #[command(flatten)]
        common: Common,
        /// Emit the full report as JSON instead of the CSV row.
        #[arg(long)]
        json: bool,
    },
    /// Closed-form, random-phase and quadrature moments of the prime sum (JSON).
    Moments {
        #[command(flatten)]
        common: Common,
    },
    /// Chain runs across a ladder of heights (CSV), or across P2 cutoffs at fixed T (JSON).
    Ladder {
        #[command(flatten)]
        common: Common,
        /// Heights to run; defaults to `ladder_t_values` from the config.
        #[arg(long, value_delimiter = ',')]
        t_values: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = LadderKind::Rate)]
        kind: LadderKind,
    },
    /// Selberg identity residual sweep plus the off-axis shift check (JSON).
    Identity {
        #[command(flatten)]
        common: Common,
    },
    /// Critical-line zeros in a height window (JSON).
    Zeros {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_min: f64,
        #[arg(long)]
        t_max: f64,
        /// Sign-scan step.
        #[arg(long, default_value_t = zetaclt::zeta::DEFAULT_ZERO_RESOLUTION)]
        resolution: f64,
    },
    /// Evaluate zeta at one point with its error bounds (JSON).
    ZetaEval {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        sigma: f64,
        /// Imaginary part of s.
        #[arg(long = "im", allow_hyphen_values = true)]
        im: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LadderKind {
    Rate,
    Cutoff,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long = "t")]
    t: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    normalization: Option<Normalization>,
    /// Any other config key, as `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Also write a gnuplot script next to the CSV output.
    #[arg(long)]
    plot: bool,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                RunConfig::from_file(p).with_context(|| format!("reading {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .with_context(|| format!("--set expects key=value, got {kv:?}"))?;
            cfg.set(k.trim(), v.trim())?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.t {
            cfg.t = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = self.threads {
            cfg.threads = Some(v);
        }
        if let Some(v) = self.normalization {
            cfg.normalization = v;
        }
        if self.plot && cfg.out.is_none() {
            bail!("--plot needs --out so the script can reference the CSV file");
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &RunConfig, body: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

enum PlotKind {
    Chain,
    Ladder,
}

fn plot_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

/// Gnuplot script that loads the CSV from its own directory.
fn gnuplot_script(csv: &Path, kind: PlotKind) -> String {
    let name = csv
        .file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
    match kind {
        PlotKind::Chain => {
            s.push_str(
                "set title 'Stagewise bounded-Lipschitz distances'\n\
                 set style data histograms\n\
                 set style fill solid 0.6 border -1\n\
                 set ylabel 'distance'\n",
            );
            s.push_str(&format!("plot for [c=5:11] '{name}' using c\n"));
        }
        PlotKind::Ladder => {
            s.push_str(
                "set title 'Gaussian-stage distance across heights'\n\
                 set logscale x\n\
                 set xlabel 'T'\n\
                 set ylabel 'distance'\n",
            );
            s.push_str(&format!(
                "plot '{name}' using 1:9 with linespoints, '' using 1:11 with linespoints\n"
            ));
        }
    }
    s
}

fn write_plot(cfg: &RunConfig, common: &Common, kind: PlotKind) -> Result<()> {
    if !common.plot {
        return Ok(());
    }
    let Some(csv) = &cfg.out else {
        unreachable!("checked when the config was resolved");
    };
    let gp = plot_path(csv);
    fs::write(&gp, gnuplot_script(csv, kind))
        .with_context(|| format!("writing {}", gp.display()))?;
    eprintln!("wrote {}", gp.display());
    Ok(())
}

fn reject_plot(common: &Common) -> Result<()> {
    if common.plot {
        bail!("--plot is available for chain and rate-ladder CSV output");
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Chain { common, json } => {
            let cfg = common.config()?;
            if json && common.plot {
                bail!("--plot applies to CSV output only");
            }
            let report = in_pool(cfg.threads, || run_chain_experiment(&cfg))??;
            if json {
                emit(&cfg, &to_json(&report)?)
            } else {
                emit(&cfg, &report.to_csv())?;
                write_plot(&cfg, &common, PlotKind::Chain)
            }
        }
        Command::Moments { common } => {
            reject_plot(&common)?;
            let cfg = common.config()?;
            let check = in_pool(cfg.threads, || run_moment_check(&cfg))??;
            for r in &check.reports {
                if r.invalid_regime() {
                    eprintln!("note: k={} is outside the X^(4k) <= T regime", r.k);
                }
            }
            emit(&cfg, &to_json(&check)?)
        }
        Command::Ladder {
            common,
            t_values,
            kind,
        } => {
            let cfg = common.config()?;
            match kind {
                LadderKind::Rate => {
                    let ts = t_values.unwrap_or_else(|| cfg.ladder_t_values.clone());
                    let ladder = in_pool(cfg.threads, || run_rate_ladder(&cfg, &ts))?;
                    if let Some(rho) = ladder.spearman_x2_d {
                        eprintln!("spearman(X2, d_p12_z) = {rho:.3}");
                    }
                    emit(&cfg, &ladder.to_csv(&cfg))?;
                    write_plot(&cfg, &common, PlotKind::Ladder)
                }
                LadderKind::Cutoff => {
                    if t_values.is_some() {
                        bail!(
                            "--t-values applies to the rate ladder; the cutoff ladder runs at --t"
                        );
                    }
                    if common.plot {
                        bail!("--plot applies to the rate ladder only");
                    }
                    let ladder = in_pool(cfg.threads, || run_cutoff_ladder(&cfg))??;
                    emit(&cfg, &to_json(&ladder)?)
                }
            }
        }
        Command::Identity { common } => {
            reject_plot(&common)?;
            let cfg = common.config()?;
            let sweep = in_pool(cfg.threads, || run_identity_sweep(&cfg))??;
            emit(&cfg, &to_json(&sweep)?)
        }
        Command::Zeros {
            common,
            t_min,
            t_max,
            resolution,
        } => {
            reject_plot(&common)?;
            let cfg = common.config()?;
            let em = cfg.em_config(t_max);
            let zeros = in_pool(cfg.threads, || {
                find_zeros_with(t_min, t_max, &em, resolution, DEFAULT_ZERO_HEIGHT_CAP)
            })??;
            emit(&cfg, &to_json(&zeros)?)
        }
        Command::ZetaEval { common, sigma, im } => {
            reject_plot(&common)?;
            let cfg = common.config()?;
            let s = SPoint::new(sigma, im);
            let mut em = cfg.em_config(im.abs());
            if cfg.em_terms.is_none() {
                em = em.with_terms(em.required_terms(s));
            }
            let z = zeta(s, &em)?;
            let body = json!({
                "sigma": sigma,
                "t": im,
                "re": z.value.re,
                "im": z.value.im,
                "truncation_bound": z.truncation_bound,
                "rounding_bound": z.rounding_bound,
                "terms": em.terms,
                "bernoulli_order": em.bernoulli_order,
            });
            emit(&cfg, &to_json(&body)?)
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse().command) {
        eprintln!("error: {e:#}");
        std::process::exit(2);
    }
}
