use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use orlicz_core::cli::config::{default_conjugate_points, parse_config, with_overrides, AnalysisConfig, Named, Request, RequestEntry};
use orlicz_core::cli::examples;
use orlicz_core::cli::run::RunOptions;
use orlicz_core::cli::{run, Format, Kind, Report};
use orlicz_core::YoungFunction;

const EXIT_CONFIG: u8 = 1;
const EXIT_MISMATCH: u8 = 2;

#[derive(Parser)]
#[command(name = "orlicz", version, about = "Orlicz-space norms and operator criteria from declarative configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Relative tolerance for norms, conjugates and inverses.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of generated atoms realized from a family.
    #[arg(long = "budget-n", global = true)]
    budget_n: Option<usize>,
    /// Partial sums or maxima above this count as divergent.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Seed for the randomized norm estimates.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Record per-request wall time (reports then differ between runs).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args)]
struct WithConfig {
    /// TOML analysis config.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Numerical conjugate of a catalog function, from a config or directly.
    Conjugate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Catalog name: power, exp_power or l_log_l.
        #[arg(long, conflicts_with = "config")]
        young: Option<String>,
        #[arg(long, requires = "young")]
        p: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Luxemburg norms requested in a config.
    Norm {
        #[command(flatten)]
        cfg: WithConfig,
        #[command(flatten)]
        common: Common,
    },
    /// Boundedness of multiplication operators in a config.
    CheckMult {
        #[command(flatten)]
        cfg: WithConfig,
        #[command(flatten)]
        common: Common,
    },
    /// Boundedness of composition operators in a config.
    CheckComp {
        #[command(flatten)]
        cfg: WithConfig,
        #[command(flatten)]
        common: Common,
    },
    /// Range classification requests in a config.
    ClassifyRange {
        #[command(flatten)]
        cfg: WithConfig,
        #[command(flatten)]
        common: Common,
    },
    /// Every request in a config.
    Run {
        #[command(flatten)]
        cfg: WithConfig,
        #[command(flatten)]
        common: Common,
    },
    /// Runs a bundled fixture and compares against its expectations.
    ReproduceExample {
        /// Example number, fixture name, or `all`.
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn load(path: &Path, common: &Common) -> Result<AnalysisConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut cfg = parse_config(&text).map_err(|errs| {
        errs.0
            .iter()
            .map(|e| format!("{}:{e}", path.display()))
            .collect::<Vec<_>>()
            .join("\n")
    })?;
    apply(&mut cfg, common);
    Ok(cfg)
}

fn apply(cfg: &mut AnalysisConfig, common: &Common) {
    cfg.setting = with_overrides(cfg.setting, common.budget_n, common.threshold, common.tol);
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
}

fn emit(reports: &[Report], common: &Common, cfg_out: Option<&str>) -> Result<(), String> {
    let body = match common.format {
        Format::Machine if reports.len() == 1 => reports[0].render(Format::Machine),
        Format::Machine => {
            let mut s = serde_json::to_string_pretty(reports).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
        Format::Text => reports.iter().map(|r| r.render(Format::Text)).collect::<Vec<_>>().join("\n"),
    };
    match common.out.as_deref().or(cfg_out.map(Path::new)) {
        Some(p) => std::fs::write(p, body).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn options(common: &Common, only: Option<Kind>) -> RunOptions {
    RunOptions {
        timing: common.timing,
        only: only.map(|k| vec![k]),
    }
}

fn config_run(cfg: &WithConfig, common: &Common, only: Option<Kind>) -> Result<ExitCode, String> {
    let c = load(&cfg.config, common)?;
    let rep = run(&c, &options(common, only));
    if rep.entries.is_empty() {
        eprintln!("note: no {} requests in {}", only.map_or("", Kind::as_str), cfg.config.display());
    }
    emit(&[rep], common, c.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cmd: Command) -> Result<ExitCode, String> {
    match cmd {
        Command::Conjugate {
            config,
            young,
            p,
            common,
        } => {
            let mut c = match (&config, &young) {
                (Some(path), _) => load(path, &common)?,
                (None, Some(kind)) => direct_conjugate(kind, p)?,
                (None, None) => return Err("conjugate needs --config or --young".into()),
            };
            apply(&mut c, &common);
            let rep = run(&c, &options(&common, Some(Kind::Conjugate)));
            emit(&[rep], &common, c.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Norm { cfg, common } => config_run(&cfg, &common, Some(Kind::Norm)),
        Command::CheckMult { cfg, common } => config_run(&cfg, &common, Some(Kind::CheckMult)),
        Command::CheckComp { cfg, common } => config_run(&cfg, &common, Some(Kind::CheckComp)),
        Command::ClassifyRange { cfg, common } => config_run(&cfg, &common, Some(Kind::ClassifyRange)),
        Command::Run { cfg, common } => config_run(&cfg, &common, None),
        Command::ReproduceExample { name, common } => {
            let picked = examples::select(&name);
            if picked.is_empty() {
                return Err(format!(
                    "unknown example '{name}' (known: {})",
                    examples::known_names().join(", ")
                ));
            }
            let mut reports = Vec::new();
            for f in picked {
                let rep = f
                    .run_with(
                        |s| with_overrides(s, common.budget_n, common.threshold, common.tol),
                        &options(&common, None),
                    )
                    .map_err(|e| format!("fixture {}: {e}", f.name))?;
                reports.push(rep);
            }
            emit(&reports, &common, None)?;
            let mut mismatched = false;
            for r in &reports {
                for m in r.mismatches() {
                    mismatched = true;
                    let rank = |x: Option<usize>| x.map(|r| format!(" rank {r}")).unwrap_or_default();
                    eprintln!(
                        "mismatch {}/{}:\n-  {}{}\n+  {}{}",
                        r.name.as_deref().unwrap_or("?"),
                        m.id,
                        m.expected,
                        rank(m.expected_rank),
                        m.actual,
                        rank(m.actual_rank)
                    );
                }
            }
            Ok(if mismatched {
                ExitCode::from(EXIT_MISMATCH)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

/// A one-request config for `conjugate --young KIND --p P`.
fn direct_conjugate(kind: &str, p: Option<f64>) -> Result<AnalysisConfig, String> {
    let made = match kind {
        "power" => YoungFunction::power(p.ok_or("power needs --p")?),
        "exp_power" => YoungFunction::exp_power(p.unwrap_or(1.0)),
        "l_log_l" => YoungFunction::l_log_l(p.unwrap_or(1.0)),
        other => return Err(format!("unknown catalog name '{other}' (expected power, exp_power, l_log_l)")),
    }
    .map_err(|e| e.to_string())?;
    Ok(AnalysisConfig {
        description: None,
        space: None,
        setting: Default::default(),
        seed: 0,
        out: None,
        requests: vec![RequestEntry {
            id: "conjugate".into(),
            request: Request::Conjugate {
                phi: Named {
                    name: made.name(),
                    value: made,
                },
                points: default_conjugate_points(),
            },
        }],
        expect: Default::default(),
    })
}
