use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use raydiv_core::format::human;
use raydiv_core::fuzz::{run_fuzz, FuzzConfig};
use raydiv_core::gc::{run_sweep, GcConfig};
use raydiv_core::inequalities::INEQUALITY_SLACK;
use raydiv_core::levelcurves::{level_grids, CONTOUR_LEVELS};
use raydiv_core::{
    certify_ks_identity, divergence, divergence_over_rays, ks_two_sided, ray_supremum, symmetrized_over_rays,
    DiscreteDistribution, Error, Generator, VERSION,
};
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_VIOLATION: u8 = 4;
const EXIT_NOT_CONTINUOUS: u8 = 5;

#[derive(Parser)]
#[command(name = "raydiv", version, about = "f-divergences over rays for discrete distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate f-divergences between two distribution files.
    Divergence {
        /// Generator name or comma-separated list.
        #[arg(long = "gen", default_value = "tv")]
        generators: String,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
        direction: DirectionArg,
        /// Use the divergence over rays instead of the plain one.
        #[arg(long)]
        over_rays: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// One-sided and two-sided Kolmogorov-Smirnov statistics.
    Ks {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Glivenko-Cantelli sweep of empirical measures against a target.
    Gc {
        /// Distribution file, or comma-separated weights on atoms 1..n.
        #[arg(long)]
        nu: String,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value = "tv,kl,hellinger2,chi2")]
        gens: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Divergence grids over the simplex of three-atom measures.
    Levelcurves {
        /// Distribution file, or three comma-separated weights.
        #[arg(long)]
        nu: String,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long, default_value = "tv")]
        gens: String,
        #[arg(long)]
        out: PathBuf,
        /// Also write contour SVGs next to the grid CSVs.
        #[arg(long)]
        svg: bool,
        #[arg(long, default_value_t = CONTOUR_LEVELS)]
        levels: usize,
    },
    /// Check the inequality web and identities on random pairs.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 20)]
        max_atoms: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, hide = true, allow_hyphen_values = true, default_value_t = INEQUALITY_SLACK)]
        slack: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Forward,
    Reverse,
    Both,
    Symmetrized,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

enum Failure {
    Core(Error),
    Violations(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violations(report)) => {
            print!("{report}");
            ExitCode::from(EXIT_VIOLATION)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::AbsoluteContinuityViolated { .. } => EXIT_NOT_CONTINUOUS,
                Error::UnknownGenerator(_) | Error::InvalidConfig(_) | Error::InvalidPartition(_) => EXIT_USAGE,
                _ => EXIT_DATA,
            })
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Divergence {
            generators,
            mu,
            nu,
            direction,
            over_rays,
            format,
        } => cmd_divergence(&generators, &mu, &nu, direction, over_rays, format),
        Command::Ks { mu, nu, format } => cmd_ks(&mu, &nu, format),
        Command::Gc {
            nu,
            sizes,
            trials,
            gens,
            seed,
            out,
        } => cmd_gc(&nu, sizes, trials, &gens, seed, out.as_deref()),
        Command::Levelcurves {
            nu,
            grid,
            gens,
            out,
            svg,
            levels,
        } => cmd_levelcurves(&nu, grid, &gens, &out, svg, levels),
        Command::Fuzz {
            pairs,
            max_atoms,
            seed,
            slack,
        } => cmd_fuzz(pairs, max_atoms, seed, slack),
    }
}

/// Accepts a distribution file path or an inline list of weights on atoms 1..n.
fn distribution_arg(arg: &str) -> Result<DiscreteDistribution, Error> {
    let inline: Option<Vec<f64>> = arg.split(',').map(|s| s.trim().parse().ok()).collect();
    match inline {
        Some(weights) => {
            let atoms: Vec<f64> = (1..=weights.len()).map(|k| k as f64).collect();
            DiscreteDistribution::new(&atoms, &weights)
        }
        None => DiscreteDistribution::from_json_file(arg),
    }
}

fn header(command: &str, settings: &str) -> String {
    format!("raydiv {VERSION} {command} {settings}")
}

fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(human(x))
    }
}

fn cmd_divergence(
    generators: &str,
    mu_path: &Path,
    nu_path: &Path,
    direction: DirectionArg,
    over_rays: bool,
    format: Format,
) -> Result<(), Failure> {
    let gens = Generator::parse_list(generators)?;
    let mu = DiscreteDistribution::from_json_file(mu_path)?;
    let nu = DiscreteDistribution::from_json_file(nu_path)?;
    let eval = |f: &Generator, a: &DiscreteDistribution, b: &DiscreteDistribution| {
        if over_rays {
            divergence_over_rays(f, a, b)
        } else {
            divergence(f, a, b)
        }
    };

    let mut rows: Vec<(&str, &'static str, f64)> = Vec::new();
    for f in &gens {
        match direction {
            DirectionArg::Forward => rows.push((f.name(), "forward", eval(f, &mu, &nu)?.value)),
            DirectionArg::Reverse => rows.push((f.name(), "reverse", eval(f, &nu, &mu)?.value)),
            DirectionArg::Both => {
                rows.push((f.name(), "forward", eval(f, &mu, &nu)?.value));
                rows.push((f.name(), "reverse", eval(f, &nu, &mu)?.value));
            }
            DirectionArg::Symmetrized => {
                let value = if over_rays {
                    symmetrized_over_rays(f, &mu, &nu)?.value
                } else {
                    eval(f, &mu, &nu)?.value.max(eval(f, &nu, &mu)?.value)
                };
                rows.push((f.name(), "symmetrized", value));
            }
        }
    }

    let direction_name = direction.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let names: Vec<&str> = gens.iter().map(Generator::name).collect();
    match format {
        Format::Text => {
            println!(
                "# {}",
                header(
                    "divergence",
                    &format!(
                        "gen={} direction={direction_name} over_rays={over_rays} mu={} nu={}",
                        names.join(","),
                        mu_path.display(),
                        nu_path.display()
                    )
                )
            );
            for (name, dir, value) in rows {
                println!("{name} {dir} {}", human(value));
            }
        }
        Format::Json => {
            let results: Vec<Value> = rows
                .into_iter()
                .map(|(name, dir, value)| json!({"generator": name, "direction": dir, "value": json_number(value)}))
                .collect();
            let doc = json!({
                "version": VERSION,
                "command": "divergence",
                "config": {
                    "gen": names,
                    "direction": direction_name,
                    "over_rays": over_rays,
                    "mu": mu_path.display().to_string(),
                    "nu": nu_path.display().to_string(),
                },
                "results": results,
            });
            println!("{}", serde_json::to_string_pretty(&doc).map_err(Error::from)?);
        }
    }
    Ok(())
}

fn cmd_ks(mu_path: &Path, nu_path: &Path, format: Format) -> Result<(), Failure> {
    let mu = DiscreteDistribution::from_json_file(mu_path)?;
    let nu = DiscreteDistribution::from_json_file(nu_path)?;
    let forward = ray_supremum(&mu, &nu);
    let reverse = ray_supremum(&nu, &mu);
    let two_sided = ks_two_sided(&mu, &nu);
    let residual = |a, b| match certify_ks_identity(a, b) {
        Ok(cert) => Ok(Some(cert.residual)),
        Err(Error::AbsoluteContinuityViolated { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let forward_residual = residual(&mu, &nu)?;
    let reverse_residual = residual(&nu, &mu)?;

    match format {
        Format::Text => {
            let show = |r: Option<f64>, lhs: &str, rhs: &str| match r {
                Some(r) => human(r),
                None => format!("not applicable ({lhs} is not absolutely continuous with respect to {rhs})"),
            };
            println!(
                "# {}",
                header("ks", &format!("mu={} nu={}", mu_path.display(), nu_path.display()))
            );
            println!("one_sided_forward {}", human(forward.value));
            println!("one_sided_reverse {}", human(reverse.value));
            println!("two_sided {}", human(two_sided));
            println!("identity_residual_forward {}", show(forward_residual, "mu", "nu"));
            println!("identity_residual_reverse {}", show(reverse_residual, "nu", "mu"));
        }
        Format::Json => {
            let doc = json!({
                "version": VERSION,
                "command": "ks",
                "config": {"mu": mu_path.display().to_string(), "nu": nu_path.display().to_string()},
                "one_sided_forward": forward.value,
                "one_sided_reverse": reverse.value,
                "two_sided": two_sided,
                "identity_residual_forward": forward_residual,
                "identity_residual_reverse": reverse_residual,
            });
            println!("{}", serde_json::to_string_pretty(&doc).map_err(Error::from)?);
        }
    }
    Ok(())
}

fn cmd_gc(
    nu: &str,
    sizes: Vec<usize>,
    trials: usize,
    gens: &str,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let config = GcConfig {
        target: distribution_arg(nu)?,
        sample_sizes: sizes,
        trials,
        generators: Generator::parse_list(gens)?,
        seed,
    };
    let trace = run_sweep(&config)?;
    let csv = trace.to_csv(&[header("gc", &config.describe())]);
    match out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_levelcurves(nu: &str, grid: usize, gens: &str, out: &Path, svg: bool, levels: usize) -> Result<(), Failure> {
    let nu = distribution_arg(nu)?;
    let gens = Generator::parse_list(gens)?;
    let grids = level_grids(&nu, grid, &gens)?;
    fs::create_dir_all(out)?;
    let names: Vec<&str> = gens.iter().map(Generator::name).collect();
    let settings = format!("grid={grid} gens={} nu={}", names.join(","), nu.to_json());
    for g in &grids {
        let stem = g.stem();
        let metadata = [
            header("levelcurves", &settings),
            format!(
                "generator={} over_rays={} orientation={}",
                g.generator,
                g.over_rays,
                g.orientation.label()
            ),
        ];
        let csv_path = out.join(format!("{stem}.csv"));
        fs::write(&csv_path, g.to_csv(&metadata))?;
        println!("{}", csv_path.display());
        if svg {
            let mut metadata = metadata.to_vec();
            metadata.push(format!("levels={levels}"));
            let svg_path = out.join(format!("{stem}.svg"));
            fs::write(&svg_path, g.contour_svg(levels, &metadata))?;
            println!("{}", svg_path.display());
        }
    }
    Ok(())
}

fn cmd_fuzz(pairs: usize, max_atoms: usize, seed: u64, slack: f64) -> Result<(), Failure> {
    if max_atoms == 0 {
        return Err(Error::InvalidConfig("max-atoms must be at least 1".into()).into());
    }
    let config = FuzzConfig {
        pairs,
        max_atoms,
        seed,
        slack,
    };
    let report = run_fuzz(&config)?;
    let mut text = format!(
        "# {}\npairs {} checks {} violations {}\n",
        header(
            "fuzz",
            &format!("pairs={pairs} max_atoms={max_atoms} seed={seed} slack={}", human(slack))
        ),
        report.pairs,
        report.checks,
        report.violations.len()
    );
    if report.passed() {
        print!("{text}");
        return Ok(());
    }
    for v in &report.violations {
        text.push_str(&serde_json::to_string(v).map_err(Error::from)?);
        text.push('\n');
    }
    Err(Failure::Violations(text))
}
