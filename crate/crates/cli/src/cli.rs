use std::fmt::Display;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ghp::diagnostics::{
    four_point_defect, four_point_defect_sampled, midpoint_defect, precompactness_report,
    FOUR_POINT_LIMIT,
};
use ghp::io::{curve_to_csv, parse_function, parse_space, serialize_space, space_from_json_with};
use ghp::tolerance::{Profile, Tolerances};
use ghp::{
    code_tree, generalized_prokhorov, ghp_compact, ghp_extended, hausdorff, prokhorov_bruteforce,
    prokhorov_exact, stability_certificate, restriction_curve, sigma, MeasureVec, Space, Subset,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::suites::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ghpkit", version, about = "Distances between finite rooted measured metric spaces")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Tolerance profile (default, strict, loose); overrides GHP_TOLERANCE_PROFILE.
    #[arg(long, global = true)]
    pub profile: Option<Profile>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hausdorff and Prokhorov distances inside one space.
    #[command(subcommand)]
    Dist(DistCommand),
    /// Compact and extended GHP bounds between two spaces.
    #[command(subcommand)]
    Ghp(GhpCommand),
    /// Trees coded by sampled excursions.
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Structural diagnostics.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Run a named acceptance suite.
    Suite {
        name: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum DistCommand {
    /// Hausdorff distance between two subsets given as index lists.
    Hausdorff {
        space: PathBuf,
        #[arg(long, value_delimiter = ',')]
        a: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<usize>,
    },
    /// Prokhorov distance; each measure defaults to the space's masses.
    Prokhorov {
        space: PathBuf,
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<f64>>,
        /// Also run the subset-enumeration reference (at most 12 points).
        #[arg(long)]
        brute: bool,
    },
    /// Prokhorov distance integrated over balls around the root.
    Generalized {
        space: PathBuf,
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<f64>>,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Seed of the local search, needed when exhaustive search is over budget.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub exhaustive_budget: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum GhpCommand {
    Compact(PairArgs),
    Extended(PairArgs),
    /// The restriction curve, one interval per row.
    Curve {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum TreeCommand {
    /// Code a function file into a space file.
    Code {
        function: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Stability certificate for two functions.
    Cert { f: PathBuf, g: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Validate a space file and list every violation.
    Validate { space: PathBuf },
    FourPoint {
        space: PathBuf,
        /// Quadruples sampled when the space is too large to enumerate.
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    Midpoint { space: PathBuf },
    Precompact {
        #[arg(long, num_args = 1.., required = true)]
        family: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
    },
}

/// What a command produced: a JSON value, a text rendering, and an exit
/// code.
pub struct Outcome {
    pub value: Value,
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(value: impl Serialize, text: impl Into<String>) -> Self {
        Outcome {
            value: serde_json::to_value(value).expect("reports serialize"),
            text: text.into(),
            code: EXIT_OK,
        }
    }

    fn with_code(mut self, code: i32) -> Self {
        self.code = code;
        self
    }
}

pub struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Run = std::result::Result<Outcome, Failure>;

/// Executes a parsed command line, printing to stdout/stderr, and returns
/// the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let json = cli.json;
    match execute(cli) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.value).expect("json"));
            } else {
                println!("{}", out.text);
            }
            out.code
        }
        Err(Failure(msg)) => {
            if json {
                println!("{}", json!({ "error": msg }));
            }
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

fn tolerances(profile: Option<Profile>) -> std::result::Result<Tolerances, Failure> {
    Ok(match profile {
        Some(p) => Tolerances::profile(p),
        None => Tolerances::from_env()?,
    })
}

fn load_space(path: &PathBuf, tol: &Tolerances) -> std::result::Result<Space, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    space_from_json_with(&text, tol.triangle).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn measure(space: &Space, given: Option<Vec<f64>>) -> std::result::Result<MeasureVec, Failure> {
    Ok(match given {
        Some(m) => MeasureVec::new(space, m)?,
        None => MeasureVec::of(space),
    })
}

fn run_config(pair: &PairArgs, tol: Tolerances) -> RunConfig {
    let mut cfg = RunConfig::new(pair.seed);
    cfg.tolerances = tol;
    if let Some(b) = pair.exhaustive_budget {
        cfg.exhaustive_budget = b;
    }
    cfg
}

pub fn execute(cli: Cli) -> Run {
    let tol = tolerances(cli.profile)?;
    match cli.command {
        Command::Dist(cmd) => dist(cmd, &tol),
        Command::Ghp(cmd) => ghp_cmd(cmd, tol),
        Command::Tree(cmd) => tree(cmd),
        Command::Check(cmd) => check(cmd, &tol),
        Command::Suite { name, seed } => {
            let mut cfg = RunConfig::new(Some(seed));
            cfg.tolerances = tol;
            let report = run_suite(&name, &cfg)?;
            let text = report
                .criteria
                .iter()
                .map(|c| c.summary())
                .collect::<Vec<_>>()
                .join("\n");
            let code = if report.passed { EXIT_OK } else { EXIT_ASSERTION };
            Ok(Outcome::ok(&report, text).with_code(code))
        }
    }
}

fn dist(cmd: DistCommand, tol: &Tolerances) -> Run {
    match cmd {
        DistCommand::Hausdorff { space, a, b } => {
            let x = load_space(&space, tol)?;
            let d = hausdorff(&x, &Subset::new(&x, a)?, &Subset::new(&x, b)?)?;
            Ok(Outcome::ok(json!({ "hausdorff": d }), format!("hausdorff {d}")))
        }
        DistCommand::Prokhorov { space, mu, nu, brute } => {
            let x = load_space(&space, tol)?;
            let (mu, nu) = (measure(&x, mu)?, measure(&x, nu)?);
            let res = prokhorov_exact(&x, &mu, &nu)?;
            let reference = if brute {
                Some(prokhorov_bruteforce(&x, &mu, &nu)?)
            } else {
                None
            };
            let mut text = format!("prokhorov {}", res.value);
            if let Some(r) = reference {
                text.push_str(&format!("\nbruteforce {r}"));
            }
            Ok(Outcome::ok(
                json!({ "prokhorov": res.value, "witness": res.witness, "bruteforce": reference }),
                text,
            ))
        }
        DistCommand::Generalized { space, mu, nu } => {
            let x = load_space(&space, tol)?;
            let d = generalized_prokhorov(&x, &measure(&x, mu)?, &measure(&x, nu)?)?;
            Ok(Outcome::ok(
                json!({ "generalized_prokhorov": d }),
                format!("generalized prokhorov {d}"),
            ))
        }
    }
}

fn ghp_cmd(cmd: GhpCommand, tol: Tolerances) -> Run {
    match cmd {
        GhpCommand::Compact(pair) => {
            let (x, y) = (load_space(&pair.a, &tol)?, load_space(&pair.b, &tol)?);
            let b = ghp_compact(&x, &y, &run_config(&pair, tol).search())?;
            let text = format!(
                "lower {}\nupper {}\ncertified {}\nwitness {:?}",
                b.lower,
                b.upper,
                b.certified,
                b.witness.pairs()
            );
            Ok(Outcome::ok(
                json!({
                    "lower": b.lower,
                    "upper": b.upper,
                    "certified": b.certified,
                    "witness": b.witness,
                    "cross": b.cross,
                }),
                text,
            ))
        }
        GhpCommand::Extended(pair) => {
            let (x, y) = (load_space(&pair.a, &tol)?, load_space(&pair.b, &tol)?);
            let e = ghp_extended(&x, &y, &run_config(&pair, tol).search())?;
            Ok(Outcome::ok(e, format!("lower {}\nupper {}", e.lower, e.upper)))
        }
        GhpCommand::Curve { pair, csv } => {
            let (x, y) = (load_space(&pair.a, &tol)?, load_space(&pair.b, &tol)?);
            let curve = restriction_curve(&x, &y, &run_config(&pair, tol).search())?;
            let table = curve_to_csv(&curve);
            if let Some(path) = &csv {
                fs::write(path, &table)?;
            }
            Ok(Outcome::ok(&curve, table.trim_end().to_string()))
        }
    }
}

fn tree(cmd: TreeCommand) -> Run {
    match cmd {
        TreeCommand::Code { function, output } => {
            let f = parse_function(&function)?;
            let t = code_tree(&f)?;
            if let Some(path) = &output {
                serialize_space(&t.space, path)?;
            }
            let text = format!(
                "points {}\nsigma {}\ntotal mass {}",
                t.space.len(),
                sigma(&f),
                t.space.total_mass()
            );
            Ok(Outcome::ok(
                json!({
                    "sigma": sigma(&f),
                    "points": t.space.len(),
                    "total_mass": t.space.total_mass(),
                    "tree": t,
                }),
                text,
            ))
        }
        TreeCommand::Cert { f, g } => {
            let c = stability_certificate(&parse_function(&f)?, &parse_function(&g)?)?;
            let text = format!("ub {}\nrhs {}\nslack {}\nok {}", c.ub, c.rhs, c.slack, c.ok);
            let code = if c.ok { EXIT_OK } else { EXIT_ASSERTION };
            Ok(Outcome::ok(c, text).with_code(code))
        }
    }
}

fn check(cmd: CheckCommand, tol: &Tolerances) -> Run {
    match cmd {
        CheckCommand::Validate { space } => {
            let x = load_space(&space, tol)?;
            Ok(Outcome::ok(
                json!({ "valid": true, "points": x.len() }),
                format!("valid space with {} points", x.len()),
            ))
        }
        CheckCommand::FourPoint { space, samples, seed } => {
            let x = parse_space(&space)?;
            if x.len() <= FOUR_POINT_LIMIT {
                let d = four_point_defect(&x)?;
                Ok(Outcome::ok(
                    json!({ "defect": d, "exhaustive": true }),
                    format!("four-point defect {d}"),
                ))
            } else {
                let s = four_point_defect_sampled(&x, samples, seed);
                Ok(Outcome::ok(
                    json!({ "defect": s.defect, "exhaustive": false, "samples": s.samples, "seed": s.seed }),
                    format!(
                        "four-point defect at least {} ({} sampled quadruples, {} points exceeds {})",
                        s.defect,
                        s.samples,
                        x.len(),
                        FOUR_POINT_LIMIT
                    ),
                ))
            }
        }
        CheckCommand::Midpoint { space } => {
            let d = midpoint_defect(&load_space(&space, tol)?);
            Ok(Outcome::ok(json!({ "defect": d }), format!("midpoint defect {d}")))
        }
        CheckCommand::Precompact { family, eps, r } => {
            let spaces = family
                .iter()
                .map(|p| load_space(p, tol))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let rep = precompactness_report(&spaces, &eps, &r)?;
            let mut text = format!(
                "{}\nfamily size {}\nsup diameter {}\n",
                rep.note, rep.family_size, rep.sup_diameter
            );
            for e in &rep.net_cardinals {
                match e.r {
                    Some(r) => text.push_str(&format!("net eps={} r={}: {}\n", e.eps, r, e.cardinal)),
                    None => text.push_str(&format!("net eps={}: {}\n", e.eps, e.cardinal)),
                }
            }
            for m in &rep.sup_masses {
                text.push_str(&format!("mass r={}: {}\n", m.r, m.mass));
            }
            Ok(Outcome::ok(&rep, text.trim_end().to_string()))
        }
    }
}
