//! Command line front end for the epistemic toy model library.
//!
//! Verbs operate on small JSON files (see [`formats`]) and print JSON (or
//! CSV where tabular) to stdout. Errors print a one-line JSON object to
//! stderr; the exit code is 1 for IO/parse/usage problems and 2 for
//! inputs the model rejects.

pub mod error;
pub mod formats;
pub mod render;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use epitoy_core::{
    negativity_witness, solve_constrained_q, sweep_r, BellScenario, MeasureOrder, Observable,
    OptMode, Prime, SearchOptions, Side1, Side2, SweepPoint,
};

use error::{domain_err, CliError, EXIT_INPUT};
use formats::{read_json, JointFile, LoadedState, ScenarioFile, StateFile};

#[derive(Parser, Debug)]
#[command(
    name = "epitoy",
    version,
    about = "Epistemic toy model over prime fields: states, measures, Bell tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum SearchMode {
    /// Classical nonnegative states.
    #[default]
    Nonneg,
    /// States with negative weights allowed (odd integer orders).
    Extended,
}

impl From<SearchMode> for OptMode {
    fn from(m: SearchMode) -> OptMode {
        match m {
            SearchMode::Nonneg => OptMode::NonNegative,
            SearchMode::Extended => OptMode::Extended,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the mutually unbiased observable family X_a, X_b + k X_a.
    Observables {
        /// Field order (a prime).
        #[arg(long)]
        prime: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Evaluate the generalized measure M_r of a state file.
    Measure {
        /// State file (weights "P" or fiducial rows "Q").
        #[arg(long)]
        input: PathBuf,
        /// Measure order, r > -1.
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
    },
    /// Check whether a state sits at the pure level M_r = 1/p.
    Purity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        /// Acceptance width around 1/p.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Solve M_r = target for the order r.
    SolveR {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        target: f64,
    },
    /// Convert a state file to the other representation (P <-> Q).
    Convert {
        #[arg(long)]
        input: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complement a p = 2 state (every fiducial probability q -> 1 - q).
    Complement {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report negative epistemic weights of a p = 2 fiducial state.
    Witness {
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate a Bell-CHSH scenario: correlators, CHSH value,
    /// no-signaling check, and optionally a seeded finite-round sample.
    Bell {
        /// Scenario file with the two side-2 states "S" and "Sprime".
        #[arg(long)]
        scenario: PathBuf,
        /// Order at which both side-2 states must be pure.
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        /// Include the per-setting joint outcome tables.
        #[arg(long)]
        tables: bool,
        /// Number of sampled rounds per setting pair.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Maximize the CHSH value over pure side-2 states on a grid of orders.
    Sweep {
        /// Comma-separated measure orders, e.g. "-0.5,0,1,5".
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        r_grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t)]
        mode: SearchMode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Jittered simplex restarts per grid seed.
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        /// Grid points per slot axis.
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the purity constraint for one fiducial slot, given the
    /// other two.
    SolveSlot {
        /// The two fixed slot values.
        #[arg(long, num_args = 2, allow_negative_numbers = true)]
        free: Vec<f64>,
        /// Which slot to solve for (0, 1, or 2).
        #[arg(long, default_value_t = 2)]
        slot: usize,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
    },
    /// Check the multi-system validity rules for a joint state file.
    ValidateJoint {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Raise the default cap on the number of systems.
        #[arg(long)]
        max_systems: Option<usize>,
    },
    /// Draw a state's weights on the ontic grid.
    Render {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Entry point shared by the binary and the tests: parses `args`,
/// runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                _ => {
                    eprintln!("{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn load_state(path: &PathBuf) -> Result<LoadedState, CliError> {
    read_json::<StateFile>(path)?.into_state()
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Observables { prime, format } => {
            let p = Prime::new(prime).map_err(domain_err)?;
            let obs = Observable::all(p);
            match format {
                Format::Json => {
                    let list: Vec<_> = obs
                        .iter()
                        .map(|o| {
                            let (a, b) = o.coefficients();
                            json!({
                                "index": o.index(),
                                "coeff_a": a.value(),
                                "coeff_b": b.value(),
                            })
                        })
                        .collect();
                    emit(&None, &pretty(&json!({ "p": prime, "observables": list })))
                }
                Format::Csv => {
                    let mut s = String::from("index,coeff_a,coeff_b\n");
                    for o in &obs {
                        let (a, b) = o.coefficients();
                        s.push_str(&format!("{},{},{}\n", o.index(), a.value(), b.value()));
                    }
                    emit(&None, &s)
                }
            }
        }

        Command::Measure { input, r } => {
            let state = load_state(&input)?;
            let m = state.to_dist().measure(r).map_err(domain_err)?;
            emit(
                &None,
                &pretty(&json!({ "p": state.prime().get(), "r": r, "measure": m })),
            )
        }

        Command::Purity { input, r, tol } => {
            let state = load_state(&input)?;
            let d = state.to_dist();
            let m = d.measure(r).map_err(domain_err)?;
            let level = 1.0 / state.prime().get() as f64;
            emit(
                &None,
                &pretty(&json!({
                    "p": state.prime().get(),
                    "r": r,
                    "measure": m,
                    "level": level,
                    "pure": (m - level).abs() <= tol,
                })),
            )
        }

        Command::SolveR { input, target } => {
            let state = load_state(&input)?;
            let r = state.to_dist().solve_r(target).map_err(domain_err)?;
            emit(&None, &pretty(&json!({ "target": target, "r": r })))
        }

        Command::Convert { input, out } => {
            let state = load_state(&input)?;
            let file = match &state {
                LoadedState::Weights(d) => StateFile::from_fiducial(&d.to_fiducial()),
                LoadedState::Fiducial(q) => StateFile::from_dist(&q.to_epistemic()),
            };
            let mut s = serde_json::to_string_pretty(&file).expect("state serializes");
            s.push('\n');
            emit(&out, &s)
        }

        Command::Complement { input, out } => {
            let state = load_state(&input)?;
            let comp = state.to_fiducial().complemented().map_err(domain_err)?;
            let mut s =
                serde_json::to_string_pretty(&StateFile::from_fiducial(&comp)).expect("serializes");
            s.push('\n');
            emit(&out, &s)
        }

        Command::Witness { input } => {
            let state = load_state(&input)?;
            let q = state.to_fiducial();
            let cells = negativity_witness(&q).map_err(domain_err)?;
            let list: Vec<_> = cells
                .iter()
                .map(|((a, b), w)| json!({ "x_a": a, "x_b": b, "weight": w }))
                .collect();
            emit(
                &None,
                &pretty(&json!({
                    "p": q.prime().get(),
                    "negative_cells": list,
                    "classical": cells.is_empty(),
                })),
            )
        }

        Command::Bell { scenario, r, tables, sample, seed } => {
            let file: ScenarioFile = read_json(&scenario)?;
            let (s, sp) = file.into_states()?;
            let sc = BellScenario::with_states(s, sp, r).map_err(domain_err)?;
            let mut body = json!({
                "r": r,
                "correlators": {
                    "a_s": sc.correlator(Side1::A, Side2::S),
                    "b_s": sc.correlator(Side1::B, Side2::S),
                    "a_sprime": sc.correlator(Side1::A, Side2::SPrime),
                    "b_sprime": sc.correlator(Side1::B, Side2::SPrime),
                },
                "chsh": sc.chsh(),
                "no_signaling": sc.no_signaling_check(),
            });
            if tables {
                let mut t = serde_json::Map::new();
                for (name, s1, s2) in [
                    ("a_s", Side1::A, Side2::S),
                    ("b_s", Side1::B, Side2::S),
                    ("a_sprime", Side1::A, Side2::SPrime),
                    ("b_sprime", Side1::B, Side2::SPrime),
                ] {
                    let table = sc
                        .joint_outcome_table(s1, s2, MeasureOrder::Side1First)
                        .map_err(domain_err)?;
                    t.insert(name.into(), json!(table));
                }
                body["tables"] = serde_json::Value::Object(t);
            }
            if let Some(rounds) = sample {
                let s = sc.sample(rounds, seed).map_err(domain_err)?;
                body["sample"] = json!({
                    "rounds": s.rounds,
                    "seed": s.seed,
                    "correlators": {
                        "a_s": s.correlators[0][0],
                        "b_s": s.correlators[1][0],
                        "a_sprime": s.correlators[0][1],
                        "b_sprime": s.correlators[1][1],
                    },
                    "b_value": s.b_value,
                });
            }
            emit(&None, &pretty(&body))
        }

        Command::Sweep { r_grid, mode, seed, restarts, grid, format, out } => {
            let opts = SearchOptions { seed, restarts, grid };
            let points = sweep_r(&r_grid, mode.into(), &opts).map_err(domain_err)?;
            match format {
                Format::Json => {
                    let list: Vec<_> = points.iter().map(sweep_point_json).collect();
                    emit(&out, &pretty(&json!(list)))
                }
                Format::Csv => {
                    let mut s =
                        String::from("r,b_max,mode,q0_S,q1_S,q2_S,q0_Sp,q1_Sp,q2_Sp\n");
                    for pt in &points {
                        let a = pt.argmax_s.slots().map_err(domain_err)?;
                        let b = pt.argmax_sprime.slots().map_err(domain_err)?;
                        s.push_str(&format!(
                            "{},{},{},{},{},{},{},{},{}\n",
                            pt.r, pt.b_max, pt.mode, a[0], a[1], a[2], b[0], b[1], b[2]
                        ));
                    }
                    emit(&out, &s)
                }
            }
        }

        Command::SolveSlot { free, slot, r } => {
            let free = [free[0], free[1]];
            let roots = solve_constrained_q(free, slot, r).map_err(domain_err)?;
            let list: Vec<_> = roots
                .iter()
                .map(|root| json!({ "slots": root.slots, "nonneg": root.nonneg }))
                .collect();
            emit(&None, &pretty(&json!({ "r": r, "roots": list })))
        }

        Command::ValidateJoint { input, r, tol, max_systems } => {
            let joint = read_json::<JointFile>(&input)?.into_joint(max_systems)?;
            let report = joint.validate_pure(r, tol).map_err(domain_err)?;
            let violations: Vec<String> =
                report.violations.iter().map(|v| v.to_string()).collect();
            emit(
                &None,
                &pretty(&json!({
                    "p": joint.prime().get(),
                    "n": joint.n(),
                    "r": r,
                    "valid": report.valid,
                    "violations": violations,
                })),
            )
        }

        Command::Render { input } => {
            let state = load_state(&input)?;
            emit(&None, &render::render_dist(&state.to_dist()))
        }
    }
}

fn sweep_point_json(pt: &SweepPoint) -> serde_json::Value {
    let state = |q: &epitoy_core::FiducialSet, d: &epitoy_core::EpistemicDist| {
        json!({
            "Q": q.rows(),
            "P": d.weights(),
            "mode": d.mode().to_string(),
        })
    };
    json!({
        "r": pt.r,
        "mode": pt.mode.to_string(),
        "b_max": pt.b_max,
        "argmax_s": state(&pt.argmax_s, &pt.argmax_s_dist),
        "argmax_sprime": state(&pt.argmax_sprime, &pt.argmax_sprime_dist),
    })
}

// Re-exported for integration tests that assemble expectations directly.
pub use epitoy_core as core;
