//! Command-line front end. Parses flags (precedence: flags > `CANTORPROD_*`
//! environment variables > defaults), dispatches into the computation
//! crate, and serializes results. Standard output carries exactly one
//! machine-readable document per run; progress and errors go to standard
//! error. Identical configuration produces byte-identical output.

pub mod records;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cantorprod_core::{
    curve, default_grid_m2, format_rat, grid_linspace, measure_enclosure, parse_rat,
    rank_truncated_core, near_half_coverage_check, resolve_truncation, rq, sandwich_check,
    verify_chain_conditions, Budget, Error, Mode, Params, Rat,
};

use records::{
    curve_csv, curve_plot, curve_point_record, measure_record, near_half_record, oracle_record,
    structure_record, verify_record, ErrorRecord,
};

fn rat_value(s: &str) -> Result<Rat, String> {
    parse_rat(s).map_err(|e| e.to_string())
}

#[derive(Parser)]
#[command(
    name = "cantorprod",
    version,
    about = "Certified interval structure and measure enclosures for products of uniform Cantor sets",
    after_help = "Exact rationals are written p/q; decimal flag values parse exactly (0.45 = 45/100)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    /// Worker threads for multi-point evaluation
    #[arg(long, global = true, env = "CANTORPROD_JOBS")]
    pub jobs: Option<usize>,
    /// Cap on enumerated pair-product intervals and on oracle point pairs
    #[arg(long, global = true, env = "CANTORPROD_BUDGET")]
    pub budget: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Parameters restricted to the range where the enclosure is proven
    Certified,
    /// Any ratio in (0, 1/m); upper bounds become vacuous
    Exploratory,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Certified => Mode::Certified,
            ModeArg::Exploratory => Mode::Exploratory,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutArg {
    Json,
    Csv,
    Plot,
}

#[derive(Args)]
pub struct SystemArgs {
    /// Number of contractions
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Contraction ratio, as p/q or an exact decimal
    #[arg(long, value_parser = rat_value)]
    pub lambda: Rat,
    #[arg(long, value_enum, default_value_t = ModeArg::Certified)]
    pub mode: ModeArg,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Two-sided enclosure of the product-set measure
    Measure {
        #[command(flatten)]
        sys: SystemArgs,
        /// Structure rank truncation (auto-selected from --target-err when omitted)
        #[arg(long)]
        rank: Option<u32>,
        /// Rescaling depth (auto-selected from --target-err when omitted)
        #[arg(long)]
        depth: Option<u32>,
        /// Requested enclosure width for auto-selection
        #[arg(long, default_value = "1/1000", value_parser = rat_value)]
        target_err: Rat,
        /// Output format (json only)
        #[arg(long, value_enum, default_value_t = OutArg::Json)]
        out: OutArg,
    },
    /// Materialize the rank-truncated interval structure
    Structure {
        #[command(flatten)]
        sys: SystemArgs,
        /// Structure rank truncation
        #[arg(long, default_value_t = 8)]
        rank: u32,
        /// json: component report; csv: every component, one row each
        #[arg(long, value_enum, default_value_t = OutArg::Json)]
        out: OutArg,
    },
    /// Measure enclosures over a grid of ratios
    Curve {
        /// Number of contractions
        #[arg(long, default_value_t = 2)]
        m: u32,
        /// Grid as start:end:steps over exact rationals
        /// (defaults to the standard 64-point grid when m = 2)
        #[arg(long)]
        grid: Option<String>,
        /// Requested per-point enclosure width (best-effort under --budget)
        #[arg(long, default_value = "1/100", value_parser = rat_value)]
        target_err: Rat,
        /// csv: one row per point; plot: gnuplot-ready columns; json: full records
        #[arg(long, value_enum, default_value_t = OutArg::Csv)]
        out: OutArg,
    },
    /// Exact hypothesis-chain quantities, plus the near-1/2 coverage check
    /// where its closed-form target applies
    Verify {
        #[command(flatten)]
        sys: SystemArgs,
        /// Core rank for the coverage check
        #[arg(long, default_value_t = 12)]
        rank: u32,
        /// Output format (json only)
        #[arg(long, value_enum, default_value_t = OutArg::Json)]
        out: OutArg,
    },
    /// Brute-force sandwich cross-check: structural lower bound vs. an
    /// independently computed outer cover
    Oracle {
        #[command(flatten)]
        sys: SystemArgs,
        /// Refinement depth of the brute-force cover
        #[arg(long, default_value_t = 4)]
        level: u32,
        /// Structure rank for the lower bound (defaults to 2×level)
        #[arg(long)]
        rank: Option<u32>,
        /// Rescaling depth for the lower bound (defaults to 2×level)
        #[arg(long)]
        depth: Option<u32>,
        /// Output format (json only)
        #[arg(long, value_enum, default_value_t = OutArg::Json)]
        out: OutArg,
    },
}

pub enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Compute(e)
    }
}

fn json_only(out: OutArg) -> Result<(), Failure> {
    if out == OutArg::Json {
        Ok(())
    } else {
        Err(Failure::Usage(
            "this command only supports --out json".into(),
        ))
    }
}

fn to_json<T: serde::Serialize>(record: &T) -> String {
    let mut s = serde_json::to_string_pretty(record).expect("records always serialize");
    s.push('\n');
    s
}

fn parse_grid(spec: &str) -> Result<Vec<Rat>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let usage = |what: &str| {
        Failure::Usage(format!(
            "--grid expects start:end:steps (got {spec:?}): {what}"
        ))
    };
    if parts.len() != 3 {
        return Err(usage("need exactly three fields"));
    }
    let start = parse_rat(parts[0]).map_err(|e| usage(&e.to_string()))?;
    let end = parse_rat(parts[1]).map_err(|e| usage(&e.to_string()))?;
    let steps: u32 = parts[2].parse().map_err(|_| usage("steps must be an integer"))?;
    Ok(grid_linspace(&start, &end, steps)?)
}

fn dispatch(cmd: Cmd, budget: &Budget) -> Result<String, Failure> {
    match cmd {
        Cmd::Measure {
            sys,
            rank,
            depth,
            target_err,
            out,
        } => {
            json_only(out)?;
            let p = Params::new(sys.m, sys.lambda, sys.mode.into())?;
            let (k, n) = match (rank, depth) {
                (Some(k), Some(n)) => (k, n),
                _ => {
                    let (ak, an) = resolve_truncation(&p, &target_err, budget)?;
                    (rank.unwrap_or(ak), depth.unwrap_or(an))
                }
            };
            eprintln!(
                "measure: m={} lambda={} rank_k={k} depth_N={n}",
                p.m(),
                format_rat(p.lambda())
            );
            let enc = measure_enclosure(&p, k, n, budget)?;
            Ok(to_json(&measure_record(&p, &enc)))
        }
        Cmd::Structure { sys, rank, out } => {
            if out == OutArg::Plot {
                return Err(Failure::Usage(
                    "structure supports --out json or --out csv".into(),
                ));
            }
            let p = Params::new(sys.m, sys.lambda, sys.mode.into())?;
            eprintln!(
                "structure: m={} lambda={} rank_k={rank}",
                p.m(),
                format_rat(p.lambda())
            );
            let set = rank_truncated_core(&p, rank, budget)?;
            match out {
                OutArg::Json => {
                    let report = set.components_report(8);
                    Ok(to_json(&structure_record(
                        &p,
                        rank,
                        &report,
                        set.min(),
                        set.max(),
                    )))
                }
                _ => {
                    let mut buf = Vec::new();
                    set.write_csv(&mut buf).expect("writes to memory succeed");
                    Ok(String::from_utf8(buf).expect("decimal output is ASCII"))
                }
            }
        }
        Cmd::Curve {
            m,
            grid,
            target_err,
            out,
        } => {
            let grid = match grid {
                Some(spec) => parse_grid(&spec)?,
                None if m == 2 => default_grid_m2(),
                None => {
                    return Err(Failure::Usage(
                        "--grid start:end:steps is required when m is not 2".into(),
                    ))
                }
            };
            eprintln!(
                "curve: m={m} points={} target_err={}",
                grid.len(),
                format_rat(&target_err)
            );
            let points = curve(m, &grid, &target_err, budget)?;
            Ok(match out {
                OutArg::Csv => curve_csv(&points),
                OutArg::Plot => curve_plot(m, &points),
                OutArg::Json => {
                    let recs: Vec<_> = points.iter().map(curve_point_record).collect();
                    to_json(&recs)
                }
            })
        }
        Cmd::Verify { sys, rank, out } => {
            json_only(out)?;
            let p = Params::new(sys.m, sys.lambda, sys.mode.into())?;
            let chain = verify_chain_conditions(&p);
            let near_half = if p.m() == 2 && p.lambda() > &rq(11, 25) && p.lambda() < &rq(1, 2) {
                eprintln!("verify: coverage check at rank_k={rank}");
                Some(near_half_record(rank, &near_half_coverage_check(&p, rank, budget)?))
            } else {
                None
            };
            Ok(to_json(&verify_record(&p, &chain, near_half)))
        }
        Cmd::Oracle {
            sys,
            level,
            rank,
            depth,
            out,
        } => {
            json_only(out)?;
            let p = Params::new(sys.m, sys.lambda, sys.mode.into())?;
            let k = rank.unwrap_or(2 * level);
            let n = depth.unwrap_or(2 * level);
            eprintln!(
                "oracle: m={} lambda={} level={level} rank_k={k} depth_N={n}",
                p.m(),
                format_rat(p.lambda())
            );
            let rep = sandwich_check(&p, level, k, n, budget)?;
            Ok(to_json(&oracle_record(&p, level, k, n, &rep)))
        }
    }
}

/// Runs a parsed invocation. Exit status 0 on success, 1 on a computation
/// error (reported as JSON on standard error), 2 on a usage error.
pub fn run(cli: Cli) -> i32 {
    if let Some(jobs) = cli.jobs {
        // Ignore failure: the global pool may already exist in-process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let budget = match cli.budget {
        Some(v) => Budget {
            max_product_intervals: v,
            max_oracle_pairs: v,
        },
        None => Budget::default(),
    };
    match dispatch(cli.command, &budget) {
        Ok(output) => {
            print!("{output}");
            0
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            let rec = ErrorRecord {
                code: e.code(),
                message: e.to_string(),
            };
            eprintln!(
                "{}",
                serde_json::to_string(&rec).expect("error records always serialize")
            );
            1
        }
    }
}
