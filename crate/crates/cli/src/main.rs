use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use num_rational::Ratio;
use num_traits::ToPrimitive;

use doall_cli::format::{self, parse_ratio, PatternFile, TasksFile};
use doall_cli::{parse_policy, policy_name};
use doall_core::{adversary_patterns, analysis, rng, simulator};
use doall_core::adversary_patterns::RandomSpec;

/// Simulates cooperative do-all task execution on a partitionable network
/// and checks competitive-ratio bounds.
#[derive(Parser)]
#[command(name = "doall", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a computation pattern file.
    Gen {
        /// two-level, k-level, single-group, isolated, random, or example15
        #[arg(long)]
        kind: String,
        /// Branch count for the lower-bound patterns.
        #[arg(long)]
        w: Option<usize>,
        /// Task count.
        #[arg(long)]
        t: Option<usize>,
        /// First-level task fraction, e.g. 0.5 or 1/2.
        #[arg(long)]
        alpha: Option<String>,
        /// Comma-separated level fractions summing to 1, e.g. 0.5,0.3,0.2.
        #[arg(long)]
        fractions: Option<String>,
        /// Processor count (single-group, isolated, random).
        #[arg(long)]
        p: Option<usize>,
        /// Reconfiguration rounds for random patterns.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Split probability knob for random patterns.
        #[arg(long, default_value_t = 0.5)]
        split_prob: f64,
        /// Quota cap for non-final layers of random patterns.
        #[arg(long, default_value_t = 8)]
        max_quota: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the matching leveled task file here.
        #[arg(long)]
        tasks_out: Option<PathBuf>,
    },
    /// Run Monte Carlo trials and emit per-trial CSV.
    Simulate {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        tasks: PathBuf,
        /// mrs, rs, or det.
        #[arg(long, default_value = "mrs")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the closed-form competitive-ratio bounds.
    Bounds {
        /// two-level or k-level
        #[arg(long)]
        kind: String,
        #[arg(long)]
        cw: u32,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        fractions: Option<String>,
        /// Finite-scale constant; defaults to e. The strict reading
        /// 1/(1/e + 1) is reported alongside either way.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Empirical competitive ratio of a policy on a pattern.
    Ratio {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long, default_value = "mrs")]
        policy: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a pattern file against the well-formedness clauses.
    Validate {
        #[arg(long)]
        pattern: PathBuf,
    },
    /// Distribution of tasks left at the first merge of the two-round
    /// lower-bound pattern; reports the plug-in constant c-hat.
    Concentration {
        #[arg(long)]
        w: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Gen {
            kind,
            w,
            t,
            alpha,
            fractions,
            p,
            depth,
            split_prob,
            max_quota,
            seed,
            out,
            tasks_out,
        } => {
            let need = |opt: Option<usize>, name: &str| {
                opt.with_context(|| format!("--{name} is required for this kind"))
            };
            let (dag, levels) = match kind.as_str() {
                "two-level" => {
                    let w = need(w, "w")?;
                    let t = need(t, "t")?;
                    let alpha = parse_ratio(alpha.as_deref().unwrap_or("1"))?;
                    let dag = adversary_patterns::gen_two_level_lb(w, t, alpha)?;
                    (dag, alpha_levels(t, alpha)?)
                }
                "k-level" => {
                    let w = need(w, "w")?;
                    let t = need(t, "t")?;
                    let fracs = parse_fraction_list(
                        fractions.as_deref().context("--fractions required")?,
                    )?;
                    let dag = adversary_patterns::gen_k_level_lb(w, t, &fracs)?;
                    let levels = fracs
                        .iter()
                        .map(|&f| {
                            let n = f * Ratio::from_integer(t as u64);
                            Ok(*n.numer() as usize)
                        })
                        .collect::<anyhow::Result<Vec<_>>>()?;
                    (dag, levels)
                }
                "single-group" => {
                    let p = need(p, "p")?;
                    let t = need(t, "t")?;
                    (adversary_patterns::gen_single_group(p, t)?, vec![t])
                }
                "isolated" => {
                    let p = need(p, "p")?;
                    let t = need(t, "t")?;
                    (adversary_patterns::gen_isolated(p, t)?, vec![t])
                }
                "random" => {
                    let p = need(p, "p")?;
                    let t = need(t, "t")?;
                    let spec = RandomSpec { p, t, depth, split_prob, max_quota };
                    (adversary_patterns::gen_random(&spec, seed)?, vec![t])
                }
                "example15" => {
                    let t = need(t, "t")?;
                    (adversary_patterns::fifteen_processor_example(t as u32), vec![t])
                }
                other => bail!("unknown pattern kind {other:?}"),
            };
            format::write_json(&out, &PatternFile::from_dag(&dag))?;
            if let Some(path) = tasks_out {
                format::write_json(&path, &TasksFile::from_levels(&levels))?;
            }
            Ok(())
        }
        Command::Simulate { pattern, tasks, policy, seed, trials, out } => {
            let dag = format::read_pattern(&pattern)?;
            let graph = format::read_tasks(&tasks)?;
            let policy = parse_policy(&policy)?;
            let mut csv = String::from("trial,seed,total_work,terminal_complete\n");
            for i in 0..trials {
                let trial_seed = rng::trial_seed(seed, i);
                let report = simulator::run(&dag, &graph, &policy, trial_seed)?;
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    i, trial_seed, report.total_work, report.terminal_complete
                ));
            }
            match out {
                Some(path) => std::fs::write(&path, csv)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => std::io::stdout().write_all(csv.as_bytes())?,
            }
            Ok(())
        }
        Command::Bounds { kind, cw, alpha, fractions, c } => {
            let c_val = c.unwrap_or(analysis::C_LIMIT);
            let record = match kind.as_str() {
                "two-level" => {
                    let alpha = alpha.context("--alpha required for two-level")?;
                    serde_json::json!({
                        "kind": "two-level",
                        "cw": cw,
                        "alpha": alpha,
                        "c": c_val,
                        "upper_bound": analysis::bound_two_level(cw, alpha, c_val)?,
                        "upper_bound_c_strict":
                            analysis::bound_two_level(cw, alpha, analysis::c_strict())?,
                        "lower_bound": analysis::lower_bound_two_level(cw, alpha)?,
                    })
                }
                "k-level" => {
                    let fracs: Vec<f64> = parse_fraction_list(
                        fractions.as_deref().context("--fractions required")?,
                    )?
                    .iter()
                    .map(|f| f.to_f64().unwrap())
                    .collect();
                    serde_json::json!({
                        "kind": "k-level",
                        "cw": cw,
                        "fractions": fracs,
                        "c": c_val,
                        "upper_bound": analysis::bound_k_level(cw, &fracs, c_val)?,
                        "upper_bound_c_strict":
                            analysis::bound_k_level(cw, &fracs, analysis::c_strict())?,
                        "lower_bound": analysis::lower_bound_k_level(cw, &fracs)?,
                    })
                }
                other => bail!("unknown bound kind {other:?}"),
            };
            println!("{}", serde_json::to_string_pretty(&record)?);
            Ok(())
        }
        Command::Ratio { pattern, tasks, policy, trials, seed } => {
            let dag = format::read_pattern(&pattern)?;
            let graph = format::read_tasks(&tasks)?;
            let policy = parse_policy(&policy)?;
            let label = pattern.display().to_string();
            let record =
                analysis::empirical_ratio(&dag, &graph, &policy, trials, seed, &label, None)?;
            let json = serde_json::json!({
                "pattern": record.pattern,
                "policy": policy_name(record.policy),
                "trials": record.trials,
                "seed": record.seed,
                "mean_work": record.mean_work,
                "std_error": record.std_error,
                "denominator": match record.denominator {
                    analysis::DenominatorKind::ExactOpt => "exact_opt",
                    analysis::DenominatorKind::LowerBound => "lower_bound",
                },
                "denominator_value": record.denominator_value,
                "empirical_ratio": record.empirical_ratio,
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(())
        }
        Command::Validate { pattern } => {
            let dag = format::read_pattern(&pattern)?;
            let violations = dag.validate();
            if violations.is_empty() {
                println!("ok");
                Ok(())
            } else {
                for v in &violations {
                    println!("violation: {v}");
                }
                bail!("{} violation(s)", violations.len());
            }
        }
        Command::Concentration { w, t, alpha, trials, seed } => {
            let alpha = parse_ratio(&alpha)?;
            let report = analysis::concentration_check(w, t, alpha, trials, seed)?;
            let json = serde_json::json!({
                "w": report.w,
                "t": report.t,
                "alpha": report.alpha,
                "trials": report.trials,
                "seed": report.seed,
                "mean_left": report.mean_left,
                "expected_left_floor": report.expected_left,
                "mean_fraction": report.mean_fraction,
                "expected_fraction": report.expected_fraction,
                "band": report.band,
                "outside_band_fraction": report.outside_band_fraction,
                "min_left": report.min_left,
                "max_left": report.max_left,
                "c_hat": 1.0 / report.mean_fraction,
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
            Ok(())
        }
    }
}

fn parse_fraction_list(s: &str) -> anyhow::Result<Vec<Ratio<u64>>> {
    s.split(',').map(parse_ratio).collect()
}

fn alpha_levels(t: usize, alpha: Ratio<u64>) -> anyhow::Result<Vec<usize>> {
    let first = alpha * Ratio::from_integer(t as u64);
    if !first.is_integer() {
        bail!("alpha * t must be an integer");
    }
    let first = *first.numer() as usize;
    Ok(if first == t { vec![t] } else { vec![first, t - first] })
}
