use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;

use tvr::certfile;
use tvr::decide::{self, BoundedOpts, ReachOpts};
use tvr::gen::{random_instance, GenParams};
use tvr::lps;
use tvr::modelfile;
use tvr::woca::tvass_to_woca;
use tvr::{Configuration, Tvass};

const EXIT_OK: u8 = 0;
const EXIT_UNKNOWN: u8 = 10;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "tvr", version, about = "Reachability, boundedness and termination for two-counter machines with a testable first counter", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the target configuration is reachable.
    Reach {
        model: PathBuf,
        #[arg(long, value_name = "\"STATE N1 N2\"")]
        from: String,
        #[arg(long, value_name = "\"STATE N1 N2\"")]
        to: String,
        #[arg(long, default_value_t = 512)]
        cap_norm: u32,
        #[arg(long, default_value_t = 500_000)]
        cap_steps: u64,
        /// Constant for the short-path bound; omit to skip the
        /// bound-guided phase.
        #[arg(long)]
        const_c: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether the reachable set is finite.
    Bounded {
        model: PathBuf,
        #[arg(long, value_name = "\"STATE N1 N2\"")]
        from: String,
        #[arg(long, default_value_t = 400_000)]
        cap_steps: u64,
        #[arg(long)]
        const_c: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether every run from the configuration is finite.
    Terminates {
        model: PathBuf,
        #[arg(long, value_name = "\"STATE N1 N2\"")]
        from: String,
        #[arg(long, default_value_t = 400_000)]
        cap_steps: u64,
        #[arg(long)]
        const_c: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Replay a certificate file against a reachability query.
    Check {
        model: PathBuf,
        #[arg(long, value_name = "\"STATE N1 N2\"")]
        from: String,
        #[arg(long, value_name = "\"STATE N1 N2\"")]
        to: String,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Dump the inequality system of a scheme certificate between two
    /// configurations.
    System {
        model: PathBuf,
        #[arg(long, value_name = "\"STATE N1 N2\"")]
        from: String,
        #[arg(long, value_name = "\"STATE N1 N2\"")]
        to: String,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Dump the weighted one-counter image of a two-counter model.
    Woca {
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Generate a random model, deterministic per seed.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        max_norm: i64,
        #[arg(long, default_value_t = 0.25)]
        test_density: f64,
        #[arg(long, default_value_t = 0.6)]
        edge_prob: f64,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn load_model(path: &PathBuf) -> Result<Tvass, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    modelfile::parse_model(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_config(model: &Tvass, text: &str) -> Result<Configuration, String> {
    let mut tokens = text.split_whitespace();
    let state = tokens.next().ok_or("empty configuration")?.to_string();
    let counters = tokens
        .map(|t| BigInt::from_str(t).map_err(|e| format!("bad counter `{t}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = Configuration::new(state, counters);
    model.validate_config(&cfg).map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn load_certificate(model: &Tvass, path: &PathBuf) -> Result<decide::Certificate, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    certfile::parse_certificate(model, &value).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Reach { model, from, to, cap_norm, cap_steps, const_c, json } => {
            let m = load_model(&model)?;
            let from = parse_config(&m, &from)?;
            let to = parse_config(&m, &to)?;
            let opts = ReachOpts {
                cap_norm,
                cap_steps,
                bound_const: const_c.or(Some(1)),
                ..ReachOpts::default()
            };
            let verdict = decide::reach(&m, &from, &to, &opts).map_err(|e| e.to_string())?;
            let label = match &verdict.outcome {
                decide::ReachOutcome::Reachable(_) => "REACHABLE",
                decide::ReachOutcome::Unreachable => "UNREACHABLE",
                decide::ReachOutcome::Unknown(_) => "UNKNOWN",
            };
            println!("{label}");
            if json {
                println!("{}", certfile::reach_verdict_json(&verdict));
            }
            Ok(exit_for(label))
        }
        Command::Bounded { model, from, cap_steps, const_c, json } => {
            let m = load_model(&model)?;
            let from = parse_config(&m, &from)?;
            let opts = BoundedOpts {
                closure_budget: cap_steps,
                bound_const: const_c.or(Some(1)),
                ..BoundedOpts::default()
            };
            let verdict = decide::bounded(&m, &from, &opts).map_err(|e| e.to_string())?;
            let label = match &verdict.outcome {
                decide::BoundedOutcome::Bounded { .. } => "BOUNDED",
                decide::BoundedOutcome::Unbounded(_) => "UNBOUNDED",
                decide::BoundedOutcome::Unknown(_) => "UNKNOWN",
            };
            println!("{label}");
            if json {
                println!("{}", certfile::bounded_verdict_json(&verdict));
            }
            Ok(exit_for(label))
        }
        Command::Terminates { model, from, cap_steps, const_c, json } => {
            let m = load_model(&model)?;
            let from = parse_config(&m, &from)?;
            let opts = BoundedOpts {
                closure_budget: cap_steps,
                bound_const: const_c.or(Some(1)),
                ..BoundedOpts::default()
            };
            let verdict = decide::terminates(&m, &from, &opts).map_err(|e| e.to_string())?;
            let label = match &verdict.outcome {
                decide::TermOutcome::Terminating { .. } => "TERMINATING",
                decide::TermOutcome::Nonterminating(_) => "NONTERMINATING",
                decide::TermOutcome::Unknown(_) => "UNKNOWN",
            };
            println!("{label}");
            if json {
                println!("{}", certfile::term_verdict_json(&verdict));
            }
            Ok(exit_for(label))
        }
        Command::Check { model, from, to, cert, json } => {
            let m = load_model(&model)?;
            let from = parse_config(&m, &from)?;
            let to = parse_config(&m, &to)?;
            let cert = load_certificate(&m, &cert)?;
            let valid =
                decide::check_certificate(&m, &from, &to, &cert).map_err(|e| e.to_string())?;
            println!("{}", if valid { "VALID" } else { "INVALID" });
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "schema": certfile::SCHEMA,
                        "query": "check",
                        "outcome": if valid { "VALID" } else { "INVALID" },
                    })
                );
            }
            Ok(ExitCode::from(EXIT_OK))
        }
        Command::System { model, from, to, cert, json } => {
            let m = load_model(&model)?;
            let from = parse_config(&m, &from)?;
            let to = parse_config(&m, &to)?;
            let cert = load_certificate(&m, &cert)?;
            let scheme = match cert {
                decide::Certificate::Lps(counted) => counted.scheme,
                decide::Certificate::Trace(_) => {
                    return Err("`system` needs a scheme certificate, not a trace".into())
                }
            };
            let system = lps::build_system(&m, &scheme, &from.counters, &to.counters)
                .map_err(|e| e.to_string())?;
            if json {
                let rows: Vec<serde_json::Value> = system
                    .rows
                    .iter()
                    .map(|r| {
                        serde_json::json!({
                            "coeffs": r.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                            "rhs": r.rhs.to_string(),
                            "tag": r.tag.to_string(),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::json!({
                        "schema": certfile::SCHEMA,
                        "query": "system",
                        "vars": system.num_vars,
                        "rows": rows,
                    })
                );
            } else {
                println!("vars: {}", system.num_vars);
                for row in &system.rows {
                    let terms: Vec<String> = row
                        .coeffs
                        .iter()
                        .enumerate()
                        .map(|(j, c)| format!("{c}*n{}", j + 1))
                        .collect();
                    let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                    println!("{lhs} >= {}   ; {}", row.rhs, row.tag);
                }
            }
            Ok(ExitCode::from(EXIT_OK))
        }
        Command::Woca { model, json } => {
            let m = load_model(&model)?;
            let (w, _) = tvass_to_woca(&m).map_err(|e| e.to_string())?;
            if json {
                let trans: Vec<serde_json::Value> = w
                    .base()
                    .transitions()
                    .iter()
                    .map(|t| {
                        let action = match &t.action {
                            tvr::model::Action::Tst => "tst".to_string(),
                            tvr::model::Action::Add(a) => a[0].to_string(),
                        };
                        serde_json::json!({
                            "id": t.id,
                            "source": t.source,
                            "action": action,
                            "target": t.target,
                            "weight": w.weight_of(&t.id).expect("own transition"),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::json!({
                        "schema": certfile::SCHEMA,
                        "query": "woca",
                        "states": w.base().states(),
                        "transitions": trans,
                    })
                );
            } else {
                println!("states {}", w.base().states().join(" "));
                for t in w.base().transitions() {
                    let action = match &t.action {
                        tvr::model::Action::Tst => "tst".to_string(),
                        tvr::model::Action::Add(a) => format!("add {}", a[0]),
                    };
                    println!(
                        "wtrans {} {} {} {} weight {}",
                        t.id,
                        t.source,
                        action,
                        t.target,
                        w.weight_of(&t.id).expect("own transition")
                    );
                }
            }
            Ok(ExitCode::from(EXIT_OK))
        }
        Command::Gen { seed, states, max_norm, test_density, edge_prob, out } => {
            if states == 0 {
                return Err("need at least one state".into());
            }
            let params = GenParams { seed, states, max_norm, test_density, edge_prob };
            let model: Tvass = random_instance(&params);
            let text = modelfile::print_model(&model);
            match out {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?
                }
                None => print!("{text}"),
            }
            Ok(ExitCode::from(EXIT_OK))
        }
    }
}

fn exit_for(label: &str) -> ExitCode {
    if label == "UNKNOWN" {
        ExitCode::from(EXIT_UNKNOWN)
    } else {
        ExitCode::from(EXIT_OK)
    }
}
