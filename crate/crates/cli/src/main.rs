// Copyright 2026 The seqfair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `seqfair` command-line driver.

use clap::{Args, Parser, Subcommand, ValueEnum};
use seqfair::adversaries::{demonstrate_violation, get_named_instance, Adversary, ADVERSARY_IDS, NAMED_IDS};
use seqfair::borda::random_borda_instance;
use seqfair::fairness::{best_prop_ratio, check_alpha_prop, max_possible_alpha, prop1_trace};
use seqfair::io::{instance_to_json, load_instance, parse_ratio, save_instance, CheckRecord, RunRecord};
use seqfair::mechanism::{evaluate, Check, CheckResult, Mechanism};
use seqfair::model::{prop_shares, rrs_shares, Instance, Outcome};
use seqfair::offline::{Normalization, Permutation};
use seqfair::repro::{run_repro, ReproTarget};
use seqfair::{Error, Ratio, Result, SearchConfig, DEFAULT_BUDGET};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "seqfair",
    version,
    about = "Fair sequential collective decisions: mechanisms, checkers and reproductions"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Maximum number of outcomes brute-force searches may enumerate.
    #[arg(long, global = true, env = "SEQFAIR_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads for enumeration (1 = sequential; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    JsonLines,
}

#[derive(Args)]
struct InstanceArg {
    /// Instance file (JSON) or named instance id, e.g. example-1 or mnw-gap(n=3,t=3).
    #[arg(long)]
    instance: String,
}

#[derive(Args)]
struct MechanismArgs {
    /// rr-off, mnw-off, lmin-off[:none|rrs|prop], rr-on, mnw-on, lmin-on or tracker-on.
    #[arg(long)]
    mechanism: String,
    /// Round-robin agent order, 1-based, e.g. 2,1,3.
    #[arg(long)]
    permutation: Option<Permutation>,
    /// Leximin normalization when the mechanism id carries none.
    #[arg(long)]
    normalization: Option<Normalization>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism and report its outcome, utilities and fairness checks.
    Run {
        #[command(flatten)]
        instance: InstanceArg,
        #[command(flatten)]
        mechanism: MechanismArgs,
        /// Properties to check (comma-separated); brute-force ones are skipped when over budget.
        #[arg(long, value_delimiter = ',', default_value = "po,prop,prop1,rrs,mpp,local-po")]
        checks: Vec<Check>,
    },
    /// Check one property of an outcome. Exit 0 if it holds, 1 if not, 2 on error.
    Check {
        #[command(flatten)]
        instance: InstanceArg,
        /// Comma-separated 1-based candidates, e.g. 3,1 or c3,c1.
        #[arg(long)]
        outcome: String,
        /// po, prop, prop1, rrs, additive, mpp or local-po.
        #[arg(long)]
        property: Check,
        #[arg(long, conflicts_with = "beta")]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
    },
    /// Largest alpha for which an alpha-Prop outcome exists, with shares per agent.
    Oracle {
        #[command(flatten)]
        instance: InstanceArg,
    },
    /// Drive an online mechanism against an adaptive adversary.
    Adversary {
        /// rrs, prop1 or mpp-online.
        id: String,
        /// rr-on, mnw-on, lmin-on or tracker-on.
        #[arg(long)]
        mechanism: String,
        #[arg(long)]
        permutation: Option<Permutation>,
        /// alpha for the rrs adversary.
        #[arg(long)]
        alpha: Option<String>,
        /// k for the prop1 adversary (2k + 3 rounds).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Recompute a reference table or claim and compare.
    Repro {
        /// examples, table1, table2, table3, implications, mnw-gap or lower-bounds.
        target: ReproTarget,
    },
    /// Write an instance in the JSON file format.
    Export {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// How often leximin is fully proportional on random Borda instances, per horizon.
    Experiment {
        #[arg(long, default_value_t = 3)]
        agents: usize,
        #[arg(long, default_value_t = 3)]
        candidates: usize,
        #[arg(long, default_value_t = 6)]
        max_rounds: usize,
        #[arg(long, default_value_t = 50)]
        samples: u64,
        #[arg(long, default_value = "lmin-off:prop")]
        mechanism: String,
    },
}

/// Exit status: 0 success or property holds, 1 property fails or mismatch, 2 error.
enum Status {
    Ok,
    Negative,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn config(g: &Global) -> SearchConfig {
    SearchConfig::with_budget(g.budget).parallel(g.threads != Some(1))
}

fn resolve_instance(spec: &str) -> Result<Instance<Ratio>> {
    let path = Path::new(spec);
    if path.is_file() {
        return load_instance(path);
    }
    match get_named_instance(spec) {
        Ok(named) => Ok(named.instance),
        Err(Error::UnknownId(_)) => {
            Err(Error::UnknownId(format!("{spec:?} is neither a file nor a named instance ({})", NAMED_IDS.join(", "))))
        }
        Err(e) => Err(e),
    }
}

fn ratio_arg(name: &str, value: &Option<String>) -> Result<Option<Ratio>> {
    value.as_deref().map(|v| parse_ratio(v).map_err(|e| Error::InvalidParameter(format!("--{name}: {e}")))).transpose()
}

fn dispatch(cli: &Cli) -> Result<Status> {
    let g = &cli.global;
    match &cli.command {
        Command::Run { instance, mechanism, checks } => cmd_run(g, instance, mechanism, checks),
        Command::Check { instance, outcome, property, alpha, beta } => {
            let param = match property {
                Check::Additive => ratio_arg("beta", beta)?,
                _ if beta.is_some() => return Err(Error::InvalidParameter("--beta applies to additive only".into())),
                _ => ratio_arg("alpha", alpha)?,
            };
            if *property == Check::Additive && alpha.is_some() {
                return Err(Error::InvalidParameter("additive takes --beta".into()));
            }
            cmd_check(g, instance, outcome, *property, param)
        }
        Command::Oracle { instance } => cmd_oracle(g, instance),
        Command::Adversary { id, mechanism, permutation, alpha, k } => {
            cmd_adversary(g, id, mechanism, permutation.clone(), ratio_arg("alpha", alpha)?, *k)
        }
        Command::Repro { target } => {
            let report = run_repro(*target, &config(g))?;
            match g.format {
                Format::Table => println!("{report}"),
                Format::JsonLines => {
                    for row in &report.rows {
                        println!(
                            "{}",
                            json!({"target": target.id(), "item": row.item, "expected": row.expected, "observed": row.observed, "ok": row.ok})
                        );
                    }
                }
            }
            Ok(if report.all_ok() { Status::Ok } else { Status::Negative })
        }
        Command::Export { instance, output } => {
            let inst = resolve_instance(&instance.instance)?;
            match output {
                Some(path) => save_instance(&inst, path)?,
                None => println!("{}", instance_to_json(&inst)),
            }
            Ok(Status::Ok)
        }
        Command::Experiment { agents, candidates, max_rounds, samples, mechanism } => {
            cmd_experiment(g, *agents, *candidates, *max_rounds, *samples, mechanism)
        }
    }
}

fn cmd_run(g: &Global, instance: &InstanceArg, args: &MechanismArgs, checks: &[Check]) -> Result<Status> {
    let inst = resolve_instance(&instance.instance)?;
    let cfg = config(g);
    let mech = Mechanism::parse(&args.mechanism, inst.n(), args.permutation.clone(), args.normalization)?;
    if let Some(pi) = mech.permutation() {
        pi.check_agents(inst.n())?;
    }
    let start = Instant::now();
    let out = mech.run(&inst, &cfg)?;
    let elapsed = start.elapsed();
    let mut results: Vec<CheckResult<Ratio>> = Vec::new();
    let mut skipped = Vec::new();
    for &check in checks {
        match evaluate(&inst, &out, check, None, &cfg) {
            Ok(r) => results.push(r),
            Err(Error::BudgetExceeded { required, .. }) => skipped.push(format!("{check} (m^T = {required})")),
            Err(e) => return Err(e),
        }
    }
    let record = RunRecord::new(&mech, &inst, &out, &results, elapsed)?;
    match g.format {
        Format::JsonLines => println!("{}", record.to_json()),
        Format::Table => {
            println!("instance:  {} (n={}, m={}, T={})", instance.instance, inst.n(), inst.m(), inst.horizon());
            println!("mechanism: {mech}");
            println!("outcome:   {out}");
            println!("time:      {} us", record.elapsed_micros);
            print_shares(&inst, Some(&record.utilities));
            for c in &record.checks {
                print_check(c);
            }
            for s in skipped {
                println!("{s}: skipped, over budget");
            }
        }
    }
    Ok(Status::Ok)
}

fn print_shares(inst: &Instance<Ratio>, utilities: Option<&[String]>) {
    let props = prop_shares(inst);
    let rrs = rrs_shares(inst);
    match utilities {
        Some(_) => println!("agent | utility | Prop | RRS"),
        None => println!("agent | Prop | RRS"),
    }
    for i in 0..inst.n() {
        match utilities {
            Some(u) => println!("{} | {} | {} | {}", i + 1, u[i], props[i], rrs[i]),
            None => println!("{} | {} | {}", i + 1, props[i], rrs[i]),
        }
    }
}

fn print_check(c: &CheckRecord) {
    let name = match &c.parameter {
        Some(p) => format!("{}({p})", c.property),
        None => c.property.clone(),
    };
    match &c.witness {
        Some(w) => println!("{name}: {} [{w}]", c.verdict),
        None => println!("{name}: {}", c.verdict),
    }
}

fn cmd_check(g: &Global, instance: &InstanceArg, outcome: &str, check: Check, param: Option<Ratio>) -> Result<Status> {
    let inst = resolve_instance(&instance.instance)?;
    let out = Outcome::parse_labels(outcome)?;
    inst.check_full_outcome(&out)?;
    let result = evaluate(&inst, &out, check, param.as_ref(), &config(g))?;
    let record = CheckRecord::from(&result);
    match g.format {
        Format::Table => print_check(&record),
        Format::JsonLines => println!("{}", serde_json::to_string(&record).expect("plain data serializes")),
    }
    Ok(if result.verdict { Status::Ok } else { Status::Negative })
}

fn cmd_oracle(g: &Global, instance: &InstanceArg) -> Result<Status> {
    let inst = resolve_instance(&instance.instance)?;
    let cfg = config(g);
    let alpha = max_possible_alpha(&inst, &cfg)?;
    let (best, raw) = best_prop_ratio(&inst, &cfg)?;
    match g.format {
        Format::Table => {
            println!("alpha*:  {alpha}");
            println!("outcome: {best} (min u_i/Prop_i = {raw})");
            print_shares(&inst, None);
        }
        Format::JsonLines => {
            let shares: Vec<String> = prop_shares(&inst).iter().map(|v| v.to_string()).collect();
            let rrs: Vec<String> = rrs_shares(&inst).iter().map(|v| v.to_string()).collect();
            println!(
                "{}",
                json!({"alpha": alpha.to_string(), "outcome": best.labels(), "best_ratio": raw.to_string(), "prop": shares, "rrs": rrs})
            );
        }
    }
    Ok(Status::Ok)
}

fn cmd_adversary(
    g: &Global,
    id: &str,
    mechanism: &str,
    permutation: Option<Permutation>,
    alpha: Option<Ratio>,
    k: Option<usize>,
) -> Result<Status> {
    if !ADVERSARY_IDS.contains(&id) {
        return Err(Error::UnknownId(format!("adversary {id:?}; expected one of {}", ADVERSARY_IDS.join(", "))));
    }
    if alpha.is_some() && id != "rrs" {
        return Err(Error::InvalidParameter("--alpha applies to the rrs adversary".into()));
    }
    if k.is_some() && id != "prop1" {
        return Err(Error::InvalidParameter("--k applies to the prop1 adversary".into()));
    }
    let adv = Adversary::parse(id, alpha, k)?;
    let kind = match Mechanism::parse(mechanism, adv.n(), permutation, None)? {
        Mechanism::Online(kind) => kind,
        other => return Err(Error::InvalidParameter(format!("{other} is not an online mechanism"))),
    };
    if let Some(pi) = Mechanism::Online(kind.clone()).permutation() {
        pi.check_agents(adv.n())?;
    }
    let Some(report) = demonstrate_violation(&adv, &kind)? else {
        match g.format {
            Format::Table => println!("{adv} vs {kind}: no violation found"),
            Format::JsonLines => {
                println!("{}", json!({"adversary": adv.to_string(), "mechanism": kind.to_string(), "violation": false}))
            }
        }
        return Ok(Status::Negative);
    };
    // for prop1 also show the slack after 2k rounds
    let final_slack = match adv {
        Adversary::Prop1(k) => {
            let trace = prop1_trace(&report.instance, &report.outcome)?;
            Some((2 * k, (0..2).map(|a| trace.slack(2 * k, a).to_string()).collect::<Vec<_>>()))
        }
        _ => None,
    };
    match g.format {
        Format::Table => {
            for line in report.transcript() {
                println!("{line}");
            }
            println!("{report}");
            if let Some((t, slack)) = final_slack {
                println!("Prop1 slack after {t} rounds: {}", slack.join(", "));
            }
        }
        Format::JsonLines => {
            let mut doc = json!({
                "adversary": adv.to_string(),
                "mechanism": kind.to_string(),
                "violation": true,
                "property": report.property.to_string(),
                "agent": report.agent + 1,
                "round": report.round,
                "branch": report.branch.map(|b| b.to_string()),
                "detail": report.detail,
                "outcome": report.outcome.labels(),
                "transcript": report.transcript(),
            });
            if let Some((t, slack)) = final_slack {
                doc["final_slack"] = json!({"round": t, "slack": slack});
            }
            println!("{doc}");
        }
    }
    Ok(Status::Ok)
}

fn cmd_experiment(g: &Global, n: usize, m: usize, max_rounds: usize, samples: u64, mechanism: &str) -> Result<Status> {
    if n == 0 || m < 2 || max_rounds == 0 || samples == 0 {
        return Err(Error::InvalidParameter("need agents >= 1, candidates >= 2, max-rounds >= 1, samples >= 1".into()));
    }
    let cfg = config(g);
    let mech = Mechanism::parse(mechanism, n, None, None)?;
    if g.format == Format::Table {
        println!("{mech} on random Borda instances, n={n}, m={m}, seed {}", g.seed);
        println!("T | proportional | samples");
    }
    for t in 1..=max_rounds {
        let mut proportional = 0;
        for s in 0..samples {
            let inst: Instance<Ratio> =
                random_borda_instance(n, m, t, g.seed.wrapping_mul(1_000_003).wrapping_add(s * 1000 + t as u64));
            let out = mech.run(&inst, &cfg)?;
            proportional += u64::from(check_alpha_prop(&inst, &out, &Ratio::from_integer(1.into()))?.verdict);
        }
        match g.format {
            Format::Table => println!("{t} | {proportional} | {samples}"),
            Format::JsonLines => println!("{}", json!({"T": t, "proportional": proportional, "samples": samples})),
        }
    }
    Ok(Status::Ok)
}
