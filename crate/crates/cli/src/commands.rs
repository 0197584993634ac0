use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use tct_core::bench::{run_bench, BenchConfig};
use tct_core::dvd::{
    dvd_to_tct, gen_path, gen_tournament, lift_solution, path_packing_certificate, tensor_index, tensor_with_tournament,
    verify_packing, DvdInstance,
};
use tct_core::exact::{enumerate_blocker_with, exact_dvd_opt_with, exact_lp_opt_with, exact_tct_opt_with, ExactLimits};
use tct_core::generators::{gen_gap_instance, gen_random_layered, RandomLayeredParams};
use tct_core::io::{
    cover_to_json, dvd_from_json, dvd_to_json, instance_from_json, instance_to_json, origin_to_json, read_json,
    solution_from_json, solution_to_json, write_json,
};
use tct_core::lp::{solve_lp, LpMode};
use tct_core::model::{check_feasible, layer, Feasibility, NormalizedInstance, TctInstance};
use tct_core::normalize::{choice_vector, denormalize_solution, normalize};
use tct_core::number::parse_rational;
use tct_core::solve::{solve, Algorithm, LpChoice, SolveOptions};
use tct_core::Error;

use crate::{AlgoArg, CertifyCommand, Cli, Command, ExactWhat, Format, GenCommand, ReduceCommand};

pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Infeasible(_)) | Some(Error::Internal(_)) => 1,
        Some(Error::CapExceeded(_)) | Some(Error::IterationCap { .. }) => 3,
        _ => 2,
    }
}

/// Result of a command: JSON payload, optional table rendering, exit code.
struct Output {
    json: Value,
    table: Option<String>,
    code: u8,
}

impl Output {
    fn ok(json: Value) -> Self {
        Output { json, table: None, code: 0 }
    }
}

fn emit(cli: &Cli, output: &Output) -> Result<()> {
    if let Some(path) = &cli.out {
        write_json(path, &output.json)?;
    }
    let table = || output.table.clone().unwrap_or_else(|| key_value_table(&output.json));
    match (cli.format, &cli.out) {
        (Format::Table, _) => print!("{}", table()),
        (Format::Json, None) => println!("{}", serde_json::to_string_pretty(&output.json)?),
        (Format::Json, Some(_)) => {}
    }
    Ok(())
}

fn key_value_table(value: &Value) -> String {
    let mut out = String::new();
    match value.as_object() {
        Some(map) => {
            for (k, v) in map {
                let shown = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let _ = writeln!(out, "{k:<16} {shown}");
            }
        }
        None => {
            let _ = writeln!(out, "{value}");
        }
    }
    out
}

/// The instance as given plus its normalized form.
fn load_instance(path: &Path) -> Result<(TctInstance, NormalizedInstance)> {
    let value = read_json(path)?;
    let instance = instance_from_json(&value)?;
    let norm = match NormalizedInstance::from_instance(instance.clone()) {
        Ok(norm) => norm,
        Err(Error::InvalidInstance(_)) => normalize(&instance)?,
        Err(e) => return Err(e.into()),
    };
    Ok((instance, norm))
}

fn load_dvd(path: &Path, k: Option<usize>) -> Result<DvdInstance> {
    Ok(dvd_from_json(&read_json(path)?, k)?)
}

fn limits(cap: usize) -> ExactLimits {
    ExactLimits { max_jobs: cap, ..ExactLimits::default() }
}

fn algorithm(a: AlgoArg) -> Algorithm {
    match a {
        AlgoArg::Det => Algorithm::Det,
        AlgoArg::Rand => Algorithm::Rand,
        AlgoArg::SlackDet => Algorithm::SlackDet,
        AlgoArg::SlackRand => Algorithm::SlackRand,
        AlgoArg::Naive => Algorithm::Naive,
        AlgoArg::Bye => Algorithm::Bye,
        AlgoArg::Exact => Algorithm::Exact,
    }
}

/// Choice of original alternatives, when the instance had to be normalized.
fn original_choice(instance: &TctInstance, norm: &NormalizedInstance, sol: &tct_core::AccelerationSet) -> Result<Option<Value>> {
    if norm.origin().is_none() {
        return Ok(None);
    }
    let choice = denormalize_solution(norm, sol)?;
    let (delay, cost) = instance.evaluate_choice(&choice_vector(instance, &choice)?)?;
    Ok(Some(json!({ "alternatives": choice, "cost": cost.to_json(), "makespan": delay.to_json() })))
}

pub fn run(cli: &Cli) -> Result<u8> {
    let output = match &cli.command {
        Command::Gen(gen) => cmd_gen(cli, gen)?,
        Command::Normalize { input, map } => {
            let instance = instance_from_json(&read_json(input)?)?;
            let norm = normalize(&instance)?;
            if let Some(map) = map {
                write_json(map, &origin_to_json(norm.origin().expect("normalize records origins")))?;
            }
            Output::ok(instance_to_json(norm.base()))
        }
        Command::Lp { input, exact, eps } => {
            let (_, norm) = load_instance(input)?;
            let mode = match (exact, eps) {
                (true, _) => LpMode::ExactSmallDepth,
                (false, Some(eps)) => LpMode::Approx(parse_rational(eps)?),
                (false, None) => LpMode::Approx(tct_core::solve::default_eps()),
            };
            let sol = solve_lp(&norm, &layer(norm.base()), &mode)?;
            Output::ok(cover_to_json(&norm, &sol.cover))
        }
        Command::Solve { input, algo, eps, trials } => {
            let (instance, norm) = load_instance(input)?;
            let mut options = SolveOptions::new(algorithm(*algo));
            options.seed = cli.seed;
            options.trials = *trials;
            if let Some(eps) = eps {
                options.lp = LpChoice::Approx(parse_rational(eps)?);
            }
            let report = solve(&norm, &options)?;
            let mut json = report.to_json(&norm);
            if let Some(choice) = original_choice(&instance, &norm, &report.solution)? {
                json["original"] = choice;
            }
            Output::ok(json)
        }
        Command::Exact { what, input, cap, k } => cmd_exact(*what, input, *cap, *k)?,
        Command::Verify { input, solution } => cmd_verify(input, solution)?,
        Command::Bench { config } => {
            let config = BenchConfig::from_json(&read_json(config)?)?;
            let report = run_bench(&config)?;
            Output {
                json: report.to_json(),
                table: Some(report.to_table()),
                code: if report.all_pass() { 0 } else { 1 },
            }
        }
        Command::Reduce(ReduceCommand::DvdToTct { input, k }) => {
            let dvd = load_dvd(input, *k)?;
            Output::ok(instance_to_json(dvd_to_tct(&dvd)?.base()))
        }
        Command::Tensor { input, d, k } => {
            let dvd = load_dvd(input, *k)?;
            let product = tensor_with_tournament(&dvd, *d)?;
            Output::ok(dvd_to_json(&product.graph, Some(product.k)))
        }
        Command::Certify(CertifyCommand::Packing { r, d, k }) => cmd_certify(*r, *d, *k)?,
    };
    emit(cli, &output)?;
    Ok(output.code)
}

fn cmd_gen(cli: &Cli, gen: &GenCommand) -> Result<Output> {
    Ok(match gen {
        GenCommand::Gap { d, k, cover } => {
            let (norm, x) = gen_gap_instance(*d, *k)?;
            if let Some(path) = cover {
                write_json(path, &cover_to_json(&norm, &x))?;
            }
            Output::ok(instance_to_json(norm.base()))
        }
        GenCommand::Random(args) => {
            let mut params = RandomLayeredParams::new(args.depth, args.jobs, cli.seed);
            if !(0.0..=1.0).contains(&args.edge_prob) {
                bail!(Error::InvalidParameter(format!("edge probability {} is outside [0, 1]", args.edge_prob)));
            }
            params.edge_probability = args.edge_prob;
            params.slack_factor = parse_rational(&args.slack)?;
            Output::ok(instance_to_json(gen_random_layered(&params)?.base()))
        }
        GenCommand::DvdPath { n, k } => Output::ok(dvd_to_json(&gen_path(*n)?, Some(*k))),
        GenCommand::DvdTournament { n, k } => Output::ok(dvd_to_json(&gen_tournament(*n)?, Some(*k))),
    })
}

fn cmd_exact(what: ExactWhat, input: &Path, cap: usize, k: Option<usize>) -> Result<Output> {
    let limits = limits(cap);
    if what == ExactWhat::Dvd {
        let dvd = load_dvd(input, k)?;
        let opt = exact_dvd_opt_with(&dvd, &limits)?;
        let labels: Vec<&str> = opt.iter().map(|&v| dvd.graph.label(v)).collect();
        return Ok(Output::ok(json!({ "k": dvd.k, "opt": opt.len(), "vertices": labels })));
    }
    let (instance, norm) = load_instance(input)?;
    Ok(Output::ok(match what {
        ExactWhat::Tct => {
            let sol = exact_tct_opt_with(&norm, &limits)?;
            let mut json = solution_to_json(&norm, &sol);
            if let Some(choice) = original_choice(&instance, &norm, &sol)? {
                json["original"] = choice;
            }
            json
        }
        ExactWhat::Lp => cover_to_json(&norm, &exact_lp_opt_with(&norm, &limits)?),
        ExactWhat::Blocker => {
            let chains = enumerate_blocker_with(&norm, &limits)?;
            let ids: Vec<Vec<&str>> = chains.iter().map(|c| c.iter().map(|&v| norm.id(v)).collect()).collect();
            json!({ "count": ids.len(), "chains": ids })
        }
        ExactWhat::Dvd => unreachable!(),
    }))
}

fn cmd_verify(input: &Path, solution: &Path) -> Result<Output> {
    let (_, norm) = load_instance(input)?;
    let (sol, declared) = solution_from_json(&norm, &read_json(solution)?)
        .with_context(|| format!("reading {}", solution.display()))?;
    let mut json = json!({ "cost": sol.cost.to_json() });
    if let Some(declared) = declared.filter(|d| *d != sol.cost) {
        eprintln!("warning: declared cost {declared} differs from the recomputed cost {}", sol.cost);
        json["declared_cost"] = declared.to_json();
    }
    let code = match check_feasible(&norm, &sol) {
        Feasibility::Feasible { max_delay } => {
            json["feasible"] = json!(true);
            json["max_delay"] = max_delay.to_json();
            0
        }
        Feasibility::Violated { chain, delay } => {
            let ids: Vec<&str> = chain.iter().map(|&v| norm.id(v)).collect();
            eprintln!("infeasible: chain {} has delay {delay} > {}", ids.join(" -> "), norm.deadline());
            json["feasible"] = json!(false);
            json["witness"] = json!({ "chain": ids, "delay": delay.to_json() });
            1
        }
    };
    Ok(Output { json, table: None, code })
}

fn cmd_certify(r: usize, d: usize, k: usize) -> Result<Output> {
    let n = (r + 1) * k - 1;
    let paths = path_packing_certificate(r, d, k)?;
    let disjoint = verify_packing(n, d, k, &paths);
    let base_cover: Vec<usize> = (1..=r).map(|i| k * i - 1).collect();
    let product = tensor_with_tournament(&DvdInstance::new(gen_path(n)?, k)?, d)?;
    let cover = lift_solution(&base_cover, d);
    let cover_feasible = product.is_feasible(&cover);
    let cover_pairs: Vec<(usize, usize)> =
        base_cover.iter().flat_map(|&v| (1..=d).map(move |i| (v + 1, i))).collect();
    debug_assert!(cover_pairs.iter().zip(&cover).all(|(&(s, t), &idx)| tensor_index(s - 1, t, d) == idx));
    let pinned = disjoint.is_ok() && cover_feasible && paths.len() == cover.len();
    let json = json!({
        "r": r, "d": d, "k": k, "n": n,
        "paths": paths,
        "disjoint": disjoint.is_ok(),
        "disjoint_error": disjoint.err().map(|e| e.to_string()),
        "cover": cover_pairs,
        "cover_feasible": cover_feasible,
        "opt": if pinned { json!(paths.len()) } else { Value::Null },
    });
    Ok(Output { json, table: None, code: if pinned { 0 } else { 1 } })
}
