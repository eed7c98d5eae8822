//! `sgames` — load, validate and solve stochastic-game documents, measure
//! structural distances, and certify perturbation-robustness bounds.
//!
//! Exit codes: 0 on success (and on certificates that hold), 1 when a solve
//! or certification fails, 2 for unusable input (parse errors, bad flags).

mod doc;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use doc::GameDocument;
use report::{named_values, RunReport};
use sgames_core::chain::{multidiscounted_value_mc, parity_value_mc, MarkovChain};
use sgames_core::game::{distance_report, MemorylessStrategy};
use sgames_core::instances;
use sgames_core::mdp::{multidiscounted_value_mdp, parity_value_mdp};
use sgames_core::robust::{
    beta_threshold, certify_strategy_robustness, certify_value_bound, continuity_sweep, perturb,
    perturbation_bound, BoundInputs, CertificateReport, Objective,
};
use sgames_core::solve::{
    multidiscounted_value_concurrent, parity_value_concurrent_approx, parity_value_turnbased,
    LimitSchedule, TbMethod,
};
use sgames_core::{DiscountSpec, GameStructure, ParityObjective, StructureKind};

#[derive(Parser)]
#[command(name = "sgames", version, about = "Stochastic parity/multi-discounted game solving and robustness certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Parity,
    Multidiscounted,
}

#[derive(Subcommand)]
enum Command {
    /// Check a document against the structure invariants.
    Validate { file: PathBuf },
    /// Compute values (and strategies where they exist).
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        /// Tolerance for iterative solvers.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Ladder schedule for concurrent parity: `s0:s1:...,KMIN,KMAX`.
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Distances and structural equivalence of two documents.
    Distance { file1: PathBuf, file2: PathBuf },
    /// Quantitative bound or beta-threshold values.
    Bound {
        #[arg(long)]
        n: usize,
        /// Ratio distance input.
        #[arg(long)]
        ratio: Option<f64>,
        /// Absolute distance input (requires --eta).
        #[arg(long = "abs")]
        abs_dist: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        /// Compute the strategy-robustness threshold instead.
        #[arg(long)]
        beta: bool,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Write a structurally equivalent perturbation of a document.
    Perturb {
        file: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Certify value bounds (or strategy robustness with --strategy).
    Certify {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long)]
        strategy: bool,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Perturbation sweep; emits CSV `eps,sample,sup_diff,bound,dist_R`.
    Sweep {
        file: PathBuf,
        #[arg(long = "eps-list", value_delimiter = ',', required = true)]
        eps_list: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Materialize a named instance family.
    Family {
        /// One of: example1, example2, ratio, random.
        name: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        states: Option<usize>,
        #[arg(long, default_value_t = 2)]
        moves: usize,
        #[arg(long, default_value_t = 3)]
        support: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Attach a seeded random priority map.
        #[arg(long)]
        priority: bool,
        /// Attach seeded random discount/reward maps.
        #[arg(long)]
        discount: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
}

enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = run(cli.command);
    eprintln!("# wall time: {:?}", started.elapsed());
    match outcome {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn read_document(path: &Path) -> Result<(GameDocument, Vec<u8>)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).context("document is not UTF-8")?;
    let doc = GameDocument::parse(text).with_context(|| path.display().to_string())?;
    Ok((doc, bytes))
}

fn load_game(path: &Path) -> Result<(GameDocument, Vec<u8>, GameStructure)> {
    let (doc, bytes) = read_document(path)?;
    let g = doc.to_structure().with_context(|| path.display().to_string())?;
    Ok((doc, bytes, g))
}

fn require_valid(g: &GameStructure, path: &Path) -> Result<()> {
    let diags = g.validate();
    if !diags.is_empty() {
        bail!(
            "{} fails validation: {}",
            path.display(),
            diags
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        );
    }
    Ok(())
}

fn strategy_value(g: &GameStructure, strategy: &MemorylessStrategy) -> Value {
    let owner = strategy.owner();
    let map: BTreeMap<String, BTreeMap<String, f64>> = (0..g.n_states())
        .map(|s| {
            let moves: BTreeMap<String, f64> = g
                .gamma(owner, s)
                .iter()
                .enumerate()
                .filter(|(k, _)| strategy.row(s)[*k] > 1e-12)
                .map(|(k, &m)| (g.move_name(m).to_string(), strategy.row(s)[k]))
                .collect();
            (g.state_name(s).to_string(), moves)
        })
        .collect();
    serde_json::to_value(map).expect("strategy map")
}

fn certificate_value(rep: &CertificateReport, states: &[String]) -> Value {
    json!({
        "objective": rep.objective,
        "distance": {
            "absolute": rep.dist.absolute,
            "ratio": rep.dist.ratio,
            "structurally_equivalent": rep.dist.structurally_equivalent,
            "eta": rep.dist.eta,
        },
        "per_state_diff": named_values(states, &rep.per_state),
        "max_diff": rep.max_diff,
        "bound": if rep.bound.is_finite() { Value::from(rep.bound) } else { Value::String("infinite".into()) },
        "bound_absolute": rep.bound_absolute,
        "margin": if rep.margin.is_finite() { Value::from(rep.margin) } else { Value::String("infinite".into()) },
        "tolerance_budget": rep.tolerance_budget,
        "holds": rep.holds,
        "hypothesis_met": rep.hypothesis_met,
        "notes": rep.notes,
    })
}

fn parse_schedule(text: &str, g: &GameStructure) -> Result<LimitSchedule> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        bail!("schedule must look like `s0:s1:...,KMIN,KMAX`");
    }
    let order = parts[0]
        .split(':')
        .map(|name| {
            g.state_index(name)
                .ok_or_else(|| anyhow!("schedule names unknown state `{name}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    let k_min: u32 = parts[1].parse().context("bad KMIN")?;
    let k_max: u32 = parts[2].parse().context("bad KMAX")?;
    LimitSchedule::new(order, k_min, k_max).map_err(|e| anyhow!("{e}"))
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Validate { file } => {
            let (doc, bytes) = read_document(&file)?;
            let g = doc.to_structure().with_context(|| file.display().to_string())?;
            let diags = g.validate();
            let mut rep = RunReport::new("validate");
            rep.input(&file, &bytes);
            rep.result = json!({
                "kind": g.classify().to_string(),
                "states": g.n_states(),
                "clean": diags.is_empty(),
                "diagnostics": diags.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            });
            rep.print()?;
            Ok(if diags.is_empty() { Outcome::Ok } else { Outcome::Failed })
        }

        Command::Solve { file, objective, tol, schedule } => {
            let (doc, bytes, g) = load_game(&file)?;
            require_valid(&g, &file)?;
            let mut rep = RunReport::new("solve");
            rep.input(&file, &bytes);
            rep.param("tol", tol);
            let kind = g.classify();
            rep.param("kind", kind.to_string());
            match objective {
                ObjectiveArg::Parity => {
                    rep.param("objective", "parity");
                    let p = doc
                        .parity(&g)?
                        .ok_or_else(|| anyhow!("parity objective needs a priority map"))?;
                    rep.result = solve_parity(&g, &p, kind, schedule.as_deref())?;
                }
                ObjectiveArg::Multidiscounted => {
                    rep.param("objective", "multidiscounted");
                    let spec = doc
                        .discount_spec(&g)?
                        .ok_or_else(|| anyhow!("multidiscounted objective needs discount and reward maps"))?;
                    rep.result = solve_discounted(&g, &spec, tol, kind)?;
                }
            }
            rep.print()?;
            Ok(Outcome::Ok)
        }

        Command::Distance { file1, file2 } => {
            let (_, bytes1, g1) = load_game(&file1)?;
            let (_, bytes2, g2) = load_game(&file2)?;
            let report = distance_report(&g1, &g2).map_err(|e| anyhow!("{e}"))?;
            let mut rep = RunReport::new("distance");
            rep.input(&file1, &bytes1);
            rep.input(&file2, &bytes2);
            rep.result = json!({
                "absolute": report.absolute,
                "ratio": report.ratio,
                "structurally_equivalent": report.structurally_equivalent,
                "eta": report.eta,
            });
            rep.print()?;
            Ok(Outcome::Ok)
        }

        Command::Bound { n, ratio, abs_dist, eta, beta, eps } => {
            let mut rep = RunReport::new("bound");
            rep.param("n", n as u64);
            if beta {
                let eps = eps.ok_or_else(|| anyhow!("--beta needs --eps"))?;
                let eta = eta.ok_or_else(|| anyhow!("--beta needs --eta"))?;
                let value = beta_threshold(eta, eps, n).map_err(|e| anyhow!("{e}"))?;
                rep.param("eps", eps);
                rep.param("eta", eta);
                rep.result = json!({ "beta": value });
            } else {
                let inputs = match (ratio, abs_dist, eta) {
                    (Some(eps_r), None, None) => {
                        rep.param("ratio", eps_r);
                        BoundInputs::Ratio { n, eps_r }
                    }
                    (None, Some(eps_a), Some(eta)) => {
                        rep.param("abs", eps_a);
                        rep.param("eta", eta);
                        BoundInputs::Absolute { n, eps_a, eta }
                    }
                    _ => bail!("give either --ratio E or --abs E --eta H"),
                };
                let value = perturbation_bound(inputs).map_err(|e| anyhow!("{e}"))?;
                rep.result = json!({ "bound": value });
            }
            rep.print()?;
            Ok(Outcome::Ok)
        }

        Command::Perturb { file, eps, seed, output } => {
            let (doc, bytes, g) = load_game(&file)?;
            require_valid(&g, &file)?;
            let perturbed = perturb(&g, eps, seed).map_err(|e| anyhow!("{e}"))?;
            let out_doc = GameDocument::from_structure(
                &perturbed,
                doc.declared_kind()?,
                doc.parity(&g)?.as_ref(),
                doc.discount_spec(&g)?.as_ref(),
            )?;
            let text = out_doc.canonical_json();
            std::fs::write(&output, &text)
                .with_context(|| format!("writing {}", output.display()))?;
            let dist = distance_report(&g, &perturbed).map_err(|e| anyhow!("{e}"))?;
            let mut rep = RunReport::new("perturb");
            rep.input(&file, &bytes);
            rep.param("eps", eps);
            rep.param("seed", seed);
            rep.result = json!({
                "output": output.display().to_string(),
                "absolute_distance": dist.absolute,
                "ratio_distance": dist.ratio,
                "structurally_equivalent": dist.structurally_equivalent,
            });
            rep.print()?;
            Ok(Outcome::Ok)
        }

        Command::Certify { file1, file2, objective, strategy, eps } => {
            let (doc1, bytes1, g1) = load_game(&file1)?;
            let (_, bytes2, g2) = load_game(&file2)?;
            require_valid(&g1, &file1)?;
            require_valid(&g2, &file2)?;
            let mut rep = RunReport::new("certify");
            rep.input(&file1, &bytes1);
            rep.input(&file2, &bytes2);
            let cert = if strategy {
                let eps = eps.ok_or_else(|| anyhow!("--strategy needs --eps"))?;
                if objective != ObjectiveArg::Parity {
                    bail!("strategy robustness is defined for the parity objective");
                }
                let p = doc1
                    .parity(&g1)?
                    .ok_or_else(|| anyhow!("parity objective needs a priority map"))?;
                rep.param("eps", eps);
                rep.param("mode", "strategy-robustness");
                certify_strategy_robustness(&g1, &g2, &p, eps).map_err(|e| anyhow!("{e}"))?
            } else {
                rep.param("mode", "value-bound");
                match objective {
                    ObjectiveArg::Parity => {
                        let p = doc1
                            .parity(&g1)?
                            .ok_or_else(|| anyhow!("parity objective needs a priority map"))?;
                        certify_value_bound(&g1, &g2, Objective::Parity(&p))
                            .map_err(|e| anyhow!("{e}"))?
                    }
                    ObjectiveArg::Multidiscounted => {
                        let spec = doc1.discount_spec(&g1)?.ok_or_else(|| {
                            anyhow!("multidiscounted objective needs discount and reward maps")
                        })?;
                        certify_value_bound(&g1, &g2, Objective::Discounted(&spec))
                            .map_err(|e| anyhow!("{e}"))?
                    }
                }
            };
            let holds = cert.holds;
            rep.result = certificate_value(&cert, g1.states());
            rep.print()?;
            Ok(if holds { Outcome::Ok } else { Outcome::Failed })
        }

        Command::Sweep { file, eps_list, samples, seed } => {
            let (doc, _, g) = load_game(&file)?;
            require_valid(&g, &file)?;
            let p = doc
                .parity(&g)?
                .ok_or_else(|| anyhow!("sweep needs a priority map"))?;
            let rows = continuity_sweep(&g, &p, &eps_list, samples, seed)
                .map_err(|e| anyhow!("{e}"))?;
            println!("eps,sample,sup_diff,bound,dist_R");
            for row in rows {
                println!(
                    "{},{},{},{},{}",
                    row.eps, row.sample, row.sup_diff, row.bound, row.dist_r
                );
            }
            Ok(Outcome::Ok)
        }

        Command::Family {
            name,
            eps,
            n,
            kind,
            states,
            moves,
            support,
            seed,
            priority,
            discount,
            output,
        } => {
            let artifacts = build_family(
                &name, eps, n, kind.as_deref(), states, moves, support, seed, priority, discount,
            )?;
            let mut written = Vec::new();
            let multi = artifacts.len() > 1;
            for (label, doc) in artifacts {
                let path = if multi {
                    suffixed_path(&output, &label)
                } else {
                    output.clone()
                };
                let text = doc.canonical_json();
                std::fs::write(&path, &text)
                    .with_context(|| format!("writing {}", path.display()))?;
                let mut hasher = <sha2::Sha256 as sha2::Digest>::new();
                sha2::Digest::update(&mut hasher, text.as_bytes());
                let digest: String = sha2::Digest::finalize(hasher)
                    .iter()
                    .map(|b| format!("{b:02x}"))
                    .collect();
                written.push(json!({ "path": path.display().to_string(), "sha256": digest }));
            }
            let mut rep = RunReport::new("family");
            rep.param("name", name);
            rep.param("seed", seed);
            rep.result = json!({ "written": written });
            rep.print()?;
            Ok(Outcome::Ok)
        }
    }
}

fn solve_parity(
    g: &GameStructure,
    p: &ParityObjective,
    kind: StructureKind,
    schedule: Option<&str>,
) -> Result<Value> {
    match kind {
        StructureKind::MarkovChain => {
            let m = MarkovChain::from_game(g).map_err(|e| anyhow!("{e}"))?;
            let values = parity_value_mc(&m, p).map_err(|e| anyhow!("{e}"))?;
            Ok(json!({ "solver": "chain-exact", "values": named_values(g.states(), &values) }))
        }
        StructureKind::MdpPlayer1 | StructureKind::MdpPlayer2 => {
            let res = parity_value_mdp(g, p).map_err(|e| anyhow!("{e}"))?;
            Ok(json!({
                "solver": "mdp-exact",
                "values": named_values(g.states(), &res.values),
                "strategy": strategy_value(g, &res.strategy),
                "iterations": res.iterations as u64,
            }))
        }
        StructureKind::TurnBased => {
            let out = parity_value_turnbased(g, p, TbMethod::Improvement)
                .map_err(|e| anyhow!("{e}"))?;
            Ok(json!({
                "solver": "turn-based-exact",
                "method": if out.fell_back { "enumeration (improvement fell back)" } else { "improvement" },
                "values": named_values(g.states(), &out.values),
                "strategy1": strategy_value(g, &out.strategy1),
                "strategy2": strategy_value(g, &out.strategy2),
                "determinacy_gap": out.determinacy_gap,
            }))
        }
        StructureKind::Concurrent => {
            let sched = match schedule {
                Some(text) => parse_schedule(text, g)?,
                None => LimitSchedule::default_for(p),
            };
            let out = parity_value_concurrent_approx(g, p, &sched)
                .map_err(|e| anyhow!("{e}"))?;
            let trace: Vec<Value> = out
                .trace
                .iter()
                .map(|step| {
                    json!({
                        "sweep": step.sweep as u64,
                        "state": step.advanced.map(|s| g.state_name(s).to_string()),
                        "rung": step.rung,
                        "values": named_values(g.states(), &step.values),
                    })
                })
                .collect();
            Ok(json!({
                "solver": "discount-ladder-approximation",
                "order": sched.order().iter().map(|&s| g.state_name(s).to_string()).collect::<Vec<_>>(),
                "k_min": sched.k_min(),
                "k_max": sched.k_max(),
                "values": named_values(g.states(), &out.values),
                "converged": out.converged,
                "sweep_deltas": out.sweep_deltas,
                "trace": trace,
            }))
        }
    }
}

fn solve_discounted(
    g: &GameStructure,
    spec: &DiscountSpec,
    tol: f64,
    kind: StructureKind,
) -> Result<Value> {
    match kind {
        StructureKind::MarkovChain => {
            let m = MarkovChain::from_game(g).map_err(|e| anyhow!("{e}"))?;
            let values = multidiscounted_value_mc(&m, spec).map_err(|e| anyhow!("{e}"))?;
            Ok(json!({ "solver": "chain-exact", "values": named_values(g.states(), &values) }))
        }
        StructureKind::MdpPlayer1 | StructureKind::MdpPlayer2 => {
            let res = multidiscounted_value_mdp(g, spec, tol).map_err(|e| anyhow!("{e}"))?;
            Ok(json!({
                "solver": "mdp-value-iteration",
                "values": named_values(g.states(), &res.values),
                "strategy": strategy_value(g, &res.strategy),
                "iterations": res.iterations as u64,
                "residual": res.residual,
            }))
        }
        StructureKind::TurnBased | StructureKind::Concurrent => {
            let sol = multidiscounted_value_concurrent(g, spec, tol)
                .map_err(|e| anyhow!("{e}"))?;
            Ok(json!({
                "solver": "shapley-fixed-point",
                "values": named_values(g.states(), &sol.values),
                "strategy1": strategy_value(g, &sol.strategy1),
                "strategy2": strategy_value(g, &sol.strategy2),
                "iterations": sol.iterations as u64,
                "residual": sol.residual,
            }))
        }
    }
}

fn suffixed_path(base: &Path, label: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    let ext = base.extension().map(|e| e.to_string_lossy().to_string());
    let name = match ext {
        Some(ext) => format!("{stem}-{label}.{ext}"),
        None => format!("{stem}-{label}"),
    };
    base.with_file_name(name)
}

#[allow(clippy::too_many_arguments)]
fn build_family(
    name: &str,
    eps: Option<f64>,
    n: Option<usize>,
    kind: Option<&str>,
    states: Option<usize>,
    moves: usize,
    support: usize,
    seed: u64,
    priority: bool,
    discount: bool,
) -> Result<Vec<(String, GameDocument)>> {
    let chain_doc = |m: &MarkovChain, p: Option<&ParityObjective>| -> Result<GameDocument> {
        GameDocument::from_structure(&m.to_game(), StructureKind::MarkovChain, p, None)
    };
    match name {
        "example1" => {
            let eps = eps.ok_or_else(|| anyhow!("example1 needs --eps"))?;
            let (g1, g2, p) = instances::example1_family(eps).map_err(|e| anyhow!("{e}"))?;
            Ok(vec![
                ("g1".into(), chain_doc(&g1, Some(&p))?),
                ("g2".into(), chain_doc(&g2, Some(&p))?),
            ])
        }
        "example2" => {
            let eps = eps.ok_or_else(|| anyhow!("example2 needs --eps"))?;
            let n = n.ok_or_else(|| anyhow!("example2 needs --n"))?;
            let (m, target) = instances::example2_line(n, eps).map_err(|e| anyhow!("{e}"))?;
            // reaching the absorbing target is the parity objective
            let mut prio = vec![1u32; m.n()];
            prio[target] = 0;
            let p = ParityObjective::new(prio);
            Ok(vec![("line".into(), chain_doc(&m, Some(&p))?)])
        }
        "ratio" => {
            let eps = eps.ok_or_else(|| anyhow!("ratio needs --eps"))?;
            let (g1, g2, g5) = instances::ratio_example_chains(eps).map_err(|e| anyhow!("{e}"))?;
            Ok(vec![
                ("g1".into(), chain_doc(&g1, None)?),
                ("g2".into(), chain_doc(&g2, None)?),
                ("g5".into(), chain_doc(&g5, None)?),
            ])
        }
        "random" => {
            let kind: StructureKind = kind
                .ok_or_else(|| anyhow!("random needs --kind"))?
                .parse()
                .map_err(|e| anyhow!("{e}"))?;
            let states = states.ok_or_else(|| anyhow!("random needs --states"))?;
            let g = instances::random_instance(&instances::RandomSpec {
                kind,
                n_states: states,
                max_moves: moves,
                max_support: support,
                seed,
            })
            .map_err(|e| anyhow!("{e}"))?;
            let p = priority.then(|| instances::random_parity(states, 3, seed ^ 0x9));
            let d = discount.then(|| instances::random_discount(states, 0.1, 0.9, seed ^ 0xD));
            let doc = GameDocument::from_structure(&g, kind, p.as_ref(), d.as_ref())?;
            Ok(vec![("random".into(), doc)])
        }
        other => bail!("unknown family `{other}` (expected example1, example2, ratio, random)"),
    }
}
