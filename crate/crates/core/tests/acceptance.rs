//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line.
//!
//! Run with `cargo test -p treesched --test acceptance -- --nocapture` to see
//! the report.

mod support;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use support::{brute_force_pushed, corpus, eps, small_corpus, CorpusEntry};
use treesched::dp::{decide, run_dp, Decision, DpOptions};
use treesched::instance::{generate_instance, validate_schedule};
use treesched::oracle::solve_exact;
use treesched::reconstruct::{build_schedule, build_schedule_traced};
use treesched::search::{certify, solve};
use treesched::{Epsilon, ExactScalar, Rational, SizeClass, SizeGrid, SolveResult, TreeShape};

const CORPUS_SIZE: u64 = 240;
const CORPUS_TIME_LIMIT: Duration = Duration::from_secs(300);
const ROUNDING_TRIPLES: usize = 100_000;
const DP_EQUIVALENCE_INSTANCES: u64 = 50;
const SCALE_TIME_LIMIT: Duration = Duration::from_secs(60);

fn epsilons() -> [Epsilon; 3] {
    [Epsilon::ONE, eps(1, 2), eps(1, 4)]
}

struct Run {
    entry: CorpusEntry,
    eps: Epsilon,
    opt: u64,
    result: SolveResult<Rational>,
}

struct CorpusRuns {
    runs: Vec<Run>,
    elapsed: Duration,
}

fn corpus_runs() -> &'static CorpusRuns {
    static RUNS: OnceLock<CorpusRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = Instant::now();
        let cells: Vec<(CorpusEntry, Epsilon)> = corpus(CORPUS_SIZE)
            .into_iter()
            .flat_map(|entry| epsilons().map(|e| (entry.clone(), e)))
            .collect();
        let runs = cells
            .into_par_iter()
            .map(|(entry, eps)| {
                let opt = solve_exact(&entry.instance, None).expect("oracle within budget").opt;
                let result = solve::<Rational>(&entry.instance, eps, DpOptions::default()).expect("solve");
                Run { entry, eps, opt, result }
            })
            .collect();
        CorpusRuns { runs, elapsed: start.elapsed() }
    })
}

fn report(id: &str, description: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("[PASS] {id} {description}");
    } else {
        println!("[FAIL] {id} {description}: {} violation(s)", failures.len());
        for f in failures.iter().take(10) {
            println!("       {f}");
        }
    }
    assert!(failures.is_empty(), "{id} failed: {failures:?}");
}

fn label(run: &Run) -> String {
    format!("seed {} {} eps {}", run.entry.seed, run.entry.shape, run.eps)
}

#[test]
fn ac1_guarantee_reproduction() {
    let corpus = corpus_runs();
    let mut failures = Vec::new();
    for run in &corpus.runs {
        let bound = run.eps.guarantee::<Rational>().mul_u64(run.opt);
        if Rational::from_u64(run.result.schedule.makespan) > bound {
            failures.push(format!("{}: makespan {} > (1+4e)*{}", label(run), run.result.schedule.makespan, run.opt));
        }
    }
    let instances = corpus.runs.len() / epsilons().len();
    if instances < 200 {
        failures.push(format!("corpus has only {instances} instances"));
    }
    if corpus.elapsed > CORPUS_TIME_LIMIT {
        failures.push(format!("corpus took {:?}", corpus.elapsed));
    }
    report(
        "AC1",
        &format!("makespan <= (1+4e)*OPT on {instances} instances x 3 eps ({:.1?})", corpus.elapsed),
        &failures,
    );
}

#[test]
fn ac2_decision_completeness() {
    let failures: Vec<String> = corpus_runs()
        .runs
        .par_iter()
        .filter_map(|run| {
            let inst = &run.entry.instance;
            // Without jobs OPT is 0; the smallest valid target is 1.
            let target = run.opt.max(1);
            let decision = decide::<Rational>(inst, target, run.eps, DpOptions::default()).ok()?;
            let Decision::Feasible { grid, assignment } = decision else {
                return Some(format!("{}: decide rejected C = OPT = {}", label(run), run.opt));
            };
            let schedule = match build_schedule(inst, &assignment, &grid) {
                Ok(s) => s,
                Err(e) => return Some(format!("{}: reconstruction failed: {e}", label(run))),
            };
            if validate_schedule(inst, &schedule).is_err() {
                return Some(format!("{}: invalid schedule", label(run)));
            }
            let bound = run.eps.guarantee::<Rational>().mul_u64(run.opt);
            (Rational::from_u64(schedule.makespan) > bound)
                .then(|| format!("{}: makespan {} above (1+4e)*OPT", label(run), schedule.makespan))
        })
        .collect();
    report("AC2", "decide(OPT) succeeds and reconstructs within (1+4e)*OPT", &failures);
}

#[test]
fn ac3_lower_bound_certification() {
    let failures: Vec<String> = corpus_runs()
        .runs
        .iter()
        .filter(|run| run.result.decision_c > run.opt)
        .map(|run| format!("{}: decision_C {} > OPT {}", label(run), run.result.decision_c, run.opt))
        .collect();
    report("AC3", "decision_C <= OPT on the full corpus", &failures);
}

#[test]
fn ac4_rounding_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut failures = Vec::new();
    for _ in 0..ROUNDING_TRIPLES {
        let target = rng.gen_range(1..=10_000u64);
        let denom = rng.gen_range(1..=20u64);
        let eps = Epsilon::new(rng.gen_range(1..=denom), denom).unwrap();
        let p = rng.gen_range(1..=target);
        let grid: SizeGrid<Rational> = SizeGrid::new(target, eps);
        let rounded = match grid.round_job(p).unwrap() {
            SizeClass::Small => continue,
            SizeClass::Large(k) => grid.class_value(k).clone(),
        };
        let pq = Rational::from_u64(p);
        let upper = (Rational::from_u64(1) + eps.value::<Rational>()) * pq.clone();
        if !(pq <= rounded && rounded <= upper) {
            failures.push(format!("p={p} C={target} eps={eps}: rounded {rounded}"));
        }
    }
    report("AC4", &format!("p <= rounded <= (1+e)p over {ROUNDING_TRIPLES} triples"), &failures);
}

#[test]
fn ac5_dp_oracle_equivalence() {
    let instances = small_corpus(DP_EQUIVALENCE_INSTANCES);
    let failures: Vec<String> = instances
        .par_iter()
        .flat_map_iter(|entry| {
            let inst = &entry.instance;
            assert!(inst.job_count() <= 8 && inst.machine_count() <= 4);
            let mut failures = Vec::new();
            let opt = solve_exact(inst, None).unwrap().opt.max(1);
            // The optimum and the tightest level the screening rule allows.
            let mut targets = vec![opt, inst.max_size().max(1)];
            targets.dedup();
            for (e, target) in [Epsilon::ONE, eps(1, 2)].into_iter().flat_map(|e| targets.iter().map(move |&t| (e, t))) {
                let grid: SizeGrid<Rational> = SizeGrid::new(target, e);
                let run = run_dp(inst, grid.clone(), DpOptions::default()).unwrap();
                for v in 0..inst.machine_count() {
                    let dp: std::collections::BTreeSet<_> = run.states[v].pushed().cloned().collect();
                    let brute = brute_force_pushed(inst, &grid, v);
                    if dp != brute {
                        failures.push(format!(
                            "seed {} eps {e} C {target} node {v}: dp {} tuples, enumerator {}",
                            entry.seed,
                            dp.len(),
                            brute.len()
                        ));
                    }
                }
            }
            failures
        })
        .collect();
    report(
        "AC5",
        &format!("pushed sets equal the exhaustive enumerator on {DP_EQUIVALENCE_INSTANCES} instances"),
        &failures,
    );
}

#[test]
fn ac6_pruning_consistency() {
    let pruned = DpOptions { dominance_prune: true };
    let failures: Vec<String> = corpus_runs()
        .runs
        .par_iter()
        .flat_map_iter(|run| {
            let inst = &run.entry.instance;
            let mut failures = Vec::new();
            let with = solve::<Rational>(inst, run.eps, pruned).unwrap();
            if with.decision_c != run.result.decision_c {
                failures.push(format!(
                    "{}: decision_C {} pruned vs {} unpruned",
                    label(run),
                    with.decision_c,
                    run.result.decision_c
                ));
            }
            if inst.job_count() > 0 {
                let lo = inst.max_size();
                let hi = inst.total_size();
                let probes = [lo, run.opt.saturating_sub(1), run.opt, run.result.decision_c.saturating_sub(1), (lo + hi) / 2];
                for c in probes.into_iter().filter(|&c| c >= 1) {
                    let a = decide::<Rational>(inst, c, run.eps, DpOptions::default()).unwrap().is_feasible();
                    let b = decide::<Rational>(inst, c, run.eps, pruned).unwrap().is_feasible();
                    if a != b {
                        failures.push(format!("{}: decide(C={c}) {a} unpruned vs {b} pruned", label(run)));
                    }
                }
            }
            failures
        })
        .collect();
    report("AC6", "dominance pruning preserves decide outcomes and decision_C", &failures);
}

#[test]
fn ac7_reconstruction_invariants() {
    let failures: Vec<String> = corpus_runs()
        .runs
        .par_iter()
        .filter(|run| run.entry.instance.job_count() > 0)
        .flat_map_iter(|run| {
            let inst = &run.entry.instance;
            let mut failures = Vec::new();
            let Decision::Feasible { grid, assignment } =
                decide::<Rational>(inst, run.result.decision_c, run.eps, DpOptions::default()).unwrap()
            else {
                return vec![format!("{}: decide rejected decision_C", label(run))];
            };
            let (schedule, trace) = build_schedule_traced(inst, &assignment, &grid).unwrap();
            if schedule.assignment != run.result.schedule.assignment {
                failures.push(format!("{}: reconstruction differs from solve", label(run)));
            }
            for node in trace {
                let load = Rational::from_u64(node.true_load);
                if load > node.planned_size.clone() + grid.small_threshold().clone() {
                    failures.push(format!("{}: machine {} load {} > plan {} + eC", label(run), node.machine, node.true_load, node.planned_size));
                }
                if Rational::from_u64(node.small_pushed) > node.small_pushed_planned {
                    failures.push(format!(
                        "{}: machine {} pushed small mass {} > planned {}",
                        label(run),
                        node.machine,
                        node.small_pushed,
                        node.small_pushed_planned
                    ));
                }
            }
            failures
        })
        .collect();
    report("AC7", "per-machine load <= plan + eC and pushed small mass <= plan", &failures);
}

#[test]
fn ac8_compare_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let args = [
            "treesched", "compare", "--seeds", "1..5", "--epsilons", "1/1,1/2", "--machines", "4", "--jobs", "8",
            "--max-size", "10", "--shape", "random", "--csv",
        ];
        let mut argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        argv.push(path.display().to_string());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = treesched::cli::run(argv, &mut out, &mut err);
        assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
        std::fs::read(path).unwrap()
    };
    let first = run("a.csv");
    let second = run("b.csv");
    let mut failures = Vec::new();
    if first != second {
        failures.push("CSV outputs differ".to_string());
    }
    let rows = String::from_utf8(first).unwrap().lines().count() - 1;
    if rows != 10 {
        failures.push(format!("expected 10 rows, got {rows}"));
    }
    report("AC8", "two compare runs produce byte-identical CSV", &failures);
}

#[test]
fn ac9_scale_smoke() {
    let inst = generate_instance(9, 10, 50, 100, TreeShape::Random);
    let start = Instant::now();
    let result = solve::<Rational>(&inst, eps(1, 2), DpOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let certificate = certify(&inst, &result, None);
    let mut failures: Vec<String> = certificate.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    if elapsed > SCALE_TIME_LIMIT {
        failures.push(format!("solve took {elapsed:?}"));
    }
    report(
        "AC9",
        &format!("m=10 n=50 eps=1/2 solved in {elapsed:.2?}, makespan {}, certify passes", result.schedule.makespan),
        &failures,
    );
}
