use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use annealdp::anneal::{AnnealSchedule, InitialState, SamplerRequest, Target};
use annealdp::bqm::io::qubo_to_text;
use annealdp::bqm::BinaryState;
use annealdp::experiments::CycleProblem;
use annealdp::pbf::io::{parse_poly, poly_to_text};
use annealdp::quadratize::verify::{check_exact, preserves_ground_state};
use annealdp::quadratize::{
    elc_reduce, quadratize_by_substitution, quadratize_full, ReductionResult,
};
use annealdp::rbc::{
    classical_ppi, combinatorial_ppi, default_initial_capital, errors_pct, hybrid_ppi,
    multi_anneal_ppi, negative_shock_path, one_shot_ppi, simulate_consumption, true_parameters,
    AnnealOutcome, CollocationGrid, HybridConfig, IterationMode, MergedProblem, MultiAnnealConfig,
    OneShotConfig, PpiState, RbcParams,
};
use clap::ValueEnum;

use crate::artifacts::{ensure_dir, line_plot, write_csv, write_text, Series};
use crate::config::{value_name, Algorithm, Engine, RunConfig};
use crate::error::{CliError, Result};

/// Printable summary of a command plus the files it wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub files: Vec<PathBuf>,
}

/// Largest polynomial accepted by `quadratize --verify`.
pub const VERIFY_MAX_VARS: usize = 12;

struct Execution {
    seed: u64,
    state: PpiState,
    qpu_total: f64,
    /// Program time paid once before the reads of a merged run.
    qpu_offset: f64,
    outcomes: Option<Vec<AnnealOutcome>>,
}

fn f(v: f64) -> String {
    v.to_string()
}

fn uses_merged(a: Algorithm) -> bool {
    matches!(a, Algorithm::MultiAnneal | Algorithm::OneShot)
}

fn uses_sampler(a: Algorithm) -> bool {
    matches!(
        a,
        Algorithm::Hybrid | Algorithm::MultiAnneal | Algorithm::OneShot
    )
}

/// Runs the selected PPI algorithm `executions` times with seeds
/// `seed, seed + 1, ...` and writes the run artifacts.
pub fn solve(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let params = RbcParams::default();
    let truth = true_parameters(&params)?;
    let grid = CollocationGrid::new(&params, cfg.k_nodes)?;
    let init = if cfg.init_true { truth } else { cfg.init };
    let sampler = cfg.engine.sampler();
    let reads = cfg.reads_or_default();
    let merged = if uses_merged(cfg.algorithm) {
        Some(MergedProblem::build(&params, &grid, cfg.merged())?)
    } else {
        None
    };

    let mut execs = Vec::with_capacity(cfg.executions);
    for e in 0..cfg.executions {
        let seed = cfg.seed.wrapping_add(e as u64);
        let exec = match (cfg.algorithm, &merged) {
            (Algorithm::Classical, _) => {
                let state = classical_ppi(&params, &grid, init, cfg.mode())?;
                Execution::plain(seed, state)
            }
            (Algorithm::Combinatorial, _) => {
                let state =
                    combinatorial_ppi(&params, &grid, &cfg.combinatorial(), init, cfg.mode())?;
                Execution::plain(seed, state)
            }
            (Algorithm::Hybrid, _) => {
                let h = HybridConfig {
                    reads,
                    keep_fraction: cfg.keep_fraction,
                    anneal_time: cfg.anneal_time,
                    seed,
                    mode: cfg.mode(),
                    timing: cfg.timing(),
                };
                let state = hybrid_ppi(
                    &params,
                    &grid,
                    &cfg.combinatorial(),
                    sampler.as_ref(),
                    &h,
                    init,
                )?;
                Execution::plain(seed, state)
            }
            (Algorithm::MultiAnneal, Some(m)) => {
                let run = multi_anneal_ppi(
                    m,
                    sampler.as_ref(),
                    &MultiAnnealConfig {
                        reads,
                        segment_time: cfg.anneal_time,
                        reversal: cfg.reversal,
                        seed,
                        init,
                        timing: cfg.timing(),
                    },
                )?;
                Execution {
                    seed,
                    qpu_total: run.timing.total,
                    qpu_offset: run.timing.t_program,
                    state: run.state,
                    outcomes: None,
                }
            }
            (Algorithm::OneShot, Some(m)) => {
                let r = one_shot_ppi(
                    m,
                    sampler.as_ref(),
                    &OneShotConfig {
                        reads,
                        cycles: cfg.cycles,
                        segment_time: cfg.anneal_time,
                        reversal: cfg.reversal,
                        keep_fraction: cfg.keep_fraction,
                        seed,
                        timing: cfg.timing(),
                    },
                )?;
                Execution {
                    seed,
                    qpu_total: r.run.timing.total,
                    qpu_offset: r.run.timing.t_program,
                    state: r.run.state,
                    outcomes: Some(r.report.outcomes),
                }
            }
            _ => unreachable!("merged problem is built for merged algorithms"),
        };
        execs.push(exec);
    }

    let dir = &cfg.out_dir;
    ensure_dir(dir)?;
    let mut files = vec![write_text(&dir.join("config.txt"), &cfg.to_text())?];
    files.push(write_iterations(
        &dir.join("iterations.csv"),
        &execs,
        truth,
    )?);
    files.push(write_estimates(&dir.join("estimates.csv"), &execs, truth)?);
    if execs.iter().any(|e| e.outcomes.is_some()) {
        files.push(write_reads(&dir.join("reads.csv"), &execs)?);
    }
    if let Some(m) = &merged {
        let q = m.quadratize()?;
        let mut text = format!(
            "# merged program, offset {}, {} auxiliaries\n",
            q.offset,
            q.num_aux()
        );
        text.push_str(&qubo_to_text(&q.qubo));
        files.push(write_text(&dir.join("merged.qubo"), &text)?);
        let cycles = if cfg.algorithm == Algorithm::OneShot {
            cfg.cycles
        } else {
            1
        };
        let schedule =
            AnnealSchedule::cyclic(m.group_of(), 2, cycles, cfg.reversal, cfg.anneal_time)?;
        files.push(write_text(&dir.join("schedule.csv"), &schedule.to_csv())?);
    }
    let plot = error_plot(cfg.algorithm, &execs[0], truth);
    files.push(write_text(&dir.join("errors.svg"), &plot)?);
    let text = summary(cfg, &execs, truth);
    files.push(write_text(&dir.join("summary.txt"), &text)?);
    Ok(Report { text, files })
}

impl Execution {
    fn plain(seed: u64, state: PpiState) -> Self {
        let qpu_total = state.history.iter().map(|r| r.qpu_us).sum();
        Self {
            seed,
            state,
            qpu_total,
            qpu_offset: 0.0,
            outcomes: None,
        }
    }
}

fn write_iterations(path: &Path, execs: &[Execution], truth: [f64; 3]) -> Result<PathBuf> {
    let mut rows = Vec::new();
    for (e, ex) in execs.iter().enumerate() {
        for r in &ex.state.history {
            let err = errors_pct(r.params, truth);
            rows.push(vec![
                e.to_string(),
                r.iteration.to_string(),
                f(r.params[0]),
                f(r.params[1]),
                f(r.params[2]),
                f(err[0]),
                f(err[1]),
                f(err[2]),
                f(r.loss),
                f(r.qpu_us),
            ]);
        }
    }
    write_csv(
        path,
        &[
            "execution",
            "iteration",
            "x1",
            "x2",
            "x3",
            "err_x1_pct",
            "err_x2_pct",
            "err_x3_pct",
            "loss",
            "qpu_us",
        ],
        &rows,
    )
}

fn write_estimates(path: &Path, execs: &[Execution], truth: [f64; 3]) -> Result<PathBuf> {
    let rows: Vec<Vec<String>> = execs
        .iter()
        .enumerate()
        .map(|(e, ex)| {
            let p = ex.state.params();
            let err = errors_pct(p, truth);
            vec![
                e.to_string(),
                ex.seed.to_string(),
                f(p[0]),
                f(p[1]),
                f(p[2]),
                f(err[0]),
                f(err[1]),
                f(err[2]),
                ex.state.iteration.to_string(),
                ex.state
                    .converged_after
                    .map_or(String::new(), |c| c.to_string()),
                f(ex.qpu_total),
            ]
        })
        .collect();
    write_csv(
        path,
        &[
            "execution",
            "seed",
            "x1",
            "x2",
            "x3",
            "err_x1_pct",
            "err_x2_pct",
            "err_x3_pct",
            "iterations",
            "converged_after",
            "qpu_us",
        ],
        &rows,
    )
}

fn write_reads(path: &Path, execs: &[Execution]) -> Result<PathBuf> {
    let mut rows = Vec::new();
    for (e, ex) in execs.iter().enumerate() {
        for (r, o) in ex.outcomes.iter().flatten().enumerate() {
            rows.push(vec![
                e.to_string(),
                (r + 1).to_string(),
                f(o.params[0]),
                f(o.params[1]),
                f(o.params[2]),
                f(o.unadjusted_loss),
                f(o.adjusted_loss[0]),
                f(o.adjusted_loss[1]),
                f(o.adjusted_loss[2]),
            ]);
        }
    }
    write_csv(
        path,
        &[
            "execution",
            "read",
            "x1",
            "x2",
            "x3",
            "unadjusted_loss",
            "adjusted_loss_x1",
            "adjusted_loss_x2",
            "adjusted_loss_x3",
        ],
        &rows,
    )
}

fn error_plot(algorithm: Algorithm, ex: &Execution, truth: [f64; 3]) -> String {
    let by_time = uses_sampler(algorithm);
    let mut t = ex.qpu_offset;
    let xs: Vec<f64> = ex
        .state
        .history
        .iter()
        .map(|r| {
            t += r.qpu_us;
            if by_time {
                t / 1000.0
            } else {
                r.iteration as f64
            }
        })
        .collect();
    let series = (0..3)
        .map(|i| Series {
            name: format!("x{}", i + 1),
            points: ex
                .state
                .history
                .iter()
                .zip(&xs)
                .map(|(r, &x)| (x, errors_pct(r.params, truth)[i]))
                .collect(),
        })
        .collect::<Vec<_>>();
    let x_label = if by_time {
        "emulated QPU time (ms)"
    } else {
        "iteration"
    };
    line_plot(
        &format!("{} errors", value_name(algorithm)),
        x_label,
        "error (%)",
        &series,
    )
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, var.sqrt())
}

fn summary(cfg: &RunConfig, execs: &[Execution], truth: [f64; 3]) -> String {
    let mut s = String::new();
    let _ = write!(s, "algorithm {}", value_name(cfg.algorithm));
    if uses_sampler(cfg.algorithm) {
        let _ = write!(
            s,
            ", engine {}, {} reads",
            value_name(cfg.engine),
            cfg.reads_or_default()
        );
    }
    let _ = writeln!(s, ", seed {}", cfg.seed);
    if execs.len() == 1 {
        let ex = &execs[0];
        let conv = ex
            .state
            .converged_after
            .map_or("not converged".to_string(), |c| {
                format!("converged after {c}")
            });
        let _ = if uses_merged(cfg.algorithm) {
            writeln!(
                s,
                "{} reads, emulated QPU time {:.1} us",
                ex.state.history.len(),
                ex.qpu_total
            )
        } else {
            writeln!(
                s,
                "{} iterations ({conv}), emulated QPU time {:.1} us",
                ex.state.iteration, ex.qpu_total
            )
        };
        let _ = writeln!(
            s,
            "{:<10}{:>14}{:>14}{:>12}",
            "parameter", "true", "estimate", "error %"
        );
        let p = ex.state.params();
        let err = errors_pct(p, truth);
        for i in 0..3 {
            let _ = writeln!(
                s,
                "{:<10}{:>14.6}{:>14.6}{:>12.3}",
                format!("x{}", i + 1),
                truth[i],
                p[i],
                err[i]
            );
        }
    } else {
        let _ = writeln!(s, "{} executions", execs.len());
        let _ = writeln!(
            s,
            "{:<10}{:>12}{:>12}{:>12}{:>12}{:>12}{:>14}",
            "parameter", "true", "mean", "std", "min", "max", "mean error %"
        );
        for i in 0..3 {
            let v: Vec<f64> = execs.iter().map(|e| e.state.params()[i]).collect();
            let errs: Vec<f64> = execs
                .iter()
                .map(|e| errors_pct(e.state.params(), truth)[i])
                .collect();
            let (m, sd) = mean_std(&v);
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let _ = writeln!(
                s,
                "{:<10}{:>12.5}{:>12.5}{:>12.5}{:>12.5}{:>12.5}{:>14.3}",
                format!("x{}", i + 1),
                truth[i],
                m,
                sd,
                lo,
                hi,
                mean_std(&errs).0
            );
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuadMethod {
    /// NTR for negative terms, PTR for positive ones.
    Full,
    /// Repeated pair substitution with a penalty.
    Substitution,
    /// Excludable local configuration of one term.
    Elc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratizeOptions {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub method: QuadMethod,
    pub gamma: Option<f64>,
    pub elc_vars: Vec<usize>,
    pub elc_assign: Vec<u8>,
    pub verify: bool,
}

fn bits(s: &BinaryState) -> String {
    s.as_slice().iter().map(|b| char::from(b'0' + b)).collect()
}

pub fn quadratize(cfg: &RunConfig, opts: &QuadratizeOptions) -> Result<Report> {
    let text = std::fs::read_to_string(&opts.input).map_err(|e| CliError::io(&opts.input, e))?;
    let p = parse_poly::<f64>(&text)?;
    let n = p.num_vars();
    let (reduced, aux_report, warnings, result) = match opts.method {
        QuadMethod::Full | QuadMethod::Substitution => {
            let r = match opts.method {
                QuadMethod::Full => quadratize_full(&p),
                _ => quadratize_by_substitution(&p, opts.gamma)?,
            };
            (
                r.poly.clone(),
                r.alloc.report(),
                r.warnings.clone(),
                Some(r),
            )
        }
        QuadMethod::Elc => {
            if opts.elc_vars.is_empty() {
                return Err(CliError::usage("elc needs --elc-vars and --elc-assign"));
            }
            let r = elc_reduce(&p, &opts.elc_vars, &opts.elc_assign)?;
            let report = format!("# {n} original variables, 0 auxiliaries\n");
            (r, report, Vec::new(), None)
        }
    };
    let mut verdict = String::new();
    if opts.verify {
        if n > VERIFY_MAX_VARS {
            return Err(annealdp::Error::Capacity {
                what: "variables for --verify",
                n,
                limit: VERIFY_MAX_VARS,
            }
            .into());
        }
        match &result {
            Some(r) => check(&p, r)?,
            None => {
                if !preserves_ground_state(&p, &reduced, n)? {
                    return Err(CliError::Verification(
                        "the reduced polynomial changes the ground state".into(),
                    ));
                }
            }
        }
        verdict = "equivalent\n".into();
    }

    let stem = opts
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "poly".into());
    let out = match &opts.output {
        Some(o) => o.clone(),
        None => {
            ensure_dir(&cfg.out_dir)?;
            cfg.out_dir.join(format!("{stem}.quad.txt"))
        }
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    let mut report = aux_report;
    for w in &warnings {
        let _ = writeln!(report, "# warning: {w}");
    }
    let report_path = out.with_extension("aux.txt");
    let files = vec![
        write_text(&out, &poly_to_text(&reduced))?,
        write_text(&report_path, &report)?,
    ];
    let text = format!(
        "{} -> {} (degree {} -> {}, {} -> {} variables)\n{report}{verdict}",
        opts.input.display(),
        out.display(),
        p.degree(),
        reduced.degree(),
        n,
        reduced.num_vars()
    );
    Ok(Report { text, files })
}

fn check(p: &annealdp::Pbf, r: &ReductionResult<f64>) -> Result<()> {
    match check_exact(p, r)? {
        None => Ok(()),
        Some(c) => Err(CliError::Verification(format!(
            "state {} has energy {} but the reduced minimum is {}",
            bits(&c.state),
            c.original,
            c.reduced
        ))),
    }
}

/// The two cyclic-anneal problems at one and two cycles.
pub fn cycles(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let reads = cfg.reads.unwrap_or(1000);
    let sampler = cfg.engine.sampler();
    let mut rows = Vec::new();
    let mut text = format!(
        "engine {}{}\n{:<12}{:>4}{:>8}{:>10}{:>10}{:>11}{:>14}\n",
        value_name(cfg.engine),
        if cfg.engine == Engine::Greedy {
            String::new()
        } else {
            format!(", {reads} reads, seed {}", cfg.seed)
        },
        "hamiltonian",
        "C",
        "state",
        "energy",
        "ground",
        "correct",
        "ground share"
    );
    for problem in [CycleProblem::h_s(), CycleProblem::h_c()] {
        let (ground, ground_states) = problem.ground();
        for c in [1usize, 2] {
            let (state, share) = if cfg.engine == Engine::Greedy {
                let s = problem.greedy(c)?;
                let hit = ground_states.contains(&s);
                (s, if hit { 1.0 } else { 0.0 })
            } else {
                let schedule = AnnealSchedule::cyclic(
                    problem.group_of.clone(),
                    2,
                    c,
                    cfg.reversal,
                    cfg.anneal_time,
                )?;
                let mut req = SamplerRequest::new(reads, schedule, cfg.seed)
                    .with_initial(InitialState::Single(BinaryState::zeros(problem.num_vars())));
                req.timing = cfg.timing();
                let set = sampler.sample(Target::Polynomial(&problem.poly), &req)?;
                let top = set
                    .records
                    .iter()
                    .fold(
                        None::<&annealdp::anneal::SampleRecord>,
                        |best, r| match best {
                            Some(b) if b.occurrences >= r.occurrences => Some(b),
                            _ => Some(r),
                        },
                    )
                    .expect("at least one read");
                let share = ground_states.iter().map(|g| set.frequency(g)).sum();
                (top.state.clone(), share)
            };
            let energy = problem.energy(&state);
            let correct = ground_states.contains(&state);
            let verdict = if correct { "correct" } else { "incorrect" };
            let _ = writeln!(
                text,
                "{:<12}{:>4}{:>8}{:>10}{:>10}{:>11}{:>14.3}",
                problem.name,
                c,
                bits(&state),
                energy,
                ground,
                verdict,
                share
            );
            rows.push(vec![
                problem.name.to_string(),
                c.to_string(),
                bits(&state),
                f(energy),
                f(ground),
                verdict.to_string(),
                f(share),
            ]);
        }
    }
    ensure_dir(&cfg.out_dir)?;
    let files = vec![write_csv(
        &cfg.out_dir.join("cycles.csv"),
        &[
            "hamiltonian",
            "cycles",
            "state",
            "energy",
            "ground_energy",
            "result",
            "ground_share",
        ],
        &rows,
    )?];
    Ok(Report { text, files })
}

/// Mean `x1` over the rows of an `estimates.csv` written by `solve`.
pub fn read_x1(path: &Path) -> Result<f64> {
    let mut rdr = csv::Reader::from_path(path)?;
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h == "x1")
        .ok_or_else(|| CliError::usage(format!("{} has no x1 column", path.display())))?;
    let mut v = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let x: f64 = rec
            .get(col)
            .unwrap_or("")
            .parse()
            .map_err(|e| CliError::usage(format!("{}: bad x1: {e}", path.display())))?;
        v.push(x);
    }
    if v.is_empty() {
        return Err(CliError::usage(format!("{} has no rows", path.display())));
    }
    Ok(mean_std(&v).0)
}

/// Where the simulated savings rate comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SavingsSource {
    TrueParameters,
    Estimates(PathBuf),
    Configured,
}

pub fn simulate(cfg: &RunConfig, source: &SavingsSource) -> Result<Report> {
    cfg.validate()?;
    let params = RbcParams::default();
    let x1 = match source {
        SavingsSource::TrueParameters => params.alpha_beta(),
        SavingsSource::Estimates(p) => read_x1(p)?,
        SavingsSource::Configured => cfg.x1.ok_or_else(|| {
            CliError::usage(
                "missing parameters: pass --x1, --from <estimates.csv> or --true-params",
            )
        })?,
    };
    let z = negative_shock_path(&params, cfg.shock_index, cfg.periods)?;
    let k0 = default_initial_capital(&params);
    let paths = simulate_consumption(&params, x1, &z, k0)?;
    ensure_dir(&cfg.out_dir)?;
    let rows: Vec<Vec<String>> = paths
        .rows
        .iter()
        .map(|r| {
            vec![
                r.period.to_string(),
                f(r.z),
                f(r.k_true),
                f(r.c_true),
                f(r.k_hat),
                f(r.c_hat),
                f(r.gap_pct),
            ]
        })
        .collect();
    let csv_path = write_csv(
        &cfg.out_dir.join("consumption.csv"),
        &[
            "period", "z", "k_true", "c_true", "k_hat", "c_hat", "gap_pct",
        ],
        &rows,
    )?;
    let series = [
        Series {
            name: "closed form".into(),
            points: paths
                .rows
                .iter()
                .map(|r| (r.period as f64, r.c_true))
                .collect(),
        },
        Series {
            name: format!("x1 = {x1:.5}"),
            points: paths
                .rows
                .iter()
                .map(|r| (r.period as f64, r.c_hat))
                .collect(),
        },
    ];
    let svg = line_plot(
        "consumption after a negative shock",
        "period",
        "consumption",
        &series,
    );
    let svg_path = write_text(&cfg.out_dir.join("consumption.svg"), &svg)?;
    let text = format!(
        "x1 = {x1}, shock at z node {}, {} periods\nmax consumption gap {:.4}% in period {}\n",
        cfg.shock_index,
        cfg.periods,
        paths.max_gap_pct(),
        paths.argmax_period().unwrap_or(0)
    );
    Ok(Report {
        text,
        files: vec![csv_path, svg_path],
    })
}

/// Wall-clock timings of the main pipeline stages. Only this command's
/// output depends on the machine.
pub fn bench(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let params = RbcParams::default();
    let grid = CollocationGrid::new(&params, cfg.k_nodes)?;
    let mut rows: Vec<(String, f64, f64)> = Vec::new();
    let timed = |f: &mut dyn FnMut() -> Result<f64>| -> Result<(f64, f64)> {
        let t = Instant::now();
        let qpu = f()?;
        Ok((t.elapsed().as_secs_f64() * 1e3, qpu))
    };

    let (ms, _) = timed(&mut || {
        classical_ppi(&params, &grid, cfg.init, cfg.mode())?;
        Ok(0.0)
    })?;
    rows.push(("classical".into(), ms, 0.0));
    let (ms, _) = timed(&mut || {
        combinatorial_ppi(
            &params,
            &grid,
            &cfg.combinatorial(),
            cfg.init,
            IterationMode::Fixed(1),
        )?;
        Ok(0.0)
    })?;
    rows.push(("combinatorial sweep".into(), ms, 0.0));
    let mut problem = None;
    let (ms, _) = timed(&mut || {
        let m = MergedProblem::build(&params, &grid, cfg.merged())?;
        m.quadratize()?;
        problem = Some(m);
        Ok(0.0)
    })?;
    rows.push(("merged build and quadratize".into(), ms, 0.0));
    let m = problem.expect("built above");
    let sampler = cfg.engine.sampler();
    let (ms, qpu) = timed(&mut || {
        let r = one_shot_ppi(
            &m,
            sampler.as_ref(),
            &OneShotConfig {
                reads: cfg.reads.unwrap_or(50),
                cycles: cfg.cycles,
                segment_time: cfg.anneal_time,
                reversal: cfg.reversal,
                keep_fraction: cfg.keep_fraction,
                seed: cfg.seed,
                timing: cfg.timing(),
            },
        )?;
        Ok(r.run.timing.total)
    })?;
    rows.push((format!("one-shot ({})", value_name(cfg.engine)), ms, qpu));

    ensure_dir(&cfg.out_dir)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(t, ms, q)| vec![t.clone(), f(*ms), f(*q)])
        .collect();
    let path = write_csv(
        &cfg.out_dir.join("bench.csv"),
        &["task", "wall_ms", "emulated_qpu_us"],
        &csv_rows,
    )?;
    let mut text = format!("{:<32}{:>12}{:>18}\n", "task", "wall ms", "emulated QPU us");
    for (t, ms, q) in &rows {
        let _ = writeln!(text, "{t:<32}{ms:>12.1}{q:>18.1}");
    }
    Ok(Report {
        text,
        files: vec![path],
    })
}
