use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use annealdp::pbf::io::parse_poly;
use annealdp::pbf::Polynomial;
use annealdp::rbc::{true_parameters, RbcParams};
use annealdp_cli::config::{Algorithm, Engine};
use annealdp_cli::Cli;
use clap::Parser;
use tempfile::TempDir;

fn annealdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annealdp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn dir_arg(d: &Path) -> String {
    d.to_string_lossy().into_owned()
}

/// Header plus rows of a CSV artifact.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn precedence_is_flag_over_file_over_default() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(
        &cfg,
        "algorithm = hybrid\nreads = 7\nseed = 3\nengine = heuristic\n",
    )
    .unwrap();
    let path = dir_arg(&cfg);
    let cli =
        Cli::try_parse_from(["annealdp", "--config", &path, "solve", "--reads", "9"]).unwrap();
    let c = cli.resolve().unwrap();
    assert_eq!(c.algorithm, Algorithm::Hybrid);
    assert_eq!(c.reads, Some(9));
    assert_eq!(c.seed, 3);
    assert_eq!(c.engine, Engine::Heuristic);
    assert_eq!(c.cycles, 3);

    let cli = Cli::try_parse_from([
        "annealdp", "solve", "--config", &path, "--seed", "5", "--engine", "greedy", "--set",
        "cycles=4",
    ])
    .unwrap();
    let c = cli.resolve().unwrap();
    assert_eq!((c.seed, c.engine, c.cycles), (5, Engine::Greedy, 4));
}

#[test]
fn usage_errors_exit_2_and_name_the_field() {
    let tmp = TempDir::new().unwrap();
    let out = dir_arg(tmp.path());
    let o = annealdp(&["solve", "--set", "bogus=1", "--out-dir", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));
    let o = annealdp(&["solve", "--keep-fraction", "1.5", "--out-dir", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("keep_fraction"));
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "reads = 10\nreads: 3\n").unwrap();
    let o = annealdp(&["solve", "--config", &dir_arg(&cfg), "--out-dir", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));
    let o = annealdp(&["solve", "--engine", "qpu"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn combinatorial_solve_writes_consistent_artifacts() {
    let tmp = TempDir::new().unwrap();
    let out = dir_arg(tmp.path());
    let o = annealdp(&["solve", "--algorithm", "combinatorial", "--out-dir", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("x2"));

    let truth = true_parameters(&RbcParams::default()).unwrap();
    let (h, rows) = read_csv(&tmp.path().join("iterations.csv"));
    assert!(!rows.is_empty());
    for r in &rows {
        for i in 0..3 {
            let x: f64 = r[col(&h, &format!("x{}", i + 1))].parse().unwrap();
            let e: f64 = r[col(&h, &format!("err_x{}_pct", i + 1))].parse().unwrap();
            let want = ((x - truth[i]) / truth[i]).abs() * 100.0;
            assert!((e - want).abs() < 1e-9);
        }
        let loss: f64 = r[col(&h, "loss")].parse().unwrap();
        assert!(loss >= 0.0);
    }
    let (h, est) = read_csv(&tmp.path().join("estimates.csv"));
    assert_eq!(est.len(), 1);
    let x1: f64 = est[0][col(&h, "x1")].parse().unwrap();
    assert!(x1 > 0.0 && x1 < 1.0);
    // Errors stay in the band reported for the combinatorial run.
    for (i, hi) in [(1, 2.0), (2, 0.5), (3, 2.5)] {
        let e: f64 = est[0][col(&h, &format!("err_x{i}_pct"))].parse().unwrap();
        assert!(e < hi, "x{i}: {e}");
    }
    let svg = fs::read_to_string(tmp.path().join("errors.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let cfg = fs::read_to_string(tmp.path().join("config.txt")).unwrap();
    assert!(cfg.contains("algorithm = combinatorial"));
}

#[test]
fn runs_are_reproducible_from_config_and_seed() {
    for engine in ["greedy", "heuristic"] {
        let a = TempDir::new().unwrap();
        let b = TempDir::new().unwrap();
        let args = |d: &TempDir| {
            vec![
                "solve".to_string(),
                "--algorithm".into(),
                "one-shot".into(),
                "--reads".into(),
                "12".into(),
                "--executions".into(),
                "2".into(),
                "--seed".into(),
                "21".into(),
                "--engine".into(),
                engine.into(),
                "--out-dir".into(),
                dir_arg(d.path()),
            ]
        };
        for d in [&a, &b] {
            let v = args(d);
            let o = annealdp(&v.iter().map(String::as_str).collect::<Vec<_>>());
            assert!(o.status.success(), "{}", stderr(&o));
        }
        let mut names: Vec<_> = fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(names.len() >= 7, "{names:?}");
        for n in names {
            if n == "config.txt" {
                continue;
            }
            let x = fs::read(a.path().join(&n)).unwrap();
            let y = fs::read(b.path().join(&n)).unwrap();
            assert!(x == y, "{engine}: {n:?} differs");
        }

        // The written config alone reproduces the run.
        let c = TempDir::new().unwrap();
        let cfg = a.path().join("config.txt");
        let o = annealdp(&[
            "solve",
            "--config",
            &dir_arg(&cfg),
            "--out-dir",
            &dir_arg(c.path()),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        for n in ["estimates.csv", "reads.csv", "iterations.csv"] {
            assert_eq!(
                fs::read(a.path().join(n)).unwrap(),
                fs::read(c.path().join(n)).unwrap(),
                "{engine}: {n}"
            );
        }
    }
}

#[test]
fn one_shot_artifacts_reparse() {
    let tmp = TempDir::new().unwrap();
    let out = dir_arg(tmp.path());
    let o = annealdp(&[
        "solve",
        "--algorithm",
        "5",
        "--reads",
        "20",
        "--out-dir",
        &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&tmp.path().join("reads.csv"));
    assert_eq!(rows.len(), 20);
    for r in &rows {
        let u: f64 = r[col(&h, "unadjusted_loss")].parse().unwrap();
        assert!(u.is_finite() && u >= 0.0);
    }
    let (h, sched) = read_csv(&tmp.path().join("schedule.csv"));
    assert_eq!(h, ["time_us", "variable_group", "anneal_fraction"]);
    for r in &sched {
        let s: f64 = r[2].parse().unwrap();
        let g: usize = r[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&s) && g < 2);
    }
    let qubo = fs::read_to_string(tmp.path().join("merged.qubo")).unwrap();
    let model = annealdp::bqm::io::parse_model::<f64>(&qubo).unwrap();
    assert!(model.num_vars() > 23);
}

#[test]
fn statevector_on_the_merged_program_trips_the_capacity_guard() {
    let tmp = TempDir::new().unwrap();
    let o = annealdp(&[
        "solve",
        "--algorithm",
        "one-shot",
        "--engine",
        "statevector",
        "--reads",
        "2",
        "--out-dir",
        &dir_arg(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn cycles_greedy_rows() {
    let tmp = TempDir::new().unwrap();
    let o = annealdp(&["cycles", "--out-dir", &dir_arg(tmp.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&tmp.path().join("cycles.csv"));
    let got: Vec<(String, String, String)> = rows
        .iter()
        .map(|r| {
            (
                r[col(&h, "hamiltonian")].clone(),
                r[col(&h, "cycles")].clone(),
                r[col(&h, "result")].clone(),
            )
        })
        .collect();
    let want = [
        ("H_s", "1", "incorrect"),
        ("H_s", "2", "correct"),
        ("H_c", "1", "incorrect"),
        ("H_c", "2", "correct"),
    ];
    for (g, w) in got.iter().zip(want) {
        assert_eq!((g.0.as_str(), g.1.as_str(), g.2.as_str()), w);
    }
    // The single-cycle H_s anneal stops in the trap state.
    assert_eq!(rows[0][col(&h, "energy")], "-1");
}

#[test]
fn cycles_statevector_second_cycle_helps() {
    let tmp = TempDir::new().unwrap();
    let o = annealdp(&[
        "cycles",
        "--engine",
        "statevector",
        "--reads",
        "1000",
        "--out-dir",
        &dir_arg(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&tmp.path().join("cycles.csv"));
    let share = |r: &Vec<String>| -> f64 { r[col(&h, "ground_share")].parse().unwrap() };
    assert!(share(&rows[1]) > share(&rows[0]));
    assert!(share(&rows[3]) > share(&rows[2]));
}

fn write_poly(dir: &Path, name: &str, p: &Polynomial<f64>) -> String {
    let path = dir.join(name);
    fs::write(&path, annealdp::pbf::io::poly_to_text(p)).unwrap();
    dir_arg(&path)
}

#[test]
fn quadratize_elc_example_reproduces_the_reduced_form() {
    let tmp = TempDir::new().unwrap();
    let src = Polynomial::from_terms([
        (vec![1, 2], 1.0),
        (vec![2, 3], 1.0),
        (vec![3, 4], 1.0),
        (vec![1, 2, 3], -4.0),
    ]);
    let input = write_poly(tmp.path(), "elc.txt", &src);
    let output = dir_arg(&tmp.path().join("elc.out"));
    let o = annealdp(&[
        "quadratize",
        &input,
        "--method",
        "elc",
        "--elc-vars",
        "1,2,3",
        "--elc-assign",
        "1,0,0",
        "--verify",
        "-o",
        &output,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("equivalent"));
    let got = parse_poly::<f64>(&fs::read_to_string(&output).unwrap()).unwrap();
    let printed = Polynomial::from_terms([
        (vec![1, 2], -3.0),
        (vec![2, 3], 1.0),
        (vec![3, 4], 1.0),
        (vec![1], 4.0),
        (vec![1, 3], -4.0),
    ]);
    assert_eq!(got, printed);
}

#[test]
fn quadratic_input_round_trips() {
    let tmp = TempDir::new().unwrap();
    let text = "# already quadratic\n-1.5 0 1\n2 2\n0.25\n3 1 2\n";
    let input = tmp.path().join("q.txt");
    fs::write(&input, text).unwrap();
    let output = tmp.path().join("q.out");
    let o = annealdp(&["quadratize", &dir_arg(&input), "-o", &dir_arg(&output)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let canonical = annealdp::pbf::io::poly_to_text(&parse_poly::<f64>(text).unwrap());
    assert_eq!(fs::read_to_string(&output).unwrap(), canonical);
    assert!(fs::read_to_string(tmp.path().join("q.aux.txt"))
        .unwrap()
        .contains("0 auxiliaries"));
}

#[test]
fn random_quartic_verifies_with_both_methods() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(44);
    let tmp = TempDir::new().unwrap();
    for k in 0..5 {
        let terms: Vec<(Vec<usize>, f64)> = (0..8)
            .map(|_| {
                let deg = rng.gen_range(1..=4);
                let mut vars: Vec<usize> = (0..8).collect();
                for i in 0..deg {
                    let j = rng.gen_range(i..8);
                    vars.swap(i, j);
                }
                vars.truncate(deg);
                (vars, rng.gen_range(-5.0..5.0))
            })
            .collect();
        let p = Polynomial::from_terms(terms);
        let input = write_poly(tmp.path(), &format!("p{k}.txt"), &p);
        for method in ["full", "substitution"] {
            let o = annealdp(&[
                "quadratize",
                &input,
                "--method",
                method,
                "--verify",
                "--out-dir",
                &dir_arg(tmp.path()),
            ]);
            assert!(o.status.success(), "{method}: {}", stderr(&o));
            assert!(stdout(&o).contains("equivalent"));
            let out = tmp.path().join(format!("p{k}.quad.txt"));
            let q = parse_poly::<f64>(&fs::read_to_string(out).unwrap()).unwrap();
            assert!(q.degree() <= 2);
        }
    }
}

#[test]
fn quadratize_errors() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.txt");
    fs::write(&bad, "1 0 1\n2 x\n").unwrap();
    let o = annealdp(&[
        "quadratize",
        &dir_arg(&bad),
        "--out-dir",
        &dir_arg(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let big = Polynomial::from_terms([(vec![0, 5, 13], 1.0)]);
    let input = write_poly(tmp.path(), "big.txt", &big);
    let o = annealdp(&[
        "quadratize",
        &input,
        "--verify",
        "--out-dir",
        &dir_arg(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(4));

    // A penalty too weak to enforce the substitution fails verification.
    let p = Polynomial::from_terms([(vec![0, 1, 2], -5.0), (vec![0, 1], 1.0)]);
    let input = write_poly(tmp.path(), "weak.txt", &p);
    let o = annealdp(&[
        "quadratize",
        &input,
        "--method",
        "substitution",
        "--gamma",
        "0.01",
        "--verify",
        "--out-dir",
        &dir_arg(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("state"));
}

#[test]
fn simulate_paths() {
    let tmp = TempDir::new().unwrap();
    let out = dir_arg(tmp.path());
    let o = annealdp(&["simulate", "--true-params", "--out-dir", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = read_csv(&tmp.path().join("consumption.csv"));
    assert_eq!(rows.len(), 10);
    for r in &rows {
        assert_eq!(r[col(&h, "c_true")], r[col(&h, "c_hat")]);
        assert_eq!(r[col(&h, "gap_pct")], "0");
    }
    let lowest = RbcParams::default().z_grid[0];
    assert_eq!(rows[0][col(&h, "z")].parse::<f64>().unwrap(), lowest);
    assert!(tmp.path().join("consumption.svg").exists());

    let o = annealdp(&["simulate", "--out-dir", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing parameters"));

    let s = TempDir::new().unwrap();
    let o = annealdp(&[
        "solve",
        "--algorithm",
        "one-shot",
        "--reads",
        "20",
        "--out-dir",
        &dir_arg(s.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let est = dir_arg(&s.path().join("estimates.csv"));
    let o = annealdp(&["simulate", "--from", &est, "--out-dir", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("max consumption gap"));
    let (h, rows) = read_csv(&tmp.path().join("consumption.csv"));
    let max_gap = rows
        .iter()
        .map(|r| r[col(&h, "gap_pct")].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(max_gap > 0.0 && max_gap < 1.0, "{max_gap}");
}

#[test]
fn classical_from_truth_stays_close() {
    let tmp = TempDir::new().unwrap();
    let o = annealdp(&[
        "solve",
        "--algorithm",
        "classical",
        "--init-true",
        "--out-dir",
        &dir_arg(tmp.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, est) = read_csv(&tmp.path().join("estimates.csv"));
    for i in 1..=3 {
        let e: f64 = est[0][col(&h, &format!("err_x{i}_pct"))].parse().unwrap();
        assert!(e < 2.0, "x{i}: {e}");
    }
}
