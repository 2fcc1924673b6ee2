//! Behavior of the command-line front end: exit codes, output formats, and
//! the thin-adapter property (CLI numbers are exactly the library's).

use alphafrac::numeric::{alpha_deriv_limit, Alpha, LimitConfig};
use alphafrac::theorems::find_mvt_point;
use alphafrac::{alpha_integral, parse};
use alphafrac_cli::run;

fn run_argv(argv: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(argv.iter().copied(), &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn deriv_is_a_thin_adapter() {
    let (code, out, _) = run_argv(&[
        "alphafrac", "deriv", "--expr", "t^2", "--alpha", "0.5", "--at", "4",
    ]);
    assert_eq!(code, 0);
    let value: f64 = out.split(" ± ").next().unwrap().trim().parse().unwrap();

    let f = parse::<f64>("t^2").unwrap();
    let alpha = Alpha::new(0, 0.5).unwrap();
    let direct = alpha_deriv_limit(&f, 4.0, alpha, &LimitConfig::default()).unwrap();
    assert_eq!(value.to_bits(), direct.value.to_bits());
    assert!((value - 16.0).abs() <= 1e-6 * 16.0);
}

#[test]
fn integ_is_a_thin_adapter() {
    let (code, out, _) = run_argv(&[
        "alphafrac", "integ", "--expr", "1", "--alpha", "0.5", "--a", "0", "--b", "4",
    ]);
    assert_eq!(code, 0);
    let value: f64 = out.split(" ± ").next().unwrap().trim().parse().unwrap();
    let f = parse::<f64>("1").unwrap();
    let direct = alpha_integral(&f, 0.0, 4.0, 0.5, 1e-10).unwrap();
    assert_eq!(value.to_bits(), direct.value.to_bits());
    assert!((value - 4.0).abs() <= 1e-8);
}

#[test]
fn mvt_is_a_thin_adapter() {
    let (code, out, _) = run_argv(&[
        "alphafrac", "mvt", "--expr", "t", "--alpha", "0.5", "--a", "1", "--b", "4",
        "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let c = v["c"].as_f64().unwrap();
    let f = parse::<f64>("t").unwrap();
    let direct = find_mvt_point(&f, 1.0, 4.0, 0.5, &LimitConfig::default()).unwrap();
    assert_eq!(c.to_bits(), direct.c.to_bits());
    assert!((c - 2.25).abs() <= 1e-8);
}

#[test]
fn at_zero_goes_through_the_extension() {
    let (code, out, _) = run_argv(&[
        "alphafrac", "deriv", "--expr", "3*t^(1/3)", "--alpha", "0.33333333333333333",
        "--at", "0",
    ]);
    assert_eq!(code, 0, "{out}");
    let value: f64 = out.split(" ± ").next().unwrap().trim().parse().unwrap();
    assert!((value - 1.0).abs() <= 1e-4, "{value}");
}

#[test]
fn usage_errors_exit_2() {
    let (code, _, err) = run_argv(&["alphafrac", "deriv", "--expr", "t^2"]);
    assert_eq!(code, 2);
    assert!(err.contains("--alpha"), "{err}");

    let (code, _, _) = run_argv(&["alphafrac", "frobnicate"]);
    assert_eq!(code, 2);

    let (code, _, err) = run_argv(&[
        "alphafrac", "deriv", "--expr", "t", "--alpha", "0.5", "--at", "1", "--k", "x",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("inf"), "{err}");

    // semantic flag conflicts are usage errors too
    let (code, _, err) = run_argv(&[
        "alphafrac", "deriv", "--expr", "t", "--alpha", "0.5", "--at", "0", "--k", "2",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("--k"), "{err}");

    let (code, _, _) = run_argv(&[
        "alphafrac", "plot", "--expr", "t", "--alpha", "0.5", "--from", "1", "--to", "2",
        "--n", "0",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn help_exits_0() {
    let (code, out, _) = run_argv(&["alphafrac", "--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("deriv"));
    assert!(out.contains("plot"));
}

#[test]
fn numerical_failures_exit_1_with_kind_prefix() {
    // grammar rejection
    let (code, _, err) = run_argv(&[
        "alphafrac", "deriv", "--expr", "2**t", "--alpha", "0.5", "--at", "1",
    ]);
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR Parse: "), "{err}");

    // k = 0 is not a derivative
    let (code, _, err) = run_argv(&[
        "alphafrac", "deriv", "--expr", "t", "--alpha", "0.5", "--at", "1", "--k", "0",
    ]);
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR InvalidK: "), "{err}");

    // non-integrable endpoint
    let (code, _, err) = run_argv(&[
        "alphafrac", "integ", "--expr", "1", "--alpha", "-0.5", "--a", "0", "--b", "1",
    ]);
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR Singularity: "), "{err}");

    // Rolle hypothesis failure
    let (code, _, err) = run_argv(&[
        "alphafrac", "rolle", "--expr", "t", "--alpha", "0.5", "--a", "1", "--b", "2",
    ]);
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR Precondition: "), "{err}");

    // non-convergence at a cusp
    let (code, _, err) = run_argv(&[
        "alphafrac", "deriv", "--expr", "sqrt(abs(t-1))", "--alpha", "0.5", "--at", "1",
    ]);
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR NonConvergence: "), "{err}");
}

#[test]
fn plot_csv_is_deterministic() {
    let argv = [
        "alphafrac", "plot", "--expr", "sin(t)", "--alpha", "0.5", "--from", "0.5",
        "--to", "2", "--n", "10", "--format", "csv",
    ];
    let (c1, out1, _) = run_argv(&argv);
    let (c2, out2, _) = run_argv(&argv);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(out1, out2, "CSV output must be bit-identical across runs");
    assert!(out1.starts_with("t,deriv_numeric,deriv_closed,abs_diff\n"));
    assert_eq!(out1.lines().count(), 11);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("plot_out.csv");
    let argv_file = [
        "alphafrac", "plot", "--expr", "t^2", "--alpha", "0.5", "--from", "0.5",
        "--to", "1", "--n", "3", "--format", "csv", "--out", path.to_str().unwrap(),
    ];
    let (code, out, _) = run_argv(&argv_file);
    assert_eq!(code, 0);
    assert!(out.is_empty(), "with --out nothing goes to stdout");

    let argv_stdout = &argv_file[..argv_file.len() - 2];
    let (_, out2, _) = run_argv(argv_stdout);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), out2);
}

#[test]
fn json_outputs_are_well_formed() {
    let (code, out, _) = run_argv(&[
        "alphafrac", "deriv", "--expr", "sin(t)", "--alpha", "0.5", "--at", "1",
        "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in [
        "value",
        "err_estimate",
        "levels_used",
        "converged",
        "continuity_residual",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["converged"].as_bool().unwrap());
}

#[test]
fn check_command_reports_small_residual() {
    let (code, out, _) = run_argv(&[
        "alphafrac", "check", "--expr", "cos(t)", "--alpha", "0.5", "--a", "1", "--at", "2",
    ]);
    assert_eq!(code, 0);
    let residual: f64 = out.trim().parse().unwrap();
    assert!(residual <= 1e-5, "{residual}");
}

#[test]
fn table_rules_csv_has_rows() {
    let (code, out, _) = run_argv(&[
        "alphafrac", "table", "--alpha", "0.5", "--which", "rules", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("pair,identity,alpha,t,lhs,rhs,residual,flagged\n"));
    // 8 pairs × 5 grid points × up to 4 identities
    assert!(out.lines().count() > 100, "{}", out.lines().count());
    assert!(!out.contains(",true\n"), "no row should be flagged");
}

#[test]
fn table_theorem4_text_passes() {
    let (code, out, _) = run_argv(&[
        "alphafrac", "table", "--alpha", "0.3", "--which", "theorem4", "--a", "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6);
    assert!(out.lines().all(|l| l.ends_with("[pass]")), "{out}");
}

#[test]
fn table_theorem5_has_three_passing_rows() {
    let (code, out, _) = run_argv(&[
        "alphafrac", "table", "--alpha", "0.5", "--which", "theorem5", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        let residual: f64 = cols[1].parse().unwrap();
        assert!(residual <= 1e-6, "{row}");
        assert_eq!(cols[2], "true");
    }
}
