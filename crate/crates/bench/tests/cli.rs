use std::fs;
use std::path::Path;

use mas_bench::cli::{run_cli, EXIT_CONFIG, EXIT_OK, EXIT_SCHEMA, EXIT_USAGE};
use mas_bench::format::read_trace;

fn mas(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mas").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const TOY: &str = r#"
epochs = 30
lr = 1e-3
[problem]
kind = "factored_surface"
[[runs]]
optimizer = "sgd"
[[runs]]
optimizer = "mas"
"#;

#[test]
fn run_writes_traces_summary_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "toy.toml", TOY);
    let out = dir.path().join("out");
    let (code, stdout, _) = mas(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("wrote 2 traces"));
    for f in [
        "summary.csv",
        "summary.txt",
        "config.toml",
        "traces/00-sgd-seed0.csv",
        "traces/01-mas-0.5-0.5-seed0.csv",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let trace = read_trace(fs::File::open(out.join("traces/00-sgd-seed0.csv")).unwrap()).unwrap();
    assert_eq!(trace.records.len(), 30);
    assert_eq!(trace.meta("label"), Some("SGD"));

    // The resolved config reruns to the same files.
    let again = dir.path().join("again");
    let resolved = out.join("config.toml");
    let (code, _, _) = mas(&[
        "run",
        "--config",
        resolved.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        fs::read(out.join("traces/01-mas-0.5-0.5-seed0.csv")).unwrap(),
        fs::read(again.join("traces/01-mas-0.5-0.5-seed0.csv")).unwrap()
    );
}

#[test]
fn config_errors_exit_three_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (body, needle) in [
        (
            TOY.replace("lr = 1e-3", "learning_rate = 1e-3"),
            "learning_rate",
        ),
        (
            TOY.replace("optimizer = \"mas\"", "optimizer = \"mas\"\nlamda_s = 0.5"),
            "lamda_s",
        ),
        (
            TOY.replace("optimizer = \"mas\"", "optimizer = \"mas\"\nlambda_s = 0.9"),
            "lambda_s",
        ),
        (TOY.replace("epochs = 30", "epochs = \"many\""), "epochs"),
        ("epochs = 3\n[problem\n".to_string(), "problem"),
    ] {
        let cfg = write_config(dir.path(), "bad.toml", &body);
        let (code, _, stderr) = mas(&[
            "run",
            "--config",
            &cfg,
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_CONFIG, "{body}");
        assert!(stderr.contains(needle), "{stderr}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mas(&[]).0, EXIT_USAGE);
    assert_eq!(mas(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(mas(&["run"]).0, EXIT_USAGE);
    assert_eq!(
        mas(&["run", "--config", "/definitely/not/here.toml"]).0,
        EXIT_USAGE
    );
    assert_eq!(mas(&["plot", "--out", "x.svg"]).0, EXIT_USAGE);
    let (code, stdout, _) = mas(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("compare"));
}

#[test]
fn compare_and_plot_read_what_run_wrote() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "toy.toml", TOY);
    let out = dir.path().join("out");
    mas(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    let a = out.join("traces/00-sgd-seed0.csv");
    let b = out.join("traces/01-mas-0.5-0.5-seed0.csv");
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());

    let (code, stdout, _) = mas(&["compare", a, b, "--thresholds", "0.05,0.01"]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("loss <= 0.05:"));
    assert!(stdout.contains("final loss:  1. MAS 0.5/0.5"));

    let svg = dir.path().join("p.svg");
    let (code, _, _) = mas(&["plot", a, b, "--out", svg.to_str().unwrap(), "--log-loss"]);
    assert_eq!(code, EXIT_OK);
    assert!(fs::metadata(&svg).unwrap().len() > 0);

    let garbage = dir.path().join("garbage.csv");
    fs::write(&garbage, "a,b\n1,2\n").unwrap();
    assert_eq!(
        mas(&["compare", a, garbage.to_str().unwrap()]).0,
        EXIT_USAGE
    );
}

#[test]
fn plot_rejects_mixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let two = dir.path().join("two.csv");
    let none = dir.path().join("none.csv");
    fs::write(
        &two,
        "step,epoch,loss,step_norm,effective_lr,p0,p1\n1,1,1,0,0,0,0\n",
    )
    .unwrap();
    fs::write(&none, "step,epoch,loss,step_norm,effective_lr\n1,1,1,0,0\n").unwrap();
    let (code, _, stderr) = mas(&[
        "plot",
        two.to_str().unwrap(),
        none.to_str().unwrap(),
        "--out",
        dir.path().join("x.svg").to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_SCHEMA);
    assert!(stderr.contains("columns"));
}
