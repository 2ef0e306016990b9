use std::path::Path;
use std::process::{Command, Output};

fn wsf_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsf-lab"))
        .args(args)
        .env_remove("WSF_LAB_WORKERS")
        .output()
        .expect("run wsf-lab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn resistance_of_a_wired_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "tri.txt", "a b 2\nb c\nc a\n@wired c\n");
    let o = wsf_lab(&["resistance", "--graph", &g, "--source-set", "a", "--wired"]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("er,ec,method,iterations,residual"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    // EC(a, c) = 1 + 1 / (1/2 + 1) = 5/3
    let ec: f64 = row[1].parse().unwrap();
    assert!((ec - 5.0 / 3.0).abs() < 1e-12, "{out}");
    assert_eq!(row[2], "direct");
}

#[test]
fn profile_table_feeds_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "path.txt", "a b\nb c\n");
    let table = dir.path().join("kappa.csv");
    let o = wsf_lab(&[
        "profile",
        "--graph",
        &g,
        "--set",
        "a",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("t,kappa\n"), "{text}");
    let o = wsf_lab(&[
        "profile", "--graph", &g, "--set", "a", "--t-grid", "0.5,1,10",
    ]);
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = wsf_lab(&["bound", "--table", table.to_str().unwrap(), "--s0", "1"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).lines().nth(1).unwrap().contains("converged"));
}

#[test]
fn linear_preset_bound() {
    let o = wsf_lab(&["bound", "--preset", "zd:3", "--s0", "1"]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(
        out.starts_with("s0,value,partial_sum,tail,steps,status,integral_bound\n"),
        "{out}"
    );
}

#[test]
fn sample_reports_one_row_per_draw() {
    let o = wsf_lab(&[
        "sample",
        "--lattice",
        "2,3,wired-with-root",
        "--samples",
        "5",
        "--seed",
        "4",
    ]);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert_eq!(
        out.lines().next(),
        Some("sample,edges,origin_component_size")
    );
    assert_eq!(out.lines().count(), 6);
    // a free tree spans everything
    let o = wsf_lab(&["sample", "--lattice", "2,2,free", "--samples", "2"]);
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",25")));
}

#[test]
fn experiment_config_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tail.csv");
    let cfg = write(
        dir.path(),
        "tail.json",
        &format!(
            r#"{{"experiment":"tail","lattice":{{"dim":3,"radius":8}},"samples":20,"seed":1,"out":{:?}}}"#,
            out.to_str().unwrap()
        ),
    );
    let o = wsf_lab(&["tail", "--config", &cfg, "--workers", "2"]);
    assert!(
        o.status.code() == Some(0) || o.status.code() == Some(1),
        "{o:?}"
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert!(dir.path().join("tail.survival.csv").exists());
    assert!(dir.path().join("tail.summary.json").exists());
    // a config for another experiment is a usage error
    let o = wsf_lab(&["one-end", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let o = wsf_lab(&["verify", "domination"]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).contains("\"passed\": true"));
    let o = wsf_lab(&["verify", "bounds", "--instance", "random:2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        wsf_lab(&["verify", "bounds", "--instance", "nothing"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(wsf_lab(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(
        wsf_lab(&["tail", "--lattice", "3,8"]).status.code(),
        Some(2)
    );
    assert_eq!(
        wsf_lab(&[
            "resistance",
            "--graph",
            "/no/such/file",
            "--source-set",
            "a",
            "--wired"
        ])
        .status
        .code(),
        Some(2)
    );
}
