//! End-to-end tests of the command-line surface: exit codes, golden outputs
//! and byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cohomqe"))
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("cohomqe-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn example_psi_file() -> PathBuf {
    write_temp(
        "psi.sexp",
        "(blocks (w 1) (x 1) (x 1))\n\
         (or (and (=0 (+ w0_0 (* -1 w0_1))) (=0 (+ x0_0 (* -1 x0_1))))\n\
             (and (=0 (+ w0_0 (* -2 w0_1))) (=0 (+ x0_0 (* -2 x0_1))) (=0 (+ x1_0 (* -2 x1_1)))))\n",
    )
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn qe_on_the_worked_example() {
    let psi = example_psi_file();
    let out = bin()
        .args(["qe", "--formula"])
        .arg(&psi)
        .args(["--compute-q", "--omega", "EA"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "1");

    let out2 = bin()
        .args(["qe", "--formula"])
        .arg(&psi)
        .args(["--compute-q", "--omega", "AE"])
        .output()
        .unwrap();
    assert!(out2.status.success());
    assert_eq!(stdout(&out2).trim(), "0");
}

#[test]
fn join_stats_golden_table() {
    let psi = example_psi_file();
    let out_path = std::env::temp_dir().join("cohomqe-cli-tests/joined.sexp");
    let stats_path = std::env::temp_dir().join("cohomqe-cli-tests/stats.json");
    let out = bin()
        .args(["join", "--formula"])
        .arg(&psi)
        .arg("--out")
        .arg(&out_path)
        .arg("--stats")
        .arg(&stats_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&stats_path).unwrap()).unwrap();
    let table = &stats["params"]["table"];
    assert_eq!(table[0]["d"], "1");
    assert_eq!(table[1]["N"], "1");
    assert_eq!(table[1]["d"], "8");
    assert_eq!(table[1]["m"], "7");
    assert_eq!(table[2]["N"], "4");
    assert_eq!(table[2]["d"], "148");
    assert_eq!(table[2]["m"], "35");
    assert_eq!(
        table[2]["msig"],
        serde_json::json!([
            {"count": "1", "dim": "1"},
            {"count": "1", "dim": "7"},
            {"count": "4", "dim": "35"},
        ])
    );
    assert_eq!(stats["stats"]["conjunct_count"], "72");
    assert_eq!(stats["stats"]["variable_count"], "154");
    // the emitted join formula re-parses and has the right block layout
    let joined = std::fs::read_to_string(&out_path).unwrap();
    let parsed = cohomqe::formula::parse_formula(&joined).unwrap();
    assert_eq!(parsed.blocks().dims(), &[1, 7, 35, 35, 35, 35]);
}

#[test]
fn decide_exit_codes() {
    let truthy = write_temp("sent_true.sexp", "(blocks (x 0)) (prefix exists) (and)\n");
    let out = bin()
        .args(["decide", "--formula"])
        .arg(&truthy)
        .arg("--compute-q")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "true");

    let falsy = write_temp(
        "sent_false.sexp",
        "(blocks (x 1)) (prefix exists) (and (=0 x0_0) (=0 x0_1))\n",
    );
    let out2 = bin()
        .args(["decide", "--formula"])
        .arg(&falsy)
        .arg("--compute-q")
        .output()
        .unwrap();
    assert_eq!(out2.status.code(), Some(1));
    assert_eq!(stdout(&out2).trim(), "false");
}

#[test]
fn usage_and_computation_error_codes() {
    // unknown flag: usage error, exit 2, JSON on stderr
    let out = bin().args(["qe", "--frobnicate", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["error"]["kind"], "usage");

    // unknown subcommand
    let out2 = bin().arg("nonsense").output().unwrap();
    assert_eq!(out2.status.code(), Some(2));

    // computation error: nonlinear atom through the motivic oracle, exit 3
    let nonlinear = write_temp("nonlinear.sexp", "(blocks (x 1)) (=0 (* x0_0 x0_1))\n");
    let out3 = bin()
        .args(["qpoly", "--formula"])
        .arg(&nonlinear)
        .output()
        .unwrap();
    assert_eq!(out3.status.code(), Some(3));
    let err3: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out3.stderr).trim()).unwrap();
    assert_eq!(err3["error"]["kind"], "motivic");
}

#[test]
fn qpoly_count_class_shapes() {
    let lines = write_temp("lines.sexp", "(blocks (x 2)) (or (=0 x0_0) (=0 x0_1))\n");
    let q = bin()
        .args(["qpoly", "--formula"])
        .arg(&lines)
        .output()
        .unwrap();
    assert_eq!(stdout(&q).trim(), r#"{"poly":["1","2"]}"#);
    let p = bin()
        .args(["qpoly", "--formula"])
        .arg(&lines)
        .arg("--poincare")
        .output()
        .unwrap();
    assert_eq!(stdout(&p).trim(), r#"{"poly":["1","0","2"]}"#);
    let c = bin()
        .args(["count", "--formula"])
        .arg(&lines)
        .args(["--prime", "5"])
        .output()
        .unwrap();
    assert_eq!(stdout(&c).trim(), "11");
    let k = bin()
        .args(["class", "--formula"])
        .arg(&lines)
        .args(["--from-counts", "2,3,5"])
        .output()
        .unwrap();
    assert_eq!(stdout(&k).trim(), r#"{"class":["1","2"]}"#);
}

#[test]
fn verify_and_compare_run() {
    let twopts = write_temp("twopts.sexp", "(blocks (x 1)) (or (=0 x0_0) (=0 x0_1))\n");
    let out = bin()
        .args(["verify", "connectivity", "--formula"])
        .arg(&twopts)
        .args(["--p", "2", "--json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["holds"], true);

    let gap = bin()
        .args(["compare", "gap", "--n-max", "4", "--csv"])
        .output()
        .unwrap();
    let text = stdout(&gap);
    assert!(text.starts_with("n,hypercover,join,ratio\n"));
    assert!(text.contains("1,3,2,3/2"));

    let defect = bin()
        .args(["compare", "defect", "--n", "5", "--r", "1", "--json"])
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_str(stdout(&defect).trim()).unwrap();
    assert_eq!(report["threshold"], 4);
    assert_eq!(report["betti"], serde_json::json!([1, 0, 1, 0]));
}

#[test]
fn outputs_are_byte_deterministic() {
    let psi = example_psi_file();
    let run = || {
        bin()
            .args(["qe", "--formula"])
            .arg(&psi)
            .args(["--compute-q", "--omega", "EA", "--json", "--trace"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let sweep = |n: u32| {
        bin()
            .args([
                "bounds",
                "--kind",
                "B",
                "--method",
                "as",
                "--args",
                "1,1",
                "--sweep",
                &format!("N=1..{n}"),
            ])
            .output()
            .unwrap()
    };
    assert_eq!(sweep(5).stdout, sweep(5).stdout);
}

#[test]
fn oracle_subcommands_reject_quantified_input() {
    let quantified = write_temp(
        "quantified.sexp",
        "(blocks (x 1)) (prefix exists) (=0 x0_0)\n",
    );
    for sub in ["qpoly", "count", "class"] {
        let mut cmd = bin();
        cmd.args([sub, "--formula"]).arg(&quantified);
        if sub == "count" {
            cmd.args(["--prime", "3"]);
        }
        let out = cmd.output().unwrap();
        assert_eq!(out.status.code(), Some(3), "{sub}");
    }
}

#[test]
fn decide_rejects_out_of_contract_polynomials() {
    let sentence = write_temp("full_p1b.sexp", "(blocks (x 1)) (and)\n");
    let q_join = write_temp("qjoin2.json", r#"["2"]"#);
    let out = bin()
        .args(["decide", "--formula"])
        .arg(&sentence)
        .arg("--q-join")
        .arg(&q_join)
        .args(["--omega", "E"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["error"]["kind"], "operators");
}

#[test]
fn qe_accepts_an_external_join_polynomial() {
    // a true sentence over P^1: the join realization is all of P^3
    let sentence = write_temp("full_p1.sexp", "(blocks (x 1)) (and)\n");
    let q_join = write_temp("qjoin.json", r#"["1","1","1","1"]"#);
    let out = bin()
        .args(["qe", "--formula"])
        .arg(&sentence)
        .arg("--q-join")
        .arg(&q_join)
        .args(["--omega", "E"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "1");
}

#[test]
fn threads_env_var_is_honored() {
    let lines = write_temp(
        "lines2.sexp",
        "(blocks (x 2) (x 1)) (or (=0 x0_0) (=0 x1_1))\n",
    );
    let single = bin()
        .args(["count", "--formula"])
        .arg(&lines)
        .args(["--prime", "7"])
        .output()
        .unwrap();
    let multi = bin()
        .args(["count", "--formula"])
        .arg(&lines)
        .args(["--prime", "7"])
        .env("COHOMQE_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(stdout(&single).trim(), stdout(&multi).trim());
}
