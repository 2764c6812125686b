// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::fs;
use std::process::{Command, Output};

fn scatterwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scatterwalk")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn verify_circuit_reports_pass() {
    let out = scatterwalk(&["verify-circuit", "--family", "complete", "--n", "5", "--v", "1", "--phi", "pi", "--steps", "20", "--out", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["family"], "complete");
    assert_eq!(report["params"]["n"], 5);
    assert_eq!(report["steps"], 20);
    assert_eq!(report["oracle_calls"], 40);
    assert!(report["max_abs_dev"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn verify_circuit_on_every_family() {
    for args in [
        vec!["--family", "bipartite", "--n1", "3", "--n2", "3"],
        vec!["--family", "mpartite", "--m-sets", "3", "--n", "2"],
    ] {
        for phi in ["0", "pi/2", "pi"] {
            let mut full = vec!["verify-circuit", "--phi", phi, "--out", "csv"];
            full.extend(&args);
            let out = scatterwalk(&full);
            assert_eq!(out.status.code(), Some(0));
            let text = stdout(&out);
            assert!(text.starts_with("family,phi,steps,max_abs_dev,oracle_calls,ancilla_residue,passed\n"));
            assert!(text.trim_end().ends_with(",40,0e0,true"), "{text}");
        }
    }
}

#[test]
fn verify_collapse_with_model_dump() {
    let out = scatterwalk(&["verify-collapse", "--family", "bipartite", "--n1", "4", "--n2", "6", "--v1", "2", "--v2", "1", "--phi", "3pi/2", "--out", "json", "--dump"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    assert_eq!(report["dim"], 8);
    assert_eq!(report["model"]["basis"].as_array().unwrap().len(), 8);
    assert!(report["max_abs_dev"].as_f64().unwrap() <= 1e-10);

    let out = scatterwalk(&["verify-collapse", "--family", "complete", "--n", "9", "--v", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().nth(1).unwrap().ends_with(",true"));
}

#[test]
fn simulate_writes_trace_and_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.csv");
    let out = scatterwalk(&["simulate", "--family", "complete", "--n", "8", "--steps", "3", "--state-output", state.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "step,p_incident,p_entering,p_leaving");
    assert_eq!(lines.len(), 5);
    let p3: f64 = lines[4].split(',').nth(1).unwrap().parse().unwrap();
    assert!(p3 >= 0.9);
    let state = fs::read_to_string(&state).unwrap();
    assert!(state.starts_with("from,to,re,im\n0,1,"));
    assert_eq!(state.lines().count(), 1 + 56);
}

#[test]
fn simulate_json_outcome_matches_between_methods() {
    let run = |method: &str| {
        json(&scatterwalk(&["simulate", "--family", "complete", "--n", "256", "--method", method, "--out", "json", "--cost-model", "walk-plus-measure"]))
    };
    let (full, fast) = (run("full"), run("collapsed"));
    assert_eq!(full["peak"]["step"], 18);
    assert_eq!(full["peak"]["step"], fast["peak"]["step"]);
    assert_eq!(full["m_opt"], fast["m_opt"]);
    assert_eq!(full["cost_model"], "walk-plus-measure");
    assert!((full["n_bar"].as_f64().unwrap() - fast["n_bar"].as_f64().unwrap()).abs() < 1e-8);
}

#[test]
fn simulate_from_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("triangle.json");
    fs::write(&path, r#"{"n": 3, "edges": [[0, 1], [0, 2], [1, 2]], "specials": [0]}"#).unwrap();
    let out = scatterwalk(&["simulate", "--graph-file", path.to_str().unwrap(), "--steps", "2", "--phi", "pi"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 4);
    let out = scatterwalk(&["verify-circuit", "--graph-file", path.to_str().unwrap(), "--out", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["family"], "custom");
}

#[test]
fn sweep_grid_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let out = scatterwalk(&["sweep", "--n", "32", "--phi-points", "8", "--steps", "10", "--curve-output", curve.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("phi,m,p_incident,p_entering,p_leaving\n"));
    assert_eq!(text.lines().count(), 1 + 8 * 11);
    let curve = fs::read_to_string(&curve).unwrap();
    assert!(curve.starts_with("phi,m_opt,n_bar,p_opt,measure_only,blind_avg,memory_avg\n"));
    assert_eq!(curve.lines().count(), 9);
}

#[test]
fn sweep_is_reproducible_and_methods_agree() {
    let run = |method: &str| stdout(&scatterwalk(&["sweep", "--n", "24", "--v", "2", "--phi-points", "6", "--method", method, "--out", "json"]));
    assert_eq!(run("full"), run("full"));
    let (full, fast): (serde_json::Value, serde_json::Value) =
        (serde_json::from_str(&run("full")).unwrap(), serde_json::from_str(&run("collapsed")).unwrap());
    assert_eq!(full["ridge"].as_array().unwrap().len(), 6);
    for (a, b) in full["ridge"].as_array().unwrap().iter().zip(fast["ridge"].as_array().unwrap()) {
        assert_eq!(a["m_opt"], b["m_opt"]);
    }
}

#[test]
fn sweep_refuses_work_over_cap() {
    let out = scatterwalk(&["sweep", "--n", "64", "--method", "full", "--work-cap", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("collapsed fast path"));
}

#[test]
fn classical_comparison_is_seeded() {
    let args = ["compare-classical", "--n", "100", "--v", "1", "--trials", "20000", "--seed", "11"];
    let first = stdout(&scatterwalk(&args));
    assert_eq!(first, stdout(&scatterwalk(&args)));
    let lines: Vec<_> = first.lines().collect();
    assert_eq!(lines[0], "variant,N,v,closed_form_avg,mc_avg,mc_stderr,seed");
    assert!(lines[1].starts_with("blind,100,1,100.0,") && lines[1].ends_with(",11"));
    assert!(lines[2].starts_with("memory,100,1,50.5,"));
}

#[test]
fn bad_arguments_exit_with_one() {
    for args in [
        vec!["simulate", "--family", "complete", "--phi", "tau"],
        vec!["simulate", "--family", "complete"],
        vec!["simulate", "--family", "mpartite", "--m-sets", "3", "--n", "2", "--v", "2"],
        vec!["verify-circuit"],
        vec!["sweep"],
    ] {
        let out = scatterwalk(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}
