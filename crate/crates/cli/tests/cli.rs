use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmray")).args(args).env_remove("CMRAY_PRECISION").output().expect("binary runs")
}

fn validator() -> &'static jsonschema::Validator {
    static V: OnceLock<jsonschema::Validator> = OnceLock::new();
    V.get_or_init(|| {
        let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json")).unwrap();
        jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
    })
}

/// Run, require success and a schema-valid report.
fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let errors: Vec<String> = validator().iter_errors(&v).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}");
    v
}

fn failure(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    assert!(out.stdout.is_empty());
    let line = String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), serde_json::from_str(line.trim()).unwrap_or(Value::Null))
}

fn strs(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

#[test]
fn classgroup_examples() {
    let v = report(&["classgroup", "--field", "53,500", "--m", "2"]);
    let g = &v["result"]["ray_class_group"];
    assert_eq!(strs(&g["invariants"]), ["8", "4"]);
    assert_eq!(g["order"], "32");
    assert_eq!(g["generators"].as_array().unwrap().len(), 2);
    assert_eq!(strs(&v["result"]["residue_group"]["invariants"]), ["2", "2"]);
    let v = report(&["classgroup", "--field", "106,809", "--m", "1"]);
    assert_eq!(strs(&v["result"]["ray_class_group"]["invariants"]), ["8"]);
    let v = report(&["classgroup", "--quadratic", "809", "--narrow", "--m", "1"]);
    assert!(strs(&v["result"]["ray_class_group"]["invariants"]).is_empty());
    assert_eq!(v["result"]["field"]["discriminant"], "809");
}

#[test]
fn generator_ideals_parse_back() {
    // the printed two-element forms are accepted by --ideal
    let v = report(&["classgroup", "--field", "53,500", "--m", "1"]);
    let gens = v["result"]["ray_class_group"]["generators"].as_array().unwrap();
    assert!(!gens.is_empty());
    let te = &gens[0]["ideal"]["two_element"];
    let given = format!("{},{}", te[0].as_str().unwrap(), te[1].as_str().unwrap());
    let a = report(&["analytic", "--field", "53,500", "--ideal", &given, "--precision", "128"]);
    assert_eq!(a["result"]["ideal"]["norm"], gens[0]["ideal"]["norm"]);
}

#[test]
fn shimura_examples() {
    let v = report(&["shimura", "--field", "53,500", "--m", "2"]);
    let r = &v["result"];
    assert_eq!(strs(&r["group"]["invariants"]), ["8", "4"]);
    assert_eq!(r["coker_n1_order"], "1");
    assert!(strs(&r["narrow_class_group_k0"]["invariants"]).is_empty());
    assert_eq!(r["order_identity"]["holds"], true);
    // the 11- and 12-digit unit coordinates survive serialization
    let eps0 = strs(&r["real_subfield"]["fundamental_unit"]["power_basis"]);
    assert_eq!(eps0, ["374579495409", "30506849866"]);
    assert_eq!(eps0[1].parse::<u64>().unwrap(), 30_506_849_866);
    let v = report(&["shimura", "--field", "53,500", "--m", "1"]);
    let id = &v["result"]["order_identity"];
    assert_eq!(id["holds"], true);
    assert_eq!(id["order"], id["coker_times_ker"]);
}

#[test]
fn star_examples() {
    let v = report(&["star", "--field", "65,425", "--find-ms"]);
    let sel = &v["result"]["selection"];
    assert_eq!(sel["m_s"], "8");
    assert_eq!(sel["two_torsion_in_ker_f0"], true);
    let primes = sel["primes"].as_array().unwrap();
    assert_eq!(primes.len(), 3);
    assert!(primes.iter().all(|p| p["p"] == "2"));
    assert_eq!(strs(&v["result"]["reflex"]["polynomial"]), ["2525", "0", "130", "0", "1"]);

    let v = report(&["star", "--field", "65,425", "--m", "8"]);
    assert_eq!(v["result"]["verdict"]["holds"], true);
    assert_eq!(v["result"]["verdict"]["intersection"]["order"], "2");
    let v = report(&["star", "--field", "65,425", "--m", "4"]);
    assert_eq!(v["result"]["verdict"]["holds"], false);
    let v = report(&["star", "--field", "65,425", "--minimal", "--bound", "10"]);
    assert_eq!(v["result"]["minimal_m"], "5");
    let v = report(&["star", "--field", "65,425", "--minimal", "--bound", "4"]);
    assert_eq!(v["result"]["minimal_m"], Value::Null);
    let v = report(&["star", "--field", "65,425", "--mixed", "8,4"]);
    assert_eq!(v["result"]["verdict"]["holds"], false);
    assert_eq!(v["result"]["verdict"]["modulus"], "8");
}

const PRINTED_OMEGA: &str = "0,1.5852,-0.16036,0,0.5,1.7723";

fn re_f64(z: &Value) -> f64 {
    z["re"].as_str().unwrap().parse().unwrap()
}

#[test]
fn analytic_period_matrix() {
    let v = report(&["analytic", "--field", "53,500", "--ideal", "49,alpha+5"]);
    let r = &v["result"];
    assert_eq!(r["precision_bits"], 212);
    assert!(r["imag_min_eigenvalue"].as_f64().unwrap() > 0.0);
    assert_eq!(r["omega"][0][1], r["omega"][1][0]);
    let im11: f64 = r["omega"][0][0]["im"].as_str().unwrap().parse().unwrap();
    assert!((im11 - 1.5852).abs() < 1e-3, "{im11}");
    let printed = report(&["analytic", "--omega", PRINTED_OMEGA]);
    for j in ["j1", "j2", "j3"] {
        let (a, b) = (re_f64(&r["igusa"][j]), re_f64(&printed["result"]["igusa"][j]));
        assert!((a - b).abs() / a.abs().max(1.0) < 1e-2, "{j}: {a} vs {b}");
    }
}

#[test]
fn theta_table_has_six_exact_zeros() {
    let v = report(&["analytic", "--omega", PRINTED_OMEGA, "--theta-table"]);
    let rows = v["result"]["theta"]["constants"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    let zeros: Vec<u64> = rows.iter().filter(|r| r["exact_zero"] == true).map(|r| r["index"].as_u64().unwrap()).collect();
    assert_eq!(zeros, [5, 7, 10, 11, 13, 14]);
    assert!(rows.iter().all(|r| r["even"] != r["exact_zero"]));
}

#[test]
fn doubling_precision_reproduces_values() {
    let lo = report(&["analytic", "--omega", PRINTED_OMEGA, "--precision", "106"]);
    let out = Command::new(env!("CARGO_BIN_EXE_cmray"))
        .args(["analytic", "--omega", PRINTED_OMEGA])
        .env("CMRAY_PRECISION", "212")
        .output()
        .unwrap();
    let hi: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(hi["result"]["precision_bits"], 212);
    let f = |z: &Value, part: &str| -> f64 { z[part].as_str().unwrap().parse().unwrap() };
    for j in ["j1", "j2", "j3"] {
        let (a, b) = (&lo["result"]["igusa"][j], &hi["result"]["igusa"][j]);
        let size = f(b, "re").hypot(f(b, "im")).max(1.0);
        // the invariants of a real point are real: the imaginary parts are noise at each precision
        assert!(f(a, "im").abs() < 1e-25 * size && f(b, "im").abs() < 1e-55 * size, "{j}");
        assert!((f(a, "re") - f(b, "re")).abs() < 1e-14 * size, "{j}");
        // leading 25 significant digits agree
        let (sa, sb) = (a["re"].as_str().unwrap(), b["re"].as_str().unwrap());
        assert_eq!(sa.split_once('e').unwrap().1, sb.split_once('e').unwrap().1);
        assert_eq!(sa[..27], sb[..27], "{j}: {sa} vs {sb}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["shimura", "--field", "53,500", "--m", "2", "--seed", "7"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], "7");
    // a different seed gives the same group
    let w = report(&["shimura", "--field", "53,500", "--m", "2", "--seed", "12345"]);
    assert_eq!(w["result"]["group"], v["result"]["group"]);
}

#[test]
fn verbose_adds_timings() {
    let v = report(&["classgroup", "--field", "53,500", "--verbose"]);
    assert!(v["timings"]["total_seconds"].as_f64().unwrap() >= 0.0);
    let out = run(&["classgroup", "--field", "53,500", "-v"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Cl(1)"));
}

#[test]
fn errors_are_structured() {
    let (code, e) = failure(&["shimura", "--field", "6,4"]);
    assert_eq!(code, 2);
    assert_eq!(e["error"]["kind"], "not_cm");
    let (code, e) = failure(&["classgroup", "--field", "5,4"]);
    assert_eq!(code, 2);
    assert_eq!(e["error"]["kind"], "reducible");
    let (code, e) = failure(&["classgroup", "--field", "53"]);
    assert_eq!(code, 2);
    assert_eq!(e["error"]["kind"], "invalid_input");
    let (code, _) = failure(&["star", "--field", "53,500", "--m", "0"]);
    assert_eq!(code, 2);
    let (code, e) = failure(&["analytic", "--field", "53,500", "--ideal", "7,beta"]);
    assert_eq!(code, 2);
    assert_eq!(e["error"]["command"], "analytic");
    let (code, e) = failure(&["classgroup", "--field", "2001,1000003"]);
    assert_eq!(code, 3);
    assert_eq!(e["error"]["kind"], "resource");
    // usage errors from the argument parser
    assert_eq!(run(&["star", "--field", "53,500"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}
