use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use siltsurf::cli::{run, Outcome};
use siltsurf::curves::encode;
use siltsurf::fuzz::{random_graded, rng};
use siltsurf::reduction::in_z;
use siltsurf::session::load_algebra;
use siltsurf::silting::GradedDissection;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn sil(args: &[&str]) -> Outcome {
    run(std::iter::once("siltsurf").chain(args.iter().copied()))
}

fn ok_json(args: &[&str]) -> Value {
    let out = sil(args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn write_json(name: &str, v: &impl serde::Serialize) -> String {
    let p = tmp(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.display().to_string()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(sil(&["validate", &data("a2.json")]).code, 0);
    let bad = sil(&["validate", &data("bad_target.json")]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("unknown vertex"), "{}", bad.stderr);
    assert_eq!(sil(&["validate", &data("truncated.json")]).code, 1);
    assert_eq!(sil(&["validate", "/nonexistent/file.json"]).code, 1);
    let extra = write_json("extra.json", &serde_json::json!({"vertices": ["1"], "colour": "red"}));
    assert_eq!(sil(&["validate", &extra]).code, 1);
    assert_eq!(sil(&["frobnicate"]).code, 1);
    assert_eq!(sil(&["--help"]).code, 0);
}

#[test]
fn surface_and_dual_dumps() {
    let v = ok_json(&["validate", &data("torus.json")]);
    assert_eq!(v["genus"], 1);
    assert_eq!(v["boundaryCount"], 1);
    let s = ok_json(&["surface", &data("a2.json")]);
    assert_eq!(s["schema"], "silt-surf/1");
    let d = ok_json(&["dual", &data("a2.json")]);
    assert_eq!(d["schema"], "silt-surf/1");
}

#[test]
fn mutate_reports_the_case_and_writes_the_result() {
    let mut seen = Vec::new();
    for arc in ["g1", "g2", "g3"] {
        for dir in ["left", "right"] {
            let out = tmp(&format!("a3_{arc}_{dir}.json"));
            let v = ok_json(&["mutate", &data("a3.json"), "--arc", arc, "--dir", dir, "--out", out.to_str().unwrap()]);
            assert!(v.get("dissection").is_none());
            let check = ok_json(&["silting-check", &data("a3.json"), out.to_str().unwrap()]);
            assert_eq!(check["silting"], true);
            if v["caseTag"] == "III" {
                assert_eq!(v["target"]["crossings"], v["source"]["crossings"]);
                assert_eq!(v["middles"].as_array().unwrap().len(), 0);
            }
            seen.push(v["caseTag"].as_str().unwrap().to_string());
        }
    }
    assert!(seen.iter().any(|c| c == "III"), "{seen:?}");
    assert_eq!(sil(&["mutate", &data("a3.json"), "--arc", "g7", "--dir", "left"]).code, 2);
    assert_eq!(sil(&["mutate", &data("a3.json"), "--arc", "g1", "--dir", "both"]).code, 2);
}

#[test]
fn mutation_round_trip_through_files() {
    let once = tmp("a3_once.json");
    let twice = tmp("a3_twice.json");
    ok_json(&["mutate", &data("a3.json"), "--arc", "g2", "--dir", "left", "--out", once.to_str().unwrap()]);
    ok_json(&["mutate", &data("a3.json"), once.to_str().unwrap(), "--arc", "g2", "--dir", "right", "--out", twice.to_str().unwrap()]);
    let (_, s) = load_algebra(&std::fs::read_to_string(data("a3.json")).unwrap()).unwrap();
    let back = GradedDissection::from_json(&s, &std::fs::read_to_string(&twice).unwrap()).unwrap();
    assert_eq!(back.canonical(&s), GradedDissection::initial(&s).canonical(&s));
}

#[test]
fn hom_matches_oracle_hom() {
    let alg = std::fs::read_to_string(data("a3.json")).unwrap();
    let (_, s) = load_algebra(&alg).unwrap();
    let mut r = rng(5);
    for k in 0..10 {
        let x = write_json(&format!("hx{k}.json"), &encode(&s, &random_graded(&mut r, &s, 5, 0.0, 1)));
        let y = write_json(&format!("hy{k}.json"), &encode(&s, &random_graded(&mut r, &s, 5, 0.0, 1)));
        let geo = ok_json(&["hom", &data("a3.json"), &x, &y, "--json"]);
        let ora = ok_json(&["oracle-hom", &data("a3.json"), &x, &y]);
        assert_eq!(geo["perDegree"], ora["perDegree"]);
        let table = sil(&["hom", &data("a3.json"), &x, &y]).stdout;
        assert!(table.starts_with("degree\tdim\n") && table.contains(&format!("total\t{}", geo["total"])));
        let int = ok_json(&["intersect", &data("a3.json"), &x, &y]);
        assert_eq!(int["intersectionNumber"], geo["total"]);
    }
}

#[test]
fn field_is_read_from_the_environment() {
    let (_, s) = load_algebra(&std::fs::read_to_string(data("kronecker.json")).unwrap()).unwrap();
    let gd = GradedDissection::initial(&s);
    let x = write_json("fx.json", &encode(&s, &gd.arcs[0]));
    let y = write_json("fy.json", &encode(&s, &gd.arcs[1]));
    let bin = env!("CARGO_BIN_EXE_siltsurf");
    let out = Command::new(bin).args(["oracle-hom", &data("kronecker.json"), &x, &y]).env("SILTSURF_FIELD", "Fp:7").output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["field"], "Fp:7");
    let q = ok_json(&["oracle-hom", &data("kronecker.json"), &x, &y]);
    assert_eq!(v["perDegree"], q["perDegree"]);
    let bad = Command::new(bin).args(["oracle-hom", &data("kronecker.json"), &x, &y]).env("SILTSURF_FIELD", "Fp:8").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn cut_and_reduction_commands() {
    let (_, s) = load_algebra(&std::fs::read_to_string(data("a3.json")).unwrap()).unwrap();
    let gd = GradedDissection::initial(&s);
    let g = write_json("gamma.json", &encode(&s, &gd.arcs[1]));
    let c = ok_json(&["cut", &data("a3.json"), &g]);
    assert!([1, 2, 3].contains(&c["caseTag"].as_u64().unwrap()));
    assert!(c["pointMap"]["newPoints"].as_array().unwrap().len() == 2);

    let mut r = rng(9);
    let mut found = 0;
    for k in 0..200 {
        let x = random_graded(&mut r, &s, 4, 0.0, 1);
        if x.word.same_curve(&gd.arcs[1].word, &s) || !in_z(&s, &x, &gd.arcs[1]) {
            continue;
        }
        let xf = write_json(&format!("zx{k}.json"), &encode(&s, &x));
        let o = ok_json(&["orbit", &data("a3.json"), &xf, "--gamma", &g]);
        assert!(o["pattern"]["kind"].is_string());
        assert_eq!(o["pattern"], o["predicted"]);
        let h = ok_json(&["orbit-hom", &data("a3.json"), &xf, &xf, "--gamma", &g]);
        assert_eq!(h["agree"], true, "{h}");
        found += 1;
        if found == 5 {
            break;
        }
    }
    assert_eq!(found, 5);

    let (_, dn) = load_algebra(&std::fs::read_to_string(data("dual_numbers.json")).unwrap()).unwrap();
    let lp = write_json("loop.json", &encode(&dn, &GradedDissection::initial(&dn).arcs[0]));
    let out = sil(&["cut", &data("dual_numbers.json"), &lp]);
    assert_eq!(out.code, 3, "{}", out.stderr);
    assert!(out.stderr.contains("loop"));
}

#[test]
fn graph_and_fuzz_are_deterministic() {
    let a = sil(&["graph", &data("a2.json"), "--depth", "3"]);
    assert_eq!(a.code, 0);
    assert!(a.stdout.starts_with("digraph"));
    assert_eq!(a, sil(&["graph", &data("a2.json"), "--depth", "3"]));
    for kind in ["algebra", "curve", "dissection"] {
        let args = ["--seed", "7", "fuzz", "--kind", kind, "--count", "3"];
        let one = sil(&args);
        assert_eq!(one.code, 0, "{}", one.stderr);
        assert_eq!(one, sil(&args));
        assert_ne!(one.stdout, sil(&["--seed", "8", "fuzz", "--kind", kind, "--count", "3"]).stdout);
    }
    let alg = write_json("fuzzed_alg.json", &ok_json(&["--seed", "3", "fuzz", "--kind", "algebra"]));
    let d = write_json("fuzzed_diss.json", &ok_json(&["--seed", "3", "fuzz", "--kind", "dissection", "--algebra", &alg]));
    assert_eq!(ok_json(&["silting-check", &alg, &d])["silting"], true);
}
