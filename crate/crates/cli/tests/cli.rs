use std::path::PathBuf;
use std::process::{Command, Output};

fn tropmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropmod")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tropmod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn moduli_fan_is_balanced() {
    let path = scratch("m5.json");
    let o = tropmod(&["moduli", "--n", "5", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let b = tropmod(&["balance", path.to_str().unwrap()]);
    assert!(b.status.success());
    assert_eq!(stdout(&b).trim(), "balanced: 10/10 codim-1 cells OK");
}

#[test]
fn unbalanced_complex_fails() {
    let path = scratch("ray.json");
    let ray =
        r#"{"ambient_dim":2,"vertices":[[0,0]],"rays":[[1,0]],"cells":[{"dim":1,"vertex_ids":[0],"ray_ids":[0],"weight":1}]}"#;
    std::fs::write(&path, ray).unwrap();
    let b = tropmod(&["--json", "balance", path.to_str().unwrap()]);
    assert!(!b.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&b)).unwrap();
    assert_eq!(v["balanced"], false);
    assert_eq!(v["total"], 1);
}

#[test]
fn output_is_stable() {
    let a = tropmod(&["bergman", "--matroid", "graph:K4", "--faces"]);
    let b = tropmod(&["bergman", "--matroid", "graph:K4", "--faces"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_lemma_max_on_k4() {
    let o = tropmod(&["verify", "lemma-max", "--matroid", "graph:K4"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn verify_roundtrip_of_identity() {
    let o = tropmod(&["verify", "roundtrip", "--f", "id", "--n", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn verify_modification_json() {
    let o = tropmod(&["--json", "verify", "modification", "--n", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
}

#[test]
fn trees_and_points_convert() {
    let o = tropmod(&["tree2point", "((1:0,2:0):3/2,(3:0,4:0):0);"]);
    assert_eq!(stdout(&o).trim(), "0,3/2,3/2,3/2,3/2,0");
    let back = tropmod(&["point2tree", "0,3/2,3/2,3/2,3/2,0", "--n", "4"]);
    assert_eq!(stdout(&back).trim(), "((1,2):3/2,3,4);");
}

#[test]
fn errors_are_structured() {
    let o = tropmod(&["--json", "point2tree", "1,2", "--n", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(v["error"]["message"].as_str().unwrap().contains("expected 6 distances"));
    let bad = tropmod(&["--json", "bergman", "--matroid", "uniform:5,2"]);
    assert_eq!(bad.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_ne!(v["error"]["kind"], "input");
}

#[test]
fn forgetful_fibre_through_files() {
    let ft = scratch("ft.json");
    let m4 = scratch("m4.json");
    assert!(tropmod(&["forget", "--n", "4", "--out", ft.to_str().unwrap()]).status.success());
    assert!(tropmod(&["moduli", "--n", "4", "--out", m4.to_str().unwrap()]).status.success());
    let o = tropmod(&["fibre", ft.to_str().unwrap(), m4.to_str().unwrap(), "--point", "0,0,0", "--chart", "bergman:2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 4);
    assert!(cells.iter().all(|c| c["weight"] == 1));
}

#[test]
fn pullback_of_induced_map_is_equivalent() {
    let id = scratch("id4.json");
    assert!(tropmod(&["family", "morphism", "forgetful:4", "--out", id.to_str().unwrap()]).status.success());
    let spec = format!("pullback:{}", id.display());
    let o = tropmod(&["family", "equiv", &spec, "forgetful:4", "--chart", "moduli:4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let c = tropmod(&["family", "check", "forgetful:4", "--alpha", "1,7/2"]);
    assert!(c.status.success(), "{}", stdout(&c));
}
