use std::process::Command;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_latcover")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn covering_input_inline() {
    let input = r#"{"lattices":[{"basis":[[1,0],[0,2]]},{"basis":[[2,0],[0,1]]},{"basis":[[1,0],[1,2]]}]}"#;
    assert_eq!(run(&["cover", "check", input]), (0, "COVERS (modulus 2)\n".into()));
    let (code, text) = run(&["cover", "minimal", input]);
    assert_eq!(code, 0);
    assert!(text.starts_with("MINIMAL\n"));
}

#[test]
fn exit_codes() {
    let missing = r#"{"lattices":[{"basis":[[1,0],[0,2]]},{"basis":[[2,0],[0,1]]}]}"#;
    let (code, text) = run(&["cover", "check", missing]);
    assert_eq!((code, text.as_str()), (1, "NOT A COVERING, witness (1,1)\n"));
    assert_eq!(run(&["lat", "info", "[[1,2]]"]).0, 2);
    assert_eq!(run(&["cover", "enumerate", "--length", "7"]).0, 2);
    assert_eq!(run(&["d4", "lambda", "--D", "2", "--nu", "3", "--t", "1,0,0,1"]).0, 2);
    assert_eq!(run(&["nonsense"]).0, 2);
    assert_eq!(run(&["d4", "lambda", "--D", "2", "--nu", "2", "--t", "1,0,0,1"]).0, 0);
}

#[test]
fn lattice_commands() {
    assert_eq!(run(&["lat", "meet", "[[2,0],[0,1]]", "[[1,0],[0,3]]"]).1, "[[2,0],[0,3]]  index 6\n");
    assert_eq!(run(&["lat", "join", "[[2,0],[0,1]]", "[[1,0],[0,3]]"]).1, "[[1,0],[0,1]]  index 1\n");
    assert_eq!(run(&["lat", "ofmat", r#"[["1/2","0"],["0","1/3"]]"#]).1, "[[2,0],[0,3]]  index 6\n");
}

#[test]
fn form_commands() {
    let (code, text) = run(&["form", "aut", r#"["1","0","0","0","1"]"#]);
    assert_eq!(code, 0);
    assert!(text.contains("D4 by coefficients: true"));
    let (_, text) = run(&["form", "act", r#"["1","1","0","0","0"]"#, "--matrix", r#"[["0","1"],["1","0"]]"#]);
    assert_eq!(text, "X*Y^3 + Y^4\n");
    let (_, text) = run(&["form", "equiv", r#"["1","0","0","0","1"]"#, r#"["1","0","0","0","2"]"#]);
    assert!(text.starts_with("no unimodular matrix"));
}

#[test]
fn json_output_parses() {
    let (code, text) = run(&["--json", "cover", "enumerate", "--length", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v[0]["count"], 1);
    assert_eq!(v[0]["orbits"], 1);
}
