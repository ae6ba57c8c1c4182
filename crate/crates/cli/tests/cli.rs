use std::fs;
use std::process::{Command, Output};

fn arboreal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arboreal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn certify_valid_preset_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("alt.cert");
    let o = arboreal(&["certify", "--preset", "g-alt3-sym3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("arboreal-cert/1\n"));
    let cert = arboreal::certificate::Certificate::parse(&text).unwrap();
    assert!(cert.is_valid());
    cert.reverify().unwrap();
}

#[test]
fn certify_degenerate_exits_one() {
    let o = arboreal(&["certify", "--preset", "degenerate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("failed stage: thm_c_witness"));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "preset = [unterminated").unwrap();
    let o = arboreal(&["certify", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(&bad, "preset = \"g-alt3-sym3\"\n[groups]\nsource = \"preset\"\nname = \"degenerate\"\n").unwrap();
    assert_eq!(arboreal(&["certify", "--config", bad.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(arboreal(&["certify"]).status.code(), Some(2));
    assert_eq!(arboreal(&["certify", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(arboreal(&["certify", "--preset", "psl2z"]).status.code(), Some(2));
    assert_eq!(arboreal(&["certify", "--preset", "g-alt3-sym3", "--depth", "0"]).status.code(), Some(2));
}

#[test]
fn explicit_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("run.cert");
    fs::write(
        &cfg,
        format!(
            "word_length = 2\ndepth = 12\nseed = 3\nout = {:?}\n\n[groups]\nsource = \"wreath\"\ngamma = [[0, 1], [1, 0]]\na = [[0, 1], [1, 0]]\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = arboreal(&["certify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cert = arboreal::certificate::Certificate::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cert.config.word_length, 2);
    assert_eq!(cert.config.depth, 12);
    assert_eq!(cert.config.seed, 3);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("1.cert");
    let p2 = dir.path().join("2.cert");
    for p in [&p1, &p2] {
        let o = arboreal(&["certify", "--preset", "cycle5-alt5", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
}

#[test]
fn classify_reports() {
    let o = arboreal(&["classify", "--preset", "g-alt3-sym3", "--word", "1"]);
    assert!(stdout(&o).contains("Elliptic at v0"));
    assert!(stdout(&o).contains("member of all classes"));

    let o = arboreal(&["classify", "--preset", "g-alt3-sym3", "--word", "w"]);
    assert!(stdout(&o).contains("not in U(F)"));

    let o = arboreal(&["classify", "--preset", "g-alt3-sym3", "--word", "t"]);
    assert!(stdout(&o).contains("Hyperbolic, length 2"), "{}", stdout(&o));

    assert_eq!(arboreal(&["classify", "--preset", "g-alt3-sym3", "--word", "q"]).status.code(), Some(2));
}

#[test]
fn witness_output_is_a_portrait() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.toml");
    let o = arboreal(&["witness", "--preset", "wreath-z2-z2", "--out", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = arboreal(&["classify", "--preset", "wreath-z2-z2", "--element", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Elliptic; in G(F,F')"), "{}", stdout(&o));
}

#[test]
fn free_product_witness() {
    let o = arboreal(&["witness", "--preset", "psl2z"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("valid: true") && s.contains("non-identity: true"), "{s}");
}

#[test]
fn orbit_lists_points() {
    let o = arboreal(&["orbit", "--preset", "g-alt3-sym3", "--word-length", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("[] (01)^∞"), "{s}");
}
