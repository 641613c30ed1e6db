use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cantor_clique::tree::TreeEmbedding;
use cantor_clique::MarkedSurface;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantor-clique"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn written(out: &Path, prefix: &str, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            name.starts_with(prefix) && name.ends_with(ext)
        })
        .collect();
    v.sort();
    v
}

#[test]
fn surface_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--truncation", "2", "surface"]);
    assert!(o.status.success());
    let json = &written(dir.path(), "surface-", ".json")[0];
    let s: MarkedSurface = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(s, MarkedSurface::canonical(2, 4).unwrap());
    let svg = fs::read_to_string(&written(dir.path(), "surface-", ".svg")[0]).unwrap();
    assert_eq!(svg.matches(r#"class="chunk" data-level="2""#).count(), 16);
}

#[test]
fn output_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(run(d.path(), &["--truncation", "3", "--level", "3", "embed"]).status.success());
    }
    let (fa, fb) = (written(a.path(), "", ""), written(b.path(), "", ""));
    assert_eq!(fa.len(), 4);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
}

#[test]
fn embed_draws_one_strand_per_branch() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["--truncation", "2", "--level", "2", "embed"]).status.success());
    let svgs = written(dir.path(), "embedding-", ".svg");
    assert_eq!(svgs.len(), 2);
    let one = fs::read_to_string(&svgs[0]).unwrap();
    let two = fs::read_to_string(&svgs[1]).unwrap();
    assert!(svgs[0].to_string_lossy().ends_with("level1.svg"));
    assert_eq!(one.matches(r#"class="strand""#).count(), 2);
    assert_eq!(two.matches(r#"class="strand""#).count(), 4);
    assert_eq!(two.matches(r#"class="chunk" data-level="2""#).count(), 16);
    let json = &written(dir.path(), "embedding-", ".json")[0];
    let e: TreeEmbedding = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(e.branches.len(), 4);
}

#[test]
fn verify_passes_and_reads_back_its_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--level", "2", "verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(written(dir.path(), "report-", ".json").len(), 1);

    assert!(run(dir.path(), &["--truncation", "2", "--level", "2", "--no-svg", "embed"]).status.success());
    let json = written(dir.path(), "embedding-", ".json").remove(0);
    let o = run(dir.path(), &["verify", "--embedding", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    // drop a sibling pair: the file still parses, the checks fail
    let mut e: TreeEmbedding = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    e.branches.retain(|a, _| !a.to_string().starts_with('0'));
    let broken = dir.path().join("broken.json");
    fs::write(&broken, serde_json::to_string(&e).unwrap()).unwrap();
    let o = run(dir.path(), &["verify", "--embedding", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--embedding", "/no/such/file.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/file.json"));
    assert_eq!(run(dir.path(), &["--truncation", "1", "--level", "2", "embed"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["intersect", "garbage", "N:;open"]).status.code(), Some(2));
}

#[test]
fn code_queries() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["intersect", "N:;open", "S:;open"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0");
    assert!(run(dir.path(), &["simple", "N:;open"]).status.success());
    assert!(run(dir.path(), &["disjoint", "N:;open", "S:;open"]).status.success());
}

#[test]
fn loop_graph_build_and_distance() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--truncation", "1", "--max-len", "2", "loopgraph", "build"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("32 vertices, 352 edges"));
    let edges = fs::read_to_string(&written(dir.path(), "loopgraph-", ".edges")[0]).unwrap();
    assert_eq!(edges.lines().filter(|l| l.starts_with("e ")).count(), 352);
    let first = edges.lines().find(|l| l.starts_with("v 0 ")).unwrap()[4..].to_string();
    let o = run(dir.path(), &["--truncation", "1", "--max-len", "2", "loopgraph", "dist", &first, &first]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0");
}
