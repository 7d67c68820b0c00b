use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;
use tuplepack::{Exact, HeuristicKind, HeuristicSpec, Histogram, Limits, MaxPerPack, Packer, Scalar, StrategySetJson};

const TOY: &str = "nodes,edges,count\n3,4,2\n2,2,1\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tuplepack"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["tuplepack"];
    argv.extend_from_slice(args);
    let code = tuplepack::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn pack_reports_efficiency() {
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.csv", TOY);
    let (code, out, _) =
        run(&["pack", h.to_str().unwrap(), "--limits", "6,8", "--heuristic", "product", "--max-per-pack", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("efficiency (%)       (80.0, 83.3)"), "{out}");
    assert!(out.contains("realized limits      (5,6)"));
}

#[test]
fn pack_json_equals_library_result() {
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.csv", TOY);
    let emitted = dir.path().join("s.json");
    let (code, out, _) = run(&[
        "--json",
        "pack",
        h.to_str().unwrap(),
        "--limits",
        "6,8",
        "--max-per-pack",
        "3",
        "--emit-strategies",
        emitted.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let parsed: StrategySetJson = serde_json::from_str(&out).unwrap();
    let library =
        Packer::new(Limits::new(vec![6, 8]).unwrap(), HeuristicSpec::unweighted(HeuristicKind::Product, 2).unwrap())
            .max_per_pack(MaxPerPack::Limit(3))
            .pack(&Histogram::parse_str(TOY).unwrap())
            .unwrap();
    assert_eq!(parsed, library.to_json());
    let file: StrategySetJson = serde_json::from_str(&fs::read_to_string(emitted).unwrap()).unwrap();
    assert_eq!(file, parsed);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.csv", TOY);
    let missing = dir.path().join("missing.csv");

    assert_eq!(run(&["stats", missing.to_str().unwrap()]).0, 4);

    let (code, _, err) = run(&["pack", h.to_str().unwrap(), "--limits", "2,2", "--heuristic", "product"]);
    assert_eq!(code, 3);
    assert!(err.contains("exceeds limits"), "{err}");

    assert_eq!(run(&["pack", h.to_str().unwrap(), "--limits", "6,x"]).0, 2);
    assert_eq!(run(&["pack", h.to_str().unwrap(), "--limits", "6,8", "--heuristic", "median"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    let (code, out, err) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage: tuplepack") && err.is_empty());

    let bad = write(dir.path(), "bad.csv", "nodes,edges,count\n3,4,-1\n");
    assert_eq!(run(&["stats", bad.to_str().unwrap()]).0, 2);
}

#[test]
fn time_budget_zero_times_out() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("nodes,edges,count\n");
    for n in 1..40 {
        for e in 1..40 {
            text.push_str(&format!("{n},{e},3\n"));
        }
    }
    let h = write(dir.path(), "big.csv", &text);
    let (code, _, err) =
        run(&["pack", h.to_str().unwrap(), "--limits", "100,100", "--max-per-pack", "256", "--time-budget", "0"]);
    assert_eq!(code, 3);
    assert!(err.contains("time budget"), "{err}");
}

#[test]
fn stats_table_and_json() {
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.csv", "nodes,edges,count\n1,1,1\n3,3,1\n");
    let (code, out, _) = run(&["stats", h.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("no-packing efficiency (%)  (66.7, 66.7)"), "{out}");
    assert!(out.contains("potential speedup          (1.5, 1.5)"));

    let (code, out, _) = run(&["stats", "--json", h.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let lib = Histogram::parse_str("nodes,edges,count\n1,1,1\n3,3,1\n").unwrap().stats::<Exact>().unwrap();
    assert_eq!(v["distinct_bins"], 2);
    assert_eq!(v["no_packing_efficiency"][0].as_f64().unwrap(), lib.no_packing_efficiency[0].to_f64());
}

#[test]
fn baselines() {
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.csv", "nodes,edges,count\n2,10,1\n2,2,2\n");
    let (code, out, _) =
        run(&["pack", h.to_str().unwrap(), "--limits", "4,10", "--max-per-pack", "2", "--baseline", "node"]);
    assert_eq!(code, 0);
    assert!(out.contains("(75.0, 58.3)"), "{out}");
    let (code, out, _) = run(&["pack", h.to_str().unwrap(), "--limits", "4,10", "--baseline", "none"]);
    assert_eq!(code, 0);
    assert!(out.contains("packs                3"), "{out}");
}

#[test]
fn sweep_assign_heatmap_pipeline() {
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.csv", "nodes,edges,count\n2,3,2\n3,2,2\n");
    let grid = dir.path().join("grid.csv");
    let (code, out, err) = run(&[
        "sweep",
        h.to_str().unwrap(),
        "--from",
        "4,4",
        "--to",
        "5,5",
        "--max-per-pack",
        "2",
        "--target",
        "95",
        "--workers",
        "2",
        "-o",
        grid.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("best limits          (5,5)"), "{out}");
    let csv = fs::read_to_string(&grid).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(csv.lines().next().unwrap(), "limit_1,limit_2,eff_1,eff_2,objective,num_packs");

    let pgm = dir.path().join("out.pgm");
    let again = dir.path().join("again.csv");
    let (code, _, err) =
        run(&["heatmap", grid.to_str().unwrap(), "-o", pgm.to_str().unwrap(), "--emit-csv", again.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(fs::read_to_string(&pgm).unwrap(), "P2\n2 2\n100\n83 83\n83 100\n");
    assert_eq!(fs::read_to_string(&again).unwrap(), csv);

    let (code, _, _) = run(&["heatmap", grid.to_str().unwrap(), "-o", pgm.to_str().unwrap(), "--clamp-floor", "90"]);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&pgm).unwrap(), "P2\n2 2\n100\n90 90\n90 100\n");

    // sweep below the dataset maximum
    let (code, _, err) =
        run(&["sweep", h.to_str().unwrap(), "--from", "2,4", "--to", "5,5", "-o", grid.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("component 0"), "{err}");

    // assignment of ids
    let packed = dir.path().join("s.json");
    let (code, _, _) = run(&[
        "pack",
        h.to_str().unwrap(),
        "--limits",
        "5,5",
        "--max-per-pack",
        "2",
        "--emit-strategies",
        packed.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let items = write(dir.path(), "items.csv", "id,nodes,edges\na,2,3\nb,3,2\nc,2,3\nd,3,2\n");
    let packs = dir.path().join("packs.json");
    let (code, _, err) =
        run(&["assign", items.to_str().unwrap(), packed.to_str().unwrap(), "-o", packs.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&packs).unwrap()).unwrap();
    assert_eq!(v["packs"].as_array().unwrap().len(), 2);
    assert_eq!(v["packs"][0]["ids"], serde_json::json!(["b", "a"]));
    assert_eq!(v["packs"][0]["sums"], serde_json::json!([5, 5]));

    let wrong = write(dir.path(), "wrong.csv", "id,nodes,edges\na,1,1\n");
    let (code, _, err) =
        run(&["assign", wrong.to_str().unwrap(), packed.to_str().unwrap(), "-o", packs.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("surplus"), "{err}");
}

#[test]
fn ragged_grid_is_rejected() {
    let dir = TempDir::new().unwrap();
    let grid = write(
        dir.path(),
        "g.csv",
        "limit_1,limit_2,eff_1,eff_2,objective,num_packs\n4,4,1,1,1,1\n4,5,1,1,1,1\n5,4,1,1,1,1\n",
    );
    let (code, _, _) = run(&["heatmap", grid.to_str().unwrap(), "-o", dir.path().join("x.pgm").to_str().unwrap()]);
    assert_eq!(code, 3);
}

#[test]
fn binary_exit_status_and_env_workers() {
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.csv", TOY);
    let status = bin().args(["stats", dir.path().join("nope.csv").to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(4));

    let grid = dir.path().join("g.csv");
    let output = bin()
        .env("TUPLEPACK_WORKERS", "3")
        .args(["sweep", h.to_str().unwrap(), "--from", "3,4", "--to", "6,8", "-o", grid.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    assert_eq!(fs::read_to_string(&grid).unwrap().lines().count(), 1 + 4 * 5);
}
