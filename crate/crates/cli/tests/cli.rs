//! End-to-end tests driving the compiled `medoids` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn medoids() -> Command {
    Command::new(env!("CARGO_BIN_EXE_medoids"))
}

fn repo_data(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/orlib")
        .join(file)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_toy_csv(dir: &Path) -> PathBuf {
    let path = dir.join("toy.csv");
    std::fs::write(&path, "0,0\n1,0\n0,1\n10,10\n11,10\n10,11\n").unwrap();
    path
}

#[test]
fn cluster_is_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_toy_csv(dir.path());
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out in [&out_a, &out_b] {
        let status = medoids()
            .args(["cluster", "--input"])
            .arg(&input)
            .args(["--metric", "manhattan", "--k", "2", "--algo", "fasterpam"])
            .args(["--init", "random", "--seed", "42", "--output"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );
}

#[test]
fn pam_and_fastpam1_agree_at_cli_level() {
    let dir = tempfile::tempdir().unwrap();
    let mut results = Vec::new();
    for algo in ["pam", "fastpam1"] {
        let out = dir.path().join(format!("{algo}.json"));
        let status = medoids()
            .args(["cluster", "--format", "orlib", "--input"])
            .arg(repo_data("synth100a.txt"))
            .args(["--algo", algo, "--init", "random", "--seed", "7", "--output"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        results.push((v["medoids"].clone(), v["loss"].clone()));
    }
    assert_eq!(results[0], results[1]);
}

#[test]
fn k_zero_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_toy_csv(dir.path());
    let out = medoids()
        .args(["cluster", "--input"])
        .arg(&input)
        .args(["--k", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--k must be at least 2"), "{}", stderr(&out));
}

#[test]
fn convert_round_trip_preserves_clustering() {
    let dir = tempfile::tempdir().unwrap();
    let container = dir.path().join("synth100a.bin");
    let status = medoids()
        .args(["convert", "--input"])
        .arg(repo_data("synth100a.txt"))
        .arg("--output")
        .arg(&container)
        .status()
        .unwrap();
    assert!(status.success());

    let mut losses = Vec::new();
    for (input, format) in [
        (repo_data("synth100a.txt"), "orlib"),
        (container.clone(), "matrix"),
    ] {
        let out_file = dir.path().join(format!("{format}.json"));
        let status = medoids()
            .args(["cluster", "--format", format, "--input"])
            .arg(&input)
            .args(["--algo", "pam", "--init", "build", "--seed", "3", "--output"])
            .arg(&out_file)
            .status()
            .unwrap();
        assert!(status.success());
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
        // k defaults to the instance's p through both paths
        assert_eq!(v["k"], 5);
        losses.push(v["loss"].clone());
    }
    assert_eq!(losses[0], losses[1]);
}

#[test]
fn disconnected_graph_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("disconnected.txt");
    std::fs::write(&bad, "4 2 2\n1 2 3\n3 4 4\n").unwrap();
    let out = medoids()
        .args(["convert", "--input"])
        .arg(&bad)
        .arg("--output")
        .arg(dir.path().join("out.bin"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no path"), "{}", stderr(&out));
}

#[test]
fn seed_env_var_overrides_default() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_toy_csv(dir.path());
    let out = medoids()
        .args(["cluster", "--input"])
        .arg(&input)
        .args(["--k", "2"])
        .env("MEDOIDS_SEED", "12345")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("seed=12345"), "{}", stdout(&out));
}

#[test]
fn banner_names_rng_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_toy_csv(dir.path());
    let out = medoids()
        .args(["cluster", "--input"])
        .arg(&input)
        .args(["--k", "2"])
        .env_remove("MEDOIDS_SEED")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("rng=ChaCha8"), "{text}");
    assert!(text.contains("seed=42"), "{text}");
}

#[test]
fn bench_single_cell_row_count_and_reaggregation() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.txt");
    std::fs::write(
        &manifest,
        format!("{}\n", repo_data("synth50a.txt").display()),
    )
    .unwrap();
    let prefix = dir.path().join("report");
    let out = medoids()
        .args(["bench", "--manifest"])
        .arg(&manifest)
        .arg("--optima")
        .arg(repo_data("optima.txt"))
        .args(["--algo", "pam,fasterpam", "--init", "build", "--restarts", "4"])
        .args(["--seed", "5", "--output"])
        .arg(&prefix)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));

    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(prefix.with_extension("json")).unwrap(),
    )
    .unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2 * 4);
    let aggs = json["aggregates"].as_array().unwrap();
    assert_eq!(aggs.len(), 2);
    for agg in aggs {
        // deterministic cell: every restart sees a different permutation but
        // the mean/min relation must hold
        assert!(agg["min_loss"].as_f64().unwrap() <= agg["mean_loss"].as_f64().unwrap());
        assert_eq!(agg["n_errors"], 0);
    }
    // FasterPAM spends less swap time than PAM from the same BUILD start
    let time = |method: &str| -> f64 {
        aggs.iter()
            .find(|a| a["method"] == method)
            .unwrap()["mean_optimize_time"]
            .as_f64()
            .unwrap()
    };
    assert!(time("fasterpam") < time("pam"));

    let csv_text = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    assert_eq!(csv_text.lines().count(), 1 + 2 * 4); // header + rows
}

#[test]
fn bench_missing_instance_is_row_level() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.txt");
    std::fs::write(
        &manifest,
        format!("{}\nno-such-file.txt\n", repo_data("synth50a.txt").display()),
    )
    .unwrap();
    let prefix = dir.path().join("report");
    let out = medoids()
        .args(["bench", "--manifest"])
        .arg(&manifest)
        .args(["--algo", "fasterpam", "--init", "random", "--restarts", "2"])
        .args(["--seed", "5", "--output"])
        .arg(&prefix)
        .output()
        .unwrap();
    // one instance still succeeded, so the exit code stays 0
    assert!(out.status.success(), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(prefix.with_extension("json")).unwrap(),
    )
    .unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let failed: Vec<_> = rows
        .iter()
        .filter(|r| !r["error"].is_null())
        .collect();
    assert_eq!(failed.len(), 2);
    assert!(failed.iter().all(|r| r["instance"] == "no-such-file"));
}

#[test]
fn bench_all_failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.txt");
    std::fs::write(&manifest, "missing-a.txt\nmissing-b.txt\n").unwrap();
    let out = medoids()
        .args(["bench", "--manifest"])
        .arg(&manifest)
        .args(["--algo", "pam", "--init", "random", "--restarts", "1", "--output"])
        .arg(dir.path().join("report"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_jobs_parallelism_reproduces_serial_rows() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.txt");
    std::fs::write(
        &manifest,
        format!(
            "{}\n{}\n{}\n",
            repo_data("synth50a.txt").display(),
            repo_data("synth50b.txt").display(),
            repo_data("synth50c.txt").display()
        ),
    )
    .unwrap();
    let mut reports = Vec::new();
    for jobs in ["1", "3"] {
        let prefix = dir.path().join(format!("report{jobs}"));
        let out = medoids()
            .args(["bench", "--manifest"])
            .arg(&manifest)
            .args(["--algo", "fasterpam,clarans", "--init", "random"])
            .args(["--restarts", "3", "--seed", "11", "--jobs", jobs, "--output"])
            .arg(&prefix)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        let json: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(prefix.with_extension("json")).unwrap(),
        )
        .unwrap();
        // strip the timing fields, the only nondeterministic ones
        let mut rows = json["rows"].clone();
        for row in rows.as_array_mut().unwrap() {
            row["init_time"] = 0.into();
            row["optimize_time"] = 0.into();
        }
        reports.push(rows);
    }
    assert_eq!(reports[0], reports[1]);
}
