use std::path::Path;
use std::process::{Command, Output};

fn sfbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfbench")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = sfbench(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn table(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn without_seconds(rows: &[String]) -> Vec<String> {
    rows.iter()
        .map(|r| {
            let mut cells: Vec<&str> = r.split(',').collect();
            cells.remove(6);
            cells.join(",")
        })
        .collect()
}

#[test]
fn synth_stream_effect_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("blobs.csv");
    let data_s = data.to_str().unwrap();
    ok(&[
        "synth",
        "--kind",
        "blobs",
        "--n",
        "400",
        "--features",
        "3",
        "--classes",
        "3",
        "--noise",
        "0.3",
        "--out",
        data_s,
    ]);
    assert_eq!(std::fs::read_to_string(&data).unwrap().lines().count(), 401);

    let results = dir.path().join("r.csv");
    let results_s = results.to_str().unwrap();
    ok(&[
        "stream", "--data", data_s, "--trees", "8", "--reps", "2", "--seed", "5", "--out", results_s,
    ]);
    let rows = table(&results);
    // header + 2 runs x 4 algorithms x 3 batches of the 300 training rows
    assert_eq!(rows.len(), 1 + 2 * 4 * 3);
    assert!(dir.path().join("r.csv.labels.json").exists());
    let text = std::fs::read_to_string(&results).unwrap();
    assert!(text.contains("# seed=5") && text.contains("# node_bytes=64"));

    let effect = ok(&["effect", results_s]);
    let lines: Vec<&str> = effect.lines().collect();
    assert_eq!(
        lines[0],
        "dataset,batch,sample_size,sdf_mean,df_mean,effect_size,substantial_shift"
    );
    assert_eq!(lines.len(), 4);
    // both forests share their seeds, so they agree on the first batch
    assert!(lines[1].starts_with("blobs,1,100,") && lines[1].contains(",0,"));
}

#[test]
fn runs_are_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut tables = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("cv{threads}.csv"));
        ok(&[
            "cv",
            "--synthetic",
            "concentric",
            "--samples",
            "300",
            "--noise",
            "0.2",
            "--trees",
            "6",
            "--folds",
            "3",
            "--seed",
            "9",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        tables.push(without_seconds(&table(&out)));
    }
    assert_eq!(tables[0], tables[1]);
    assert_eq!(tables[0].len(), 1 + 3 * 4 * 2);
}

#[test]
fn separate_test_file_and_label_names() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    let mut t = String::from("x,kind\n");
    for i in 0..60 {
        t += &format!("{},{}\n", i, if i < 30 { "low" } else { "high" });
    }
    std::fs::write(&train, &t).unwrap();
    std::fs::write(&test, "x,kind\n3,low\n50,high\n").unwrap();
    let out = ok(&[
        "stream",
        "--data",
        train.to_str().unwrap(),
        "--test",
        test.to_str().unwrap(),
        "--label-col",
        "kind",
        "--batch-size",
        "20",
        "--trees",
        "5",
        "--reps",
        "1",
        "--algorithms",
        "dt",
    ]);
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("dt,train,0,3,60,1.0,"), "{last}");
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,y\n1,0\n,1\n").unwrap();
    let cases: [&[&str]; 5] = [
        &["stream", "--data", "/does/not/exist.csv"],
        &["stream", "--data", bad.to_str().unwrap()],
        &["stream", "--synthetic", "blobs", "--algorithms", "sdf,bogus"],
        &["stream", "--synthetic", "blobs", "--trees", "2", "--replace", "3"],
        &["effect", "/does/not/exist.csv"],
    ];
    for args in cases {
        let out = sfbench(args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("sfbench: "), "{args:?}: {err}");
    }
    let out = sfbench(&["stream", "--data", bad.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert!(!sfbench(&["frobnicate"]).status.success());
}
