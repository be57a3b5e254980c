use std::path::Path;
use std::process::Command;

fn ncdlab(args: &[&str], cwd: &Path) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_ncdlab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "ncdlab {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn synth_ncd_tree_score() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ncdlab(
        &[
            "synth",
            "-o",
            "c",
            "--sources",
            "2",
            "--docs-per-source",
            "2",
            "--bytes",
            "2000",
            "--seed",
            "4",
        ],
        d,
    );
    assert!(d.join("c/manifest.tsv").exists() && d.join("c/freq.tsv").exists());

    ncdlab(
        &[
            "ncd",
            "--manifest",
            "c/manifest.tsv",
            "--cache",
            "sizes.tsv",
            "-o",
            "m.tsv",
        ],
        d,
    );
    let matrix = std::fs::read_to_string(d.join("m.tsv")).unwrap();
    assert!(
        matrix.starts_with("ids\tS0.D0\tS0.D1\tS1.D0\tS1.D1\n"),
        "{matrix}"
    );
    assert!(d.join("sizes.tsv").exists());

    let newick = ncdlab(&["tree", "--matrix", "m.tsv", "--budget", "200"], d);
    std::fs::write(d.join("t.nwk"), &newick).unwrap();
    let score = ncdlab(&["score", "--tree", "t.nwk"], d);
    assert!(score.contains("clustering_error\t2\n"), "{score}");
    assert!(score.contains("ideal_error\t2\n"), "{score}");
}

#[test]
fn distort_writes_a_loadable_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ncdlab(
        &[
            "synth",
            "-o",
            "c",
            "--sources",
            "2",
            "--docs-per-source",
            "2",
            "--bytes",
            "500",
        ],
        d,
    );
    ncdlab(
        &[
            "distort",
            "--manifest",
            "c/manifest.tsv",
            "--freq",
            "c/freq.tsv",
            "--order",
            "most",
            "--mode",
            "asterisk",
            "--p",
            "1",
            "-o",
            "x",
        ],
        d,
    );
    let text = std::fs::read_to_string(d.join("x/S0.D0.txt")).unwrap();
    assert_eq!(text.len(), 500);
    assert!(text.bytes().all(|b| b == b'*' || b == b' '));
    assert!(d.join("x/manifest.tsv").exists());
}

#[test]
fn sweep_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ncdlab(
        &[
            "synth",
            "-o",
            "c",
            "--sources",
            "2",
            "--docs-per-source",
            "2",
            "--bytes",
            "800",
        ],
        d,
    );
    let out = ncdlab(
        &[
            "sweep",
            "--manifest",
            "c/manifest.tsv",
            "--freq",
            "c/freq.tsv",
            "-o",
            "out",
            "--orders",
            "most,random",
            "--modes",
            "asterisk",
            "--p-grid",
            "0,0.5",
            "--trials",
            "2",
            "--budget",
            "100",
            "--jobs",
            "1",
        ],
        d,
    );
    assert!(out.starts_with("6 cells, 0 failed"), "{out}");
    let csv = std::fs::read_to_string(d.join("out/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(d.join("out/plot.gp").exists());
    assert!(d.join("out/series/asterisk_error_by_order.tsv").exists());
}
