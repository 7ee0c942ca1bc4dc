use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn cosmo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cosmo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = cosmo(args);
    assert!(
        out.status.success(),
        "{args:?}: {}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn metric(dir: &Path, key: &str) -> f64 {
    summary(dir)["metrics"][key].as_f64().unwrap_or_else(|| panic!("no metric {key}"))
}

const SMALL: &[&str] = &["--size", "16", "--width", "16", "--depth", "3", "--epochs", "40"];

fn with<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(tail).copied().collect()
}

#[test]
fn fit_writes_artifacts_and_replays_byte_for_byte() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&with(&["fit", "--synthetic", "texture", "--seed", "3", "--out", a.to_str().unwrap()], SMALL));
    for f in ["target.ppm", "recon.ppm", "metrics.csv", "model.json", "summary.json"] {
        assert!(a.join(f).is_file(), "{f}");
    }
    let s = summary(&a);
    assert_eq!(s["command"], "fit");
    assert_eq!(s["seed"], 3);
    let metrics = std::fs::read_to_string(a.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("epoch,loss,psnr\n"));
    assert_eq!(metrics.lines().count(), 41);

    ok(&["replay", "--summary", a.join("summary.json").to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(metrics, std::fs::read_to_string(b.join("metrics.csv")).unwrap());
    // everything but the overridden run directory is carried over
    let strip = |mut c: Value| {
        c.as_object_mut().unwrap().remove("out");
        c
    };
    assert_eq!(strip(summary(&b)["config"].clone()), strip(s["config"].clone()));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("missing.ppm");
    let out = cosmo(&["fit", "--image", missing.to_str().unwrap(), "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = cosmo(&["cheb", "--nmax", "600", "--out", tmp.path().join("y").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = cosmo(&["cheb", "--activation", "raised_cosine(T=1", "--out", tmp.path().join("z").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('^'));

    let out = cosmo(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));

    // an existing non-empty run directory needs --force
    let d = tmp.path().join("c");
    ok(&["cheb", "--out", d.to_str().unwrap()]);
    assert_eq!(cosmo(&["cheb", "--out", d.to_str().unwrap()]).status.code(), Some(2));
    ok(&["cheb", "--out", d.to_str().unwrap(), "--force"]);
}

#[test]
fn cheb_reports() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path().join("parity");
    ok(&[
        "cheb",
        "--activation",
        "gaussian(s=3)",
        "--report",
        "parity",
        "--compare",
        "relu",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(metric(&d, "violations"), 0.0);
    let coeffs = std::fs::read_to_string(d.join("coeffs.csv")).unwrap();
    assert!(coeffs.starts_with("n,a_re,a_im\n"));
    assert_eq!(coeffs.lines().count(), 52);
    let decay = std::fs::read_to_string(d.join("decay.csv")).unwrap();
    assert!(decay.starts_with("n,"), "{decay}");
    assert!(decay.lines().next().unwrap().ends_with(",relu"));
    assert!(d.join("report.json").is_file());

    let c = tmp.path().join("coverage");
    ok(&[
        "cheb",
        "--activation",
        "cosmo(raised_cosine(T=1,beta=0.05),zeta=1)",
        "--report",
        "coverage",
        "--nmax",
        "11",
        "--tol",
        "1e-8",
        "--out",
        c.to_str().unwrap(),
    ]);
    assert_eq!(metric(&c, "flagged"), 0.0);
}

#[test]
fn blueshift_csv() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path().join("b");
    ok(&[
        "spectrum",
        "--blueshift",
        "--order",
        "4",
        "--activation",
        "gaussian(s=1)",
        "--out",
        d.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(d.join("blueshift.csv")).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("k,re,im"));
    assert_eq!(rows.count(), 9);
    assert_eq!(metric(&d, "support_width"), 4.0);
}

#[test]
fn image_tasks_report_their_metrics() {
    let tmp = TempDir::new().unwrap();
    let base = ["--synthetic", "texture", "--size", "24", "--width", "24", "--depth", "3", "--epochs", "60"];

    let d = tmp.path().join("denoise");
    ok(&with(&["denoise", "--out", d.to_str().unwrap()], &base));
    assert!(d.join("noisy.ppm").is_file() && d.join("clean.ppm").is_file());
    assert!(metric(&d, "psnr_noisy").is_finite() && metric(&d, "psnr_recon").is_finite());

    let s = tmp.path().join("superres");
    ok(&with(&["superres", "--out", s.to_str().unwrap()], &base));
    assert_eq!(metric(&s, "factor"), 4.0);
    assert!(metric(&s, "psnr_nearest").is_finite());
    let bad = cosmo(&with(&["superres", "--factor", "3", "--out", tmp.path().join("s3").to_str().unwrap()], &base));
    assert_eq!(bad.status.code(), Some(2));

    let i = tmp.path().join("inpaint");
    ok(&with(&["inpaint", "--out", i.to_str().unwrap()], &base));
    assert_eq!(metric(&i, "observed"), (0.2f64 * 576.0).round());
}

#[test]
fn occupancy_writes_volumes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path().join("occ");
    ok(&[
        "occupancy",
        "--resolution",
        "8",
        "--width",
        "16",
        "--depth",
        "3",
        "--epochs",
        "30",
        "--out",
        d.to_str().unwrap(),
    ]);
    let iou = metric(&d, "iou");
    assert!((0.0..=1.0).contains(&iou));
    let raw = std::fs::read(d.join("gt.raw")).unwrap();
    assert_eq!(&raw[..8], b"COSMOVOL");
    assert_eq!(raw.len(), 16 + 512);

    // a volume written by one run is accepted as input by another
    let e = tmp.path().join("occ2");
    ok(&[
        "occupancy",
        "--volume",
        d.join("gt.raw").to_str().unwrap(),
        "--width",
        "16",
        "--depth",
        "3",
        "--epochs",
        "5",
        "--out",
        e.to_str().unwrap(),
    ]);
}

#[test]
fn sweep_lists_every_cell() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path().join("sweep");
    ok(&[
        "sweep",
        "--synthetic",
        "chirp",
        "--size",
        "12",
        "--widths",
        "8,12",
        "--depths",
        "2,3",
        "--epochs",
        "10",
        "--jobs",
        "2",
        "--out",
        d.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(d.join("sweep.csv")).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("width,depth,lr,psnr,epochs,status"));
    let rows: Vec<&str> = rows.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.ends_with(",ok")), "{rows:?}");
}
