//! Acceptance suite. Every criterion is `#[ignore]`d because the training
//! criteria take tens of minutes on one core. Run with
//!
//! ```text
//! cargo test --release --test acceptance -- --ignored --nocapture --test-threads=1
//! ```
//!
//! Each test prints one `criterion N: PASS|FAIL` line before asserting.
//! Run artifacts land in `target/tmp/acceptance/`.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use cosmo::activations::Activation;
use cosmo::network::{init_network, NetworkConfig};
use cosmo::numerics::{grad_check, Complex};
use cosmo::spectral::{
    modulation_coverage_report, parity_vanishing_report, post_activation_spectrum, Component, PolySpectrum, TwoSided,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const DESK: &[&str] = &["--synthetic", "texture", "--size", "64", "--width", "128", "--depth", "4"];
const RC: &str = "raised_cosine(T=5,beta=0.05)";

fn verdict(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n}: {detail}");
}

fn run_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name)
}

/// Runs the CLI into `run_dir(name)` and returns that directory.
fn cosmo(name: &str, args: &[&str]) -> PathBuf {
    let dir = run_dir(name);
    let out = Command::new(env!("CARGO_BIN_EXE_cosmo"))
        .args(args)
        .args(["--out", dir.to_str().unwrap(), "--force"])
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{name} {args:?} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    dir
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn metric(dir: &Path, key: &str) -> f64 {
    summary(dir)["metrics"][key]
        .as_f64()
        .unwrap_or_else(|| panic!("{} has no metric {key}", dir.display()))
}

fn seed_args(seed: &str) -> [&str; 2] {
    ["--seed", seed]
}

#[test]
#[ignore]
fn criterion_01_parity() {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    let even = [1.0, 3.0, 10.0]
        .map(|s| Activation::gaussian(s).unwrap())
        .into_iter()
        .chain([0.5, 1.0, 2.0].map(|t| Activation::raised_cosine(t, 0.05).unwrap()));
    let odd = [1.0, 10.0, 30.0].map(|w| Activation::sine(w).unwrap());
    for (act, skip) in even.map(|a| (a, 0)).chain(odd.into_iter().map(|a| (a, 1))) {
        let r = parity_vanishing_report(&act, 512, 50, 1e-10).unwrap();
        // odd indices for even bases, even indices for odd ones
        for n in (1 - skip..=50).step_by(2) {
            worst = worst.max(r.expansion.coeffs[n].modulus());
        }
        if !r.violations.is_empty() {
            bad.push(act.to_string());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        1,
        bad.is_empty() && worst < 1e-10 && secs < 1.0,
        format!("largest vanishing |c_n| {worst:.2e}, failing bases {bad:?}, {secs:.2} s"),
    );
}

#[test]
#[ignore]
fn criterion_02_coverage() {
    let t = Instant::now();
    let bases: Vec<Activation> = [1.0, 3.0, 10.0]
        .map(|s| Activation::gaussian(s).unwrap())
        .into_iter()
        .chain([0.5, 1.0, 2.0].map(|t| Activation::raised_cosine(t, 0.05).unwrap()))
        .chain([1.0, 10.0, 30.0].map(|w| Activation::sine(w).unwrap()))
        .collect();
    let mut structural: f64 = 0.0;
    let mut flagged = Vec::new();
    for base in &bases {
        for zeta in [0.5, 1.0, 2.0] {
            let r = modulation_coverage_report(base, zeta, 512, 25, 1e-8).unwrap();
            for e in &r.entries {
                structural = structural.max(e.structural_value());
            }
            let f = r.flagged();
            if !f.is_empty() {
                flagged.push(format!("{base} zeta={zeta} n={f:?}"));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        2,
        flagged.is_empty() && structural < 1e-12 && secs < 2.0,
        format!(
            "structural zero max {structural:.2e}; {} of {} cases have an index with max(|a_n|,|b_n|) <= 1e-8: {}; {secs:.2} s",
            flagged.len(),
            3 * bases.len(),
            flagged.join("; ")
        ),
    );
    // even or odd, the real part carries the structural zero
    for base in [&bases[0], &bases[8]] {
        let r = modulation_coverage_report(base, 1.0, 512, 25, 1e-8).unwrap();
        assert!(r.entries.iter().all(|e| e.structural_zero == Component::Re));
    }
}

/// Time-domain oracle: sample `Σ α_i cos(2πt)^i` and take its DFT.
fn dft_oracle(alpha: &[f64], m: usize) -> Vec<Complex> {
    let samples: Vec<f64> = (0..m)
        .map(|j| {
            let x = (2.0 * std::f64::consts::PI * j as f64 / m as f64).cos();
            alpha.iter().rev().fold(0.0, |acc, &a| acc * x + a)
        })
        .collect();
    (0..m)
        .map(|k| {
            let mut acc = Complex::ZERO;
            for (j, &s) in samples.iter().enumerate() {
                let th = -2.0 * std::f64::consts::PI * (k * j % m) as f64 / m as f64;
                acc += Complex::from_polar(s, th);
            }
            acc.scale(1.0 / m as f64)
        })
        .collect()
}

#[test]
#[ignore]
fn criterion_03_blueshift() {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for k in [2usize, 4, 8] {
        // even coefficients only, 1, 1/2, 1/3, ...
        let alpha: Vec<f64> = (0..=k).map(|i| if i % 2 == 0 { 1.0 / (i / 2 + 1) as f64 } else { 0.0 }).collect();
        let out = post_activation_spectrum(&PolySpectrum {
            alpha: alpha.clone(),
            input: TwoSided::cosine(1.0),
        });
        let expected: Vec<i64> = (-(k as i64)..=k as i64).filter(|i| i % 2 == 0).collect();
        let support = out.support(1e-14);
        let m = 64;
        let oracle = dft_oracle(&alpha, m);
        let err = (-(k as i64)..=k as i64)
            .map(|i| out.get(i).max_abs_diff(oracle[i.rem_euclid(m as i64) as usize]))
            .fold(0.0, f64::max);
        ok &= support == expected && err < 1e-6;
        notes.push(format!("K={k} support {support:?} oracle err {err:.1e}"));
    }
    let sq = post_activation_spectrum(&PolySpectrum {
        alpha: vec![0.0, 0.0, 1.0],
        input: TwoSided::cosine(1.0),
    });
    let exact = sq.get(0) == Complex::real(0.5) && sq.get(2) == Complex::real(0.25) && sq.get(-2) == Complex::real(0.25);
    let secs = t.elapsed().as_secs_f64();
    verdict(
        3,
        ok && exact && secs < 1.0,
        format!("{}; cos^2 -> (1/2, 1/4) exact: {exact}; {secs:.2} s", notes.join("; ")),
    );
}

#[test]
#[ignore]
fn criterion_04_gradients() {
    let t = Instant::now();
    let net = init_network(NetworkConfig {
        depth: 4,
        width: 16,
        seed: 4,
        ..NetworkConfig::default()
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let coords: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let targets: Vec<f64> = (0..300).map(|_| rng.random_range(0.0..=1.0)).collect();
    let (_, grad) = net.loss_and_grad(&coords, &targets, None).unwrap();
    let err = grad_check(
        |p| {
            let mut m = net.clone();
            m.params_mut().copy_from_slice(p);
            m.loss(&coords, &targets, None).unwrap()
        },
        &grad,
        net.params(),
        1e-5,
    )
    .unwrap();
    let secs = t.elapsed().as_secs_f64();
    verdict(
        4,
        err < 1e-4 && secs < 10.0,
        format!("max relative error {err:.2e} over {} parameters at h=1e-5; {secs:.2} s", grad.len()),
    );
}

#[test]
#[ignore]
fn criterion_05_modulation_benefit() {
    let t = Instant::now();
    let mut wins = 0;
    let mut rows = Vec::new();
    for seed in SEEDS {
        let s = seed.to_string();
        let train = [&seed_args(&s)[..], &["--epochs", "500"]].concat();
        let cosmo_dir = cosmo(&format!("c5-cosmo-{seed}"), &[&["fit"], DESK, &train].concat());
        let rc_dir = cosmo(&format!("c5-rc-{seed}"), &[&["fit"], DESK, &train, &["--activation", RC]].concat());
        let (pc, pr) = (metric(&cosmo_dir, "psnr"), metric(&rc_dir, "psnr"));
        wins += usize::from(pc - pr >= 2.0);
        rows.push(format!("seed {seed}: {pc:.2} vs {pr:.2}"));
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        5,
        wins >= 4 && secs < 600.0,
        format!("cosmo beats raised cosine by >= 2 dB in {wins}/5 ({}); {secs:.0} s", rows.join(", ")),
    );
}

#[test]
#[ignore]
fn criterion_06_desk_fit() {
    let t = Instant::now();
    let dir = cosmo("c6", &[&["fit"], DESK, &["--epochs", "1000", "--seed", "0"]].concat());
    let p = metric(&dir, "psnr");
    let secs = t.elapsed().as_secs_f64();
    verdict(6, p >= 30.0 && secs < 900.0, format!("PSNR {p:.2} dB after 1000 epochs; {secs:.0} s"));
}

#[test]
#[ignore]
fn criterion_07_width_trend() {
    let mut good = 0;
    let mut rows = Vec::new();
    for seed in SEEDS {
        let s = seed.to_string();
        let psnrs: Vec<f64> = ["32", "64", "128"]
            .iter()
            .map(|w| {
                let args = [
                    "fit", "--synthetic", "texture", "--size", "64", "--width", w, "--depth", "3", "--epochs", "500",
                    "--seed", &s,
                ];
                metric(&cosmo(&format!("c7-w{w}-{seed}"), &args), "psnr")
            })
            .collect();
        good += usize::from(psnrs.windows(2).all(|p| p[1] >= p[0]));
        rows.push(format!("seed {seed}: {:.2}/{:.2}/{:.2}", psnrs[0], psnrs[1], psnrs[2]));
    }
    verdict(
        7,
        good >= 4,
        format!("PSNR non-decreasing over widths 32/64/128 in {good}/5 ({})", rows.join(", ")),
    );
}

#[test]
#[ignore]
fn criterion_08_denoising() {
    let dir = cosmo(
        "c8",
        &[&["denoise"], DESK, &["--photons", "30", "--readout", "2", "--epochs", "500", "--seed", "0"]].concat(),
    );
    let (noisy, recon) = (metric(&dir, "psnr_noisy"), metric(&dir, "psnr_recon"));
    verdict(
        8,
        recon - noisy >= 3.0,
        format!("noisy {noisy:.2} dB, reconstruction {recon:.2} dB, gain {:+.2} dB", recon - noisy),
    );
}

#[test]
#[ignore]
fn criterion_09_superres() {
    let dir = cosmo("c9", &[&["superres"], DESK, &["--factor", "4", "--epochs", "500", "--seed", "0"]].concat());
    let (p, nn) = (metric(&dir, "psnr"), metric(&dir, "psnr_nearest"));
    verdict(9, p > nn, format!("network {p:.2} dB vs nearest neighbour {nn:.2} dB at 4x"));
}

#[test]
#[ignore]
fn criterion_10_inpainting() {
    let dir = cosmo("c10", &[&["inpaint"], DESK, &["--fraction", "0.2", "--epochs", "500", "--seed", "0"]].concat());
    let p = metric(&dir, "psnr_recon");
    verdict(10, p >= 20.0, format!("full-image PSNR {p:.2} dB from 20% of the pixels"));
}

#[test]
#[ignore]
fn criterion_11_occupancy() {
    let t = Instant::now();
    let dir = cosmo(
        "c11",
        &[
            "occupancy", "--shape", "sphere", "--radius", "0.5", "--resolution", "32", "--width", "64", "--depth", "3",
            "--epochs", "300", "--seed", "0",
        ],
    );
    let v = metric(&dir, "iou");
    let secs = t.elapsed().as_secs_f64();
    verdict(11, v >= 0.95 && secs < 600.0, format!("IoU {v:.4}; {secs:.0} s"));
}

fn hidden_band_mean(dir: &Path) -> f64 {
    let v: Vec<f64> = summary(dir)["metrics"]["high_band_mean"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
#[ignore]
fn criterion_12_layer_spectra() {
    let common = ["spectrum", "--synthetic", "chirp", "--size", "64", "--width", "64", "--depth", "4", "--epochs", "300"];
    let mut wins = 0;
    let mut rows = Vec::new();
    for seed in SEEDS {
        let s = seed.to_string();
        let c = cosmo(&format!("c12-cosmo-{seed}"), &[&common[..], &seed_args(&s)].concat());
        let sine = cosmo(
            &format!("c12-sine-{seed}"),
            &[
                &common[..],
                &seed_args(&s),
                &["--activation", "sine(omega0=30)", "--real-weights", "--siren-init", "30"],
            ]
            .concat(),
        );
        let (hc, hs) = (hidden_band_mean(&c), hidden_band_mean(&sine));
        wins += usize::from(hc > hs);
        rows.push(format!("seed {seed}: {hc:.3e} vs {hs:.3e}"));
    }
    verdict(
        12,
        wins >= 4,
        format!("cosmo high-band mean above the sine network in {wins}/5 ({})", rows.join(", ")),
    );
}

#[test]
#[ignore]
fn criterion_13_reproducibility() {
    let small = ["--size", "16", "--width", "16", "--depth", "3", "--epochs", "30", "--seed", "11"];
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("fit", [&["fit", "--synthetic", "texture"][..], &small].concat()),
        ("denoise", [&["denoise", "--synthetic", "texture"][..], &small].concat()),
        ("superres", [&["superres", "--synthetic", "texture", "--factor", "2"][..], &small].concat()),
        ("inpaint", [&["inpaint", "--synthetic", "texture"][..], &small].concat()),
        ("spectrum", [&["spectrum", "--synthetic", "chirp"][..], &small].concat()),
        (
            "occupancy",
            vec![
                "occupancy", "--resolution", "8", "--width", "16", "--depth", "3", "--epochs", "30", "--seed", "11",
            ],
        ),
    ];
    let mut mismatched = Vec::new();
    for (name, args) in &runs {
        let first = cosmo(&format!("c13-{name}"), args);
        let summary_path = first.join("summary.json");
        let again = cosmo(&format!("c13-{name}-replay"), &["replay", "--summary", summary_path.to_str().unwrap()]);
        let a = std::fs::read(first.join("metrics.csv")).unwrap();
        let b = std::fs::read(again.join("metrics.csv")).unwrap();
        if a != b || a.is_empty() {
            mismatched.push(*name);
        }
    }
    verdict(
        13,
        mismatched.is_empty(),
        format!("{} runs replayed from summary.json, metrics.csv mismatches: {mismatched:?}", runs.len()),
    );
}
