use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::{json, Map, Value};

use crate::activations::Activation;
use crate::network::{init_network, save_checkpoint, Bounds, InitScheme, Network, NetworkConfig, ParamBounds, TrainConfig};
use crate::spectral::{
    decay_profile, layer_spectrum, modulation_coverage_report, parity_vanishing_report, post_activation_spectrum,
    sig17, ChebyshevExpansion, PolySpectrum, TwoSided,
};
use crate::tasks::{
    apply_mask, build_grid, crop, derive_seed, downsample, iou, photon_noise, psnr, radial_chirp, sample_mask, ssim,
    synthetic_occupancy, synthetic_texture, upsample_nearest, ImageGrid, Shape, VolumeGrid,
};

use super::session::{default_out, write_csv, CliError, Session};
use super::{
    parse_activation, ChebArgs, Command, DenoiseArgs, FitArgs, InpaintArgs, ModelArgs, OccupancyArgs, OutArgs, Report,
    ReplayArgs, ShapeKind, SourceArgs, SpectrumArgs, SuperresArgs, SweepArgs, Synthetic, TrainArgs,
};

pub(crate) fn run(command: Command) -> Result<PathBuf, CliError> {
    let config = serde_json::to_value(&command)?;
    match command {
        Command::Fit(a) => fit(a, config),
        Command::Denoise(a) => denoise(a, config),
        Command::Superres(a) => superres(a, config),
        Command::Inpaint(a) => inpaint(a, config),
        Command::Occupancy(a) => occupancy(a, config),
        Command::Cheb(a) => cheb(a, config),
        Command::Spectrum(a) => spectrum(a, config),
        Command::Sweep(a) => sweep(a, config),
        Command::Replay(a) => replay(a),
    }
}

fn open(name: &'static str, seed: u64, out: &OutArgs, config: Value) -> Result<Session, CliError> {
    let dir = out.out.clone().unwrap_or_else(|| default_out(name, seed));
    Session::open(name, seed, config, dir, out.force)
}

fn activation(expr: &str) -> Result<Activation, CliError> {
    parse_activation(expr).map_err(|e| CliError::Usage(format!("bad activation expression: {}", e.annotate(expr))))
}

fn bounds(text: &str, what: &str) -> Result<Bounds, CliError> {
    let bad = || CliError::Usage(format!("{what} must be `lo,hi` with lo < hi, got {text:?}"));
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(bad());
    }
    Ok(Bounds::new(lo, hi))
}

fn network(model: &ModelArgs, in_dim: usize, out_dim: usize, seed: u64) -> Result<Network, CliError> {
    let cfg = NetworkConfig {
        depth: model.depth,
        width: model.width,
        in_dim,
        out_dim,
        activation: activation(&model.activation)?,
        bounds: ParamBounds {
            bandwidth: bounds(&model.t_bounds, "--t-bounds")?,
            zeta: bounds(&model.zeta_bounds, "--zeta-bounds")?,
        },
        learn_activation: !model.freeze_activation,
        real_weights: model.real_weights,
        init: model.siren_init.map_or(InitScheme::Uniform, |omega0| InitScheme::Siren { omega0 }),
        seed: derive_seed(seed, "init"),
    };
    Ok(init_network(cfg)?)
}

fn train_config(t: &TrainArgs, seed: u64) -> TrainConfig {
    TrainConfig {
        epochs: t.epochs,
        lr0: t.lr,
        decay: t.decay,
        seed,
        log_every: t.log_every,
    }
}

fn load_source(s: &SourceArgs) -> Result<ImageGrid, CliError> {
    match (&s.image, s.synthetic) {
        (Some(path), _) => Ok(ImageGrid::load_ppm(path)?),
        (None, Some(kind)) => {
            if s.size < 2 {
                return Err(CliError::Usage(format!("--size must be at least 2, got {}", s.size)));
            }
            Ok(match kind {
                Synthetic::Texture => synthetic_texture(s.size, s.image_seed),
                Synthetic::Chirp => radial_chirp(s.size, s.chirp_rate),
                Synthetic::Constant => ImageGrid::constant(s.size, s.size, 3, 0.5)?,
            })
        }
        (None, None) => Err(CliError::Usage("give --image <file.ppm> or --synthetic <kind>".into())),
    }
}

fn image_metrics(metrics: &mut Map<String, Value>, suffix: &str, pred: &ImageGrid, gt: &ImageGrid) -> Result<(), CliError> {
    let key = |k: &str| if suffix.is_empty() { k.to_string() } else { format!("{k}_{suffix}") };
    metrics.insert(key("psnr"), json!(psnr(pred, gt)?));
    if gt.height() >= 11 && gt.width() >= 11 {
        metrics.insert(key("ssim"), json!(ssim(pred, gt)?));
    }
    Ok(())
}

fn predict_image(net: &Network, h: usize, w: usize, c: usize) -> Result<ImageGrid, CliError> {
    let out = net.forward(build_grid(&[h, w]).coords())?;
    Ok(ImageGrid::from_prediction(h, w, c, &out)?)
}

/// Trains on `targets` at `coords` and writes the reconstruction, the model,
/// and the shared summary fields.
fn fit_and_reconstruct(
    s: &mut Session,
    a: &FitArgs,
    coords: &[f64],
    targets: &[f64],
    mask: Option<&[bool]>,
    shape: (usize, usize, usize),
) -> Result<(Network, ImageGrid, Map<String, Value>), CliError> {
    let (h, w, c) = shape;
    let net = network(&a.model, 2, c, a.seed)?;
    let (net, rec) = s.train(net, coords, targets, &train_config(&a.train, a.seed), mask)?;
    let recon = predict_image(&net, h, w, c)?;
    recon.save_ppm(&s.file("recon.ppm"))?;
    save_checkpoint(&net, &s.file("model.json"))?;
    let mut metrics = Map::new();
    metrics.insert("final_loss".into(), json!(rec.final_loss));
    metrics.insert("initial_loss".into(), json!(rec.initial_loss));
    Ok((net, recon, metrics))
}

fn fit(a: FitArgs, config: Value) -> Result<PathBuf, CliError> {
    let img = load_source(&a.source)?;
    let mut s = open("fit", a.seed, &a.out, config)?;
    if a.source.synthetic.is_some() {
        img.save_ppm(&s.file("target.ppm"))?;
    }
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let grid = build_grid(&[h, w]);
    let (_, recon, mut metrics) = fit_and_reconstruct(&mut s, &a, grid.coords(), img.pixels(), None, (h, w, c))?;
    image_metrics(&mut metrics, "", &recon, &img)?;
    s.finish(metrics)?;
    Ok(s.dir)
}

fn denoise(a: DenoiseArgs, config: Value) -> Result<PathBuf, CliError> {
    let img = load_source(&a.fit.source)?;
    let noisy = photon_noise(&img, a.photons, a.readout, derive_seed(a.fit.seed, "noise"))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut s = open("denoise", a.fit.seed, &a.fit.out, config)?;
    img.save_ppm(&s.file("clean.ppm"))?;
    noisy.save_ppm(&s.file("noisy.ppm"))?;
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let grid = build_grid(&[h, w]);
    let (_, recon, mut metrics) = fit_and_reconstruct(&mut s, &a.fit, grid.coords(), noisy.pixels(), None, (h, w, c))?;
    image_metrics(&mut metrics, "noisy", &noisy, &img)?;
    image_metrics(&mut metrics, "recon", &recon, &img)?;
    s.finish(metrics)?;
    Ok(s.dir)
}

/// Coordinates of the `k × k` block centres of a `full`-long axis on the
/// full-resolution lattice.
fn block_centres(full: usize, k: usize) -> Vec<f64> {
    (0..full / k)
        .map(|i| {
            let p = (k * i) as f64 + 0.5 * (k - 1) as f64;
            2.0 * p / (full - 1) as f64 - 1.0
        })
        .collect()
}

fn superres(a: SuperresArgs, config: Value) -> Result<PathBuf, CliError> {
    let k = a.factor;
    if !(a.allow_any || [2, 4, 6].contains(&k)) || k < 2 {
        return Err(CliError::Usage(format!("--factor must be 2, 4 or 6 (or pass --allow-any), got {k}")));
    }
    let img = load_source(&a.fit.source)?;
    let (h, w, c) = ((img.height() / k) * k, (img.width() / k) * k, img.channels());
    if h == 0 || w == 0 {
        return Err(CliError::Usage(format!("factor {k} exceeds the image size")));
    }
    let gt = crop(&img, h, w)?;
    let low = downsample(&gt, k)?;
    let mut s = open("superres", a.fit.seed, &a.fit.out, config)?;
    gt.save_ppm(&s.file("target.ppm"))?;
    low.save_ppm(&s.file("lowres.ppm"))?;
    let nearest = upsample_nearest(&low, k);
    nearest.save_ppm(&s.file("nearest.ppm"))?;

    let (ys, xs) = (block_centres(h, k), block_centres(w, k));
    let coords: Vec<f64> = ys.iter().flat_map(|&y| xs.iter().flat_map(move |&x| [y, x])).collect();
    let (_, recon, mut metrics) = fit_and_reconstruct(&mut s, &a.fit, &coords, low.pixels(), None, (h, w, c))?;
    image_metrics(&mut metrics, "", &recon, &gt)?;
    image_metrics(&mut metrics, "nearest", &nearest, &gt)?;
    metrics.insert("factor".into(), json!(k));
    s.finish(metrics)?;
    Ok(s.dir)
}

fn inpaint(a: InpaintArgs, config: Value) -> Result<PathBuf, CliError> {
    let img = load_source(&a.fit.source)?;
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let mask = sample_mask(h, w, a.fraction, derive_seed(a.fit.seed, "mask")).map_err(|e| CliError::Usage(e.to_string()))?;
    let masked = apply_mask(&img, &mask);
    let mut s = open("inpaint", a.fit.seed, &a.fit.out, config)?;
    masked.save_ppm(&s.file("masked.ppm"))?;
    let grid = build_grid(&[h, w]);
    let (_, recon, mut metrics) = fit_and_reconstruct(&mut s, &a.fit, grid.coords(), img.pixels(), Some(&mask), (h, w, c))?;
    image_metrics(&mut metrics, "input", &masked, &img)?;
    image_metrics(&mut metrics, "recon", &recon, &img)?;
    metrics.insert("observed".into(), json!(mask.iter().filter(|&&m| m).count()));
    s.finish(metrics)?;
    Ok(s.dir)
}

fn occupancy(a: OccupancyArgs, config: Value) -> Result<PathBuf, CliError> {
    let gt = match &a.volume {
        Some(p) => VolumeGrid::load_raw(p)?,
        None => {
            let shape = match a.shape {
                ShapeKind::Sphere => Shape::Sphere { radius: a.radius },
                ShapeKind::Torus => Shape::Torus {
                    major: a.major,
                    minor: a.minor,
                },
            };
            synthetic_occupancy(shape, a.resolution).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    let d = gt.resolution();
    let mut s = open("occupancy", a.seed, &a.out, config)?;
    gt.save_raw(&s.file("gt.raw"))?;
    let grid = build_grid(&[d, d, d]);
    let net = network(&a.model, 3, 1, a.seed)?;
    let (net, rec) = s.train(net, grid.coords(), gt.values(), &train_config(&a.train, a.seed), None)?;
    let recon = VolumeGrid::from_prediction(d, &net.forward(grid.coords())?)?;
    recon.save_raw(&s.file("recon.raw"))?;
    save_checkpoint(&net, &s.file("model.json"))?;
    let mut metrics = Map::new();
    metrics.insert("final_loss".into(), json!(rec.final_loss));
    metrics.insert("iou".into(), json!(iou(&recon, &gt, 0.5)?));
    metrics.insert("occupied_fraction".into(), json!(gt.occupied_fraction(0.5)));
    s.finish(metrics)?;
    Ok(s.dir)
}

fn cheb(a: ChebArgs, config: Value) -> Result<PathBuf, CliError> {
    let act = activation(&a.activation)?;
    let compare = a.compare.iter().map(|e| activation(e)).collect::<Result<Vec<_>, _>>()?;
    // validate before touching the output directory
    let exp = ChebyshevExpansion::of_activation(&act, a.nodes, a.nmax)?;
    let mut s = open("cheb", a.seed, &a.out, config)?;
    exp.write_csv(BufWriter::new(File::create(s.file("coeffs.csv"))?))?;
    let mut all = vec![act.clone()];
    all.extend(compare);
    decay_profile(&all, a.nodes, a.nmax)?.write_csv(BufWriter::new(File::create(s.file("decay.csv"))?))?;

    let mut metrics = Map::new();
    match a.report {
        Report::None => {}
        Report::Parity => {
            let r = parity_vanishing_report(&act, a.nodes, a.nmax, a.tol)?;
            let text = format!(
                "activation: {}\nparity: {:?}\napplicable: {}\ntol: {:e}\nviolations: {}\nindices: {:?}\n",
                r.label,
                r.parity,
                r.applicable(),
                r.tol,
                r.violations.len(),
                r.violations
            );
            std::fs::write(s.file("report.txt"), text)?;
            std::fs::write(s.file("report.json"), serde_json::to_string_pretty(&r)?)?;
            metrics.insert("violations".into(), json!(r.violations.len()));
            metrics.insert("parity".into(), json!(r.parity));
        }
        Report::Coverage => {
            let Activation::Cosmo { base, zeta } = &act else {
                return Err(CliError::Usage(format!("coverage needs a cosmo(...) activation, got {act}")));
            };
            let r = modulation_coverage_report(base, *zeta, a.nodes, a.nmax, a.tol)?;
            let flagged = r.flagged();
            let mut text = format!(
                "activation: {}\nbase parity: {:?}\ntol: {:e}\nflagged: {}\nindices: {:?}\n\nn,a,b,structural_zero,flagged\n",
                r.label,
                r.base_parity,
                r.tol,
                flagged.len(),
                flagged
            );
            for e in &r.entries {
                text += &format!("{},{},{},{:?},{}\n", e.n, sig17(e.a), sig17(e.b), e.structural_zero, e.flagged);
            }
            std::fs::write(s.file("report.txt"), text)?;
            std::fs::write(s.file("report.json"), serde_json::to_string_pretty(&r)?)?;
            metrics.insert("flagged".into(), json!(flagged.len()));
            metrics.insert("violations".into(), json!(flagged.len()));
        }
    }
    s.finish(metrics)?;
    Ok(s.dir)
}

fn spectrum(a: SpectrumArgs, config: Value) -> Result<PathBuf, CliError> {
    if a.blueshift {
        let act = activation(&a.fit.model.activation)?;
        let exp = ChebyshevExpansion::of_activation(&act, 512, 50.max(a.order))?;
        let alpha: Vec<f64> = exp.to_monomial(a.order).iter().map(|c| c.re).collect();
        let out = post_activation_spectrum(&PolySpectrum {
            alpha: alpha.clone(),
            input: TwoSided::cosine(1.0),
        });
        let mut s = open("spectrum", a.fit.seed, &a.fit.out, config)?;
        let rows: Vec<Vec<String>> = (-(out.half() as i64)..=out.half() as i64)
            .map(|k| vec![k.to_string(), sig17(out.get(k).re), sig17(out.get(k).im)])
            .collect();
        write_csv(BufWriter::new(File::create(s.file("blueshift.csv"))?), &["k", "re", "im"], &rows)?;
        let mut metrics = Map::new();
        metrics.insert("alpha".into(), json!(alpha));
        metrics.insert("support_width".into(), json!(out.support_width(1e-14)));
        s.finish(metrics)?;
        return Ok(s.dir);
    }
    let img = load_source(&a.fit.source)?;
    let mut s = open("spectrum", a.fit.seed, &a.fit.out, config)?;
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let grid = build_grid(&[h, w]);
    let (net, recon, mut metrics) = fit_and_reconstruct(&mut s, &a.fit, grid.coords(), img.pixels(), None, (h, w, c))?;
    image_metrics(&mut metrics, "", &recon, &img)?;
    let spec = layer_spectrum(&net, &grid)?;
    let mut header = vec!["bin".to_string()];
    header.extend((0..spec.profiles.len()).map(|l| format!("layer{}", l + 1)));
    let rows: Vec<Vec<String>> = (0..=w / 2)
        .map(|b| {
            let mut r = vec![b.to_string()];
            r.extend(spec.profiles.iter().map(|p| sig17(p[b])));
            r
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(BufWriter::new(File::create(s.file("layers.csv"))?), &header_refs, &rows)?;
    metrics.insert("high_band_mean".into(), json!(spec.band_mean(w / 4)));
    metrics.insert("parseval_error".into(), json!(spec.parseval_error));
    s.finish(metrics)?;
    Ok(s.dir)
}

struct Cell {
    width: usize,
    depth: usize,
    lr: f64,
}

fn sweep(a: SweepArgs, config: Value) -> Result<PathBuf, CliError> {
    if a.widths.is_empty() || a.depths.is_empty() || a.lrs.is_empty() {
        return Err(CliError::Usage("--widths, --depths and --lrs must be non-empty".into()));
    }
    activation(&a.activation)?;
    let img = load_source(&a.source)?;
    let mut s = open("sweep", a.seed, &a.out, config)?;
    let mut cells = Vec::new();
    for &width in &a.widths {
        for &depth in &a.depths {
            for &lr in &a.lrs {
                cells.push(Cell { width, depth, lr });
            }
        }
    }
    cells.sort_by(|x, y| (x.width, x.depth).cmp(&(y.width, y.depth)).then(x.lr.total_cmp(&y.lr)));
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let grid = build_grid(&[h, w]);
    let results: Mutex<Vec<Option<(f64, usize, String)>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let run_cell = |cell: &Cell| -> Result<(f64, usize), CliError> {
        let dir = s.dir.join(format!("cell-w{}-d{}-lr{}", cell.width, cell.depth, cell.lr));
        let model = ModelArgs {
            width: cell.width,
            depth: cell.depth,
            activation: a.activation.clone(),
            freeze_activation: false,
            real_weights: false,
            siren_init: None,
            t_bounds: "0,10".into(),
            zeta_bounds: "0,3".into(),
        };
        let train = TrainArgs {
            epochs: a.epochs,
            lr: cell.lr,
            decay: a.decay,
            log_every: 1,
        };
        let cell_cfg = json!({ "width": cell.width, "depth": cell.depth, "lr": cell.lr });
        let mut cs = Session::open("sweep_cell", a.seed, cell_cfg, dir, true)?;
        let net = network(&model, 2, c, a.seed)?;
        let (net, rec) = cs.train(net, grid.coords(), img.pixels(), &train_config(&train, a.seed), None)?;
        let recon = predict_image(&net, h, w, c)?;
        let p = psnr(&recon, &img)?;
        let mut m = Map::new();
        m.insert("psnr".into(), json!(p));
        cs.finish(m)?;
        Ok((p, rec.epochs.len()))
    };
    std::thread::scope(|scope| {
        for _ in 0..a.jobs.clamp(1, cells.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(cell) = cells.get(i) else { break };
                let r = match run_cell(cell) {
                    Ok((p, e)) => (p, e, "ok".to_string()),
                    Err(e) => (f64::NAN, 0, format!("failed: {e}")),
                };
                results.lock().expect("no panics while holding the lock")[i] = Some(r);
            });
        }
    });
    let results = results.into_inner().expect("workers finished");
    let rows: Vec<Vec<String>> = cells
        .iter()
        .zip(&results)
        .map(|(cell, r)| {
            let (p, e, status) = r.clone().expect("every cell ran");
            vec![cell.width.to_string(), cell.depth.to_string(), cell.lr.to_string(), sig17(p), e.to_string(), status]
        })
        .collect();
    write_csv(
        BufWriter::new(File::create(s.file("sweep.csv"))?),
        &["width", "depth", "lr", "psnr", "epochs", "status"],
        &rows,
    )?;
    let ok = results.iter().flatten().filter(|r| r.2 == "ok").count();
    let mut metrics = Map::new();
    metrics.insert("cells".into(), json!(cells.len()));
    metrics.insert("succeeded".into(), json!(ok));
    s.finish(metrics)?;
    if ok == 0 {
        return Err(CliError::Numerical("every sweep cell failed".into()));
    }
    Ok(s.dir)
}

fn replay(a: ReplayArgs) -> Result<PathBuf, CliError> {
    let text = std::fs::read_to_string(&a.summary)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", a.summary.display())))?;
    let doc: Value = serde_json::from_str(&text)?;
    let cfg = doc
        .get("config")
        .cloned()
        .ok_or_else(|| CliError::Input("summary has no config".into()))?;
    let mut command: Command =
        serde_json::from_value(cfg).map_err(|e| CliError::Input(format!("summary config does not describe a run: {e}")))?;
    let out = match &mut command {
        Command::Fit(x) => &mut x.out,
        Command::Denoise(x) => &mut x.fit.out,
        Command::Superres(x) => &mut x.fit.out,
        Command::Inpaint(x) => &mut x.fit.out,
        Command::Occupancy(x) => &mut x.out,
        Command::Cheb(x) => &mut x.out,
        Command::Spectrum(x) => &mut x.fit.out,
        Command::Sweep(x) => &mut x.out,
        Command::Replay(_) => return Err(CliError::Input("a replay summary cannot be replayed".into())),
    };
    if a.out.out.is_some() {
        out.out = a.out.out.clone();
    }
    out.force = a.out.force;
    run(command)
}
