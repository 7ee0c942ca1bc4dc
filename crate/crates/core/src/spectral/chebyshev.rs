use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::activations::Activation;
use crate::numerics::Complex;

use super::SpectralError;

/// Zeros of `T_N`, `x_k = cos(π(2k+1)/(2N))` for `k = 0..N`, strictly decreasing.
pub fn chebyshev_nodes(n: usize) -> Result<Vec<f64>, SpectralError> {
    if n == 0 {
        return Err(SpectralError::ZeroNodes);
    }
    Ok((0..n).map(|k| node_angle(k, n).cos()).collect())
}

#[inline]
fn node_angle(k: usize, n: usize) -> f64 {
    PI * (2 * k + 1) as f64 / (2 * n) as f64
}

/// Coefficients `c_0..=c_nmax` of `Σ c_n T_n(x)` from `N` node samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChebyshevExpansion {
    pub coeffs: Vec<Complex>,
    pub node_count: usize,
    pub n_max: usize,
    pub label: String,
}

/// Discrete coefficients `c_n = ((2 − δ(n))/N)·Σ_k T_n(x_k)·f(x_k)`.
///
/// `T_n(x_k)` is taken as `cos(n·θ_k)` so no recurrence error accumulates.
pub fn chebyshev_coeffs<F>(f: F, nodes: usize, n_max: usize, label: &str) -> Result<ChebyshevExpansion, SpectralError>
where
    F: Fn(f64) -> Complex,
{
    if nodes == 0 {
        return Err(SpectralError::ZeroNodes);
    }
    if n_max >= nodes {
        return Err(SpectralError::AliasedOrder { n_max, nodes });
    }
    let mut samples = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let x = node_angle(k, nodes).cos();
        let fx = f(x);
        if !fx.is_finite() {
            return Err(SpectralError::NonFiniteSample { k, x, value: fx });
        }
        samples.push(fx);
    }
    Ok(from_samples(&samples, n_max, label))
}

fn from_samples(samples: &[Complex], n_max: usize, label: &str) -> ChebyshevExpansion {
    let nodes = samples.len();
    let mut coeffs = vec![Complex::ZERO; n_max + 1];
    for (k, &fx) in samples.iter().enumerate() {
        let theta = node_angle(k, nodes);
        for (n, c) in coeffs.iter_mut().enumerate() {
            *c += fx.scale((n as f64 * theta).cos());
        }
    }
    for (n, c) in coeffs.iter_mut().enumerate() {
        let w = if n == 0 { 1.0 } else { 2.0 };
        *c = c.scale(w / nodes as f64);
    }
    ChebyshevExpansion {
        coeffs,
        node_count: nodes,
        n_max,
        label: label.to_string(),
    }
}

impl ChebyshevExpansion {
    /// Expansion of an activation restricted to the real interval `[−1, 1]`.
    pub fn of_activation(act: &Activation, nodes: usize, n_max: usize) -> Result<Self, SpectralError> {
        chebyshev_coeffs(
            |x| act.eval(Complex::real(x)).unwrap_or(Complex::new(f64::NAN, f64::NAN)),
            nodes,
            n_max,
            &act.to_string(),
        )
    }

    /// `Σ c_n T_n(x)` by Clenshaw's backward recurrence.
    pub fn eval(&self, x: f64) -> Result<Complex, SpectralError> {
        if !(x.abs() <= 1.0) {
            return Err(SpectralError::OutOfDomain(x));
        }
        let (mut b1, mut b2) = (Complex::ZERO, Complex::ZERO);
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = c + b1.scale(2.0 * x) - b2;
            b2 = b1;
            b1 = b0;
        }
        Ok(self.coeffs[0] + b1.scale(x) - b2)
    }

    /// `|c_n|` for every index.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.modulus()).collect()
    }

    /// Monomial coefficients `α_0..=α_K` of the expansion truncated at degree `K`.
    pub fn to_monomial(&self, degree: usize) -> Vec<Complex> {
        let k = degree.min(self.n_max);
        let mut alpha = vec![Complex::ZERO; k + 1];
        // rows of T_n in the power basis, built by T_{n+1} = 2x·T_n − T_{n−1}
        let mut prev = vec![0.0; k + 2];
        let mut cur = vec![0.0; k + 2];
        prev[0] = 1.0;
        if k >= 1 {
            cur[1] = 1.0;
        }
        for (n, &c) in self.coeffs[..=k].iter().enumerate() {
            let row = if n == 0 { &prev } else { &cur };
            for (a, &t) in alpha.iter_mut().zip(row.iter()) {
                *a += c.scale(t);
            }
            if n >= 1 {
                let mut next = vec![0.0; k + 2];
                for i in 0..=k {
                    next[i + 1] += 2.0 * cur[i];
                    next[i] -= prev[i];
                }
                prev = std::mem::replace(&mut cur, next);
            }
        }
        alpha
    }

    /// CSV with header `n,a_re,a_im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SpectralError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "a_re", "a_im"])?;
        for (n, c) in self.coeffs.iter().enumerate() {
            w.write_record([n.to_string(), sig17(c.re), sig17(c.im)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

impl Parity {
    /// Whether index `n` is forced to zero by this parity.
    pub fn vanishes_at(self, n: usize) -> bool {
        match self {
            Parity::Even => n % 2 == 1,
            Parity::Odd => n.is_multiple_of(2),
            Parity::Neither => false,
        }
    }
}

const PARITY_SAMPLES: usize = 1000;
const PARITY_RTOL: f64 = 1e-12;

/// Parity of `f` on `[−1, 1]` from a symmetric 1000-point sample.
pub fn empirical_parity<F: Fn(f64) -> Complex>(f: F) -> Parity {
    let pairs: Vec<(Complex, Complex)> = (0..PARITY_SAMPLES / 2)
        .map(|i| {
            let x = 1.0 - 2.0 * i as f64 / (PARITY_SAMPLES - 1) as f64;
            (f(x), f(-x))
        })
        .collect();
    let peak = pairs
        .iter()
        .fold(0.0f64, |m, (a, b)| m.max(a.modulus()).max(b.modulus()));
    let tol = PARITY_RTOL * peak.max(f64::MIN_POSITIVE);
    if pairs.iter().all(|(a, b)| (*a - *b).modulus() <= tol) {
        Parity::Even
    } else if pairs.iter().all(|(a, b)| (*a + *b).modulus() <= tol) {
        Parity::Odd
    } else {
        Parity::Neither
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParityReport {
    pub label: String,
    pub parity: Parity,
    pub tol: f64,
    pub expansion: ChebyshevExpansion,
    /// Indices that should vanish by parity yet exceed `tol`.
    pub violations: Vec<usize>,
}

impl ParityReport {
    pub fn applicable(&self) -> bool {
        self.parity != Parity::Neither
    }
}

pub fn parity_vanishing_report(
    act: &Activation,
    nodes: usize,
    n_max: usize,
    tol: f64,
) -> Result<ParityReport, SpectralError> {
    if !act.is_real_valued() {
        return Err(SpectralError::NotRealValued(act.to_string()));
    }
    let expansion = ChebyshevExpansion::of_activation(act, nodes, n_max)?;
    let parity = empirical_parity(|x| act.eval(Complex::real(x)).unwrap_or(Complex::new(f64::NAN, 0.0)));
    let violations = expansion
        .coeffs
        .iter()
        .enumerate()
        .filter(|(n, c)| parity.vanishes_at(*n) && c.modulus() > tol)
        .map(|(n, _)| n)
        .collect();
    Ok(ParityReport {
        label: act.to_string(),
        parity,
        tol,
        expansion,
        violations,
    })
}

/// Which part of a modulated coefficient the base parity forces to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Re,
    Im,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageEntry {
    pub n: usize,
    /// Coefficient of the real part of the modulated activation.
    pub a: f64,
    /// Coefficient of the imaginary part.
    pub b: f64,
    pub structural_zero: Component,
    pub flagged: bool,
}

impl CoverageEntry {
    pub fn structural_value(&self) -> f64 {
        match self.structural_zero {
            Component::Re => self.a.abs(),
            Component::Im => self.b.abs(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub label: String,
    pub zeta: f64,
    pub base_parity: Parity,
    pub tol: f64,
    /// One entry per index the base expansion loses to parity.
    pub entries: Vec<CoverageEntry>,
}

impl CoverageReport {
    pub fn flagged(&self) -> Vec<usize> {
        self.entries.iter().filter(|e| e.flagged).map(|e| e.n).collect()
    }
}

/// Coefficients of `base(x)·exp(2πjζx)` at the indices where `base` alone has
/// none, flagging those where both parts are at most `tol`.
pub fn modulation_coverage_report(
    base: &Activation,
    zeta: f64,
    nodes: usize,
    n_max: usize,
    tol: f64,
) -> Result<CoverageReport, SpectralError> {
    if zeta == 0.0 {
        return Err(SpectralError::ZeroZeta);
    }
    if !base.is_real_valued() {
        return Err(SpectralError::NotRealValued(base.to_string()));
    }
    let parity = empirical_parity(|x| base.eval(Complex::real(x)).unwrap_or(Complex::new(f64::NAN, 0.0)));
    if parity == Parity::Neither {
        return Err(SpectralError::NoParity(base.to_string()));
    }
    let modulated = Activation::Cosmo {
        base: Box::new(base.clone()),
        zeta,
    };
    let exp = ChebyshevExpansion::of_activation(&modulated, nodes, n_max)?;
    // f·cos(2πζx) keeps the base parity, f·sin(2πζx) flips it
    let entries = exp
        .coeffs
        .iter()
        .enumerate()
        .filter(|(n, _)| parity.vanishes_at(*n))
        .map(|(n, c)| CoverageEntry {
            n,
            a: c.re,
            b: c.im,
            structural_zero: Component::Re,
            flagged: c.re.abs().max(c.im.abs()) <= tol,
        })
        .collect();
    Ok(CoverageReport {
        label: modulated.to_string(),
        zeta,
        base_parity: parity,
        tol,
        entries,
    })
}

/// `|c_n|` for `n = 0..=n_max`, one column per activation.
#[derive(Clone, Debug, Serialize)]
pub struct DecayTable {
    pub labels: Vec<String>,
    /// `columns[j][n]` is `|c_n|` of activation `j`.
    pub columns: Vec<Vec<f64>>,
}

pub fn decay_profile(acts: &[Activation], nodes: usize, n_max: usize) -> Result<DecayTable, SpectralError> {
    let mut labels = Vec::with_capacity(acts.len());
    let mut columns = Vec::with_capacity(acts.len());
    for act in acts {
        let e = ChebyshevExpansion::of_activation(act, nodes, n_max)?;
        labels.push(e.label.clone());
        columns.push(e.magnitudes());
    }
    Ok(DecayTable { labels, columns })
}

impl DecayTable {
    /// CSV with header `n,<label…>`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SpectralError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["n".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        let rows = self.columns.first().map_or(0, Vec::len);
        for n in 0..rows {
            let mut rec = vec![n.to_string()];
            rec.extend(self.columns.iter().map(|c| sig17(c[n])));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `Σ c_n T_n(x)` with `T_n` from the three-term recurrence.
    fn eval_direct(e: &ChebyshevExpansion, x: f64) -> Complex {
        let (mut t0, mut t1) = (1.0, x);
        let mut s = e.coeffs[0];
        for (n, &c) in e.coeffs.iter().enumerate().skip(1) {
            if n > 1 {
                let t2 = 2.0 * x * t1 - t0;
                t0 = t1;
                t1 = t2;
            }
            s += c.scale(t1);
        }
        s
    }

    fn real(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Complex {
        move |x| Complex::real(f(x))
    }

    #[test]
    fn nodes_examples() {
        assert!(chebyshev_nodes(0).is_err());
        assert_eq!(chebyshev_nodes(1).unwrap()[0], (PI / 2.0).cos());
        let two = chebyshev_nodes(2).unwrap();
        assert!((two[0] - 0.5f64.sqrt()).abs() < 1e-15 && (two[1] + 0.5f64.sqrt()).abs() < 1e-15);
        assert!(chebyshev_nodes(5).unwrap()[2].abs() < 1e-16);
        for n in [7, 64, 513] {
            let x = chebyshev_nodes(n).unwrap();
            assert!(x.windows(2).all(|w| w[0] > w[1]));
            assert!(x.iter().all(|v| v.abs() < 1.0));
            for k in 0..n {
                assert!((x[k] + x[n - 1 - k]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn square_and_t3() {
        let e = chebyshev_coeffs(real(|x| x * x), 64, 8, "x^2").unwrap();
        for (n, c) in e.coeffs.iter().enumerate() {
            let want = if n == 0 || n == 2 { 0.5 } else { 0.0 };
            assert!((c.re - want).abs() < 1e-14 && c.im == 0.0, "c{n} = {c}");
        }
        let e = chebyshev_coeffs(real(|x| 4.0 * x * x * x - 3.0 * x), 64, 10, "T3").unwrap();
        for (n, c) in e.coeffs.iter().enumerate() {
            let want = if n == 3 { 1.0 } else { 0.0 };
            assert!((c.re - want).abs() < 1e-14, "c{n} = {c}");
        }
    }

    #[test]
    fn orthogonality_at_256_nodes() {
        let nodes = 256;
        for m in 0..nodes / 2 {
            let e = chebyshev_coeffs(real(|x| (m as f64 * x.acos()).cos()), nodes, nodes / 2, "T_m").unwrap();
            for (n, c) in e.coeffs.iter().enumerate() {
                let want = if n == m { 1.0 } else { 0.0 };
                assert!((c.re - want).abs() < 1e-13, "m={m} n={n}: {c}");
            }
        }
    }

    #[test]
    fn rejects_aliasing_and_nonfinite() {
        assert!(matches!(
            chebyshev_coeffs(real(|x| x), 512, 600, "x"),
            Err(SpectralError::AliasedOrder { .. })
        ));
        assert!(chebyshev_coeffs(real(|x| x), 16, 15, "x").is_ok());
        let err = chebyshev_coeffs(real(|x| if x < -0.99 { f64::NAN } else { x }), 32, 4, "bad").unwrap_err();
        assert!(matches!(err, SpectralError::NonFiniteSample { k: 31, .. }), "{err}");
    }

    #[test]
    fn reconstruction_at_nodes() {
        let nodes = 40;
        let f = |x: f64| (3.0 * x).exp() * (5.0 * x).sin();
        let e = chebyshev_coeffs(real(f), nodes, nodes - 1, "smooth").unwrap();
        let xs = chebyshev_nodes(nodes).unwrap();
        let peak = xs.iter().fold(0.0f64, |m, &x| m.max(f(x).abs()));
        for &x in &xs {
            assert!((e.eval(x).unwrap().re - f(x)).abs() <= 1e-8 * peak);
        }
    }

    #[test]
    fn clenshaw_examples() {
        let e = ChebyshevExpansion {
            coeffs: vec![Complex::ZERO, Complex::ZERO, Complex::ONE],
            node_count: 8,
            n_max: 2,
            label: "T2".into(),
        };
        assert_eq!(e.eval(0.5).unwrap(), Complex::real(-0.5));
        assert!(matches!(e.eval(1.0 + 1e-12), Err(SpectralError::OutOfDomain(_))));
        let one = ChebyshevExpansion {
            coeffs: vec![Complex::ONE],
            node_count: 1,
            n_max: 0,
            label: "1".into(),
        };
        for x in [-1.0, -0.3, 0.0, 0.9, 1.0] {
            assert_eq!(one.eval(x).unwrap(), Complex::ONE);
        }

        let e = chebyshev_coeffs(real(|x| (30.0 * x).sin()), 512, 100, "sin30").unwrap();
        for i in 0..=200 {
            let x = -1.0 + i as f64 / 100.0;
            let v = e.eval(x).unwrap();
            assert!((v.re - (30.0 * x).sin()).abs() < 1e-8);
            assert!(v.max_abs_diff(eval_direct(&e, x)) < 1e-12);
        }
    }

    #[test]
    fn monomial_conversion() {
        let e = chebyshev_coeffs(real(|x| 4.0 * x * x * x - 3.0 * x + 0.5 * (2.0 * x * x - 1.0)), 32, 6, "p").unwrap();
        let a = e.to_monomial(6);
        let want = [-0.5, -3.0, 1.0, 4.0, 0.0, 0.0, 0.0];
        for (ai, wi) in a.iter().zip(want) {
            assert!((ai.re - wi).abs() < 1e-13, "{a:?}");
        }
        // the truncated polynomial matches the truncated expansion
        let g = Activation::gaussian(3.0).unwrap();
        let e = ChebyshevExpansion::of_activation(&g, 512, 50).unwrap();
        let a = e.to_monomial(6);
        let mut t = e.clone();
        t.coeffs.truncate(7);
        for x in [-0.8f64, -0.1, 0.4, 1.0] {
            let p: Complex = a.iter().enumerate().map(|(i, c)| c.scale(x.powi(i as i32))).sum();
            assert!(p.max_abs_diff(t.eval(x).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn raised_cosine_odd_coefficients_vanish() {
        let rc = Activation::raised_cosine(1.0, 0.05).unwrap();
        let e = ChebyshevExpansion::of_activation(&rc, 512, 50).unwrap();
        for n in (1..=50).step_by(2) {
            assert!(e.coeffs[n].modulus() < 1e-10);
        }
    }

    #[test]
    fn parity_reports() {
        let r = parity_vanishing_report(&Activation::gaussian(3.0).unwrap(), 512, 50, 1e-10).unwrap();
        assert_eq!(r.parity, Parity::Even);
        assert!(r.violations.is_empty());
        let r = parity_vanishing_report(&Activation::sine(10.0).unwrap(), 512, 50, 1e-10).unwrap();
        assert_eq!(r.parity, Parity::Odd);
        assert!(r.violations.is_empty());
        let r = parity_vanishing_report(&Activation::Relu, 512, 50, 1e-10).unwrap();
        assert_eq!(r.parity, Parity::Neither);
        assert!(!r.applicable() && r.violations.is_empty());
        assert_eq!(r.expansion.coeffs.len(), 51);
        let cosmo = Activation::cosmo(Activation::gaussian(1.0).unwrap(), 1.0).unwrap();
        assert!(matches!(
            parity_vanishing_report(&cosmo, 64, 8, 1e-10),
            Err(SpectralError::NotRealValued(_))
        ));
    }

    #[test]
    fn coverage_reports() {
        let rc = Activation::raised_cosine(1.0, 0.05).unwrap();
        assert!(matches!(
            modulation_coverage_report(&rc, 0.0, 512, 25, 1e-8),
            Err(SpectralError::ZeroZeta)
        ));
        assert!(matches!(
            modulation_coverage_report(&Activation::Relu, 1.0, 512, 25, 1e-8),
            Err(SpectralError::NoParity(_))
        ));
        let r = modulation_coverage_report(&rc, 1.0, 512, 25, 1e-8).unwrap();
        assert_eq!(r.entries.iter().map(|e| e.n).collect::<Vec<_>>(), (1..=25).step_by(2).collect::<Vec<_>>());
        for e in &r.entries {
            assert!(e.structural_value() < 1e-14, "a_{} = {}", e.n, e.a);
        }
        // low odd indices gain a large imaginary coefficient
        for e in r.entries.iter().filter(|e| e.n <= 11) {
            assert!(e.b.abs() > 1e-8 && !e.flagged, "n={} b={}", e.n, e.b);
        }
        let r = modulation_coverage_report(&Activation::sine(5.0).unwrap(), 1.0, 512, 20, 1e-8).unwrap();
        assert_eq!(r.base_parity, Parity::Odd);
        for e in r.entries.iter().filter(|e| e.n <= 12) {
            assert_eq!(e.n % 2, 0);
            assert!(e.structural_value() < 1e-14);
            assert!(!e.flagged, "n={} b={}", e.n, e.b);
        }
    }

    #[test]
    fn decay_examples() {
        let t = decay_profile(&[Activation::Relu], 512, 40).unwrap();
        let relu = &t.columns[0];
        for n in [8, 16] {
            let r = relu[2 * n] / relu[n];
            assert!((0.15..=0.35).contains(&r), "ratio at {n}: {r}");
        }
        let t = decay_profile(
            &[
                Activation::gaussian(10.0).unwrap(),
                Activation::raised_cosine(0.05, 0.05).unwrap(),
                Activation::raised_cosine(0.1, 0.05).unwrap(),
            ],
            512,
            50,
        )
        .unwrap();
        assert!(t.columns[1][40] > 100.0 * t.columns[0][40]);
        // at T = 0.1 the pulse is band-limited below n = 40: 1.03e-3 vs 2.10e-3
        assert!(t.columns[2][40] < t.columns[0][40]);
        assert!(t.columns[2][20] > t.columns[0][20]);

        let one = chebyshev_coeffs(|_| Complex::ONE, 512, 50, "1").unwrap();
        assert!((one.coeffs[0].re - 1.0).abs() < 1e-14);
        assert!(one.coeffs[1..].iter().all(|c| c.modulus() < 1e-14));
    }

    #[test]
    fn csv_layouts() {
        let t = decay_profile(&[Activation::Relu, Activation::raised_cosine(1.0, 0.05).unwrap()], 64, 3).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(header, ["n", "relu", "raised_cosine(T=1,beta=0.05)"]);
        let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 4);
        let v: f64 = rows[2][1].parse().unwrap();
        assert_eq!(v, t.columns[0][2]);

        let e = ChebyshevExpansion::of_activation(&Activation::sine(3.0).unwrap(), 64, 5).unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,a_re,a_im\n"));
        assert_eq!(text.lines().count(), 7);
    }
}
