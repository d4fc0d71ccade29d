use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// Family a [`QuadratureRule`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    ChebyshevGaussFirstKind,
    GaussLaguerre,
    /// The fixed Gauss-Kronrod panel used by the adaptive integrator.
    Adaptive,
}

/// A fixed rule: `Σ weights[i] · f(nodes[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    kind: QuadratureKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// First-kind Chebyshev-Gauss rule for ∫_{−1}^{1} f(x)/√(1−x²) dx.
pub fn chebyshev_gauss_rule(count: usize) -> QuadratureRule {
    assert!(count >= 1, "chebyshev_gauss_rule needs at least one node");
    let n = count as f64;
    let nodes = (1..=count)
        .map(|k| ((2 * k - 1) as f64 * PI / (2.0 * n)).cos())
        .collect();
    QuadratureRule {
        kind: QuadratureKind::ChebyshevGaussFirstKind,
        nodes,
        weights: vec![PI / n; count],
    }
}

/// Generalized Gauss-Laguerre rule for ∫_0^∞ x^alpha e^{−x} f(x) dx (Golub-Welsch).
pub fn gauss_laguerre_rule(count: usize, alpha: f64) -> Result<QuadratureRule> {
    if count == 0 || !(alpha > -1.0) {
        return Err(domain(
            "gauss_laguerre_rule",
            format!("count = {count}, alpha = {alpha}"),
        ));
    }
    let mut diag: Vec<f64> = (0..count).map(|i| 2.0 * i as f64 + alpha + 1.0).collect();
    let mut off: Vec<f64> = (0..count)
        .map(|i| {
            if i == 0 {
                0.0
            } else {
                (i as f64 * (i as f64 + alpha)).sqrt()
            }
        })
        .collect();
    let mut first = vec![0.0; count];
    first[0] = 1.0;
    tridiagonal_eigen(&mut diag, &mut off, &mut first)?;
    let mu0 = libm::tgamma(alpha + 1.0);
    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first)
        .map(|(x, v)| (x, mu0 * v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule {
        kind: QuadratureKind::GaussLaguerre,
        nodes,
        weights,
    })
}

/// Implicit QL on a symmetric tridiagonal matrix, tracking the first row of the
/// eigenvector matrix only. `off[i]` couples rows i−1 and i.
fn tridiagonal_eigen(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence {
                    what: "tridiagonal eigensolver",
                    detail: format!("no deflation at row {l}"),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let t = z[i + 1];
                z[i + 1] = s * z[i] + c * t;
                z[i] = c * z[i] - s * t;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

// 21-point Kronrod extension of the 10-point Gauss rule (abscissae on [0, 1], symmetric).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// The 21-point Gauss-Kronrod panel on [−1, 1].
pub fn gauss_kronrod_rule() -> QuadratureRule {
    let mut nodes = Vec::with_capacity(21);
    let mut weights = Vec::with_capacity(21);
    for i in 0..10 {
        nodes.push(-XGK[i]);
        weights.push(WGK[i]);
    }
    nodes.push(0.0);
    weights.push(WGK[10]);
    for i in (0..10).rev() {
        nodes.push(XGK[i]);
        weights.push(WGK[i]);
    }
    QuadratureRule {
        kind: QuadratureKind::Adaptive,
        nodes,
        weights,
    }
}

/// Stopping rule for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-9,
            max_evals: 1_000_000,
        }
    }
}

impl Tolerance {
    pub fn tight() -> Self {
        Self {
            abs: 1e-15,
            rel: 1e-12,
            max_evals: 1_000_000,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
enum Segment {
    Finite,
    // [a, ∞) mapped from t ∈ [0, 1) by x = a + t/(1−t)
    Tail(f64),
}

struct Panel {
    seg: Segment,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn eval_panel<F: FnMut(f64) -> f64>(f: &mut F, seg: Segment, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut g = |t: f64| -> f64 {
        match seg {
            Segment::Finite => f(t),
            Segment::Tail(a) => {
                let s = 1.0 - t;
                let v = f(a + t / s);
                if v == 0.0 {
                    0.0
                } else {
                    v / (s * s)
                }
            }
        }
    };
    let fc = g(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for i in 0..10 {
        let dx = half * XGK[i];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[i] = f1;
        fv2[i] = f2;
        kronrod += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    let mut resabs = WGK[10] * fc.abs();
    for i in 0..10 {
        asc += WGK[i] * ((fv1[i] - mean).abs() + (fv2[i] - mean).abs());
        resabs += WGK[i] * (fv1[i].abs() + fv2[i].abs());
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel {
        seg,
        lo,
        hi,
        value,
        error,
    }
}

fn adaptive<F: FnMut(f64) -> f64>(mut f: F, initial: Vec<(Segment, f64, f64)>, tol: Tolerance) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for (seg, lo, hi) in initial {
        if hi > lo {
            heap.push(eval_panel(&mut f, seg, lo, hi));
            evals += 21;
        }
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() {
            return Err(Error::NumericFault {
                what: "adaptive quadrature",
                detail: "integrand produced a non-finite value".into(),
            });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Integral {
                value,
                abs_error: error,
                evals,
            });
        }
        if evals + 42 > tol.max_evals {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                detail: format!("estimated error {error:.3e} on value {value:.6e} after {evals} evaluations"),
            });
        }
        let worst = heap.pop().expect("non-empty panel set");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // panel cannot be split further in floating point; freeze it
            let mut frozen = worst;
            frozen.error = 0.0;
            heap.push(frozen);
            continue;
        }
        heap.push(eval_panel(&mut f, worst.seg, worst.lo, mid));
        heap.push(eval_panel(&mut f, worst.seg, mid, worst.hi));
        evals += 42;
    }
}

/// Adaptive Gauss-Kronrod integration of `f` over the finite interval [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("integrate", "finite limits required"));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            evals: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut r = adaptive(f, vec![(Segment::Finite, lo, hi)], tol)?;
    r.value *= sign;
    Ok(r)
}

/// Adaptive integration over [breaks[0], ∞) with the given interior breakpoints.
///
/// Breakpoints matter for integrands whose mass sits far from the origin: they
/// stop the first panels from sampling only the negligible flanks.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(f: F, breaks: &[f64], tol: Tolerance) -> Result<Integral> {
    if breaks.is_empty() || breaks.iter().any(|b| !b.is_finite()) {
        return Err(domain("integrate_to_infinity", "need at least one finite breakpoint"));
    }
    let mut pts = breaks.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut init: Vec<_> = pts
        .windows(2)
        .map(|w| (Segment::Finite, w[0], w[1]))
        .collect();
    let last = *pts.last().unwrap();
    // the tail is split once so a decaying integrand is sampled near its start
    init.push((Segment::Tail(last), 0.0, 0.5));
    init.push((Segment::Tail(last), 0.5, 1.0));
    adaptive(f, init, tol)
}

/// Breakpoints covering the bulk of a Gamma(shape, 1) density.
pub fn gamma_bulk_breaks(shape: f64) -> Vec<f64> {
    let mode = (shape - 1.0).max(0.0);
    let width = shape.sqrt().max(1.0);
    let mut b = vec![0.0];
    for k in [-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0, 16.0] {
        let x = mode + k * width;
        if x > 0.0 {
            b.push(x);
        }
    }
    if mode < 1.0 {
        b.extend([0.25, 1.0, 4.0, 16.0]);
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}
