//! Globally adaptive 21-point Gauss-Kronrod quadrature for complex-valued
//! integrands on finite and infinite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::{Estimate, Tolerance};
use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
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
    0.123_491_976_262_065_851_077_715_006_643_228,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Default cap on the number of subintervals held by the adaptive driver.
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Single GK21 panel on [a, b], with the QUADPACK error heuristic.
fn qk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut abs_sum = fc.norm() * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut samples = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];

    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[j] = (f1, f2);
        kronrod += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut asc = WGK[10] * (fc - mean).norm();
    for (j, &(f1, f2)) in samples.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).norm() + (f2 - mean).norm());
    }

    let value = kronrod * half;
    let abs_half = half.abs();
    let resabs = abs_sum * abs_half;
    let resasc = asc * abs_half;
    let mut error = ((kronrod - gauss) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment {
        a,
        b,
        value,
        error,
        resabs,
    }
}

/// Adaptive GK21 over [a, b]. Breakpoints inside the interval seed the
/// initial partition (useful for narrow peaks the first panel could miss).
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    integrate_with_limit(f, a, b, breakpoints, tol, DEFAULT_MAX_SUBDIVISIONS)
}

pub fn integrate_with_limit<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
    max_subdivisions: usize,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Input(format!("finite interval expected, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate::zero());
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut nodes = Vec::with_capacity(cuts.len() + 2);
    nodes.push(lo);
    nodes.extend(cuts);
    nodes.push(hi);

    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_error = 0.0;
    for w in nodes.windows(2) {
        let seg = qk21(&f, w[0], w[1]);
        total += seg.value;
        total_error += seg.error;
        heap.push(seg);
    }

    let mut evaluations = 21 * heap.len();
    // Errors below the rounding floor of the summed panels cannot be reduced.
    let floor = |heap: &BinaryHeap<Segment>| {
        100.0 * f64::EPSILON * heap.iter().map(|s| s.resabs).sum::<f64>()
    };
    while total_error > tol.bound(total.norm()).max(floor(&heap)) {
        if heap.len() >= max_subdivisions {
            return Err(Error::Quadrature(format!(
                "GK21 on [{lo}, {hi}]: {} subintervals, error {total_error:e} above {:e}",
                heap.len(),
                tol.bound(total.norm())
            )));
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            heap.push(worst);
            return Err(Error::Quadrature(format!(
                "GK21 on [{lo}, {hi}]: interval collapsed near {mid}, error {total_error:e}"
            )));
        }
        let left = qk21(&f, worst.a, mid);
        let right = qk21(&f, mid, worst.b);
        evaluations += 42;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Rebuild the sum periodically to shed cancellation drift.
        if heap.len() % 256 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_error = heap.iter().map(|s| s.error).sum();
        }
    }

    total = heap.iter().map(|s| s.value).sum();
    total_error = heap.iter().map(|s| s.error).sum();
    Ok(Estimate {
        value: total * sign,
        error: total_error,
        evaluations,
    })
}

/// Integral over [a, inf) via the map x = a + (1 - s) / s.
pub fn integrate_to_infinity<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    let g = |s: f64| {
        let x = a + (1.0 - s) / s;
        f(x) / (s * s)
    };
    integrate(g, 0.0, 1.0, &[], tol)
}

/// Integral over the whole real line. Finite breakpoints split the line into
/// finite panels plus two semi-infinite tails.
pub fn integrate_real_line<F: Fn(f64) -> Complex64>(
    f: F,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    if cuts.is_empty() {
        cuts.push(0.0);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let lo = cuts[0];
    let hi = *cuts.last().expect("non-empty");

    // Split the budget so the pieces together still meet the tolerance.
    let pieces = Tolerance {
        abs: tol.abs / 3.0,
        rel: tol.rel / 3.0,
    };
    let left = integrate_to_infinity(|x| f(2.0 * lo - x), lo, pieces)?;
    let right = integrate_to_infinity(&f, hi, pieces)?;
    let mid = if hi > lo {
        integrate(&f, lo, hi, &cuts, pieces)?
    } else {
        Estimate::zero()
    };
    Ok(left + mid + right)
}
