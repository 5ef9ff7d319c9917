//! Globally adaptive Gauss–Kronrod (10/21 point) integration of complex
//! valued functions on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
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

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    /// Sum of the per-panel error estimates.
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Target for the summed absolute error.
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Initial panels are no wider than this.
    pub max_panel_width: Option<f64>,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            abs_tol: 1e-10,
            max_panels: 200_000,
            max_panel_width: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
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

fn gauss_kronrod<F>(f: &F, a: f64, b: f64) -> Panel
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut resabs = f_center.norm() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let scale = half.abs();
    let value = kronrod * half;
    let resabs = resabs * scale;
    let error = ((kronrod - gauss) * half)
        .norm()
        .max(50.0 * f64::EPSILON * resabs);
    Panel {
        a,
        b,
        value,
        error,
        resabs,
    }
}

/// Integrates `f` over the piecewise interval defined by `breakpoints`
/// (sorted, at least two entries).
///
/// Panels are bisected in order of decreasing error until the summed error
/// falls below `abs_tol`, or below the roundoff floor of the summed
/// `∫|f|`. Running out of panels returns the best estimate as `Err`.
pub fn integrate<F>(
    f: F,
    breakpoints: &[f64],
    options: &AdaptiveOptions,
) -> Result<Estimate, Estimate>
where
    F: Fn(f64) -> Complex64,
{
    assert!(breakpoints.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = match options.max_panel_width {
            Some(width) if width > 0.0 => ((b - a) / width).ceil().max(1.0) as usize,
            _ => 1,
        };
        let step = (b - a) / pieces as f64;
        for i in 0..pieces {
            let lo = a + step * i as f64;
            let hi = if i + 1 == pieces {
                b
            } else {
                a + step * (i + 1) as f64
            };
            heap.push(gauss_kronrod(&f, lo, hi));
        }
    }

    loop {
        let (value, error, resabs) = heap
            .iter()
            .fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |(v, e, r), p| {
                (v + p.value, e + p.error, r + p.resabs)
            });
        let target = options.abs_tol.max(100.0 * f64::EPSILON * resabs);
        let estimate = Estimate {
            value,
            error,
            panels: heap.len(),
        };
        if error <= target {
            return Ok(estimate);
        }
        if heap.len() >= options.max_panels {
            return Err(estimate);
        }
        // Bisect a batch of the worst panels before re-summing; re-summing
        // after every split is quadratic in the panel count.
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval no longer divisible in floating point
                heap.push(Panel {
                    error: 0.0,
                    ..worst
                });
                continue;
            }
            heap.push(gauss_kronrod(&f, worst.a, mid));
            heap.push(gauss_kronrod(&f, mid, worst.b));
        }
    }
}
