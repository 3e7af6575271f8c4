//! Gauss–Kronrod panel quadrature.
//!
//! The integrals in this crate are smooth but oscillatory, so every routine
//! starts from caller-supplied panels sized to the local oscillation scale and
//! then bisects the worst panel until the error target is met.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// 15-point Kronrod abscissae (non-negative half) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// 7-point Gauss weights on XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod value, scaled Kronrod–Gauss error and ∫|f| on one panel.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
    pub abs: f64,
}

pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h_abs = h.abs();
    let asc = asc * h_abs;
    let abs = abs * h_abs;
    // QUADPACK's scaling of |K - G|: the Kronrod value is far more accurate
    // than the embedded Gauss rule it is compared against.
    let mut error = ((kron - gauss) * h).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs);
    }
    Panel {
        a,
        b,
        value: kron * h,
        error,
        abs,
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    /// ∫|f| as seen by the rule; sets the round-off floor.
    pub abs: f64,
    pub panels: usize,
    pub converged: bool,
}

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    fn target(&self, value: f64, abs: f64) -> f64 {
        self.abs
            .max(self.rel * value.abs())
            .max(100.0 * f64::EPSILON * abs)
    }
}

struct Worst(Panel);

impl PartialEq for Worst {
    fn eq(&self, other: &Self) -> bool {
        self.0.error == other.0.error
    }
}
impl Eq for Worst {}
impl PartialOrd for Worst {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Worst {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error)
    }
}

/// Splits `[a, b]` into `n` equal panels.
pub fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| if i == n { b } else { a + h * i as f64 })
        .collect()
}

/// Integrates `f` over the panels delimited by `breaks` (ascending), bisecting
/// the panel with the largest error until `tol` is met or the panel budget is
/// exhausted.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], tol: Tolerance) -> QuadResult {
    if breaks.len() < 2 {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            abs: 0.0,
            panels: 0,
            converged: true,
        };
    }
    // Cheap pass without allocation-heavy bookkeeping: most calls end here.
    let mut value = 0.0;
    let mut error = 0.0;
    let mut abs = 0.0;
    let mut panels = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        let p = gk15(f, w[0], w[1]);
        value += p.value;
        error += p.error;
        abs += p.abs;
        panels.push(p);
    }
    if error <= tol.target(value, abs) {
        return QuadResult {
            value,
            error,
            abs,
            panels: panels.len(),
            converged: true,
        };
    }

    let mut heap: BinaryHeap<Worst> = panels.into_iter().map(Worst).collect();
    let mut count = heap.len();
    while count < tol.max_panels {
        let Some(Worst(worst)) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(Worst(worst));
            break;
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs += left.abs + right.abs - worst.abs;
        heap.push(Worst(left));
        heap.push(Worst(right));
        count += 1;
        if error <= tol.target(value, abs) {
            break;
        }
    }
    // Re-sum to shed the drift of the running updates.
    let (mut v, mut e, mut s) = (0.0, 0.0, 0.0);
    for Worst(p) in heap.iter() {
        v += p.value;
        e += p.error;
        s += p.abs;
    }
    QuadResult {
        value: v,
        error: e,
        abs: s,
        panels: count,
        converged: e <= tol.target(v, s),
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton on the Legendre recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Quintic Hermite interpolation on a panel of width `h` at `s ∈ [0, 1]`, from
/// values, first and second derivatives at both ends.
#[inline]
#[allow(clippy::too_many_arguments)]
pub fn hermite5(s: f64, h: f64, f0: f64, f1: f64, d0: f64, d1: f64, c0: f64, c1: f64) -> f64 {
    let (s2, s3) = (s * s, s * s * s);
    let (s4, s5) = (s3 * s, s3 * s2);
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 0.5 * s3 - s4 + 0.5 * s5;
    h0 * f0 + h3 * f1 + h * (h1 * d0 + h4 * d1) + h * h * (h2 * c0 + h5 * c1)
}
