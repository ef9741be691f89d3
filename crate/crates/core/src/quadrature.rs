//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! The integrator bisects whichever subinterval currently carries the largest
//! error estimate until the summed estimate meets the tolerance. Integrands may
//! be real, complex, or small fixed-size real vectors, so a numerator and a
//! denominator can share one set of function evaluations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and integration-window settings for the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    /// Applied to peak-normalized integrands, so it is effectively dimensionless.
    pub absolute_tolerance: f64,
    /// Half-width of every infinite-range window, in effective widths.
    pub domain_sigmas: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-8,
            absolute_tolerance: 1e-14,
            domain_sigmas: 12.0,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    /// Tight settings used for frozen regression values.
    pub fn golden() -> Self {
        Self {
            relative_tolerance: 1e-10,
            absolute_tolerance: 1e-16,
            max_subdivisions: 5000,
            ..Self::default()
        }
    }

    /// Settings for extracting second-order coefficients, where the spread is
    /// differenced against its narrow-slit limit.
    pub fn precise() -> Self {
        Self {
            relative_tolerance: 1e-13,
            absolute_tolerance: 1e-17,
            max_subdivisions: 20000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, value, reason| {
            Err(Error::Domain {
                field,
                value,
                reason,
            })
        };
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance.is_finite()) {
            return bad(
                "relative_tolerance",
                self.relative_tolerance,
                "must be positive",
            );
        }
        if !(self.absolute_tolerance > 0.0 && self.absolute_tolerance.is_finite()) {
            return bad(
                "absolute_tolerance",
                self.absolute_tolerance,
                "must be positive",
            );
        }
        if !(self.domain_sigmas >= 8.0 && self.domain_sigmas.is_finite()) {
            return bad("domain_sigmas", self.domain_sigmas, "must be at least 8");
        }
        if self.max_subdivisions < 50 {
            return bad(
                "max_subdivisions",
                self.max_subdivisions as f64,
                "must be at least 50",
            );
        }
        Ok(())
    }

    pub(crate) fn tolerance(&self) -> Tolerance {
        Tolerance {
            relative: self.relative_tolerance,
            absolute: self.absolute_tolerance,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(relative: f64, absolute: f64) -> Self {
        Self {
            relative,
            absolute,
            max_subdivisions: 2000,
        }
    }
}

/// Values the integrator can accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn norm(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

/// Fixed-size real vector; the norm is the max-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector<const N: usize>(pub [f64; N]);

impl<const N: usize> Add for Vector<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a += b);
        self
    }
}

impl<const N: usize> Sub for Vector<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.0.iter_mut().zip(rhs.0).for_each(|(a, b)| *a -= b);
        self
    }
}

impl<const N: usize> Mul<f64> for Vector<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        self.0.iter_mut().for_each(|a| *a *= rhs);
        self
    }
}

impl<const N: usize> QuadValue for Vector<N> {
    fn zero() -> Self {
        Vector([0.0; N])
    }
    fn norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
    pub converged: bool,
}

impl QuadResult<f64> {
    pub fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Convergence {
                estimate: self.value,
                error_bound: self.error,
                subdivisions: self.subdivisions,
            })
        }
    }
}

// Kronrod abscissae (descending, last is the centre) and weights; odd indices
// are the 10-point Gauss abscissae.
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
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_954_809,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

fn gk21<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[10];
    let mut gauss = V::zero();
    for (j, (&x, &wk)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod = kronrod + pair * wk;
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    (k, (k - g).norm())
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over the union of the panels delimited by `breakpoints`
/// (which must be finite and increasing).
pub fn integrate<V, F>(mut f: F, breakpoints: &[f64], tol: Tolerance) -> QuadResult<V>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    assert!(breakpoints.len() >= 2, "need at least one panel");
    let mut heap = BinaryHeap::with_capacity(breakpoints.len() + 64);
    let mut total = V::zero();
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        let (value, error) = gk21(&mut f, w[0], w[1]);
        evaluations += 21;
        total = total + value;
        total_err += error;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let mut subdivisions = 0;
    loop {
        let target = tol.absolute.max(tol.relative * total.norm());
        if total_err <= target {
            break;
        }
        if subdivisions >= tol.max_subdivisions {
            return QuadResult {
                value: total,
                error: total_err,
                evaluations,
                subdivisions,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap holds every segment");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Segment has collapsed to adjacent floats; nothing more to gain.
            heap.push(worst);
            return QuadResult {
                value: total,
                error: total_err,
                evaluations,
                subdivisions,
                converged: false,
            };
        }
        let (left, el) = gk21(&mut f, worst.a, mid);
        let (right, er) = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        subdivisions += 1;
        total = total - worst.value + left + right;
        total_err += el + er - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: left,
            error: el,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: right,
            error: er,
        });
    }

    // Re-sum to shed the drift of the running updates.
    let mut value = V::zero();
    let mut error = 0.0;
    for s in heap.into_vec() {
        value = value + s.value;
        error += s.error;
    }
    QuadResult {
        value,
        error,
        evaluations,
        subdivisions,
        converged: true,
    }
}

/// `n` equal panels over `[lo, hi]`, merged with extra interior points.
pub fn panels(lo: f64, hi: f64, n: usize, extra: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    pts.extend(extra.iter().copied().filter(|x| *x > lo && *x < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (hi - lo));
    pts
}
