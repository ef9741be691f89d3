//! Brute-force coincidence spreads for an arbitrary left-slit half-width.
//!
//! The slit window is applied coherently: the amplitude is integrated over
//! |y₁| ≤ a first and only then squared. Everything here is built from the
//! wavefunction closed forms and numerical integration; no spread formula from
//! [`crate::closed_form`] is used except to place integration breakpoints.

use std::cell::Cell;

use num_complex::Complex64;

use crate::closed_form::{
    dk2sq_wide_value, dy2sq_narrow_value, Method, SlitHalfWidth, SpreadEstimate,
};
use crate::error::{positive, Error, Result};
use crate::params::PacketParams;
use crate::quadrature::{integrate, panels, QuadratureSpec, Tolerance, Vector};
use crate::special::gaussian_window;
use crate::wavepacket::{mixed_prefactor, position_prefactor, psi_mixed, psi_position};

/// Gaussian-in-y₁ structure of the mixed amplitude, precomputed per state.
///
/// Ψ(y₁; k₂) = prefactor · exp(−A y₁² + i(D/S) k₂ y₁ − k₂²/S).
#[derive(Debug, Clone, Copy)]
pub struct MixedKernel {
    prefactor: Complex64,
    quadratic: Complex64,
    cross: Complex64,
    inv_sum: Complex64,
}

impl MixedKernel {
    pub fn new(p: &PacketParams) -> Result<Self> {
        let w = p.widths();
        let sum = w.sum();
        Ok(Self {
            prefactor: mixed_prefactor(p)?,
            quadratic: w.plus * w.minus / sum,
            cross: Complex64::i() * w.diff() / sum,
            inv_sum: 1.0 / sum,
        })
    }

    /// ∫₋ₐ⁺ᵃ Ψ(y₁; k₂) dy₁ in closed form.
    pub fn window(&self, k2: f64, a: f64) -> Result<Complex64> {
        let v = gaussian_window(
            self.quadratic,
            self.cross * k2,
            -a,
            a,
            -k2 * k2 * self.inv_sum,
        )?;
        Ok(self.prefactor * v)
    }
}

/// Gaussian-in-y₁ structure of the position amplitude.
///
/// Ψ(y₁, y₂) = prefactor · exp(−(S/4) y₁² − (D/2) y₂ y₁ − (S/4) y₂²).
#[derive(Debug, Clone, Copy)]
pub struct PositionKernel {
    pub(crate) prefactor: Complex64,
    pub(crate) quarter_sum: Complex64,
    pub(crate) half_diff: Complex64,
}

impl PositionKernel {
    pub fn new(p: &PacketParams) -> Result<Self> {
        let w = p.widths();
        Ok(Self {
            prefactor: position_prefactor(p)?,
            quarter_sum: 0.25 * w.sum(),
            half_diff: 0.5 * w.diff(),
        })
    }

    /// ∫₋ₐ⁺ᵃ Ψ(y₁, y₂) dy₁ in closed form.
    pub fn window(&self, y2: f64, a: f64) -> Result<Complex64> {
        let v = gaussian_window(
            self.quarter_sum,
            -self.half_diff * y2,
            -a,
            a,
            -self.quarter_sum * y2 * y2,
        )?;
        Ok(self.prefactor * v)
    }
}

fn window_panels(a: f64) -> Vec<f64> {
    panels(-a, a, 8, &[])
}

/// ∫₋ₐ⁺ᵃ Ψ(y₁; k₂) dy₁ by adaptive quadrature of the mixed amplitude.
pub fn slit_amplitude_by_quadrature(
    k2: f64,
    a: f64,
    p: &PacketParams,
    tol: Tolerance,
) -> Result<Complex64> {
    positive("a", a)?;
    // Fails only on a branch error, which MixedKernel::new would also report.
    mixed_prefactor(p)?;
    let r = integrate(
        |y1| psi_mixed(y1, k2, p).unwrap_or_default(),
        &window_panels(a),
        tol,
    );
    converged_complex(r.value, r.error, r.converged, r.subdivisions)
}

/// ∫₋ₐ⁺ᵃ Ψ(y₁, y₂) dy₁ by adaptive quadrature of the position amplitude.
pub fn position_window_by_quadrature(
    y2: f64,
    a: f64,
    p: &PacketParams,
    tol: Tolerance,
) -> Result<Complex64> {
    positive("a", a)?;
    position_prefactor(p)?;
    let r = integrate(
        |y1| psi_position(y1, y2, p).unwrap_or_default(),
        &window_panels(a),
        tol,
    );
    converged_complex(r.value, r.error, r.converged, r.subdivisions)
}

fn converged_complex(v: Complex64, err: f64, ok: bool, subdivisions: usize) -> Result<Complex64> {
    if ok {
        Ok(v)
    } else {
        Err(Error::Convergence {
            estimate: v.norm(),
            error_bound: err,
            subdivisions,
        })
    }
}

fn fallback_tolerance() -> Tolerance {
    Tolerance {
        relative: 1e-13,
        absolute: 1e-300,
        max_subdivisions: 4000,
    }
}

/// Coincidence amplitude for finding the left particle inside |y₁| ≤ a and
/// the right particle with vertical momentum k₂.
///
/// Uses the closed-form window (complex error functions); falls back to
/// adaptive quadrature if that route is unavailable.
pub fn slit_amplitude(k2: f64, a: f64, p: &PacketParams) -> Result<Complex64> {
    positive("a", a)?;
    MixedKernel::new(p)
        .and_then(|k| k.window(k2, a))
        .or_else(|_| slit_amplitude_by_quadrature(k2, a, p, fallback_tolerance()))
}

/// Coincidence amplitude for the left particle inside |y₁| ≤ a and the right
/// particle at height y₂.
pub fn position_window_amplitude(y2: f64, a: f64, p: &PacketParams) -> Result<Complex64> {
    positive("a", a)?;
    PositionKernel::new(p)
        .and_then(|k| k.window(y2, a))
        .or_else(|_| position_window_by_quadrature(y2, a, p, fallback_tolerance()))
}

/// Result of a symmetric second-moment integral over [0, upper].
#[derive(Debug, Clone, Copy)]
pub(crate) struct Moments {
    /// ⟨x²⟩ of the normalized density.
    pub variance: f64,
    pub error: f64,
}

/// Second moment of an even, non-negative density known up to normalization.
///
/// `density` is evaluated on [0, upper]; `scale` fixes the natural unit of x so
/// both integrals are O(1); `features` lists x positions near which the
/// density varies fastest.
pub(crate) fn even_second_moment<F>(
    density: F,
    upper: f64,
    scale: f64,
    features: &[f64],
    q: &QuadratureSpec,
) -> Result<Moments>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: Cell<Option<Error>> = Cell::new(None);
    let eval = |x: f64| -> f64 {
        match density(x) {
            Ok(v) if v.is_finite() => v,
            Ok(v) => {
                failure.set(Some(Error::OutOfRange {
                    re: v,
                    im: 0.0,
                    limit: f64::MAX,
                }));
                0.0
            }
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };

    let mut probe: Vec<f64> = vec![0.0];
    probe.extend(features.iter().copied().filter(|x| *x > 0.0 && *x < upper));
    probe.extend((1..8).map(|i| upper * i as f64 / 64.0));
    let peak = probe.iter().map(|&x| eval(x)).fold(0.0, f64::max);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    if peak <= 0.0 {
        return Err(Error::Domain {
            field: "density",
            value: peak,
            reason: "coincidence density vanishes on the probe points",
        });
    }

    let breaks = panels(0.0, upper, 12, features);
    let r = integrate(
        |x| {
            let d = eval(x) / peak;
            let u = x / scale;
            Vector([d, u * u * d])
        },
        &breaks,
        q.tolerance(),
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let [m0, m2] = r.value.0;
    let variance = scale * scale * m2 / m0;
    let error = variance * r.error * (1.0 / m0 + 1.0 / m2.max(f64::MIN_POSITIVE));
    if !r.converged {
        return Err(Error::Convergence {
            estimate: variance,
            error_bound: error,
            subdivisions: r.subdivisions,
        });
    }
    Ok(Moments { variance, error })
}

pub(crate) fn momentum_features(p: &PacketParams) -> Vec<f64> {
    let s = dk2sq_wide_value(p).sqrt();
    vec![0.5 * s, s, 2.0 * s, 4.0 * s]
}

fn position_features(p: &PacketParams) -> Vec<f64> {
    let s = dy2sq_narrow_value(p).sqrt();
    vec![0.5 * s, s, 2.0 * s, 4.0 * s]
}

fn quadrature_estimate(m: Moments, p: &PacketParams, a: f64) -> SpreadEstimate {
    let mut est =
        SpreadEstimate::closed(m.variance, Method::Quadrature, p, SlitHalfWidth::Finite(a));
    est.error_estimate = m.error;
    est
}

pub(crate) fn k2_moments(
    a: f64,
    p: &PacketParams,
    band: f64,
    q: &QuadratureSpec,
) -> Result<Moments> {
    let kernel = MixedKernel::new(p)?;
    let width = p.effective_k_width();
    even_second_moment(
        |k2| {
            kernel
                .window(k2, a)
                .or_else(|_| slit_amplitude(k2, a, p))
                .map(|v| v.norm_sqr())
        },
        band,
        width,
        &momentum_features(p),
        q,
    )
}

/// (Δk₂)² in coincidence with the left particle passing |y₁| ≤ a, right side open.
pub fn dk2sq_quadrature(a: f64, p: &PacketParams, q: &QuadratureSpec) -> Result<SpreadEstimate> {
    positive("a", a)?;
    q.validate()?;
    let upper = q.domain_sigmas * p.effective_k_width();
    Ok(quadrature_estimate(k2_moments(a, p, upper, q)?, p, a))
}

/// Same as [`dk2sq_quadrature`] but with detection restricted to |k₂| ≤ k_max
/// and normalized within that band.
pub fn dk2sq_quadrature_band(
    a: f64,
    p: &PacketParams,
    k_max: f64,
    q: &QuadratureSpec,
) -> Result<SpreadEstimate> {
    positive("a", a)?;
    positive("k_max", k_max)?;
    q.validate()?;
    Ok(quadrature_estimate(k2_moments(a, p, k_max, q)?, p, a))
}

/// Total coincidence probability ∫ dk₂ |∫₋ₐ⁺ᵃ Ψ(y₁; k₂) dy₁|², the
/// denominator of the momentum spread.
pub fn coincidence_weight(a: f64, p: &PacketParams, q: &QuadratureSpec) -> Result<f64> {
    positive("a", a)?;
    q.validate()?;
    let kernel = MixedKernel::new(p)?;
    let upper = q.domain_sigmas * p.effective_k_width();
    let r = integrate(
        |k2| {
            kernel
                .window(k2, a)
                .map(|v| v.norm_sqr())
                .unwrap_or(f64::NAN)
        },
        &panels(0.0, upper, 12, &momentum_features(p)),
        Tolerance {
            absolute: 1e-300,
            ..q.tolerance()
        },
    );
    if r.value.is_nan() {
        return Err(Error::Domain {
            field: "a",
            value: a,
            reason: "window amplitude could not be evaluated",
        });
    }
    Ok(2.0 * r.into_result()?.value)
}

/// (Δk₂)² if the slit acted on probabilities instead of amplitudes, i.e. with
/// density ∫₋ₐ⁺ᵃ |Ψ(y₁; k₂)|² dy₁. Exposed to guard against that mistake.
pub fn dk2sq_incoherent(a: f64, p: &PacketParams, q: &QuadratureSpec) -> Result<SpreadEstimate> {
    positive("a", a)?;
    q.validate()?;
    let w = p.widths();
    let sum = w.sum();
    let pref = mixed_prefactor(p)?.norm_sqr();
    // |Ψ(y₁;k₂)|² = pref · exp(−2Re(A) y₁² + 2Re(i D/S) k₂ y₁ − 2Re(1/S) k₂²)
    let quad = Complex64::from(2.0 * (w.plus * w.minus / sum).re);
    let cross = 2.0 * (Complex64::i() * w.diff() / sum).re;
    let inv = 2.0 * (1.0 / sum).re;
    let m = even_second_moment(
        |k2| {
            gaussian_window(
                quad,
                Complex64::from(cross * k2),
                -a,
                a,
                Complex64::from(-inv * k2 * k2),
            )
            .map(|v| pref * v.re)
        },
        q.domain_sigmas * p.effective_k_width(),
        p.effective_k_width(),
        &momentum_features(p),
        q,
    )?;
    Ok(quadrature_estimate(m, p, a))
}

/// (Δy₂)² of the right particle at the right-screen plane, in coincidence with
/// the left particle passing |y₁| ≤ a.
pub fn dy2sq_quadrature(a: f64, p: &PacketParams, q: &QuadratureSpec) -> Result<SpreadEstimate> {
    positive("a", a)?;
    q.validate()?;
    let kernel = PositionKernel::new(p)?;
    let width = p.effective_y_width();
    let m = even_second_moment(
        |y2| {
            kernel
                .window(y2, a)
                .or_else(|_| position_window_amplitude(y2, a, p))
                .map(|v| v.norm_sqr())
        },
        q.domain_sigmas * width,
        width,
        &position_features(p),
        q,
    )?;
    Ok(quadrature_estimate(m, p, a))
}

/// Which representation of the state to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Momentum,
    Mixed,
    Position,
}

/// ∫∫ f(x, y) over [−x_max, x_max] × [−y_max, y_max] by nested adaptive
/// quadrature.
fn integrate_2d<F>(f: F, x_max: f64, y_max: f64, q: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let outer_tol = Tolerance {
        absolute: 1e-300,
        ..q.tolerance()
    };
    let inner_tol = Tolerance {
        relative: (q.relative_tolerance * 1e-2).max(1e-13),
        ..outer_tol
    };
    let inner_breaks = panels(-y_max, y_max, 12, &[]);
    let failed = Cell::new(false);
    let r = integrate(
        |x| {
            let r = integrate(|y| f(x, y), &inner_breaks, inner_tol);
            if !r.converged {
                failed.set(true);
            }
            r.value
        },
        &panels(-x_max, x_max, 12, &[]),
        outer_tol,
    );
    if failed.get() {
        return Err(Error::Convergence {
            estimate: r.value,
            error_bound: r.error,
            subdivisions: r.subdivisions,
        });
    }
    Ok(r.into_result()?.value)
}

/// ∫∫ |Ψ|² in the chosen representation; 1 for a correctly normalized state.
pub fn total_probability(rep: Representation, p: &PacketParams, q: &QuadratureSpec) -> Result<f64> {
    q.validate()?;
    let ky = q.domain_sigmas * p.effective_k_width();
    let yy = q.domain_sigmas * p.effective_y_width();
    match rep {
        Representation::Momentum => integrate_2d(
            |k1, k2| crate::wavepacket::psi_momentum(k1, k2, p).norm_sqr(),
            ky,
            ky,
            q,
        ),
        Representation::Mixed => {
            mixed_prefactor(p)?;
            integrate_2d(
                |y1, k2| {
                    psi_mixed(y1, k2, p)
                        .map(|v| v.norm_sqr())
                        .unwrap_or(f64::NAN)
                },
                yy,
                ky,
                q,
            )
        }
        Representation::Position => {
            let prec = crate::wavepacket::PositionPrecision::of(p);
            integrate_2d(|y1, y2| prec.density(y1, y2), yy, yy, q)
        }
    }
}

/// Δ(k₁ + k₂) · Δ[(y₁ + y₂)/2], each variance by quadrature of the momentum
/// and position densities.
pub fn heisenberg_product(p: &PacketParams, q: &QuadratureSpec) -> Result<f64> {
    q.validate()?;
    let ky = q.domain_sigmas * p.effective_k_width();
    let yy = q.domain_sigmas * p.effective_y_width();
    let k_var = integrate_2d(
        |k1, k2| (k1 + k2).powi(2) * crate::wavepacket::psi_momentum(k1, k2, p).norm_sqr(),
        ky,
        ky,
        q,
    )?;
    let prec = crate::wavepacket::PositionPrecision::of(p);
    let y_var = integrate_2d(
        |y1, y2| (0.5 * (y1 + y2)).powi(2) * prec.density(y1, y2),
        yy,
        yy,
        q,
    )?;
    Ok((k_var * y_var).sqrt())
}

/// Slit half-widths used by [`recover_expansion_coefficients`].
pub const RICHARDSON_WIDTHS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Second-order coefficients read off the quadrature spreads:
/// f(a) = [spread(a)/narrow − 1]/a² is extrapolated to a → 0 over
/// [`RICHARDSON_WIDTHS`], eliminating the a² and a⁴ terms. Returns (δ, δ′).
pub fn recover_expansion_coefficients(p: &PacketParams) -> Result<(f64, f64)> {
    let q = QuadratureSpec::precise();
    let k_narrow = crate::closed_form::dk2sq_narrow_value(p);
    let y_narrow = dy2sq_narrow_value(p);
    let mut fk = [0.0; 3];
    let mut fy = [0.0; 3];
    for (i, &a) in RICHARDSON_WIDTHS.iter().enumerate() {
        fk[i] = (dk2sq_quadrature(a, p, &q)?.value / k_narrow - 1.0) / (a * a);
        fy[i] = (dy2sq_quadrature(a, p, &q)?.value / y_narrow - 1.0) / (a * a);
    }
    let extrapolate = |f: [f64; 3]| {
        let r0 = (4.0 * f[1] - f[0]) / 3.0;
        let r1 = (4.0 * f[2] - f[1]) / 3.0;
        (16.0 * r1 - r0) / 15.0
    };
    Ok((-0.5 * extrapolate(fk), 0.5 * extrapolate(fy)))
}

/// 1/√(2π), the Fourier normalization used throughout.
pub(crate) const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{dk2sq_narrow, dk2sq_wide, dy2sq_narrow};
    use approx::assert_relative_eq;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn params(sp: f64, sm: f64, m: f64, t: f64) -> PacketParams {
        PacketParams::new(sp, sm, m, t).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn fast_path_agrees_with_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = params(
                rng.random_range(0.2..2.0),
                rng.random_range(0.5..5.0),
                rng.random_range(0.5..2.0),
                rng.random_range(0.0..2.0),
            );
            let k2 = rng.random_range(-3.0..3.0);
            let a = rng.random_range(0.01..2.0);
            let fast = MixedKernel::new(&p).unwrap().window(k2, a).unwrap();
            let slow = slit_amplitude_by_quadrature(k2, a, &p, fallback_tolerance()).unwrap();
            assert!(rel(fast, slow) < 1e-10, "{fast} vs {slow}");

            let y2 = rng.random_range(-2.0..2.0);
            let fast = PositionKernel::new(&p).unwrap().window(y2, a).unwrap();
            let slow = position_window_by_quadrature(y2, a, &p, fallback_tolerance()).unwrap();
            assert!(rel(fast, slow) < 1e-10, "{fast} vs {slow}");
        }
    }

    #[test]
    fn slit_amplitude_modulus_even_in_k2() {
        let p = params(0.5, 2.0, 1.0, 0.8);
        for &k in &[0.1, 0.9, 2.5] {
            let l = slit_amplitude(k, 0.7, &p).unwrap().norm();
            let r = slit_amplitude(-k, 0.7, &p).unwrap().norm();
            assert_relative_eq!(l, r, max_relative = 1e-13);
        }
    }

    #[test]
    fn wide_window_recovers_full_transform() {
        // ∫ over all y₁ of Ψ(y₁; k₂) is √(2π) times the momentum amplitude at k₁ = 0.
        let p = params(1.0, 3.0, 1.0, 0.5);
        let a = 50.0 * p.effective_y_width();
        for &k in &[0.0, 0.4, 1.3] {
            let windowed = slit_amplitude(k, a, &p).unwrap();
            let full = crate::wavepacket::psi_momentum(0.0, k, &p) / INV_SQRT_2PI;
            assert!((windowed.norm() - full.norm()).abs() < 1e-8 * full.norm());
        }
    }

    #[test]
    fn narrow_and_wide_limits() {
        let q = QuadratureSpec::default();
        let p = params(1.0, 3.0, 1.0, 0.0);
        let narrow = dk2sq_quadrature(1e-4 / 3.0, &p, &q).unwrap();
        assert_relative_eq!(narrow.value, dk2sq_narrow(&p).value, max_relative = 1e-5);
        for t in [0.0, 1.0, 10.0] {
            let p = p.with_time(t).unwrap();
            let wide = dk2sq_quadrature(50.0 * p.effective_y_width(), &p, &q).unwrap();
            assert_relative_eq!(wide.value, dk2sq_wide(&p).value, max_relative = 1e-4);
        }
        let y = dy2sq_quadrature(1e-5, &p, &q).unwrap();
        assert_relative_eq!(y.value, dy2sq_narrow(&p).value, max_relative = 1e-5);
    }

    #[test]
    fn golden_momentum_spread() {
        // Frozen from a 30-digit arbitrary-precision evaluation.
        let p = params(0.1, 2.0, 1.0, 0.0);
        let v = dk2sq_quadrature(0.5, &p, &QuadratureSpec::golden()).unwrap();
        assert_relative_eq!(v.value, 0.854_588_260_613_565_7, max_relative = 1e-9);
    }

    #[test]
    fn golden_position_spread() {
        let p = params(0.5, 4.0, 1.0, 0.7);
        let v = dy2sq_quadrature(0.3, &p, &QuadratureSpec::golden()).unwrap();
        assert_relative_eq!(v.value, 2.513_490_143_435_600_6, max_relative = 1e-9);
    }

    #[test]
    fn late_time_values_against_reference() {
        // Beyond the δ sign flip the momentum spread exceeds its narrow limit.
        let p = params(1.0, 3.0, 1.0, 1.0);
        let q = QuadratureSpec::golden();
        let k = dk2sq_quadrature(0.3, &p, &q).unwrap().value;
        assert_relative_eq!(k, 1.065_309_330_178_156_3, max_relative = 1e-9);
        assert!(k > dk2sq_narrow(&p).value);
        let y = dy2sq_quadrature(0.3, &p, &q).unwrap().value;
        assert_relative_eq!(y, 1.636_467_746_281_338_7, max_relative = 1e-9);
        assert!(y < dy2sq_narrow(&p).value);
    }

    #[test]
    fn window_doubling_is_negligible() {
        let p = params(0.7, 2.5, 1.0, 0.3);
        let q = QuadratureSpec::golden();
        let wide = QuadratureSpec {
            domain_sigmas: 24.0,
            ..q
        };
        for a in [0.05, 0.4, 2.0] {
            let base = dk2sq_quadrature(a, &p, &q).unwrap().value;
            let doubled = dk2sq_quadrature(a, &p, &wide).unwrap().value;
            assert!((base - doubled).abs() < 1e-10 * base);
            let base = dy2sq_quadrature(a, &p, &q).unwrap().value;
            let doubled = dy2sq_quadrature(a, &p, &wide).unwrap().value;
            assert!((base - doubled).abs() < 1e-10 * base);
        }
    }

    #[test]
    fn coincidence_weight_grows_with_slit_at_time_zero() {
        // At t = 0 the position amplitude is real and positive, so widening the
        // window can only add to it.
        let q = QuadratureSpec::default();
        for &(sp, sm) in &[(1.0, 3.0), (0.5, 2.0), (2.0, 0.7)] {
            let p = params(sp, sm, 1.0, 0.0);
            let mut last = 0.0;
            for i in 0..15 {
                let a = 0.01 * 1.6f64.powi(i);
                let w = coincidence_weight(a, &p, &q).unwrap();
                assert!(w >= last * (1.0 - 1e-9), "a = {a}: {w} < {last}");
                last = w;
            }
        }
    }

    #[test]
    fn coincidence_weight_can_shrink_after_spreading() {
        // Phase cancellation inside the window: reference values from an
        // independent double quadrature in the position representation.
        let p = params(1.0, 3.0, 1.0, 0.6);
        let q = QuadratureSpec::default();
        let mid = coincidence_weight(1.76, &p, &q).unwrap();
        let wide = coincidence_weight(2.8, &p, &q).unwrap();
        assert_relative_eq!(mid, 1.823_418_215_589_11, max_relative = 1e-7);
        assert_relative_eq!(wide, 1.572_004_075_449_24, max_relative = 1e-7);
    }

    #[test]
    fn open_slit_weight_is_transform_at_zero() {
        // Fully open slit: the window integral is √(2π) Ψ(k₁ = 0, k₂).
        let p = params(1.0, 3.0, 1.0, 0.6);
        let q = QuadratureSpec::default();
        let full = coincidence_weight(60.0 * p.effective_y_width(), &p, &q).unwrap();
        let direct = integrate(
            |k| 2.0 * PI * crate::wavepacket::psi_momentum(0.0, k, &p).norm_sqr(),
            &panels(-20.0, 20.0, 40, &[]),
            Tolerance::new(1e-12, 1e-300),
        );
        assert_relative_eq!(full, direct.value, max_relative = 1e-7);
    }

    #[test]
    fn coherent_window_differs_from_incoherent() {
        let q = QuadratureSpec::default();
        for &(sp, sm, t) in &[(1.0, 3.0, 0.5), (0.5, 2.0, 1.5), (1.0, 1.5, 0.2)] {
            let p = params(sp, sm, 1.0, t);
            let coherent = dk2sq_quadrature(0.4, &p, &q).unwrap().value;
            let incoherent = dk2sq_incoherent(0.4, &p, &q).unwrap().value;
            assert!(
                (coherent - incoherent).abs() > 1e-4 * coherent,
                "{coherent} vs {incoherent}"
            );
        }
        // Unentangled state: the slit cannot matter either way.
        let p = params(1.0, 1.0, 1.0, 0.7);
        let coherent = dk2sq_quadrature(0.4, &p, &q).unwrap().value;
        let incoherent = dk2sq_incoherent(0.4, &p, &q).unwrap().value;
        assert_relative_eq!(coherent, incoherent, max_relative = 1e-8);
    }

    #[test]
    fn non_convergence_reported() {
        let q = QuadratureSpec {
            relative_tolerance: 1e-300,
            absolute_tolerance: 1e-300,
            max_subdivisions: 50,
            ..Default::default()
        };
        let e = dk2sq_quadrature(0.3, &params(1.0, 3.0, 1.0, 0.0), &q).unwrap_err();
        match e {
            Error::Convergence { estimate, .. } => assert!((estimate - 2.4).abs() < 0.2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn all_representations_normalized() {
        let q = QuadratureSpec::golden();
        for &(sp, sm, m, t) in &[(1.0, 3.0, 1.0, 0.0), (0.4, 2.2, 0.7, 1.3)] {
            let p = PacketParams::new(sp, sm, m, t).unwrap();
            for rep in [
                Representation::Momentum,
                Representation::Mixed,
                Representation::Position,
            ] {
                let n = total_probability(rep, &p, &q).unwrap();
                assert!((n - 1.0).abs() < 1e-9, "{rep:?}: {n}");
            }
        }
    }

    #[test]
    fn heisenberg_minimum_at_time_zero() {
        let q = QuadratureSpec::golden();
        let v = heisenberg_product(&params(1.0, 3.0, 1.0, 0.0), &q).unwrap();
        assert!((v - 0.5).abs() < 1e-8, "{v}");
        let later = heisenberg_product(&params(1.0, 3.0, 1.0, 2.0), &q).unwrap();
        assert!(later > 0.5);
    }

    #[test]
    fn expansion_coefficients_recovered() {
        for t in [0.0, 0.2, 1.0] {
            let p = params(1.0, 3.0, 1.0, t);
            let c = crate::closed_form::delta_coeff(&p);
            let (d, dp) = recover_expansion_coefficients(&p).unwrap();
            assert!(
                (d - c.delta).abs() < 1e-4 * c.delta.abs(),
                "t={t}: {d} vs {}",
                c.delta
            );
            assert!(
                (dp - c.delta_prime).abs() < 1e-4 * c.delta_prime.abs(),
                "t={t}: {dp} vs {}",
                c.delta_prime
            );
        }
    }

    #[test]
    fn rejects_bad_slit() {
        let p = params(1.0, 3.0, 1.0, 0.0);
        assert!(dk2sq_quadrature(0.0, &p, &QuadratureSpec::default()).is_err());
        assert!(slit_amplitude(1.0, -1.0, &p).is_err());
    }
}
