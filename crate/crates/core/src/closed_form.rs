//! Analytic coincidence spreads in the narrow-, small- and wide-slit regimes.
//!
//! Momentum spreads (Δk₂)² apply to the setup with the left slit only and the
//! right side wide open; position spreads (Δy₂)² describe the right-moving
//! particle as it crosses the right-screen plane.

use std::fmt;

use crate::error::{positive, Result};
use crate::params::PacketParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedNarrow,
    ClosedSmallA,
    ClosedWide,
    Quadrature,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedNarrow => "closed-narrow",
            Method::ClosedSmallA => "closed-small-a",
            Method::ClosedWide => "closed-wide",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

/// Slit half-width attached to an estimate; closed-form limits carry a marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlitHalfWidth {
    ZeroLimit,
    InfiniteLimit,
    Finite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Warning {
    /// Second-order expansion used with 2a²|δ| (or 2a²δ′) above 0.5.
    ExpansionOutOfRegime,
    /// Band-limited spread of a sharply truncated packet; grows with k_max.
    BandDependent,
    /// sigma_minus <= sigma_plus.
    UnusualOrdering,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Warning::ExpansionOutOfRegime => "expansion_out_of_regime",
            Warning::BandDependent => "band_dependent",
            Warning::UnusualOrdering => "unusual_ordering",
        })
    }
}

/// A variance together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadEstimate {
    pub value: f64,
    pub method: Method,
    /// Absolute error bound (quadrature) or standard error (Monte Carlo);
    /// zero for closed forms.
    pub error_estimate: f64,
    pub params: PacketParams,
    pub slit_half_width: SlitHalfWidth,
    pub warnings: Vec<Warning>,
}

impl SpreadEstimate {
    pub(crate) fn closed(
        value: f64,
        method: Method,
        p: &PacketParams,
        slit: SlitHalfWidth,
    ) -> Self {
        let mut warnings = Vec::new();
        if p.unusual_ordering() {
            warnings.push(Warning::UnusualOrdering);
        }
        Self {
            value,
            method,
            error_estimate: 0.0,
            params: *p,
            slit_half_width: slit,
            warnings,
        }
    }

    pub fn has_warning(&self, w: Warning) -> bool {
        self.warnings.contains(&w)
    }
}

/// Second-order slit-width coefficients: (Δk₂)² ≈ narrow·(1 − 2a²δ) and
/// (Δy₂)² ≈ narrow·(1 + 2a²δ′).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCoefficients {
    pub delta: f64,
    /// Non-negative at t = 0 but not for every t > 0: it takes the sign of
    /// Re[(σ₊(t)² − σ₋(t)²)²], which turns negative once the imaginary parts of
    /// the evolved widths dominate their real parts.
    pub delta_prime: f64,
    /// δ > 0 strictly before this time, zero at it, negative after
    /// (for σ₊ ≠ σ₋; δ vanishes identically when the widths coincide).
    pub sign_flip_time: f64,
}

// Shorthand shared by every formula below.
struct Terms {
    sp2: f64,
    sm2: f64,
    sum: f64,
    /// σ₊²σ₋² t²/m²
    q: f64,
    /// (2σ₊σ₋/(σ₊²+σ₋²))²
    kappa2: f64,
    tau2: f64,
}

impl Terms {
    fn of(p: &PacketParams) -> Self {
        let sp2 = p.sigma_plus().powi(2);
        let sm2 = p.sigma_minus().powi(2);
        let sum = sp2 + sm2;
        let tau2 = p.reduced_time().powi(2);
        Self {
            sp2,
            sm2,
            sum,
            q: sp2 * sm2 * tau2,
            kappa2: 4.0 * sp2 * sm2 / (sum * sum),
            tau2,
        }
    }
}

/// (Δk₂)² with the left slit closed to a point.
pub fn dk2sq_narrow(p: &PacketParams) -> SpreadEstimate {
    let v = dk2sq_narrow_value(p);
    SpreadEstimate::closed(v, Method::ClosedNarrow, p, SlitHalfWidth::ZeroLimit)
}

pub(crate) fn dk2sq_narrow_value(p: &PacketParams) -> f64 {
    // sum/4·(1 + κ²q)/(1 + q), written as the wide-slit value plus a
    // non-negative excess so rounding cannot order the two the wrong way.
    let t = Terms::of(p);
    t.sp2 * t.sm2 / t.sum + (t.sp2 - t.sm2).powi(2) / (4.0 * t.sum * (1.0 + t.q))
}

/// (Δk₂)² with the left slit fully open; independent of t.
pub fn dk2sq_wide(p: &PacketParams) -> SpreadEstimate {
    let v = dk2sq_wide_value(p);
    SpreadEstimate::closed(v, Method::ClosedWide, p, SlitHalfWidth::InfiniteLimit)
}

pub(crate) fn dk2sq_wide_value(p: &PacketParams) -> f64 {
    let t = Terms::of(p);
    t.sp2 * t.sm2 / t.sum
}

pub fn delta_coeff(p: &PacketParams) -> ExpansionCoefficients {
    let t = Terms::of(p);
    let diff2 = (t.sp2 - t.sm2).powi(2);
    let delta =
        diff2 / (12.0 * t.sum) / (1.0 + t.q) * (1.0 - t.kappa2 * t.q) / (1.0 + t.kappa2 * t.q);

    // Same value as sum/12·[2(1+q)/(P·M) − (1+κ²)/(1+q)], rearranged so the
    // (σ₊² − σ₋²)² factor is explicit and nothing cancels when σ₊ ≈ σ₋.
    let spread_plus = 1.0 + t.sp2 * t.sp2 * t.tau2;
    let spread_minus = 1.0 + t.sm2 * t.sm2 * t.tau2;
    let cross = (t.sp2 + t.sm2).powi(2) * t.tau2;
    let delta_prime = diff2 * ((1.0 - t.q).powi(2) - cross)
        / (12.0 * spread_plus * spread_minus * (t.sp2 * spread_minus + t.sm2 * spread_plus));

    let sign_flip_time = p.mass() * t.sum / (2.0 * t.sp2 * t.sm2);
    ExpansionCoefficients {
        delta,
        delta_prime,
        sign_flip_time,
    }
}

fn regime_flag(est: &mut SpreadEstimate, correction: f64) {
    if correction.abs() > 0.5 {
        est.warnings.push(Warning::ExpansionOutOfRegime);
    }
}

/// (Δk₂)² to second order in the slit half-width.
pub fn dk2sq_small_a(a: f64, p: &PacketParams) -> Result<SpreadEstimate> {
    positive("a", a)?;
    let delta = delta_coeff(p).delta;
    let correction = 2.0 * a * a * delta;
    let mut est = SpreadEstimate::closed(
        dk2sq_narrow_value(p) * (1.0 - correction),
        Method::ClosedSmallA,
        p,
        SlitHalfWidth::Finite(a),
    );
    regime_flag(&mut est, correction);
    Ok(est)
}

/// (Δy₂)² at the right-screen plane with the left slit closed to a point.
pub fn dy2sq_narrow(p: &PacketParams) -> SpreadEstimate {
    let v = dy2sq_narrow_value(p);
    SpreadEstimate::closed(v, Method::ClosedNarrow, p, SlitHalfWidth::ZeroLimit)
}

pub(crate) fn dy2sq_narrow_value(p: &PacketParams) -> f64 {
    let t = Terms::of(p);
    (1.0 + t.sp2 * t.sp2 * t.tau2) * (1.0 + t.sm2 * t.sm2 * t.tau2) / (t.sum * (1.0 + t.q))
}

/// Companion of [`dy2sq_narrow`]: the left particle's own position spread
/// vanishes in the same limit.
pub fn dy1sq_narrow(p: &PacketParams) -> SpreadEstimate {
    SpreadEstimate::closed(0.0, Method::ClosedNarrow, p, SlitHalfWidth::ZeroLimit)
}

/// (Δy₂)² to second order in the slit half-width.
pub fn dy2sq_small_a(a: f64, p: &PacketParams) -> Result<SpreadEstimate> {
    positive("a", a)?;
    let dp = delta_coeff(p).delta_prime;
    let correction = 2.0 * a * a * dp;
    let mut est = SpreadEstimate::closed(
        dy2sq_narrow_value(p) * (1.0 + correction),
        Method::ClosedSmallA,
        p,
        SlitHalfWidth::Finite(a),
    );
    regime_flag(&mut est, correction);
    Ok(est)
}

/// Parameters of the same state written in Qureshi's variables, via
/// σ₊² = 1/(4Ω₀²) and σ₋² = 4σ².
///
/// The source gives no units; here Ω₀ is taken as an inverse momentum and σ as
/// a momentum so that both widths remain momenta.
pub fn from_qureshi(omega0: f64, sigma: f64, mass: f64, time: f64) -> Result<PacketParams> {
    positive("omega0", omega0)?;
    positive("sigma", sigma)?;
    PacketParams::new(1.0 / (2.0 * omega0), 2.0 * sigma, mass, time)
}

/// Inverse of [`from_qureshi`]: returns (Ω₀, σ).
pub fn to_qureshi(p: &PacketParams) -> (f64, f64) {
    (1.0 / (2.0 * p.sigma_plus()), 0.5 * p.sigma_minus())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn params(sp: f64, sm: f64, m: f64, t: f64) -> PacketParams {
        PacketParams::new(sp, sm, m, t).unwrap()
    }

    /// Independent route: δ and δ′ from the complex widths, derived by
    /// expanding the window integral to second order in a.
    fn delta_prime_printed_form(p: &PacketParams) -> f64 {
        let t = Terms::of(p);
        let spread_plus = 1.0 + t.sp2 * t.sp2 * t.tau2;
        let spread_minus = 1.0 + t.sm2 * t.sm2 * t.tau2;
        t.sum / 12.0
            * (2.0 * (1.0 + t.q) / (spread_plus * spread_minus) - (1.0 + t.kappa2) / (1.0 + t.q))
    }

    fn coefficients_from_widths(p: &PacketParams) -> (f64, f64) {
        let tau = p.reduced_time();
        let w = |s: f64| 1.0 / Complex64::new(1.0 / (s * s), tau);
        let (plus, minus) = (w(p.sigma_plus()), w(p.sigma_minus()));
        let (s, d) = (plus + minus, plus - minus);
        let delta = (d * d / (s * s)).re / (12.0 * (1.0 / s).re);
        let delta_prime = (d * d).re / (12.0 * s.re);
        (delta, delta_prime)
    }

    #[test]
    fn narrow_momentum_values() {
        assert_relative_eq!(dk2sq_narrow(&params(1.0, 3.0, 1.0, 0.0)).value, 2.5);
        let late = dk2sq_narrow(&params(1.0, 3.0, 1.0, 1e8)).value;
        assert!((late - 0.9).abs() < 1e-6);
        for t in [0.0, 0.3, 7.0] {
            assert_relative_eq!(
                dk2sq_narrow(&params(1.7, 1.7, 2.0, t)).value,
                1.7 * 1.7 / 2.0,
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn wide_momentum_values() {
        let est = dk2sq_wide(&params(1.0, 3.0, 1.0, 4.0));
        assert_relative_eq!(est.value, 0.9, max_relative = 1e-15);
        assert_eq!(est.error_estimate, 0.0);
        assert_eq!(est.slit_half_width, SlitHalfWidth::InfiniteLimit);
        assert_relative_eq!(
            dk2sq_wide(&params(0.6, 0.6, 1.0, 0.0)).value,
            0.18,
            max_relative = 1e-15
        );
    }

    #[test]
    fn delta_values() {
        let c = delta_coeff(&params(1.0, 3.0, 1.0, 0.0));
        assert_relative_eq!(c.delta, 8.0 / 15.0, max_relative = 1e-15);
        assert_relative_eq!(c.delta_prime, 8.0 / 15.0, max_relative = 1e-14);
        let c = delta_coeff(&params(1.0, 2.0, 1.0, 0.0));
        assert_relative_eq!(c.delta_prime, 0.15, max_relative = 1e-14);
        assert_relative_eq!(c.delta, 0.15, max_relative = 1e-14);
        assert_eq!(delta_coeff(&params(2.0, 2.0, 1.0, 3.0)).delta, 0.0);
        assert_relative_eq!(
            delta_coeff(&params(1.0, 3.0, 1.0, 0.0)).sign_flip_time,
            10.0 / 18.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn small_a_values() {
        let p = params(1.0, 3.0, 1.0, 0.0);
        assert_relative_eq!(
            dk2sq_small_a(0.1, &p).unwrap().value,
            2.5 * (1.0 - 2.0 * 0.01 * 8.0 / 15.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            dy2sq_small_a(0.1, &p).unwrap().value,
            0.1 * (1.0 + 2.0 * 0.01 * 8.0 / 15.0),
            max_relative = 1e-14
        );
        let tiny = dk2sq_small_a(1e-9, &p).unwrap();
        assert_relative_eq!(tiny.value, 2.5, max_relative = 1e-15);
        assert!(tiny.warnings.is_empty());
        assert!(dk2sq_small_a(1.0, &p)
            .unwrap()
            .has_warning(Warning::ExpansionOutOfRegime));
        assert!(dk2sq_small_a(0.0, &p).is_err());
        assert!(dy2sq_small_a(-1.0, &p).is_err());
    }

    #[test]
    fn narrow_position_values() {
        assert_relative_eq!(
            dy2sq_narrow(&params(1.0, 3.0, 1.0, 0.0)).value,
            0.1,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            dy2sq_narrow(&params(1.0, 1.0, 1.0, 1.0)).value,
            1.0,
            max_relative = 1e-15
        );
        assert_eq!(dy1sq_narrow(&params(1.0, 3.0, 1.0, 0.0)).value, 0.0);
        // Shrinks only with a sharp, static source.
        let sharp = dy2sq_narrow(&params(1e4, 3e4, 1.0, 0.0)).value;
        assert!(sharp < 1e-8);
        let evolved = dy2sq_narrow(&params(1e4, 3e4, 1.0, 1.0)).value;
        assert!(evolved > 1.0);
    }

    #[test]
    fn delta_prime_takes_both_signs() {
        // At t = m = 1 with σ = (1, 3) the y₂ spread shrinks with a.
        let c = delta_coeff(&params(1.0, 3.0, 1.0, 1.0));
        assert_relative_eq!(
            c.delta_prime,
            -0.011_707_317_073_170_73,
            max_relative = 1e-12
        );
    }

    #[test]
    fn small_a_position_monotone_when_delta_prime_nonnegative() {
        let p = params(0.7, 2.2, 1.0, 0.0);
        let mut last = dy2sq_narrow(&p).value;
        for i in 1..20 {
            let v = dy2sq_small_a(0.02 * i as f64, &p).unwrap().value;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn qureshi_mapping() {
        let p = from_qureshi(0.5, 0.5, 1.0, 0.0).unwrap();
        assert_eq!((p.sigma_plus(), p.sigma_minus()), (1.0, 1.0));
        let p = from_qureshi(1.0, 3.0, 1.0, 0.0).unwrap();
        assert_eq!((p.sigma_plus(), p.sigma_minus()), (0.5, 6.0));
        assert_eq!(to_qureshi(&p), (1.0, 3.0));
        assert!(from_qureshi(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(from_qureshi(1.0, -1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn unusual_ordering_warned() {
        assert!(dk2sq_narrow(&params(3.0, 1.0, 1.0, 0.0)).has_warning(Warning::UnusualOrdering));
    }

    fn draw() -> impl Strategy<Value = PacketParams> {
        (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, 0.0f64..1e3)
            .prop_map(|(a, b, c, t)| params(10f64.powf(a), 10f64.powf(b), 10f64.powf(c), t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn coefficients_match_width_route(p in draw()) {
            let c = delta_coeff(&p);
            let (delta, delta_prime) = coefficients_from_widths(&p);
            let scale = (p.sigma_plus().powi(2) - p.sigma_minus().powi(2)).powi(2)
                / (p.sigma_plus().powi(2) + p.sigma_minus().powi(2));
            prop_assert!((c.delta - delta).abs() <= 1e-9 * scale + 1e-300);
            prop_assert!((c.delta_prime - delta_prime).abs() <= 1e-9 * scale + 1e-300);
        }

        #[test]
        fn delta_sign_follows_flip_time(p in draw()) {
            let c = delta_coeff(&p);
            let t = Terms::of(&p);
            let factor = 1.0 - t.kappa2 * t.q;
            if p.sigma_plus() == p.sigma_minus() {
                prop_assert_eq!(c.delta, 0.0);
            } else if factor.abs() > 1e-9 {
                prop_assert_eq!(c.delta > 0.0, factor > 0.0);
                prop_assert_eq!(c.delta > 0.0, p.time() < c.sign_flip_time);
            }
        }

        #[test]
        fn coefficients_agree_at_time_zero(sp in -2.0f64..2.0, sm in -2.0f64..2.0) {
            let p = params(10f64.powf(sp), 10f64.powf(sm), 1.0, 0.0);
            let c = delta_coeff(&p);
            prop_assert!((c.delta - c.delta_prime).abs() <= 1e-12 * c.delta.abs());
            prop_assert!(c.delta_prime >= 0.0);
        }

        #[test]
        fn delta_prime_matches_printed_form(p in draw()) {
            let sum = p.sigma_plus().powi(2) + p.sigma_minus().powi(2);
            let dp = delta_coeff(&p).delta_prime;
            prop_assert!((dp - delta_prime_printed_form(&p)).abs() <= 1e-12 * sum);
        }

        #[test]
        fn wide_never_exceeds_narrow(p in draw()) {
            prop_assert!(dk2sq_wide(&p).value <= dk2sq_narrow(&p).value);
        }

        #[test]
        fn wide_below_small_a_in_regime(p in draw(), a in 1e-3f64..10.0) {
            let c = delta_coeff(&p);
            let small = dk2sq_small_a(a, &p).unwrap();
            // The 2a²|δ| flag alone admits rare counterexamples with a beyond the
            // y₁ width (e.g. σ = (1, 1.1), a = 10), where no a² expansion holds.
            let in_regime = !small.has_warning(Warning::ExpansionOutOfRegime)
                && a <= p.effective_y_width();
            if c.delta > 0.0 && in_regime {
                prop_assert!(dk2sq_wide(&p).value <= small.value * (1.0 + 1e-14));
            }
        }
    }

    #[test]
    fn narrow_decreases_with_time() {
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let v = dk2sq_narrow(&params(1.0, 3.0, 1.0, 0.05 * i as f64)).value;
            assert!(v <= last);
            last = v;
        }
    }
}
