//! Complex error function and the finite-window Gaussian integral built on it.

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::principal_sqrt;

/// Half-width of the square in which [`complex_erf`] is documented accurate.
pub const ERF_WINDOW: f64 = 30.0;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Error function of a complex argument, accurate to ~1e-13 relative for
/// `|Re z|, |Im z| <= 30`. Outside that square `erf` overflows or loses all
/// relative accuracy, so the call is refused.
pub fn complex_erf(z: Complex64) -> Result<Complex64> {
    if !(z.re.abs() <= ERF_WINDOW && z.im.abs() <= ERF_WINDOW) {
        return Err(Error::OutOfRange {
            re: z.re,
            im: z.im,
            limit: ERF_WINDOW,
        });
    }
    Ok(z.erf())
}

/// Faddeeva function w(z) = e^{-z²} erfc(-iz). Bounded by 1 in the closed
/// upper half-plane and defined everywhere.
pub fn faddeeva(z: Complex64) -> Complex64 {
    z.w()
}

/// `exp(shift) · ∫_lo^hi exp(-A y² + B y) dy` for `Re A > 0`.
///
/// Either limit may be infinite. Each finite endpoint contributes
/// `exp(shift - A y² + B y) · w(±i ζ)` with ζ = √A·y − B/(2√A), the sign chosen
/// so w is evaluated in the upper half-plane; the remaining constant term
/// `exp(shift + B²/4A)` survives only when the two endpoints fall in different
/// half-planes. No intermediate overflows as long as the result itself is finite.
pub fn gaussian_window(
    a_coef: Complex64,
    b_coef: Complex64,
    lo: f64,
    hi: f64,
    shift: Complex64,
) -> Result<Complex64> {
    let root = principal_sqrt(a_coef)?;
    let u = b_coef / (2.0 * root);

    // (constant-term sign, endpoint term) for erf at the given limit
    let endpoint = |y: f64| -> (f64, Complex64) {
        if y == f64::INFINITY {
            return (1.0, Complex64::new(0.0, 0.0));
        }
        if y == f64::NEG_INFINITY {
            return (-1.0, Complex64::new(0.0, 0.0));
        }
        let zeta = root * y - u;
        let scale = (shift - a_coef * y * y + b_coef * y).exp();
        if zeta.re >= 0.0 {
            (1.0, -scale * faddeeva(Complex64::i() * zeta))
        } else {
            (-1.0, scale * faddeeva(-Complex64::i() * zeta))
        }
    };

    let (c_hi, e_hi) = endpoint(hi);
    let (c_lo, e_lo) = endpoint(lo);
    let mut bracket = e_hi - e_lo;
    if c_hi != c_lo {
        bracket += (c_hi - c_lo) * (shift + u * u).exp();
    }
    let value = bracket * SQRT_PI / (2.0 * root);
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            re: value.re,
            im: value.im,
            limit: f64::MAX,
        })
    }
}
