//! Physical parameters of the two-particle packet and its time-evolved widths.
//!
//! Natural units with ħ = 1 throughout: momentum and inverse length share a unit.

use num_complex::Complex64;

use crate::error::{positive, Error, Result};

/// The entangled state: momentum widths of the total (`sigma_plus`) and
/// relative (`sigma_minus`) momentum, particle mass, and evolution time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketParams {
    sigma_plus: f64,
    sigma_minus: f64,
    mass: f64,
    time: f64,
}

impl PacketParams {
    pub fn new(sigma_plus: f64, sigma_minus: f64, mass: f64, time: f64) -> Result<Self> {
        positive("sigma_plus", sigma_plus)?;
        positive("sigma_minus", sigma_minus)?;
        positive("mass", mass)?;
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::Domain {
                field: "time",
                value: time,
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self {
            sigma_plus,
            sigma_minus,
            mass,
            time,
        })
    }

    pub fn sigma_plus(&self) -> f64 {
        self.sigma_plus
    }

    pub fn sigma_minus(&self) -> f64 {
        self.sigma_minus
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Same state evolved to a different time.
    pub fn with_time(&self, time: f64) -> Result<Self> {
        Self::new(self.sigma_plus, self.sigma_minus, self.mass, time)
    }

    /// Set when the relative-momentum width does not exceed the total-momentum
    /// width. Physical sources have `sigma_minus >> sigma_plus`; the formulas
    /// hold either way.
    pub fn unusual_ordering(&self) -> bool {
        self.sigma_minus <= self.sigma_plus
    }

    /// `t / m`, the only combination of time and mass the state depends on.
    pub fn reduced_time(&self) -> f64 {
        self.time / self.mass
    }

    pub fn widths(&self) -> EvolvedWidths {
        let plus = complex_width_sq_unchecked(self.sigma_plus, self.reduced_time());
        let minus = complex_width_sq_unchecked(self.sigma_minus, self.reduced_time());
        EvolvedWidths {
            plus: plus.0,
            minus: minus.0,
        }
    }

    /// Standard deviation of the unconditioned y₁ (equivalently y₂) marginal at time t.
    pub fn effective_y_width(&self) -> f64 {
        let w = self.widths();
        (0.25 * (1.0 / w.plus.re + 1.0 / w.minus.re)).sqrt()
    }

    /// Standard deviation of the unconditioned k₂ marginal; independent of t.
    pub fn effective_k_width(&self) -> f64 {
        (0.25 * (self.sigma_plus.powi(2) + self.sigma_minus.powi(2))).sqrt()
    }
}

/// Time-evolved complex squared width σ(t)² = 1 / (1/σ² + i t/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexWidthSq(Complex64);

impl ComplexWidthSq {
    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

pub fn complex_width_sq(sigma: f64, t: f64, m: f64) -> Result<ComplexWidthSq> {
    positive("sigma", sigma)?;
    positive("mass", m)?;
    if !t.is_finite() {
        return Err(Error::Domain {
            field: "time",
            value: t,
            reason: "must be finite",
        });
    }
    Ok(complex_width_sq_unchecked(sigma, t / m))
}

fn complex_width_sq_unchecked(sigma: f64, tau: f64) -> ComplexWidthSq {
    // 1/(x + iy) = (x - iy)/(x² + y²), written to stay accurate for large σ²τ.
    let s2 = sigma * sigma;
    let g = s2 * tau;
    let denom = 1.0 + g * g;
    ComplexWidthSq(Complex64::new(s2 / denom, -s2 * g / denom))
}

/// The two evolved squared widths plus their sum and difference, which is the
/// combination every representation of the state is written in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedWidths {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl EvolvedWidths {
    pub fn sum(&self) -> Complex64 {
        self.plus + self.minus
    }

    pub fn diff(&self) -> Complex64 {
        self.plus - self.minus
    }
}

/// Principal square root, refusing radicands off the right half-plane.
pub(crate) fn principal_sqrt(z: Complex64) -> Result<Complex64> {
    if z.re > 0.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(z.sqrt())
    } else {
        Err(Error::Branch { re: z.re, im: z.im })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn width_at_zero_time_is_sigma_squared() {
        let w = complex_width_sq(1.0, 0.0, 1.0).unwrap();
        assert_eq!((w.re(), w.im()), (1.0, 0.0));
        let w = complex_width_sq(0.37, 0.0, 2.0).unwrap();
        assert_eq!(w.im(), 0.0);
        assert_relative_eq!(w.re(), 0.37 * 0.37, max_relative = 1e-15);
    }

    #[test]
    fn width_unit_case() {
        let w = complex_width_sq(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(w.re(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(w.im(), -0.5, max_relative = 1e-15);
    }

    #[test]
    fn width_against_exact_rational() {
        // 1/(1/4 + 3i/5) = (100 - 240 i)/169
        let w = complex_width_sq(2.0, 3.0, 5.0).unwrap();
        assert_relative_eq!(w.re(), 100.0 / 169.0, max_relative = 1e-15);
        assert_relative_eq!(w.im(), -240.0 / 169.0, max_relative = 1e-15);
    }

    #[test]
    fn width_rejects_bad_inputs() {
        assert!(matches!(
            complex_width_sq(0.0, 1.0, 1.0),
            Err(Error::Domain { field: "sigma", .. })
        ));
        assert!(matches!(
            complex_width_sq(1.0, 1.0, -2.0),
            Err(Error::Domain { field: "mass", .. })
        ));
    }

    #[test]
    fn params_validation() {
        assert!(PacketParams::new(1.0, 3.0, 1.0, 0.0).is_ok());
        assert!(PacketParams::new(1.0, 3.0, 1.0, -0.1).is_err());
        assert!(PacketParams::new(f64::NAN, 3.0, 1.0, 0.0).is_err());
        assert!(PacketParams::new(1.0, 3.0, 0.0, 0.0).is_err());
        assert!(PacketParams::new(3.0, 1.0, 1.0, 0.0)
            .unwrap()
            .unusual_ordering());
        assert!(!PacketParams::new(1.0, 3.0, 1.0, 0.0)
            .unwrap()
            .unusual_ordering());
    }

    #[test]
    fn branch_check() {
        assert!(principal_sqrt(Complex64::new(-1.0, 0.0)).is_err());
        let r = principal_sqrt(Complex64::new(0.0001, -3.0)).unwrap();
        assert!(r.re > 0.0);
    }

    proptest::proptest! {
        #[test]
        fn width_real_part_positive(sigma in 1e-3f64..1e3, t in 0.0f64..1e6, m in 1e-3f64..1e3) {
            let w = complex_width_sq(sigma, t, m).unwrap();
            proptest::prop_assert!(w.re() > 0.0);
            // reciprocal check: 1/w = 1/σ² + i t/m
            let inv = 1.0 / w.value();
            proptest::prop_assert!((inv.re - 1.0 / (sigma * sigma)).abs() <= 1e-9 * inv.norm());
            proptest::prop_assert!((inv.im - t / m).abs() <= 1e-9 * inv.norm());
        }
    }
}
