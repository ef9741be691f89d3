//! The entangled two-particle state in momentum, mixed (y₁, k₂) and position
//! representations, with exact free evolution carried by the complex widths.
//!
//! Overall phases are kept exactly as the closed forms produce them; only
//! moduli and relative phases are physically meaningful.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::params::{principal_sqrt, PacketParams};

/// Value of a wavefunction.
pub type ComplexAmplitude = Complex64;

fn norm_prefactor(p: &PacketParams) -> f64 {
    1.0 / (PI * p.sigma_plus() * p.sigma_minus()).sqrt()
}

/// Ψ(k₁, k₂; t).
pub fn psi_momentum(k1: f64, k2: f64, p: &PacketParams) -> ComplexAmplitude {
    let tau = p.reduced_time();
    // 1/σ±(t)² = 1/σ±² + i t/m, used directly to skip the reciprocal.
    let inv_plus = Complex64::new(1.0 / p.sigma_plus().powi(2), tau);
    let inv_minus = Complex64::new(1.0 / p.sigma_minus().powi(2), tau);
    let sum = k1 + k2;
    let dif = k1 - k2;
    let exponent = -0.25 * (sum * sum * inv_plus + dif * dif * inv_minus);
    norm_prefactor(p) * exponent.exp()
}

/// Ψ(y₁; k₂; t): Fourier transform of the momentum amplitude over k₁.
pub fn psi_mixed(y1: f64, k2: f64, p: &PacketParams) -> Result<ComplexAmplitude> {
    let w = p.widths();
    let sum = w.sum();
    let prefactor = mixed_prefactor(p)?;
    let exponent =
        -(w.plus * w.minus * y1 * y1 + k2 * k2 - Complex64::i() * w.diff() * y1 * k2) / sum;
    Ok(prefactor * exponent.exp())
}

pub(crate) fn mixed_prefactor(p: &PacketParams) -> Result<Complex64> {
    let w = p.widths();
    let root_plus = principal_sqrt(w.plus)?;
    let root_minus = principal_sqrt(w.minus)?;
    let root_sum = principal_sqrt(w.sum())?;
    Ok(std::f64::consts::SQRT_2 * norm_prefactor(p) * root_plus * root_minus / root_sum)
}

/// Ψ(y₁, y₂; t): both particles in position representation.
pub fn psi_position(y1: f64, y2: f64, p: &PacketParams) -> Result<ComplexAmplitude> {
    let w = p.widths();
    let prefactor = position_prefactor(p)?;
    let exponent = -0.25 * (w.sum() * (y1 * y1 + y2 * y2) + 2.0 * w.diff() * y1 * y2);
    Ok(prefactor * exponent.exp())
}

pub(crate) fn position_prefactor(p: &PacketParams) -> Result<Complex64> {
    let w = p.widths();
    Ok(principal_sqrt(w.plus)? * principal_sqrt(w.minus)? * norm_prefactor(p))
}

/// Quadratic-form coefficients of |Ψ(y₁, y₂; t)|²:
/// the density is `norm · exp(-(diagonal·(y₁² + y₂²) + 2·off_diagonal·y₁y₂))`,
/// with diagonal = ½Re(σ₊(t)² + σ₋(t)²) and off_diagonal = ½Re(σ₊(t)² − σ₋(t)²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionPrecision {
    pub diagonal: f64,
    pub off_diagonal: f64,
    pub norm: f64,
}

impl PositionPrecision {
    pub fn of(p: &PacketParams) -> Self {
        let w = p.widths();
        Self {
            diagonal: 0.5 * w.sum().re,
            off_diagonal: 0.5 * w.diff().re,
            norm: w.plus.norm() * w.minus.norm() / (PI * p.sigma_plus() * p.sigma_minus()),
        }
    }

    pub fn density(&self, y1: f64, y2: f64) -> f64 {
        self.norm
            * (-(self.diagonal * (y1 * y1 + y2 * y2) + 2.0 * self.off_diagonal * y1 * y2)).exp()
    }

    /// Variance of either coordinate's marginal.
    pub fn marginal_variance(&self) -> f64 {
        0.5 * self.diagonal / (self.diagonal.powi(2) - self.off_diagonal.powi(2))
    }
}

/// |Ψ(y₁, y₂; t)|².
pub fn joint_position_density(y1: f64, y2: f64, p: &PacketParams) -> f64 {
    PositionPrecision::of(p).density(y1, y2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(sp: f64, sm: f64, m: f64, t: f64) -> PacketParams {
        PacketParams::new(sp, sm, m, t).unwrap()
    }

    #[test]
    fn origin_values_for_unit_widths() {
        let p = params(1.0, 1.0, 1.0, 0.0);
        let inv_sqrt_pi = 1.0 / PI.sqrt();
        assert_relative_eq!(
            psi_momentum(0.0, 0.0, &p).re,
            inv_sqrt_pi,
            max_relative = 1e-15
        );
        let mixed = psi_mixed(0.0, 0.0, &p).unwrap();
        assert_relative_eq!(mixed.re, inv_sqrt_pi, max_relative = 1e-15);
        assert!(mixed.im.abs() < 1e-16);
        let pos = psi_position(0.0, 0.0, &p).unwrap();
        assert_relative_eq!(pos.re, inv_sqrt_pi, max_relative = 1e-15);
        assert_relative_eq!(
            joint_position_density(0.0, 0.0, &p),
            1.0 / PI,
            max_relative = 1e-15
        );
    }

    #[test]
    fn momentum_direct_substitution() {
        let p = params(1.0, 3.0, 1.0, 0.0);
        let v = psi_momentum(1.0, 1.0, &p);
        assert_relative_eq!(
            v.re,
            (-1.0f64).exp() / (3.0 * PI).sqrt(),
            max_relative = 1e-15
        );
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn swap_symmetries() {
        let p = params(0.4, 2.5, 1.3, 0.8);
        for &(a, b) in &[(0.3, -1.1), (2.0, 0.5), (-0.7, -0.2)] {
            assert_eq!(psi_momentum(a, b, &p), psi_momentum(b, a, &p));
            let l = psi_position(a, b, &p).unwrap();
            let r = psi_position(b, a, &p).unwrap();
            assert!((l - r).norm() <= 1e-15 * l.norm());
        }
    }

    #[test]
    fn mixed_modulus_parities() {
        let p = params(0.5, 2.0, 1.0, 0.4);
        for &x in &[0.1, 0.7, 1.9] {
            let a = psi_mixed(x, 0.0, &p).unwrap().norm();
            let b = psi_mixed(-x, 0.0, &p).unwrap().norm();
            assert_relative_eq!(a, b, max_relative = 1e-14);
            let a = psi_mixed(0.0, x, &p).unwrap().norm();
            let b = psi_mixed(0.0, -x, &p).unwrap().norm();
            assert_relative_eq!(a, b, max_relative = 1e-14);
        }
    }

    #[test]
    fn factorizes_when_widths_equal() {
        let p = params(1.3, 1.3, 1.0, 0.0);
        let prec = PositionPrecision::of(&p);
        assert_eq!(prec.off_diagonal, 0.0);
    }

    #[test]
    fn density_is_modulus_squared() {
        let p = params(0.3, 3.0, 0.7, 1.4);
        for &(a, b) in &[(0.0, 0.0), (0.5, -0.3), (-2.0, 1.0)] {
            let amp = psi_position(a, b, &p).unwrap();
            assert_relative_eq!(
                joint_position_density(a, b, &p),
                amp.norm_sqr(),
                max_relative = 1e-13
            );
        }
    }
}
