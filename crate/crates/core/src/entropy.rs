//! Entropy pair, perfect-gas equation of state and tangent intersections.
//!
//! The entropy is `η(ρ, e) = φ_ρ(ρ) + ρ φ_e(e)` with `φ_ρ(z) = z log z` and
//! `φ_e(z) = -log(z) / (γ - 1)`. Both are strictly convex on `(0, +∞)`, and
//! they are tied to the equation of state `p = (γ - 1) ρ e` through
//! `ρ φ_ρ'(ρ) - φ_ρ(ρ) + φ_e'(e) p = 0`.

use crate::math::{abs, ln};
use crate::{Error, Result};

/// Smallest argument accepted before taking a logarithm.
const DOMAIN_FLOOR: f64 = 1e-300;

/// Relative width below which the tangent intersection is evaluated as a
/// `φ''`-weighted mean instead of the closed form.
const NEAR_COINCIDENT: f64 = 0.1;

/// Tolerance (relative to `max(|x_K|, |x_L|)`) on the membership of `x_KL`.
const XKL_TOLERANCE: f64 = 1e-10;

#[inline]
fn guard(what: &'static str, z: f64) -> Result<f64> {
    if z > DOMAIN_FLOOR && z.is_finite() {
        Ok(z)
    } else {
        Err(Error::Domain { what, value: z })
    }
}

/// A strictly convex, twice differentiable scalar function on `(0, +∞)`.
pub trait ConvexFunction {
    fn eval(&self, z: f64) -> Result<f64>;
    fn deriv(&self, z: f64) -> Result<f64>;
    fn second(&self, z: f64) -> Result<f64>;
}

/// `φ_ρ(z) = z log z`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhiRho;

impl ConvexFunction for PhiRho {
    fn eval(&self, z: f64) -> Result<f64> {
        let z = guard("phi_rho", z)?;
        Ok(z * ln(z))
    }

    fn deriv(&self, z: f64) -> Result<f64> {
        let z = guard("phi_rho'", z)?;
        Ok(ln(z) + 1.0)
    }

    fn second(&self, z: f64) -> Result<f64> {
        let z = guard("phi_rho''", z)?;
        Ok(1.0 / z)
    }
}

/// `φ_e(z) = -log(z) / (γ - 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiE {
    gamma_minus_one: f64,
}

impl PhiE {
    pub fn new(gas: GasParameters) -> Self {
        PhiE {
            gamma_minus_one: gas.gamma() - 1.0,
        }
    }
}

impl ConvexFunction for PhiE {
    fn eval(&self, z: f64) -> Result<f64> {
        let z = guard("phi_e", z)?;
        Ok(-ln(z) / self.gamma_minus_one)
    }

    fn deriv(&self, z: f64) -> Result<f64> {
        let z = guard("phi_e'", z)?;
        Ok(-1.0 / (self.gamma_minus_one * z))
    }

    fn second(&self, z: f64) -> Result<f64> {
        let z = guard("phi_e''", z)?;
        Ok(1.0 / (self.gamma_minus_one * z * z))
    }
}

/// `z²`, for which the tangent intersection is the arithmetic mean.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Square;

impl ConvexFunction for Square {
    fn eval(&self, z: f64) -> Result<f64> {
        let z = guard("z^2", z)?;
        Ok(z * z)
    }

    fn deriv(&self, z: f64) -> Result<f64> {
        let z = guard("(z^2)'", z)?;
        Ok(2.0 * z)
    }

    fn second(&self, z: f64) -> Result<f64> {
        guard("(z^2)''", z)?;
        Ok(2.0)
    }
}

pub fn phi_rho() -> PhiRho {
    PhiRho
}

pub fn phi_e(gas: GasParameters) -> PhiE {
    PhiE::new(gas)
}

/// Adiabatic exponent of a perfect gas, `γ > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasParameters {
    gamma: f64,
}

impl GasParameters {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 1.0 && gamma.is_finite() {
            Ok(GasParameters { gamma })
        } else {
            Err(Error::InvalidGamma(gamma))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// `p = (γ - 1) ρ e`.
pub fn eos_pressure(rho: f64, e: f64, gas: GasParameters) -> Result<f64> {
    let rho = guard("density", rho)?;
    let e = guard("internal energy", e)?;
    Ok((gas.gamma - 1.0) * rho * e)
}

/// `η(ρ, e) = φ_ρ(ρ) + ρ φ_e(e)`.
pub fn eta(rho: f64, e: f64, gas: GasParameters) -> Result<f64> {
    Ok(PhiRho.eval(rho)? + rho * PhiE::new(gas).eval(e)?)
}

/// `ρ φ_ρ'(ρ) - φ_ρ(ρ) + φ_e'(e) p`, which vanishes identically.
pub fn entropy_identity_residual(rho: f64, e: f64, gas: GasParameters) -> Result<f64> {
    let phi_e = PhiE::new(gas);
    let p = eos_pressure(rho, e, gas)?;
    Ok(rho * PhiRho.deriv(rho)? - PhiRho.eval(rho)? + phi_e.deriv(e)? * p)
}

/// Magnitude of the three terms of [`entropy_identity_residual`], the natural
/// scale against which its floating-point residual is measured.
pub fn entropy_identity_scale(rho: f64, e: f64, gas: GasParameters) -> Result<f64> {
    let phi_e = PhiE::new(gas);
    let p = eos_pressure(rho, e, gas)?;
    Ok(abs(rho * PhiRho.deriv(rho)?) + abs(PhiRho.eval(rho)?) + abs(phi_e.deriv(e)? * p))
}

#[allow(clippy::excessive_precision)]
const GAUSS_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
#[allow(clippy::excessive_precision)]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Intersection abscissa `x_KL` of the tangents to `φ` at `x_K` and `x_L`.
///
/// The tangent equation is linear in `x_KL` and is solved in closed form.
/// When the two points are close the closed form cancels badly, so the
/// equivalent representation of `x_KL` as the `φ''`-weighted mean of `z` over
/// `[x_K, x_L]` is used instead (8-point Gauss-Legendre, exact for `z²`).
pub fn solve_xkl(phi: &dyn ConvexFunction, x_k: f64, x_l: f64) -> Result<f64> {
    guard("x_K", x_k)?;
    guard("x_L", x_l)?;
    if x_k == x_l {
        return Ok(x_k);
    }
    let (lo, hi) = if x_k < x_l { (x_k, x_l) } else { (x_l, x_k) };

    let x_kl = if (hi - lo) <= NEAR_COINCIDENT * hi {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut odd = 0.0;
        let mut even = 0.0;
        for (t, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let right = phi.second(mid + half * t)?;
            let left = phi.second(mid - half * t)?;
            odd += w * t * (right - left);
            even += w * (right + left);
        }
        mid + half * odd / even
    } else {
        // sorted arguments keep the result bitwise symmetric
        let (fk, fl) = (phi.eval(lo)?, phi.eval(hi)?);
        let (dk, dl) = (phi.deriv(lo)?, phi.deriv(hi)?);
        (fl - fk + dk * lo - dl * hi) / (dk - dl)
    };

    let slack = XKL_TOLERANCE * hi;
    if !(x_kl >= lo - slack && x_kl <= hi + slack) {
        return Err(Error::NotConvex { x_k, x_l, x_kl });
    }
    Ok(x_kl.clamp(lo, hi))
}

/// Face quantity `(δφ)_σ = φ(x_K) - φ(x_σ) + φ'(x_K)(x_KL - x_K)
/// + ½(φ'(x_K) + φ'(x_L))(x_σ - x_KL)`.
///
/// It does not depend on which side is called `K`.
pub fn delta_phi(phi: &dyn ConvexFunction, x_k: f64, x_l: f64, x_sigma: f64) -> Result<f64> {
    let x_kl = solve_xkl(phi, x_k, x_l)?;
    let dk = phi.deriv(x_k)?;
    let dl = phi.deriv(x_l)?;
    Ok(phi.eval(x_k)? - phi.eval(x_sigma)?
        + dk * (x_kl - x_k)
        + 0.5 * (dk + dl) * (x_sigma - x_kl))
}

/// Bregman divergence `φ(a) - φ(b) - φ'(b)(a - b) ≥ 0`.
pub fn bregman(phi: &dyn ConvexFunction, a: f64, b: f64) -> Result<f64> {
    Ok(phi.eval(a)? - phi.eval(b)? - phi.deriv(b)? * (a - b))
}

/// Minimum and maximum of `φ''` over `[min(a,b), max(a,b)]`.
///
/// Evaluated at the endpoints: `φ''` is monotone on `(0, +∞)` for every
/// function of this module.
pub fn second_range(phi: &dyn ConvexFunction, a: f64, b: f64) -> Result<(f64, f64)> {
    let sa = phi.second(a)?;
    let sb = phi.second(b)?;
    Ok((sa.min(sb), sa.max(sb)))
}

/// `|φ'|_∞ = max(|φ'(1/M)|, |φ'(M)|)`.
pub fn deriv_sup(phi: &dyn ConvexFunction, m: f64) -> Result<f64> {
    Ok(abs(phi.deriv(1.0 / m)?).max(abs(phi.deriv(m)?)))
}

/// `|φ''|_∞`, the maximum of `φ''` over `[1/M, M]`.
pub fn second_sup(phi: &dyn ConvexFunction, m: f64) -> Result<f64> {
    Ok(second_range(phi, 1.0 / m, m)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const E: f64 = core::f64::consts::E;

    fn gas(g: f64) -> GasParameters {
        GasParameters::new(g).unwrap()
    }

    #[test]
    fn phi_rho_values() {
        assert_eq!(PhiRho.eval(1.0).unwrap(), 0.0);
        assert_eq!(PhiRho.deriv(1.0).unwrap(), 1.0);
        assert_eq!(PhiRho.second(2.0).unwrap(), 0.5);
    }

    #[test]
    fn phi_e_values() {
        assert_eq!(PhiE::new(gas(2.0)).eval(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(PhiE::new(gas(1.4)).deriv(1.0).unwrap(), -2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(PhiE::new(gas(1.4)).second(1.0).unwrap(), 2.5, epsilon = 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(PhiRho.eval(0.0), Err(Error::Domain { .. })));
        assert!(PhiRho.eval(-1.0).is_err());
        assert!(PhiRho.eval(1e-310).is_err());
        assert!(PhiE::new(gas(1.4)).eval(0.0).is_err());
        assert!(eos_pressure(0.0, 1.0, gas(1.4)).is_err());
        assert!(eos_pressure(1.0, -1.0, gas(1.4)).is_err());
        assert!(eta(f64::NAN, 1.0, gas(1.4)).is_err());
        assert!(GasParameters::new(1.0).is_err());
        assert!(GasParameters::new(0.5).is_err());
    }

    #[test]
    fn pressure_and_entropy() {
        assert_abs_diff_eq!(eos_pressure(2.0, 3.0, gas(1.4)).unwrap(), 2.4, epsilon = 1e-14);
        assert_eq!(eos_pressure(1.0, 1.0, gas(2.0)).unwrap(), 1.0);
        assert_abs_diff_eq!(eos_pressure(0.5, 4.0, gas(1.4)).unwrap(), 0.8, epsilon = 1e-14);

        assert_eq!(eta(1.0, 1.0, gas(1.4)).unwrap(), 0.0);
        assert_abs_diff_eq!(eta(E, 1.0, gas(2.0)).unwrap(), E, epsilon = 1e-14);
        assert_abs_diff_eq!(eta(1.0, E, gas(2.0)).unwrap(), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_residual_examples() {
        assert!(entropy_identity_residual(1.0, 1.0, gas(1.4)).unwrap().abs() <= 1e-14);
        assert!(entropy_identity_residual(2.0, 3.0, gas(1.4)).unwrap().abs() <= 1e-14);
        assert!(entropy_identity_residual(0.1, 10.0, gas(3.0)).unwrap().abs() <= 1e-13);
    }

    #[test]
    fn xkl_examples() {
        assert_eq!(solve_xkl(&Square, 1.0, 3.0).unwrap(), 2.0);
        assert_eq!(solve_xkl(&PhiRho, 5.0, 5.0).unwrap(), 5.0);
        assert_abs_diff_eq!(solve_xkl(&PhiRho, 1.0, E).unwrap(), E - 1.0, epsilon = 1e-14);
        let two_ln2 = 2.0 * core::f64::consts::LN_2;
        assert_abs_diff_eq!(
            solve_xkl(&PhiE::new(gas(1.4)), 1.0, 2.0).unwrap(),
            two_ln2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn xkl_close_points_use_log_mean() {
        // logarithmic mean of (1, 1 + d) is 1 + d/2 - d²/12 + O(d³)
        let d = 1e-7;
        let x = solve_xkl(&PhiRho, 1.0, 1.0 + d).unwrap();
        assert_abs_diff_eq!(x, 1.0 + d / 2.0 - d * d / 12.0, epsilon = 1e-15);
        // both branches agree around the switch
        let a = solve_xkl(&PhiRho, 1.0, 1.11).unwrap();
        let b = solve_xkl(&PhiRho, 1.0, 1.1).unwrap();
        assert_abs_diff_eq!(a, 0.11 / libm::log(1.11), epsilon = 1e-14);
        assert_abs_diff_eq!(b, 0.1 / libm::log(1.1), epsilon = 1e-14);
    }

    #[test]
    fn delta_phi_examples() {
        assert_eq!(delta_phi(&PhiRho, 1.7, 1.7, 1.7).unwrap(), 0.0);
        assert_abs_diff_eq!(
            delta_phi(&PhiRho, 1.0, 2.0, 1.0).unwrap(),
            -0.153_426_409_720_027_35,
            epsilon = 1e-12
        );
    }

    #[test]
    fn bregman_is_zero_on_diagonal() {
        assert_eq!(bregman(&PhiRho, 1.3, 1.3).unwrap(), 0.0);
        assert!(bregman(&PhiRho, 1.3, 2.0).unwrap() > 0.0);
    }

    #[test]
    fn sup_norms() {
        // φ_ρ' = log z + 1 on [1/e, e] ranges over [0, 2]
        assert_abs_diff_eq!(deriv_sup(&PhiRho, E).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(second_sup(&PhiRho, 4.0).unwrap(), 4.0, epsilon = 1e-14);
        let (lo, hi) = second_range(&PhiE::new(gas(2.0)), 2.0, 1.0).unwrap();
        assert_eq!((lo, hi), (0.25, 1.0));
    }
}
