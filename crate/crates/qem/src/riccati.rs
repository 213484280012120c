//! The reduction chain behind the implicit-integral families.
//!
//! Eliminating `u` turns the profile system into a third-order equation for
//! `phi` alone. Writing `w(phi) = (dphi/dxi)^2` drops it to second order,
//! and `v = w'/w` turns that into the Riccati equation
//!
//! `dv/dphi = -(1 - R/2) v^2 - (P/phi) v + 2Q/phi^2`.
//!
//! For `m > 1` the rays `v = a/phi` solve it exactly when
//! `(1 - R/2) a^2 + (P - 1) a - 2Q = 0`; the two roots combine into the
//! closed-form general solution [`general_v`], whose exponential
//! integration gives [`w_from_v`]. A step-doubling numeric integrator
//! serves as the independent oracle for the closed forms.

use crate::error::{Error, Result};
use crate::numeric;
use crate::quadrature::QuadratureConstants;

/// Residual of the third-order reduction
/// `P phi''/phi - Q (phi'/phi)^2 - R (phi''/phi')^2 + phi'''/phi'`.
pub fn third_order_residual(
    phi: f64,
    dphi: f64,
    d2phi: f64,
    d3phi: f64,
    consts: &QuadratureConstants,
) -> Result<f64> {
    if phi == 0.0 {
        return Err(Error::SingularPoint);
    }
    if dphi == 0.0 {
        return Err(Error::ZeroDerivative);
    }
    let rp = dphi / phi;
    Ok(consts.p * d2phi / phi - consts.q * rp * rp - consts.r * (d2phi / dphi) * (d2phi / dphi)
        + d3phi / dphi)
}

/// Right-hand side of the Riccati equation,
/// `dv/dphi = -(1 - R/2) v^2 - (P/phi) v + 2Q/phi^2`.
pub fn riccati_rhs(phi: f64, v: f64, consts: &QuadratureConstants) -> Result<f64> {
    if phi == 0.0 {
        return Err(Error::SingularPoint);
    }
    Ok(-(1.0 - 0.5 * consts.r) * v * v - consts.p / phi * v + 2.0 * consts.q / (phi * phi))
}

/// The two ray slopes `a1 >= a2` solving
/// `(1 - R/2) a^2 + (P - 1) a - 2Q = 0`; defined for `m > 1` only.
pub fn particular_roots(consts: &QuadratureConstants) -> Result<(f64, f64)> {
    let denom = 2.0 - consts.r;
    if denom.abs() < 1e-14 {
        return Err(Error::Degenerate(
            "R = 2 (m = 1) degenerates the root equation; the m = 1 route is linear".into(),
        ));
    }
    let s = consts.sqrt_b;
    Ok(((-(consts.p - 1.0) + s) / denom, (-(consts.p - 1.0) - s) / denom))
}

/// General solution of the Riccati equation,
/// `v = (a2 - C1 phi^{sqrt b} a1) / (phi (1 - C1 phi^{sqrt b}))`.
pub fn general_v(phi: f64, c1: f64, consts: &QuadratureConstants) -> Result<f64> {
    if phi <= 0.0 {
        return Err(Error::NonPositive { what: "phi", value: phi });
    }
    let (a1, a2) = consts.roots()?;
    let z = c1 * phi.powf(consts.sqrt_b);
    let den = phi * (1.0 - z);
    if den == 0.0 {
        return Err(Error::Pole { phi });
    }
    Ok((a2 - z * a1) / den)
}

/// Analytic phi-derivative of [`general_v`], used to confirm that the
/// closed form actually solves the equation.
pub fn general_v_prime(phi: f64, c1: f64, consts: &QuadratureConstants) -> Result<f64> {
    if phi <= 0.0 {
        return Err(Error::NonPositive { what: "phi", value: phi });
    }
    let (a1, a2) = consts.roots()?;
    let s = consts.sqrt_b;
    let z = c1 * phi.powf(s);
    let num = a2 - a1 * z;
    let den = phi * (1.0 - z);
    if den == 0.0 {
        return Err(Error::Pole { phi });
    }
    let dnum = -a1 * s * z / phi;
    let dden = 1.0 - z - s * z;
    Ok((dnum * den - num * dden) / (den * den))
}

/// `w = C2 (C1 phi^{sqrt b} - 1)^{2/(2-R)} phi^{a2}` on the branch where the
/// base is positive; satisfies `w'/w =` [`general_v`].
pub fn w_from_v(phi: f64, c1: f64, c2: f64, consts: &QuadratureConstants) -> Result<f64> {
    if phi <= 0.0 {
        return Err(Error::NonPositive { what: "phi", value: phi });
    }
    if c2 <= 0.0 {
        return Err(Error::Constraint(format!("C2 = {c2} must be positive")));
    }
    let (_, a2) = consts.roots()?;
    let base = c1 * phi.powf(consts.sqrt_b) - 1.0;
    if base <= 0.0 {
        return Err(Error::BranchDomain { phi, base });
    }
    Ok(c2 * base.powf(2.0 / (2.0 - consts.r)) * phi.powf(a2))
}

/// Analytic logarithmic derivative `w'/w` of [`w_from_v`].
pub fn w_log_derivative(phi: f64, c1: f64, consts: &QuadratureConstants) -> Result<f64> {
    if phi <= 0.0 {
        return Err(Error::NonPositive { what: "phi", value: phi });
    }
    let (_, a2) = consts.roots()?;
    let s = consts.sqrt_b;
    let z = c1 * phi.powf(s);
    let base = z - 1.0;
    if base == 0.0 {
        return Err(Error::Pole { phi });
    }
    Ok(2.0 / (2.0 - consts.r) * s * z / (phi * base) + a2 / phi)
}

/// Numeric oracle: integrate the Riccati equation from
/// `(phi_start, v_start)` to `phi_end` with local error control `tol`.
/// Poles of the true solution show up as collapsing steps and are reported
/// as [`Error::PoleDetected`].
pub fn integrate_riccati_numeric(
    phi_start: f64,
    v_start: f64,
    phi_end: f64,
    consts: &QuadratureConstants,
    tol: f64,
) -> Result<f64> {
    let rhs = |phi: f64, v: f64| riccati_rhs(phi, v, consts);
    numeric::integrate_ode(&rhs, phi_start, v_start, phi_end, tol)
}

/// The `m = 1` solution of the degenerate (linear) equation,
/// `v = n/phi + C0/phi^{2n-1}`.
pub fn m1_v(phi: f64, c0: f64, n: usize) -> f64 {
    n as f64 / phi + c0 * phi.powi(-(2 * n as i32 - 1))
}

/// Residual of [`m1_v`] in the `m = 1` equation
/// `dv/dphi + (2n-1) v / phi - 2n(n-1)/phi^2`, with the derivative taken
/// analytically. Vanishes identically.
pub fn m1_riccati_residual(phi: f64, c0: f64, n: usize) -> f64 {
    let nf = n as f64;
    let v = m1_v(phi, c0, n);
    let dv = -nf / (phi * phi) - (2.0 * nf - 1.0) * c0 * phi.powi(-2 * n as i32);
    dv + (2.0 * nf - 1.0) * v / phi - 2.0 * nf * (nf - 1.0) / (phi * phi)
}
