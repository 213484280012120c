//! Explicit solution families.
//!
//! Three constructions are closed-form:
//!
//! * [`exp_power_profile`] — the family with `m = 2 - n` and `lambda = 0`,
//!   `u = C2 |xi + C1| exp(-C3 (xi + C1)^{n-1})`,
//!   `phi = sgn(xi + C1) C4 exp(C3 (xi + C1)^{n-1})`,
//!   defined on either component of `R \ {-C1}`;
//! * [`homothetic_profile`] — constant conformal factor, `u = a xi + b` on
//!   the half line where `u > 0`, valid for every `m != 0` with
//!   `lambda = 0`;
//! * [`power_law_profile`] — the `m = 1` solution on a half space, with
//!   `phi^{-2} = ((n-2)^2 (C2 xi + C3)^2 / 4)^{2/(n-2)}` and
//!   `u = -2C / ((n-2) C2 (C2 xi + C3))`.
//!
//! Every constructor returns a [`Profile1D`] with analytic derivatives; the
//! corresponding `m` is forced by the family and must be used when building
//! the [`ModelParams`](crate::ModelParams) handed to the tensor operations.

use crate::error::{Error, Result};
use crate::profile::Profile1D;

/// Which component of `R \ {-C1}` an exp-power profile lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `xi + C1 > 0`, where `phi > 0`.
    Plus,
    /// `xi + C1 < 0`, where `phi < 0`.
    Minus,
}

/// Constants of the exp-power family. `C1` shifts the singular hyperplane,
/// `C2`, `C3`, `C4` are strictly positive amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpPowerConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub branch: Branch,
}

impl ExpPowerConstants {
    pub fn new(c1: f64, c2: f64, c3: f64, c4: f64, branch: Branch) -> Result<Self> {
        for (name, v) in [("C1", c1), ("C2", c2), ("C3", c3), ("C4", c4)] {
            if !v.is_finite() {
                return Err(Error::Constraint(format!("{name} = {v} must be finite")));
            }
        }
        if c2 <= 0.0 || c3 <= 0.0 || c4 <= 0.0 {
            return Err(Error::Constraint(format!(
                "C2, C3, C4 must be positive, got ({c2}, {c3}, {c4})"
            )));
        }
        Ok(Self { c1, c2, c3, c4, branch })
    }
}

/// The parameter `m` forced by the exp-power family in dimension `n`.
pub fn exp_power_m(n: usize) -> f64 {
    2.0 - n as f64
}

/// Build an exp-power profile on the chosen component of `R \ {-C1}`.
/// Forces `m = 2 - n` and `lambda = 0`.
pub fn exp_power_profile(n: usize, consts: &ExpPowerConstants) -> Result<Profile1D> {
    if n < 3 {
        return Err(Error::Constraint(format!("dimension n = {n} must be >= 3")));
    }
    let c = *consts;
    let interval = match c.branch {
        Branch::Plus => (-c.c1, f64::INFINITY),
        Branch::Minus => (f64::NEG_INFINITY, -c.c1),
    };
    let k = n as i32 - 1;
    Profile1D::from_fn(vec![interval], move |xi| {
        let t = xi + c.c1;
        // t^{n-1} as an integer power so the negative branch stays real
        let p = t.powi(k);
        let dp = k as f64 * t.powi(k - 1);
        let d2p = (k * (k - 1)) as f64 * t.powi(k - 2);

        let u = c.c2 * t.abs() * (-c.c3 * p).exp();
        let lu1 = 1.0 / t - c.c3 * dp;
        let lu2 = -1.0 / (t * t) - c.c3 * d2p;

        let phi = t.signum() * c.c4 * (c.c3 * p).exp();
        let lp1 = c.c3 * dp;
        let lp2 = c.c3 * d2p;

        Ok(crate::profile::ProfileSample {
            phi,
            dphi: phi * lp1,
            d2phi: phi * (lp1 * lp1 + lp2),
            u,
            du: u * lu1,
            d2u: u * (lu1 * lu1 + lu2),
        })
    })
}

/// The potential of the exp-power family in its displayed form,
/// `f = (n-2) [ log(C2 |xi + C1|) - C3 (xi + C1)^{n-1} ]`.
/// Coincides with `-m log u` for `m = 2 - n`.
pub fn exp_power_potential(n: usize, consts: &ExpPowerConstants, xi: f64) -> f64 {
    let t = xi + consts.c1;
    (n as f64 - 2.0) * ((consts.c2 * t.abs()).ln() - consts.c3 * t.powi(n as i32 - 1))
}

/// Homothetic profile: `phi = gamma` constant, `u = a xi + b` on the half
/// line where `u > 0`. A solution for every `m != 0` when `lambda = 0`.
pub fn homothetic_profile(gamma: f64, a: f64, b: f64) -> Result<Profile1D> {
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(Error::Constraint(format!("gamma = {gamma} must be finite and nonzero")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Constraint("a and b must be finite".into()));
    }
    if a == 0.0 {
        return Err(Error::Trivial("a = 0 makes u constant and the potential trivial".into()));
    }
    let interval = if a > 0.0 { (-b / a, f64::INFINITY) } else { (f64::NEG_INFINITY, -b / a) };
    Profile1D::from_parts(vec![interval], move |_| (gamma, 0.0, 0.0), move |xi| (a * xi + b, a, 0.0))
}

/// Power-law profile of the `m = 1` family on the half space where
/// `-C2 (C2 xi + C3) > 0`, i.e. `xi < -C3/C2`. Forces `m = 1`,
/// `lambda = 0`. The constant `C > 0` only rescales `u` (a constant shift
/// of the potential) and cannot affect any residual.
pub fn power_law_profile(n: usize, c: f64, c2: f64, c3: f64) -> Result<Profile1D> {
    if n < 3 {
        return Err(Error::Constraint(format!("dimension n = {n} must be >= 3")));
    }
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::Constraint(format!("C = {c} must be positive")));
    }
    if c2 == 0.0 || !c2.is_finite() {
        return Err(Error::Constraint(format!("C2 = {c2} must be finite and nonzero")));
    }
    if !c3.is_finite() {
        return Err(Error::Constraint(format!("C3 = {c3} must be finite")));
    }
    let nf = n as f64;
    // phi = K A^{-2/(n-2)} with A = |C2 xi + C3|; on the half space the
    // derivative dA/dxi is -|C2|, which makes phi' > 0.
    let kf = ((nf - 2.0) * (nf - 2.0) / 4.0).powf(-1.0 / (nf - 2.0));
    let interval = (f64::NEG_INFINITY, -c3 / c2);
    Profile1D::from_fn(vec![interval], move |xi| {
        let bb = c2 * xi + c3;
        let a_abs = bb.abs();
        let phi = kf * a_abs.powf(-2.0 / (nf - 2.0));
        let lp1 = 2.0 * c2.abs() / ((nf - 2.0) * a_abs);
        let lp2 = 2.0 * nf * c2 * c2 / ((nf - 2.0) * (nf - 2.0) * a_abs * a_abs);
        let u = 2.0 * c / ((nf - 2.0) * c2.abs() * a_abs);
        let ru = c2.abs() / a_abs;
        Ok(crate::profile::ProfileSample {
            phi,
            dphi: phi * lp1,
            d2phi: phi * lp2,
            u,
            du: u * ru,
            d2u: u * 2.0 * ru * ru,
        })
    })
}
