//! Pointwise tensor assembly and residual checks for the conformal metric
//! `gbar = phi^{-2} delta` on R^n with a translation-invariant profile.
//!
//! Everything below is driven by the 1-D reductions of the ansatz
//! `phi = phi(xi)`, `u = u(xi)`, `xi = alpha . x` with `|alpha| = 1`:
//!
//! * ambient derivatives: `phi_{x_i} = phi' alpha_i`,
//!   `phi_{x_i x_j} = phi'' alpha_i alpha_j` (same for `u`);
//! * Christoffel symbols of `gbar`:
//!   `Gamma^k_ij = -d^k_i (phi_j/phi) - d^k_j (phi_i/phi) + d_ij (phi_k/phi)`;
//! * `Hess s` with respect to `gbar`:
//!   `alpha_i alpha_j (s'' + 2 (phi'/phi) s') - d_ij (phi'/phi) s'`;
//! * Ricci of `gbar`:
//!   `(n-2)(phi''/phi) alpha alpha^T + (phi''/phi - (n-1)(phi'/phi)^2) I`.
//!
//! The defining equation is `Ric + Hess f - (1/m) df x df = lambda gbar`
//! with potential `f = -m log u`; its pointwise residual and the companion
//! identities (the Hessian rewrite, the constancy of `mu`, the scalar
//! curvature relation and the reduced ODE/PDE systems) are exposed as
//! max-abs residual operations.

use crate::error::{Error, Result};
use crate::linalg::{Christoffel, SymMat};
use crate::params::ModelParams;
use crate::profile::{Profile1D, ProfileSample};

/// Value and first two derivatives of a scalar function of `xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// All pointwise tensors of a profile at one `xi`.
#[derive(Debug, Clone)]
pub struct TensorFrame {
    /// gbar = phi^{-2} delta
    pub gbar: SymMat,
    /// Christoffel symbols of gbar
    pub christoffel: Christoffel,
    /// Hessian of u with respect to gbar
    pub hess_u: SymMat,
    /// Hessian of f = -m log u with respect to gbar
    pub hess_f: SymMat,
    /// Ricci tensor of gbar
    pub ricci: SymMat,
    /// df (x) df, rank one
    pub df_df: SymMat,
}

fn sample_checked(profile: &Profile1D, xi: f64) -> Result<ProfileSample> {
    let s = profile.sample(xi)?;
    if s.phi == 0.0 || !s.phi.is_finite() {
        return Err(Error::DegenerateMetric { xi });
    }
    Ok(s)
}

fn positive_u(s: &ProfileSample, xi: f64) -> Result<()> {
    if s.u <= 0.0 || !s.u.is_finite() {
        return Err(Error::InvalidPotential { xi, u: s.u });
    }
    Ok(())
}

/// Jet of the potential f = -m log u.
pub fn potential_jet(m: f64, s: &ProfileSample) -> ScalarJet {
    let lu = s.du / s.u;
    ScalarJet {
        value: -m * s.u.ln(),
        d1: -m * lu,
        d2: -m * (s.d2u / s.u - lu * lu),
    }
}

/// `c_a * alpha alpha^T + c_b * I`, the shape every tensor here takes.
fn alpha_quadratic(alpha: &[f64], c_a: f64, c_b: f64) -> SymMat {
    SymMat::from_upper(alpha.len(), |i, j| {
        let mut v = c_a * alpha[i] * alpha[j];
        if i == j {
            v += c_b;
        }
        v
    })
}

/// Christoffel symbols of `gbar = phi^{-2} delta` specialized to the
/// translation-invariant conformal factor. Entries with three distinct
/// indices vanish.
pub fn conformal_christoffel(params: &ModelParams, profile: &Profile1D, xi: f64) -> Result<Christoffel> {
    let s = sample_checked(profile, xi)?;
    let r = s.dphi / s.phi;
    let alpha = params.alpha();
    Ok(Christoffel::from_lower_upper(params.n(), |k, i, j| {
        let mut v = 0.0;
        if k == i {
            v -= r * alpha[j];
        }
        if k == j {
            v -= r * alpha[i];
        }
        if i == j {
            v += r * alpha[k];
        }
        v
    }))
}

/// Ricci tensor of the conformal metric.
pub fn ricci_conformal(params: &ModelParams, profile: &Profile1D, xi: f64) -> Result<SymMat> {
    let s = sample_checked(profile, xi)?;
    let n = params.n() as f64;
    let r = s.dphi / s.phi;
    let c_a = (n - 2.0) * s.d2phi / s.phi;
    let c_b = s.d2phi / s.phi - (n - 1.0) * r * r;
    Ok(alpha_quadratic(params.alpha(), c_a, c_b))
}

/// Hessian with respect to `gbar` of any scalar `s(xi)` supplied as a jet.
pub fn hessian_conformal(
    params: &ModelParams,
    jet: &ScalarJet,
    profile: &Profile1D,
    xi: f64,
) -> Result<SymMat> {
    let s = sample_checked(profile, xi)?;
    let r = s.dphi / s.phi;
    let c_a = jet.d2 + 2.0 * r * jet.d1;
    let c_b = -r * jet.d1;
    Ok(alpha_quadratic(params.alpha(), c_a, c_b))
}

/// Pointwise residual of the defining equation,
/// `Ric + Hess f - (1/m) df x df - lambda gbar`; the zero matrix exactly
/// when the profile solves the equation at `xi`.
pub fn fundamental_residual(params: &ModelParams, profile: &Profile1D, xi: f64) -> Result<SymMat> {
    let s = sample_checked(profile, xi)?;
    positive_u(&s, xi)?;
    let f = potential_jet(params.m(), &s);
    let mut res = ricci_conformal(params, profile, xi)?;
    res.axpy(1.0, &hessian_conformal(params, &f, profile, xi)?);
    res.axpy(
        -1.0 / params.m(),
        &alpha_quadratic(params.alpha(), f.d1 * f.d1, 0.0),
    );
    let phi2 = s.phi * s.phi;
    res.axpy(-params.lambda(), &alpha_quadratic(params.alpha(), 0.0, 1.0 / phi2));
    Ok(res)
}

/// Residual of the Hessian rewrite
/// `Hess f - (1/m) df x df + (m/u) Hess u`, which vanishes identically for
/// every profile with `u > 0` (a chain-rule identity, not a solution
/// property).
pub fn hessian_identity_residual(params: &ModelParams, profile: &Profile1D, xi: f64) -> Result<SymMat> {
    let s = sample_checked(profile, xi)?;
    positive_u(&s, xi)?;
    let f = potential_jet(params.m(), &s);
    let u_jet = ScalarJet { value: s.u, d1: s.du, d2: s.d2u };
    let mut res = hessian_conformal(params, &f, profile, xi)?;
    res.axpy(
        -1.0 / params.m(),
        &alpha_quadratic(params.alpha(), f.d1 * f.d1, 0.0),
    );
    res.axpy(params.m() / s.u, &hessian_conformal(params, &u_jet, profile, xi)?);
    Ok(res)
}

/// The auxiliary constant, solved pointwise from
/// `Delta f - |grad f|^2 = m lambda - m mu e^{2f/m}` (all with respect to
/// `gbar`). Constant in `xi` exactly on solutions.
pub fn mu_at(params: &ModelParams, profile: &Profile1D, xi: f64) -> Result<f64> {
    let s = sample_checked(profile, xi)?;
    positive_u(&s, xi)?;
    let f = potential_jet(params.m(), &s);
    let n = params.n() as f64;
    let phi2 = s.phi * s.phi;
    let r = s.dphi / s.phi;
    let laplace_f = phi2 * (f.d2 - (n - 2.0) * r * f.d1);
    let grad_f2 = phi2 * f.d1 * f.d1;
    // e^{2f/m} = u^{-2}
    Ok(s.u * s.u * (params.m() * params.lambda() - laplace_f + grad_f2) / params.m())
}

/// The same constant solved from the scalar-curvature relation
/// `(u^2/m)(R - lambda n) + (m-1)|grad u|^2 + lambda u^2 = mu`.
/// Agrees with [`mu_at`] on solutions; the two routes split apart on
/// non-solution profiles.
pub fn mu_scalar(params: &ModelParams, profile: &Profile1D, xi: f64) -> Result<f64> {
    let s = sample_checked(profile, xi)?;
    positive_u(&s, xi)?;
    let n = params.n() as f64;
    let phi2 = s.phi * s.phi;
    let ric = ricci_conformal(params, profile, xi)?;
    let scalar_r = phi2 * ric.trace();
    let grad_u2 = phi2 * s.du * s.du;
    let u2 = s.u * s.u;
    Ok(u2 / params.m() * (scalar_r - params.lambda() * n)
        + (params.m() - 1.0) * grad_u2
        + params.lambda() * u2)
}

/// Residual of the scalar-curvature relation against a supplied `mu`
/// (usually [`mu_at`] evaluated at a reference point).
pub fn scalar_identity_residual(
    params: &ModelParams,
    profile: &Profile1D,
    xi: f64,
    mu: f64,
) -> Result<f64> {
    Ok(mu_scalar(params, profile, xi)? - mu)
}

/// Residuals of the reduced ODE system:
/// `r1 = (n-2) phi''/phi - (m/u)(u'' + 2 (phi'/phi) u')` and
/// `r2 = phi''/phi - (n-1)(phi'/phi)^2 + m (phi'/phi)(u'/u) - lambda/phi^2`.
/// Both vanish exactly when the profile solves the system at `xi`.
pub fn ode_residuals(params: &ModelParams, profile: &Profile1D, xi: f64) -> Result<(f64, f64)> {
    let s = sample_checked(profile, xi)?;
    positive_u(&s, xi)?;
    let n = params.n() as f64;
    let m = params.m();
    let r = s.dphi / s.phi;
    let r1 = (n - 2.0) * s.d2phi / s.phi - m / s.u * (s.d2u + 2.0 * r * s.du);
    let r2 = s.d2phi / s.phi - (n - 1.0) * r * r + m * r * s.du / s.u
        - params.lambda() / (s.phi * s.phi);
    Ok((r1, r2))
}

/// The two families of the full PDE system at a point `x` of R^n, evaluated
/// with literal ambient partial derivatives and sums: the off-diagonal
/// family as a symmetric matrix (zero on the diagonal, which carries no
/// equation) and the diagonal family as a vector indexed by `i`.
pub fn pde_families(params: &ModelParams, profile: &Profile1D, x: &[f64]) -> Result<(SymMat, Vec<f64>)> {
    if x.len() != params.n() {
        return Err(Error::Constraint(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            params.n()
        )));
    }
    let xi = params.xi_of(x);
    let s = sample_checked(profile, xi)?;
    positive_u(&s, xi)?;
    let n = params.n();
    let nf = n as f64;
    let m = params.m();
    let alpha = params.alpha();

    let phi_x: Vec<f64> = alpha.iter().map(|a| s.dphi * a).collect();
    let u_x: Vec<f64> = alpha.iter().map(|a| s.du * a).collect();
    let phi_xx = |i: usize, j: usize| s.d2phi * alpha[i] * alpha[j];
    let u_xx = |i: usize, j: usize| s.d2u * alpha[i] * alpha[j];

    let laplace_phi: f64 = (0..n).map(|k| phi_xx(k, k)).sum();
    let grad_phi2: f64 = phi_x.iter().map(|v| v * v).sum();
    let cross: f64 = (0..n).map(|k| phi_x[k] / s.phi * u_x[k]).sum();

    let off = SymMat::from_upper(n, |i, j| {
        if i == j {
            return 0.0;
        }
        let lhs = m / s.u * (u_xx(i, j) + phi_x[j] / s.phi * u_x[i] + phi_x[i] / s.phi * u_x[j]);
        let rhs = (nf - 2.0) * phi_xx(i, j) / s.phi;
        lhs - rhs
    });

    let diag = (0..n)
        .map(|i| {
            let lhs = m / s.u * (u_xx(i, i) + 2.0 * phi_x[i] / s.phi * u_x[i] - cross);
            let rhs = (nf - 2.0) * phi_xx(i, i) / s.phi + laplace_phi / s.phi
                - (nf - 1.0) * grad_phi2 / (s.phi * s.phi)
                - params.lambda() / (s.phi * s.phi);
            lhs - rhs
        })
        .collect();
    Ok((off, diag))
}

/// Max-abs of the two PDE families of [`pde_families`]. Factors through
/// [`ode_residuals`] via the products `alpha_i alpha_j`.
pub fn pde_residuals(params: &ModelParams, profile: &Profile1D, x: &[f64]) -> Result<(f64, f64)> {
    let (off, diag) = pde_families(params, profile, x)?;
    let diag_max = diag.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok((off.max_abs(), diag_max))
}

/// Assemble every pointwise tensor at once.
pub fn tensor_frame(params: &ModelParams, profile: &Profile1D, xi: f64) -> Result<TensorFrame> {
    let s = sample_checked(profile, xi)?;
    positive_u(&s, xi)?;
    let f = potential_jet(params.m(), &s);
    let u_jet = ScalarJet { value: s.u, d1: s.du, d2: s.d2u };
    let phi2 = s.phi * s.phi;
    Ok(TensorFrame {
        gbar: alpha_quadratic(params.alpha(), 0.0, 1.0 / phi2),
        christoffel: conformal_christoffel(params, profile, xi)?,
        hess_u: hessian_conformal(params, &u_jet, profile, xi)?,
        hess_f: hessian_conformal(params, &f, profile, xi)?,
        ricci: ricci_conformal(params, profile, xi)?,
        df_df: alpha_quadratic(params.alpha(), f.d1 * f.d1, 0.0),
    })
}
