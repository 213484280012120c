//! Finite-difference verification oracle.
//!
//! Everything here reconstructs tensors from profile *values* only, in
//! ambient coordinates: the metric field `g(y) = phi(alpha . y)^{-2} delta`
//! is differenced for the Christoffel symbols, scalar fields are differenced
//! for Hessians, and the Ricci tensor is assembled from differenced
//! Christoffel fields through the curvature formula. None of it shares a
//! code path with the analytic assembly in [`crate::tensor`], which is the
//! point: agreement between the two routes validates the closed-form
//! specializations end to end.
//!
//! Second derivatives use iterated central differences (effective spacing
//! `2h`), which keeps the cancellation error near `eps / h^2` instead of
//! `4 eps / h^2`.

use crate::error::Result;
use crate::linalg::{Christoffel, SymMat};
use crate::params::ModelParams;
use crate::profile::Profile1D;

/// Conventional step for the ambient differences.
pub const DEFAULT_H: f64 = 1e-5;

/// Which scalar field of the profile to reconstruct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    /// The function `u` itself.
    U,
    /// The potential `f = -m log u`.
    Potential,
}

fn scalar_at(params: &ModelParams, profile: &Profile1D, field: Field, y: &[f64]) -> Result<f64> {
    let s = profile.sample(params.xi_of(y))?;
    Ok(match field {
        Field::U => s.u,
        Field::Potential => -params.m() * s.u.ln(),
    })
}

fn conformal_g_at(params: &ModelParams, profile: &Profile1D, y: &[f64]) -> Result<f64> {
    let s = profile.sample(params.xi_of(y))?;
    Ok(1.0 / (s.phi * s.phi))
}

fn displaced(x: &[f64], i: usize, delta: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += delta;
    y
}

/// First partial derivative of a scalar field by central differences.
fn partial1<F: Fn(&[f64]) -> Result<f64>>(f: &F, x: &[f64], i: usize, h: f64) -> Result<f64> {
    Ok((f(&displaced(x, i, h))? - f(&displaced(x, i, -h))?) / (2.0 * h))
}

/// Second partial derivative by iterated central differences.
fn partial2<F: Fn(&[f64]) -> Result<f64>>(
    f: &F,
    x: &[f64],
    i: usize,
    j: usize,
    h: f64,
) -> Result<f64> {
    if i == j {
        let fp = f(&displaced(x, i, 2.0 * h))?;
        let f0 = f(x)?;
        let fm = f(&displaced(x, i, -2.0 * h))?;
        Ok((fp - 2.0 * f0 + fm) / (4.0 * h * h))
    } else {
        let pp = f(&displaced(&displaced(x, i, h), j, h))?;
        let pm = f(&displaced(&displaced(x, i, h), j, -h))?;
        let mp = f(&displaced(&displaced(x, i, -h), j, h))?;
        let mm = f(&displaced(&displaced(x, i, -h), j, -h))?;
        Ok((pp - pm - mp + mm) / (4.0 * h * h))
    }
}

/// Christoffel symbols of `gbar` from metric differences alone:
/// `Gamma^k_ij = (1/2) g^{kl} (d_i g_{lj} + d_j g_{li} - d_l g_{ij})`
/// with the diagonal conformal metric field.
pub fn christoffel_fd(
    params: &ModelParams,
    profile: &Profile1D,
    x: &[f64],
    h: f64,
) -> Result<Christoffel> {
    let n = params.n();
    let g = |y: &[f64]| conformal_g_at(params, profile, y);
    let g0 = g(x)?;
    let mut dg = vec![0.0; n];
    for (i, slot) in dg.iter_mut().enumerate() {
        *slot = partial1(&g, x, i, h)?;
    }
    // g^{kl} = phi^2 delta = delta / g0
    let inv = 1.0 / g0;
    Ok(Christoffel::from_lower_upper(n, |k, i, j| {
        let mut v = 0.0;
        if k == j {
            v += dg[i];
        }
        if k == i {
            v += dg[j];
        }
        if i == j {
            v -= dg[k];
        }
        0.5 * inv * v
    }))
}

/// Hessian of a profile scalar with respect to `gbar`, reconstructed as
/// `d^2_ij S - Gamma^k_ij d_k S` with differenced partials and differenced
/// Christoffel symbols.
pub fn hessian_fd(
    params: &ModelParams,
    profile: &Profile1D,
    field: Field,
    x: &[f64],
    h: f64,
) -> Result<SymMat> {
    let n = params.n();
    let f = |y: &[f64]| scalar_at(params, profile, field, y);
    let gamma = christoffel_fd(params, profile, x, h)?;
    let mut grad = vec![0.0; n];
    for (i, slot) in grad.iter_mut().enumerate() {
        *slot = partial1(&f, x, i, h)?;
    }
    let mut second = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = partial2(&f, x, i, j, h)?;
            second[i * n + j] = v;
            second[j * n + i] = v;
        }
    }
    Ok(SymMat::from_upper(n, |i, j| {
        let correction: f64 = (0..n).map(|k| gamma.get(k, i, j) * grad[k]).sum();
        second[i * n + j] - correction
    }))
}

/// Ricci tensor reconstructed from the differenced Christoffel field:
/// `Ric_ij = d_k Gamma^k_ij - d_j Gamma^k_ik
///           + Gamma^k_kl Gamma^l_ij - Gamma^k_jl Gamma^l_ik`.
pub fn ricci_fd(params: &ModelParams, profile: &Profile1D, x: &[f64], h: f64) -> Result<SymMat> {
    let n = params.n();
    let gamma0 = christoffel_fd(params, profile, x, h)?;
    // dgamma[mu] = d/dx_mu of the whole Christoffel table
    let mut dgamma: Vec<Vec<f64>> = Vec::with_capacity(n);
    for mu in 0..n {
        let gp = christoffel_fd(params, profile, &displaced(x, mu, h), h)?;
        let gm = christoffel_fd(params, profile, &displaced(x, mu, -h), h)?;
        let mut table = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    table[(k * n + i) * n + j] =
                        (gp.get(k, i, j) - gm.get(k, i, j)) / (2.0 * h);
                }
            }
        }
        dgamma.push(table);
    }
    let dg = |mu: usize, k: usize, i: usize, j: usize| dgamma[mu][(k * n + i) * n + j];
    Ok(SymMat::from_upper(n, |i, j| {
        let mut v = 0.0;
        for k in 0..n {
            v += dg(k, k, i, j) - dg(j, k, i, k);
            for l in 0..n {
                v += gamma0.get(k, k, l) * gamma0.get(l, i, j)
                    - gamma0.get(k, j, l) * gamma0.get(l, i, k);
            }
        }
        v
    }))
}

/// Max deviations between centered differences of the profile functions and
/// the analytically reported derivatives at `xi`:
/// `[phi', u', phi'', u'']` errors, each `O(h^2)` for a consistent profile.
pub fn profile_derivative_errors(profile: &Profile1D, xi: f64, h: f64) -> Result<[f64; 4]> {
    let sm = profile.sample(xi - h)?;
    let s0 = profile.sample(xi)?;
    let sp = profile.sample(xi + h)?;
    let dphi = (sp.phi - sm.phi) / (2.0 * h);
    let du = (sp.u - sm.u) / (2.0 * h);
    let d2phi = (sp.phi - 2.0 * s0.phi + sm.phi) / (h * h);
    let d2u = (sp.u - 2.0 * s0.u + sm.u) / (h * h);
    Ok([
        (dphi - s0.dphi).abs(),
        (du - s0.du).abs(),
        (d2phi - s0.d2phi).abs(),
        (d2u - s0.d2u).abs(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor;

    fn oscillatory() -> (ModelParams, Profile1D) {
        let alpha = ModelParams::normalize_direction(&[0.6, -0.3, 1.1]).unwrap();
        let params = ModelParams::new(3, 2.5, 0.0, alpha).unwrap();
        let profile = Profile1D::from_parts(
            vec![(f64::NEG_INFINITY, f64::INFINITY)],
            |xi| {
                let w = 7.0;
                (2.0 + (w * xi).sin(), w * (w * xi).cos(), -w * w * (w * xi).sin())
            },
            |xi| {
                let w = 9.0;
                let u = 3.0 + (w * xi).cos();
                (u, -w * (w * xi).sin(), -w * w * (w * xi).cos())
            },
        )
        .unwrap();
        (params, profile)
    }

    #[test]
    fn christoffel_fd_matches_analytic() {
        let (params, profile) = oscillatory();
        let x = [0.3, -0.2, 0.5];
        let xi = params.xi_of(&x);
        let fd = christoffel_fd(&params, &profile, &x, DEFAULT_H).unwrap();
        let exact = tensor::conformal_christoffel(&params, &profile, xi).unwrap();
        let scale = exact.max_abs().max(1.0);
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (fd.get(k, i, j) - exact.get(k, i, j)).abs() < 1e-8 * scale,
                        "({k},{i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn hessian_fd_matches_analytic() {
        let (params, profile) = oscillatory();
        let x = [0.15, 0.45, -0.25];
        let xi = params.xi_of(&x);
        let s = profile.sample(xi).unwrap();
        let fd_u = hessian_fd(&params, &profile, Field::U, &x, DEFAULT_H).unwrap();
        let jet_u = tensor::ScalarJet { value: s.u, d1: s.du, d2: s.d2u };
        let exact_u = tensor::hessian_conformal(&params, &jet_u, &profile, xi).unwrap();
        let scale = exact_u.max_abs().max(1.0);
        for i in 0..3 {
            for j in 0..3 {
                assert!((fd_u.get(i, j) - exact_u.get(i, j)).abs() < 1e-6 * scale);
            }
        }
    }

    #[test]
    fn ricci_fd_matches_analytic() {
        let (params, profile) = oscillatory();
        let x = [-0.1, 0.2, 0.35];
        let xi = params.xi_of(&x);
        let fd = ricci_fd(&params, &profile, &x, DEFAULT_H).unwrap();
        let exact = tensor::ricci_conformal(&params, &profile, xi).unwrap();
        let scale = exact.max_abs().max(1.0);
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (fd.get(i, j) - exact.get(i, j)).abs() < 1e-6 * scale,
                    "({i},{j}): {} vs {}",
                    fd.get(i, j),
                    exact.get(i, j)
                );
            }
        }
    }

    #[test]
    fn derivative_consistency_is_second_order() {
        let (_, profile) = oscillatory();
        let e1 = profile_derivative_errors(&profile, 0.4, 1e-2).unwrap();
        let e2 = profile_derivative_errors(&profile, 0.4, 5e-3).unwrap();
        for (big, small) in e1.iter().zip(e2.iter()) {
            // halving h divides an O(h^2) error by about 4
            assert!(*small < 0.5 * big + 1e-9, "{big} -> {small}");
        }
    }
}
