//! Grid verification: run every residual check over a sample grid and
//! aggregate the worst values into a [`ResidualReport`].

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::profile::Profile1D;
use crate::tensor;

/// Default exclusion margin kept around singular loci (finite interval
/// endpoints) when sampling a profile.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Max-abs residuals of every checked identity over a sample grid, plus
/// statistics of the pointwise auxiliary constant `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// Max-abs entry of the defining-equation residual.
    pub fundamental_max: f64,
    /// Max-abs of the two reduced ODE residuals.
    pub ode_max: (f64, f64),
    /// Max-abs of the PDE families (off-diagonal, diagonal).
    pub pde_max: (f64, f64),
    /// Max-abs entry of the Hessian-rewrite identity residual.
    pub hessian_identity_max: f64,
    /// Sample mean of mu.
    pub mu_mean: f64,
    /// Unbiased sample variance of mu.
    pub mu_var: f64,
    /// Max-abs of the scalar-curvature relation residual, with mu taken
    /// from the first grid point.
    pub scalar_identity_max: f64,
    /// Number of grid points.
    pub samples: usize,
}

impl ResidualReport {
    /// Variance of mu relative to `1 + mean^2`, a mixed absolute/relative
    /// figure that stays meaningful for families whose mu vanishes.
    pub fn mu_rel_var(&self) -> f64 {
        self.mu_var / (1.0 + self.mu_mean * self.mu_mean)
    }
}

/// Evaluate all residuals of the profile on the given grid points.
/// The point for the PDE families is `xi * alpha`, so the 1-D and the full
/// ambient routes are compared at the same locations.
pub fn verify_on_grid(params: &ModelParams, profile: &Profile1D, xis: &[f64]) -> Result<ResidualReport> {
    if xis.is_empty() {
        return Err(Error::Constraint("verification grid is empty".into()));
    }
    let mut mus = Vec::with_capacity(xis.len());
    for &xi in xis {
        mus.push(tensor::mu_at(params, profile, xi)?);
    }
    let mu_ref = mus[0];
    let mu_mean = mus.iter().sum::<f64>() / mus.len() as f64;
    let mu_var = if mus.len() > 1 {
        mus.iter().map(|m| (m - mu_mean).powi(2)).sum::<f64>() / (mus.len() - 1) as f64
    } else {
        0.0
    };

    let mut report = ResidualReport {
        fundamental_max: 0.0,
        ode_max: (0.0, 0.0),
        pde_max: (0.0, 0.0),
        hessian_identity_max: 0.0,
        mu_mean,
        mu_var,
        scalar_identity_max: 0.0,
        samples: xis.len(),
    };

    for &xi in xis {
        let fund = tensor::fundamental_residual(params, profile, xi)?;
        report.fundamental_max = report.fundamental_max.max(fund.max_abs());

        let (r1, r2) = tensor::ode_residuals(params, profile, xi)?;
        report.ode_max.0 = report.ode_max.0.max(r1.abs());
        report.ode_max.1 = report.ode_max.1.max(r2.abs());

        let x: Vec<f64> = params.alpha().iter().map(|a| a * xi).collect();
        let (off, diag) = tensor::pde_residuals(params, profile, &x)?;
        report.pde_max.0 = report.pde_max.0.max(off);
        report.pde_max.1 = report.pde_max.1.max(diag);

        let hess = tensor::hessian_identity_residual(params, profile, xi)?;
        report.hessian_identity_max = report.hessian_identity_max.max(hess.max_abs());

        let sc = tensor::scalar_identity_residual(params, profile, xi, mu_ref)?;
        report.scalar_identity_max = report.scalar_identity_max.max(sc.abs());
    }
    Ok(report)
}

/// `count` evenly spaced points on `[min, max]`, endpoints included.
pub fn uniform_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::Constraint(format!("grid needs count >= 2, got {count}")));
    }
    if !(min < max) || !min.is_finite() || !max.is_finite() {
        return Err(Error::Constraint(format!("bad grid range [{min}, {max}]")));
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| if k == count - 1 { max } else { min + step * k as f64 })
        .collect())
}

/// Check that every grid point lies inside the profile domain with the
/// requested margin from each finite interval endpoint.
pub fn check_grid(profile: &Profile1D, xis: &[f64], margin: f64) -> Result<()> {
    for &xi in xis {
        if !profile.contains_with_margin(xi, margin) {
            return Err(Error::OutOfDomain { xi });
        }
    }
    Ok(())
}
