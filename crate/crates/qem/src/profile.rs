//! One-dimensional solution bundles.
//!
//! A [`Profile1D`] is a pair of scalar functions `phi(xi)` and `u(xi)` with
//! their first two derivatives, defined on a union of disjoint open
//! intervals. Constructors supply derivatives analytically; finite
//! differences are used only as a verification oracle in tests.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Point values of a profile: the conformal factor `phi`, the positive
/// potential-generating function `u`, and their first two derivatives
/// with respect to `xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub phi: f64,
    pub dphi: f64,
    pub d2phi: f64,
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
}

type EvalFn = dyn Fn(f64) -> Result<ProfileSample> + Send + Sync;

/// A 1-D profile: disjoint open intervals of `xi` plus an evaluator.
#[derive(Clone)]
pub struct Profile1D {
    intervals: Vec<(f64, f64)>,
    eval: Arc<EvalFn>,
}

impl std::fmt::Debug for Profile1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Profile1D").field("intervals", &self.intervals).finish()
    }
}

fn validate_intervals(intervals: &[(f64, f64)]) -> Result<()> {
    if intervals.is_empty() {
        return Err(Error::Constraint("profile needs at least one interval".into()));
    }
    for &(a, b) in intervals {
        if !(a < b) {
            return Err(Error::Constraint(format!("empty interval ({a}, {b})")));
        }
        if a.is_nan() || b.is_nan() {
            return Err(Error::Constraint("interval endpoints must not be NaN".into()));
        }
    }
    for w in intervals.windows(2) {
        if !(w[0].1 <= w[1].0) {
            return Err(Error::Constraint("intervals must be ordered and disjoint".into()));
        }
    }
    Ok(())
}

impl Profile1D {
    /// Wrap an evaluator defined on the given open intervals. The evaluator
    /// is only called for `xi` strictly inside an interval.
    pub fn from_fn<F>(intervals: Vec<(f64, f64)>, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<ProfileSample> + Send + Sync + 'static,
    {
        validate_intervals(&intervals)?;
        Ok(Self { intervals, eval: Arc::new(eval) })
    }

    /// Build from separate `(value, d1, d2)` jets for `phi` and `u`.
    pub fn from_parts<P, U>(intervals: Vec<(f64, f64)>, phi: P, u: U) -> Result<Self>
    where
        P: Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
        U: Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
    {
        Self::from_fn(intervals, move |xi| {
            let (p, dp, d2p) = phi(xi);
            let (v, dv, d2v) = u(xi);
            Ok(ProfileSample { phi: p, dphi: dp, d2phi: d2p, u: v, du: dv, d2u: d2v })
        })
    }

    /// Combine the conformal factor of one profile with the potential part
    /// of another. The domain is the pairwise intersection of intervals.
    /// Useful for probing mismatched (non-solution) pairs.
    pub fn splice(phi_from: &Profile1D, u_from: &Profile1D) -> Result<Self> {
        let mut intervals = Vec::new();
        for &(a, b) in &phi_from.intervals {
            for &(c, d) in &u_from.intervals {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo < hi {
                    intervals.push((lo, hi));
                }
            }
        }
        let pf = phi_from.eval.clone();
        let uf = u_from.eval.clone();
        Self::from_fn(intervals, move |xi| {
            let p = pf(xi)?;
            let u = uf(xi)?;
            Ok(ProfileSample { phi: p.phi, dphi: p.dphi, d2phi: p.d2phi, u: u.u, du: u.du, d2u: u.d2u })
        })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, xi: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| xi > a && xi < b)
    }

    /// True when `xi` lies inside an interval and at distance >= `margin`
    /// from each finite endpoint (the singular loci of the families live on
    /// the interval boundaries).
    pub fn contains_with_margin(&self, xi: f64, margin: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| {
            let lo_ok = if a.is_finite() { xi >= a + margin } else { true };
            let hi_ok = if b.is_finite() { xi <= b - margin } else { true };
            lo_ok && hi_ok && xi > a && xi < b
        })
    }

    pub fn sample(&self, xi: f64) -> Result<ProfileSample> {
        if !self.contains(xi) {
            return Err(Error::OutOfDomain { xi });
        }
        (self.eval)(xi)
    }
}
