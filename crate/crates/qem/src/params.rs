use crate::error::{Error, Result};

/// Tolerance on the unit-length normalization of the direction vector.
pub const ALPHA_UNIT_TOL: f64 = 1e-12;

/// Ambient setting for a translation-invariant conformal ansatz:
/// dimension `n >= 3`, characteristic parameter `m != 0`, the constant
/// `lambda` of the defining equation, and the unit direction `alpha`
/// along which all profile functions vary (`xi = alpha . x`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    n: usize,
    m: f64,
    lambda: f64,
    alpha: Vec<f64>,
}

impl ModelParams {
    pub fn new(n: usize, m: f64, lambda: f64, alpha: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::Constraint(format!("dimension n = {n} must be >= 3")));
        }
        if m == 0.0 || !m.is_finite() {
            return Err(Error::Constraint(format!("parameter m = {m} must be finite and nonzero")));
        }
        if !lambda.is_finite() {
            return Err(Error::Constraint(format!("lambda = {lambda} must be finite")));
        }
        if alpha.len() != n {
            return Err(Error::Constraint(format!(
                "direction has {} components, expected {n}",
                alpha.len()
            )));
        }
        let norm2: f64 = alpha.iter().map(|a| a * a).sum();
        if (norm2 - 1.0).abs() > ALPHA_UNIT_TOL {
            return Err(Error::Constraint(format!(
                "direction must be unit length: sum alpha^2 = {norm2}"
            )));
        }
        Ok(Self { n, m, lambda, alpha })
    }

    /// Direction along the last coordinate axis, `alpha = (0, ..., 0, 1)`.
    pub fn axis_aligned(n: usize, m: f64, lambda: f64) -> Result<Self> {
        let mut alpha = vec![0.0; n];
        if n > 0 {
            alpha[n - 1] = 1.0;
        }
        Self::new(n, m, lambda, alpha)
    }

    /// Normalize an arbitrary nonzero vector to unit length.
    pub fn normalize_direction(raw: &[f64]) -> Result<Vec<f64>> {
        let norm2: f64 = raw.iter().map(|a| a * a).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(Error::Constraint("direction must be nonzero and finite".into()));
        }
        let inv = 1.0 / norm2.sqrt();
        Ok(raw.iter().map(|a| a * inv).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// xi = alpha . x
    pub fn xi_of(&self, x: &[f64]) -> f64 {
        self.alpha.iter().zip(x.iter()).map(|(a, xi)| a * xi).sum()
    }
}
