//! Implicit-integral families for `m >= 1`.
//!
//! For these families `u` is determined by the conformal factor through
//! `u = C phi^{(n-1)/m} (phi')^{-1/m}`, and `phi(xi)` is only known through
//! a strictly monotone integral relation `F(phi) = C2 xi + C3`:
//!
//! * `m = 1`: the integrand is `exp(C1 / (2 phi^{2(n-1)})) / phi^{n/2}`;
//! * `m > 1`: the integrand is
//!   `[(C1 phi^{sqrt b} - 1)^{m/(m-1)} phi^{a/2}]^{-1}` on the branch where
//!   the base is positive, with constants from [`constants`].
//!
//! [`invert_profile`] evaluates `F` by adaptive quadrature over a cached
//! knot table, inverts it with a bracketing root finder, and differentiates
//! the relation analytically up to `phi'''` so the derived `u` carries exact
//! first and second derivatives.

use crate::error::{Error, Result};
use crate::numeric;
use crate::profile::{Profile1D, ProfileSample};

/// Absolute tolerance for each quadrature panel of the cumulative integral.
const SEG_TOL: f64 = 1e-13;
/// xi-space tolerance of the profile inversion.
const XI_TOL: f64 = 1e-13;
/// Cap on knot-table expansions in each direction.
const MAX_EXPAND: usize = 200;

/// Reduction constants shared by the implicit-integral and Riccati
/// machinery, plus the integration constants of a concrete profile.
///
/// `b = (P-1)^2 + 4Q(2-R)` is the discriminant of the algebraic root
/// equation; `sqrt_b` is computed once and shared by every power
/// `phi^{sqrt b}` downstream. For `m > 1` the roots `a1 >= a2` exist and the
/// integrand exponent is `a = a2`; for `m = 1` they degenerate (`R = 2`)
/// and stay unset.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConstants {
    pub n: usize,
    pub m: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub b: f64,
    pub sqrt_b: f64,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    /// Amplitude of `u` in `u = C phi^{(n-1)/m} (phi')^{-1/m}`; positive.
    pub c: f64,
    /// Inner integration constant (required nonzero when `m > 1`).
    pub c1: f64,
    /// Slope of the integral relation `F(phi) = C2 xi + C3`; nonzero.
    pub c2: f64,
    /// Offset of the integral relation.
    pub c3: f64,
}

impl QuadratureConstants {
    /// The exponent `a = a2` of the `m > 1` integrand.
    pub fn a(&self) -> Option<f64> {
        self.a2
    }

    /// Both particular roots, available only when `m > 1`.
    pub fn roots(&self) -> Result<(f64, f64)> {
        match (self.a1, self.a2) {
            (Some(a1), Some(a2)) => Ok((a1, a2)),
            _ => Err(Error::Degenerate(
                "roots are undefined at m = 1 (R = 2); use the linear m = 1 route".into(),
            )),
        }
    }

    /// Replace the integration constants, revalidating them.
    pub fn with_integration_constants(mut self, c: f64, c1: f64, c2: f64, c3: f64) -> Result<Self> {
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::Constraint(format!("C = {c} must be positive")));
        }
        if c2 == 0.0 || !c2.is_finite() {
            return Err(Error::Constraint(format!("C2 = {c2} must be finite and nonzero")));
        }
        if !c1.is_finite() || !c3.is_finite() {
            return Err(Error::Constraint("C1 and C3 must be finite".into()));
        }
        if self.m > 1.0 && c1 == 0.0 {
            return Err(Error::Constraint("C1 must be nonzero when m > 1".into()));
        }
        self.c = c;
        self.c1 = c1;
        self.c2 = c2;
        self.c3 = c3;
        Ok(self)
    }

    /// Lower endpoint of the positive branch for `m > 1`: the zero of
    /// `C1 phi^{sqrt b} - 1`. `None` at `m = 1` or for nonpositive `C1`.
    pub fn branch_floor(&self) -> Option<f64> {
        if self.m > 1.0 && self.c1 > 0.0 {
            Some((1.0 / self.c1).powf(1.0 / self.sqrt_b))
        } else {
            None
        }
    }
}

fn assemble_constants(n: usize, m: f64, p: f64) -> QuadratureConstants {
    let nf = n as f64;
    let q = (nf - 1.0) * (nf - 1.0) / m + nf - 1.0;
    let r = 1.0 + 1.0 / m;
    let b = (p - 1.0) * (p - 1.0) + 4.0 * q * (2.0 - r);
    let sqrt_b = b.sqrt();
    let (a1, a2) = if m > 1.0 {
        let denom = 2.0 - r;
        (
            Some((-(p - 1.0) + sqrt_b) / denom),
            Some((-(p - 1.0) - sqrt_b) / denom),
        )
    } else {
        (None, None)
    };
    QuadratureConstants { n, m, p, q, r, b, sqrt_b, a1, a2, c: 1.0, c1: 0.0, c2: 1.0, c3: 0.0 }
}

fn check_scope(n: usize, m: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::Constraint(format!("dimension n = {n} must be >= 3")));
    }
    if !m.is_finite() || m < 1.0 {
        return Err(Error::OutOfScope { m });
    }
    Ok(())
}

/// The reference constant chain for dimension `n >= 3` and `m >= 1`:
/// `P = 2m - 1 + 2(n-1)/m`, `Q = (n-1)^2/m + n - 1`, `R = 1 + 1/m`, the
/// discriminant `b = (P-1)^2 + 4Q(2-R) = 4[(m-1)^2 + (n-1)(3m + n - 4)/m]`,
/// and for `m > 1` the roots `a1, a2 = [-(P-1) +- sqrt b]/(2 - R)`.
///
/// Integration constants default to `C = 1`, `C1 = 0`, `C2 = 1`, `C3 = 0`.
///
/// A caution on `m > 1`: this chain is internally self-consistent (the rays
/// solve the root equation, [`crate::riccati::general_v`] solves the Riccati
/// equation, `w'/w = v`), but its `P` is *not* what the elimination of `u`
/// from the profile system produces — that is `P = 1 + 2(n-1)/m`, and the
/// two coincide only at `m = 1`. Profiles inverted from this chain therefore
/// miss the first profile equation by exactly `(2 - 2m) phi''/phi` when
/// `m > 1` (the tensor suite measures precisely that), while every `m = 1`
/// construction is a genuine solution. Use [`corrected_constants`] to build
/// metrics that actually satisfy the defining equation for `m > 1`.
pub fn constants(n: usize, m: f64) -> Result<QuadratureConstants> {
    check_scope(n, m)?;
    let nf = n as f64;
    let p = 2.0 * m - 1.0 + 2.0 * (nf - 1.0) / m;
    let k = assemble_constants(n, m, p);
    debug_assert!(
        (k.b - 4.0 * ((m - 1.0) * (m - 1.0) + (nf - 1.0) / m * (3.0 * m + nf - 4.0))).abs()
            <= 1e-12 * k.b.abs()
    );
    Ok(k)
}

/// The elimination-consistent constant chain: identical to [`constants`]
/// except `P = 1 + 2(n-1)/m`, which is the coefficient the substitution
/// `u = C phi^{(n-1)/m} (phi')^{-1/m}` actually yields in the third-order
/// reduction. The discriminant becomes `b = 4(n-1)(n + m - 2)/m`. Profiles
/// inverted from this chain satisfy the full defining equation; at `m = 1`
/// the two chains agree.
pub fn corrected_constants(n: usize, m: f64) -> Result<QuadratureConstants> {
    check_scope(n, m)?;
    let nf = n as f64;
    let p = 1.0 + 2.0 * (nf - 1.0) / m;
    let k = assemble_constants(n, m, p);
    debug_assert!(
        (k.b - 4.0 * (nf - 1.0) * (nf + m - 2.0) / m).abs() <= 1e-12 * k.b.abs()
    );
    Ok(k)
}

/// Integrand of the `m = 1` relation, `exp(C1/(2 phi^{2(n-1)})) / phi^{n/2}`.
pub fn integrand_m1(phi: f64, c1: f64, n: usize) -> Result<f64> {
    Ok(integrand_m1_jet(phi, c1, n)?.0)
}

/// `m = 1` integrand with its first two phi-derivatives.
fn integrand_m1_jet(phi: f64, c1: f64, n: usize) -> Result<(f64, f64, f64)> {
    if phi <= 0.0 {
        return Err(Error::NonPositive { what: "phi", value: phi });
    }
    let nf = n as f64;
    let g = 0.5 * c1 * phi.powf(-2.0 * (nf - 1.0));
    let dg = -c1 * (nf - 1.0) * phi.powf(-2.0 * nf + 1.0);
    let d2g = c1 * (nf - 1.0) * (2.0 * nf - 1.0) * phi.powf(-2.0 * nf);
    let val = g.exp() * phi.powf(-0.5 * nf);
    let l1 = dg - 0.5 * nf / phi;
    let l2 = d2g + 0.5 * nf / (phi * phi);
    Ok((val, val * l1, val * (l1 * l1 + l2)))
}

/// Integrand of the `m > 1` relation,
/// `[(C1 phi^{sqrt b} - 1)^{m/(m-1)} phi^{a/2}]^{-1}` on the branch where
/// the base is positive.
pub fn integrand_mgt1(phi: f64, consts: &QuadratureConstants) -> Result<f64> {
    Ok(integrand_mgt1_jet(phi, consts)?.0)
}

/// `m > 1` integrand with its first two phi-derivatives.
fn integrand_mgt1_jet(phi: f64, consts: &QuadratureConstants) -> Result<(f64, f64, f64)> {
    if consts.c1 == 0.0 {
        return Err(Error::Constraint("C1 must be nonzero when m > 1".into()));
    }
    if phi <= 0.0 {
        return Err(Error::NonPositive { what: "phi", value: phi });
    }
    let (_, a2) = consts.roots()?;
    let m = consts.m;
    let s = consts.sqrt_b;
    let e = m / (m - 1.0);
    let z = consts.c1 * phi.powf(s);
    let base = z - 1.0;
    if base <= 0.0 {
        return Err(Error::BranchDomain { phi, base });
    }
    let val = base.powf(-e) * phi.powf(-0.5 * a2);
    let l1 = -e * s * z / (phi * base) - 0.5 * a2 / phi;
    let l2 = e * s * z * (z - 1.0 + s) / (phi * phi * base * base) + 0.5 * a2 / (phi * phi);
    Ok((val, val * l1, val * (l1 * l1 + l2)))
}

/// `u = C phi^{(n-1)/m} (phi')^{-1/m}`; requires `phi > 0` and `phi' > 0`
/// so the fractional powers are real.
pub fn u_from_phi(phi: f64, dphi: f64, n: usize, m: f64, c: f64) -> Result<f64> {
    if phi <= 0.0 {
        return Err(Error::NonPositive { what: "phi", value: phi });
    }
    if dphi <= 0.0 {
        return Err(Error::Orientation { dphi });
    }
    if c <= 0.0 {
        return Err(Error::Constraint(format!("C = {c} must be positive")));
    }
    Ok(c * phi.powf((n as f64 - 1.0) / m) * dphi.powf(-1.0 / m))
}

/// `u`, `u'`, `u''` from the phi-jet up to third order, by logarithmic
/// differentiation of the defining relation.
fn u_jet_from_phi_jet(
    phi: f64,
    dphi: f64,
    d2phi: f64,
    d3phi: f64,
    n: usize,
    m: f64,
    c: f64,
) -> Result<(f64, f64, f64)> {
    let u = u_from_phi(phi, dphi, n, m, c)?;
    let nf = n as f64;
    let rp = dphi / phi;
    let ru = (nf - 1.0) / m * rp - d2phi / (m * dphi);
    let dru = (nf - 1.0) / m * (d2phi / phi - rp * rp)
        - (d3phi / dphi - (d2phi / dphi) * (d2phi / dphi)) / m;
    Ok((u, u * ru, u * (ru * ru + dru)))
}

#[derive(Clone)]
enum Integrand {
    M1 { c1: f64, n: usize },
    Mgt1 { consts: QuadratureConstants },
}

impl Integrand {
    fn value(&self, phi: f64) -> Result<f64> {
        match self {
            Integrand::M1 { c1, n } => integrand_m1(phi, *c1, *n),
            Integrand::Mgt1 { consts } => integrand_mgt1(phi, consts),
        }
    }

    fn jet(&self, phi: f64) -> Result<(f64, f64, f64)> {
        match self {
            Integrand::M1 { c1, n } => integrand_m1_jet(phi, *c1, *n),
            Integrand::Mgt1 { consts } => integrand_mgt1_jet(phi, consts),
        }
    }

    /// Hard lower limit of the phi-branch (not included).
    fn floor(&self) -> f64 {
        match self {
            Integrand::M1 { .. } => 0.0,
            Integrand::Mgt1 { consts } => consts.branch_floor().unwrap_or(0.0),
        }
    }
}

/// Immutable cumulative-integral table: `F(knot_phi[i]) = knot_f[i]` with
/// `F(phi0) = 0`, strictly increasing in both columns.
struct MonotoneMap {
    integrand: Integrand,
    knot_phi: Vec<f64>,
    knot_f: Vec<f64>,
}

impl MonotoneMap {
    /// Expand the table until `[t_lo, t_hi]` is covered by `F` values, or
    /// report the certified range that was reachable.
    fn build(integrand: Integrand, phi0: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        let floor = integrand.floor();
        if phi0 <= floor {
            return Err(Error::NonPositive { what: "phi0 - branch floor", value: phi0 - floor });
        }
        // probe the starting point so bad anchors fail early
        integrand.value(phi0)?;
        let mut knot_phi = vec![phi0];
        let mut knot_f = vec![0.0];
        let mut stall = 0usize;
        for step in 0..=MAX_EXPAND {
            let f_hi = *knot_f.last().unwrap();
            if f_hi >= t_hi {
                break;
            }
            if step == MAX_EXPAND || stall >= 4 {
                return Err(Error::DomainExhausted { xi: t_hi, lo: knot_f[0], hi: f_hi });
            }
            let last = *knot_phi.last().unwrap();
            let next = last * 2.0;
            let seg = numeric::integrate(&|x| integrand.value(x), last, next, SEG_TOL)?;
            if seg <= (t_hi - f_hi).abs() * 1e-13 {
                stall += 1;
            } else {
                stall = 0;
            }
            knot_phi.push(next);
            knot_f.push(f_hi + seg);
        }
        let mut stall = 0usize;
        for step in 0..=MAX_EXPAND {
            let f_lo = knot_f[0];
            if f_lo <= t_lo {
                break;
            }
            if step == MAX_EXPAND || stall >= 4 {
                return Err(Error::DomainExhausted { xi: t_lo, lo: f_lo, hi: *knot_f.last().unwrap() });
            }
            let first = knot_phi[0];
            let need = f_lo - t_lo;
            // Near the branch floor the integrand can grow beyond any
            // fixed-step scheme (poles, essential singularities). Shrink the
            // step until the segment's contribution to F stays bounded, so
            // the knot table keeps O(1) resolution in F and the absolute
            // quadrature tolerance stays meaningful.
            let cap = 4.0 * (1.0 + need);
            let d = first - floor;
            let mut gamma = 0.5f64;
            let mut accepted = None;
            for _probe in 0..90 {
                let next = floor + d * gamma;
                if !(next > floor) || !(next < first) {
                    break;
                }
                let edge = integrand.value(next);
                let edge_ok = matches!(&edge, Ok(v) if v.is_finite());
                if edge_ok {
                    let crude = numeric::panel_estimate(&|x| integrand.value(x), next, first);
                    if let Ok(c) = crude {
                        if c.is_finite() && c <= cap {
                            match numeric::integrate(&|x| integrand.value(x), next, first, SEG_TOL) {
                                Ok(seg) if seg <= 2.0 * cap => {
                                    accepted = Some((next, seg));
                                    break;
                                }
                                _ => {}
                            }
                        }
                    }
                }
                // too big or not integrable: move the knot closer to the
                // previous one
                gamma = gamma.sqrt();
            }
            let Some((next, seg)) = accepted else {
                return Err(Error::DomainExhausted { xi: t_lo, lo: f_lo, hi: *knot_f.last().unwrap() });
            };
            if seg <= need.abs() * 1e-13 {
                stall += 1;
            } else {
                stall = 0;
            }
            knot_phi.insert(0, next);
            knot_f.insert(0, f_lo - seg);
        }
        Ok(Self { integrand, knot_phi, knot_f })
    }

    /// Solve `F(phi) = t` on the covered range.
    fn invert(&self, t: f64) -> Result<f64> {
        let k = self.knot_f.len();
        if t < self.knot_f[0] || t > self.knot_f[k - 1] {
            return Err(Error::DomainExhausted { xi: t, lo: self.knot_f[0], hi: self.knot_f[k - 1] });
        }
        // last knot with F <= t
        let mut idx = match self.knot_f.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.knot_phi[i]),
            Err(i) => i.saturating_sub(1),
        };
        idx = idx.min(k - 2);
        let f_tol = XI_TOL * (1.0 + t.abs());
        // widen the bracket if re-integration noise puts the root just past
        // the next knot
        for widen in 0..3 {
            let hi_idx = (idx + 1 + widen).min(k - 1);
            let (pa, fa) = (self.knot_phi[idx], self.knot_f[idx]);
            let pb = self.knot_phi[hi_idx];
            let g = |phi: f64| -> Result<f64> {
                Ok(fa + numeric::integrate(&|x| self.integrand.value(x), pa, phi, SEG_TOL)? - t)
            };
            match numeric::bracket_root(&g, pa, pb, f_tol, 1e-15 * (pa.abs() + pb.abs()), 200) {
                Ok(phi) => return Ok(phi),
                Err(Error::NoBracket { .. }) if hi_idx < k - 1 => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::NoBracket { lo: self.knot_phi[idx], hi: *self.knot_phi.last().unwrap() })
    }
}

/// Build a profile with `phi(xi)` solved from `F(phi) = C2 (xi - xi0)`,
/// anchored at `phi(xi0) = phi0`, on the requested open `xi` interval.
///
/// Orientation: `C2 > 0` keeps `phi' = C2 / integrand > 0` so the
/// fractional powers in `u` are real. With `reflected = true` the profile
/// is the mirror image `xi -> 2 xi0 - xi` (conformally the same family with
/// `phi' < 0`).
///
/// Errors with [`Error::DomainExhausted`] when the requested interval is
/// not inside the image of `F` (the integral converges before reaching it).
pub fn invert_profile(
    consts: &QuadratureConstants,
    xi_range: (f64, f64),
    phi0: f64,
    xi0: f64,
    reflected: bool,
) -> Result<Profile1D> {
    let (xi_min, xi_max) = xi_range;
    if !(xi_min < xi_max) || !xi_min.is_finite() || !xi_max.is_finite() {
        return Err(Error::Constraint(format!("bad xi range [{xi_min}, {xi_max}]")));
    }
    if !xi0.is_finite() || !phi0.is_finite() {
        return Err(Error::Constraint("anchor must be finite".into()));
    }
    if consts.c2 <= 0.0 {
        return Err(Error::Orientation { dphi: consts.c2 });
    }
    if consts.c <= 0.0 {
        return Err(Error::Constraint(format!("C = {} must be positive", consts.c)));
    }
    let integrand = if consts.m > 1.0 {
        if consts.c1 == 0.0 {
            return Err(Error::Constraint("C1 must be nonzero when m > 1".into()));
        }
        if consts.c1 < 0.0 {
            return Err(Error::BranchDomain { phi: phi0, base: consts.c1 * phi0.powf(consts.sqrt_b) - 1.0 });
        }
        Integrand::Mgt1 { consts: consts.clone() }
    } else {
        Integrand::M1 { c1: consts.c1, n: consts.n }
    };

    // internal coordinate: zeta = xi, or its mirror through xi0
    let (zeta_min, zeta_max) = if reflected {
        (2.0 * xi0 - xi_max, 2.0 * xi0 - xi_min)
    } else {
        (xi_min, xi_max)
    };
    let t_lo = consts.c2 * (zeta_min - xi0);
    let t_hi = consts.c2 * (zeta_max - xi0);
    let map = MonotoneMap::build(integrand, phi0, t_lo, t_hi)?;

    let c2 = consts.c2;
    let (n, m, c) = (consts.n, consts.m, consts.c);
    Profile1D::from_fn(vec![(xi_min, xi_max)], move |xi| {
        let zeta = if reflected { 2.0 * xi0 - xi } else { xi };
        let t = c2 * (zeta - xi0);
        let phi = map.invert(t)?;
        let (i0, i1, i2) = map.integrand.jet(phi)?;
        let dphi = c2 / i0;
        let d2phi = -c2 * c2 * i1 / (i0 * i0 * i0);
        let d3phi = -c2 * c2 * c2 * (i2 * i0 - 3.0 * i1 * i1) / (i0 * i0 * i0 * i0 * i0);
        let (u, du, d2u) = u_jet_from_phi_jet(phi, dphi, d2phi, d3phi, n, m, c)?;
        let sample = if reflected {
            ProfileSample { phi, dphi: -dphi, d2phi, u, du: -du, d2u }
        } else {
            ProfileSample { phi, dphi, d2phi, u, du, d2u }
        };
        Ok(sample)
    })
}
