//! Shared numerical plumbing: adaptive Gauss-Kronrod quadrature, a
//! bracketing bisection-secant root finder, and a step-doubling RK4
//! integrator. All routines propagate evaluation errors from the callee.

use crate::error::{Error, Result};

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae on [0, 1],
// mirrored). Standard QUADPACK constants, quoted at full published
// precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (k, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        kronrod += WGK[k] * (f1 + f2);
        if k % 2 == 1 {
            gauss += WG[k / 2] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    Ok((kronrod, (kronrod - gauss).abs()))
}

/// One non-adaptive Gauss-Kronrod panel over `[a, b]`; cheap magnitude
/// probe for callers that size their own intervals.
pub fn panel_estimate<F>(f: &F, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(gk15(f, a, b)?.0)
}

/// Adaptive quadrature of `f` over `[a, b]` to absolute tolerance `abs_tol`.
/// Panels are bisected until the local Gauss-Kronrod error estimate fits the
/// proportional share of the budget; steep integrands near branch endpoints
/// simply drive the recursion deeper.
pub fn integrate<F>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let (sign, lo, hi) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };
    let mut total = 0.0;
    // (lo, hi, depth) work list
    let mut stack = vec![(lo, hi, 0u32)];
    let mut budget = abs_tol.max(1e-300);
    while let Some((pa, pb, depth)) = stack.pop() {
        let (val, err) = gk15(f, pa, pb)?;
        if !val.is_finite() {
            return Err(Error::Integration { a, b, tol: abs_tol });
        }
        let share = budget * (pb - pa) / (hi - lo);
        // the absolute goal is capped at f64 resolution of the panel value
        if err <= share.max(1e-15 * val.abs()) || (pb - pa) < 1e-15 * (hi - lo).max(1.0) {
            total += val;
            budget = (budget - err.min(share)).max(abs_tol * 1e-3);
            continue;
        }
        if depth >= 60 {
            return Err(Error::Integration { a, b, tol: abs_tol });
        }
        let mid = 0.5 * (pa + pb);
        if !(pa < mid && mid < pb) {
            // interval no longer splittable in f64
            total += val;
            continue;
        }
        stack.push((pa, mid, depth + 1));
        stack.push((mid, pb, depth + 1));
    }
    Ok(sign * total)
}

/// Find the root of a continuous `f` on a bracketing interval
/// (`f(lo)` and `f(hi)` of opposite sign) with a secant step guarded by
/// bisection. Never leaves the bracket, never takes a pure-Newton step.
///
/// Stops when `|f| <= f_tol` or the bracket shrinks below `x_tol`.
pub fn bracket_root<F>(f: &F, lo: f64, hi: f64, f_tol: f64, x_tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    let mut last_width = b - a;
    for iter in 0..max_iter {
        // secant proposal, demoted to bisection when it stalls or escapes
        let mut x = b - fb * (b - a) / (fb - fa);
        let safe = a + 0.01 * (b - a) <= x && x <= b - 0.01 * (b - a);
        let slow = iter % 3 == 2 && (b - a) > 0.25 * last_width;
        if !x.is_finite() || !safe || slow {
            x = 0.5 * (a + b);
        }
        if iter % 3 == 2 {
            last_width = b - a;
        }
        let fx = f(x)?;
        if fx.abs() <= f_tol || (b - a).abs() <= x_tol {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Ok(0.5 * (a + b))
}

/// Classical RK4 step for a scalar ODE `dy/dx = rhs(x, y)`.
fn rk4_step<F>(rhs: &F, x: f64, y: f64, h: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let k1 = rhs(x, y)?;
    let k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1)?;
    let k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2)?;
    let k4 = rhs(x + h, y + h * k3)?;
    Ok(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Integrate `dy/dx = rhs(x, y)` from `(x0, y0)` to `x1` with step-doubling
/// error control: each step is taken once at `h` and twice at `h/2`, the
/// difference drives acceptance and the next step size. Collapsing steps or
/// exploding solutions are reported as a detected pole.
pub fn integrate_ode<F>(rhs: &F, x0: f64, y0: f64, x1: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if x0 == x1 {
        return Ok(y0);
    }
    let span = x1 - x0;
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = span / 16.0;
    let min_h = span.abs() * 1e-13;
    let mut steps = 0usize;
    while (x1 - x) * dir > 0.0 {
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::PoleDetected { phi: x });
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        let big = rk4_step(rhs, x, y, h)?;
        let half = rk4_step(rhs, x, y, 0.5 * h)?;
        let two_half = rk4_step(rhs, x + 0.5 * h, half, 0.5 * h)?;
        let err = (big - two_half).abs() / 15.0;
        let scale = tol * (1.0 + y.abs());
        if err <= scale {
            x += h;
            // local extrapolation: fifth-order combination
            y = two_half + (two_half - big) / 15.0;
            if !y.is_finite() || y.abs() > 1e14 {
                return Err(Error::PoleDetected { phi: x });
            }
            let grow = if err > 0.0 { 0.9 * (scale / err).powf(0.2) } else { 4.0 };
            h *= grow.clamp(1.0, 4.0);
        } else {
            h *= (0.9 * (scale / err).powf(0.2)).clamp(0.1, 0.9);
            if h.abs() < min_h {
                return Err(Error::PoleDetected { phi: x });
            }
        }
    }
    Ok(y)
}
