//! Deterministic report emitters. JSON numbers are printed with 17
//! significant digits so every double round-trips; the constants dump uses
//! 15. Field order is fixed by construction, never by a hash map.

use std::fmt::Write as _;

use qem::ResidualReport;

/// 17 significant digits: lossless for f64.
pub fn f17(v: f64) -> String {
    if v.is_nan() {
        return "null".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "1e999".into() } else { "-1e999".into() };
    }
    format!("{v:.16e}")
}

/// 15 significant digits, for the constants dump.
pub fn f15(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.14e}")
    } else {
        "null".into()
    }
}

pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// The residual report as a flat JSON object; the field set and order are
/// part of the tool's interface.
pub fn report_json(report: &ResidualReport) -> String {
    format!(
        concat!(
            "{{\"fundamental_max\":{},\"ode_max\":[{},{}],\"pde_max\":[{},{}],",
            "\"hessian_identity_max\":{},\"mu_mean\":{},\"mu_var\":{},",
            "\"scalar_identity_max\":{},\"samples\":{}}}"
        ),
        f17(report.fundamental_max),
        f17(report.ode_max.0),
        f17(report.ode_max.1),
        f17(report.pde_max.0),
        f17(report.pde_max.1),
        f17(report.hessian_identity_max),
        f17(report.mu_mean),
        f17(report.mu_var),
        f17(report.scalar_identity_max),
        report.samples,
    )
}

pub const SOLVE_COLUMNS: [&str; 9] =
    ["xi", "phi", "dphi", "d2phi", "u", "du", "d2u", "f", "mu"];

/// One solve-table row.
#[derive(Debug, Clone, Copy)]
pub struct SolveRow {
    pub xi: f64,
    pub phi: f64,
    pub dphi: f64,
    pub d2phi: f64,
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub f: f64,
    pub mu: f64,
}

impl SolveRow {
    fn values(&self) -> [f64; 9] {
        [self.xi, self.phi, self.dphi, self.d2phi, self.u, self.du, self.d2u, self.f, self.mu]
    }
}

pub fn solve_csv(rows: &[SolveRow]) -> String {
    let mut out = String::new();
    out.push_str(&SOLVE_COLUMNS.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.values().iter().map(|v| f17(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn solve_json(rows: &[SolveRow]) -> String {
    let mut out = String::from("[");
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('{');
        for (j, (name, v)) in SOLVE_COLUMNS.iter().zip(row.values()).enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "\"{name}\":{}", f17(v));
        }
        out.push('}');
    }
    out.push(']');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f17_round_trips() {
        for &v in &[0.1, -3.5e-300, 2.0 / 3.0, 123456789.123456789] {
            let back: f64 = f17(v).parse().unwrap();
            assert_eq!(back, v);
        }
    }

    #[test]
    fn report_json_is_stable() {
        let r = ResidualReport {
            fundamental_max: 1e-10,
            ode_max: (1e-11, 2e-11),
            pde_max: (0.0, 3e-11),
            hessian_identity_max: 1e-14,
            mu_mean: -2.0,
            mu_var: 1e-22,
            scalar_identity_max: 5e-10,
            samples: 50,
        };
        let a = report_json(&r);
        let b = report_json(&r);
        assert_eq!(a, b);
        assert!(a.starts_with("{\"fundamental_max\":"));
        assert!(a.ends_with("\"samples\":50}"));
    }
}
