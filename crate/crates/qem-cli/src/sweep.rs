//! Parameter sweeps: run the verification gate over a grid of dimensions,
//! parameters and seeded random constant draws, aggregating one JSON record
//! per point. Construction failures are recorded per point, never fatal.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qem::report::verify_on_grid;

use crate::config::{Family, JobConfig, XiGrid};
use crate::output::{f17, json_escape, report_json};

pub struct SweepSpec {
    pub family: Family,
    pub n_list: Vec<usize>,
    pub m_list: Vec<f64>,
    pub draws: usize,
    pub seed: u64,
    pub base: JobConfig,
}

pub struct SweepOutcome {
    pub json: String,
    pub any_fail: bool,
}

fn draw_constants(family: Family, rng: &mut ChaCha8Rng) -> BTreeMap<String, f64> {
    let mut c = BTreeMap::new();
    match family {
        Family::Thm11 => {
            c.insert("C1".into(), rng.gen_range(-1.0..1.0));
            c.insert("C2".into(), rng.gen_range(0.2..1.5));
            c.insert("C3".into(), rng.gen_range(0.2..1.5));
            c.insert("C4".into(), rng.gen_range(0.2..1.5));
            c.insert("branch".into(), if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
        }
        Family::Homothetic => {
            c.insert("gamma".into(), rng.gen_range(0.5..2.0));
            c.insert("a".into(), if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.5..2.0));
            c.insert("b".into(), rng.gen_range(-1.0..1.0));
        }
        Family::Example14 => {
            c.insert("C".into(), rng.gen_range(0.5..2.0));
            c.insert("C2".into(), if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.5..1.5));
            c.insert("C3".into(), rng.gen_range(-1.0..1.0));
        }
        Family::QuadM1 => {
            c.insert("C1".into(), rng.gen_range(-0.5..0.5));
        }
        Family::QuadMgt1 => {
            c.insert("C1".into(), rng.gen_range(0.5..2.0));
        }
    }
    c
}

fn grid_for(family: Family, consts: &BTreeMap<String, f64>, margin: f64) -> Option<XiGrid> {
    match family {
        Family::Thm11 => {
            let c1 = consts.get("C1").copied().unwrap_or(0.0);
            let branch = consts.get("branch").copied().unwrap_or(1.0);
            Some(if branch >= 0.0 {
                XiGrid { min: -c1 + margin, max: -c1 + margin + 1.5, count: 50, margin }
            } else {
                XiGrid { min: -c1 - margin - 1.5, max: -c1 - margin, count: 50, margin }
            })
        }
        // the other families have workable grid defaults in the builder
        _ => None,
    }
}

pub fn run_sweep(spec: &SweepSpec) -> SweepOutcome {
    let margin = spec.base.xi_grid.as_ref().map(|g| g.margin).unwrap_or(qem::DEFAULT_MARGIN);
    let mut points = Vec::new();
    let mut n_pass = 0usize;
    let mut n_fail = 0usize;
    let mut n_error = 0usize;
    let mut worst_fundamental = 0.0f64;
    let mut worst_ode = (0.0f64, 0.0f64);

    let mut index = 0u64;
    for &n in &spec.n_list {
        for &m in &spec.m_list {
            for _draw in 0..spec.draws {
                // one independent stream per point: results do not depend on
                // evaluation order
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                rng.set_stream(index);
                index += 1;

                // drawn constants override the base ones; anything else the
                // user pinned with --const stays in force
                let mut consts = spec.base.constants.clone();
                consts.extend(draw_constants(spec.family, &mut rng));
                let mut cfg = spec.base.clone();
                cfg.family = spec.family;
                cfg.n = n;
                cfg.m = if JobConfig::forced_m(spec.family, n).is_some() { None } else { Some(m) };
                cfg.constants = consts.clone();
                if cfg.xi_grid.is_none() {
                    cfg.xi_grid = grid_for(spec.family, &consts, margin);
                }

                let mut point = String::from("{");
                let _ = write!(point, "\"family\":\"{}\",\"n\":{n},\"m\":{},", spec.family.name(), f17(m));
                point.push_str("\"constants\":{");
                for (i, (k, v)) in consts.iter().enumerate() {
                    if i > 0 {
                        point.push(',');
                    }
                    let _ = write!(point, "\"{}\":{}", json_escape(k), f17(*v));
                }
                point.push_str("},");

                let outcome = cfg.build().and_then(|job| {
                    verify_on_grid(&job.params, &job.profile, &job.grid).map(|r| (job, r))
                });
                match outcome {
                    Ok((job, report)) => {
                        let tol = &job.tolerances;
                        let pass = report.fundamental_max <= tol.fundamental
                            && report.ode_max.0 <= tol.ode
                            && report.ode_max.1 <= tol.ode
                            && report.pde_max.0 <= tol.pde
                            && report.pde_max.1 <= tol.pde
                            && report.hessian_identity_max <= tol.hessian_identity
                            && report.mu_rel_var() <= tol.mu_rel_var
                            && report.scalar_identity_max <= tol.scalar;
                        worst_fundamental = worst_fundamental.max(report.fundamental_max);
                        worst_ode.0 = worst_ode.0.max(report.ode_max.0);
                        worst_ode.1 = worst_ode.1.max(report.ode_max.1);
                        if pass {
                            n_pass += 1;
                        } else {
                            n_fail += 1;
                        }
                        let _ = write!(
                            point,
                            "\"status\":\"{}\",\"report\":{}",
                            if pass { "pass" } else { "fail" },
                            report_json(&report)
                        );
                    }
                    Err(e) => {
                        n_error += 1;
                        let _ = write!(point, "\"status\":\"error\",\"error\":\"{}\"", json_escape(&e.to_string()));
                    }
                }
                point.push('}');
                points.push(point);
            }
        }
    }

    let mut json = String::from("{");
    let _ = write!(json, "\"seed\":{},\"family\":\"{}\",", spec.seed, spec.family.name());
    json.push_str("\"points\":[");
    json.push_str(&points.join(","));
    json.push_str("],");
    let _ = write!(
        json,
        "\"summary\":{{\"total\":{},\"pass\":{n_pass},\"fail\":{n_fail},\"error\":{n_error},\"worst_fundamental\":{},\"worst_ode\":[{},{}]}}}}",
        points.len(),
        f17(worst_fundamental),
        f17(worst_ode.0),
        f17(worst_ode.1),
    );
    SweepOutcome { json, any_fail: n_fail > 0 }
}
