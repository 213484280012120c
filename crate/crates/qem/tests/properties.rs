//! Property tests over randomly drawn smooth profiles and directions.

use proptest::prelude::*;
use qem::quadrature::u_from_phi;
use qem::{tensor, ModelParams, Profile1D};

#[derive(Debug, Clone)]
struct Wave {
    base: f64,
    amp: f64,
    freq: f64,
    phase: f64,
}

impl Wave {
    fn jet(&self, xi: f64) -> (f64, f64, f64) {
        let t = self.freq * xi + self.phase;
        (
            self.base + self.amp * t.sin(),
            self.amp * self.freq * t.cos(),
            -self.amp * self.freq * self.freq * t.sin(),
        )
    }
}

fn wave(base: std::ops::Range<f64>, amp: f64) -> impl Strategy<Value = Wave> {
    (base, -amp..amp, 0.5..3.0f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(base, amp, freq, phase)| Wave { base, amp, freq, phase })
}

fn profile_of(phi: Wave, u: Wave) -> Profile1D {
    Profile1D::from_parts(
        vec![(f64::NEG_INFINITY, f64::INFINITY)],
        move |xi| phi.jet(xi),
        move |xi| u.jet(xi),
    )
    .unwrap()
}

fn direction(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0..1.0f64, n).prop_filter_map("nonzero direction", |v| {
        let norm2: f64 = v.iter().map(|a| a * a).sum();
        if norm2 < 0.01 {
            None
        } else {
            Some(ModelParams::normalize_direction(&v).unwrap())
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // the Hessian rewrite is an identity in the jet, not a solution property
    #[test]
    fn hessian_identity_vanishes_on_any_profile(
        phi in wave(1.5..3.0, 1.0),
        u in wave(1.0..3.0, 0.8),
        n in 3usize..7,
        m_mag in 0.3..4.0f64,
        m_neg in any::<bool>(),
        lambda in -1.0..1.0f64,
        alpha in direction(6),
        xi in -1.0..1.0f64,
    ) {
        let m = if m_neg { -m_mag } else { m_mag };
        let params = ModelParams::new(
            n,
            m,
            lambda,
            ModelParams::normalize_direction(&alpha[..n]).unwrap(),
        ).unwrap();
        let profile = profile_of(phi, u);
        let s = profile.sample(xi).unwrap();
        let f = tensor::potential_jet(m, &s);
        let r = s.dphi / s.phi;
        let scale = 1.0
            + f.d2.abs() + 3.0 * (r * f.d1).abs() + f.d1 * f.d1 / m.abs()
            + (m / s.u).abs() * (s.d2u.abs() + 3.0 * (r * s.du).abs());
        let res = tensor::hessian_identity_residual(&params, &profile, xi).unwrap();
        prop_assert!(res.max_abs() < 1e-12 * scale, "residual {} vs scale {scale}", res.max_abs());
    }

    // full-PDE families factor through the 1-D residuals with alpha products
    #[test]
    fn pde_families_factor_through_ode_residuals(
        phi in wave(1.5..3.0, 1.0),
        u in wave(1.0..3.0, 0.8),
        n in 3usize..7,
        m_mag in 0.3..4.0f64,
        lambda in -1.0..1.0f64,
        alpha in direction(6),
        xi in -1.0..1.0f64,
    ) {
        let params = ModelParams::new(
            n,
            m_mag,
            lambda,
            ModelParams::normalize_direction(&alpha[..n]).unwrap(),
        ).unwrap();
        let profile = profile_of(phi, u);
        let (r1, r2) = tensor::ode_residuals(&params, &profile, xi).unwrap();
        let x: Vec<f64> = params.alpha().iter().map(|a| a * xi).collect();
        let (off, diag) = tensor::pde_families(&params, &profile, &x).unwrap();
        let scale = 1.0 + r1.abs() + r2.abs();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let expect = -params.alpha()[i] * params.alpha()[j] * r1;
                    prop_assert!((off.get(i, j) - expect).abs() < 1e-12 * scale);
                }
            }
            let expect = -(params.alpha()[i] * params.alpha()[i] * r1 + r2);
            prop_assert!((diag[i] - expect).abs() < 1e-12 * scale);
        }
        // and the fundamental residual carries exactly the same data
        let fund = tensor::fundamental_residual(&params, &profile, xi).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expect = r1 * params.alpha()[i] * params.alpha()[j]
                    + if i == j { r2 } else { 0.0 };
                prop_assert!((fund.get(i, j) - expect).abs() < 1e-12 * scale);
            }
        }
    }

    // u = C phi^{(n-1)/m} (phi')^{-1/m} is linear in C and monotone in phi
    #[test]
    fn u_from_phi_scales_linearly(
        phi in 0.2..4.0f64,
        dphi in 0.1..3.0f64,
        n in 3usize..8,
        m in 1.0..5.0f64,
        c in 0.1..5.0f64,
        factor in 0.1..10.0f64,
    ) {
        let u1 = u_from_phi(phi, dphi, n, m, c).unwrap();
        let u2 = u_from_phi(phi, dphi, n, m, factor * c).unwrap();
        prop_assert!((u2 - factor * u1).abs() < 1e-12 * u2.abs());
    }
}
