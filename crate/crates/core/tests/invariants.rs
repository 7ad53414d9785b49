//! Grid-scale invariants: closed-form engine output checked against
//! independently evaluated trig oracles, identity residuals swept over the
//! full angle grid, and sampled frequencies checked against the component
//! tables.

use loopsim_core::{
    eval_point, pw_components, pw_monte_carlo, stage_fraction_qm, violation_family, Angle,
    Channel, StageSpec, CLOSED_FORM_TOL, GAP_ZERO_TOL, MC_SIGMA,
};

fn deg(x: f64) -> Angle {
    Angle::from_degrees(x)
}

/// Every whole-degree axis pair in `[0, 180)^2`.
fn degree_grid() -> impl Iterator<Item = (f64, f64)> {
    (0..180).flat_map(|i| (0..180).map(move |j| (i as f64, j as f64)))
}

fn cos2(x: f64) -> f64 {
    x.cos().powi(2)
}

fn sin2(x: f64) -> f64 {
    x.sin().powi(2)
}

#[test]
fn quantum_engine_reproduces_the_closed_forms_on_the_grid() {
    let mut max_residual = 0.0f64;
    for (td, pd) in degree_grid() {
        let (t, p) = (td.to_radians(), pd.to_radians());
        let (theta, phi) = (deg(td), deg(pd));
        let r1 = stage_fraction_qm(&StageSpec::stage1(theta, phi)).coarse - cos2(p);
        let r2 = stage_fraction_qm(&StageSpec::stage2(theta, phi)).coarse - sin2(t);
        let r3 = stage_fraction_qm(&StageSpec::stage3(theta, phi)).coarse - cos2(p - t);
        max_residual = max_residual.max(r1.abs()).max(r2.abs()).max(r3.abs());
    }
    assert!(max_residual < CLOSED_FORM_TOL, "max residual {max_residual:e}");
}

#[test]
fn pilot_wave_components_reproduce_the_six_formulas_on_the_grid() {
    let mut max_residual = 0.0f64;
    for (td, pd) in degree_grid() {
        let (t, p) = (td.to_radians(), pd.to_radians());
        let (theta, phi) = (deg(td), deg(pd));

        let s1 = pw_components(&StageSpec::stage1(theta, phi));
        let s2 = pw_components(&StageSpec::stage2(theta, phi));
        let s3 = pw_components(&StageSpec::stage3(theta, phi));

        let residuals = [
            s1.marginal(1, Channel::Plus).unwrap() - cos2(t) * cos2(p),
            s1.marginal(1, Channel::Minus).unwrap() - sin2(t) * cos2(p),
            s2.marginal(2, Channel::Plus).unwrap() - sin2(t) * cos2(p - t),
            s2.marginal(2, Channel::Minus).unwrap() - sin2(t) * sin2(p - t),
            s3.marginal(0, Channel::Plus).unwrap() - cos2(t) * cos2(p - t),
            s3.marginal(0, Channel::Minus).unwrap() - sin2(t) * cos2(p - t),
        ];
        for r in residuals {
            max_residual = max_residual.max(r.abs());
        }
    }
    assert!(max_residual < CLOSED_FORM_TOL, "max residual {max_residual:e}");
}

#[test]
fn decompositions_sum_to_the_coarse_fractions_on_the_grid() {
    let mut max_residual = 0.0f64;
    for (td, pd) in degree_grid() {
        let (theta, phi) = (deg(td), deg(pd));
        for stage in [
            StageSpec::stage1(theta, phi),
            StageSpec::stage2(theta, phi),
            StageSpec::stage3(theta, phi),
        ] {
            let report = pw_components(&stage);
            let residual = (report.component_sum().unwrap() - report.coarse).abs();
            max_residual = max_residual.max(residual);

            // The coarse fraction itself matches the quantum engine.
            let qm = stage_fraction_qm(&stage).coarse;
            max_residual = max_residual.max((report.coarse - qm).abs());
        }
    }
    assert!(max_residual < CLOSED_FORM_TOL, "max residual {max_residual:e}");
}

#[test]
fn direct_addition_identity_and_gap_equivalence_hold_on_the_grid() {
    let mut max_eq4 = 0.0f64;
    let mut max_gap_equiv = 0.0f64;
    for (td, pd) in degree_grid() {
        let report = eval_point(deg(td), deg(pd));
        max_eq4 = max_eq4.max((report.eq4_lhs - report.eq4_rhs).abs());
        max_gap_equiv =
            max_gap_equiv.max((report.eq5_residual - report.identification_gap).abs());
    }
    assert!(max_eq4 < CLOSED_FORM_TOL, "eq4 residual {max_eq4:e}");
    assert!(max_gap_equiv < CLOSED_FORM_TOL, "gap equivalence residual {max_gap_equiv:e}");
}

#[test]
fn the_identification_gap_is_generically_nonzero() {
    let mut nonzero = 0usize;
    let mut total = 0usize;
    for (td, pd) in degree_grid() {
        let report = eval_point(deg(td), deg(pd));
        total += 1;
        if report.identification_gap.abs() > GAP_ZERO_TOL {
            nonzero += 1;
        }
        // On the degenerate theta lines the identification happens to hold.
        if td == 0.0 || td == 90.0 {
            assert!(
                report.identification_gap.abs() < CLOSED_FORM_TOL,
                "gap {:e} at theta {td}, phi {pd}",
                report.identification_gap
            );
        }
    }
    let fraction = nonzero as f64 / total as f64;
    assert!(fraction > 0.5, "nonzero-gap fraction {fraction}");
}

#[test]
fn the_double_angle_family_violates_the_inequality() {
    for k in 1..=8 {
        let theta = deg(5.0 * k as f64);
        let report = violation_family(theta).unwrap();
        assert!(!report.eq6_satisfied, "satisfied at {} deg", 5 * k);
        assert!(report.eq6_lhs < report.eq6_rhs);
    }
}

#[test]
fn global_rotation_leaves_every_stage_fraction_unchanged() {
    let (theta, phi) = (deg(30.0), deg(60.0));
    let stages =
        [StageSpec::stage1(theta, phi), StageSpec::stage2(theta, phi), StageSpec::stage3(theta, phi)];
    let base: Vec<f64> = stages.iter().map(|s| stage_fraction_qm(s).coarse).collect();

    let mut delta = 0.0f64;
    while delta < core::f64::consts::PI {
        for (stage, expected) in stages.iter().zip(&base) {
            let rotated = stage_fraction_qm(&stage.rotated(delta)).coarse;
            assert!(
                (rotated - expected).abs() < CLOSED_FORM_TOL,
                "delta {delta}: {rotated} vs {expected}"
            );
        }
        delta += 0.01;
    }
}

#[test]
fn sampled_frequencies_match_the_component_tables() {
    let pairs = [(30.0, 60.0), (22.5, 45.0), (10.0, 80.0)];
    let n = 200_000u64;
    let seed = 101;
    for (td, pd) in pairs {
        let (theta, phi) = (deg(td), deg(pd));
        for stage in [
            StageSpec::stage1(theta, phi),
            StageSpec::stage2(theta, phi),
            StageSpec::stage3(theta, phi),
        ] {
            let closed = pw_components(&stage);
            let sampled = pw_monte_carlo(&stage, n, seed).unwrap();
            for (seq, expected) in closed.components.as_ref().unwrap() {
                let freq = sampled.frequency(seq);
                let band = (MC_SIGMA * sampled.stderr(seq)).max(CLOSED_FORM_TOL);
                assert!(
                    (freq - expected).abs() <= band,
                    "({td},{pd}) {:?}: freq {freq}, expected {expected}",
                    stage.label
                );
            }
            let rate = sampled.conditioning_rate();
            assert!((rate - 0.5).abs() <= MC_SIGMA * (0.25 / n as f64).sqrt());
        }
    }
}
