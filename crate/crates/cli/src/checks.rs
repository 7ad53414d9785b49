//! The `check` subcommand: every built-in invariant suite, run against the
//! requested grid, with one summary line per suite.

use loopsim_core::bell::{AUDIT_MC_SEED, AUDIT_MC_TRIALS};
use loopsim_core::{
    eval_point, malus, pw_components, pw_monte_carlo, stage_fraction_qm, violation_family, Angle,
    Channel, LoopSpec, StageSpec, CLOSED_FORM_TOL, GAP_ZERO_TOL, MC_SIGMA,
};

use crate::parallel::pw_monte_carlo_par;

/// Seeds committed for the Monte Carlo convergence suite.
pub const MC_CHECK_SEEDS: [u64; 5] = [101, 202, 303, 404, 505];

/// Angle pairs (degrees) committed for the Monte Carlo convergence suite.
pub const MC_CHECK_PAIRS: [(f64, f64); 3] = [(30.0, 60.0), (22.5, 45.0), (10.0, 80.0)];

#[derive(Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        SuiteOutcome { name, passed: true, detail }
    }

    fn check(name: &'static str, passed: bool, detail: String) -> Self {
        SuiteOutcome { name, passed, detail }
    }
}

fn deg(x: f64) -> Angle {
    Angle::from_degrees(x)
}

fn grid(step_deg: f64) -> Vec<f64> {
    let mut values = Vec::new();
    let mut k = 0u64;
    while (k as f64) * step_deg < 180.0 - 1e-9 {
        values.push((k as f64) * step_deg);
        k += 1;
    }
    values
}

fn canonical_stages(theta: Angle, phi: Angle) -> [StageSpec; 3] {
    [StageSpec::stage1(theta, phi), StageSpec::stage2(theta, phi), StageSpec::stage3(theta, phi)]
}

/// Runs every suite. `step_deg` controls the grid density, `mc_n` the trial
/// count of the sampling suites.
pub fn run_all(step_deg: f64, mc_n: u64) -> Vec<SuiteOutcome> {
    let axes = grid(step_deg);
    vec![
        axis_identities(&axes),
        quantum_closed_forms(&axes),
        pilot_wave_formulas(&axes),
        decomposition_identities(&axes),
        model_equivalence(&axes),
        open_loop_transparency(&axes),
        sum_identity_and_gap_equivalence(&axes),
        gap_statistics(&axes),
        violation_family_suite(),
        single_particle_suite(),
        mc_convergence(mc_n),
        mc_conditioning_rate(mc_n),
        mc_determinism(mc_n.min(100_000)),
    ]
}

fn axis_identities(axes: &[f64]) -> SuiteOutcome {
    let mut max_residual = 0.0f64;
    for &a_deg in axes {
        let a = deg(a_deg);
        max_residual = max_residual.max(a.complement().complement().axis_distance(a));
        for &b_deg in axes {
            let b = deg(b_deg);
            let partition = malus(a, b) + malus(a.complement(), b) - 1.0;
            let symmetry = malus(a, b) - malus(b, a);
            let rotated = malus(a.rotate(0.4), b.rotate(0.4)) - malus(a, b);
            max_residual =
                max_residual.max(partition.abs()).max(symmetry.abs()).max(rotated.abs());
        }
    }
    SuiteOutcome::check(
        "axis and Malus identities",
        max_residual < CLOSED_FORM_TOL,
        format!("max residual {max_residual:.2e} over {} axes", axes.len()),
    )
}

fn quantum_closed_forms(axes: &[f64]) -> SuiteOutcome {
    let mut max_residual = 0.0f64;
    for &td in axes {
        for &pd in axes {
            let (t, p) = (td.to_radians(), pd.to_radians());
            let (theta, phi) = (deg(td), deg(pd));
            let r1 =
                stage_fraction_qm(&StageSpec::stage1(theta, phi)).coarse - p.cos().powi(2);
            let r2 =
                stage_fraction_qm(&StageSpec::stage2(theta, phi)).coarse - t.sin().powi(2);
            let r3 = stage_fraction_qm(&StageSpec::stage3(theta, phi)).coarse
                - (p - t).cos().powi(2);
            max_residual = max_residual.max(r1.abs()).max(r2.abs()).max(r3.abs());
        }
    }
    SuiteOutcome::check(
        "quantum closed forms",
        max_residual < CLOSED_FORM_TOL,
        format!("max residual {max_residual:.2e} over {} points", axes.len() * axes.len()),
    )
}

fn pilot_wave_formulas(axes: &[f64]) -> SuiteOutcome {
    let mut max_residual = 0.0f64;
    for &td in axes {
        for &pd in axes {
            let (t, p) = (td.to_radians(), pd.to_radians());
            let (c2t, s2t) = (t.cos().powi(2), t.sin().powi(2));
            let (c2p, s2p) = (p.cos().powi(2), p.sin().powi(2));
            let c2d = (p - t).cos().powi(2);
            let s2d = (p - t).sin().powi(2);
            let _ = s2p;

            let (theta, phi) = (deg(td), deg(pd));
            let s1 = pw_components(&StageSpec::stage1(theta, phi));
            let s2 = pw_components(&StageSpec::stage2(theta, phi));
            let s3 = pw_components(&StageSpec::stage3(theta, phi));
            let residuals = [
                s1.marginal(1, Channel::Plus).unwrap() - c2t * c2p,
                s1.marginal(1, Channel::Minus).unwrap() - s2t * c2p,
                s2.marginal(2, Channel::Plus).unwrap() - s2t * c2d,
                s2.marginal(2, Channel::Minus).unwrap() - s2t * s2d,
                s3.marginal(0, Channel::Plus).unwrap() - c2t * c2d,
                s3.marginal(0, Channel::Minus).unwrap() - s2t * c2d,
            ];
            for r in residuals {
                max_residual = max_residual.max(r.abs());
            }
        }
    }
    SuiteOutcome::check(
        "pilot-wave component formulas",
        max_residual < CLOSED_FORM_TOL,
        format!("max residual {max_residual:.2e} over six expressions per point"),
    )
}

fn decomposition_identities(axes: &[f64]) -> SuiteOutcome {
    let mut max_residual = 0.0f64;
    for &td in axes {
        for &pd in axes {
            for stage in canonical_stages(deg(td), deg(pd)) {
                let report = pw_components(&stage);
                max_residual = max_residual
                    .max((report.component_sum().unwrap() - report.coarse).abs());
            }
        }
    }
    SuiteOutcome::check(
        "which-path decompositions sum to coarse fractions",
        max_residual < CLOSED_FORM_TOL,
        format!("max residual {max_residual:.2e} over three stages per point"),
    )
}

fn model_equivalence(axes: &[f64]) -> SuiteOutcome {
    let mut max_residual = 0.0f64;
    for &td in axes {
        for &pd in axes {
            for stage in canonical_stages(deg(td), deg(pd)) {
                let diff = pw_components(&stage).coarse - stage_fraction_qm(&stage).coarse;
                max_residual = max_residual.max(diff.abs());
            }
        }
    }
    SuiteOutcome::check(
        "pilot-wave coarse fractions equal quantum fractions",
        max_residual < CLOSED_FORM_TOL,
        format!("max residual {max_residual:.2e}"),
    )
}

fn open_loop_transparency(axes: &[f64]) -> SuiteOutcome {
    let mut max_residual = 0.0f64;
    let mut insertions = 0usize;
    // Thin the grid; each point tries every insertion position.
    for &td in axes.iter().step_by(4) {
        for &pd in axes.iter().step_by(4) {
            let (theta, phi) = (deg(td), deg(pd));
            let inserted_axis = deg(td + pd + 17.0);
            for stage in canonical_stages(theta, phi) {
                let base = stage_fraction_qm(&stage).coarse;
                for pos in 0..=stage.right_chain.len() {
                    let mut chain = stage.right_chain.clone();
                    chain.insert(pos, LoopSpec::open(inserted_axis));
                    let with_open =
                        stage_fraction_qm(&StageSpec::custom(stage.left_outcome, chain)).coarse;
                    max_residual = max_residual.max((with_open - base).abs());
                    insertions += 1;
                }
            }
        }
    }
    SuiteOutcome::check(
        "open loops are observationally transparent",
        max_residual < CLOSED_FORM_TOL,
        format!("max residual {max_residual:.2e} over {insertions} insertions"),
    )
}

fn sum_identity_and_gap_equivalence(axes: &[f64]) -> SuiteOutcome {
    let mut max_eq4 = 0.0f64;
    let mut max_equiv = 0.0f64;
    for &td in axes {
        for &pd in axes {
            let report = eval_point(deg(td), deg(pd));
            max_eq4 = max_eq4.max((report.eq4_lhs - report.eq4_rhs).abs());
            max_equiv = max_equiv.max((report.eq5_residual - report.identification_gap).abs());
        }
    }
    SuiteOutcome::check(
        "direct-addition identity and gap equivalence",
        max_eq4 < CLOSED_FORM_TOL && max_equiv < CLOSED_FORM_TOL,
        format!("eq4 residual {max_eq4:.2e}, equivalence residual {max_equiv:.2e}"),
    )
}

fn gap_statistics(axes: &[f64]) -> SuiteOutcome {
    let mut nonzero = 0usize;
    let mut total = 0usize;
    let mut max_degenerate = 0.0f64;
    for &td in axes {
        for &pd in axes {
            let report = eval_point(deg(td), deg(pd));
            total += 1;
            if report.identification_gap.abs() > GAP_ZERO_TOL {
                nonzero += 1;
            }
            if td == 0.0 || (td - 90.0).abs() < 1e-9 {
                max_degenerate = max_degenerate.max(report.identification_gap.abs());
            }
        }
    }
    let fraction = nonzero as f64 / total as f64;
    SuiteOutcome::check(
        "identification gap statistics",
        fraction > 0.5 && max_degenerate < CLOSED_FORM_TOL,
        format!(
            "nonzero on {:.1}% of {} points, degenerate-line max {max_degenerate:.2e}",
            100.0 * fraction,
            total
        ),
    )
}

fn violation_family_suite() -> SuiteOutcome {
    let mut worst_margin = f64::INFINITY;
    for k in 1..=8 {
        let report = match violation_family(deg(5.0 * k as f64)) {
            Ok(report) => report,
            Err(e) => {
                return SuiteOutcome::check(
                    "double-angle violation family",
                    false,
                    format!("family evaluation failed: {e}"),
                )
            }
        };
        if report.eq6_satisfied {
            return SuiteOutcome::check(
                "double-angle violation family",
                false,
                format!("inequality satisfied at theta = {} deg", 5 * k),
            );
        }
        worst_margin = worst_margin.min(report.eq6_rhs - report.eq6_lhs);
    }
    SuiteOutcome::pass(
        "double-angle violation family",
        format!("violated for theta in 5..40 deg, smallest margin {worst_margin:.3}"),
    )
}

fn single_particle_suite() -> SuiteOutcome {
    // Closed form on the 5-degree grid.
    for td in (0..36).map(|k| k as f64 * 5.0) {
        for pd in (0..36).map(|k| k as f64 * 5.0) {
            for stage in canonical_stages(deg(td), deg(pd)) {
                if !loopsim_core::bell::single_particle_audit_closed(&stage) {
                    return SuiteOutcome::check(
                        "single-particle equivalence",
                        false,
                        format!("closed-form audit failed at ({td}, {pd})"),
                    );
                }
            }
        }
    }
    // Sampled at the committed point.
    for stage in canonical_stages(deg(30.0), deg(60.0)) {
        if !loopsim_core::bell::single_particle_audit_mc(&stage, AUDIT_MC_TRIALS, AUDIT_MC_SEED) {
            return SuiteOutcome::check(
                "single-particle equivalence",
                false,
                format!("sampled audit failed for {}", stage.label.name()),
            );
        }
    }
    SuiteOutcome::pass(
        "single-particle equivalence",
        "closed form on the 5-degree grid, sampled at (30, 60)".into(),
    )
}

fn mc_convergence(n: u64) -> SuiteOutcome {
    let mut worst_z = 0.0f64;
    let mut checks = 0usize;
    for seed in MC_CHECK_SEEDS {
        for (td, pd) in MC_CHECK_PAIRS {
            for stage in canonical_stages(deg(td), deg(pd)) {
                let closed = pw_components(&stage);
                let sampled = match pw_monte_carlo_par(&stage, n, seed) {
                    Ok(sampled) => sampled,
                    Err(e) => {
                        return SuiteOutcome::check(
                            "Monte Carlo convergence",
                            false,
                            format!("sampler failed: {e}"),
                        )
                    }
                };
                for (seq, expected) in closed.components.as_ref().unwrap() {
                    let freq = sampled.frequency(seq);
                    let se = sampled.stderr(seq);
                    checks += 1;
                    if se == 0.0 {
                        if (freq - expected).abs() > CLOSED_FORM_TOL {
                            return SuiteOutcome::check(
                                "Monte Carlo convergence",
                                false,
                                format!(
                                    "degenerate component off closed form at ({td},{pd}) seed {seed}"
                                ),
                            );
                        }
                        continue;
                    }
                    let z = (freq - expected).abs() / se;
                    worst_z = worst_z.max(z);
                    if z > MC_SIGMA {
                        return SuiteOutcome::check(
                            "Monte Carlo convergence",
                            false,
                            format!(
                                "component {:.1} sigma off at ({td},{pd}) stage {} seed {seed}",
                                z,
                                stage.label.name()
                            ),
                        );
                    }
                }
            }
        }
    }
    SuiteOutcome::pass(
        "Monte Carlo convergence",
        format!("{checks} component frequencies within {MC_SIGMA} sigma, worst {worst_z:.2}"),
    )
}

fn mc_conditioning_rate(n: u64) -> SuiteOutcome {
    let bound = MC_SIGMA * (0.25 / n as f64).sqrt();
    let mut worst = 0.0f64;
    for seed in MC_CHECK_SEEDS {
        let stage = StageSpec::stage1(deg(30.0), deg(60.0));
        let sampled = match pw_monte_carlo_par(&stage, n, seed) {
            Ok(sampled) => sampled,
            Err(e) => {
                return SuiteOutcome::check(
                    "Monte Carlo conditioning rate",
                    false,
                    format!("sampler failed: {e}"),
                )
            }
        };
        worst = worst.max((sampled.conditioning_rate() - 0.5).abs());
    }
    SuiteOutcome::check(
        "Monte Carlo conditioning rate",
        worst <= bound,
        format!("max |rate - 1/2| = {worst:.2e}, bound {bound:.2e}"),
    )
}

fn mc_determinism(n: u64) -> SuiteOutcome {
    let stage = StageSpec::stage2(deg(30.0), deg(60.0));
    let serial = match pw_monte_carlo(&stage, n, 7) {
        Ok(serial) => serial,
        Err(e) => {
            return SuiteOutcome::check("Monte Carlo determinism", false, format!("{e}"))
        }
    };
    for threads in [1usize, 4] {
        let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool,
            Err(e) => {
                return SuiteOutcome::check("Monte Carlo determinism", false, format!("{e}"))
            }
        };
        let parallel = match pool.install(|| pw_monte_carlo_par(&stage, n, 7)) {
            Ok(parallel) => parallel,
            Err(e) => {
                return SuiteOutcome::check("Monte Carlo determinism", false, format!("{e}"))
            }
        };
        if parallel != serial {
            return SuiteOutcome::check(
                "Monte Carlo determinism",
                false,
                format!("parallel run with {threads} threads diverged from the serial run"),
            );
        }
    }
    SuiteOutcome::pass(
        "Monte Carlo determinism",
        format!("serial and parallel tallies identical over {n} trials"),
    )
}
