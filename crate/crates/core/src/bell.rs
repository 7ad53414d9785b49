//! Audit of the inequality chain assembled from the stage fractions.
//!
//! The three canonical stages yield coarse fractions f1(x,phi), f2(y,theta),
//! f3(theta,phi) and, in the pilot-wave model, their which-path components.
//! The audit evaluates, at each angle pair:
//!
//! * `eq4`: the direct-addition identity. f1 + f2 equals the sum of the
//!   four stage-1/stage-2 components, because each stage is decomposed
//!   within itself.
//! * `eq5`: the rewrite that replaces the two through-channel components by
//!   f3. It is valid only if stage-1 and stage-2 components, which describe
//!   photons entering with different polarizations, can be identified with
//!   stage-3 components. Nothing licenses that cross-stage identification.
//! * `eq6`: the inequality f1 + f2 >= f3 obtained by dropping the leftover
//!   nonnegative terms from `eq5`.
//! * `identification_gap`: f1(x,theta,phi) + f2(y,theta,phi) - f3(theta,phi),
//!   the quantity the rewrite silently set to zero. It equals the `eq5`
//!   residual identically and is generically nonzero, which is why `eq6`
//!   fails where it fails.
//!
//! Coarse fractions and components are both taken from the pilot-wave
//! engine; the quantum engine reproduces the same coarse values but supplies
//! no components.

use alloc::vec::Vec;

use crate::angle::Angle;
use crate::error::Error;
use crate::pilotwave::{
    pw_components, pw_monte_carlo, single_photon_monte_carlo, McResult,
};
use crate::quantum::{chain_fraction_qm, stage_fraction_qm, PureState};
use crate::rng::mix;
use crate::stage::{Channel, StageSpec};
use crate::{CLOSED_FORM_TOL, MC_SIGMA};

/// The nine fractions a single grid point contributes: per stage, the coarse
/// fraction and its two which-path components over the stage's
/// decomposition loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageFractionSet {
    pub f1_coarse: f64,
    pub f1_xtheta_phi: f64,
    pub f1_xthetabar_phi: f64,
    pub f2_coarse: f64,
    pub f2_ytheta_phi: f64,
    pub f2_ytheta_phibar: f64,
    pub f3_coarse: f64,
    pub f3_xtheta_phi: f64,
    pub f3_ytheta_phi: f64,
}

/// Evaluation of the inequality chain at one angle pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub theta: Angle,
    pub phi: Angle,
    /// f1 + f2, the coarse side of the direct-addition identity.
    pub eq4_lhs: f64,
    /// The four stage-1/stage-2 components; equals `eq4_lhs` always.
    pub eq4_rhs: f64,
    /// f3 + f1(x,thetabar,phi) + f2(y,theta,phibar): the rewritten sum.
    pub eq5_rhs: f64,
    /// eq4_lhs - eq5_rhs; equals `identification_gap` identically.
    pub eq5_residual: f64,
    pub eq6_lhs: f64,
    pub eq6_rhs: f64,
    /// Whether eq6_lhs >= eq6_rhs within the comparison slack.
    pub eq6_satisfied: bool,
    /// f1(x,theta,phi) + f2(y,theta,phi) - f3(theta,phi).
    pub identification_gap: f64,
}

/// Fraction source for grid scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    ClosedForm,
    MonteCarlo { n: u64, seed: u64 },
}

/// One scanned grid point: the fractions, their standard errors when
/// sampled, and the derived report.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEval {
    pub fractions: StageFractionSet,
    /// Binomial standard errors of the corresponding fields; `None` in
    /// closed form.
    pub stderrs: Option<StageFractionSet>,
    pub report: InequalityReport,
}

fn canonical_stages(theta: Angle, phi: Angle) -> [StageSpec; 3] {
    [
        StageSpec::stage1(theta, phi),
        StageSpec::stage2(theta, phi),
        StageSpec::stage3(theta, phi),
    ]
}

/// Closed-form stage fractions at one angle pair.
pub fn stage_fractions(theta: Angle, phi: Angle) -> StageFractionSet {
    let mut coarse = [0.0f64; 3];
    let mut plus = [0.0f64; 3];
    let mut minus = [0.0f64; 3];
    for (i, stage) in canonical_stages(theta, phi).iter().enumerate() {
        let report = pw_components(stage);
        let split = stage.label.decomposition_loop().expect("canonical stage");
        coarse[i] = report.coarse;
        plus[i] = report.marginal(split, Channel::Plus).expect("components present");
        minus[i] = report.marginal(split, Channel::Minus).expect("components present");
    }
    pack_fractions(coarse, plus, minus)
}

fn pack_fractions(coarse: [f64; 3], plus: [f64; 3], minus: [f64; 3]) -> StageFractionSet {
    StageFractionSet {
        f1_coarse: coarse[0],
        f1_xtheta_phi: plus[0],
        f1_xthetabar_phi: minus[0],
        f2_coarse: coarse[1],
        f2_ytheta_phi: plus[1],
        f2_ytheta_phibar: minus[1],
        f3_coarse: coarse[2],
        f3_xtheta_phi: plus[2],
        f3_ytheta_phi: minus[2],
    }
}

/// Sampled stage fractions at one angle pair; per-stage streams are derived
/// from `seed` so the three runs are independent.
pub fn stage_fractions_mc(
    theta: Angle,
    phi: Angle,
    n: u64,
    seed: u64,
) -> Result<(StageFractionSet, StageFractionSet), Error> {
    let mut coarse = [0.0f64; 3];
    let mut plus = [0.0f64; 3];
    let mut minus = [0.0f64; 3];
    let mut coarse_se = [0.0f64; 3];
    let mut plus_se = [0.0f64; 3];
    let mut minus_se = [0.0f64; 3];
    for (i, stage) in canonical_stages(theta, phi).iter().enumerate() {
        let result = pw_monte_carlo(stage, n, mix(seed, i as u64 + 1))?;
        let split = stage.label.decomposition_loop().expect("canonical stage");
        coarse[i] = result.detected_fraction();
        coarse_se[i] = result.detected_stderr();
        plus[i] = result.marginal_frequency(split, Channel::Plus);
        plus_se[i] = result.marginal_stderr(split, Channel::Plus);
        minus[i] = result.marginal_frequency(split, Channel::Minus);
        minus_se[i] = result.marginal_stderr(split, Channel::Minus);
    }
    Ok((pack_fractions(coarse, plus, minus), pack_fractions(coarse_se, plus_se, minus_se)))
}

/// Assembles the report from a fraction set. `slack` is the comparison
/// tolerance for the inequality verdict.
pub fn report_from_fractions(
    theta: Angle,
    phi: Angle,
    f: &StageFractionSet,
    slack: f64,
) -> InequalityReport {
    let eq4_lhs = f.f1_coarse + f.f2_coarse;
    let eq4_rhs = f.f1_xtheta_phi + f.f1_xthetabar_phi + f.f2_ytheta_phi + f.f2_ytheta_phibar;
    let eq5_rhs = f.f3_coarse + f.f1_xthetabar_phi + f.f2_ytheta_phibar;
    let eq5_residual = eq4_lhs - eq5_rhs;
    let eq6_lhs = eq4_lhs;
    let eq6_rhs = f.f3_coarse;
    let identification_gap = (f.f1_xtheta_phi + f.f2_ytheta_phi) - f.f3_coarse;
    InequalityReport {
        theta,
        phi,
        eq4_lhs,
        eq4_rhs,
        eq5_rhs,
        eq5_residual,
        eq6_lhs,
        eq6_rhs,
        eq6_satisfied: eq6_lhs >= eq6_rhs - slack,
        identification_gap,
    }
}

/// Closed-form report at one angle pair.
pub fn eval_point(theta: Angle, phi: Angle) -> InequalityReport {
    report_from_fractions(theta, phi, &stage_fractions(theta, phi), CLOSED_FORM_TOL)
}

/// Report at one angle pair under the chosen fraction source. In Monte
/// Carlo mode the inequality verdict widens its slack to `MC_SIGMA` combined
/// standard errors.
pub fn eval_point_with(theta: Angle, phi: Angle, model: &Model) -> Result<PointEval, Error> {
    match model {
        Model::ClosedForm => {
            let fractions = stage_fractions(theta, phi);
            let report = report_from_fractions(theta, phi, &fractions, CLOSED_FORM_TOL);
            Ok(PointEval { fractions, stderrs: None, report })
        }
        Model::MonteCarlo { n, seed } => {
            let (fractions, stderrs) = stage_fractions_mc(theta, phi, *n, *seed)?;
            let slack = MC_SIGMA
                * libm::sqrt(
                    stderrs.f1_coarse * stderrs.f1_coarse
                        + stderrs.f2_coarse * stderrs.f2_coarse
                        + stderrs.f3_coarse * stderrs.f3_coarse,
                );
            let report = report_from_fractions(theta, phi, &fractions, slack);
            Ok(PointEval { fractions, stderrs: Some(stderrs), report })
        }
    }
}

/// The half-open axis grid `{0, step, 2 step, ...} < pi`.
pub fn axis_grid(step: f64) -> Result<Vec<Angle>, Error> {
    if !step.is_finite() || step <= 0.0 || step > core::f64::consts::FRAC_PI_2 {
        return Err(Error::InvalidStep);
    }
    let mut grid = Vec::new();
    let mut k = 0u64;
    // Indexed multiples rather than accumulation, so grid angles carry one
    // rounding each.
    while (k as f64) * step < core::f64::consts::PI - 1e-9 {
        grid.push(Angle::new((k as f64) * step));
        k += 1;
    }
    Ok(grid)
}

/// Evaluates every `(theta, phi)` pair on the half-open grid with the given
/// step, in row-major order. Monte Carlo mode derives an independent stream
/// per grid point from the model seed.
pub fn scan_grid(step: f64, model: &Model) -> Result<Vec<PointEval>, Error> {
    let grid = axis_grid(step)?;
    let mut rows = Vec::with_capacity(grid.len() * grid.len());
    for (i, &theta) in grid.iter().enumerate() {
        for (j, &phi) in grid.iter().enumerate() {
            let point_model = match model {
                Model::ClosedForm => Model::ClosedForm,
                Model::MonteCarlo { n, seed } => Model::MonteCarlo {
                    n: *n,
                    seed: mix(mix(*seed, i as u64), j as u64),
                },
            };
            rows.push(eval_point_with(theta, phi, &point_model)?);
        }
    }
    Ok(rows)
}

/// The one-parameter family `phi = 2 theta`, which violates the inequality
/// for every `theta` strictly between 0 and pi/4: there
/// cos^2(2 theta) + sin^2(theta) < cos^2(theta) whenever 0 < cos(2 theta) < 1.
pub fn violation_family(theta: Angle) -> Result<InequalityReport, Error> {
    let t = theta.radians();
    if !(t > 0.0 && t < core::f64::consts::FRAC_PI_4) {
        return Err(Error::ThetaOutsideFamily);
    }
    Ok(eval_point(theta, Angle::new(2.0 * t)))
}

/// Trials per sampler in the Monte Carlo half of the audit.
pub const AUDIT_MC_TRIALS: u64 = 200_000;
/// Committed stream for the audit sampler.
pub const AUDIT_MC_SEED: u64 = 1717;
const SINGLE_PHOTON_SALT: u64 = 0x51;

/// Closed-form half of the single-particle audit: the conditional stage
/// fraction must equal the bare chain fraction with input polarization
/// `complement(left_outcome)`, in both engines.
pub fn single_particle_audit_closed(stage: &StageSpec) -> bool {
    let input = stage.left_outcome.complement();
    let qm_conditional = stage_fraction_qm(stage).coarse;
    let qm_single = chain_fraction_qm(PureState::new(input), &stage.right_chain);
    let pw_conditional = pw_components(stage).coarse;
    let pw_single = crate::pilotwave::chain_components(input, &stage.right_chain).coarse;
    libm::fabs(qm_conditional - qm_single) < CLOSED_FORM_TOL
        && libm::fabs(pw_conditional - pw_single) < CLOSED_FORM_TOL
}

/// Monte Carlo half of the audit: conditioned two-photon sampling and bare
/// single-photon sampling must agree within `MC_SIGMA` combined standard
/// errors. The two samplers draw from independent derived streams.
pub fn single_particle_audit_mc(stage: &StageSpec, n: u64, seed: u64) -> bool {
    let Ok(conditioned) = pw_monte_carlo(stage, n, seed) else { return false };
    let input = stage.left_outcome.complement();
    let Ok(single) =
        single_photon_monte_carlo(input, &stage.right_chain, n, mix(seed, SINGLE_PHOTON_SALT))
    else {
        return false;
    };
    mc_fractions_agree(&conditioned, &single)
}

fn mc_fractions_agree(a: &McResult, b: &McResult) -> bool {
    let diff = libm::fabs(a.detected_fraction() - b.detected_fraction());
    let band = MC_SIGMA
        * libm::sqrt(
            a.detected_stderr() * a.detected_stderr() + b.detected_stderr() * b.detected_stderr(),
        );
    diff <= band
}

/// Full audit: closed form at machine tolerance, then Monte Carlo at the
/// committed trial count and seed.
pub fn single_particle_audit(stage: &StageSpec) -> bool {
    single_particle_audit_closed(stage)
        && single_particle_audit_mc(stage, AUDIT_MC_TRIALS, AUDIT_MC_SEED)
}
