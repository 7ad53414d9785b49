//! Exact quantum predictions for one stage.
//!
//! The source emits the polarization singlet, which is anticorrelated in
//! every basis: detecting the left photon along any axis collapses the
//! right-moving partner onto the complement axis, with probability 1/2 for
//! the left outcome regardless of the axis. The collapsed photon then
//! traverses the right chain under the projection postulate. An open loop
//! recombines its two channels coherently and transmits the state unchanged;
//! a loop with one channel blocked projects onto the surviving channel's
//! axis, attenuating by the Malus factor.
//!
//! Because an open loop leaves no which-path record, the quantum engine
//! reports only coarse fractions; [`FractionReport::components`] stays
//! `None` here.

use crate::angle::{malus, Angle};
use crate::stage::{Blocker, FractionReport, LoopSpec, StageSpec};

/// Linear polarization of the right-moving photon after conditioning or
/// collapse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    pub axis: Angle,
}

impl PureState {
    pub fn new(axis: Angle) -> Self {
        PureState { axis }
    }
}

/// Post-selects on a left detection along `left_outcome`: the right photon
/// collapses onto the complement axis. The returned probability is the
/// left-outcome rate (1/2 for every axis, by singlet invariance); it is the
/// denominator of all conditional fractions and is never folded into them.
pub fn condition_on_left(left_outcome: Angle) -> (PureState, f64) {
    (PureState::new(left_outcome.complement()), 0.5)
}

/// Carries `state` through one loop, returning the outgoing state and the
/// survival probability.
pub fn propagate(state: PureState, loop_spec: &LoopSpec) -> (PureState, f64) {
    match loop_spec.blocker {
        // Both channels recombine into the original beam.
        Blocker::Open => (state, 1.0),
        Blocker::BlockMinus => {
            let axis = loop_spec.axis;
            (PureState::new(axis), malus(axis, state.axis))
        }
        Blocker::BlockPlus => {
            let axis = loop_spec.axis.complement();
            (PureState::new(axis), malus(axis, state.axis))
        }
    }
}

/// Detection fraction for a bare photon entering the chain in `input`:
/// the product of per-loop survival probabilities.
pub fn chain_fraction_qm(input: PureState, chain: &[LoopSpec]) -> f64 {
    let mut state = input;
    let mut fraction = 1.0;
    for loop_spec in chain {
        let (next, survival) = propagate(state, loop_spec);
        state = next;
        fraction *= survival;
    }
    fraction
}

/// Conditional detection fraction for a stage: the probability that the
/// right photon reaches the detector, given the left detection the stage
/// conditions on.
pub fn stage_fraction_qm(stage: &StageSpec) -> FractionReport {
    let (state, _left_rate) = condition_on_left(stage.left_outcome);
    FractionReport::coarse_only(chain_fraction_qm(state, &stage.right_chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stage::StageLabel;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn conditioning_collapses_onto_the_complement() {
        let (state, p) = condition_on_left(Angle::Y);
        assert!(state.axis.axis_distance(Angle::X) < TOL);
        assert_eq!(p, 0.5);

        let (state, p) = condition_on_left(Angle::X);
        assert!(state.axis.axis_distance(Angle::Y) < TOL);
        assert_eq!(p, 0.5);

        let theta = Angle::from_degrees(30.0);
        let (state, p) = condition_on_left(theta.complement());
        assert!(state.axis.axis_distance(theta) < TOL);
        assert_eq!(p, 0.5);
    }

    #[test]
    fn open_loop_is_transparent() {
        let state = PureState::new(Angle::X);
        let (out, survival) = propagate(state, &LoopSpec::open(Angle::from_degrees(30.0)));
        assert_eq!(out, state);
        assert_eq!(survival, 1.0);
    }

    #[test]
    fn blocked_loop_projects_onto_the_open_channel() {
        // y-polarized photon through a theta loop with the complement
        // blocked: survival sin^2(theta), outgoing state along theta.
        let theta = Angle::from_degrees(30.0);
        let (out, survival) = propagate(PureState::new(Angle::Y), &LoopSpec::block_minus(theta));
        assert!(out.axis.axis_distance(theta) < TOL);
        let oracle = 30.0f64.to_radians().sin().powi(2);
        assert!((survival - oracle).abs() < TOL);
        assert!((survival - 0.25).abs() < TOL);
    }

    #[test]
    fn aligned_state_passes_a_blocked_loop_unattenuated() {
        let theta = Angle::from_degrees(30.0);
        let (out, survival) = propagate(PureState::new(theta), &LoopSpec::block_minus(theta));
        assert!(out.axis.axis_distance(theta) < TOL);
        assert!((survival - 1.0).abs() < TOL);
    }

    #[test]
    fn block_plus_projects_onto_the_complement_channel() {
        let theta = Angle::from_degrees(30.0);
        let (out, survival) = propagate(PureState::new(Angle::X), &LoopSpec::block_plus(theta));
        assert!(out.axis.axis_distance(theta.complement()) < TOL);
        let oracle = (120.0f64.to_radians() - 0.0).cos().powi(2);
        assert!((survival - oracle).abs() < TOL);
    }

    #[test]
    fn stage1_fraction_is_cos_squared_phi() {
        let f = stage_fraction_qm(&StageSpec::stage1(
            Angle::from_degrees(30.0),
            Angle::from_degrees(0.0),
        ));
        assert!((f.coarse - 1.0).abs() < TOL);
        assert!(f.components.is_none());

        let f = stage_fraction_qm(&StageSpec::stage1(
            Angle::from_degrees(30.0),
            Angle::from_degrees(60.0),
        ));
        assert!((f.coarse - 0.25).abs() < TOL);
    }

    #[test]
    fn stage2_fraction_is_sin_squared_theta() {
        let f = stage_fraction_qm(&StageSpec::stage2(
            Angle::from_degrees(30.0),
            Angle::from_degrees(60.0),
        ));
        assert!((f.coarse - 0.25).abs() < TOL);
    }

    #[test]
    fn stage3_fraction_is_cos_squared_of_the_difference() {
        let f = stage_fraction_qm(&StageSpec::stage3(
            Angle::from_degrees(30.0),
            Angle::from_degrees(60.0),
        ));
        assert!((f.coarse - 0.75).abs() < TOL);
    }

    fn any_angle() -> impl Strategy<Value = Angle> {
        (-100.0f64..100.0).prop_map(Angle::new)
    }

    fn any_loop() -> impl Strategy<Value = LoopSpec> {
        (any_angle(), 0u8..3).prop_map(|(axis, b)| LoopSpec {
            axis,
            blocker: match b {
                0 => Blocker::Open,
                1 => Blocker::BlockPlus,
                _ => Blocker::BlockMinus,
            },
        })
    }

    fn any_chain() -> impl Strategy<Value = Vec<LoopSpec>> {
        proptest::collection::vec(any_loop(), 0..6)
    }

    proptest! {
        #[test]
        fn inserting_an_open_loop_changes_nothing(
            left in any_angle(),
            chain in any_chain(),
            axis in any_angle(),
            pos_frac in 0.0f64..1.0,
        ) {
            let stage = StageSpec::custom(left, chain.clone());
            let base = stage_fraction_qm(&stage).coarse;

            let pos = (pos_frac * (chain.len() + 1) as f64) as usize;
            let mut inserted = chain;
            inserted.insert(pos.min(inserted.len()), LoopSpec::open(axis));
            let with_open = stage_fraction_qm(&StageSpec::custom(left, inserted)).coarse;

            prop_assert!((base - with_open).abs() < TOL);
        }

        #[test]
        fn stage_fraction_is_rotation_invariant(
            theta in any_angle(),
            phi in any_angle(),
            delta in -10.0f64..10.0,
        ) {
            for stage in [
                StageSpec::stage1(theta, phi),
                StageSpec::stage2(theta, phi),
                StageSpec::stage3(theta, phi),
            ] {
                let base = stage_fraction_qm(&stage).coarse;
                let rotated = stage_fraction_qm(&stage.rotated(delta)).coarse;
                prop_assert!((base - rotated).abs() < TOL);
            }
        }

        #[test]
        fn conditioning_reduces_to_a_single_particle_chain(
            left in any_angle(),
            chain in any_chain(),
        ) {
            let stage = StageSpec::custom(left, chain.clone());
            let conditional = stage_fraction_qm(&stage).coarse;
            let bare = chain_fraction_qm(PureState::new(left.complement()), &chain);
            prop_assert!((conditional - bare).abs() < TOL);
        }

        #[test]
        fn survivals_multiply_across_a_chain_split(
            input in any_angle(),
            chain in any_chain(),
            split_frac in 0.0f64..1.0,
        ) {
            let split = ((split_frac * (chain.len() + 1) as f64) as usize).min(chain.len());
            let (head, tail) = chain.split_at(split);

            let whole = chain_fraction_qm(PureState::new(input), &chain);

            let mut state = PureState::new(input);
            let mut head_fraction = 1.0;
            for l in head {
                let (next, s) = propagate(state, l);
                state = next;
                head_fraction *= s;
            }
            let tail_fraction = chain_fraction_qm(state, tail);

            prop_assert!((whole - head_fraction * tail_fraction).abs() < TOL);
        }
    }

    #[test]
    fn stage_labels_mark_the_canonical_constructors() {
        let theta = Angle::from_degrees(20.0);
        let phi = Angle::from_degrees(70.0);
        assert_eq!(StageSpec::stage1(theta, phi).label, StageLabel::Stage1);
        assert_eq!(StageSpec::custom(theta, vec![]).label, StageLabel::Custom);
    }
}
