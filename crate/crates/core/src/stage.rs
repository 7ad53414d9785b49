//! Analyzer loops, experimental stages, and detection-fraction reports.
//!
//! An analyzer loop is a pair of birefringent crystals: the first splits the
//! beam into two orthogonally polarized channels, the second recombines them
//! into the original beam when both channels stay open. Blocking one channel
//! turns the loop into a projector onto the other.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::angle::Angle;

/// The two paths inside a loop: `Plus` runs along the loop axis, `Minus`
/// along its orthogonal complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Channel {
    Plus,
    Minus,
}

impl Channel {
    /// One-letter label used in component tables and CLI output.
    pub fn letter(self) -> char {
        match self {
            Channel::Plus => 'P',
            Channel::Minus => 'M',
        }
    }
}

/// A which-path record: one channel per loop reached, in chain order.
pub type ChannelSeq = Vec<Channel>;

/// Compact text form of a channel sequence, e.g. `"PMP"`.
pub fn seq_label(seq: &[Channel]) -> String {
    seq.iter().map(|c| c.letter()).collect()
}

/// Blocker state of a loop. A blocked channel absorbs whatever enters it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Blocker {
    Open,
    BlockPlus,
    BlockMinus,
}

/// One analyzer loop: splitting axis plus blocker state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSpec {
    pub axis: Angle,
    pub blocker: Blocker,
}

impl LoopSpec {
    pub fn open(axis: Angle) -> Self {
        LoopSpec { axis, blocker: Blocker::Open }
    }

    pub fn block_plus(axis: Angle) -> Self {
        LoopSpec { axis, blocker: Blocker::BlockPlus }
    }

    pub fn block_minus(axis: Angle) -> Self {
        LoopSpec { axis, blocker: Blocker::BlockMinus }
    }

    pub fn is_open(self) -> bool {
        self.blocker == Blocker::Open
    }

    /// True if `channel` is absorbed by this loop's blocker.
    pub fn blocks(self, channel: Channel) -> bool {
        matches!(
            (self.blocker, channel),
            (Blocker::BlockPlus, Channel::Plus) | (Blocker::BlockMinus, Channel::Minus)
        )
    }

    /// Polarization axis of the given channel.
    pub fn channel_axis(self, channel: Channel) -> Angle {
        match channel {
            Channel::Plus => self.axis,
            Channel::Minus => self.axis.complement(),
        }
    }
}

/// Which of the canonical stage layouts a [`StageSpec`] follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageLabel {
    Stage1,
    Stage2,
    Stage3,
    Custom,
}

impl StageLabel {
    /// Index of the loop whose channel choice the stage's fine-grained
    /// fractions are split over: the unique open loop with a nondegenerate
    /// split in the canonical geometry. `None` for custom chains.
    pub fn decomposition_loop(self) -> Option<usize> {
        match self {
            StageLabel::Stage1 => Some(1),
            StageLabel::Stage2 => Some(2),
            StageLabel::Stage3 => Some(0),
            StageLabel::Custom => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StageLabel::Stage1 => "stage1",
            StageLabel::Stage2 => "stage2",
            StageLabel::Stage3 => "stage3",
            StageLabel::Custom => "custom",
        }
    }
}

/// One experimental stage: the left-arm detection outcome the run is
/// conditioned on, plus the ordered right-arm loop chain.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSpec {
    pub left_outcome: Angle,
    pub right_chain: Vec<LoopSpec>,
    pub label: StageLabel,
}

impl StageSpec {
    /// Conditioned on a y detection to the left (right photon starts
    /// x-polarized); x and theta loops open, phi loop keeps only its axis
    /// channel.
    pub fn stage1(theta: Angle, phi: Angle) -> Self {
        StageSpec {
            left_outcome: Angle::Y,
            right_chain: vec![
                LoopSpec::open(Angle::X),
                LoopSpec::open(theta),
                LoopSpec::block_minus(phi),
            ],
            label: StageLabel::Stage1,
        }
    }

    /// Conditioned on an x detection to the left (right photon starts
    /// y-polarized); the theta loop keeps only its axis channel, the phi
    /// loop stays open.
    pub fn stage2(theta: Angle, phi: Angle) -> Self {
        StageSpec {
            left_outcome: Angle::X,
            right_chain: vec![
                LoopSpec::open(Angle::X),
                LoopSpec::block_minus(theta),
                LoopSpec::open(phi),
            ],
            label: StageLabel::Stage2,
        }
    }

    /// Conditioned on a detection along the complement of theta (right
    /// photon starts theta-polarized); same chain as stage 1.
    pub fn stage3(theta: Angle, phi: Angle) -> Self {
        StageSpec {
            left_outcome: theta.complement(),
            right_chain: vec![
                LoopSpec::open(Angle::X),
                LoopSpec::open(theta),
                LoopSpec::block_minus(phi),
            ],
            label: StageLabel::Stage3,
        }
    }

    pub fn custom(left_outcome: Angle, right_chain: Vec<LoopSpec>) -> Self {
        StageSpec { left_outcome, right_chain, label: StageLabel::Custom }
    }

    /// The stage rotated rigidly by `delta`: left outcome and every loop
    /// axis move together. Observables are invariant under this.
    pub fn rotated(&self, delta: f64) -> Self {
        StageSpec {
            left_outcome: self.left_outcome.rotate(delta),
            right_chain: self
                .right_chain
                .iter()
                .map(|l| LoopSpec { axis: l.axis.rotate(delta), blocker: l.blocker })
                .collect(),
            label: self.label,
        }
    }
}

/// Coarse detection fraction plus, for models that define one, the table of
/// which-path components keyed by channel sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionReport {
    pub coarse: f64,
    pub components: Option<BTreeMap<ChannelSeq, f64>>,
}

impl FractionReport {
    pub fn coarse_only(coarse: f64) -> Self {
        FractionReport { coarse, components: None }
    }

    /// Sum of the components whose record at `loop_index` equals `channel`.
    /// `None` if this report carries no component table.
    pub fn marginal(&self, loop_index: usize, channel: Channel) -> Option<f64> {
        self.components.as_ref().map(|map| {
            map.iter()
                .filter(|(seq, _)| seq.get(loop_index) == Some(&channel))
                .map(|(_, p)| p)
                .sum()
        })
    }

    pub fn component_sum(&self) -> Option<f64> {
        self.components.as_ref().map(|map| map.values().sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage2_blocks_the_theta_complement_channel() {
        let stage = StageSpec::stage2(Angle::from_degrees(30.0), Angle::from_degrees(60.0));
        assert!(stage.right_chain[0].is_open());
        assert!(stage.right_chain[1].blocks(Channel::Minus));
        assert!(!stage.right_chain[1].blocks(Channel::Plus));
        assert!(stage.right_chain[2].is_open());
    }

    #[test]
    fn stage3_conditions_on_the_theta_complement() {
        let theta = Angle::from_degrees(30.0);
        let stage = StageSpec::stage3(theta, Angle::from_degrees(60.0));
        assert!(stage.left_outcome.axis_distance(Angle::from_degrees(120.0)) < 1e-12);
    }

    #[test]
    fn channel_axes_split_a_loop() {
        let l = LoopSpec::open(Angle::from_degrees(10.0));
        let d = l.channel_axis(Channel::Plus).axis_distance(l.channel_axis(Channel::Minus));
        assert!((d - core::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn marginal_sums_matching_sequences() {
        let mut map = BTreeMap::new();
        map.insert(vec![Channel::Plus, Channel::Plus], 0.5);
        map.insert(vec![Channel::Plus, Channel::Minus], 0.25);
        map.insert(vec![Channel::Minus, Channel::Plus], 0.25);
        let report = FractionReport { coarse: 1.0, components: Some(map) };
        assert_eq!(report.marginal(0, Channel::Plus), Some(0.75));
        assert_eq!(report.marginal(1, Channel::Minus), Some(0.25));
        assert_eq!(FractionReport::coarse_only(0.5).marginal(0, Channel::Plus), None);
    }

    #[test]
    fn seq_labels_are_one_letter_per_loop() {
        assert_eq!(seq_label(&[Channel::Plus, Channel::Minus, Channel::Plus]), "PMP");
        assert_eq!(seq_label(&[]), "");
    }
}
