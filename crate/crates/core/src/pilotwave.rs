//! The explicit hidden-variable model of the experiment.
//!
//! Every photon takes a definite channel in every loop it reaches: the axis
//! channel with the Malus probability against the current guiding
//! polarization, the complement channel otherwise. An empty wave takes the
//! channel the photon did not take. In an open loop the second crystal
//! recombines photon and empty wave, restoring the incoming polarization;
//! in a loop with a blocked channel the empty wave (or the photon) is
//! absorbed, and a surviving photon continues guided by the open channel's
//! axis.
//!
//! Under these rules every detection carries a full which-path record, so
//! detection fractions decompose into components, while the coarse
//! fractions reproduce the quantum values exactly.
//!
//! [`pw_components`] evaluates the component table in closed form;
//! [`pw_monte_carlo`] realizes the same rules as a reproducible trajectory
//! sampler built on counter-based randomness.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::angle::{malus, Angle};
use crate::error::Error;
use crate::rng::TrialRng;
use crate::stage::{Channel, ChannelSeq, FractionReport, LoopSpec, StageSpec};

/// One sampled photon history through a stage's right chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub left_outcome: Angle,
    /// One entry per loop reached, in chain order.
    pub channel_record: ChannelSeq,
    /// False when the photon entered a blocked channel and was absorbed.
    pub detected: bool,
}

/// Enumerates the which-path component table for a photon entering `chain`
/// with guiding polarization `input`. Components are indexed by the full
/// channel sequence of a detected photon; sequences that end in a blocked
/// channel are absorbed and do not appear. Zero-probability detected
/// sequences are kept so the table always covers the reachable paths.
pub fn chain_components(input: Angle, chain: &[LoopSpec]) -> FractionReport {
    let mut components = BTreeMap::new();
    let mut prefix = Vec::with_capacity(chain.len());
    descend(input, chain, 1.0, &mut prefix, &mut components);
    let coarse = components.values().sum();
    FractionReport { coarse, components: Some(components) }
}

fn descend(
    wave: Angle,
    rest: &[LoopSpec],
    prob: f64,
    prefix: &mut ChannelSeq,
    out: &mut BTreeMap<ChannelSeq, f64>,
) {
    let Some((loop_spec, tail)) = rest.split_first() else {
        out.insert(prefix.clone(), prob);
        return;
    };
    let p_plus = malus(loop_spec.axis, wave);
    for channel in [Channel::Plus, Channel::Minus] {
        if loop_spec.blocks(channel) {
            continue;
        }
        let p_channel = match channel {
            Channel::Plus => p_plus,
            // Guard against a -1e-17 leak from the complement product.
            Channel::Minus => (1.0 - p_plus).max(0.0),
        };
        let next_wave = if loop_spec.is_open() {
            wave
        } else {
            loop_spec.channel_axis(channel)
        };
        prefix.push(channel);
        descend(next_wave, tail, prob * p_channel, prefix, out);
        prefix.pop();
    }
}

/// Which-path component table for a stage, conditioned on its left outcome.
/// An empty chain yields the degenerate report: certain detection with a
/// single empty-sequence component.
pub fn pw_components(stage: &StageSpec) -> FractionReport {
    chain_components(stage.left_outcome.complement(), &stage.right_chain)
}

/// Coarse conditional detection fraction: the component sum. Agrees with
/// [`crate::quantum::stage_fraction_qm`] on every stage.
pub fn pw_coarse(stage: &StageSpec) -> f64 {
    pw_components(stage).coarse
}

fn walk_chain(mut wave: Angle, chain: &[LoopSpec], rng: &mut TrialRng) -> (ChannelSeq, bool) {
    let mut record = Vec::with_capacity(chain.len());
    for loop_spec in chain {
        let p_plus = malus(loop_spec.axis, wave);
        let channel = if rng.uniform() < p_plus { Channel::Plus } else { Channel::Minus };
        record.push(channel);
        if loop_spec.blocks(channel) {
            return (record, false);
        }
        if !loop_spec.is_open() {
            wave = loop_spec.channel_axis(channel);
        }
    }
    (record, true)
}

/// Simulates one source emission. Returns `None` when the left photon is not
/// detected along the stage's conditioning axis (probability 1/2), otherwise
/// the right photon's trajectory. Deterministic in `(stage, seed, index)`.
pub fn simulate_trial(stage: &StageSpec, seed: u64, index: u64) -> Option<Trajectory> {
    let mut rng = TrialRng::new(seed, index);
    if rng.uniform() >= 0.5 {
        return None;
    }
    let (channel_record, detected) =
        walk_chain(stage.left_outcome.complement(), &stage.right_chain, &mut rng);
    Some(Trajectory { left_outcome: stage.left_outcome, channel_record, detected })
}

/// Order-independent tally of trial outcomes. Merging accumulators from any
/// partition of the trial range reproduces the serial result exactly, which
/// is what makes parallel runs bitwise deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct McAccum {
    pub n_trials: u64,
    pub n_conditioned: u64,
    pub counts: BTreeMap<ChannelSeq, u64>,
    pub undetected: BTreeMap<ChannelSeq, u64>,
}

impl McAccum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, trial: Option<&Trajectory>) {
        self.n_trials += 1;
        let Some(trajectory) = trial else { return };
        self.n_conditioned += 1;
        let map = if trajectory.detected { &mut self.counts } else { &mut self.undetected };
        *map.entry(trajectory.channel_record.clone()).or_insert(0) += 1;
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.n_trials += other.n_trials;
        self.n_conditioned += other.n_conditioned;
        for (seq, n) in other.counts {
            *self.counts.entry(seq).or_insert(0) += n;
        }
        for (seq, n) in other.undetected {
            *self.undetected.entry(seq).or_insert(0) += n;
        }
        self
    }

    pub fn finish(self, seed: u64) -> McResult {
        McResult {
            n_trials: self.n_trials,
            n_conditioned: self.n_conditioned,
            counts: self.counts,
            undetected: self.undetected,
            seed,
        }
    }
}

/// Runs trials `range` of a conditioned stage simulation into an accumulator.
pub fn mc_accumulate(stage: &StageSpec, seed: u64, range: core::ops::Range<u64>) -> McAccum {
    let mut acc = McAccum::new();
    for index in range {
        acc.record(simulate_trial(stage, seed, index).as_ref());
    }
    acc
}

/// Tallied outcome of a Monte Carlo run. Holds only integers, so equality is
/// exact and two runs with the same arguments compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McResult {
    /// Source emissions simulated.
    pub n_trials: u64,
    /// Trials that passed the left post-selection.
    pub n_conditioned: u64,
    /// Detected trials keyed by their full channel sequence.
    pub counts: BTreeMap<ChannelSeq, u64>,
    /// Absorbed trials keyed by their truncated channel prefix; diagnostics
    /// only, excluded from detection frequencies.
    pub undetected: BTreeMap<ChannelSeq, u64>,
    pub seed: u64,
}

impl McResult {
    /// Conditional frequency of a detected channel sequence.
    pub fn frequency(&self, seq: &[Channel]) -> f64 {
        if self.n_conditioned == 0 {
            return 0.0;
        }
        let count = self.counts.get(seq).copied().unwrap_or(0);
        count as f64 / self.n_conditioned as f64
    }

    /// Binomial standard error `sqrt(p (1 - p) / n_conditioned)` of a
    /// sequence frequency.
    pub fn stderr(&self, seq: &[Channel]) -> f64 {
        binomial_stderr(self.frequency(seq), self.n_conditioned)
    }

    pub fn detected_total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Coarse detection-fraction estimate: detected over conditioned.
    pub fn detected_fraction(&self) -> f64 {
        if self.n_conditioned == 0 {
            return 0.0;
        }
        self.detected_total() as f64 / self.n_conditioned as f64
    }

    pub fn detected_stderr(&self) -> f64 {
        binomial_stderr(self.detected_fraction(), self.n_conditioned)
    }

    /// Fraction of emissions that passed the left post-selection.
    pub fn conditioning_rate(&self) -> f64 {
        if self.n_trials == 0 {
            return 0.0;
        }
        self.n_conditioned as f64 / self.n_trials as f64
    }

    /// Conditional frequency of taking `channel` at `loop_index` among
    /// detected trials.
    pub fn marginal_frequency(&self, loop_index: usize, channel: Channel) -> f64 {
        if self.n_conditioned == 0 {
            return 0.0;
        }
        let count: u64 = self
            .counts
            .iter()
            .filter(|(seq, _)| seq.get(loop_index) == Some(&channel))
            .map(|(_, n)| n)
            .sum();
        count as f64 / self.n_conditioned as f64
    }

    pub fn marginal_stderr(&self, loop_index: usize, channel: Channel) -> f64 {
        binomial_stderr(self.marginal_frequency(loop_index, channel), self.n_conditioned)
    }
}

fn binomial_stderr(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    libm::sqrt(p * (1.0 - p) / n as f64)
}

/// Samples `n` emissions of a conditioned stage. Deterministic in
/// `(stage, n, seed)` regardless of how callers partition the work.
pub fn pw_monte_carlo(stage: &StageSpec, n: u64, seed: u64) -> Result<McResult, Error> {
    if n == 0 {
        return Err(Error::EmptyRun);
    }
    Ok(mc_accumulate(stage, seed, 0..n).finish(seed))
}

/// Samples `n` bare photons entering `chain` with polarization `input`:
/// no source, no conditioning. Every trial counts as conditioned.
pub fn single_photon_monte_carlo(
    input: Angle,
    chain: &[LoopSpec],
    n: u64,
    seed: u64,
) -> Result<McResult, Error> {
    if n == 0 {
        return Err(Error::EmptyRun);
    }
    let mut acc = McAccum::new();
    for index in 0..n {
        let mut rng = TrialRng::new(seed, index);
        let (record, detected) = walk_chain(input, chain, &mut rng);
        acc.record(Some(&Trajectory { left_outcome: input, channel_record: record, detected }));
    }
    Ok(acc.finish(seed))
}
