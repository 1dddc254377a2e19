//! Monte-Carlo sampler of capped RUS cycle histories.
//!
//! Trials are split over a fixed number of ChaCha8 streams derived from one
//! master seed, so the merged counts do not depend on how rayon schedules the
//! streams.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::noise::{
    AttemptCaps, CycleOutcomeDistribution, HeraldLabel, HeraldedOutcomeDistribution,
};

const STREAMS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RusGate {
    Cz,
    Mzz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cycle {
    Success,
    Repeat,
    OneLoss,
    TwoLoss,
}

fn draw(rng: &mut ChaCha8Rng, c: &CycleOutcomeDistribution) -> Cycle {
    let u: f64 = rng.random();
    if u < c.p_success {
        Cycle::Success
    } else if u < c.p_success + c.p_repeat() {
        Cycle::Repeat
    } else if u < c.p_success + c.p_repeat() + c.p_one_loss {
        Cycle::OneLoss
    } else {
        Cycle::TwoLoss
    }
}

fn run_history(rng: &mut ChaCha8Rng, c: &CycleOutcomeDistribution, n_rus: u32, gate: RusGate) -> HeraldLabel {
    let mut losses = 0u32;
    for _ in 0..n_rus {
        match (draw(rng, c), gate) {
            (Cycle::Success, RusGate::Cz) if losses == 0 => return HeraldLabel::PureSuccess,
            (Cycle::Success, RusGate::Cz) => return HeraldLabel::SuccessWithLosses(losses),
            (Cycle::Success, RusGate::Mzz) if losses == 0 => return HeraldLabel::PureSuccess,
            (Cycle::Success, RusGate::Mzz) => return HeraldLabel::SuccessWithLoss,
            (Cycle::TwoLoss, RusGate::Cz) => return HeraldLabel::Failure,
            (Cycle::Repeat, _) => {}
            // For the parity measurement any loss only erases the phase, and
            // the protocol keeps going until it succeeds or hits the cap.
            (Cycle::OneLoss, _) | (Cycle::TwoLoss, RusGate::Mzz) => losses += 1,
        }
    }
    HeraldLabel::Abort
}

/// Observed outcome counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    pub trials: u64,
    pub counts: BTreeMap<HeraldLabel, u64>,
}

/// One row of a closed-form vs sampled comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryComparison {
    pub label: HeraldLabel,
    pub expected: f64,
    pub observed: f64,
    /// Binomial standard deviation of the observed frequency.
    pub sigma: f64,
    /// |observed − expected| / sigma; zero when both agree exactly.
    pub z: f64,
}

impl EmpiricalDistribution {
    pub fn frequency(&self, label: HeraldLabel) -> f64 {
        *self.counts.get(&label).unwrap_or(&0) as f64 / self.trials as f64
    }

    /// Compares every category of `closed` with the sampled frequencies.
    /// Categories that were sampled but have no closed-form entry are
    /// reported with an expected probability of zero.
    pub fn compare(&self, closed: &HeraldedOutcomeDistribution) -> Vec<CategoryComparison> {
        let mut labels: Vec<HeraldLabel> = closed.outcomes.iter().map(|o| o.label).collect();
        for label in self.counts.keys() {
            if !labels.contains(label) {
                labels.push(*label);
            }
        }
        let n = self.trials as f64;
        labels
            .into_iter()
            .map(|label| {
                let expected = closed.probability(label);
                let observed = self.frequency(label);
                // A category with p·n well below one still gets a σ of one count.
                let sigma = (expected * (1.0 - expected) / n).sqrt().max(1.0 / n);
                let diff = (observed - expected).abs();
                CategoryComparison {
                    label,
                    expected,
                    observed,
                    sigma,
                    z: if diff == 0.0 { 0.0 } else { diff / sigma },
                }
            })
            .collect()
    }
}

/// Samples `trials` RUS histories. Deterministic in `seed`.
pub fn mc_rus_oracle(
    cycle: &CycleOutcomeDistribution,
    caps: &AttemptCaps,
    gate: RusGate,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    caps.validate()?;
    if trials < 1 {
        return Err(invalid("trials", "must be at least 1"));
    }
    if (cycle.total() - 1.0).abs() > 1e-9 {
        return Err(invalid("cycle", format!("probabilities sum to {}", cycle.total())));
    }
    let per_stream = trials / STREAMS;
    let extra = trials % STREAMS;
    let counts = (0..STREAMS)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let n = per_stream + u64::from(stream < extra);
            let mut local: BTreeMap<HeraldLabel, u64> = BTreeMap::new();
            for _ in 0..n {
                *local.entry(run_history(&mut rng, cycle, caps.n_rus, gate)).or_insert(0) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(EmpiricalDistribution { trials, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{cycle_outcome_distribution, derive_noise_params, heralded_cz_distribution};

    #[test]
    fn noiseless_cz_only_success_or_abort() {
        let c = cycle_outcome_distribution(0.0, 0.0).unwrap();
        let caps = AttemptCaps::default();
        let emp = mc_rus_oracle(&c, &caps, RusGate::Cz, 200_000, 3).unwrap();
        assert_eq!(emp.counts.len(), 2);
        let closed = heralded_cz_distribution(&derive_noise_params(0.0, None).unwrap(), &caps).unwrap();
        for row in emp.compare(&closed) {
            assert!(row.z < 5.0, "{row:?}");
        }
    }

    #[test]
    fn same_seed_same_counts() {
        let c = cycle_outcome_distribution(0.05, 0.01).unwrap();
        let caps = AttemptCaps::default();
        let a = mc_rus_oracle(&c, &caps, RusGate::Mzz, 10_001, 42).unwrap();
        let b = mc_rus_oracle(&c, &caps, RusGate::Mzz, 10_001, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.values().sum::<u64>(), 10_001);
        let c2 = mc_rus_oracle(&c, &caps, RusGate::Mzz, 10_001, 43).unwrap();
        assert_ne!(a, c2);
    }

    #[test]
    fn serial_run_of_the_streams_matches() {
        let c = cycle_outcome_distribution(0.1, 0.0).unwrap();
        let caps = AttemptCaps::default();
        let parallel = mc_rus_oracle(&c, &caps, RusGate::Cz, 1000, 9).unwrap();
        let mut serial: BTreeMap<HeraldLabel, u64> = BTreeMap::new();
        for stream in 0..STREAMS {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            rng.set_stream(stream);
            let n = 1000 / STREAMS + u64::from(stream < 1000 % STREAMS);
            for _ in 0..n {
                *serial.entry(run_history(&mut rng, &c, caps.n_rus, RusGate::Cz)).or_insert(0) += 1;
            }
        }
        assert_eq!(parallel.counts, serial);
    }

    #[test]
    fn rejects_zero_trials() {
        let c = cycle_outcome_distribution(0.0, 0.0).unwrap();
        assert!(mc_rus_oracle(&c, &AttemptCaps::default(), RusGate::Cz, 0, 0).is_err());
    }
}
