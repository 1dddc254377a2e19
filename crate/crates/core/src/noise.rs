//! Physical noise parameters, Pauli channels and the heralded outcome
//! distributions of the repeat-until-success (RUS) entangling gates.
//!
//! Every channel here is Pauli-diagonal, so channels are stored as explicit
//! probability mixtures of Pauli strings rather than super-operator matrices.
//! Composition of two such channels is a convolution over the Pauli group
//! (phases drop out of the super-operator `[P]`).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{check_unit, invalid, Result};

/// Relative weights of the four error mechanisms with respect to the overall
/// noise intensity `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBiases {
    pub loss: f64,
    pub distinguishability: f64,
    pub idle: f64,
    pub gate: f64,
}

impl Default for NoiseBiases {
    fn default() -> Self {
        Self {
            loss: 0.9,
            distinguishability: 0.085,
            idle: 0.01,
            gate: 0.005,
        }
    }
}

/// Physical error parameters derived from a single noise intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalNoiseParams {
    pub p: f64,
    /// Photon-loss probability ε.
    pub epsilon: f64,
    /// Photon distinguishability D.
    pub distinguishability: f64,
    /// RUS cycle time over the spin coherence time, t_c / T₂.
    pub idle_ratio: f64,
    /// Single-qubit depolarizing probability. Not to be confused with the RUS
    /// success probability, see [`CycleOutcomeDistribution::p_success`].
    pub gate_infidelity: f64,
}

/// Scales the biases by `p`. Defaults reproduce ε = 0.9p, D = 0.085p,
/// t_c/T₂ = 0.01p and a gate infidelity of 0.005p.
pub fn derive_noise_params(p: f64, biases: Option<NoiseBiases>) -> Result<PhysicalNoiseParams> {
    check_unit("p", p)?;
    let b = biases.unwrap_or_default();
    for (name, v) in [
        ("biases.loss", b.loss),
        ("biases.distinguishability", b.distinguishability),
        ("biases.idle", b.idle),
        ("biases.gate", b.gate),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(invalid(name, format!("{v} must be a finite non-negative ratio")));
        }
    }
    let params = PhysicalNoiseParams {
        p,
        epsilon: b.loss * p,
        distinguishability: b.distinguishability * p,
        idle_ratio: b.idle * p,
        gate_infidelity: b.gate * p,
    };
    check_unit("epsilon", params.epsilon)?;
    check_unit("distinguishability", params.distinguishability)?;
    check_unit("idle_ratio", params.idle_ratio)?;
    check_unit("gate_infidelity", params.gate_infidelity)?;
    Ok(params)
}

/// Maximum number of attempts for the probabilistic physical operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttemptCaps {
    pub n_rus: u32,
    pub n_init: u32,
    pub n_measure: u32,
}

impl Default for AttemptCaps {
    fn default() -> Self {
        Self {
            n_rus: 10,
            n_init: 5,
            n_measure: 5,
        }
    }
}

impl AttemptCaps {
    pub fn new(n_rus: u32, n_init: u32, n_measure: u32) -> Result<Self> {
        let caps = Self {
            n_rus,
            n_init,
            n_measure,
        };
        caps.validate()?;
        Ok(caps)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n_rus", self.n_rus),
            ("n_init", self.n_init),
            ("n_measure", self.n_measure),
        ] {
            if v < 1 {
                return Err(invalid(name, "attempt caps must be at least 1"));
            }
        }
        Ok(())
    }
}

/// Outcome probabilities of a single RUS cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleOutcomeDistribution {
    pub p_success: f64,
    pub p_repeat_indist: f64,
    pub p_repeat_dist: f64,
    pub p_one_loss: f64,
    pub p_two_loss: f64,
}

impl CycleOutcomeDistribution {
    /// Total repeat probability; distinguishable coincidences also herald a
    /// trackable Z and are repeats.
    pub fn p_repeat(&self) -> f64 {
        self.p_repeat_indist + self.p_repeat_dist
    }

    pub fn total(&self) -> f64 {
        self.p_success + self.p_repeat_indist + self.p_repeat_dist + self.p_one_loss + self.p_two_loss
    }
}

pub fn cycle_outcome_distribution(epsilon: f64, distinguishability: f64) -> Result<CycleOutcomeDistribution> {
    check_unit("epsilon", epsilon)?;
    check_unit("distinguishability", distinguishability)?;
    let transmitted = (1.0 - epsilon) * (1.0 - epsilon);
    Ok(CycleOutcomeDistribution {
        p_success: transmitted / 2.0,
        p_repeat_indist: (2.0 - distinguishability) * transmitted / 4.0,
        p_repeat_dist: distinguishability * transmitted / 4.0,
        p_one_loss: 2.0 * epsilon * (1.0 - epsilon),
        p_two_loss: epsilon * epsilon,
    })
}

/// Single-qubit Pauli operator, phase-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Product up to phase.
    pub fn mul_unsigned(self, other: Pauli) -> Pauli {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => p,
            (a, b) if a == b => I,
            (X, Y) | (Y, X) => Z,
            (Y, Z) | (Z, Y) => X,
            (X, Z) | (Z, X) => Y,
            _ => unreachable!(),
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A probability mixture of Pauli super-operators on one or two qubits, with
/// an optional classical flip of an attached measurement record.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    arity: usize,
    terms: Vec<(Vec<Pauli>, f64)>,
    classical_flip_weight: Option<f64>,
}

impl PauliChannel {
    pub fn identity(arity: usize) -> Self {
        Self {
            arity,
            terms: vec![(vec![Pauli::I; arity], 1.0)],
            classical_flip_weight: None,
        }
    }

    /// Builds a channel from `(label, weight)` pairs such as `("IZ", 0.25)`.
    /// Equal labels are merged; zero weights are kept so that every label
    /// named by the caller stays addressable.
    pub fn from_terms(arity: usize, terms: &[(&str, f64)]) -> Self {
        let mut merged: BTreeMap<Vec<Pauli>, f64> = BTreeMap::new();
        for (label, w) in terms {
            let key: Vec<Pauli> = label
                .chars()
                .map(|c| Pauli::from_char(c).expect("Pauli label must use I, X, Y, Z"))
                .collect();
            assert_eq!(key.len(), arity, "label `{label}` does not match arity {arity}");
            *merged.entry(key).or_insert(0.0) += w;
        }
        Self {
            arity,
            terms: merged.into_iter().collect(),
            classical_flip_weight: None,
        }
    }

    pub fn with_classical_flip(mut self, weight: f64) -> Self {
        self.classical_flip_weight = Some(weight);
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[(Vec<Pauli>, f64)] {
        &self.terms
    }

    pub fn classical_flip_weight(&self) -> Option<f64> {
        self.classical_flip_weight
    }

    /// Weight of a label, zero when absent.
    pub fn weight(&self, label: &str) -> f64 {
        let key: Vec<Pauli> = label.chars().filter_map(Pauli::from_char).collect();
        self.terms
            .iter()
            .filter(|(k, _)| *k == key)
            .map(|(_, w)| *w)
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|(_, w)| w).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        let quantum = (self.total_weight() - 1.0).abs() <= tol && self.terms.iter().all(|(_, w)| *w >= 0.0);
        let classical = self
            .classical_flip_weight
            .is_none_or(|f| (0.0..=1.0).contains(&f));
        quantum && classical
    }

    /// `self ∘ other`: apply `other` first. For Pauli mixtures the order does
    /// not matter, but the name keeps call sites readable.
    pub fn compose(&self, other: &PauliChannel) -> PauliChannel {
        assert_eq!(self.arity, other.arity, "cannot compose channels of different arity");
        let mut merged: BTreeMap<Vec<Pauli>, f64> = BTreeMap::new();
        for (a, wa) in &self.terms {
            for (b, wb) in &other.terms {
                let key: Vec<Pauli> = a.iter().zip(b).map(|(x, y)| x.mul_unsigned(*y)).collect();
                *merged.entry(key).or_insert(0.0) += wa * wb;
            }
        }
        let flip = match (self.classical_flip_weight, other.classical_flip_weight) {
            (None, None) => None,
            (Some(f), None) | (None, Some(f)) => Some(f),
            (Some(f), Some(g)) => Some(f * (1.0 - g) + g * (1.0 - f)),
        };
        PauliChannel {
            arity: self.arity,
            terms: merged.into_iter().collect(),
            classical_flip_weight: flip,
        }
    }
}

impl fmt::Display for PauliChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (label, w) in &self.terms {
            if *w == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let s: String = label.iter().map(|p| p.as_char()).collect();
            write!(f, "{w:.4e}[{s}]")?;
        }
        if let Some(flip) = self.classical_flip_weight {
            write!(f, " ⊗ flip {flip:.4e}")?;
        }
        Ok(())
    }
}

/// Number of one-photon loss events folded into a loss channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossCount {
    Finite(u32),
    Infinite,
}

/// `C_a = ([I] + [Z_a]) / 2` on the first qubit of a pair.
pub fn phase_erasure_first() -> PauliChannel {
    PauliChannel::from_terms(2, &[("II", 0.5), ("ZI", 0.5)])
}

/// k-fold composition of the single-loss heralded channel on a qubit pair.
pub fn loss_channel(k: LossCount) -> Result<PauliChannel> {
    let half_pow = match k {
        LossCount::Finite(0) => return Err(invalid("k", "loss count must be at least 1")),
        LossCount::Finite(k) => 0.5f64.powi(k as i32 + 1),
        LossCount::Infinite => 0.0,
    };
    Ok(PauliChannel::from_terms(
        2,
        &[
            ("II", 0.25 + half_pow),
            ("ZI", 0.25),
            ("IZ", 0.25),
            ("ZZ", 0.25 - half_pow),
        ],
    ))
}

/// Dephasing after idling for `t` with coherence time `t2`.
pub fn idle_channel(t: f64, t2: f64) -> Result<PauliChannel> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("{t} must be non-negative")));
    }
    if !(t2 > 0.0) {
        return Err(invalid("t2", format!("{t2} must be positive")));
    }
    let p_d = -(-t / t2).exp_m1() / 2.0;
    Ok(PauliChannel::from_terms(1, &[("I", 1.0 - p_d), ("Z", p_d)]))
}

pub fn single_qubit_gate_channel(gate_infidelity: f64) -> Result<PauliChannel> {
    check_unit("gate_infidelity", gate_infidelity)?;
    let third = gate_infidelity / 3.0;
    Ok(PauliChannel::from_terms(
        1,
        &[("I", 1.0 - gate_infidelity), ("X", third), ("Y", third), ("Z", third)],
    ))
}

/// Error left by a successful RUS-CZ with partially distinguishable photons.
pub fn distinguishability_cz_channel(distinguishability: f64) -> PauliChannel {
    PauliChannel::from_terms(
        2,
        &[("II", 1.0 - distinguishability / 2.0), ("ZZ", distinguishability / 2.0)],
    )
}

/// Classical record flip after a successful RUS-MZZ with partially
/// distinguishable photons.
pub fn distinguishability_mzz_channel(distinguishability: f64) -> PauliChannel {
    PauliChannel::identity(2).with_classical_flip(distinguishability / 2.0)
}

/// Heralded outcome class of a capped RUS protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HeraldLabel {
    PureSuccess,
    /// CZ success preceded by exactly `k` one-loss cycles.
    SuccessWithLosses(u32),
    /// MZZ success preceded by any loss.
    SuccessWithLoss,
    Failure,
    Abort,
}

impl fmt::Display for HeraldLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeraldLabel::PureSuccess => write!(f, "pure_success"),
            HeraldLabel::SuccessWithLosses(k) => write!(f, "success_with_{k}_losses"),
            HeraldLabel::SuccessWithLoss => write!(f, "success_with_loss"),
            HeraldLabel::Failure => write!(f, "failure"),
            HeraldLabel::Abort => write!(f, "abort"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedOutcome {
    pub label: HeraldLabel,
    pub probability: f64,
    pub channel: PauliChannel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedOutcomeDistribution {
    pub outcomes: Vec<HeraldedOutcome>,
}

impl HeraldedOutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn probability(&self, label: HeraldLabel) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.label == label)
            .map(|o| o.probability)
            .sum()
    }

    /// Sum of every `SuccessWithLosses(k)` entry.
    pub fn lossy_success_total(&self) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| matches!(o.label, HeraldLabel::SuccessWithLosses(_)))
            .map(|o| o.probability)
            .sum()
    }
}

const EXACT_BINOMIAL_LIMIT: u32 = 64;

fn ln_binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

fn binomial_exact(n: u32, k: u32) -> u128 {
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `Σ_{t=1}^{n} C(t−1, k) p1^k pr^(t−1−k)`.
fn lossy_history_weight(n: u32, k: u32, p1: f64, pr: f64) -> f64 {
    if k > 0 && p1 == 0.0 {
        return 0.0;
    }
    (1..=n)
        .filter(|t| *t > k)
        .map(|t| {
            let repeats = t - 1 - k;
            if n <= EXACT_BINOMIAL_LIMIT {
                binomial_exact(t - 1, k) as f64 * p1.powi(k as i32) * pr.powi(repeats as i32)
            } else {
                let mut log = ln_binomial(t - 1, k);
                if k > 0 {
                    log += k as f64 * p1.ln();
                }
                if repeats > 0 {
                    if pr == 0.0 {
                        return 0.0;
                    }
                    log += repeats as f64 * pr.ln();
                }
                log.exp()
            }
        })
        .sum()
}

/// `a (1 − r^n) / (1 − r)` evaluated as a finite geometric sum.
fn geometric(a: f64, r: f64, n: u32) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    a * (1.0 - r.powi(n as i32)) / (1.0 - r)
}

/// Heralded channels and probabilities of a capped RUS-CZ gate.
pub fn heralded_cz_distribution(params: &PhysicalNoiseParams, caps: &AttemptCaps) -> Result<HeraldedOutcomeDistribution> {
    caps.validate()?;
    let cycle = cycle_outcome_distribution(params.epsilon, params.distinguishability)?;
    let n = caps.n_rus;
    let (ps, pr, p1, p2) = (cycle.p_success, cycle.p_repeat(), cycle.p_one_loss, cycle.p_two_loss);
    let dist = distinguishability_cz_channel(params.distinguishability);
    let full_loss = loss_channel(LossCount::Infinite)?;

    let mut outcomes = vec![HeraldedOutcome {
        label: HeraldLabel::PureSuccess,
        probability: geometric(ps, pr, n),
        channel: dist.clone(),
    }];
    // A success consumes one cycle, so at most n − 1 losses precede it.
    for k in 1..n {
        outcomes.push(HeraldedOutcome {
            label: HeraldLabel::SuccessWithLosses(k),
            probability: ps * lossy_history_weight(n, k, p1, pr),
            channel: dist.compose(&loss_channel(LossCount::Finite(k))?),
        });
    }
    let failure = if p2 == 0.0 { 0.0 } else { geometric(p2, pr + p1, n) };
    outcomes.push(HeraldedOutcome {
        label: HeraldLabel::Failure,
        probability: failure,
        channel: full_loss.clone(),
    });
    outcomes.push(HeraldedOutcome {
        label: HeraldLabel::Abort,
        probability: (pr + p1).powi(n as i32),
        channel: full_loss,
    });
    Ok(HeraldedOutcomeDistribution { outcomes })
}

/// Heralded channels and probabilities of a capped RUS-MZZ parity measurement.
pub fn heralded_mzz_distribution(params: &PhysicalNoiseParams, caps: &AttemptCaps) -> Result<HeraldedOutcomeDistribution> {
    caps.validate()?;
    let cycle = cycle_outcome_distribution(params.epsilon, params.distinguishability)?;
    let n = caps.n_rus;
    let (ps, pr) = (cycle.p_success, cycle.p_repeat());
    let dist = distinguishability_mzz_channel(params.distinguishability);

    let q0 = geometric(ps, pr, n);
    let qa = (1.0 - ps).powi(n as i32);
    let qe = (1.0 - qa - q0).max(0.0);
    Ok(HeraldedOutcomeDistribution {
        outcomes: vec![
            HeraldedOutcome {
                label: HeraldLabel::PureSuccess,
                probability: q0,
                channel: dist.clone(),
            },
            HeraldedOutcome {
                label: HeraldLabel::SuccessWithLoss,
                probability: qe,
                channel: phase_erasure_first().compose(&dist),
            },
            HeraldedOutcome {
                label: HeraldLabel::Abort,
                probability: qa,
                channel: phase_erasure_first().with_classical_flip(0.5),
            },
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinOperation {
    Init,
    Measure,
}

/// Success probability of a capped photon-heralded initialization or
/// measurement and the channel applied when every attempt lost its photon.
pub fn init_measure_outcomes(epsilon: f64, attempts: u32, op: SpinOperation) -> Result<(f64, PauliChannel)> {
    check_unit("epsilon", epsilon)?;
    if attempts < 1 {
        return Err(invalid("attempts", "must be at least 1"));
    }
    let success = 1.0 - epsilon.powi(attempts as i32);
    let channel = match op {
        SpinOperation::Init => PauliChannel::from_terms(1, &[("I", 0.25), ("X", 0.25), ("Y", 0.25), ("Z", 0.25)]),
        SpinOperation::Measure => PauliChannel::identity(1).with_classical_flip(0.5),
    };
    Ok((success, channel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn headline_params() -> PhysicalNoiseParams {
        derive_noise_params(0.01, None).unwrap()
    }

    #[test]
    fn default_biases_at_one_percent() {
        let p = headline_params();
        assert_relative_eq!(p.epsilon, 0.009, max_relative = 1e-12);
        assert_relative_eq!(p.distinguishability, 8.5e-4, max_relative = 1e-12);
        assert_relative_eq!(p.idle_ratio, 1e-4, max_relative = 1e-12);
        assert_relative_eq!(p.gate_infidelity, 5e-5, max_relative = 1e-12);
    }

    #[test]
    fn zero_noise_and_scaling() {
        let p = derive_noise_params(0.0, None).unwrap();
        assert_eq!((p.epsilon, p.distinguishability, p.idle_ratio, p.gate_infidelity), (0.0, 0.0, 0.0, 0.0));
        assert_relative_eq!(derive_noise_params(0.02, None).unwrap().epsilon, 0.018, max_relative = 1e-12);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(derive_noise_params(1.0, None).is_err());
        assert!(derive_noise_params(-0.1, None).is_err());
        let big = NoiseBiases {
            loss: 2.0,
            ..NoiseBiases::default()
        };
        assert!(derive_noise_params(0.6, Some(big)).is_err());
        assert!(AttemptCaps::new(0, 5, 5).is_err());
        assert!(cycle_outcome_distribution(1.0, 0.0).is_err());
    }

    #[test]
    fn cycle_noiseless_and_default_point() {
        let c = cycle_outcome_distribution(0.0, 0.0).unwrap();
        assert_eq!(
            (c.p_success, c.p_repeat_indist, c.p_repeat_dist, c.p_one_loss, c.p_two_loss),
            (0.5, 0.5, 0.0, 0.0, 0.0)
        );
        let c = cycle_outcome_distribution(0.009, 8.5e-4).unwrap();
        // (1 - 0.009)^2 / 2 = 0.982081 / 2
        assert_relative_eq!(c.p_success, 0.4910405, max_relative = 1e-12);
        assert_relative_eq!(c.p_one_loss, 0.017838, max_relative = 1e-12);
        assert_relative_eq!(c.p_two_loss, 8.1e-5, max_relative = 1e-12);
        assert!((c.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_total_loss_limit() {
        let c = cycle_outcome_distribution(1.0 - 1e-9, 0.0).unwrap();
        assert!(c.p_two_loss > 1.0 - 1e-8);
    }

    #[test]
    fn loss_channel_rows() {
        let k1 = loss_channel(LossCount::Finite(1)).unwrap();
        assert_eq!([k1.weight("II"), k1.weight("ZI"), k1.weight("IZ"), k1.weight("ZZ")], [0.5, 0.25, 0.25, 0.0]);
        let inf = loss_channel(LossCount::Infinite).unwrap();
        assert_eq!([inf.weight("II"), inf.weight("ZI"), inf.weight("IZ"), inf.weight("ZZ")], [0.25; 4]);
        let k2 = loss_channel(LossCount::Finite(2)).unwrap();
        assert_eq!([k2.weight("II"), k2.weight("ZI"), k2.weight("IZ"), k2.weight("ZZ")], [0.375, 0.25, 0.25, 0.125]);
        assert!(loss_channel(LossCount::Finite(0)).is_err());
    }

    #[test]
    fn loss_channel_composes_one_loss_at_a_time() {
        let one = loss_channel(LossCount::Finite(1)).unwrap();
        let mut acc = one.clone();
        for k in 2..20 {
            acc = acc.compose(&one);
            let direct = loss_channel(LossCount::Finite(k)).unwrap();
            for label in ["II", "ZI", "IZ", "ZZ"] {
                assert!((acc.weight(label) - direct.weight(label)).abs() < 1e-15, "k={k} {label}");
            }
        }
        let big = loss_channel(LossCount::Finite(60)).unwrap();
        assert!((big.weight("II") - 0.25).abs() < 1e-15);
    }

    #[test]
    fn idle_and_gate_channels() {
        let id = idle_channel(0.0, 1.0).unwrap();
        assert_eq!(id.weight("Z"), 0.0);
        let long = idle_channel(1e6, 1.0).unwrap();
        assert_eq!(long.weight("Z"), 0.5);
        let small = idle_channel(1e-4, 1.0).unwrap();
        // (1 - e^{-x}) / 2 ≈ x/2 - x²/4 + x³/12
        let x: f64 = 1e-4;
        assert_relative_eq!(small.weight("Z"), x / 2.0 - x * x / 4.0 + x.powi(3) / 12.0, max_relative = 1e-12);
        assert_relative_eq!(small.weight("Z"), 4.99975e-5, max_relative = 1e-6);
        assert!(idle_channel(1.0, 0.0).is_err());

        assert_eq!(single_qubit_gate_channel(0.0).unwrap().weight("I"), 1.0);
        let g = single_qubit_gate_channel(5e-5).unwrap();
        assert_relative_eq!(g.weight("X"), 5e-5 / 3.0, max_relative = 1e-12);
        let g = single_qubit_gate_channel(0.3).unwrap();
        for (l, w) in [("I", 0.7), ("X", 0.1), ("Y", 0.1), ("Z", 0.1)] {
            assert!((g.weight(l) - w).abs() < 1e-15);
        }
    }

    #[test]
    fn noiseless_heralded_limits_are_exact() {
        let params = derive_noise_params(0.0, None).unwrap();
        let caps = AttemptCaps::default();
        let cz = heralded_cz_distribution(&params, &caps).unwrap();
        assert_eq!(cz.probability(HeraldLabel::PureSuccess), 1.0 - 2f64.powi(-10));
        assert_eq!(cz.probability(HeraldLabel::Abort), 2f64.powi(-10));
        assert_eq!(cz.probability(HeraldLabel::Failure), 0.0);
        assert_eq!(cz.lossy_success_total(), 0.0);
        let mzz = heralded_mzz_distribution(&params, &caps).unwrap();
        assert_eq!(mzz.probability(HeraldLabel::PureSuccess), 1.0 - 2f64.powi(-10));
        assert_eq!(mzz.probability(HeraldLabel::Abort), 2f64.powi(-10));
        assert_eq!(mzz.probability(HeraldLabel::SuccessWithLoss), 0.0);
    }

    #[test]
    fn default_point_cz_values() {
        let cz = heralded_cz_distribution(&headline_params(), &AttemptCaps::default()).unwrap();
        assert!((cz.probability(HeraldLabel::PureSuccess) - 0.9640).abs() < 5e-4);
        assert_relative_eq!(cz.probability(HeraldLabel::Abort), 1.17e-3, max_relative = 0.01);
        assert_relative_eq!(cz.probability(HeraldLabel::Failure), 1.65e-4, max_relative = 0.01);
        assert!((cz.lossy_success_total() - 0.0347).abs() < 5e-4);
        assert!((cz.total() - 1.0).abs() < 1e-12);
        // The last lossy class is k = n_rus − 1.
        assert!(cz.outcomes.iter().any(|o| o.label == HeraldLabel::SuccessWithLosses(9)));
        assert!(!cz.outcomes.iter().any(|o| o.label == HeraldLabel::SuccessWithLosses(10)));
    }

    #[test]
    fn default_point_mzz_abort() {
        let mzz = heralded_mzz_distribution(&headline_params(), &AttemptCaps::default()).unwrap();
        let expected = (1.0f64 - 0.4910405).powi(10);
        assert_relative_eq!(mzz.probability(HeraldLabel::Abort), expected, max_relative = 1e-9);
        assert_relative_eq!(expected, 1.17e-3, max_relative = 0.01);
        assert!((mzz.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn attached_channels() {
        let params = headline_params();
        let cz = heralded_cz_distribution(&params, &AttemptCaps::default()).unwrap();
        for o in &cz.outcomes {
            assert!(o.channel.is_normalized(1e-12), "{}", o.label);
        }
        let fail = &cz.outcomes.iter().find(|o| o.label == HeraldLabel::Failure).unwrap().channel;
        assert_eq!(fail.weight("ZZ"), 0.25);
        let mzz = heralded_mzz_distribution(&params, &AttemptCaps::default()).unwrap();
        let abort = &mzz.outcomes.iter().find(|o| o.label == HeraldLabel::Abort).unwrap().channel;
        assert_eq!(abort.classical_flip_weight(), Some(0.5));
        assert_eq!(abort.weight("ZI"), 0.5);
    }

    #[test]
    fn large_cap_uses_log_space_and_stays_normalized() {
        let params = derive_noise_params(0.05, None).unwrap();
        let caps = AttemptCaps::new(80, 5, 5).unwrap();
        let cz = heralded_cz_distribution(&params, &caps).unwrap();
        assert!((cz.total() - 1.0).abs() < 1e-12);
        assert!(cz.outcomes.iter().all(|o| o.probability >= 0.0));
    }

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial_exact(63, 31), 916312070471295267);
        assert!((ln_binomial(63, 31) - (916312070471295267f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn init_and_measure() {
        let (s, _) = init_measure_outcomes(0.0, 5, SpinOperation::Init).unwrap();
        assert_eq!(s, 1.0);
        let (s, ch) = init_measure_outcomes(0.009, 5, SpinOperation::Init).unwrap();
        assert_relative_eq!(1.0 - s, 0.009f64.powi(5), max_relative = 1e-4);
        assert_relative_eq!(1.0 - s, 5.9e-11, max_relative = 0.01);
        assert_eq!(ch.weight("Y"), 0.25);
        let (s, ch) = init_measure_outcomes(0.5, 5, SpinOperation::Measure).unwrap();
        assert_eq!(s, 1.0 - 1.0 / 32.0);
        assert_eq!(ch.classical_flip_weight(), Some(0.5));
    }
}
