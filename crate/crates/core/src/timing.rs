//! Physical operation times and the logical clock.

use crate::error::{invalid, Result};

/// Operation times in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingModel {
    pub single_qubit_ns: f64,
    pub rus_cycle_ns: f64,
    pub init_ns: f64,
    pub measure_ns: f64,
    pub rus_gate_ns: f64,
    pub syndrome_round_ns: f64,
    pub reaction_us: f64,
}

impl Default for TimingModel {
    fn default() -> Self {
        Self::new(5.0, 30.0, 305.0, 10.0, 10, 5, 5)
    }
}

impl TimingModel {
    /// Derives init, measure and RUS gate times from the cycle time and
    /// attempt caps.
    pub fn new(
        single_qubit_ns: f64,
        rus_cycle_ns: f64,
        syndrome_round_ns: f64,
        reaction_us: f64,
        n_rus: u32,
        n_init: u32,
        n_measure: u32,
    ) -> Self {
        Self {
            single_qubit_ns,
            rus_cycle_ns,
            init_ns: n_init as f64 * rus_cycle_ns,
            measure_ns: n_measure as f64 * rus_cycle_ns,
            rus_gate_ns: n_rus as f64 * rus_cycle_ns,
            syndrome_round_ns,
            reaction_us,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("timing.single_qubit_ns", self.single_qubit_ns),
            ("timing.rus_cycle_ns", self.rus_cycle_ns),
            ("timing.syndrome_round_ns", self.syndrome_round_ns),
            ("timing.reaction_us", self.reaction_us),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("{v} must be positive")));
            }
        }
        Ok(())
    }

    /// Reaction time expressed in whole syndrome rounds.
    pub fn reaction_rounds(&self) -> u32 {
        (self.reaction_us * 1e3 / self.syndrome_round_ns).round() as u32
    }

    /// Duration of one logical timestep in nanoseconds.
    pub fn logical_cycle_ns(&self, rounds_per_cycle: u32) -> Result<f64> {
        if rounds_per_cycle < 1 {
            return Err(invalid("rounds_per_cycle", "must be at least 1"));
        }
        Ok(rounds_per_cycle as f64 * self.syndrome_round_ns)
    }

    /// τ_r / t_l, with τ_r rounded to syndrome rounds first.
    pub fn reaction_ratio(&self, rounds_per_cycle: u32) -> Result<f64> {
        if rounds_per_cycle < 1 {
            return Err(invalid("rounds_per_cycle", "must be at least 1"));
        }
        Ok(self.reaction_rounds() as f64 / rounds_per_cycle as f64)
    }
}
