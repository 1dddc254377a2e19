//! Trotter step count and the per-step cost ledger of the plaquette
//! decomposition on the biplanar layout.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use crate::error::{invalid, Result};
use crate::synthesis::RotationCost;

/// Fermi-Hubbard instance on an `L × L` periodic lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub l: u32,
    pub u_over_t: f64,
    /// Dimensionless total simulation time `T_sim·t`.
    pub sim_time_t: f64,
    /// Width of the factory aisles in patches.
    pub w_msf: u32,
}

impl ProblemSpec {
    /// `T_sim·t = sim_time_multiple · L`.
    pub fn new(l: u32, u_over_t: f64, sim_time_multiple: f64, w_msf: u32) -> Result<Self> {
        let spec = Self {
            l,
            u_over_t,
            sim_time_t: sim_time_multiple * l as f64,
            w_msf,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_even_l(self.l)?;
        if !(self.u_over_t > 0.0 && self.u_over_t.is_finite()) {
            return Err(invalid("problem.u_over_t", format!("{} must be positive", self.u_over_t)));
        }
        if !(self.sim_time_t > 0.0 && self.sim_time_t.is_finite()) {
            return Err(invalid("problem.sim_time", format!("{} must be positive", self.sim_time_t)));
        }
        if self.w_msf < 1 {
            return Err(invalid("problem.w_msf", "must be at least 1"));
        }
        Ok(())
    }
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self::new(8, 8.0, 10.0, 2).expect("default problem is valid")
    }
}

pub(crate) fn check_even_l(l: u32) -> Result<()> {
    if l < 2 || l % 2 == 1 {
        return Err(invalid("L", format!("{l} must be even and at least 2")));
    }
    Ok(())
}

/// Additive fault-tolerant cost record.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostLedger {
    pub t_states: f64,
    pub logical_timesteps: f64,
    pub active_cubes: f64,
    pub transversal_cnots: f64,
}

impl CostLedger {
    pub fn merge(self, other: CostLedger) -> CostLedger {
        self + other
    }

    pub fn is_nonnegative(&self) -> bool {
        self.t_states >= 0.0 && self.logical_timesteps >= 0.0 && self.active_cubes >= 0.0 && self.transversal_cnots >= 0.0
    }
}

impl Add for CostLedger {
    type Output = CostLedger;

    fn add(self, o: CostLedger) -> CostLedger {
        CostLedger {
            t_states: self.t_states + o.t_states,
            logical_timesteps: self.logical_timesteps + o.logical_timesteps,
            active_cubes: self.active_cubes + o.active_cubes,
            transversal_cnots: self.transversal_cnots + o.transversal_cnots,
        }
    }
}

impl AddAssign for CostLedger {
    fn add_assign(&mut self, o: CostLedger) {
        *self = *self + o;
    }
}

impl Sum for CostLedger {
    fn sum<I: Iterator<Item = CostLedger>>(iter: I) -> Self {
        iter.fold(CostLedger::default(), Add::add)
    }
}

impl From<RotationCost> for CostLedger {
    fn from(r: RotationCost) -> Self {
        CostLedger {
            t_states: r.t_states,
            logical_timesteps: r.logical_timesteps,
            active_cubes: r.active_cubes,
            transversal_cnots: r.transversal_cnots,
        }
    }
}

/// `L²` rotations in parallel: costs scale by `L²`, depth counts once.
fn parallel_rotations(l: u32, rot: &RotationCost) -> CostLedger {
    let n = (l * l) as f64;
    CostLedger {
        t_states: n * rot.t_states,
        logical_timesteps: rot.logical_timesteps,
        active_cubes: n * rot.active_cubes,
        transversal_cnots: n * rot.transversal_cnots,
    }
}

/// Commutator-bound prefactor of the second-order plaquette Trotter error.
pub fn kappa(u_over_t: f64) -> f64 {
    (1.5 * u_over_t * u_over_t + 2.0 * u_over_t * (2.0 * 5f64.sqrt() + 16.0) + 10.0) / 24.0
}

/// Smallest step count meeting `eps_alg`; never less than one.
pub fn trotter_steps(spec: &ProblemSpec, eps_alg: f64) -> Result<u64> {
    spec.validate()?;
    if !(eps_alg > 0.0 && eps_alg.is_finite()) {
        return Err(invalid("eps_alg", format!("{eps_alg} must be positive")));
    }
    let r = kappa(spec.u_over_t).sqrt() * spec.l as f64 * spec.sim_time_t.powf(1.5) / eps_alg.sqrt();
    Ok((r.ceil() as u64).max(1))
}

/// Cost of one plaquette diagonalization circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalizationCost {
    pub t_states: f64,
    pub logical_timesteps: f64,
    pub active_cubes: f64,
}

pub const PINK_DIAGONALIZATION: DiagonalizationCost = DiagonalizationCost {
    t_states: 8.0,
    logical_timesteps: 18.0,
    active_cubes: 205.0,
};

/// Golden diagonalization timesteps; its cubes follow [`golden_diagonalization_cubes`].
pub const GOLDEN_DIAGONALIZATION_TIMESTEPS: f64 = 54.0;
pub const GOLDEN_T_PER_PLAQUETTE: f64 = 8.0;

/// Interaction sub-evolution: transversal CNOTs between the planes around a
/// layer of `L²` rotations.
pub fn interaction_cost(l: u32, rotation: &RotationCost) -> Result<CostLedger> {
    if l < 1 {
        return Err(invalid("L", "must be at least 1"));
    }
    let mut ledger = parallel_rotations(l, rotation);
    ledger.transversal_cnots += 2.0 * (l * l) as f64;
    Ok(ledger)
}

/// One pink half-step: `L²/2` plaquettes diagonalized in parallel, then `L²`
/// rotations.
pub fn pink_cost(l: u32, rotation: &RotationCost) -> Result<CostLedger> {
    check_even_l(l)?;
    let plaquettes = (l * l / 2) as f64;
    let diag = CostLedger {
        t_states: plaquettes * PINK_DIAGONALIZATION.t_states,
        logical_timesteps: PINK_DIAGONALIZATION.logical_timesteps,
        active_cubes: plaquettes * PINK_DIAGONALIZATION.active_cubes,
        transversal_cnots: 0.0,
    };
    Ok(diag + parallel_rotations(l, rotation))
}

/// Active cubes of the full golden diagonalization including the periodic
/// boundary corridors.
pub fn golden_diagonalization_cubes(l: u32, w_msf: u32) -> Result<f64> {
    check_even_l(l)?;
    if w_msf < 1 {
        return Err(invalid("w_msf", "must be at least 1"));
    }
    let l = l as f64;
    let w = w_msf as f64;
    let half = l / 2.0 - 1.0;
    Ok(4.0
        * (210.5 * l * l / 4.0
            + 0.75 * l * l * (w - 1.0)
            + (104.0 + 6.0 * w) * half * half
            + (85.0 + 12.0 * w) * half
            + 6.0 * w))
}

pub fn golden_cost(l: u32, w_msf: u32, rotation: &RotationCost) -> Result<CostLedger> {
    let cubes = golden_diagonalization_cubes(l, w_msf)?;
    let diag = CostLedger {
        t_states: (l * l / 2) as f64 * GOLDEN_T_PER_PLAQUETTE,
        logical_timesteps: GOLDEN_DIAGONALIZATION_TIMESTEPS,
        active_cubes: cubes,
        transversal_cnots: 0.0,
    };
    Ok(diag + parallel_rotations(l, rotation))
}

/// Per-step ledger split by sub-evolution, in execution order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBreakdown {
    pub interaction: CostLedger,
    pub pink_first: CostLedger,
    pub golden: CostLedger,
    pub pink_second: CostLedger,
}

impl StepBreakdown {
    pub fn total(&self) -> CostLedger {
        [self.interaction, self.pink_first, self.golden, self.pink_second].into_iter().sum()
    }
}

pub fn trotter_step_breakdown(spec: &ProblemSpec, rotation: &RotationCost) -> Result<StepBreakdown> {
    spec.validate()?;
    let pink = pink_cost(spec.l, rotation)?;
    Ok(StepBreakdown {
        interaction: interaction_cost(spec.l, rotation)?,
        pink_first: pink,
        golden: golden_cost(spec.l, spec.w_msf, rotation)?,
        pink_second: pink,
    })
}

pub fn trotter_step_cost(spec: &ProblemSpec, rotation: &RotationCost) -> Result<CostLedger> {
    Ok(trotter_step_breakdown(spec, rotation)?.total())
}

/// Timesteps per step of the single-plane compilation without transversal
/// gates, used only as a comparison point.
pub fn single_plane_timesteps(t_synth: f64) -> f64 {
    6.0 * t_synth + 354.0
}
