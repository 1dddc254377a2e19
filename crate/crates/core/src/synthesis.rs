//! T-count models for single-qubit rotation synthesis and the fault-tolerant
//! cost of one synthesized rotation.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthesisStrategy {
    Diagonal,
    MixedDiagonal,
    Fallback,
    MixedFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountMode {
    Mean,
    Worst,
}

/// `(slope, offset)` of `slope·log₂(1/ε) + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub slope: f64,
    pub offset: f64,
}

impl SynthesisStrategy {
    pub const ALL: [SynthesisStrategy; 4] = [
        SynthesisStrategy::Diagonal,
        SynthesisStrategy::MixedDiagonal,
        SynthesisStrategy::Fallback,
        SynthesisStrategy::MixedFallback,
    ];

    pub fn coefficients(self, mode: CountMode) -> Coefficients {
        let (slope, offset) = match (self, mode) {
            (SynthesisStrategy::Diagonal, CountMode::Mean) => (3.02, 1.77),
            (SynthesisStrategy::Diagonal, CountMode::Worst) => (3.02, 9.19),
            (SynthesisStrategy::MixedDiagonal, CountMode::Mean) => (1.52, -0.01),
            (SynthesisStrategy::MixedDiagonal, CountMode::Worst) => (1.54, 6.85),
            (SynthesisStrategy::Fallback, CountMode::Mean) => (1.03, 5.75),
            (SynthesisStrategy::Fallback, CountMode::Worst) => (1.05, 11.83),
            (SynthesisStrategy::MixedFallback, CountMode::Mean) => (0.53, 4.86),
            (SynthesisStrategy::MixedFallback, CountMode::Worst) => (0.57, 8.83),
        };
        Coefficients { slope, offset }
    }

    pub fn name(self) -> &'static str {
        match self {
            SynthesisStrategy::Diagonal => "diagonal",
            SynthesisStrategy::MixedDiagonal => "mixed_diagonal",
            SynthesisStrategy::Fallback => "fallback",
            SynthesisStrategy::MixedFallback => "mixed_fallback",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Whether the strategy has a probabilistic accept branch.
    pub fn has_fallback(self) -> bool {
        matches!(self, SynthesisStrategy::Fallback | SynthesisStrategy::MixedFallback)
    }

    /// The deterministic strategy used when the accept branch is rejected.
    pub fn fallback_partner(self) -> SynthesisStrategy {
        match self {
            SynthesisStrategy::Fallback => SynthesisStrategy::Diagonal,
            SynthesisStrategy::MixedFallback => SynthesisStrategy::MixedDiagonal,
            other => other,
        }
    }
}

impl CountMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mean" => Some(CountMode::Mean),
            "worst" => Some(CountMode::Worst),
            _ => None,
        }
    }
}

/// Expected T gates per rotation, unrounded.
pub fn t_count(strategy: SynthesisStrategy, epsilon_synth: f64, mode: CountMode) -> Result<f64> {
    if !(epsilon_synth > 0.0 && epsilon_synth < 1.0) {
        return Err(invalid("epsilon_synth", format!("{epsilon_synth} outside (0, 1)")));
    }
    let c = strategy.coefficients(mode);
    Ok(c.slope * (1.0 / epsilon_synth).log2() + c.offset)
}

/// Whether T counts and per-rotation costs are rounded to whole numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rounding {
    Integer,
    Exact,
}

impl Rounding {
    fn apply(self, x: f64) -> f64 {
        match self {
            Rounding::Integer => x.round(),
            Rounding::Exact => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisPlan {
    pub epsilon_synth: f64,
    pub n_t: f64,
    pub n_t_fallback: f64,
    pub n_t_success: f64,
    pub p_succ: f64,
    pub p_all: f64,
    pub ptilde_fail: f64,
    pub ptilde_succ: f64,
    pub rounding: Rounding,
}

/// Plan for `L²` parallel rotations using `strategy` with its deterministic
/// partner as the reject branch.
pub fn fallback_plan_with(
    strategy: SynthesisStrategy,
    mode: CountMode,
    epsilon_synth: f64,
    p_succ: f64,
    l: u32,
    rounding: Rounding,
) -> Result<SynthesisPlan> {
    if !(p_succ > 0.0 && p_succ <= 1.0) {
        return Err(invalid("p_succ", format!("{p_succ} outside (0, 1]")));
    }
    if l < 1 {
        return Err(invalid("L", "must be at least 1"));
    }
    let n_t = rounding.apply(t_count(strategy, epsilon_synth, mode)?);
    let n_t_fallback = rounding.apply(t_count(strategy.fallback_partner(), epsilon_synth, mode)?);
    let n_t_success = rounding.apply(n_t - (1.0 - p_succ) * n_t_fallback);
    let p_all = p_succ.powi((l * l) as i32);
    let ptilde_fail = if p_all < 1.0 { (1.0 - p_succ) / (1.0 - p_all) } else { 0.0 };
    Ok(SynthesisPlan {
        epsilon_synth,
        n_t,
        n_t_fallback,
        n_t_success,
        p_succ,
        p_all,
        ptilde_fail,
        ptilde_succ: 1.0 - ptilde_fail,
        rounding,
    })
}

/// Mixed-fallback plan with worst-case coefficients.
pub fn fallback_plan(epsilon_synth: f64, p_succ: f64, l: u32, rounding: Rounding) -> Result<SynthesisPlan> {
    fallback_plan_with(
        SynthesisStrategy::MixedFallback,
        CountMode::Worst,
        epsilon_synth,
        p_succ,
        l,
        rounding,
    )
}

/// Deterministic plan: every rotation uses `strategy` once.
pub fn direct_plan(
    strategy: SynthesisStrategy,
    mode: CountMode,
    epsilon_synth: f64,
    rounding: Rounding,
) -> Result<SynthesisPlan> {
    let n_t = rounding.apply(t_count(strategy, epsilon_synth, mode)?);
    Ok(SynthesisPlan {
        epsilon_synth,
        n_t,
        n_t_fallback: 0.0,
        n_t_success: n_t,
        p_succ: 1.0,
        p_all: 1.0,
        ptilde_fail: 0.0,
        ptilde_succ: 1.0,
        rounding,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostKind {
    Direct,
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotationCost {
    pub t_states: f64,
    pub logical_timesteps: f64,
    pub active_cubes: f64,
    pub transversal_cnots: f64,
}

const THIRD: f64 = 1.0 / 3.0;

/// Cost of one rotation including reaction-limited T injection.
pub fn synthesis_cost(plan: &SynthesisPlan, kind: CostKind, tau_ratio: f64) -> Result<RotationCost> {
    if !(tau_ratio >= 0.0 && tau_ratio.is_finite()) {
        return Err(invalid("tau_ratio", format!("{tau_ratio} must be non-negative")));
    }
    let direct_steps = |n: f64| n * (1.0 + tau_ratio) + 3.0;
    let direct_cubes = |n: f64| n * (5.0 + THIRD + 3.0 * tau_ratio) + 23.0;
    let (timesteps, cubes) = match kind {
        CostKind::Direct => (direct_steps(plan.n_t), direct_cubes(plan.n_t)),
        CostKind::Fallback => {
            let reject = 1.0 - plan.p_all;
            let n_s = plan.n_t_success;
            let n_f = plan.n_t_fallback;
            let steps = n_s * (1.0 + tau_ratio) + 7.0 + reject * direct_steps(n_f);
            let cubes = n_s * (6.0 + THIRD + 4.0 * tau_ratio)
                + 48.0
                + reject * plan.ptilde_fail * direct_cubes(n_f)
                + reject * plan.ptilde_succ * (n_f * (3.0 + 3.0 * tau_ratio) + 9.0);
            (steps, cubes)
        }
    };
    Ok(RotationCost {
        t_states: plan.n_t,
        logical_timesteps: plan.rounding.apply(timesteps),
        active_cubes: plan.rounding.apply(cubes),
        transversal_cnots: 0.0,
    })
}

/// Smallest `L ≤ max_l` at which direct mixed-diagonal synthesis is no slower
/// than parallel mixed-fallback synthesis; `None` when it never is.
pub fn crossover_l<F>(epsilon_policy: F, p_succ: f64, tau_ratio: f64, rounding: Rounding, max_l: u32) -> Result<Option<u32>>
where
    F: Fn(u32) -> f64,
{
    for l in 1..=max_l {
        let eps = epsilon_policy(l);
        let fb = fallback_plan(eps, p_succ, l, rounding)?;
        let direct = direct_plan(SynthesisStrategy::MixedDiagonal, CountMode::Worst, eps, rounding)?;
        let t_fb = synthesis_cost(&fb, CostKind::Fallback, tau_ratio)?.logical_timesteps;
        let t_direct = synthesis_cost(&direct, CostKind::Direct, tau_ratio)?.logical_timesteps;
        if t_direct <= t_fb {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const EPS: f64 = 1.99e-13;
    const TAU: f64 = 33.0 / 102.0;

    #[test]
    fn t_counts() {
        assert_eq!(t_count(SynthesisStrategy::MixedFallback, EPS, CountMode::Worst).unwrap().round(), 33.0);
        assert_eq!(t_count(SynthesisStrategy::MixedDiagonal, EPS, CountMode::Worst).unwrap().round(), 72.0);
        assert_relative_eq!(
            t_count(SynthesisStrategy::Diagonal, 2f64.powi(-10), CountMode::Mean).unwrap(),
            31.97,
            max_relative = 1e-12
        );
        assert!(t_count(SynthesisStrategy::Diagonal, 0.0, CountMode::Mean).is_err());
        assert!(t_count(SynthesisStrategy::Diagonal, 1.0, CountMode::Mean).is_err());
    }

    #[test]
    fn names_round_trip() {
        for s in SynthesisStrategy::ALL {
            assert_eq!(SynthesisStrategy::parse(s.name()), Some(s));
        }
        assert_eq!(SynthesisStrategy::parse("bogus"), None);
    }

    #[test]
    fn headline_plan() {
        let plan = fallback_plan(EPS, 0.99, 8, Rounding::Integer).unwrap();
        assert_eq!((plan.n_t, plan.n_t_fallback, plan.n_t_success), (33.0, 72.0, 32.0));
        assert!((plan.p_all - 0.5256).abs() < 1e-4);
        assert!((plan.ptilde_fail - 0.0211).abs() < 1e-4);
        let cost = synthesis_cost(&plan, CostKind::Fallback, TAU).unwrap();
        assert_eq!(cost.logical_timesteps, 96.0);
        assert_eq!(cost.active_cubes, 434.0);
        assert_eq!(cost.t_states, 33.0);
        assert_eq!(cost.transversal_cnots, 0.0);
    }

    #[test]
    fn plan_edge_cases() {
        let plan = fallback_plan(EPS, 1.0, 8, Rounding::Exact).unwrap();
        assert_eq!(plan.p_all, 1.0);
        assert_eq!(plan.ptilde_fail, 0.0);
        let plan = fallback_plan(EPS, 0.99, 1, Rounding::Exact).unwrap();
        assert_relative_eq!(plan.p_all, 0.99);
        assert_relative_eq!(plan.ptilde_fail, 1.0, max_relative = 1e-12);
        assert!(fallback_plan(EPS, 0.0, 8, Rounding::Exact).is_err());
        assert!(fallback_plan(EPS, 0.99, 0, Rounding::Exact).is_err());
    }

    #[test]
    fn direct_cost() {
        let plan = direct_plan(SynthesisStrategy::MixedDiagonal, CountMode::Worst, EPS, Rounding::Exact).unwrap();
        let plan = SynthesisPlan { n_t: 72.0, ..plan };
        let cost = synthesis_cost(&plan, CostKind::Direct, TAU).unwrap();
        assert!((cost.logical_timesteps - 98.0).abs() <= 1.0);
        let zero = SynthesisPlan { n_t: 0.0, ..plan };
        let cost = synthesis_cost(&zero, CostKind::Direct, 0.0).unwrap();
        assert_eq!((cost.logical_timesteps, cost.active_cubes), (3.0, 23.0));
        assert!(synthesis_cost(&plan, CostKind::Direct, -1.0).is_err());
    }

    #[test]
    fn crossover() {
        let l = crossover_l(|_| EPS, 0.99, TAU, Rounding::Integer, 64).unwrap();
        assert_eq!(l, Some(9));
        let l = crossover_l(|_| EPS, 0.99, TAU, Rounding::Exact, 64).unwrap();
        assert_eq!(l, Some(9));
        assert_eq!(crossover_l(|_| EPS, 1.0, TAU, Rounding::Exact, 64).unwrap(), None);
        let small = crossover_l(|_| EPS, 0.5, TAU, Rounding::Exact, 64).unwrap().unwrap();
        assert!(small <= 3, "{small}");
    }
}
