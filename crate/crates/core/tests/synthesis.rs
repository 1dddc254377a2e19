use honeycomb_re::synthesis::{
    direct_plan, fallback_plan, fallback_plan_with, synthesis_cost, t_count, CostKind, CountMode, Rounding,
    SynthesisStrategy,
};
use proptest::prelude::*;

fn strategy() -> impl Strategy<Value = SynthesisStrategy> {
    prop::sample::select(SynthesisStrategy::ALL.to_vec())
}

fn mode() -> impl Strategy<Value = CountMode> {
    prop::sample::select(vec![CountMode::Mean, CountMode::Worst])
}

proptest! {
    #[test]
    fn t_count_grows_with_precision(s in strategy(), m in mode(), e1 in 1.0f64..40.0, de in 0.01f64..10.0) {
        let loose = t_count(s, 2f64.powf(-e1), m).unwrap();
        let tight = t_count(s, 2f64.powf(-(e1 + de)), m).unwrap();
        prop_assert!(tight > loose);
    }

    #[test]
    fn plan_conserves_t_count(eps in 1e-20f64..1e-3, p in 0.5f64..1.0, l in 1u32..16) {
        let plan = fallback_plan(eps, p, l, Rounding::Exact).unwrap();
        prop_assert!((plan.n_t - plan.n_t_success - (1.0 - p) * plan.n_t_fallback).abs() <= 1e-12);
        prop_assert!((plan.ptilde_fail + plan.ptilde_succ - 1.0).abs() <= 1e-15);
        prop_assert!((plan.p_all - p.powi((l * l) as i32)).abs() <= 1e-15);
    }

    #[test]
    fn fallback_timesteps_grow_as_p_all_drops(eps in 1e-18f64..1e-6, tau in 0.0f64..2.0, l in 1u32..12,
                                              p_hi in 0.9f64..1.0, dp in 0.0f64..0.05) {
        // Hold the T counts fixed and vary only the chance that some rotation falls back.
        let base = fallback_plan(eps, 0.99, l, Rounding::Exact).unwrap();
        let at = |p_all: f64| {
            let plan = honeycomb_re::synthesis::SynthesisPlan { p_all, ..base };
            synthesis_cost(&plan, CostKind::Fallback, tau).unwrap().logical_timesteps
        };
        prop_assert!(at(p_hi - dp) >= at(p_hi));
        let n_s = base.n_t_success;
        prop_assert!((at(1.0) - (n_s * (1.0 + tau) + 7.0)).abs() <= 1e-9);
    }

    #[test]
    fn certain_success_drops_the_reject_branch(eps in 1e-18f64..1e-6, tau in 0.0f64..2.0) {
        let plan = fallback_plan(eps, 1.0, 8, Rounding::Exact).unwrap();
        let cost = synthesis_cost(&plan, CostKind::Fallback, tau).unwrap();
        let n_s = plan.n_t_success;
        prop_assert!((cost.active_cubes - (n_s * (6.0 + 1.0 / 3.0 + 4.0 * tau) + 48.0)).abs() <= 1e-9);
    }

    #[test]
    fn injection_rate_bound(s in strategy(), m in mode(), eps in 1e-18f64..1e-2, tau in 0.0f64..3.0) {
        let plan = direct_plan(s, m, eps, Rounding::Exact).unwrap();
        prop_assume!(plan.n_t >= 1.0);
        let cost = synthesis_cost(&plan, CostKind::Direct, tau).unwrap();
        prop_assert!(cost.t_states / cost.logical_timesteps <= 1.0 / (1.0 + tau));
    }

    #[test]
    fn costs_are_nonnegative(s in strategy(), m in mode(), eps in 1e-18f64..1e-6, p in 0.9f64..1.0,
                             l in 1u32..12, tau in 0.0f64..3.0) {
        let plan = fallback_plan_with(s, m, eps, p, l, Rounding::Integer).unwrap();
        let c = synthesis_cost(&plan, CostKind::Fallback, tau).unwrap();
        prop_assert!(c.t_states >= 0.0 && c.logical_timesteps >= 0.0 && c.active_cubes >= 0.0);
    }
}
