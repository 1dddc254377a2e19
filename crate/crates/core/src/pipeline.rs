//! Error budget, floorplan, factory sizing and the self-consistent estimate.

use std::fmt;
use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::noise::{AttemptCaps, PhysicalNoiseParams};
use crate::surgery::{bundled_error_data, bundled_msf_table, fit_error_curve, select_distance, FitParams, MsfProtocol, PatchGeometry};
use crate::synthesis::{
    direct_plan, fallback_plan_with, synthesis_cost, CostKind, CountMode, Rounding, RotationCost, SynthesisPlan,
    SynthesisStrategy,
};
use crate::timing::TimingModel;
use crate::trotter::{check_even_l, single_plane_timesteps, trotter_step_cost, trotter_steps, CostLedger, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    pub total_diamond: f64,
    pub eps_alg: f64,
    pub eps_rot: f64,
    pub eps_log: f64,
    pub eps_msf: f64,
}

impl ErrorBudget {
    /// `2·eps_alg + eps_rot + eps_log + eps_msf`.
    pub fn spent(&self) -> f64 {
        2.0 * self.eps_alg + self.eps_rot + self.eps_log + self.eps_msf
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetPolicy {
    /// Half to the algorithm and rotations with `eps_rot = rot_fraction·eps_alg`,
    /// half split evenly between logical errors and magic states.
    Split { rot_fraction: f64 },
}

impl Default for BudgetPolicy {
    fn default() -> Self {
        BudgetPolicy::Split { rot_fraction: 0.01 }
    }
}

pub fn allocate_budget(total: f64, policy: BudgetPolicy) -> Result<ErrorBudget> {
    if !(0.0..1.0).contains(&total) {
        return Err(invalid("budget.total", format!("{total} outside [0, 1)")));
    }
    let BudgetPolicy::Split { rot_fraction } = policy;
    if !(rot_fraction >= 0.0 && rot_fraction.is_finite()) {
        return Err(invalid("budget.rot_fraction", "must be non-negative"));
    }
    let eps_alg = total / 2.0 / (2.0 + rot_fraction);
    Ok(ErrorBudget {
        total_diamond: total,
        eps_alg,
        eps_rot: rot_fraction * eps_alg,
        eps_log: total / 4.0,
        eps_msf: total / 4.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloorplanCounts {
    pub total_patches: u64,
    pub msf_patches: u64,
    pub data_workspace_patches: u64,
}

impl FloorplanCounts {
    pub fn new(total_patches: u64, msf_patches: u64) -> Result<Self> {
        if msf_patches > total_patches {
            return Err(invalid("floorplan", "factory patches exceed total patches"));
        }
        Ok(Self {
            total_patches,
            msf_patches,
            data_workspace_patches: total_patches - msf_patches,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Data,
    Workspace,
    Factory,
}

impl Cell {
    fn glyph(self) -> char {
        match self {
            Cell::Data => 'D',
            Cell::Workspace => '.',
            Cell::Factory => 'M',
        }
    }
}

/// Patch grid of one plane. Each block of `5 × 3` patches holds the six
/// qubits (four sites and two auxiliaries) of a `2 × 2` cell of the lattice,
/// with workspace around them; blocks are separated by factory aisles of
/// width `w_msf`, and an extra workspace row and column close the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneLayout {
    pub rows: usize,
    pub cols: usize,
    cells: Vec<Cell>,
}

impl PlaneLayout {
    pub fn generate(l: u32, w_msf: u32) -> Result<Self> {
        check_even_l(l)?;
        if w_msf < 1 {
            return Err(invalid("w_msf", "must be at least 1"));
        }
        let blocks = (l / 2) as usize;
        let w = w_msf as usize;
        let rows = 5 * blocks + 1;
        let mut col_kinds: Vec<Option<usize>> = vec![None];
        for _ in 0..blocks {
            col_kinds.extend([Some(1), Some(2), Some(0)]);
            col_kinds.extend(std::iter::repeat_n(Some(usize::MAX), w));
        }
        let cols = col_kinds.len();
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let row_in_block = if r == 0 { 0 } else { (r - 1) % 5 + 1 };
            for kind in &col_kinds {
                let cell = match kind {
                    Some(usize::MAX) => Cell::Factory,
                    Some(c) if (1..=2).contains(c) && (1..=3).contains(&row_in_block) => Cell::Data,
                    _ => Cell::Workspace,
                };
                cells.push(cell);
            }
        }
        Ok(Self { rows, cols, cells })
    }

    pub fn count(&self, kind: Cell) -> usize {
        self.cells.iter().filter(|&&c| c == kind).count()
    }

    pub fn render(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            s.extend(self.cells[r * self.cols..(r + 1) * self.cols].iter().map(|c| c.glyph()));
            s.push('\n');
        }
        s
    }
}

/// Patch counts of both planes.
pub fn floorplan(l: u32, w_msf: u32) -> Result<FloorplanCounts> {
    let plane = PlaneLayout::generate(l, w_msf)?;
    FloorplanCounts::new(2 * (plane.rows * plane.cols) as u64, 2 * plane.count(Cell::Factory) as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsfSizing {
    pub protocol: MsfProtocol,
    pub p_msf_target: f64,
    /// Peak T-state demand per syndrome round.
    pub demand_per_round: f64,
    pub factories: u64,
    pub qubits: f64,
}

/// Picks the cheapest protocol meeting the per-state target and enough copies
/// to feed `L²` parallel injections every `rounds_per_cycle + reaction_rounds`.
pub fn msf_sizing(
    n_t_total: f64,
    eps_msf: f64,
    l: u32,
    rounds_per_cycle: u32,
    reaction_rounds: u32,
    table: &[MsfProtocol],
) -> Result<MsfSizing> {
    let target = if n_t_total > 0.0 { eps_msf / n_t_total } else { f64::INFINITY };
    let protocol = table
        .iter()
        .filter(|p| p.p_out < target)
        .min_by(|a, b| a.hh_qubits.total_cmp(&b.hh_qubits))
        .cloned()
        .ok_or(Error::NoProtocol { target })?;
    let window = (rounds_per_cycle + reaction_rounds) as f64;
    let demand = if window > 0.0 { (l * l) as f64 / window } else { 0.0 };
    let factories = (demand * protocol.hh_rounds).ceil() as u64;
    Ok(MsfSizing {
        p_msf_target: target,
        demand_per_round: demand,
        factories,
        qubits: factories as f64 * protocol.hh_qubits,
        protocol,
    })
}

/// Seconds.
pub fn runtime(r: f64, timesteps_per_step: f64, logical_cycle_s: f64) -> f64 {
    r * timesteps_per_step * logical_cycle_s
}

/// Qubits in the factory aisles over qubits the factories need.
pub fn corridor_capacity_check(floorplan: &FloorplanCounts, geometry: &PatchGeometry, msf_qubits_required: f64) -> f64 {
    let available = floorplan.msf_patches as f64 * geometry.qubits as f64;
    if msf_qubits_required == 0.0 {
        f64::INFINITY
    } else {
        available / msf_qubits_required
    }
}

/// Everything besides the problem and the budget that the solver needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub strategy: SynthesisStrategy,
    pub count_mode: CountMode,
    pub p_succ: f64,
    pub rounding: Rounding,
    pub timing: TimingModel,
    pub fit: FitParams,
    pub msf_table: Vec<MsfProtocol>,
    pub floorplan_override: Option<FloorplanCounts>,
    pub max_iterations: usize,
    /// Starting rounds per logical cycle; chosen from the problem when `None`.
    pub initial_rounds: Option<u32>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            strategy: SynthesisStrategy::MixedFallback,
            count_mode: CountMode::Worst,
            p_succ: 0.99,
            rounding: Rounding::Integer,
            timing: TimingModel::default(),
            fit: fit_error_curve(&bundled_error_data()).expect("bundled data fits"),
            msf_table: bundled_msf_table(),
            floorplan_override: None,
            max_iterations: 10,
            initial_rounds: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub trotter_steps: u64,
    pub eps_synth: f64,
    pub plan: SynthesisPlan,
    pub rotation: RotationCost,
    pub step: CostLedger,
    pub n_l_total: f64,
    pub n_t_total: f64,
    pub p_l_target: f64,
    pub geometry: PatchGeometry,
    pub logical_cycle_ns: f64,
    pub floorplan: FloorplanCounts,
    pub physical_qubits: f64,
    pub msf: MsfSizing,
    pub msf_qubits_available: f64,
    pub runtime_seconds: f64,
    pub single_plane_timesteps: f64,
    pub single_plane_runtime_seconds: f64,
    pub iterations: usize,
    pub width_trace: Vec<u32>,
}

/// Machine-readable report keys in output order.
pub const REPORT_KEYS: [&str; 23] = [
    "trotter_steps",
    "eps_synth",
    "n_t_per_rotation",
    "n_t_fallback",
    "t_synth_timesteps",
    "timesteps_per_step",
    "cubes_per_step",
    "transversal_cnots_per_step",
    "n_l_total",
    "n_t_total",
    "p_l_target",
    "p_msf_target",
    "code_width",
    "code_height",
    "rounds_per_cycle",
    "logical_cycle_ns",
    "total_patches",
    "msf_patches",
    "physical_qubits",
    "msf_factories",
    "msf_qubits_required",
    "runtime_seconds",
    "iterations",
];

impl EstimateReport {
    pub fn corridor_ratio(&self) -> f64 {
        corridor_capacity_check(&self.floorplan, &self.geometry, self.msf.qubits)
    }

    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        let values = [
            self.trotter_steps.to_string(),
            format!("{:e}", self.eps_synth),
            self.plan.n_t.to_string(),
            self.plan.n_t_fallback.to_string(),
            self.rotation.logical_timesteps.to_string(),
            self.step.logical_timesteps.to_string(),
            self.step.active_cubes.to_string(),
            self.step.transversal_cnots.to_string(),
            format!("{:e}", self.n_l_total),
            format!("{:e}", self.n_t_total),
            format!("{:e}", self.p_l_target),
            format!("{:e}", self.msf.p_msf_target),
            self.geometry.width.to_string(),
            self.geometry.height.to_string(),
            self.geometry.rounds.to_string(),
            self.logical_cycle_ns.to_string(),
            self.floorplan.total_patches.to_string(),
            self.floorplan.msf_patches.to_string(),
            self.physical_qubits.to_string(),
            self.msf.factories.to_string(),
            self.msf.qubits.to_string(),
            self.runtime_seconds.to_string(),
            self.iterations.to_string(),
        ];
        REPORT_KEYS.iter().copied().zip(values).collect()
    }

    pub fn write_key_values<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (k, v) in self.key_values() {
            writeln!(out, "{k} = {v}")?;
        }
        Ok(())
    }
}

fn hms(seconds: f64) -> String {
    let total = seconds.round() as u64;
    format!("{}h {:02}m {:02}s", total / 3600, total % 3600 / 60, total % 60)
}

impl fmt::Display for EstimateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<(&str, String)> = vec![
            ("Trotter steps r", self.trotter_steps.to_string()),
            ("eps_synth", format!("{:.3e}", self.eps_synth)),
            ("T per rotation (fallback T)", format!("{} ({})", self.plan.n_t, self.plan.n_t_fallback)),
            ("p_all / p~_fail", format!("{:.4} / {:.4}", self.plan.p_all, self.plan.ptilde_fail)),
            ("t_synth (cubes/rotation)", format!("{} ({})", self.rotation.logical_timesteps, self.rotation.active_cubes)),
            ("timesteps / step", self.step.logical_timesteps.to_string()),
            ("T-states / step", self.step.t_states.to_string()),
            ("active cubes / step", self.step.active_cubes.to_string()),
            ("transversal CNOTs / step", self.step.transversal_cnots.to_string()),
            ("N_L (total cubes)", format!("{:.4e}", self.n_l_total)),
            ("N_T (total T-states)", format!("{:.4e}", self.n_t_total)),
            ("p_l target", format!("{:.4e}", self.p_l_target)),
            ("p_msf target", format!("{:.4e}", self.msf.p_msf_target)),
            (
                "patch (w, h, rounds)",
                format!("({}, {}, {})", self.geometry.width, self.geometry.height, self.geometry.rounds),
            ),
            ("logical cycle", format!("{:.2} us", self.logical_cycle_ns / 1e3)),
            ("patches (factory)", format!("{} ({})", self.floorplan.total_patches, self.floorplan.msf_patches)),
            ("physical qubits", format!("{:.4e}", self.physical_qubits)),
            ("factory protocol", self.msf.protocol.label.clone()),
            (
                "factories x qubits",
                format!("{} x {} = {:.4e}", self.msf.factories, self.msf.protocol.hh_qubits, self.msf.qubits),
            ),
            ("aisle capacity ratio", format!("{:.2}", self.corridor_ratio())),
            ("runtime", format!("{:.4e} s ({})", self.runtime_seconds, hms(self.runtime_seconds))),
            (
                "single-plane comparison",
                format!("{} timesteps/step, {}", self.single_plane_timesteps, hms(self.single_plane_runtime_seconds)),
            ),
            ("iterations (widths)", format!("{} {:?}", self.iterations, self.width_trace)),
        ];
        let pad = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            writeln!(f, "{k:<pad$}  {v}")?;
        }
        Ok(())
    }
}

fn default_initial_rounds(spec: &ProblemSpec) -> u32 {
    if *spec == ProblemSpec::default() {
        102
    } else {
        60
    }
}

struct Iterate {
    geometry: PatchGeometry,
    rotation: RotationCost,
    step: CostLedger,
    n_l: f64,
    p_l: f64,
}

/// Solves for a patch geometry consistent with the logical error it implies.
pub fn solve_estimate(
    spec: &ProblemSpec,
    noise: &PhysicalNoiseParams,
    caps: &AttemptCaps,
    budget: &ErrorBudget,
    options: &SolveOptions,
) -> Result<EstimateReport> {
    spec.validate()?;
    caps.validate()?;
    options.timing.validate()?;
    for (name, v) in [
        ("epsilon", noise.epsilon),
        ("distinguishability", noise.distinguishability),
        ("idle_ratio", noise.idle_ratio),
        ("gate_infidelity", noise.gate_infidelity),
    ] {
        crate::error::check_unit(name, v)?;
    }
    if !(budget.eps_alg > 0.0 && budget.eps_rot > 0.0 && budget.eps_log > 0.0 && budget.eps_msf > 0.0) {
        return Err(invalid("budget", "every share must be positive"));
    }
    if options.max_iterations < 1 {
        return Err(invalid("solver.max_iterations", "must be at least 1"));
    }

    let r = trotter_steps(spec, budget.eps_alg)?;
    let l2 = (spec.l * spec.l) as f64;
    let n_rot = 4.0 * l2 * r as f64;
    let eps_synth = budget.eps_rot / n_rot;
    let (plan, kind) = if options.strategy.has_fallback() {
        let plan = fallback_plan_with(options.strategy, options.count_mode, eps_synth, options.p_succ, spec.l, options.rounding)?;
        (plan, CostKind::Fallback)
    } else {
        (direct_plan(options.strategy, options.count_mode, eps_synth, options.rounding)?, CostKind::Direct)
    };

    let evaluate = |rounds: u32| -> Result<Iterate> {
        let tau = options.timing.reaction_ratio(rounds)?;
        let rotation = synthesis_cost(&plan, kind, tau)?;
        let step = trotter_step_cost(spec, &rotation)?;
        let n_l = step.active_cubes * r as f64;
        let p_l = budget.eps_log / n_l;
        let geometry = select_distance(&options.fit, p_l.min(1.0))?;
        Ok(Iterate { geometry, rotation, step, n_l, p_l })
    };

    let mut rounds = options.initial_rounds.unwrap_or_else(|| default_initial_rounds(spec));
    let mut trace: Vec<u32> = Vec::new();
    let mut converged: Option<(Iterate, usize)> = None;
    for iteration in 1..=options.max_iterations {
        let it = evaluate(rounds)?;
        trace.push(it.geometry.width);
        if it.geometry.rounds == rounds {
            converged = Some((it, iteration));
            break;
        }
        let n = trace.len();
        if n >= 3 && trace[n - 1] == trace[n - 3] {
            // Two-cycle between widths: settle on the larger one.
            let wide = trace[n - 1].max(trace[n - 2]);
            let geometry = crate::surgery::patch_geometry(wide)?;
            let mut it = evaluate(geometry.rounds)?;
            it.geometry = geometry;
            converged = Some((it, iteration));
            break;
        }
        rounds = it.geometry.rounds;
    }
    let (it, iterations) = converged.ok_or_else(|| Error::Convergence {
        iterations: options.max_iterations,
        trace: trace.clone(),
    })?;

    let geometry = it.geometry;
    let logical_cycle_ns = options.timing.logical_cycle_ns(geometry.rounds)?;
    let n_t_total = it.step.t_states * r as f64;
    let msf = msf_sizing(
        n_t_total,
        budget.eps_msf,
        spec.l,
        geometry.rounds,
        options.timing.reaction_rounds(),
        &options.msf_table,
    )?;
    let floorplan = match options.floorplan_override {
        Some(f) => f,
        None => floorplan(spec.l, spec.w_msf)?,
    };
    let cycle_s = logical_cycle_ns * 1e-9;
    let single_plane = single_plane_timesteps(it.rotation.logical_timesteps);
    Ok(EstimateReport {
        trotter_steps: r,
        eps_synth,
        plan,
        rotation: it.rotation,
        step: it.step,
        n_l_total: it.n_l,
        n_t_total,
        p_l_target: it.p_l,
        geometry,
        logical_cycle_ns,
        physical_qubits: floorplan.total_patches as f64 * geometry.qubits as f64,
        msf_qubits_available: floorplan.msf_patches as f64 * geometry.qubits as f64,
        floorplan,
        msf,
        runtime_seconds: runtime(r as f64, it.step.logical_timesteps, cycle_s),
        single_plane_timesteps: single_plane,
        single_plane_runtime_seconds: runtime(r as f64, single_plane, cycle_s),
        iterations,
        width_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::derive_noise_params;
    use approx::assert_relative_eq;

    fn headline_report() -> EstimateReport {
        let budget = allocate_budget(0.01, BudgetPolicy::default()).unwrap();
        solve_estimate(
            &ProblemSpec::default(),
            &derive_noise_params(0.01, None).unwrap(),
            &AttemptCaps::default(),
            &budget,
            &SolveOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn budget() {
        let b = allocate_budget(0.01, BudgetPolicy::default()).unwrap();
        assert!((b.eps_alg - 0.002488).abs() < 1e-6);
        assert_eq!((b.eps_log, b.eps_msf), (0.0025, 0.0025));
        assert!(b.spent() <= 0.01 + 1e-15);
        let z = allocate_budget(0.0, BudgetPolicy::default()).unwrap();
        assert_eq!(z.spent(), 0.0);
        assert!((allocate_budget(0.02, BudgetPolicy::default()).unwrap().eps_alg - 0.004975).abs() < 1e-6);
        assert!(allocate_budget(1.5, BudgetPolicy::default()).is_err());
    }

    #[test]
    fn floorplan_calibration() {
        let f = floorplan(8, 2).unwrap();
        assert_eq!((f.total_patches, f.msf_patches, f.data_workspace_patches), (882, 336, 546));
        let plane = PlaneLayout::generate(8, 2).unwrap();
        assert_eq!(plane.count(Cell::Data), 96);
        let small = PlaneLayout::generate(4, 2).unwrap();
        assert_eq!((small.rows, small.cols), (11, 11));
        assert_eq!(small.count(Cell::Data), 24);
        assert_eq!(floorplan(4, 2).unwrap().total_patches, 242);
        assert!(floorplan(5, 2).is_err());
        let o = FloorplanCounts::new(1000, 300).unwrap();
        assert_eq!((o.total_patches, o.msf_patches), (1000, 300));
    }

    #[test]
    fn render_shape() {
        let text = PlaneLayout::generate(4, 1).unwrap().render();
        assert_eq!(text.lines().count(), 11);
        assert!(text.lines().all(|l| l.len() == 9));
    }

    #[test]
    fn factory_sizing() {
        let table = bundled_msf_table();
        let s = msf_sizing(4.496e9, 0.0025, 8, 102, 33, &table).unwrap();
        assert!((s.p_msf_target / 5.56e-13 - 1.0).abs() < 0.01);
        assert_eq!(s.protocol.p_out, 3.3e-14);
        assert_eq!(s.factories, 39);
        assert!((s.qubits / 1.59e5 - 1.0).abs() < 0.01);
        assert!(matches!(msf_sizing(1e30, 0.0025, 8, 102, 33, &table), Err(Error::NoProtocol { .. })));
    }

    #[test]
    fn runtimes() {
        assert!((runtime(4.88e5, 474.0, 31.11e-6) / 7.2e3 - 1.0).abs() < 0.01);
        assert_eq!(runtime(0.0, 474.0, 31.11e-6), 0.0);
    }

    #[test]
    fn corridor() {
        let f = FloorplanCounts::new(10, 2).unwrap();
        let g = crate::surgery::patch_geometry(6).unwrap();
        assert_eq!(corridor_capacity_check(&f, &g, 108.0), 1.0);
        assert!(corridor_capacity_check(&f, &g, 0.0).is_infinite());
    }

    #[test]
    fn headline() {
        let rep = headline_report();
        assert_eq!(rep.trotter_steps, 487_814);
        assert_eq!((rep.geometry.width, rep.geometry.height, rep.geometry.rounds), (30, 51, 102));
        assert_eq!(rep.step.logical_timesteps, 474.0);
        assert_eq!(rep.msf.factories, 39);
        assert_eq!(rep.physical_qubits, 1_349_460.0);
        assert_relative_eq!(rep.corridor_ratio(), 336.0 * 1530.0 / 158_730.0, max_relative = 1e-12);
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn report_keys_are_exact() {
        let rep = headline_report();
        let keys: Vec<_> = rep.key_values().into_iter().map(|(k, _)| k).collect();
        assert_eq!(keys, REPORT_KEYS);
        let mut buf = Vec::new();
        rep.write_key_values(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 23);
        assert!(text.contains("msf_factories = 39\n"));
    }

    #[test]
    fn convergence_error() {
        let budget = allocate_budget(0.01, BudgetPolicy::default()).unwrap();
        let opts = SolveOptions {
            max_iterations: 1,
            initial_rounds: Some(18),
            ..SolveOptions::default()
        };
        let err = solve_estimate(
            &ProblemSpec::default(),
            &derive_noise_params(0.01, None).unwrap(),
            &AttemptCaps::default(),
            &budget,
            &opts,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }
}
