//! Browser bindings for the estimator. Every export returns plain strings or
//! numbers so the same functions run natively in tests.

use std::fmt::Write;

use honeycomb_re::config::{Config, EstimateInputs};
use honeycomb_re::noise::{derive_noise_params, heralded_cz_distribution, heralded_mzz_distribution, AttemptCaps, HeraldLabel};
use honeycomb_re::pipeline::solve_estimate;
use honeycomb_re::surgery::{
    bundled_error_data, extrapolate_error, fit_error_curve, ladder_widths, patch_geometry, read_error_data,
};
use wasm_bindgen::prelude::*;

/// Columns of one row of [`heralded_curve`].
pub const CURVE_COLUMNS: usize = 6;

/// Heralded outcome probabilities against the noise intensity `p`, for
/// `points` values spread evenly over `(0, p_max]`. Rows are flattened as
/// `p, cz_pure, cz_lossy, cz_failure, cz_abort, mzz_abort`. Empty on bad input.
#[wasm_bindgen]
pub fn heralded_curve(n_rus: u32, p_max: f64, points: u32) -> Vec<f64> {
    let Ok(caps) = AttemptCaps::new(n_rus, 5, 5) else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(points as usize * CURVE_COLUMNS);
    for i in 1..=points {
        let p = p_max * i as f64 / points as f64;
        let Ok(params) = derive_noise_params(p, None) else {
            return Vec::new();
        };
        let (Ok(cz), Ok(mzz)) = (heralded_cz_distribution(&params, &caps), heralded_mzz_distribution(&params, &caps))
        else {
            return Vec::new();
        };
        out.extend([
            p,
            cz.probability(HeraldLabel::PureSuccess),
            cz.lossy_success_total(),
            cz.probability(HeraldLabel::Failure),
            cz.probability(HeraldLabel::Abort),
            mzz.probability(HeraldLabel::Abort),
        ]);
    }
    out
}

/// The bundled simulation points as CSV, to prefill the editor.
#[wasm_bindgen]
pub fn bundled_error_csv() -> String {
    let mut s = String::from("width,height,rounds,qubits,ehv,ehv_stddev\n");
    for p in bundled_error_data() {
        let g = p.geometry;
        let _ = writeln!(s, "{},{},{},{},{:e},{:e}", g.width, g.height, g.rounds, g.qubits, p.e_hv, p.sigma);
    }
    s
}

/// Fits the error curve to `csv` and renders the extrapolated ladder.
#[wasm_bindgen]
pub fn fit_ladder(csv: &str) -> String {
    let run = || -> honeycomb_re::Result<String> {
        let fit = fit_error_curve(&read_error_data(csv.as_bytes())?)?;
        let mut s = format!("a = {:.5}\nb = {:.5}\n\n    w     h  rounds  qubits        E_hv\n", fit.a, fit.b);
        for w in ladder_widths() {
            let g = patch_geometry(w)?;
            let _ = writeln!(
                s,
                "{:>5} {:>5} {:>7} {:>7} {:>11.3e}",
                g.width,
                g.height,
                g.rounds,
                g.qubits,
                extrapolate_error(&fit, w)?
            );
        }
        Ok(s)
    };
    run().unwrap_or_else(|e| format!("error: {e}"))
}

/// Runs the full estimate for `key = value` configuration text.
#[wasm_bindgen]
pub fn estimate(config: &str) -> String {
    let run = || -> honeycomb_re::Result<String> {
        let i = EstimateInputs::from_config(&Config::parse(config)?)?;
        let report = solve_estimate(&i.spec, &i.noise, &i.caps, &i.budget, &i.options)?;
        Ok(report.to_string())
    };
    run().unwrap_or_else(|e| format!("error: {e}"))
}
