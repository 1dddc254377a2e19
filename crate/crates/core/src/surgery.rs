//! Patch geometry, logical error curves, distance selection and magic state
//! factory conversion for honeycomb-code lattice surgery.

use std::io::Read;

use crate::error::{invalid, Error, Result};

/// One lattice-surgery patch: `width × height` qubits kept for `rounds`
/// syndrome rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatchGeometry {
    pub width: u32,
    pub height: u32,
    pub rounds: u32,
    pub qubits: u32,
}

/// (width, height, rounds) of the simulated and extrapolated ladder.
const LADDER: [(u32, u32, u32); 13] = [
    (6, 9, 18),
    (8, 12, 24),
    (10, 18, 36),
    (12, 21, 42),
    (14, 24, 48),
    (16, 27, 54),
    (18, 30, 60),
    (20, 33, 66),
    (22, 36, 72),
    (24, 39, 78),
    (26, 42, 84),
    (28, 48, 96),
    (30, 51, 102),
];

/// Widths available to distance selection, ascending.
pub fn ladder_widths() -> impl Iterator<Item = u32> {
    LADDER.iter().map(|&(w, _, _)| w)
}

pub fn patch_geometry(width: u32) -> Result<PatchGeometry> {
    if width == 0 || width % 2 == 1 {
        return Err(invalid("width", format!("{width} must be even and positive")));
    }
    let (height, rounds) = match LADDER.iter().find(|&&(w, _, _)| w == width) {
        Some(&(_, h, r)) => (h, r),
        None => {
            let height = ((5.0 * width as f64 / 3.0) / 3.0).round() as u32 * 3;
            (height, 2 * height)
        }
    };
    Ok(PatchGeometry {
        width,
        height,
        rounds,
        qubits: width * height,
    })
}

/// Probability that at least one of two independent logical errors occurs.
pub fn combined_error(e_h: f64, e_v: f64) -> f64 {
    e_h + e_v - e_h * e_v
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorDataPoint {
    pub geometry: PatchGeometry,
    pub e_hv: f64,
    pub sigma: f64,
}

/// Parameters of `E(n) = n·exp(a√n − b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub a: f64,
    pub b: f64,
}

impl FitParams {
    pub fn error_at_qubits(&self, n: f64) -> f64 {
        n * (self.a * n.sqrt() - self.b).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitWeighting {
    /// Weights `(e_hv / sigma)²`, the inverse variance of `ln e_hv`.
    RelativeUncertainty,
    Unweighted,
}

pub fn fit_error_curve(points: &[ErrorDataPoint]) -> Result<FitParams> {
    fit_error_curve_with(points, FitWeighting::RelativeUncertainty)
}

/// Weighted linear least squares of `ln(E/n)` against `√n`.
pub fn fit_error_curve_with(points: &[ErrorDataPoint], weighting: FitWeighting) -> Result<FitParams> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        if !(p.e_hv > 0.0 && p.e_hv < 1.0) {
            return Err(Error::Fit(format!("e_hv = {} outside (0, 1)", p.e_hv)));
        }
        if !(p.sigma > 0.0) {
            return Err(Error::Fit(format!("sigma = {} must be positive", p.sigma)));
        }
        let n = p.geometry.qubits as f64;
        let x = n.sqrt();
        let y = (p.e_hv / n).ln();
        let w = match weighting {
            FitWeighting::RelativeUncertainty => (p.e_hv / p.sigma).powi(2),
            FitWeighting::Unweighted => 1.0,
        };
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    // Centered form keeps the determinant well conditioned.
    let xm = sx / sw;
    let ym = sy / sw;
    let sxx_c = sxx - sw * xm * xm;
    let sxy_c = sxy - sw * xm * ym;
    if !(sxx_c.abs() > 1e-12 * sxx.abs().max(1.0)) {
        return Err(Error::Fit("degenerate design: all points share one patch size".into()));
    }
    let a = sxy_c / sxx_c;
    let b = a * xm - ym;
    Ok(FitParams { a, b })
}

pub fn extrapolate_error(fit: &FitParams, width: u32) -> Result<f64> {
    Ok(fit.error_at_qubits(patch_geometry(width)?.qubits as f64))
}

/// Smallest ladder geometry whose fitted error does not exceed `target`.
pub fn select_distance(fit: &FitParams, target: f64) -> Result<PatchGeometry> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(invalid("target_error", format!("{target} outside (0, 1]")));
    }
    let mut best = f64::INFINITY;
    for w in ladder_widths() {
        let e = extrapolate_error(fit, w)?;
        if e <= target {
            return patch_geometry(w);
        }
        best = best.min(e);
    }
    Err(Error::NoDistanceFound { target, best })
}

/// Extra logical error of a transversal CNOT over a four-cube memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnotOverhead {
    pub value: f64,
    /// Set when the raw difference was negative and clamped to zero.
    pub clamped: bool,
}

pub fn transversal_cnot_overhead(e_cnot_plus_4: f64, e_4cube: f64) -> CnotOverhead {
    let diff = e_cnot_plus_4 - e_4cube;
    CnotOverhead {
        value: diff.max(0.0),
        clamped: diff < 0.0,
    }
}

/// Duration of a transversal CNOT in nanoseconds (one depth-3 physical tick).
pub const TRANSVERSAL_CNOT_NS: f64 = 305.0;

/// Honeycomb qubits at width `w` over surface-code qubits at width `w/1.25`.
pub fn msf_qubit_conversion_rate(width: f64) -> f64 {
    let honeycomb = 5.0 * width * width / 3.0;
    let surface = 2.0 * (width / 1.25 + 1.0).powi(2);
    honeycomb / surface
}

pub const MSF_QUBIT_RATE: f64 = 0.52;
pub const MSF_ROUND_RATE: f64 = 4.2;
pub const CULTIVATION_FACTOR: f64 = 5.0;

/// Rounds to `digits` significant figures.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

/// Converts a surface-code factory cost into honeycomb (qubits, rounds).
/// Cultivated qubits are whole, cultivated cycles keep one decimal.
pub fn msf_convert(sc_qubits: f64, sc_cycles: f64, cultivation_factor: f64) -> Result<(f64, f64)> {
    if !(cultivation_factor > 0.0) {
        return Err(invalid("cultivation_factor", "must be positive"));
    }
    if !(sc_qubits >= 0.0 && sc_cycles >= 0.0) {
        return Err(invalid("sc_cost", "qubits and cycles must be non-negative"));
    }
    let cult_qubits = (sc_qubits / cultivation_factor).round();
    let cult_cycles = (sc_cycles / cultivation_factor * 10.0).round() / 10.0;
    Ok((
        round_sig(MSF_QUBIT_RATE * cult_qubits, 3),
        round_sig(MSF_ROUND_RATE * cult_cycles, 3),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsfProtocol {
    pub label: String,
    pub p_out: f64,
    pub sc_qubits: f64,
    pub sc_cycles: f64,
    pub cult_qubits: f64,
    pub cult_cycles: f64,
    pub hh_qubits: f64,
    pub hh_rounds: f64,
}

impl MsfProtocol {
    pub fn new(label: impl Into<String>, p_out: f64, sc_qubits: f64, sc_cycles: f64) -> Result<Self> {
        if !(p_out > 0.0 && p_out < 1.0) {
            return Err(invalid("p_out", format!("{p_out} outside (0, 1)")));
        }
        let (hh_qubits, hh_rounds) = msf_convert(sc_qubits, sc_cycles, CULTIVATION_FACTOR)?;
        Ok(Self {
            label: label.into(),
            p_out,
            sc_qubits,
            sc_cycles,
            cult_qubits: (sc_qubits / CULTIVATION_FACTOR).round(),
            cult_cycles: (sc_cycles / CULTIVATION_FACTOR * 10.0).round() / 10.0,
            hh_qubits,
            hh_rounds,
        })
    }
}

const BUNDLED_ERROR_DATA: &str = include_str!("../data/lattice_surgery.csv");
const BUNDLED_MSF_TABLE: &str = include_str!("../data/msf_protocols.csv");

fn data_err(e: impl std::fmt::Display) -> Error {
    Error::Data(e.to_string())
}

/// Reads `width,height,rounds,qubits,ehv,ehv_stddev` rows.
pub fn read_error_data<R: Read>(reader: R) -> Result<Vec<ErrorDataPoint>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(data_err)?.clone();
    let expected = ["width", "height", "rounds", "qubits", "ehv", "ehv_stddev"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Data(format!("unexpected header {headers:?}, want {}", expected.join(","))));
    }
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(data_err)?;
        let field = |k: usize| -> Result<f64> {
            rec[k]
                .parse::<f64>()
                .map_err(|e| Error::Data(format!("row {}: column {}: {e}", i + 2, expected[k])))
        };
        let (w, h, r, q) = (field(0)?, field(1)?, field(2)?, field(3)?);
        if w.fract() != 0.0 || h.fract() != 0.0 || r.fract() != 0.0 || q.fract() != 0.0 || w < 1.0 || h < 1.0 {
            return Err(Error::Data(format!("row {}: geometry must be positive integers", i + 2)));
        }
        if (w * h - q).abs() > 0.0 {
            return Err(Error::Data(format!("row {}: qubits {q} != width·height", i + 2)));
        }
        points.push(ErrorDataPoint {
            geometry: PatchGeometry {
                width: w as u32,
                height: h as u32,
                rounds: r as u32,
                qubits: q as u32,
            },
            e_hv: field(4)?,
            sigma: field(5)?,
        });
    }
    Ok(points)
}

/// Reads `label,p_out,sc_qubits,sc_cycles` rows; honeycomb columns are derived.
pub fn read_msf_table<R: Read>(reader: R) -> Result<Vec<MsfProtocol>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(data_err)?.clone();
    let expected = ["label", "p_out", "sc_qubits", "sc_cycles"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Data(format!("unexpected header {headers:?}, want {}", expected.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(data_err)?;
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .parse::<f64>()
                .map_err(|e| Error::Data(format!("row {}: column {}: {e}", i + 2, expected[k])))
        };
        out.push(MsfProtocol::new(&rec[0], num(1)?, num(2)?, num(3)?)?);
    }
    Ok(out)
}

pub fn bundled_error_data() -> Vec<ErrorDataPoint> {
    read_error_data(BUNDLED_ERROR_DATA.as_bytes()).expect("bundled error data parses")
}

pub fn bundled_msf_table() -> Vec<MsfProtocol> {
    read_msf_table(BUNDLED_MSF_TABLE.as_bytes()).expect("bundled factory table parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn geometry_rows() {
        let g = patch_geometry(10).unwrap();
        assert_eq!((g.height, g.rounds, g.qubits), (18, 36, 180));
        let g = patch_geometry(30).unwrap();
        assert_eq!((g.height, g.rounds, g.qubits), (51, 102, 1530));
        let g = patch_geometry(18).unwrap();
        assert_eq!((g.height, g.rounds), (30, 60));
        assert!(patch_geometry(7).is_err());
        assert!(patch_geometry(0).is_err());
        let g = patch_geometry(36).unwrap();
        assert_eq!((g.height, g.rounds), (60, 120));
        for (w, h, r) in LADDER {
            assert_eq!(r, 2 * h);
            let nearest = ((5.0 * w as f64 / 3.0) / 3.0).round() as u32 * 3;
            assert_eq!(nearest, h, "w={w}");
        }
    }

    #[test]
    fn combined() {
        assert_eq!(combined_error(0.0, 0.0), 0.0);
        assert_relative_eq!(combined_error(1e-3, 2e-3), 2.998e-3, max_relative = 1e-12);
        assert_eq!(combined_error(0.3, 0.1), combined_error(0.1, 0.3));
        assert_eq!(combined_error(0.25, 0.0), 0.25);
    }

    #[test]
    fn exact_two_point_fit() {
        let truth = FitParams { a: -1.0, b: 2.0 };
        let points: Vec<_> = [6, 16]
            .iter()
            .map(|&w| {
                let geometry = patch_geometry(w).unwrap();
                let e = truth.error_at_qubits(geometry.qubits as f64);
                ErrorDataPoint {
                    geometry,
                    e_hv: e,
                    sigma: e * 1e-6,
                }
            })
            .collect();
        let fit = fit_error_curve(&points).unwrap();
        assert!((fit.a - truth.a).abs() < 1e-9);
        assert!((fit.b - truth.b).abs() < 1e-9);
    }

    #[test]
    fn degenerate_fits_fail() {
        let data = bundled_error_data();
        assert!(fit_error_curve(&data[..1]).is_err());
        assert!(fit_error_curve(&[data[0], data[0]]).is_err());
    }

    #[test]
    fn bundled_fit() {
        let fit = fit_error_curve(&bundled_error_data()).unwrap();
        assert!(fit.a < 0.0);
        let e30 = extrapolate_error(&fit, 30).unwrap();
        assert!(e30 > 9.25e-15 / 3.0 && e30 < 9.25e-15 * 3.0);
        let e16 = extrapolate_error(&fit, 16).unwrap();
        assert!(e16 > 4.50e-8 / 2.0 && e16 < 4.50e-8 * 2.0);
        let e28 = extrapolate_error(&fit, 28).unwrap();
        assert!(e28 > 8.02e-14 / 3.0 && e28 < 8.02e-14 * 3.0);
        assert_eq!(select_distance(&fit, 3.58e-14).unwrap().width, 30);
        assert_eq!(select_distance(&fit, 1.0).unwrap().width, 6);
        assert!(matches!(select_distance(&fit, 1e-16), Err(Error::NoDistanceFound { .. })));
    }

    #[test]
    fn unweighted_fit() {
        let fit = fit_error_curve_with(&bundled_error_data(), FitWeighting::Unweighted).unwrap();
        let e30 = extrapolate_error(&fit, 30).unwrap();
        assert!((e30 / 4.8e-15 - 1.0).abs() < 0.05, "{e30:e}");
    }

    #[test]
    fn degenerate_curve() {
        let fit = FitParams { a: 0.0, b: 0.0 };
        assert_eq!(extrapolate_error(&fit, 10).unwrap(), 180.0);
    }

    #[test]
    fn cnot_overhead() {
        let o = transversal_cnot_overhead(5e-3, 3e-3);
        assert_relative_eq!(o.value, 2e-3, max_relative = 1e-12);
        assert!(!o.clamped);
        assert_eq!(transversal_cnot_overhead(4e-3, 4e-3).value, 0.0);
        let o = transversal_cnot_overhead(3e-3, 5e-3);
        assert_eq!(o.value, 0.0);
        assert!(o.clamped);
    }

    #[test]
    fn conversion_rates() {
        assert_relative_eq!(msf_qubit_conversion_rate(1e9), 5.0 * 1.25 * 1.25 / 6.0, max_relative = 1e-6);
        assert_relative_eq!(msf_qubit_conversion_rate(25.0), (5.0 * 625.0 / 3.0) / 882.0, max_relative = 1e-12);
        assert_relative_eq!(msf_qubit_conversion_rate(5.0), 0.8333333333, max_relative = 1e-9);
        assert_relative_eq!(10.0 / 3.0 * 1.25, 4.1666, max_relative = 1e-4);
    }

    #[test]
    fn msf_rows() {
        assert_eq!(msf_convert(4620.0, 42.6, 5.0).unwrap(), (480.0, 35.7));
        assert_eq!(msf_convert(73400.0, 128.0, 5.0).unwrap(), (7630.0, 108.0));
        assert_eq!(msf_convert(100.0, 10.0, 1.0).unwrap(), (52.0, 42.0));
        assert!(msf_convert(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn sig_figs() {
        assert_eq!(round_sig(480.48, 3), 480.0);
        assert_eq!(round_sig(0.0012345, 3), 0.00123);
        assert_eq!(round_sig(0.0, 3), 0.0);
        assert_eq!(round_sig(-7632.0, 3), -7630.0);
    }

    #[test]
    fn csv_errors() {
        assert!(read_error_data("w,h\n1,2\n".as_bytes()).is_err());
        let bad = "width,height,rounds,qubits,ehv,ehv_stddev\n6,9,18,55,1e-3,1e-4\n";
        assert!(read_error_data(bad.as_bytes()).is_err());
        let bad = "label,p_out,sc_qubits,sc_cycles\nx,nope,1,1\n";
        assert!(read_msf_table(bad.as_bytes()).is_err());
        assert_eq!(bundled_msf_table().len(), 6);
        assert_eq!(bundled_error_data().len(), 6);
    }
}
