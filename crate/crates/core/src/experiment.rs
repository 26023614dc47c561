//! Configuration-driven experiment runner: convergence sweeps comparing
//! exact spectra against their classical limits, reference-number
//! reproduction, and deterministic CSV / plot-data emission.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{boundary_term_asymptotic, overlap_integral_numeric, OverlapTerm};
use crate::efp::{efp_determinant, efp_fredholm_converged, CdKernel};
use crate::error::{Error, Result};
use crate::lattice::{
    box_continuum_mode, build_hamiltonian, solve_modes, to_continuum, PhysicalParams,
    PotentialKind, PotentialSpec, SingleParticleMode,
};
use crate::rdm::{
    entanglement_entropy, overlap_matrix, rdm_spectrum_exact, Bipartition, RdmSpectrum,
};
use crate::semiclassics::{
    classical_entropy, classical_probability, classical_rdm_spectrum, corrected_occupation,
    suggest_grid, ClassicalOrbit,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn default_params() -> PhysicalParams {
    PhysicalParams::natural()
}

fn default_harmonic_half_width() -> f64 {
    40.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum PotentialConfig {
    Box {
        length: f64,
    },
    Harmonic {
        omega: f64,
        #[serde(default = "default_harmonic_half_width")]
        half_width: f64,
    },
    Polynomial {
        coefficients: Vec<f64>,
        domain: (f64, f64),
    },
    Tabulated {
        x: Vec<f64>,
        v: Vec<f64>,
    },
}

impl PotentialConfig {
    fn to_spec(&self) -> Result<PotentialSpec> {
        match self {
            PotentialConfig::Box { length } => PotentialSpec::hard_wall_box(*length),
            PotentialConfig::Harmonic { omega, half_width } => {
                PotentialSpec::harmonic(*omega, *half_width)
            }
            PotentialConfig::Polynomial {
                coefficients,
                domain,
            } => PotentialSpec::polynomial(coefficients.clone(), *domain),
            PotentialConfig::Tabulated { x, v } => PotentialSpec::tabulated(x.clone(), v.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BipartitionConfig {
    pub a_lo: f64,
    pub a_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Multiply every mode label by the (integer) sweep value.
    EtaScale,
    /// Set ħ to the sweep value.
    Hbar,
    /// Move the right edge of A to the sweep value.
    IntervalEdge,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    ExactSpectrum,
    ClassicalSpectrum,
    Entropies,
    Overlaps,
    Efp,
    CorrectedOccupation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    potential: PotentialConfig,
    #[serde(default)]
    params: Option<PhysicalParams>,
    mode_labels: Vec<u32>,
    bipartition: BipartitionConfig,
    #[serde(default)]
    sweep: Option<SweepConfig>,
    statistics: Vec<Statistic>,
    #[serde(default)]
    output_path: Option<PathBuf>,
}

/// A validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub potential: PotentialSpec,
    pub params: PhysicalParams,
    pub mode_labels: Vec<u32>,
    pub bipartition: BipartitionConfig,
    pub sweep: Option<SweepConfig>,
    pub statistics: BTreeSet<Statistic>,
    pub output_path: Option<PathBuf>,
    /// FNV-1a hash of the canonicalized configuration.
    pub config_hash: String,
}

fn fnv1a64(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Parse and validate a JSON experiment configuration.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parse a configuration from its JSON text (defaults ħ = m = 1).
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("{e}")))?;
    let potential = raw.potential.to_spec()?;
    let params = raw.params.unwrap_or_else(default_params);
    PhysicalParams::new(params.hbar, params.mass)?;
    if raw.mode_labels.is_empty() {
        return Err(Error::Config("mode_labels: must not be empty".into()));
    }
    let mut seen = BTreeSet::new();
    for &l in &raw.mode_labels {
        if l == 0 {
            return Err(Error::Config("mode_labels: labels start at 1".into()));
        }
        if !seen.insert(l) {
            return Err(Error::Config(format!(
                "mode_labels: duplicate fermionic label {l}"
            )));
        }
    }
    if !(raw.bipartition.a_lo < raw.bipartition.a_hi) {
        return Err(Error::Config(format!(
            "bipartition: a_lo = {} must be below a_hi = {}",
            raw.bipartition.a_lo, raw.bipartition.a_hi
        )));
    }
    if let Some(sweep) = &raw.sweep {
        if sweep.values.is_empty() {
            return Err(Error::Config("sweep.values: must not be empty".into()));
        }
        if sweep.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep.values: must be finite".into()));
        }
        if !sweep.values.windows(2).all(|w| w[0] < w[1])
            && !sweep.values.windows(2).all(|w| w[0] > w[1])
        {
            return Err(Error::Config(
                "sweep.values: must be strictly monotone".into(),
            ));
        }
        if sweep.variable == SweepVariable::EtaScale {
            for v in &sweep.values {
                if (v - v.round()).abs() > 1e-9 || v.round() < 1.0 {
                    return Err(Error::Config(format!(
                        "sweep.values: eta_scale values must be positive integers, got {v}"
                    )));
                }
            }
        }
    }
    if raw.statistics.is_empty() {
        return Err(Error::Config("statistics: must not be empty".into()));
    }
    let canonical = serde_json::to_string(&raw).map_err(|e| Error::Config(format!("{e}")))?;
    Ok(ExperimentConfig {
        potential,
        params,
        mode_labels: raw.mode_labels,
        bipartition: raw.bipartition,
        sweep: raw.sweep,
        statistics: raw.statistics.into_iter().collect(),
        output_path: raw.output_path,
        config_hash: fnv1a64(canonical.as_bytes()),
    })
}

/// One comparison row of a sweep (fixed CSV schema).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub sector: usize,
    pub eigenvalue_exact: Option<f64>,
    pub eigenvalue_classical: Option<f64>,
    pub entropy_exact: Option<f64>,
    pub entropy_classical: Option<f64>,
    pub abs_error: Option<f64>,
}

/// Auxiliary per-cell statistics that do not fit the spectrum-row schema
/// (overlap magnitudes, EFP route comparison, corrected occupations).
#[derive(Debug, Clone, PartialEq)]
pub struct AuxRow {
    pub sweep_value: f64,
    pub statistic: String,
    pub label: String,
    pub value: f64,
    pub reference: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub aux: Vec<AuxRow>,
    pub config_hash: String,
    pub tool_version: String,
}

fn annotate(err: Error, sweep_value: f64) -> Error {
    let msg = format!("at sweep value {sweep_value}: {err}");
    match err {
        Error::Domain(_) => Error::Domain(msg),
        Error::Usage(_) => Error::Usage(msg),
        Error::Numerical(_) => Error::Numerical(msg),
        Error::Resource(_) => Error::Resource(msg),
        Error::Config(_) => Error::Config(msg),
        Error::Io(e) => Error::Io(std::io::Error::new(e.kind(), msg)),
    }
}

/// Continuum modes for a label set: closed-form for the box, fine-lattice
/// solve otherwise.
pub fn continuum_modes(
    pot: &PotentialSpec,
    params: &PhysicalParams,
    labels: &[u32],
) -> Result<Vec<SingleParticleMode>> {
    if let PotentialKind::Box { length } = pot.kind {
        return labels
            .iter()
            .map(|&eta| box_continuum_mode(length, eta, params))
            .collect();
    }
    let max_label = *labels.iter().max().unwrap() as usize;
    let grid = suggest_grid(pot, params, max_label)?;
    let h = build_hamiltonian(&grid, pot, params)?;
    let modes = solve_modes(&h, max_label)?;
    labels
        .iter()
        .map(|&eta| to_continuum(&modes[(eta - 1) as usize], &grid))
        .collect()
}

struct CellOutput {
    rows: Vec<SweepRow>,
    aux: Vec<AuxRow>,
}

fn run_cell(cfg: &ExperimentConfig, sweep_value: f64) -> Result<CellOutput> {
    let mut labels = cfg.mode_labels.clone();
    let mut params = cfg.params;
    let mut a_hi = cfg.bipartition.a_hi;
    if let Some(sweep) = &cfg.sweep {
        match sweep.variable {
            SweepVariable::EtaScale => {
                let s = sweep_value.round() as u32;
                labels = labels.iter().map(|&l| l * s).collect();
            }
            SweepVariable::Hbar => params.hbar = sweep_value,
            SweepVariable::IntervalEdge => a_hi = sweep_value,
        }
    }
    let part = Bipartition::interval(cfg.bipartition.a_lo, a_hi)?;
    let modes = continuum_modes(&cfg.potential, &params, &labels)?;

    let want = |s: Statistic| cfg.statistics.contains(&s);
    let exact_spec: Option<RdmSpectrum> = if want(Statistic::ExactSpectrum) {
        Some(rdm_spectrum_exact(&modes, &part)?)
    } else {
        None
    };
    let orbits: Vec<ClassicalOrbit> = modes
        .iter()
        .map(|m| ClassicalOrbit::new(&cfg.potential, m.energy, &params))
        .collect::<Result<_>>()?;
    let classical_spec: Option<RdmSpectrum> = if want(Statistic::ClassicalSpectrum) {
        let p_cl: Vec<f64> = orbits
            .iter()
            .map(|o| classical_probability(&part, o))
            .collect::<Result<_>>()?;
        Some(classical_rdm_spectrum(&p_cl)?)
    } else {
        None
    };

    let (entropy_exact, entropy_classical) = if want(Statistic::Entropies) {
        let se = exact_spec
            .as_ref()
            .map(entanglement_entropy)
            .transpose()?;
        let sc = match &classical_spec {
            Some(_) => {
                let p_cl: Vec<f64> = orbits
                    .iter()
                    .map(|o| classical_probability(&part, o))
                    .collect::<Result<_>>()?;
                Some(classical_entropy(&p_cl))
            }
            None => None,
        };
        (se, sc)
    } else {
        (None, None)
    };

    // Pair exact and classical eigenvalues sector by sector.
    let mut rows = Vec::new();
    let mut sectors: BTreeSet<usize> = BTreeSet::new();
    if let Some(s) = &exact_spec {
        sectors.extend(s.sectors.keys().copied());
    }
    if let Some(s) = &classical_spec {
        sectors.extend(s.sectors.keys().copied());
    }
    for k in sectors {
        let ex = exact_spec.as_ref().map(|s| s.sector(k)).unwrap_or(&[]);
        let cl = classical_spec.as_ref().map(|s| s.sector(k)).unwrap_or(&[]);
        let len = ex.len().max(cl.len()).max(1);
        for i in 0..len {
            let e = ex.get(i).copied();
            let c = cl.get(i).copied();
            rows.push(SweepRow {
                sweep_value,
                sector: k,
                eigenvalue_exact: e,
                eigenvalue_classical: c,
                entropy_exact,
                entropy_classical,
                abs_error: match (e, c) {
                    (Some(a), Some(b)) => Some((a - b).abs()),
                    _ => None,
                },
            });
        }
    }

    let mut aux = Vec::new();
    if want(Statistic::Overlaps) {
        let o = overlap_matrix(&modes, &part)?;
        for i in 0..modes.len() {
            for j in (i + 1)..modes.len() {
                let v = o.matrix[(i, j)].norm();
                aux.push(AuxRow {
                    sweep_value,
                    statistic: "overlap_offdiag".into(),
                    label: format!("({},{})", labels[i], labels[j]),
                    value: v,
                    reference: 0.0,
                    deviation: v,
                });
            }
        }
    }
    if want(Statistic::Efp) {
        let (dom_lo, dom_hi) = modes[0].support()?;
        let b_lo = a_hi.clamp(dom_lo, dom_hi);
        if b_lo < dom_hi {
            let det = efp_determinant(&modes, (b_lo, dom_hi))?;
            let kernel = CdKernel::new(modes.clone())?;
            let fred = efp_fredholm_converged(&kernel, (b_lo, dom_hi), 1e-6)?;
            aux.push(AuxRow {
                sweep_value,
                statistic: "efp".into(),
                label: format!("B=[{b_lo},{dom_hi}]"),
                value: fred,
                reference: det,
                deviation: (fred - det).abs(),
            });
        }
    }
    if want(Statistic::CorrectedOccupation) {
        for (i, orbit) in orbits.iter().enumerate() {
            let corrected = corrected_occupation(&part, orbit, params.hbar)?;
            let o = overlap_matrix(std::slice::from_ref(&modes[i]), &part)?;
            let exact = o.matrix[(0, 0)].re;
            aux.push(AuxRow {
                sweep_value,
                statistic: "corrected_occupation".into(),
                label: format!("eta={}", labels[i]),
                value: corrected,
                reference: exact,
                deviation: (corrected - exact).abs(),
            });
        }
    }
    Ok(CellOutput { rows, aux })
}

/// Run the configured sweep. Cells are evaluated in parallel and merged in
/// sweep order, so the output is deterministic for a given configuration.
pub fn run_convergence_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep: section required for the sweep runner".into()))?;
    let cells: Vec<Result<CellOutput>> = sweep
        .values
        .par_iter()
        .map(|&v| run_cell(cfg, v).map_err(|e| annotate(e, v)))
        .collect();
    let mut rows = Vec::new();
    let mut aux = Vec::new();
    for cell in cells {
        let cell = cell?;
        rows.extend(cell.rows);
        aux.extend(cell.aux);
    }
    Ok(SweepResult {
        rows,
        aux,
        config_hash: cfg.config_hash.clone(),
        tool_version: TOOL_VERSION.into(),
    })
}

/// Evaluate the statistics of a single (non-sweep) configuration.
pub fn run_single(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let mut plain = cfg.clone();
    plain.sweep = None;
    let cell = run_cell(&plain, 0.0)?;
    Ok(SweepResult {
        rows: cell.rows,
        aux: cell.aux,
        config_hash: cfg.config_hash.clone(),
        tool_version: TOOL_VERSION.into(),
    })
}

fn fmt_sig(v: f64) -> String {
    // 12 significant digits, deterministic
    format!("{v:.11e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_default()
}

pub const CSV_HEADER: &str =
    "sweep_value,k,eigenvalue_exact,eigenvalue_classical,entropy_exact,entropy_classical,abs_error";

/// Write the fixed-schema CSV: UTF-8, LF endings, 12 significant digits,
/// byte-identical across runs for identical configurations.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_sig(r.sweep_value),
            r.sector,
            fmt_opt(r.eigenvalue_exact),
            fmt_opt(r.eigenvalue_classical),
            fmt_opt(r.entropy_exact),
            fmt_opt(r.entropy_classical),
            fmt_opt(r.abs_error),
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Whitespace-separated (sweep_value, entropy_exact, entropy_classical),
/// one row per sweep value.
pub fn emit_plot_data(result: &SweepResult, path: &Path) -> Result<()> {
    let mut out = String::new();
    let mut last: Option<f64> = None;
    for r in &result.rows {
        if last == Some(r.sweep_value) {
            continue;
        }
        last = Some(r.sweep_value);
        out.push_str(&format!(
            "{} {} {}\n",
            fmt_sig(r.sweep_value),
            fmt_opt(r.entropy_exact),
            fmt_opt(r.entropy_classical),
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Tab-separated auxiliary statistics.
pub fn emit_aux(result: &SweepResult, path: &Path) -> Result<()> {
    let mut out = String::from("sweep_value\tstatistic\tlabel\tvalue\treference\tdeviation\n");
    for a in &result.aux {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            fmt_sig(a.sweep_value),
            a.statistic,
            a.label,
            fmt_sig(a.value),
            fmt_sig(a.reference),
            fmt_sig(a.deviation),
        ));
    }
    write_atomic(path, out.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    f.write_all(bytes)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(())
}

/// Reference values for the boundary-asymptotics reproduction
/// (harmonic well, E = 10.5 and 20.5, ħ = 1, A = [−1, 1]).
pub const APPENDIX_B_TARGET_NUMERIC: Complex64 = Complex64::new(0.03446, -0.00437);
pub const APPENDIX_B_TARGET_ASYMPTOTIC: Complex64 = Complex64::new(0.03445, -0.00437);
pub const APPENDIX_B_TOLERANCE: f64 = 2e-4;

#[derive(Debug, Clone)]
pub struct AppendixBReport {
    pub numeric: Complex64,
    pub asymptotic: Complex64,
    /// |numeric − asymptotic|: the internal consistency of the expansion.
    pub internal_difference: f64,
    pub target_numeric: Complex64,
    pub target_asymptotic: Complex64,
    pub numeric_ok: bool,
    pub asymptotic_ok: bool,
    pub magnitudes_ok: bool,
    pub runtime_seconds: f64,
    pub config_hash: String,
    pub tool_version: String,
}

impl AppendixBReport {
    pub fn passes(&self) -> bool {
        self.numeric_ok && self.asymptotic_ok
    }
}

/// Recompute the oscillatory fast-term integral and its boundary-term
/// asymptotics for the fixed harmonic configuration and compare both with
/// the recorded reference values at the 2e−4 tolerance.
///
/// By parity of the phase (f(x) + f(−x) is a constant multiple of π for the
/// symmetric well and symmetric interval), both quantities are exactly real
/// under this construction; the reference values carry a spurious phase, so
/// the componentwise comparisons document that discrepancy while the
/// magnitude comparison captures the convention-independent content.
pub fn run_appendix_b_repro() -> Result<AppendixBReport> {
    let start = Instant::now();
    let params = PhysicalParams::natural();
    let pot = PotentialSpec::harmonic(1.0, 10.0)?;
    let orbit_eta = ClassicalOrbit::new(&pot, 10.5, &params)?;
    let orbit_beta = ClassicalOrbit::new(&pot, 20.5, &params)?;
    let region = (-1.0, 1.0);
    let numeric =
        overlap_integral_numeric(&orbit_eta, &orbit_beta, region, 1.0, OverlapTerm::FastOnly)?;
    let asymptotic = boundary_term_asymptotic(&orbit_eta, &orbit_beta, region, 1.0)?;
    let numeric_ok = (numeric - APPENDIX_B_TARGET_NUMERIC).norm() <= APPENDIX_B_TOLERANCE;
    let asymptotic_ok = (asymptotic - APPENDIX_B_TARGET_ASYMPTOTIC).norm() <= APPENDIX_B_TOLERANCE;
    let magnitudes_ok = (numeric.norm() - APPENDIX_B_TARGET_NUMERIC.norm()).abs()
        <= APPENDIX_B_TOLERANCE
        && (asymptotic.norm() - APPENDIX_B_TARGET_ASYMPTOTIC.norm()).abs() <= APPENDIX_B_TOLERANCE;
    let config = "appendix-b:harmonic,omega=1,m=1,hbar=1,E=(10.5,20.5),A=[-1,1]";
    Ok(AppendixBReport {
        numeric,
        asymptotic,
        internal_difference: (numeric - asymptotic).norm(),
        target_numeric: APPENDIX_B_TARGET_NUMERIC,
        target_asymptotic: APPENDIX_B_TARGET_ASYMPTOTIC,
        numeric_ok,
        asymptotic_ok,
        magnitudes_ok,
        runtime_seconds: start.elapsed().as_secs_f64(),
        config_hash: fnv1a64(config.as_bytes()),
        tool_version: TOOL_VERSION.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOX_SWEEP: &str = r#"{
        "potential": {"kind": "box", "length": 1.0},
        "mode_labels": [1],
        "bipartition": {"a_lo": 0.0, "a_hi": 0.3},
        "sweep": {"variable": "eta_scale", "values": [1, 2, 4]},
        "statistics": ["exact_spectrum", "classical_spectrum", "entropies"]
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(BOX_SWEEP).unwrap();
        assert_eq!(cfg.params.hbar, 1.0);
        assert_eq!(cfg.params.mass, 1.0);
        assert_eq!(cfg.mode_labels, vec![1]);
    }

    #[test]
    fn duplicate_labels_rejected_with_field_name() {
        let bad = BOX_SWEEP.replace("[1]", "[2, 2]");
        let err = parse_config(&bad).unwrap_err();
        assert!(err.to_string().contains("mode_labels"), "{err}");
    }

    #[test]
    fn unknown_statistic_lists_alternatives() {
        let bad = BOX_SWEEP.replace("\"entropies\"", "\"entropy_rate\"");
        let err = parse_config(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("entropy_rate"), "{msg}");
        assert!(msg.contains("expected"), "{msg}");
    }

    #[test]
    fn non_monotone_sweep_rejected() {
        let bad = BOX_SWEEP.replace("[1, 2, 4]", "[1, 4, 2]");
        assert!(parse_config(&bad).is_err());
    }

    #[test]
    fn sweep_rows_track_the_sine_bound() {
        let cfg = parse_config(BOX_SWEEP).unwrap();
        let result = run_convergence_sweep(&cfg).unwrap();
        assert_eq!(result.rows.len(), 3 * 2); // 3 sweep values x 2 sectors
        for r in &result.rows {
            let eta = r.sweep_value;
            let err = r.abs_error.unwrap();
            assert!(err <= 1.0 / (2.0 * std::f64::consts::PI * eta) + 1e-12);
        }
        // exact entropy equals the recomputed entropy on every row
        for r in &result.rows {
            assert!(r.entropy_exact.is_some() && r.entropy_classical.is_some());
        }
    }

    #[test]
    fn csv_bytes_are_deterministic() {
        let cfg = parse_config(BOX_SWEEP).unwrap();
        let r1 = run_convergence_sweep(&cfg).unwrap();
        let r2 = run_convergence_sweep(&cfg).unwrap();
        let dir = std::env::temp_dir();
        let p1 = dir.join("entspec_test_sweep_1.csv");
        let p2 = dir.join("entspec_test_sweep_2.csv");
        emit_csv(&r1, &p1).unwrap();
        emit_csv(&r2, &p2).unwrap();
        let b1 = std::fs::read(&p1).unwrap();
        let b2 = std::fs::read(&p2).unwrap();
        assert_eq!(b1, b2);
        let text = String::from_utf8(b1).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert!(!text.contains('\r'));
        std::fs::remove_file(p1).ok();
        std::fs::remove_file(p2).ok();
    }

    #[test]
    fn empty_rows_emit_header_only() {
        let res = SweepResult {
            rows: vec![],
            aux: vec![],
            config_hash: "0".into(),
            tool_version: TOOL_VERSION.into(),
        };
        let p = std::env::temp_dir().join("entspec_test_empty.csv");
        emit_csv(&res, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, format!("{CSV_HEADER}\n"));
        std::fs::remove_file(p).ok();
    }

    #[test]
    fn plot_data_has_one_row_per_sweep_value() {
        let cfg = parse_config(BOX_SWEEP).unwrap();
        let result = run_convergence_sweep(&cfg).unwrap();
        let p = std::env::temp_dir().join("entspec_test_plot.dat");
        emit_plot_data(&result, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        // classical column constant for the box eta sweep
        let classical: Vec<&str> = lines
            .iter()
            .map(|l| l.split_whitespace().nth(2).unwrap())
            .collect();
        assert!(classical.windows(2).all(|w| w[0] == w[1]));
        std::fs::remove_file(p).ok();
    }
}
