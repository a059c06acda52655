//! Run reports: a JSON summary document plus fixed-column CSV ledgers.
//!
//! Every asserted inequality appears as a [`CheckLine`] carrying the measured
//! value, the bound, and the slack, keyed by a tag from the
//! [`describe_check`] catalog. CSV rendering is hand-rolled and uses the
//! shortest round-trip float format, so identical configs produce identical
//! bytes.

use serde::Serialize;

use crate::compat::CompatReport;
use crate::gravity::{FLedger, GravitoLedger};
use crate::scalar::{DtnReport, EnergyLedger, EstimateReport, RATIO_GUARD};

use super::config::ScenarioConfig;

/// One asserted inequality with its measured slack.
#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    /// Catalog key; [`describe_check`] expands it.
    pub tag: &'static str,
    /// What the check applies to, when a tag repeats (e.g. a component).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub value: f64,
    pub bound: f64,
    /// Satisfied margin; negative exactly when the check fails.
    pub slack: f64,
    pub pass: bool,
}

impl CheckLine {
    /// `value ≤ bound`.
    pub fn upper(tag: &'static str, subject: Option<String>, value: f64, bound: f64) -> Self {
        let slack = bound - value;
        CheckLine { tag, subject, value, bound, slack, pass: value <= bound && value.is_finite() }
    }

    /// `value ≥ bound`.
    pub fn lower(tag: &'static str, subject: Option<String>, value: f64, bound: f64) -> Self {
        let slack = value - bound;
        CheckLine { tag, subject, value, bound, slack, pass: value >= bound && value.is_finite() }
    }
}

/// Message catalog for check tags: every assertion the harness makes (and
/// every `CheckFailed` it can raise) names its inequality here.
pub fn describe_check(tag: &str) -> &'static str {
    match tag {
        "estimate-ratio" => {
            "boundary-stability estimate: the wall-controlled energy (bulk energy plus half \
             the accumulated wall trace) divided by the data norm stays under a uniform \
             constant for all recorded times"
        }
        "energy-identity" => {
            "discrete energy identity: the per-step change of the bulk energy matches the \
             recorded boundary fluxes and forcing power to second order in the spacing \
             (normalized by the run's energy scale)"
        }
        "tangential-identity" => {
            "tangential energy identity (Dirichlet wall): the tangential-gradient energy \
             change matches its recorded right-hand side to second order"
        }
        "sommerfeld-dissipation" => {
            "radiating-wall dissipation identity: the energy change plus the recorded wall \
             dissipation matches the data power to second order"
        }
        "dtn-slack" => {
            "Dirichlet-to-Neumann bound: the recovered normal-derivative wall power is \
             controlled by the initial and current energies plus the tangential data norm; \
             the slack may dip below zero only at the spacing scale"
        }
        "wall-condition" => {
            "the per-mode wall projection systems stay well conditioned (1-norm condition \
             number below the 1e12 abort threshold)"
        }
        "f-energy-identity" => {
            "componentwise energy identity for the boundary gauge-map system under \
             Dirichlet wall data (normalized by the component's energy scale)"
        }
        "selftest-zero-ledger" => "zero data must produce an exactly zero ledger",
        "selftest-scalar-order" => {
            "scalar traveling wave converges at second order between two resolutions"
        }
        "selftest-estimate" => "boundary-stability ratio stays bounded on a compatible run",
        "selftest-constraint-order" => {
            "evolved gauge-constraint norm converges at second order for pure-gauge data"
        }
        "selftest-bc-admissibility" => {
            "admissible wall-parameter pairs run; the inadmissible pair is rejected at \
             validation"
        }
        "selftest-bootstrap" => {
            "wall identity chain closes to rounding on random smooth states"
        }
        "selftest-corner-algebra" => {
            "corner-angle identities hold to 1e-12 over random angle parameters"
        }
        "selftest-corner-checkers" => {
            "corner checkers accept the exactly consistent reference point and flag each \
             perturbed field"
        }
        "selftest-f-identity" => {
            "gauge-map componentwise energy identity holds to second order"
        }
        "selftest-reproducibility" => {
            "rendering the same run twice produces byte-identical CSV ledgers"
        }
        _ => "unrecognized check tag",
    }
}

/// Run status, mirrored in the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    CheckFailed,
    NumericalFailure,
}

/// Scalar-run section of the report.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarBlock {
    pub estimate: EstimateReport,
    pub sobolev_order: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dtn: Option<DtnReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2_error: Option<f64>,
    pub energy_identity_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangential_identity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sommerfeld_dissipation_residual: Option<f64>,
    pub ledger: EnergyLedger,
}

/// Tensor / gauge-map section of the report.
#[derive(Debug, Clone, Serialize)]
pub struct TensorBlock {
    pub estimate_h: EstimateReport,
    pub estimate_f: [EstimateReport; 4],
    pub condition: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_error_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_error_l2: Option<f64>,
    pub constraint_l2_final: f64,
    pub ham1_final: f64,
    pub ham2_final: f64,
    pub ham1_max: f64,
    pub ham2_max: f64,
    pub f_energy_identity: [f64; 4],
    pub ledger: GravitoLedger,
    pub f_ledger: FLedger,
}

/// The JSON document `run` and `sweep` emit.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub wall_clock_seconds: f64,
    pub steps: usize,
    pub dt: f64,
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar: Option<ScalarBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tensor: Option<TensorBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compat: Option<CompatReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceTable>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        // serde_json can only fail on non-string map keys or foreign
        // serializers; neither occurs here
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

// ---------------------------------------------------------------------------
// CSV rendering

/// Shortest round-trip decimal form — a pure function of the bits, so the
/// bytes reproduce across runs.
fn fmt(v: f64) -> String {
    format!("{v:?}")
}

fn push_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// The scalar estimate-denominator choice; mirrors the library report for
/// order 1 and swaps in the plain data norm for order 0.
fn scalar_ratio(e0: f64, sobolev: u32, r: &crate::scalar::LedgerRow) -> f64 {
    let data = if sobolev == 0 { r.data_accum } else { r.data_h1_accum };
    (r.cal_e_bulk + 0.5 * r.wall_accum) / (e0 + data + r.source_accum + RATIO_GUARD)
}

/// Worst-over-time scalar estimate ratio at the configured data-norm order.
pub fn scalar_estimate(ledger: &EnergyLedger, sobolev: u32) -> EstimateReport {
    let e0 = ledger.rows.first().map(|r| r.e_bulk).unwrap_or(0.0);
    let mut worst = (f64::NEG_INFINITY, 0.0);
    let mut last = 0.0;
    for r in &ledger.rows {
        let ratio = scalar_ratio(e0, sobolev, r);
        if ratio > worst.0 {
            worst = (ratio, r.t);
        }
        last = ratio;
    }
    EstimateReport { worst_ratio: worst.0, worst_time: worst.1, final_ratio: last }
}

pub const SCALAR_CSV_HEADER: &str = "t,e_bulk,cal_e_bulk,cross_bulk,wall_accum,data_accum,\
data_h1_accum,data_tan_accum,source_accum,flux_accum,forcing_accum,diss_accum,wallx_accum,\
tang_rhs_accum,estimate_ratio";

pub fn scalar_ledger_csv(ledger: &EnergyLedger, sobolev: u32) -> String {
    let mut out = String::new();
    out.push_str(SCALAR_CSV_HEADER);
    out.push('\n');
    let e0 = ledger.rows.first().map(|r| r.e_bulk).unwrap_or(0.0);
    for r in &ledger.rows {
        push_row(
            &mut out,
            &[
                fmt(r.t),
                fmt(r.e_bulk),
                fmt(r.cal_e_bulk),
                fmt(r.cross_bulk),
                fmt(r.wall_accum),
                fmt(r.data_accum),
                fmt(r.data_h1_accum),
                fmt(r.data_tan_accum),
                fmt(r.source_accum),
                fmt(r.flux_accum),
                fmt(r.forcing_accum),
                fmt(r.diss_accum),
                fmt(r.wallx_accum),
                fmt(r.tang_rhs_accum),
                fmt(scalar_ratio(e0, sobolev, r)),
            ],
        );
    }
    out
}

pub const TENSOR_CSV_HEADER: &str =
    "t,e_bulk,cal_e_bulk,wall_accum,data_accum,constraint_l2,ham1,ham2,estimate_ratio";

pub fn tensor_ledger_csv(ledger: &GravitoLedger) -> String {
    let mut out = String::new();
    out.push_str(TENSOR_CSV_HEADER);
    out.push('\n');
    let e0 = ledger.rows.first().map(|r| r.cal_e_bulk).unwrap_or(0.0);
    for r in &ledger.rows {
        let ratio = (r.cal_e_bulk + 0.5 * r.wall_accum) / (e0 + r.data_accum + RATIO_GUARD);
        push_row(
            &mut out,
            &[
                fmt(r.t),
                fmt(r.e_bulk),
                fmt(r.cal_e_bulk),
                fmt(r.wall_accum),
                fmt(r.data_accum),
                fmt(r.constraint_l2),
                fmt(r.ham1),
                fmt(r.ham2),
                fmt(ratio),
            ],
        );
    }
    out
}

pub fn f_csv_header() -> String {
    let mut cols = vec!["t".to_string()];
    for c in 0..4 {
        for name in ["e_bulk", "wall_accum", "data_accum", "flux_accum", "estimate_ratio"] {
            cols.push(format!("{name}_{c}"));
        }
    }
    cols.join(",")
}

pub fn f_ledger_csv(ledger: &FLedger) -> String {
    let mut out = f_csv_header();
    out.push('\n');
    let e0: [f64; 4] = ledger.rows.first().map(|r| r.cal_e_bulk).unwrap_or([0.0; 4]);
    for r in &ledger.rows {
        let mut cells = vec![fmt(r.t)];
        for c in 0..4 {
            let ratio =
                (r.cal_e_bulk[c] + 0.5 * r.wall_accum[c]) / (e0[c] + r.data_accum[c] + RATIO_GUARD);
            cells.push(fmt(r.e_bulk[c]));
            cells.push(fmt(r.wall_accum[c]));
            cells.push(fmt(r.data_accum[c]));
            cells.push(fmt(r.flux_accum[c]));
            cells.push(fmt(ratio));
        }
        push_row(&mut out, &cells);
    }
    out
}

// ---------------------------------------------------------------------------
// convergence tables

/// Below this both coarse and fine values count as "exactly zero" and the
/// order column reports `exact` instead of a meaningless log ratio.
pub const EXACT_FLOOR: f64 = 1e-13;

/// Tracked error/residual columns at each resolution of a sweep, with the
/// observed order between consecutive resolutions.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub resolutions: Vec<usize>,
    pub dxs: Vec<f64>,
    pub columns: Vec<String>,
    /// `errors[row][col]`, one row per resolution.
    pub errors: Vec<Vec<f64>>,
    /// `orders[row-1][col]`: observed order from resolution `row-1` to
    /// `row`; `"exact"` when both values sit at the zero floor.
    pub orders: Vec<Vec<String>>,
}

/// Observed order between a coarse and a fine error value:
/// `ln(e_coarse/e_fine) / ln(dx_coarse/dx_fine)`, which is the plain
/// `log₂(e_coarse/e_fine)` on a halving ladder.
pub fn observed_order(coarse: f64, fine: f64, dx_coarse: f64, dx_fine: f64) -> String {
    if coarse.abs() < EXACT_FLOOR && fine.abs() < EXACT_FLOOR {
        "exact".to_string()
    } else if coarse <= 0.0 || fine <= 0.0 || !coarse.is_finite() || !fine.is_finite() {
        "n/a".to_string()
    } else {
        format!("{:.3}", (coarse / fine).ln() / (dx_coarse / dx_fine).ln())
    }
}

impl ConvergenceTable {
    pub fn new(resolutions: Vec<usize>, dxs: Vec<f64>, columns: Vec<String>) -> Self {
        ConvergenceTable { resolutions, dxs, columns, errors: Vec::new(), orders: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "convergence row width");
        if let Some(prev) = self.errors.last() {
            let k = self.errors.len();
            let (dxc, dxf) = (self.dxs[k - 1], self.dxs[k]);
            self.orders.push(
                prev.iter().zip(&row).map(|(c, f)| observed_order(*c, *f, dxc, dxf)).collect(),
            );
        }
        self.errors.push(row);
    }

    /// One rectangular table: a value column and an order column per tracked
    /// metric (the order cell on row `k` is the observed order from row
    /// `k-1`; the first row leaves it empty).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("resolution,dx");
        for col in &self.columns {
            out.push_str(&format!(",{col},{col}_order"));
        }
        out.push('\n');
        for (i, row) in self.errors.iter().enumerate() {
            let mut cells = vec![self.resolutions[i].to_string(), fmt(self.dxs[i])];
            for (j, v) in row.iter().enumerate() {
                cells.push(fmt(*v));
                cells.push(if i == 0 {
                    String::new()
                } else {
                    self.orders[i - 1][j].clone()
                });
            }
            push_row(&mut out, &cells);
        }
        out
    }
}
