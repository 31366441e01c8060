//! Deterministic renderers for every output the CLI emits, plus parsers for
//! the CSV formats so emitted tables can be read back.
//!
//! All numbers are written with Rust's shortest-round-trip `f64` formatting;
//! parsing a rendered table recovers the exact bits. Negative infinity
//! renders as the literal `-inf` (and parses back), matching the JSON
//! convention used for QCNR.

use cvqkd_core::{
    Autocorrelation, Histogram, KeyRateResult, MiEstimate, NoiseModelKind, SweepRow, SweepSpec,
    SystemParams, TraceStats, VariancePowerScan,
};
use serde::Serialize;

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn fmt_models(models: &[NoiseModelKind]) -> String {
    models
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// One key-rate point as JSON: the inputs under `params`, the full result
/// (budget and covariance intermediates included) under `result`.
pub fn render_point_json(
    model: NoiseModelKind,
    params: &SystemParams,
    result: &KeyRateResult,
) -> String {
    #[derive(Serialize)]
    struct PointReport<'a> {
        model: NoiseModelKind,
        params: &'a SystemParams,
        result: &'a KeyRateResult,
    }
    let mut out = serde_json::to_string_pretty(&PointReport {
        model,
        params,
        result,
    })
    .expect("point report serializes");
    out.push('\n');
    out
}

pub const POINT_CSV_HEADER: &str = "model,length_km,attenuation_db_per_km,va,f,eta_b,nu_b,\
xi_const,xi_slope,i_ab,chi_be,rate_raw,rate,xi_ch,xi_det,xi_tot,xi_det_eve,xi_tot_eve,\
a_val,b_val,c_val,d_val,lambda1,lambda2,lambda3,lambda4,lambda5,clamped";

pub fn render_point_csv(
    model: NoiseModelKind,
    params: &SystemParams,
    result: &KeyRateResult,
) -> String {
    let b = &result.budget;
    let i = &result.intermediates;
    format!(
        "# cvqkd point v{VERSION}\n{POINT_CSV_HEADER}\n\
         {model},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        params.channel.length_km,
        params.channel.attenuation_db_per_km,
        params.protocol.v_a,
        params.protocol.f_rec,
        params.detector.eta_b,
        params.detector.nu_b,
        params.prep.xi_const,
        params.prep.xi_slope,
        result.i_ab,
        result.chi_be,
        result.rate_raw,
        result.rate,
        b.xi_ch,
        b.xi_det,
        b.xi_tot,
        b.xi_det_eve,
        b.xi_tot_eve,
        i.a_val,
        i.b_val,
        i.c_val,
        i.d_val,
        i.lambda[0],
        i.lambda[1],
        i.lambda[2],
        i.lambda[3],
        i.lambda[4],
        i.clamped,
    )
}

/// The numeric core of a rendered point row.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCsvRow {
    pub model: NoiseModelKind,
    pub i_ab: f64,
    pub chi_be: f64,
    pub rate_raw: f64,
    pub rate: f64,
}

pub fn parse_point_csv(text: &str) -> Result<PointCsvRow, CliError> {
    let mut rows = data_lines(text, POINT_CSV_HEADER)?;
    let Some((line_no, fields)) = rows.pop() else {
        return Err(CliError::Usage("point table has no data row".into()));
    };
    if fields.len() != 28 {
        return Err(CliError::Usage(format!(
            "line {line_no}: expected 28 fields, got {}",
            fields.len()
        )));
    }
    Ok(PointCsvRow {
        model: parse_model(&fields[0], line_no)?,
        i_ab: parse_field(&fields[9], "i_ab", line_no)?,
        chi_be: parse_field(&fields[10], "chi_be", line_no)?,
        rate_raw: parse_field(&fields[11], "rate_raw", line_no)?,
        rate: parse_field(&fields[12], "rate", line_no)?,
    })
}

pub const SWEEP_CSV_HEADER: &str = "distance_km,model,optimal_va,i_ab,chi_be,rate_raw,rate";

/// Sweep results as CSV with the run recipe in `#` preamble lines.
pub fn render_sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(&render_sweep_preamble(spec));
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.distance_km, r.model, r.optimal_va, r.i_ab, r.chi_be, r.rate_raw, r.rate
        ));
    }
    out
}

fn render_sweep_preamble(spec: &SweepSpec) -> String {
    let d = &spec.distances_km;
    format!(
        "# cvqkd sweep v{VERSION}\n\
         # models = {}\n\
         # distances_km = {} points in [{}, {}]\n\
         # attenuation_db_per_km = {}\n\
         # f = {}\n\
         # eta_b = {}\n\
         # nu_b = {}\n\
         # xi_a = xi_const + xi_slope * va; xi_const = {}, xi_slope = {}\n\
         # va_bracket = [{}, {}]\n\
         # grid_points = {}\n\
         # refine_iters = {}\n\
         # va_tol = {}\n",
        fmt_models(&spec.models),
        d.len(),
        d.first().copied().unwrap_or(f64::NAN),
        d.last().copied().unwrap_or(f64::NAN),
        spec.attenuation_db_per_km,
        spec.f_rec,
        spec.detector.eta_b,
        spec.detector.nu_b,
        spec.prep.xi_const,
        spec.prep.xi_slope,
        spec.optimizer.v_min,
        spec.optimizer.v_max,
        spec.optimizer.grid_points,
        spec.optimizer.refine_iters,
        spec.optimizer.va_tol,
    )
}

/// Sweep results as JSON: the resolved spec plus all rows.
pub fn render_sweep_json(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    #[derive(Serialize)]
    struct SweepReport<'a> {
        spec: &'a SweepSpec,
        rows: &'a [SweepRow],
    }
    let mut out =
        serde_json::to_string_pretty(&SweepReport { spec, rows }).expect("sweep serializes");
    out.push('\n');
    out
}

/// One parsed sweep row (the CSV columns; internal fields like the
/// preparation noise at the optimum are JSON-only).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepCsvRow {
    pub distance_km: f64,
    pub model: NoiseModelKind,
    pub optimal_va: f64,
    pub i_ab: f64,
    pub chi_be: f64,
    pub rate_raw: f64,
    pub rate: f64,
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepCsvRow>, CliError> {
    data_lines(text, SWEEP_CSV_HEADER)?
        .into_iter()
        .map(|(line_no, fields)| {
            if fields.len() != 7 {
                return Err(CliError::Usage(format!(
                    "line {line_no}: expected 7 fields, got {}",
                    fields.len()
                )));
            }
            Ok(SweepCsvRow {
                distance_km: parse_field(&fields[0], "distance_km", line_no)?,
                model: parse_model(&fields[1], line_no)?,
                optimal_va: parse_field(&fields[2], "optimal_va", line_no)?,
                i_ab: parse_field(&fields[3], "i_ab", line_no)?,
                chi_be: parse_field(&fields[4], "chi_be", line_no)?,
                rate_raw: parse_field(&fields[5], "rate_raw", line_no)?,
                rate: parse_field(&fields[6], "rate", line_no)?,
            })
        })
        .collect()
}

pub fn render_autocorr_csv(ac: &Autocorrelation, label: &str, n: usize) -> String {
    let mut out = format!(
        "# cvqkd autocorr v{VERSION}\n# label = {label}\n# n = {n}\n# white_noise_band = {}\nlag,r\n",
        ac.white_noise_band
    );
    for (lag, r) in ac.r.iter().enumerate() {
        out.push_str(&format!("{lag},{r}\n"));
    }
    out
}

pub fn render_histogram_csv(h: &Histogram, label: &str, n: usize) -> String {
    let mut out = format!(
        "# cvqkd histogram v{VERSION}\n# label = {label}\n# n = {n}\n# fit_mean = {}\n# fit_variance = {}\nbin_center,probability\n",
        h.fit_mean, h.fit_variance
    );
    for (center, p) in h.bin_centers.iter().zip(&h.probabilities) {
        out.push_str(&format!("{center},{p}\n"));
    }
    out
}

pub fn render_linearity_csv(scan: &VariancePowerScan) -> String {
    let mut out = format!(
        "# cvqkd linearity v{VERSION}\n# slope = {}\n# intercept = {}\n# r_squared = {}\npower_mw,sigma_t2\n",
        scan.slope, scan.intercept, scan.r_squared
    );
    for p in &scan.points {
        out.push_str(&format!("{},{}\n", p.lo_power_mw, p.sigma_t2));
    }
    out
}

/// Parses any of the two-column analysis tables (`lag,r`,
/// `bin_center,probability`, `power_mw,sigma_t2`).
pub fn parse_xy_csv(text: &str, header: &str) -> Result<Vec<(f64, f64)>, CliError> {
    data_lines(text, header)?
        .into_iter()
        .map(|(line_no, fields)| {
            if fields.len() != 2 {
                return Err(CliError::Usage(format!(
                    "line {line_no}: expected 2 fields, got {}",
                    fields.len()
                )));
            }
            Ok((
                parse_field(&fields[0], "x", line_no)?,
                parse_field(&fields[1], "y", line_no)?,
            ))
        })
        .collect()
}

/// Per-signal summary assembled by `analyze`.
#[derive(Clone, Debug, Serialize)]
pub struct SignalReport {
    pub path: String,
    pub label: String,
    pub stats: TraceStats,
    pub r1: f64,
    pub max_abs_r: f64,
    pub max_lag: usize,
    pub white_noise_band: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub dark_path: String,
    pub dark_n: usize,
    pub sigma_e2: f64,
    pub signals: Vec<SignalReport>,
    pub linearity: Option<VariancePowerScan>,
}

pub fn render_analyze_text(report: &AnalyzeReport) -> String {
    let mut out = format!(
        "# cvqkd analyze v{VERSION}\ndark {}\n  n = {}\n  sigma_e2 = {}\n",
        report.dark_path, report.dark_n, report.sigma_e2
    );
    for s in &report.signals {
        out.push_str(&format!(
            "signal {}\n  label = {}\n  n = {}\n  mean = {}\n  sigma_t2 = {}\n  sigma_e2 = {}\n  sigma_q2 = {}\n  qcnr_db = {}\n  drift_warning = {}\n  r1 = {}\n  max_abs_r = {} (lags 1..{})\n  white_noise_band = {}\n",
            s.path,
            s.label,
            s.stats.n,
            s.stats.mean,
            s.stats.sigma_t2,
            s.stats.sigma_e2,
            s.stats.sigma_q2,
            s.stats.qcnr_db,
            s.stats.drift_warning,
            s.r1,
            s.max_abs_r,
            s.max_lag,
            s.white_noise_band,
        ));
    }
    if let Some(fit) = &report.linearity {
        out.push_str(&format!(
            "linearity\n  slope = {}\n  intercept = {}\n  r_squared = {}\n",
            fit.slope, fit.intercept, fit.r_squared
        ));
    }
    out
}

pub fn render_analyze_json(report: &AnalyzeReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("analyze report serializes");
    out.push('\n');
    out
}

pub const MC_CSV_HEADER: &str =
    "va,xi_tot,n,seed,mi_analytic,mi_empirical,abs_error,rel_error,rho_x,rho_p,saturated";

/// Analytic-versus-empirical mutual information comparison.
pub fn render_mc_table(
    va: f64,
    xi_tot: f64,
    n: usize,
    seed: u64,
    analytic: f64,
    est: &MiEstimate,
) -> String {
    let abs_error = (est.mi_bits - analytic).abs();
    let rel_error = abs_error / analytic;
    format!(
        "# cvqkd mc-validate v{VERSION}\n\
         # estimator: {}\n\
         # rng: ChaCha8 (rand_chacha 0.9) with ziggurat normal draws (rand_distr 0.5)\n\
         {MC_CSV_HEADER}\n\
         {va},{xi_tot},{n},{seed},{analytic},{},{abs_error},{rel_error},{},{},{}\n",
        cvqkd_core::MI_ESTIMATOR,
        est.mi_bits,
        est.rho_x,
        est.rho_p,
        est.saturated,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McCsvRow {
    pub va: f64,
    pub xi_tot: f64,
    pub n: usize,
    pub seed: u64,
    pub mi_analytic: f64,
    pub mi_empirical: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

pub fn parse_mc_table(text: &str) -> Result<McCsvRow, CliError> {
    let mut rows = data_lines(text, MC_CSV_HEADER)?;
    let Some((line_no, fields)) = rows.pop() else {
        return Err(CliError::Usage("mc-validate table has no data row".into()));
    };
    if fields.len() != 11 {
        return Err(CliError::Usage(format!(
            "line {line_no}: expected 11 fields, got {}",
            fields.len()
        )));
    }
    Ok(McCsvRow {
        va: parse_field(&fields[0], "va", line_no)?,
        xi_tot: parse_field(&fields[1], "xi_tot", line_no)?,
        n: fields[2]
            .parse()
            .map_err(|_| CliError::Usage(format!("line {line_no}: bad n '{}'", fields[2])))?,
        seed: fields[3]
            .parse()
            .map_err(|_| CliError::Usage(format!("line {line_no}: bad seed '{}'", fields[3])))?,
        mi_analytic: parse_field(&fields[4], "mi_analytic", line_no)?,
        mi_empirical: parse_field(&fields[5], "mi_empirical", line_no)?,
        abs_error: parse_field(&fields[6], "abs_error", line_no)?,
        rel_error: parse_field(&fields[7], "rel_error", line_no)?,
    })
}

/// Strips `#` preamble lines, checks the header, and splits data rows into
/// fields tagged with their 1-based line number.
fn data_lines(text: &str, header: &str) -> Result<Vec<(usize, Vec<String>)>, CliError> {
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (idx, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if line != header {
                return Err(CliError::Usage(format!(
                    "line {}: expected header '{header}', got '{line}'",
                    idx + 1
                )));
            }
            header_seen = true;
            continue;
        }
        rows.push((idx + 1, line.split(',').map(str::to_string).collect()));
    }
    if !header_seen {
        return Err(CliError::Usage(format!("missing header '{header}'")));
    }
    Ok(rows)
}

fn parse_field(value: &str, name: &str, line_no: usize) -> Result<f64, CliError> {
    value.parse().map_err(|_| {
        CliError::Usage(format!("line {line_no}: bad {name} value '{value}'"))
    })
}

fn parse_model(value: &str, line_no: usize) -> Result<NoiseModelKind, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("line {line_no}: unknown model '{value}'")))
}
