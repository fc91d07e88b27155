//! Zero-range convergence study and contact phase diagram, plus their
//! table output.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::birman_schwinger::{
    limit_scattering_length, scattering_length_bs_with, scattering_length_ode, tune_resonance_with, DEFAULT_NODES,
};
use crate::contact_gap::{critical_temperature, solve_contact_gap, ContactGapProblem, ThermodynamicPoint};
use crate::error::{invalid, Error, Result};
use crate::finite_range::{
    evaluate_gap, momentum_grid, solve_gap_with_kernel, GapKernel, GapSolverOptions, MomentumGridOptions,
};
use crate::potentials::{make_radial_potential, PotentialSpec};

/// Maximum relative disagreement between the resolvent and ODE scattering
/// lengths before a study aborts.
pub const ORACLE_TOL: f64 = 1e-3;

pub const CONVERGENCE_HEADER: [&str; 8] = [
    "ell",
    "lambda",
    "a_bs",
    "a_ode",
    "delta0",
    "delta_fermi",
    "delta_contact",
    "rel_err",
];
pub const PHASE_HEADER: [&str; 2] = ["T", "delta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(invalid(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub kappa: f64,
    /// Strictly decreasing.
    pub ells: Vec<f64>,
    pub mu: f64,
    pub temperature: f64,
    /// Contact scattering length; defaults to the limit of a(V_ℓ).
    pub a: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub bs_nodes: usize,
    pub grid: MomentumGridOptions,
    pub solver: GapSolverOptions,
}

impl RunConfig {
    pub fn new(potential: PotentialSpec, kappa: f64, ells: Vec<f64>, mu: f64, temperature: f64) -> Self {
        Self {
            potential,
            kappa,
            ells,
            mu,
            temperature,
            a: None,
            out: None,
            format: OutputFormat::Csv,
            bs_nodes: DEFAULT_NODES,
            grid: MomentumGridOptions::default(),
            solver: GapSolverOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(invalid(format!("kappa must be positive, got {}", self.kappa)));
        }
        if self.ells.is_empty() {
            return Err(invalid("at least one ell is required"));
        }
        if self.ells.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(invalid("every ell must be positive"));
        }
        if self.ells.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("ells must be strictly decreasing"));
        }
        if let Some(l) = self.ells.iter().find(|l| 1.0 - self.kappa * **l <= 0.0) {
            return Err(invalid(format!(
                "lambda(ell) = 1 - kappa*ell must be positive (ell = {l})"
            )));
        }
        if !self.mu.is_finite() {
            return Err(invalid("mu must be finite"));
        }
        ThermodynamicPoint::new(self.temperature, self.mu)?;
        if let Some(a) = self.a {
            if !(a < 0.0) || !a.is_finite() {
                return Err(invalid(format!("scattering length must be negative, got {a}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub ell: f64,
    pub lambda: f64,
    pub a_bs: f64,
    pub a_ode: f64,
    pub delta0: f64,
    /// Δ_ℓ(√μ), absent when μ ≤ 0.
    pub delta_fermi: Option<f64>,
    pub delta_contact: f64,
    pub rel_err: f64,
}

/// Per-row diagnostics that are not part of the table.
#[derive(Debug, Clone, PartialEq)]
pub struct RowDiagnostics {
    pub ell: f64,
    /// Contact Δ at a(V_ℓ) instead of the limiting scattering length.
    pub delta_contact_at_row_a: f64,
    pub gap_iterations: usize,
    pub grid_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub diagnostics: Vec<RowDiagnostics>,
    /// Limit of a(V_ℓ) as ℓ → 0.
    pub a_limit: f64,
    /// Scattering length used for the contact reference.
    pub a_contact: f64,
    pub delta_contact: f64,
    /// Coupling factor that tuned the base shape to resonance.
    pub resonance_coupling: f64,
}

/// |x − reference|/reference, or |x| when the reference vanishes.
pub fn relative_error(x: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        x.abs()
    } else {
        (x - reference).abs() / reference.abs()
    }
}

fn contact_delta(a: f64, point: ThermodynamicPoint) -> Result<f64> {
    Ok(solve_contact_gap(&ContactGapProblem::new(a, point)?)?.delta)
}

pub fn run_convergence_study(config: &RunConfig) -> Result<ConvergenceStudy> {
    config.validate()?;
    let point = ThermodynamicPoint::new(config.temperature, config.mu)?;
    let shape = make_radial_potential(&config.potential)?;
    let resonant = tune_resonance_with(&shape, config.bs_nodes).map_err(|e| e.context("tuning to resonance"))?;
    let resonance_coupling = resonant.coupling_factor;
    let family = resonant.into_family(config.kappa)?;
    let a_limit = limit_scattering_length(&family)?;
    let a_contact = config.a.unwrap_or(a_limit);
    let delta_contact = contact_delta(a_contact, point).map_err(|e| e.context("contact gap at the limit"))?;
    let seed = if delta_contact > 0.0 {
        delta_contact
    } else {
        0.1 * (config.mu.abs() + 1.0)
    };

    let results: Vec<Result<(ConvergenceRow, RowDiagnostics)>> = config
        .ells
        .par_iter()
        .map(|&ell| {
            let row = || -> Result<(ConvergenceRow, RowDiagnostics)> {
                let lambda = family.lambda(ell);
                let v = family.member(ell)?;
                let a_bs = scattering_length_bs_with(&v, config.bs_nodes)?;
                let a_ode = scattering_length_ode(&v)?;
                if relative_error(a_bs, a_ode) > ORACLE_TOL {
                    return Err(Error::ScatteringLengthUndefined(format!(
                        "resolvent value {a_bs} and ODE value {a_ode} disagree beyond {ORACLE_TOL:e}"
                    )));
                }
                let grid = momentum_grid(&v, config.mu, config.grid)?;
                let kernel = GapKernel::new(&v, &grid)?;
                let gap = solve_gap_with_kernel(&kernel, point, seed, config.solver)?;
                let delta0 = gap.at_zero;
                let delta_fermi = if config.mu > 0.0 {
                    Some(if gap.is_zero() {
                        0.0
                    } else {
                        evaluate_gap(&kernel, &gap, config.mu.sqrt())?.abs()
                    })
                } else {
                    None
                };
                let delta_contact_at_row_a = if a_bs < 0.0 {
                    contact_delta(a_bs, point)?
                } else {
                    f64::NAN
                };
                Ok((
                    ConvergenceRow {
                        ell,
                        lambda,
                        a_bs,
                        a_ode,
                        delta0,
                        delta_fermi,
                        delta_contact,
                        rel_err: relative_error(delta0, delta_contact),
                    },
                    RowDiagnostics {
                        ell,
                        delta_contact_at_row_a,
                        gap_iterations: gap.iterations,
                        grid_nodes: grid.len(),
                    },
                ))
            };
            row().map_err(|e| e.context(format!("ell = {ell}")))
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut diagnostics = Vec::with_capacity(results.len());
    for r in results {
        let (row, diag) = r?;
        rows.push(row);
        diagnostics.push(diag);
    }
    Ok(ConvergenceStudy {
        rows,
        diagnostics,
        a_limit,
        a_contact,
        delta_contact,
        resonance_coupling,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRow {
    #[serde(rename = "T")]
    pub temperature: f64,
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub critical_temperature: f64,
    pub rows: Vec<PhaseRow>,
}

/// Contact Δ(T) on `steps` uniform temperatures over [0, 1.2·T_c].
pub fn run_phase_diagram(mu: f64, a: f64, steps: usize) -> Result<PhaseDiagram> {
    if steps < 2 {
        return Err(invalid("phase diagram needs at least 2 steps"));
    }
    let tc = critical_temperature(a, mu)?;
    let t_max = 1.2 * tc;
    let rows: Result<Vec<PhaseRow>> = (0..steps)
        .into_par_iter()
        .map(|k| {
            let t = t_max * k as f64 / (steps - 1) as f64;
            let delta = contact_delta(a, ThermodynamicPoint::new(t, mu)?)?;
            Ok(PhaseRow { temperature: t, delta })
        })
        .collect();
    Ok(PhaseDiagram {
        critical_temperature: tc,
        rows: rows?,
    })
}

/// C-style `%.12e`: mantissa with 12 decimals, signed exponent of at least
/// two digits.
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exponent) = s.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let sign = if exponent < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exponent.abs())
}

fn write_csv<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_convergence_csv<W: Write>(out: W, rows: &[ConvergenceRow]) -> Result<()> {
    write_csv(
        out,
        &CONVERGENCE_HEADER,
        rows.iter().map(|r| {
            vec![
                format_sci(r.ell),
                format_sci(r.lambda),
                format_sci(r.a_bs),
                format_sci(r.a_ode),
                format_sci(r.delta0),
                r.delta_fermi.map(format_sci).unwrap_or_default(),
                format_sci(r.delta_contact),
                format_sci(r.rel_err),
            ]
        }),
    )
}

pub fn write_convergence_json<W: Write>(mut out: W, rows: &[ConvergenceRow]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_phase_csv<W: Write>(out: W, rows: &[PhaseRow]) -> Result<()> {
    write_csv(
        out,
        &PHASE_HEADER,
        rows.iter()
            .map(|r| vec![format_sci(r.temperature), format_sci(r.delta)]),
    )
}

/// One human-readable line per row with the diagnostics left out of the
/// table.
pub fn describe_diagnostics(study: &ConvergenceStudy) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "resonance coupling {:.9}, a_limit {:.9}, a_contact {:.9}, contact delta {:.9}",
        study.resonance_coupling, study.a_limit, study.a_contact, study.delta_contact
    );
    for d in &study.diagnostics {
        let _ = writeln!(
            s,
            "ell {}: contact delta at a(V_ell) {:.9}, {} iterations, {} momentum nodes",
            d.ell, d.delta_contact_at_row_a, d.gap_iterations, d.grid_nodes
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(1.5), "1.500000000000e+00");
        assert_eq!(format_sci(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(format_sci(6.02214076e123), "6.022140760000e+123");
    }

    #[test]
    fn config_validation() {
        let spec: PotentialSpec = "well:1,1".parse().unwrap();
        let mut c = RunConfig::new(spec, 1.0, vec![0.2, 0.1], 1.0, 0.0);
        assert!(c.validate().is_ok());
        c.ells = vec![0.1, 0.2];
        assert!(c.validate().is_err());
        c.ells = vec![1.5];
        assert!(c.validate().is_err());
        c.ells = vec![0.1];
        c.temperature = -1.0;
        assert!(c.validate().unwrap_err().is_config_error());
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_phase_csv(
            &mut buf,
            &[PhaseRow {
                temperature: 0.0,
                delta: 0.25,
            }],
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "T,delta\n0.000000000000e+00,2.500000000000e-01\n"
        );
    }
}
