//! Command implementations behind the binary: spectrum sweeps, observable
//! time series, Bell reconstruction reports, Husimi fields, and the
//! validation run. Each command returns plain data; writers below serialize
//! to CSV/JSON with round-trip-safe numeric formatting.

use crate::config::{Observable, RunConfig, SCHEMA_VERSION};
use crate::dynamics::{single_qubit_rdms, Evolver, EvolverOptions};
use crate::error::{Error, Result};
use crate::model::{adiabatic_level, build_frame, ModelParams};
use crate::observables::{
    bell_reconstruct, concurrence, geometric_discord, husimi_q, population_inversion,
    quadrature_variance, relative_entropy_coherence, BellReconstruction, HusimiField, HusimiGrid,
};
use crate::oracle;
use crate::qmat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits: round-trip safe for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    G,
    Lambda1,
}

impl std::str::FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "g" => Ok(SweepAxis::G),
            "lambda1" => Ok(SweepAxis::Lambda1),
            other => Err(format!("unknown sweep axis '{other}' (use g | lambda1)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

pub struct SpectrumRow {
    pub sweep_value: f64,
    pub level_index: usize,
    pub e_adiabatic: f64,
    pub e_exact: f64,
    pub abs_error: f64,
}

/// Adiabatic vs exact energies along a one-parameter sweep.
pub fn cmd_spectrum(
    cfg: &RunConfig,
    sweep: SweepSpec,
    levels: usize,
    n_fock: usize,
) -> Result<Vec<SpectrumRow>> {
    if sweep.points == 0 {
        return Err(Error::Config("sweep must contain at least one point".into()));
    }
    if levels == 0 || levels > 4 * 12 {
        return Err(Error::Config("levels must be in 1..=48".into()));
    }
    let values: Vec<f64> = if sweep.points == 1 {
        vec![sweep.from]
    } else {
        (0..sweep.points)
            .map(|i| {
                sweep.from + (sweep.to - sweep.from) * i as f64 / (sweep.points - 1) as f64
            })
            .collect()
    };
    let rows: Vec<Vec<SpectrumRow>> = values
        .par_iter()
        .map(|&v| -> Result<Vec<SpectrumRow>> {
            let mut p: ModelParams = cfg.model;
            match sweep.axis {
                SweepAxis::G => p.g = v,
                SweepAxis::Lambda1 => p.lambda1 = v,
            }
            p.validate()?;
            let frame = build_frame(&p)?;
            let blocks = levels / 4 + 4;
            let mut approx: Vec<f64> = (0..blocks)
                .flat_map(|n| adiabatic_level(&p, &frame, n).energies())
                .collect();
            approx.sort_by(|a, b| a.partial_cmp(b).unwrap());
            approx.truncate(levels);
            let h = oracle::build_full_hamiltonian(&p, n_fock)?;
            let exact = oracle::exact_spectrum(&h, levels)?;
            Ok(approx
                .into_iter()
                .zip(exact)
                .enumerate()
                .map(|(i, (a, e))| SpectrumRow {
                    sweep_value: v,
                    level_index: i,
                    e_adiabatic: a,
                    e_exact: e,
                    abs_error: (a - e).abs(),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_spectrum_csv(rows: &[SpectrumRow], sweep: SweepAxis) -> String {
    let axis = match sweep {
        SweepAxis::G => "g_over_omega",
        SweepAxis::Lambda1 => "lambda1_over_omega",
    };
    let mut out = format!(
        "{axis},level_index,e_adiabatic_over_omega,e_exact_over_omega,abs_error_over_omega\n"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.sweep_value),
            r.level_index,
            fmt_f64(r.e_adiabatic),
            fmt_f64(r.e_exact),
            fmt_f64(r.abs_error)
        );
    }
    out
}

pub struct DynamicsTable {
    pub columns: Vec<String>,
    /// One row per time sample; first entry is ωt.
    pub rows: Vec<Vec<f64>>,
}

/// Time series of the configured observables; deterministic for a fixed
/// config regardless of worker scheduling.
pub fn cmd_dynamics(cfg: &RunConfig) -> Result<DynamicsTable> {
    cfg.validate()?;
    let ev = Evolver::new(
        &cfg.model,
        &cfg.initial,
        EvolverOptions {
            eps_trunc: cfg.tolerances.eps_trunc,
        },
    )?;
    let times = cfg.time_grid.times();
    let needs_osc = cfg.outputs.iter().any(|o| o.needs_oscillator());
    let rows: Vec<Vec<f64>> = times
        .par_iter()
        .map(|&t| -> Result<Vec<f64>> {
            let st = ev.state_at(t);
            let rho = st.two_qubit_rdm().map_err(|e| annotate_time(e, t))?;
            let rho_o = if needs_osc {
                Some(st.oscillator_rdm().map_err(|e| annotate_time(e, t))?)
            } else {
                None
            };
            let mut row = Vec::with_capacity(cfg.outputs.len() + 1);
            row.push(t);
            for obs in &cfg.outputs {
                let v = match obs {
                    Observable::Inversion => population_inversion(&rho)?,
                    Observable::Entropy => qmat::von_neumann_entropy(&rho)?,
                    Observable::EntropyOsc => {
                        qmat::von_neumann_entropy(rho_o.as_ref().unwrap())?
                    }
                    Observable::Coherence => relative_entropy_coherence(&rho)?,
                    Observable::CoherenceQ1 => {
                        let (q1, _) = single_qubit_rdms(&rho)?;
                        relative_entropy_coherence(&q1)?
                    }
                    Observable::CoherenceQ2 => {
                        let (_, q2) = single_qubit_rdms(&rho)?;
                        relative_entropy_coherence(&q2)?
                    }
                    Observable::Discord2 => 2.0 * geometric_discord(&rho)?,
                    Observable::Concurrence => concurrence(&rho)?,
                    Observable::Purity => qmat::purity(&rho),
                    Observable::VMin => quadrature_variance(rho_o.as_ref().unwrap())?.v_min,
                };
                row.push(v);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut columns = vec!["omega_t".to_string()];
    columns.extend(cfg.outputs.iter().map(|o| o.column_name().to_string()));
    Ok(DynamicsTable { columns, rows })
}

fn annotate_time(e: Error, t: f64) -> Error {
    Error::Config(format!("at omega_t = {t}: {e}"))
}

pub fn write_dynamics_csv(table: &DynamicsTable) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
pub struct BellRecord {
    pub omega_t: f64,
    pub concurrence: f64,
    pub purity: f64,
    pub reconstruction: BellReconstruction,
    pub dominant: String,
    pub dominant_amplitude: f64,
}

#[derive(Serialize)]
pub struct BellReport {
    pub schema_version: u32,
    pub records: Vec<BellRecord>,
}

/// Bell reconstruction at the requested times.
pub fn cmd_bell(cfg: &RunConfig, times: &[f64]) -> Result<BellReport> {
    cfg.validate()?;
    if times.is_empty() {
        return Err(Error::Config("bell requires a non-empty time list".into()));
    }
    let ev = Evolver::new(
        &cfg.model,
        &cfg.initial,
        EvolverOptions {
            eps_trunc: cfg.tolerances.eps_trunc,
        },
    )?;
    let records: Vec<BellRecord> = times
        .par_iter()
        .map(|&t| -> Result<BellRecord> {
            let rho = ev.state_at(t).two_qubit_rdm()?;
            let rec = bell_reconstruct(&rho, cfg.seed)?;
            let (dominant, amp) = rec.coefficients.dominant();
            Ok(BellRecord {
                omega_t: t,
                concurrence: concurrence(&rho)?,
                purity: qmat::purity(&rho),
                dominant: dominant.to_string(),
                dominant_amplitude: amp,
                reconstruction: rec,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BellReport {
        schema_version: SCHEMA_VERSION,
        records,
    })
}

#[derive(Serialize)]
pub struct HusimiMeta {
    pub schema_version: u32,
    pub omega_t: f64,
    pub normalization: f64,
    pub v_min: f64,
    pub squeezed: bool,
    pub a_mean: Complex64,
    pub n_mean: f64,
    pub peak_location: Complex64,
    pub peak_value: f64,
    pub grid_size: usize,
}

/// Husimi field of the oscillator state at one time.
pub fn cmd_husimi(cfg: &RunConfig, t: f64) -> Result<(HusimiField, HusimiMeta)> {
    cfg.validate()?;
    let ev = Evolver::new(
        &cfg.model,
        &cfg.initial,
        EvolverOptions {
            eps_trunc: cfg.tolerances.eps_trunc,
        },
    )?;
    let rho_o = ev.state_at(t).oscillator_rdm()?;
    let v = quadrature_variance(&rho_o)?;
    let field = husimi_q(
        &rho_o,
        &HusimiGrid {
            size: cfg.husimi_grid.size,
            center: cfg.husimi_grid.center,
            half_width: cfg.husimi_grid.half_width,
        },
    )?;
    let meta = HusimiMeta {
        schema_version: SCHEMA_VERSION,
        omega_t: t,
        normalization: field.norm_riemann,
        v_min: v.v_min,
        squeezed: v.squeezed,
        a_mean: v.a_mean,
        n_mean: v.n_mean,
        peak_location: field.peak_location,
        peak_value: field.peak_value,
        grid_size: cfg.husimi_grid.size,
    };
    Ok((field, meta))
}

pub fn write_husimi_csv(field: &HusimiField) -> String {
    let mut out = String::from("re_beta,im_beta,q\n");
    let n = field.re_axis.len();
    for (iy, &y) in field.im_axis.iter().enumerate() {
        for (ix, &x) in field.re_axis.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_f64(x),
                fmt_f64(y),
                fmt_f64(field.values[iy * n + ix])
            );
        }
    }
    out
}

/// Runs the validation suite and serializes the machine-readable report.
pub fn cmd_validate(cfg: &RunConfig, skip_oracle: bool) -> crate::validate::ValidationReport {
    crate::validate::run_all(cfg, skip_oracle)
}

pub fn write_output(dir: &Path, name: &str, content: &str) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TimeGrid;

    fn small_cfg() -> RunConfig {
        let mut cfg = RunConfig {
            model: ModelParams {
                omega: 1.0,
                delta1: 0.1,
                delta2: 0.08,
                lambda1: 0.02,
                lambda2: 0.04,
                g: 0.1,
                n_max: None,
            },
            time_grid: TimeGrid {
                t_start: 0.0,
                t_end: 50.0,
                samples: 6,
            },
            ..RunConfig::default()
        };
        cfg.initial.alpha = Complex64::new(1.0, 0.0);
        cfg
    }

    #[test]
    fn dynamics_is_deterministic_and_labeled() {
        let cfg = small_cfg();
        let a = cmd_dynamics(&cfg).unwrap();
        let b = cmd_dynamics(&cfg).unwrap();
        assert_eq!(write_dynamics_csv(&a), write_dynamics_csv(&b));
        assert_eq!(a.columns[0], "omega_t");
        assert_eq!(a.rows.len(), 6);
        assert_eq!(a.columns.len(), cfg.outputs.len() + 1);
        // decoupled config: all correlation measures identically zero
        let mut cfg0 = small_cfg();
        cfg0.model.lambda1 = 0.0;
        cfg0.model.lambda2 = 0.0;
        cfg0.initial.alpha = Complex64::new(0.0, 0.0);
        let t = cmd_dynamics(&cfg0).unwrap();
        let idx = t
            .columns
            .iter()
            .position(|c| c == "concurrence")
            .unwrap();
        for row in &t.rows {
            assert!(row[idx].abs() < 1e-10);
        }
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let cfg = small_cfg();
        assert!(matches!(
            cmd_bell(&cfg, &[]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            cmd_spectrum(
                &cfg,
                SweepSpec {
                    axis: SweepAxis::G,
                    from: 0.0,
                    to: 0.4,
                    points: 0
                },
                12,
                60
            ),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn spectrum_g0_matches_closed_forms() {
        let cfg = small_cfg();
        let rows = cmd_spectrum(
            &cfg,
            SweepSpec {
                axis: SweepAxis::Lambda1,
                from: 0.0,
                to: 0.04,
                points: 2,
            },
            8,
            96,
        )
        .unwrap();
        assert_eq!(rows.len(), 16);
        for r in &rows {
            assert!(r.abs_error < 2e-3, "error {}", r.abs_error);
        }
    }

    #[test]
    fn spectrum_gap_shrinks_along_g_sweep() {
        let mut cfg = small_cfg();
        cfg.model.lambda1 = 0.02;
        cfg.model.lambda2 = 0.02;
        let rows = cmd_spectrum(
            &cfg,
            SweepSpec {
                axis: SweepAxis::G,
                from: 0.0,
                to: 0.45,
                points: 4,
            },
            8,
            128,
        )
        .unwrap();
        // gap between the block ladders shrinks monotonically with g
        let gap_at = |v: f64| -> f64 {
            let of: Vec<&SpectrumRow> = rows
                .iter()
                .filter(|r| (r.sweep_value - v).abs() < 1e-12)
                .collect();
            of[4].e_exact - of[0].e_exact
        };
        let g0 = gap_at(0.0);
        let g45 = gap_at(0.45);
        assert!(g45 < g0, "{g45} vs {g0}");
    }

    #[test]
    fn bell_report_has_gauge_fixed_records() {
        let cfg = RunConfig::default();
        let rep = cmd_bell(&cfg, &[303.0]).unwrap();
        let rec = &rep.records[0];
        assert!((rec.reconstruction.coefficients.norm_sqr() - 1.0).abs() < 1e-10);
        // dominant coefficient is real positive after the gauge
        let amps = rec.reconstruction.coefficients.amplitudes();
        let lead = amps
            .iter()
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        assert!(lead.im.abs() < 1e-9 && lead.re > 0.0);
    }

    #[test]
    fn husimi_meta_reports_normalization() {
        let mut cfg = small_cfg();
        cfg.husimi_grid.size = 101;
        let (field, meta) = cmd_husimi(&cfg, 10.0).unwrap();
        assert!((meta.normalization - 1.0).abs() < 1e-3);
        assert_eq!(field.values.len(), 101 * 101);
    }

    #[test]
    fn csv_numbers_roundtrip() {
        let x = std::f64::consts::PI * 1e4;
        let s = fmt_f64(x);
        let back: f64 = s.parse().unwrap();
        assert_eq!(x, back);
    }
}
