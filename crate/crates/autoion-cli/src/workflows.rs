//! The four workflows: spectrum, evolve, zeros, sweep.

use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

use autoion::model::PreparedModel;
use autoion::oracle;
use autoion::spectra;
use autoion::zeros;
use autoion::{derive_reduced, SystemParams};

use crate::config::ResolvedRun;
use crate::output::{ensure_dir, out_path, value_tag, Bundle, Csv, Metadata};
use crate::CliError;

fn numeric(e: autoion::Error) -> CliError {
    CliError::Numeric(e)
}

/// Re-derives the pump amplitude that realizes the requested pump strength
/// for the given couplings.
fn with_pump_strength(base: &SystemParams, omega: f64) -> Result<SystemParams, CliError> {
    let red = derive_reduced(base).map_err(numeric)?;
    let mut p = *base;
    p.alpha_l = C64::new(omega, 0.0)
        / ((4.0 * PI * red.gamma()).sqrt() * (red.q_weighted() + C64::i()) * p.mu);
    Ok(p)
}

#[derive(Serialize)]
struct PoleOut {
    re: f64,
    im: f64,
    eigen_index: usize,
    branch: usize,
}

#[derive(Serialize)]
struct SpectrumCurve {
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    norm_const: f64,
    t_min: f64,
    delta_xi: f64,
    poles: Vec<PoleOut>,
    e: Vec<f64>,
    i_lt: Vec<f64>,
    i_st_0: Vec<f64>,
    i_st_1: Vec<f64>,
    i_osc: Vec<f64>,
    phi: Vec<f64>,
}

#[derive(Serialize)]
struct SpectrumPayload {
    curves: Vec<SpectrumCurve>,
}

pub fn cmd_spectrum(run: &ResolvedRun) -> Result<(), CliError> {
    ensure_dir(&run.out_dir)?;
    let mut curves = Vec::new();
    let cases: Vec<(Option<f64>, SystemParams)> = match &run.omega_values {
        Some(values) => {
            let mut cases = Vec::with_capacity(values.len());
            for &omega in values {
                cases.push((Some(omega), with_pump_strength(&run.params, omega)?));
            }
            cases
        }
        None => vec![(None, run.params)],
    };

    for (omega, p) in &cases {
        let pm = PreparedModel::new(p).map_err(numeric)?;
        let dec = spectra::decompose(&pm, &run.grid);
        let poles = pm
            .pole_set()
            .poles
            .iter()
            .map(|t| PoleOut {
                re: t.value.re,
                im: t.value.im,
                eigen_index: t.eigen_index,
                branch: t.branch,
            })
            .collect();

        if run.format.wants_csv() {
            let name = match omega {
                Some(v) => format!("spectrum_omega{}.csv", value_tag(*v)),
                None => "spectrum.csv".to_string(),
            };
            let mut csv = Csv::new(&["E", "I_lt", "I_st_0", "I_st_1", "I_osc", "phi"]);
            for (i, &e) in dec.grid.values().iter().enumerate() {
                csv.num(e)?;
                csv.num(dec.i_lt[i])?;
                csv.num(dec.i_st_0[i])?;
                csv.num(dec.i_st_1[i])?;
                csv.num(dec.i_osc[i])?;
                csv.num(dec.phi[i])?;
                csv.end_row();
            }
            csv.write_to(&out_path(&run.out_dir, &name))?;
        }

        curves.push(SpectrumCurve {
            omega: *omega,
            norm_const: dec.norm_const,
            t_min: if dec.t_min.is_finite() {
                dec.t_min
            } else {
                -1.0
            },
            delta_xi: pm.rabi.delta_xi,
            poles,
            e: dec.grid.values().to_vec(),
            i_lt: dec.i_lt.clone(),
            i_st_0: dec.i_st_0.clone(),
            i_st_1: dec.i_st_1.clone(),
            i_osc: dec.i_osc.clone(),
            phi: dec.phi.clone(),
        });
    }

    if run.format.wants_json() {
        let bundle = Bundle {
            metadata: Metadata::for_run(run),
            payload: SpectrumPayload { curves },
        };
        crate::output::write_json(&out_path(&run.out_dir, "spectrum.json"), &bundle)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EvolveCurve {
    t: f64,
    e: Vec<f64>,
    i: Vec<f64>,
}

#[derive(Serialize)]
struct OracleCurve {
    t: f64,
    e: Vec<f64>,
    i_analytic: Vec<f64>,
    i_oracle: Vec<f64>,
    rel_l2: f64,
}

#[derive(Serialize)]
struct EvolvePayload {
    norm_const: f64,
    t_min: f64,
    curves: Vec<EvolveCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<EvolveOracle>,
}

#[derive(Serialize)]
struct EvolveOracle {
    e_min: f64,
    e_max: f64,
    n_bins: usize,
    norm_drift: f64,
    curves: Vec<OracleCurve>,
}

pub fn cmd_evolve(run: &ResolvedRun, with_oracle: bool) -> Result<(), CliError> {
    ensure_dir(&run.out_dir)?;
    let pm = PreparedModel::new(&run.params).map_err(numeric)?;
    let dec = spectra::decompose(&pm, &run.grid);
    let norm = if dec.norm_const > 0.0 {
        dec.norm_const
    } else {
        1.0
    };

    let mut curves = Vec::new();
    for &t in &run.times {
        let i: Vec<f64> = if t.is_infinite() {
            dec.i_lt.clone()
        } else {
            run.grid
                .values()
                .iter()
                .map(|&e| spectra::intensity(&pm, e, t) / norm)
                .collect()
        };
        if run.format.wants_csv() {
            let mut csv = Csv::new(&["E", "I"]);
            for (k, &e) in run.grid.values().iter().enumerate() {
                csv.num(e)?;
                csv.num(i[k])?;
                csv.end_row();
            }
            csv.write_to(&out_path(
                &run.out_dir,
                &format!("evolve_t{}.csv", value_tag(t)),
            ))?;
        }
        curves.push(EvolveCurve {
            t,
            e: run.grid.values().to_vec(),
            i,
        });
    }

    let oracle_out = if with_oracle {
        let mut ts: Vec<f64> = run
            .times
            .iter()
            .copied()
            .filter(|t| t.is_finite())
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        if ts.is_empty() {
            None
        } else {
            let orun = oracle::integrate_at(&run.params, &run.oracle_disc, &ts).map_err(numeric)?;
            let energies = run.oracle_disc.energies();
            let w = run.oracle_disc.bin_width();
            let mut ocurves = Vec::new();
            for (ti, &t) in orun.times.iter().enumerate() {
                let mut i_analytic = Vec::with_capacity(energies.len());
                let mut i_oracle = Vec::with_capacity(energies.len());
                let mut num = 0.0;
                let mut den = 0.0;
                for (m, &e) in energies.iter().enumerate() {
                    let d = pm.amplitude(e, t);
                    let ia = (d[0].norm_sqr() + d[1].norm_sqr()) / norm;
                    let io = (orun.d[ti][m][0].norm_sqr() + orun.d[ti][m][1].norm_sqr()) / norm;
                    num += w * (io - ia) * (io - ia);
                    den += w * ia * ia;
                    i_analytic.push(ia);
                    i_oracle.push(io);
                }
                let rel_l2 = if den > 0.0 { (num / den).sqrt() } else { 0.0 };
                if run.format.wants_csv() {
                    let mut csv = Csv::new(&["E", "I", "I_oracle", "abs_err"]);
                    for (m, &e) in energies.iter().enumerate() {
                        csv.num(e)?;
                        csv.num(i_analytic[m])?;
                        csv.num(i_oracle[m])?;
                        csv.num((i_oracle[m] - i_analytic[m]).abs())?;
                        csv.end_row();
                    }
                    csv.write_to(&out_path(
                        &run.out_dir,
                        &format!("evolve_oracle_t{}.csv", value_tag(t)),
                    ))?;
                }
                println!("oracle t={t}: rel L2 = {rel_l2:.6}");
                ocurves.push(OracleCurve {
                    t,
                    e: energies.clone(),
                    i_analytic,
                    i_oracle,
                    rel_l2,
                });
            }
            Some(EvolveOracle {
                e_min: run.oracle_disc.e_min,
                e_max: run.oracle_disc.e_max,
                n_bins: run.oracle_disc.n_bins,
                norm_drift: orun.norm_drift(),
                curves: ocurves,
            })
        }
    } else {
        None
    };

    if run.format.wants_json() {
        let bundle = Bundle {
            metadata: Metadata::for_run(run),
            payload: EvolvePayload {
                norm_const: dec.norm_const,
                t_min: if dec.t_min.is_finite() {
                    dec.t_min
                } else {
                    -1.0
                },
                curves,
                oracle: oracle_out,
            },
        };
        crate::output::write_json(&out_path(&run.out_dir, "evolve.json"), &bundle)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FanoOut {
    kind: &'static str,
    energy: f64,
    normalized: f64,
    residual: f64,
}

#[derive(Serialize)]
struct DynamicalOut {
    channel: usize,
    energy: f64,
    normalized: f64,
    min_intensity: f64,
    t_d: f64,
    phase_at_min: f64,
}

#[derive(Serialize)]
struct WeakPumpOut {
    valid: bool,
    discriminant: [f64; 2],
    zeros: Vec<FanoOut>,
}

#[derive(Serialize)]
struct ZerosPayload {
    e_b: f64,
    gamma: f64,
    fano: Vec<FanoOut>,
    dynamical: Vec<DynamicalOut>,
    weak_pump: WeakPumpOut,
}

pub fn cmd_zeros(run: &ResolvedRun) -> Result<(), CliError> {
    ensure_dir(&run.out_dir)?;
    let p = run.params;
    let gamma = p.gamma_total();
    let norm_of = |e: f64| (e - p.e_b) / gamma;

    let pm = PreparedModel::new(&p).map_err(numeric)?;
    let fano: Vec<FanoOut> = zeros::fano_zeros(&pm)
        .map_err(numeric)?
        .into_iter()
        .map(|z| FanoOut {
            kind: z.kind.as_str(),
            energy: z.energy,
            normalized: norm_of(z.energy),
            residual: z.residual,
        })
        .collect();
    let dynamical: Vec<DynamicalOut> = zeros::dynamical_zeros(&pm)
        .map_err(numeric)?
        .into_iter()
        .map(|z| DynamicalOut {
            channel: z.channel,
            energy: z.energy,
            normalized: norm_of(z.energy),
            min_intensity: z.min_intensity,
            t_d: z.t_d,
            phase_at_min: z.phase_at_min,
        })
        .collect();
    let wp = zeros::weak_pump_zeros(&p);
    let weak_pump = WeakPumpOut {
        valid: wp.valid,
        discriminant: [wp.discriminant.re, wp.discriminant.im],
        zeros: wp
            .zeros
            .iter()
            .map(|z| FanoOut {
                kind: z.kind.as_str(),
                energy: z.energy,
                normalized: norm_of(z.energy),
                residual: z.residual,
            })
            .collect(),
    };

    if run.format.wants_csv() {
        let mut csv = Csv::new(&["kind", "channel", "E", "normalized", "diagnostic"]);
        for z in &fano {
            csv.text(z.kind).int(-1);
            csv.num(z.energy)?;
            csv.num(z.normalized)?;
            csv.num(z.residual)?;
            csv.end_row();
        }
        for z in &dynamical {
            csv.text("dynamical").int(z.channel as i64);
            csv.num(z.energy)?;
            csv.num(z.normalized)?;
            csv.num(z.min_intensity)?;
            csv.end_row();
        }
        for z in &weak_pump.zeros {
            csv.text(z.kind).int(-1);
            csv.num(z.energy)?;
            csv.num(z.normalized)?;
            csv.num(z.residual)?;
            csv.end_row();
        }
        csv.write_to(&out_path(&run.out_dir, "zeros.csv"))?;
    }

    if run.format.wants_json() {
        let bundle = Bundle {
            metadata: Metadata::for_run(run),
            payload: ZerosPayload {
                e_b: p.e_b,
                gamma,
                fano,
                dynamical,
                weak_pump,
            },
        };
        crate::output::write_json(&out_path(&run.out_dir, "zeros.json"), &bundle)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BranchPointOut {
    omega_index: usize,
    omega: f64,
    x: f64,
}

#[derive(Serialize)]
struct BranchOut {
    id: usize,
    channel: usize,
    points: Vec<BranchPointOut>,
}

#[derive(Serialize)]
struct EventOut {
    omega_index: usize,
    omega: f64,
    channel: usize,
    delta: i64,
}

#[derive(Serialize)]
struct FailureOut {
    omega_index: usize,
    omega: f64,
    message: String,
}

#[derive(Serialize)]
struct SweepPayload {
    e_b: f64,
    gamma: f64,
    omega_values: Vec<f64>,
    branches: Vec<BranchOut>,
    events: Vec<EventOut>,
    failures: Vec<FailureOut>,
}

pub fn cmd_sweep(run: &ResolvedRun) -> Result<(), CliError> {
    ensure_dir(&run.out_dir)?;
    let p = run.params;
    let tr = zeros::sweep(&p, &run.omega_sweep).map_err(numeric)?;
    for (idx, msg) in &tr.failures {
        eprintln!(
            "warning: sweep sample omega = {} failed: {msg}",
            tr.omega_values[*idx]
        );
    }

    if run.format.wants_csv() {
        let mut csv = Csv::new(&["Omega", "branch_id", "channel", "E_normalized"]);
        for (id, branch) in tr.branches.iter().enumerate() {
            for &(idx, x) in &branch.points {
                csv.num(tr.omega_values[idx])?;
                csv.int(id as i64).int(branch.channel as i64);
                csv.num(x)?;
                csv.end_row();
            }
        }
        csv.write_to(&out_path(&run.out_dir, "sweep.csv"))?;

        let mut events = Csv::new(&["Omega", "channel", "delta"]);
        for ev in &tr.events {
            events.num(tr.omega_values[ev.omega_index])?;
            events.int(ev.channel as i64).int(ev.delta);
            events.end_row();
        }
        events.write_to(&out_path(&run.out_dir, "events.csv"))?;
    }

    if run.format.wants_json() {
        let bundle = Bundle {
            metadata: Metadata::for_run(run),
            payload: SweepPayload {
                e_b: p.e_b,
                gamma: p.gamma_total(),
                omega_values: tr.omega_values.clone(),
                branches: tr
                    .branches
                    .iter()
                    .enumerate()
                    .map(|(id, b)| BranchOut {
                        id,
                        channel: b.channel,
                        points: b
                            .points
                            .iter()
                            .map(|&(idx, x)| BranchPointOut {
                                omega_index: idx,
                                omega: tr.omega_values[idx],
                                x,
                            })
                            .collect(),
                    })
                    .collect(),
                events: tr
                    .events
                    .iter()
                    .map(|ev| EventOut {
                        omega_index: ev.omega_index,
                        omega: tr.omega_values[ev.omega_index],
                        channel: ev.channel,
                        delta: ev.delta,
                    })
                    .collect(),
                failures: tr
                    .failures
                    .iter()
                    .map(|(idx, msg)| FailureOut {
                        omega_index: *idx,
                        omega: tr.omega_values[*idx],
                        message: msg.clone(),
                    })
                    .collect(),
            },
        };
        crate::output::write_json(&out_path(&run.out_dir, "sweep.json"), &bundle)?;
    }

    let failed = tr.failures.len();
    let total = tr.omega_values.len();
    if failed * 10 > total {
        return Err(CliError::Numeric(autoion::Error::InvalidInput(format!(
            "sweep failed on {failed} of {total} samples (more than 10%)"
        ))));
    }
    Ok(())
}
