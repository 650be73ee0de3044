//! Brute-force validation: direct integration of the coupled amplitude
//! equations with the continuum replaced by a uniform comb of levels.
//!
//! Couplings into the continuum are scaled by the square root of the bin
//! width so the discrete model reproduces the golden-rule widths; the
//! discrete system is then exactly norm conserving and an adaptive
//! Runge-Kutta step (Dormand-Prince 5(4)) keeps the integration error far
//! below the discretization error.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{build, PreparedModel};
use crate::params::SystemParams;

/// Local error tolerance of the adaptive step.
pub const LOCAL_TOL: f64 = 1e-10;

/// Uniform discretization of the continuum.
#[derive(Clone, Copy, Debug)]
pub struct ContinuumDiscretization {
    pub e_min: f64,
    pub e_max: f64,
    pub n_bins: usize,
}

impl ContinuumDiscretization {
    /// Default window of eight total widths around the pump, 1600 bins.
    pub fn default_for(p: &SystemParams) -> Self {
        let gamma = p.gamma_total().max(1e-3);
        ContinuumDiscretization {
            e_min: p.e_l - 8.0 * gamma,
            e_max: p.e_l + 8.0 * gamma,
            n_bins: 1600,
        }
    }

    /// The window must contain eight total widths to each side of the pump
    /// and resolve the continuum with at least 400 bins.
    pub fn validate_for(&self, p: &SystemParams) -> Result<()> {
        let gamma = p.gamma_total();
        if self.n_bins < 400 {
            return Err(Error::InvalidInput(format!(
                "continuum discretization needs >= 400 bins, got {}",
                self.n_bins
            )));
        }
        if self.e_min > p.e_l - 8.0 * gamma + 1e-12 || self.e_max < p.e_l + 8.0 * gamma - 1e-12 {
            return Err(Error::InvalidInput(format!(
                "window [{}, {}] must contain [{}, {}]",
                self.e_min,
                self.e_max,
                p.e_l - 8.0 * gamma,
                p.e_l + 8.0 * gamma
            )));
        }
        Ok(())
    }

    pub fn bin_width(&self) -> f64 {
        (self.e_max - self.e_min) / self.n_bins as f64
    }

    /// Midpoint energies of the bins.
    pub fn energies(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..self.n_bins)
            .map(|m| self.e_min + (m as f64 + 0.5) * w)
            .collect()
    }
}

/// Amplitudes along the integration, sampled at the output instants.
#[derive(Clone, Debug)]
pub struct OracleRun {
    pub disc: ContinuumDiscretization,
    pub times: Vec<f64>,
    /// Discrete amplitudes per instant.
    pub c: Vec<[C64; 4]>,
    /// Continuum amplitude densities per instant and bin (channels 0, 1);
    /// `sum_bins w (|d_0|^2 + |d_1|^2)` approximates the ionized fraction.
    pub d: Vec<Vec<[C64; 2]>>,
    /// Total norm per instant; drift measures integration quality.
    pub norm_history: Vec<f64>,
}

impl OracleRun {
    pub fn norm_drift(&self) -> f64 {
        self.norm_history
            .iter()
            .map(|n| (n - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Integrates from the ground state to `t_end`, reporting `n_out` uniformly
/// spaced instants (the last one exactly `t_end`).
pub fn integrate(
    p: &SystemParams,
    disc: &ContinuumDiscretization,
    t_end: f64,
    n_out: usize,
) -> Result<OracleRun> {
    if !(t_end > 0.0) || n_out == 0 {
        return Err(Error::InvalidInput(
            "t_end must be positive and n_out nonzero".into(),
        ));
    }
    let times: Vec<f64> = if n_out == 1 {
        vec![t_end]
    } else {
        (0..n_out)
            .map(|i| t_end * i as f64 / (n_out - 1) as f64)
            .collect()
    };
    integrate_at(p, disc, &times)
}

/// Integrates and samples at the given strictly increasing instants.
pub fn integrate_at(
    p: &SystemParams,
    disc: &ContinuumDiscretization,
    times: &[f64],
) -> Result<OracleRun> {
    disc.validate_for(p)?;
    if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) || times[0] < 0.0 {
        return Err(Error::InvalidInput(
            "output instants must be nonnegative and strictly increasing".into(),
        ));
    }

    let n_bins = disc.n_bins;
    let w = disc.bin_width();
    let sqrt_w = w.sqrt();
    let energies = disc.energies();
    let mm = build(p);

    // state layout: 4 discrete amplitudes, then channel-0 bins, channel-1 bins
    // (bin amplitudes carry the sqrt-width scaling, so the norm is a plain sum)
    let dim = 4 + 2 * n_bins;
    let mut y = vec![C64::new(0.0, 0.0); dim];
    y[0] = C64::new(1.0, 0.0);

    let pump_a = p.pump_a();
    let de_a = p.detuning_a();
    let k_diag0: Vec<f64> = energies.iter().map(|e| e - p.e_l).collect();

    let rhs = |y: &[C64], dy: &mut [C64]| {
        let c = &y[..4];
        let d0 = &y[4..4 + n_bins];
        let d1 = &y[4 + n_bins..];
        let s0: C64 = d0.iter().sum();
        let s1: C64 = d1.iter().sum();
        let minus_i = C64::new(0.0, -1.0);
        for i in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..4 {
                acc += mm.a.0[i][j] * c[j];
            }
            acc += sqrt_w * (mm.b.0[i][0] * s0 + mm.b.0[i][1] * s1);
            dy[i] = minus_i * acc;
        }
        // B^dagger c is shared by every bin
        let bc0 = mm.b.0[0][0].conj() * c[0]
            + mm.b.0[1][0].conj() * c[1]
            + mm.b.0[2][0].conj() * c[2]
            + mm.b.0[3][0].conj() * c[3];
        let bc1 = mm.b.0[0][1].conj() * c[0]
            + mm.b.0[1][1].conj() * c[1]
            + mm.b.0[2][1].conj() * c[2]
            + mm.b.0[3][1].conj() * c[3];
        for m in 0..n_bins {
            let k00 = k_diag0[m];
            let a0 = sqrt_w * bc0 + k00 * d0[m] + pump_a.conj() * d1[m];
            let a1 = sqrt_w * bc1 + pump_a * d0[m] + (k00 + de_a) * d1[m];
            dy[4 + m] = minus_i * a0;
            dy[4 + n_bins + m] = minus_i * a1;
        }
    };

    let mut stepper = DormandPrince::new(dim);
    let mut t = 0.0;
    let mut h = 1e-3;
    let t_final = *times.last().unwrap();

    let mut out_c = Vec::with_capacity(times.len());
    let mut out_d = Vec::with_capacity(times.len());
    let mut out_norm = Vec::with_capacity(times.len());
    let record = |y: &[C64],
                  out_c: &mut Vec<[C64; 4]>,
                  out_d: &mut Vec<Vec<[C64; 2]>>,
                  out_norm: &mut Vec<f64>| {
        out_c.push([y[0], y[1], y[2], y[3]]);
        let mut bins = Vec::with_capacity(n_bins);
        for m in 0..n_bins {
            // unscale to amplitude densities
            bins.push([y[4 + m] / sqrt_w, y[4 + n_bins + m] / sqrt_w]);
        }
        out_d.push(bins);
        out_norm.push(y.iter().map(|z| z.norm_sqr()).sum::<f64>());
    };

    let mut next_out = 0usize;
    while next_out < times.len() && times[next_out] <= t {
        record(&y, &mut out_c, &mut out_d, &mut out_norm);
        next_out += 1;
    }

    let h_min = 1e-12 * t_final.max(1.0);
    while t < t_final {
        let target = times[next_out];
        if h > target - t {
            h = target - t;
        }
        match stepper.step(&rhs, &y, t, h) {
            StepOutcome::Accept { y_new, h_next } => {
                t += h;
                y = y_new;
                h = h_next.min(t_final - t + 1e-30).max(h_min);
                if (t - target).abs() <= 1e-12 * target.max(1.0) {
                    record(&y, &mut out_c, &mut out_d, &mut out_norm);
                    next_out += 1;
                    if next_out >= times.len() {
                        break;
                    }
                }
            }
            StepOutcome::Reject { h_next } => {
                if h_next < h_min {
                    return Err(Error::StepFailure { t, h: h_next });
                }
                h = h_next;
            }
        }
    }

    Ok(OracleRun {
        disc: *disc,
        times: times.to_vec(),
        c: out_c,
        d: out_d,
        norm_history: out_norm,
    })
}

enum StepOutcome {
    Accept { y_new: Vec<C64>, h_next: f64 },
    Reject { h_next: f64 },
}

/// Dormand-Prince 5(4) with a PI-free elementary controller.
struct DormandPrince {
    k: [Vec<C64>; 7],
    y_stage: Vec<C64>,
}

impl DormandPrince {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    fn new(dim: usize) -> Self {
        DormandPrince {
            k: std::array::from_fn(|_| vec![C64::new(0.0, 0.0); dim]),
            y_stage: vec![C64::new(0.0, 0.0); dim],
        }
    }

    fn step<F: Fn(&[C64], &mut [C64])>(
        &mut self,
        rhs: &F,
        y: &[C64],
        _t: f64,
        h: f64,
    ) -> StepOutcome {
        let dim = y.len();
        rhs(y, &mut self.k[0]);
        for stage in 0..6 {
            for i in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for (j, kj) in self.k.iter().enumerate().take(stage + 1) {
                    let a = Self::A[stage][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                self.y_stage[i] = y[i] + h * acc;
            }
            let (head, tail) = self.k.split_at_mut(stage + 1);
            let _ = head;
            rhs(&self.y_stage, &mut tail[0]);
        }

        let mut y_new = vec![C64::new(0.0, 0.0); dim];
        let mut err_ratio_sq = 0.0f64;
        for i in 0..dim {
            let mut y5 = C64::new(0.0, 0.0);
            let mut y4 = C64::new(0.0, 0.0);
            for (j, kj) in self.k.iter().enumerate() {
                if Self::B5[j] != 0.0 {
                    y5 += Self::B5[j] * kj[i];
                }
                if Self::B4[j] != 0.0 {
                    y4 += Self::B4[j] * kj[i];
                }
            }
            let y5 = y[i] + h * y5;
            let y4 = y[i] + h * y4;
            let sc = LOCAL_TOL + LOCAL_TOL * y[i].norm().max(y5.norm());
            let e = (y5 - y4).norm() / sc;
            err_ratio_sq += e * e;
            y_new[i] = y5;
        }
        let err = (err_ratio_sq / dim as f64).sqrt();

        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        if err <= 1.0 {
            StepOutcome::Accept {
                y_new,
                h_next: h * factor,
            }
        } else {
            StepOutcome::Reject { h_next: h * factor }
        }
    }
}

/// Per-instant relative L2 distance between the integrated and the analytic
/// intensity spectra.
#[derive(Clone, Debug)]
pub struct ComparisonReport {
    /// `(t, relative L2 error)` per output instant (t = 0 skipped: both
    /// spectra vanish identically).
    pub per_instant: Vec<(f64, f64)>,
}

pub fn compare(run: &OracleRun, p: &SystemParams) -> Result<ComparisonReport> {
    let pm = PreparedModel::new(p)?;
    let energies = run.disc.energies();
    let w = run.disc.bin_width();
    let mut per_instant = Vec::with_capacity(run.times.len());
    for (ti, &t) in run.times.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (m, &e) in energies.iter().enumerate() {
            let d = pm.amplitude(e, t);
            let analytic = d[0].norm_sqr() + d[1].norm_sqr();
            let oracle = run.d[ti][m][0].norm_sqr() + run.d[ti][m][1].norm_sqr();
            num += w * (oracle - analytic) * (oracle - analytic);
            den += w * analytic * analytic;
        }
        per_instant.push((t, (num / den.max(f64::MIN_POSITIVE)).sqrt()));
    }
    Ok(ComparisonReport { per_instant })
}

/// One stage of the joint refinement study.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub n_bins: usize,
    pub half_width: f64,
    pub rel_l2: f64,
}

/// Doubles the bin count and the window together (fixed bin width), so both
/// the comb spacing and the band truncation shrink; the discrete model then
/// converges to the flat-continuum solution.
pub fn convergence_study(
    p: &SystemParams,
    base: &ContinuumDiscretization,
    doublings: usize,
    t: f64,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::with_capacity(doublings + 1);
    let center = 0.5 * (base.e_min + base.e_max);
    let mut half = 0.5 * (base.e_max - base.e_min);
    let mut n_bins = base.n_bins;
    for _ in 0..=doublings {
        let disc = ContinuumDiscretization {
            e_min: center - half,
            e_max: center + half,
            n_bins,
        };
        let run = integrate(p, &disc, t, 2)?;
        let report = compare(&run, p)?;
        let (_, err) = *report.per_instant.last().expect("one instant");
        rows.push(ConvergenceRow {
            n_bins,
            half_width: half,
            rel_l2: err,
        });
        n_bins *= 2;
        half *= 2.0;
    }
    Ok(rows)
}
