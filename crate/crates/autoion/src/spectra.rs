//! Photoelectron spectra: finite-time conditional amplitudes, long-time
//! reduced amplitudes and the steady/oscillating decomposition of the
//! long-time conditional spectra.
//!
//! In the long-time regime each channel oscillates at the Rabi splitting:
//! `I_0(E,t) = I_st_0 + I_osc cos(dxi t + phi)` and channel 1 in anti-phase,
//! so the total `I_lt = I_st_0 + I_st_1` is time independent.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::PreparedModel;
use crate::params::SystemParams;

/// Uniform energy grid used for reporting spectra.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyGrid {
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
    values: Vec<f64>,
}

impl EnergyGrid {
    pub fn new(e_min: f64, e_max: f64, n_points: usize) -> Result<Self> {
        if !(e_min.is_finite() && e_max.is_finite()) || n_points < 2 || e_max <= e_min {
            return Err(Error::InvalidInput(format!(
                "invalid energy grid [{e_min}, {e_max}] with {n_points} points"
            )));
        }
        let step = (e_max - e_min) / (n_points - 1) as f64;
        let values = (0..n_points).map(|i| e_min + step * i as f64).collect();
        Ok(EnergyGrid {
            e_min,
            e_max,
            n_points,
            values,
        })
    }

    /// Default reporting window: five total widths to each side of the pump.
    pub fn default_for(p: &SystemParams) -> Self {
        let gamma = p.gamma_total().max(1e-3);
        EnergyGrid::new(p.e_l - 5.0 * gamma, p.e_l + 5.0 * gamma, 2001)
            .expect("default grid construction")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        (self.e_max - self.e_min) / (self.n_points - 1) as f64
    }

    /// Trapezoid quadrature of samples over this grid.
    pub fn trapezoid(&self, samples: &[f64]) -> f64 {
        let h = self.spacing();
        let mut acc = 0.0;
        for i in 1..samples.len() {
            acc += 0.5 * h * (samples[i] + samples[i - 1]);
        }
        acc
    }
}

/// Finite-time conditional amplitudes `(d_0, d_1)(E, t)`.
pub fn amplitude(pm: &PreparedModel, e: f64, t: f64) -> [C64; 2] {
    pm.amplitude(e, t)
}

/// Finite-time total intensity `|d_0|^2 + |d_1|^2`.
pub fn intensity(pm: &PreparedModel, e: f64, t: f64) -> f64 {
    let d = pm.amplitude(e, t);
    d[0].norm_sqr() + d[1].norm_sqr()
}

/// Long-time amplitude factors on a grid; `a[k][ch][i]` is branch `k+1`,
/// channel `ch`, grid point `i`. The physical long-time amplitude is
/// `a~ * exp(i (xi_k - E) t)`, so the moduli are time independent.
#[derive(Clone, Debug)]
pub struct ReducedAmplitudes {
    pub grid: EnergyGrid,
    pub a: [[Vec<C64>; 2]; 2],
    /// Earliest time at which the long-time form is trustworthy.
    pub t_min: f64,
}

pub fn reduced_amplitudes(pm: &PreparedModel, grid: &EnergyGrid) -> ReducedAmplitudes {
    let per_point: Vec<[[C64; 2]; 2]> = grid
        .values()
        .par_iter()
        .map(|&e| pm.reduced_at(e))
        .collect();
    let mut a = [
        [
            Vec::with_capacity(grid.n_points),
            Vec::with_capacity(grid.n_points),
        ],
        [
            Vec::with_capacity(grid.n_points),
            Vec::with_capacity(grid.n_points),
        ],
    ];
    for point in &per_point {
        for k in 0..2 {
            for ch in 0..2 {
                a[k][ch].push(point[k][ch]);
            }
        }
    }
    ReducedAmplitudes {
        grid: grid.clone(),
        a,
        t_min: pm.t_min,
    }
}

/// Pointwise long-time decomposition of one energy.
#[derive(Clone, Copy, Debug)]
pub struct PointDecomposition {
    /// Steady conditional intensities per channel.
    pub i_st: [f64; 2],
    /// Oscillation magnitude per channel (`2 |a~_1| |a~_2|`).
    pub i_osc: [f64; 2],
    /// Oscillation phase per channel, principal value in (-pi, pi], with the
    /// sign convention `I_ch(E,t) = I_st_ch + I_osc_ch cos(dxi t + phi_ch)`.
    pub phi: [f64; 2],
}

impl PointDecomposition {
    pub fn total(&self) -> f64 {
        self.i_st[0] + self.i_st[1]
    }

    /// Conditional long-time intensity at phase `dxi t + phi`.
    pub fn conditional_at(&self, ch: usize, delta_xi: f64, t: f64) -> f64 {
        self.i_st[ch] + self.i_osc[ch] * (delta_xi * t + self.phi[ch]).cos()
    }
}

pub fn decompose_at(pm: &PreparedModel, e: f64) -> PointDecomposition {
    let a = pm.reduced_at(e);
    let mut out = PointDecomposition {
        i_st: [0.0; 2],
        i_osc: [0.0; 2],
        phi: [0.0; 2],
    };
    for ch in 0..2 {
        let a1 = a[0][ch];
        let a2 = a[1][ch];
        out.i_st[ch] = a1.norm_sqr() + a2.norm_sqr();
        out.i_osc[ch] = 2.0 * a1.norm() * a2.norm();
        out.phi[ch] = (a2 * a1.conj()).arg();
    }
    out
}

/// Long-time spectrum decomposition on a grid, normalized so the total
/// integrates to one (trapezoid rule on the reporting grid).
#[derive(Clone, Debug)]
pub struct SpectrumDecomposition {
    pub grid: EnergyGrid,
    pub i_st_0: Vec<f64>,
    pub i_st_1: Vec<f64>,
    pub i_osc: Vec<f64>,
    pub phi: Vec<f64>,
    pub i_lt: Vec<f64>,
    /// Trapezoid integral of the raw total spectrum; all intensity columns
    /// are divided by it (zero pump leaves the arrays unnormalized).
    pub norm_const: f64,
    pub t_min: f64,
}

pub fn decompose(pm: &PreparedModel, grid: &EnergyGrid) -> SpectrumDecomposition {
    let points: Vec<PointDecomposition> = grid
        .values()
        .par_iter()
        .map(|&e| decompose_at(pm, e))
        .collect();
    let mut i_st_0: Vec<f64> = points.iter().map(|p| p.i_st[0]).collect();
    let mut i_st_1: Vec<f64> = points.iter().map(|p| p.i_st[1]).collect();
    let mut i_osc: Vec<f64> = points.iter().map(|p| p.i_osc[0]).collect();
    let phi: Vec<f64> = points.iter().map(|p| p.phi[0]).collect();
    let mut i_lt: Vec<f64> = i_st_0.iter().zip(&i_st_1).map(|(a, b)| a + b).collect();
    let norm_const = grid.trapezoid(&i_lt);
    if norm_const > 0.0 {
        for col in [&mut i_st_0, &mut i_st_1, &mut i_osc, &mut i_lt] {
            for v in col.iter_mut() {
                *v /= norm_const;
            }
        }
    }
    SpectrumDecomposition {
        grid: grid.clone(),
        i_st_0,
        i_st_1,
        i_osc,
        phi,
        i_lt,
        norm_const,
        t_min: pm.t_min,
    }
}

impl SpectrumDecomposition {
    pub fn max_i_lt(&self) -> f64 {
        self.i_lt.iter().copied().fold(0.0, f64::max)
    }
}
