//! Assembly of the equations of motion and the building blocks of the
//! analytic solution: the discrete-sector matrix `A`, the continuum coupling
//! block `B`, the effective evolution matrix `M = A - i pi B B^dagger`, the
//! continuum kernel `K(E)`, the dressed projection matrices `K_1`, `K_2` and
//! the eight spectral poles.
//!
//! Discrete amplitudes are ordered `(c_00, c_10, c_01, c_11)` and the two
//! continuum channels are conditioned on the neighbor atom being in its
//! ground (channel 0) or excited (channel 1) state.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::eigen::{eigen_system, EigenSystem};
use crate::numerics::linalg::{Mat2, Mat4, Mat4x2, Vec4, ONE, ZERO};
use crate::params::{rabi, RabiSpec, SystemParams};

/// Rabi splittings below this are treated as degenerate (the `1/delta_xi`
/// prefactor of the projection matrices is singular).
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Transients decay below `exp(-TMIN_DECADES)` past the long-time threshold.
pub const TMIN_DECADES: f64 = 10.0;

/// Matrices of the coupled equations of motion.
#[derive(Clone, Copy, Debug)]
pub struct ModelMatrices {
    /// Discrete 4x4 block.
    pub a: Mat4,
    /// Coupling of the four discrete amplitudes to the two continuum channels.
    pub b: Mat4x2,
    /// Effective non-Hermitian evolution matrix `A - i pi B B^dagger`.
    pub m: Mat4,
    /// Initial discrete amplitudes; both electrons start in their ground
    /// states. Overriding this is supported by the solution formula but is
    /// experimental.
    pub initial: Vec4,
    params: SystemParams,
}

impl ModelMatrices {
    /// Continuum kernel `K(E)` coupling the two conditional channels.
    pub fn k_of_e(&self, e: f64) -> Mat2 {
        let p = &self.params;
        let pump = p.pump_a();
        Mat2([
            [C64::new(e - p.e_l, 0.0), pump.conj()],
            [pump, C64::new(e - p.e_l + p.detuning_a(), 0.0)],
        ])
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// Replaces the initial discrete state (experimental).
    pub fn with_initial_state(mut self, c0: Vec4) -> Self {
        self.initial = c0;
        self
    }
}

/// Assembles the matrices of the equations of motion.
pub fn build(p: &SystemParams) -> ModelMatrices {
    let pa = p.pump_a();
    let pb = p.pump_b();
    let pc = p.pump_cont();
    let de_a = C64::new(p.detuning_a(), 0.0);
    let de_b = C64::new(p.detuning_b(), 0.0);

    let a = Mat4([
        [ZERO, pa.conj(), pb.conj(), ZERO],
        [pa, de_a, p.j_ab.conj(), pb.conj()],
        [pb, p.j_ab, de_b, pa.conj()],
        [ZERO, pb, pa, de_a + de_b],
    ]);
    let b = Mat4x2([
        [pc.conj(), ZERO],
        [p.j.conj(), pc.conj()],
        [p.v.conj(), ZERO],
        [ZERO, p.v.conj()],
    ]);
    let m = a.sub(&b.gram().scale(C64::new(0.0, PI)));
    ModelMatrices {
        a,
        b,
        m,
        initial: [ONE, ZERO, ZERO, ZERO],
        params: *p,
    }
}

/// The two dressed projection matrices of the driven neighbor atom.
#[derive(Clone, Copy, Debug)]
pub struct ProjectionMatrices {
    pub k1: Mat2,
    pub k2: Mat2,
}

/// Builds `K_1`, `K_2`: the `(-1)^k`-signed spectral projectors of the
/// two-level pump block, written with energies measured from the pump
/// frequency so the result is invariant under shifting the energy origin.
/// Their sum is the identity.
pub fn projections(p: &SystemParams) -> Result<ProjectionMatrices> {
    let rb = rabi(p);
    if rb.delta_xi <= DEGENERACY_TOL {
        return Err(Error::DegenerateRabi {
            delta_xi: rb.delta_xi,
            tolerance: DEGENERACY_TOL,
        });
    }
    let pump = p.pump_a();
    let de_a = p.detuning_a();
    let k_of = |k: usize, xi: f64| -> Mat2 {
        let sign = if k == 1 { -1.0 } else { 1.0 };
        let s = sign / rb.delta_xi;
        let xi_rel = xi - p.e_l;
        Mat2([
            [C64::new(s * (de_a + xi_rel), 0.0), -s * pump.conj()],
            [-s * pump, C64::new(s * xi_rel, 0.0)],
        ])
    };
    Ok(ProjectionMatrices {
        k1: k_of(1, rb.xi_1),
        k2: k_of(2, rb.xi_2),
    })
}

/// One of the eight complex spectral poles `E_r = Lambda_j + xi_k`.
#[derive(Clone, Copy, Debug)]
pub struct TaggedPole {
    pub value: C64,
    /// Index into the eigenvalue list, 0..4.
    pub eigen_index: usize,
    /// Dressed branch, 1 or 2.
    pub branch: usize,
}

/// The eight poles, grouped into four pairs by eigenvalue index. Within each
/// pair the imaginary parts are equal and the real parts differ by the Rabi
/// splitting.
#[derive(Clone, Debug)]
pub struct PoleSet {
    pub poles: Vec<TaggedPole>,
    pub delta_xi: f64,
}

impl PoleSet {
    /// The four `(branch 1, branch 2)` pairs ordered by eigenvalue index.
    pub fn pairs(&self) -> Vec<(TaggedPole, TaggedPole)> {
        (0..4)
            .map(|j| {
                let a = self
                    .poles
                    .iter()
                    .find(|p| p.eigen_index == j && p.branch == 1)
                    .copied()
                    .expect("pole bookkeeping");
                let b = self
                    .poles
                    .iter()
                    .find(|p| p.eigen_index == j && p.branch == 2)
                    .copied()
                    .expect("pole bookkeeping");
                (a, b)
            })
            .collect()
    }
}

/// Computes the eight tagged poles of the amplitude spectrum.
pub fn pole_set(p: &SystemParams) -> Result<PoleSet> {
    let prepared = PreparedModel::new(p)?;
    Ok(prepared.pole_set())
}

/// The assembled analytic solution for one parameter set: eigen-system,
/// dressed projections and the per-branch pole strengths. Everything the
/// spectra and zero finders evaluate is derived from this.
#[derive(Clone, Debug)]
pub struct PreparedModel {
    pub params: SystemParams,
    pub matrices: ModelMatrices,
    pub eigen: EigenSystem,
    pub rabi: RabiSpec,
    pub projections: ProjectionMatrices,
    /// `strength[k][ch][j]` is the pole strength of eigenvalue `j` in channel
    /// `ch` on dressed branch `k+1`: `[K_{k+1} B^dagger P]_{ch,j} [P^-1 c0]_j`.
    pub strength: [[[C64; 4]; 2]; 2],
    /// Validity threshold of the long-time formulas.
    pub t_min: f64,
}

impl PreparedModel {
    pub fn new(p: &SystemParams) -> Result<Self> {
        let matrices = build(p);
        Self::from_matrices(matrices)
    }

    pub fn from_matrices(matrices: ModelMatrices) -> Result<Self> {
        let p = matrices.params;
        let eigen = eigen_system(&matrices.m)?;
        let rb = rabi(&p);
        let projections = projections(&p)?;
        let b_dag = matrices.b.adjoint();
        let pinv_c0 = matrices.eigvec_inv_initial(&eigen);
        let mut strength = [[[ZERO; 4]; 2]; 2];
        for (k, km) in [projections.k1, projections.k2].iter().enumerate() {
            let rows = km.mul_2x4(&b_dag).mul_mat4(&eigen.p);
            for ch in 0..2 {
                for j in 0..4 {
                    strength[k][ch][j] = rows.0[ch][j] * pinv_c0[j];
                }
            }
        }
        let min_im = eigen.min_abs_im();
        let t_min = if min_im > 0.0 {
            TMIN_DECADES / min_im
        } else {
            f64::INFINITY
        };
        Ok(PreparedModel {
            params: p,
            matrices,
            eigen,
            rabi: rb,
            projections,
            strength,
            t_min,
        })
    }

    pub fn xi(&self, branch: usize) -> f64 {
        match branch {
            0 => self.rabi.xi_1,
            _ => self.rabi.xi_2,
        }
    }

    /// Time-independent long-time amplitude factors `a~_{k,ch}(E)`; index
    /// `[k][ch]` with branch `k+1`.
    pub fn reduced_at(&self, e: f64) -> [[C64; 2]; 2] {
        let mut out = [[ZERO; 2]; 2];
        for (k, row) in out.iter_mut().enumerate() {
            let xi = self.xi(k);
            for (ch, cell) in row.iter_mut().enumerate() {
                let mut s = ZERO;
                for j in 0..4 {
                    s += self.strength[k][ch][j] / (C64::new(e - xi, 0.0) - self.eigen.lambdas[j]);
                }
                *cell = -s;
            }
        }
        out
    }

    /// Finite-time conditional amplitudes `(d_0, d_1)(E, t)`.
    pub fn amplitude(&self, e: f64, t: f64) -> [C64; 2] {
        let mut out = [ZERO; 2];
        for k in 0..2 {
            let xi = self.xi(k);
            let osc = (C64::i() * (xi - e) * t).exp();
            for j in 0..4 {
                let lam = self.eigen.lambdas[j];
                let decay = (-C64::i() * lam * t).exp();
                let denom = C64::new(e - xi, 0.0) - lam;
                for (ch, cell) in out.iter_mut().enumerate() {
                    *cell -= self.strength[k][ch][j] * (osc - decay) / denom;
                }
            }
        }
        out
    }

    pub fn pole_set(&self) -> PoleSet {
        let mut poles = Vec::with_capacity(8);
        for j in 0..4 {
            for (k, xi) in [self.rabi.xi_1, self.rabi.xi_2].iter().enumerate() {
                poles.push(TaggedPole {
                    value: self.eigen.lambdas[j] + C64::new(*xi, 0.0),
                    eigen_index: j,
                    branch: k + 1,
                });
            }
        }
        PoleSet {
            poles,
            delta_xi: self.rabi.delta_xi,
        }
    }
}

impl ModelMatrices {
    fn eigvec_inv_initial(&self, eigen: &EigenSystem) -> Vec4 {
        eigen.p_inv.mul_vec(&self.initial)
    }
}
