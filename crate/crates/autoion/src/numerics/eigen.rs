//! Eigen-decomposition of the 4x4 complex evolution matrix: characteristic
//! polynomial by the Faddeev-LeVerrier recursion, eigenvalues through the
//! shared root finder, eigenvectors by shifted inverse (subspace) iteration.

use num_complex::Complex64 as C64;

use super::linalg::{Mat4, Vec4, ONE, ZERO};
use super::poly::{roots, ComplexPolynomial};
use crate::error::{Error, Result};

/// Condition-number ceiling beyond which the eigenvector matrix counts as
/// numerically defective.
pub const DEFECTIVE_CONDITION_MAX: f64 = 1e10;

/// Relative residual allowed in `||M P - P diag(lambda)||`.
pub const EIGEN_RESIDUAL_FACTOR: f64 = 1e-9;

/// Eigenvalues, eigenvector matrix, its inverse and a condition estimate.
#[derive(Clone, Copy, Debug)]
pub struct EigenSystem {
    pub lambdas: [C64; 4],
    /// Eigenvector columns, ordered like `lambdas`.
    pub p: Mat4,
    pub p_inv: Mat4,
    pub condition: f64,
}

impl EigenSystem {
    /// `max_j |Im lambda_j|` ... the slowest decay rate in the system.
    pub fn min_abs_im(&self) -> f64 {
        self.lambdas
            .iter()
            .map(|l| l.im.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Monic characteristic polynomial `det(lambda I - M)` in ascending order.
pub fn characteristic_polynomial(m: &Mat4) -> ComplexPolynomial {
    let mut coeffs = [ZERO; 5];
    coeffs[4] = ONE;
    let mut b = Mat4::identity();
    for k in 1..=4usize {
        let a = m.mul(&b);
        let c = -a.trace() / (k as f64);
        coeffs[4 - k] = c;
        b = a;
        for i in 0..4 {
            b.0[i][i] += c;
        }
    }
    ComplexPolynomial::new(coeffs.to_vec())
}

/// Full eigen-decomposition of a 4x4 complex matrix.
///
/// Errors with `DefectiveMatrix` when an eigenvalue's geometric multiplicity
/// is deficient (eigenvector matrix condition above 1e10) or when the
/// residual `||M P - P diag(lambda)||` cannot be brought below
/// `1e-9 ||M||`.
pub fn eigen_system(m: &Mat4) -> Result<EigenSystem> {
    let charpoly = characteristic_polynomial(m);
    let set = roots(&charpoly)?;
    let m_scale = m.max_norm().max(f64::MIN_POSITIVE);

    // flattened, deterministically ordered eigenvalues
    let mut lambdas: Vec<C64> = set.flattened();
    lambdas.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    debug_assert_eq!(lambdas.len(), 4);

    // eigenvectors per distinct root, columns arranged to follow the sorted
    // eigenvalue order
    let mut columns: Vec<(C64, Vec4)> = Vec::with_capacity(4);
    for root in &set.roots {
        for v in invariant_vectors(m, root.value, root.multiplicity, m_scale)? {
            columns.push((root.value, v));
        }
    }
    let mut p = Mat4::zeros();
    let mut used = [false; 4];
    for (value, v) in &columns {
        let dst = lambdas
            .iter()
            .enumerate()
            .find(|(i, l)| !used[*i] && (**l - *value).norm() == 0.0)
            .map(|(i, _)| i)
            .expect("eigenvalue bookkeeping");
        used[dst] = true;
        for r in 0..4 {
            p.0[r][dst] = v[r];
        }
    }

    let (p_inv, condition) = p
        .inverse()
        .map_err(|_| Error::DefectiveMatrix("eigenvector matrix is singular".into()))?;
    if condition > DEFECTIVE_CONDITION_MAX {
        return Err(Error::DefectiveMatrix(format!(
            "eigenvector matrix condition {condition:.3e} exceeds {DEFECTIVE_CONDITION_MAX:.1e}"
        )));
    }

    let lam = [lambdas[0], lambdas[1], lambdas[2], lambdas[3]];
    let residual = eigen_residual(m, &p, &lam);
    if residual > EIGEN_RESIDUAL_FACTOR * m_scale {
        return Err(Error::DefectiveMatrix(format!(
            "eigen residual {residual:.3e} exceeds {EIGEN_RESIDUAL_FACTOR:.1e} * ||M||"
        )));
    }

    Ok(EigenSystem {
        lambdas: lam,
        p,
        p_inv,
        condition,
    })
}

pub fn eigen_residual(m: &Mat4, p: &Mat4, lambdas: &[C64; 4]) -> f64 {
    let mp = m.mul(p);
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let want = p.0[i][j] * lambdas[j];
            worst = worst.max((mp.0[i][j] - want).norm());
        }
    }
    worst
}

/// Shifted inverse subspace iteration for the eigenvectors of one eigenvalue.
fn invariant_vectors(m: &Mat4, lambda: C64, mult: usize, m_scale: f64) -> Result<Vec<Vec4>> {
    // deterministic slightly-complex shift keeps the solve nonsingular while
    // amplifying the null direction
    let shift = lambda + C64::new(1e-13, 1e-13) * m_scale;
    let mut shifted = *m;
    for i in 0..4 {
        shifted.0[i][i] -= shift;
    }

    let mut basis: Vec<Vec4> = (0..mult)
        .map(|s| {
            let mut v = [ZERO; 4];
            for (r, cell) in v.iter_mut().enumerate() {
                *cell = if r == s {
                    ONE
                } else {
                    C64::new(0.013 * (r + s + 1) as f64, 0.0)
                };
            }
            v
        })
        .collect();

    for round in 0..8 {
        let mut next = Vec::with_capacity(mult);
        for v in &basis {
            let w = shifted.solve(v).unwrap_or(*v);
            next.push(w);
        }
        if !orthonormalize(&mut next) {
            return Err(Error::DefectiveMatrix(format!(
                "geometric multiplicity below {mult} at eigenvalue {lambda}"
            )));
        }
        basis = next;
        if round >= 2 {
            let worst = basis
                .iter()
                .map(|v| vector_residual(m, lambda, v))
                .fold(0.0_f64, f64::max);
            if worst <= 0.5 * EIGEN_RESIDUAL_FACTOR * m_scale {
                break;
            }
        }
    }

    // fix the phase/scale: largest component becomes exactly 1
    for v in &mut basis {
        let (k, _) = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        let d = v[k];
        for z in v.iter_mut() {
            *z /= d;
        }
    }
    Ok(basis)
}

fn vector_residual(m: &Mat4, lambda: C64, v: &Vec4) -> f64 {
    let mv = m.mul_vec(v);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (0..4)
        .map(|i| (mv[i] - lambda * v[i]).norm())
        .fold(0.0_f64, f64::max)
        / norm.max(f64::MIN_POSITIVE)
}

/// Modified Gram-Schmidt; returns false when the set collapses.
fn orthonormalize(vs: &mut [Vec4]) -> bool {
    for i in 0..vs.len() {
        for j in 0..i {
            let proj: C64 = (0..4).map(|r| vs[j][r].conj() * vs[i][r]).sum();
            for r in 0..4 {
                let s = proj * vs[j][r];
                vs[i][r] -= s;
            }
        }
        let norm = vs[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return false;
        }
        for z in vs[i].iter_mut() {
            *z /= norm;
        }
    }
    true
}
