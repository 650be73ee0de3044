//! Small dense complex matrices (2x2, 4x4, 4x2) used by the analytic
//! solution. Sizes are fixed, so everything is direct arithmetic.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type Vec2 = [C64; 2];
pub type Vec4 = [C64; 4];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// 2x2 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

/// 4x4 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[C64; 4]; 4]);

/// 4x2 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4x2(pub [[C64; 2]; 4]);

/// 2x4 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2x4(pub [[C64; 4]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn mul_vec(&self, v: &Vec2) -> Vec2 {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn mul_2x4(&self, m: &Mat2x4) -> Mat2x4 {
        let mut out = [[ZERO; 4]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                *cell = self.0[i][0] * m.0[0][k] + self.0[i][1] * m.0[1][k];
            }
        }
        Mat2x4(out)
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let mut out = self.0;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += other.0[i][j];
            }
        }
        Mat2(out)
    }

    pub fn max_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn diagonal(d: &Vec4) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn mul(&self, other: &Mat4) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                let mut s = ZERO;
                for j in 0..4 {
                    s += self.0[i][j] * other.0[j][k];
                }
                *cell = s;
            }
        }
        Mat4(out)
    }

    pub fn mul_vec(&self, v: &Vec4) -> Vec4 {
        let mut out = [ZERO; 4];
        for (i, cell) in out.iter_mut().enumerate() {
            let mut s = ZERO;
            for j in 0..4 {
                s += self.0[i][j] * v[j];
            }
            *cell = s;
        }
        out
    }

    pub fn mul_4x2(&self, m: &Mat4x2) -> Mat4x2 {
        let mut out = [[ZERO; 2]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                let mut s = ZERO;
                for j in 0..4 {
                    s += self.0[i][j] * m.0[j][k];
                }
                *cell = s;
            }
        }
        Mat4x2(out)
    }

    pub fn add(&self, other: &Mat4) -> Mat4 {
        let mut out = self.0;
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += other.0[i][j];
            }
        }
        Mat4(out)
    }

    pub fn sub(&self, other: &Mat4) -> Mat4 {
        let mut out = self.0;
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] -= other.0[i][j];
            }
        }
        Mat4(out)
    }

    pub fn scale(&self, s: C64) -> Mat4 {
        let mut out = self.0;
        for row in &mut out {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        Mat4(out)
    }

    pub fn adjoint(&self) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[j][i].conj();
            }
        }
        Mat4(out)
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2] + self.0[3][3]
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..4)
            .map(|j| (0..4).map(|i| self.0[i][j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Solves `self * x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &Vec4) -> Result<Vec4> {
        let mut a = self.0;
        let mut x = *b;
        let scale = self.max_norm().max(f64::MIN_POSITIVE);
        for col in 0..4 {
            let (piv, piv_abs) = (col..4)
                .map(|r| (r, a[r][col].norm()))
                .max_by(|l, r| l.1.total_cmp(&r.1))
                .unwrap();
            if piv_abs < 1e-300 * scale {
                return Err(Error::DefectiveMatrix(
                    "singular 4x4 system in solve".into(),
                ));
            }
            a.swap(col, piv);
            x.swap(col, piv);
            for r in col + 1..4 {
                let f = a[r][col] / a[col][col];
                for k in col..4 {
                    let sub = f * a[col][k];
                    a[r][k] -= sub;
                }
                let sub = f * x[col];
                x[r] -= sub;
            }
        }
        for col in (0..4).rev() {
            let mut s = x[col];
            for k in col + 1..4 {
                s -= a[col][k] * x[k];
            }
            x[col] = s / a[col][col];
        }
        Ok(x)
    }

    /// Inverse by Gauss-Jordan with partial pivoting; also returns a 1-norm
    /// condition estimate.
    pub fn inverse(&self) -> Result<(Mat4, f64)> {
        let mut a = self.0;
        let mut inv = Mat4::identity().0;
        let scale = self.max_norm().max(f64::MIN_POSITIVE);
        for col in 0..4 {
            let (piv, piv_abs) = (col..4)
                .map(|r| (r, a[r][col].norm()))
                .max_by(|l, r| l.1.total_cmp(&r.1))
                .unwrap();
            if piv_abs < 1e-300 * scale {
                return Err(Error::DefectiveMatrix("singular 4x4 matrix".into()));
            }
            a.swap(col, piv);
            inv.swap(col, piv);
            let d = a[col][col];
            for k in 0..4 {
                a[col][k] /= d;
                inv[col][k] /= d;
            }
            for r in 0..4 {
                if r != col {
                    let f = a[r][col];
                    for k in 0..4 {
                        let s1 = f * a[col][k];
                        a[r][k] -= s1;
                        let s2 = f * inv[col][k];
                        inv[r][k] -= s2;
                    }
                }
            }
        }
        let inv = Mat4(inv);
        let cond = self.one_norm() * inv.one_norm();
        Ok((inv, cond))
    }
}

impl Mat4x2 {
    pub fn adjoint(&self) -> Mat2x4 {
        let mut out = [[ZERO; 4]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[j][i].conj();
            }
        }
        Mat2x4(out)
    }

    /// `self * self^dagger`, a Hermitian positive semidefinite 4x4.
    pub fn gram(&self) -> Mat4 {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[i][0] * self.0[j][0].conj() + self.0[i][1] * self.0[j][1].conj();
            }
        }
        Mat4(out)
    }
}

impl Mat2x4 {
    pub fn mul_mat4(&self, m: &Mat4) -> Mat2x4 {
        let mut out = [[ZERO; 4]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                let mut s = ZERO;
                for j in 0..4 {
                    s += self.0[i][j] * m.0[j][k];
                }
                *cell = s;
            }
        }
        Mat2x4(out)
    }

    pub fn mul_vec(&self, v: &Vec4) -> Vec2 {
        let mut out = [ZERO; 2];
        for (i, cell) in out.iter_mut().enumerate() {
            let mut s = ZERO;
            for j in 0..4 {
                s += self.0[i][j] * v[j];
            }
            *cell = s;
        }
        out
    }
}
