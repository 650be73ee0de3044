//! Complex polynomials and a simultaneous-iteration (Aberth-Ehrlich) root
//! finder for degrees up to 16.
//!
//! One algorithm covers every degree used by the analytic machinery (the
//! characteristic quartic, the channel cubics and the squared-modulus
//! difference polynomials). Initial guesses are roots of unity scaled by a
//! coefficient bound, so runs are reproducible bit for bit on a platform.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Relative threshold for trimming trailing (leading-degree) coefficients.
pub const TRIM_TOL: f64 = 1e-14;

/// Configuration of the root finder. All tolerances are relative to the
/// coefficient scale and `max(1, |root|)`.
#[derive(Clone, Copy, Debug)]
pub struct RootFinderConfig {
    /// Base clustering tolerance for merging nearby roots.
    pub merge_tol: f64,
    /// Residual acceptance factor: each root must satisfy
    /// `|p(root)| <= residual_factor * max|coeff| * max(1, |root|)^degree`.
    pub residual_factor: f64,
    /// Iteration cap for the simultaneous iteration.
    pub max_iter: usize,
}

impl Default for RootFinderConfig {
    fn default() -> Self {
        RootFinderConfig {
            merge_tol: 1e-7,
            residual_factor: 1e-8,
            max_iter: 400,
        }
    }
}

/// Dense complex polynomial with coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<C64>,
}

impl ComplexPolynomial {
    /// Builds a polynomial, trimming trailing coefficients whose modulus is
    /// below `TRIM_TOL * max|coeff|`.
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut c = coeffs;
        if c.is_empty() {
            c.push(C64::new(0.0, 0.0));
        }
        let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let cut = TRIM_TOL * scale;
        while c.len() > 1 && c.last().unwrap().norm() <= cut {
            c.pop();
        }
        ComplexPolynomial { coeffs: c }
    }

    pub fn from_roots(leading: C64, roots: &[C64]) -> Self {
        let mut c = vec![leading];
        for r in roots {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k] -= ck * r;
                next[k + 1] += ck;
            }
            c = next;
        }
        ComplexPolynomial { coeffs: c }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| z.norm() == 0.0)
    }

    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Upper bound `sum_k |c_k| |z|^k`, used for evaluation-noise estimates.
    pub fn eval_majorant(&self, z_abs: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z_abs + c.norm();
        }
        acc
    }

    pub fn derivative(&self) -> ComplexPolynomial {
        if self.coeffs.len() <= 1 {
            return ComplexPolynomial::new(vec![C64::new(0.0, 0.0)]);
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &ck)| ck * (k as f64))
            .collect();
        ComplexPolynomial { coeffs: c }
    }

    pub fn mul(&self, other: &ComplexPolynomial) -> ComplexPolynomial {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial { coeffs: out }
    }

    /// Polynomial with conjugated coefficients. On the real axis its value is
    /// the conjugate of `self`.
    pub fn conj_coefficients(&self) -> ComplexPolynomial {
        ComplexPolynomial {
            coeffs: self.coeffs.iter().map(|z| z.conj()).collect(),
        }
    }
}

/// A located root with multiplicity and residual `|p(root)|`.
#[derive(Clone, Copy, Debug)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
    pub residual: f64,
}

/// All roots of a polynomial; multiplicities sum to the degree.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Roots repeated according to multiplicity.
    pub fn flattened(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.total_multiplicity());
        for r in &self.roots {
            out.extend(std::iter::repeat(r.value).take(r.multiplicity));
        }
        out
    }
}

/// Finds all roots with the default configuration.
pub fn roots(p: &ComplexPolynomial) -> Result<RootSet> {
    roots_with(p, &RootFinderConfig::default())
}

/// Finds all roots of `p` by Aberth-Ehrlich simultaneous iteration.
///
/// Zero roots are deflated exactly; clusters are merged with a tolerance that
/// widens with the tentative multiplicity (a degree-m root can only be located
/// to about `eps^(1/m)`), and merged clusters are polished on the (m-1)-th
/// derivative where the root is simple again.
pub fn roots_with(p: &ComplexPolynomial, cfg: &RootFinderConfig) -> Result<RootSet> {
    let scale = p.coeff_scale();
    if scale == 0.0 || p.degree() == 0 {
        return Ok(RootSet { roots: Vec::new() });
    }

    // normalized working copy
    let mut c: Vec<C64> = p.coeffs().iter().map(|z| z / scale).collect();

    // deflate exact zero roots
    let mut zero_mult = 0usize;
    while c.len() > 1 && c[0] == C64::new(0.0, 0.0) {
        c.remove(0);
        zero_mult += 1;
    }

    let work = ComplexPolynomial { coeffs: c };
    let n = work.degree();
    let mut found: Vec<C64> = Vec::with_capacity(n);

    if n == 1 {
        found.push(-work.coeffs()[0] / work.coeffs()[1]);
    } else if n >= 2 {
        found = aberth(&work, cfg)?;
    }

    let mut clusters = cluster(&found, &work, cfg);
    if zero_mult > 0 {
        clusters.push((C64::new(0.0, 0.0), zero_mult));
    }

    let mut out = Vec::with_capacity(clusters.len());
    for (centroid, mult) in clusters {
        let value = polish(p, centroid, mult, cfg);
        let residual = p.eval(value).norm();
        out.push(Root {
            value,
            multiplicity: mult,
            residual,
        });
    }
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    Ok(RootSet { roots: out })
}

fn aberth(p: &ComplexPolynomial, cfg: &RootFinderConfig) -> Result<Vec<C64>> {
    let n = p.degree();
    let dp = p.derivative();
    let lead = p.coeffs()[n].norm();
    let radius = 1.0
        + p.coeffs()[..n]
            .iter()
            .map(|z| z.norm() / lead)
            .fold(0.0, f64::max);

    // deterministic starting circle, phase offset breaks axis symmetry
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / (n as f64) + 0.4;
            radius * C64::from_polar(1.0, angle)
        })
        .collect();

    let mut best_step = f64::INFINITY;
    let mut since_best = 0usize;
    let mut best_residual = f64::INFINITY;

    for _ in 0..cfg.max_iter {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let zi = z[i];
            let pv = p.eval(zi);
            let res = pv.norm();
            if res == 0.0 {
                continue;
            }
            let dv = dp.eval(zi);
            let newton = if dv.norm() > 0.0 {
                pv / dv
            } else {
                // flat point: take a deterministic sidestep
                C64::new(1e-6 * (1.0 + zi.norm()), 0.0)
            };
            let mut s = C64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let d = zi - zj;
                    if d.norm() > 0.0 {
                        s += 1.0 / d;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * s;
            let w = if denom.norm() > 1e-290 {
                newton / denom
            } else {
                newton
            };
            z[i] = zi - w;
            max_step = max_step.max(w.norm() / (1.0 + zi.norm()));
        }

        if max_step < 1e-14 {
            return Ok(z);
        }
        if max_step < best_step * 0.5 {
            best_step = max_step;
            since_best = 0;
        } else {
            since_best += 1;
            // stalled at the attainable accuracy for this root configuration
            if since_best > 40 && max_step < 1e-6 {
                return Ok(z);
            }
        }
        best_residual = best_residual.min(
            z.iter()
                .map(|&zi| p.eval(zi).norm())
                .fold(0.0_f64, f64::max),
        );
    }

    // iteration cap reached; accept only if residuals meet the bound
    let worst = z
        .iter()
        .map(|&zi| p.eval(zi).norm() / (1.0f64.max(zi.norm())).powi(p.degree() as i32))
        .fold(0.0_f64, f64::max);
    if worst <= cfg.residual_factor {
        Ok(z)
    } else {
        Err(Error::NoConvergence {
            iterations: cfg.max_iter,
            best_residual: best_residual.min(worst),
        })
    }
}

/// Single-linkage clustering with a multiplicity-aware radius. Merges within
/// the base tolerance are unconditional; a wider radius (the attainable
/// accuracy eps^(1/m) of a degree-m root, capped at 1e-4) applies only when
/// the merged centroid evaluates to noise, which separates true multiple
/// roots from close simple pairs.
fn cluster(roots: &[C64], work: &ComplexPolynomial, cfg: &RootFinderConfig) -> Vec<(C64, usize)> {
    const NOISE: f64 = 1.8e-13;
    let noise_at = |z: C64| 64.0 * f64::EPSILON * work.eval_majorant(z.norm());
    let mut groups: Vec<(C64, usize)> = roots.iter().map(|&z| (z, 1usize)).collect();
    loop {
        let mut merged = false;
        'outer: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let (zi, mi) = groups[i];
                let (zj, mj) = groups[j];
                let s = 1.0f64.max(zi.norm()).max(zj.norm());
                let m = mi + mj;
                let dist = (zi - zj).norm();
                let centroid = (mi as f64 * zi + mj as f64 * zj) / (m as f64);
                let widened = NOISE.powf(1.0 / (m + 1) as f64).min(1e-4) * s;
                let accept = dist <= cfg.merge_tol * s
                    || (dist <= widened && work.eval(centroid).norm() <= noise_at(centroid));
                if accept {
                    groups[i] = (centroid, m);
                    groups.remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            return groups;
        }
    }
}

/// Newton refinement. A multiplicity-m cluster centroid is polished on the
/// (m-1)-th derivative, where the root is simple; a step that wanders away
/// from the cluster is rejected.
fn polish(p: &ComplexPolynomial, centroid: C64, mult: usize, cfg: &RootFinderConfig) -> C64 {
    let mut q = p.clone();
    for _ in 1..mult {
        q = q.derivative();
    }
    let dq = q.derivative();
    if dq.is_zero() {
        return centroid;
    }
    let guard = 10.0 * cfg.merge_tol.max(1e-4) * 1.0f64.max(centroid.norm());
    let mut z = centroid;
    for _ in 0..6 {
        let qv = q.eval(z);
        let dv = dq.eval(z);
        if dv.norm() == 0.0 {
            break;
        }
        let step = qv / dv;
        let z_next = z - step;
        if (z_next - centroid).norm() > guard {
            return centroid;
        }
        z = z_next;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    if p.eval(z).norm() <= p.eval(centroid).norm() {
        z
    } else {
        centroid
    }
}
