//! Spectral zeros of the long-time photoelectron spectra: persistent Fano
//! zeros (common roots of the four channel cubics), dynamical zeros of the
//! conditional spectra (balance of the two dressed branches), the weak-pump
//! quadratic prediction and the effective transition dipole of the dressed
//! continuum, plus pump-strength sweeps with branch tracking.
//!
//! Root candidates come from expanded polynomials, but every zero is
//! confirmed and refined on the directly evaluated partial-fraction form:
//! near long-lived dressed states the expanded coefficients lose the fine
//! structure while the factored form stays well conditioned.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::model::PreparedModel;
use crate::numerics::poly::{roots_with, ComplexPolynomial, RootFinderConfig};
use crate::params::{derive_reduced, SystemParams};
use crate::spectra::{decompose, decompose_at, EnergyGrid};

/// Matching tolerance (times the total width) for a root shared by all four
/// channel cubics.
pub const FANO_MATCH_TOL: f64 = 1e-6;

/// A confirmed zero must leave at most this fraction of the spectrum maximum.
pub const ZERO_RESIDUAL_REL: f64 = 1e-6;

/// A polynomial root counts as real when `|Im| <= tol * max(1, |Re|)`.
pub const REAL_ROOT_IM_TOL: f64 = 1e-7;

/// Relative imaginary part allowed in the weak-pump discriminant before the
/// prediction is declared unavailable.
pub const WEAK_PUMP_IM_TOL: f64 = 1e-10;

/// Structural bounds on the zero counts.
pub const MAX_FANO: usize = 3;
pub const MAX_DYNAMICAL: usize = 15;

/// Branch-linking gap (in normalized frequency units) above which a sweep
/// point starts a new branch.
pub const BRANCH_GAP: f64 = 0.5;

/// The four pole-strength tuples and the polynomials assembled from them.
#[derive(Clone, Debug)]
pub struct ZeroPolynomials {
    /// `a[channel][branch][j]`: strength of eigenvalue `j` of branch
    /// `branch+1` in the given conditional channel.
    pub a_coeffs: [[[C64; 4]; 2]; 2],
    /// Numerator cubics `p[channel][branch]` of the partial-fraction form.
    pub cubics: [[ComplexPolynomial; 2]; 2],
    /// Per-channel squared-modulus difference of the two branches on the real
    /// axis, expanded in energy. Real coefficients by construction.
    pub dyn_poly: [ComplexPolynomial; 2],
}

/// Assembles the channel cubics and the branch-balance polynomials.
pub fn zero_polynomials(pm: &PreparedModel) -> ZeroPolynomials {
    let lam = pm.eigen.lambdas;
    let mut a_coeffs = [[[C64::new(0.0, 0.0); 4]; 2]; 2];
    for ch in 0..2 {
        for br in 0..2 {
            for j in 0..4 {
                a_coeffs[ch][br][j] = pm.strength[br][ch][j];
            }
        }
    }

    let poles = |br: usize| -> Vec<C64> {
        let xi = pm.xi(br);
        lam.iter().map(|l| l + C64::new(xi, 0.0)).collect()
    };
    let numerator = |ch: usize, br: usize| -> ComplexPolynomial {
        let ps = poles(br);
        let mut acc = vec![C64::new(0.0, 0.0); 4];
        for j in 0..4 {
            let others: Vec<C64> = (0..4).filter(|&m| m != j).map(|m| ps[m]).collect();
            let q = ComplexPolynomial::from_roots(C64::new(1.0, 0.0), &others);
            for (k, c) in q.coeffs().iter().enumerate() {
                acc[k] += a_coeffs[ch][br][j] * c;
            }
        }
        ComplexPolynomial::new(acc)
    };

    let cubics = [
        [numerator(0, 0), numerator(0, 1)],
        [numerator(1, 0), numerator(1, 1)],
    ];

    let dyn_poly = [
        branch_balance_poly(&cubics[0], &poles(0), &poles(1)),
        branch_balance_poly(&cubics[1], &poles(0), &poles(1)),
    ];

    ZeroPolynomials {
        a_coeffs,
        cubics,
        dyn_poly,
    }
}

/// `|p_1(E)|^2 prod |E - pole2|^2 - |p_2(E)|^2 prod |E - pole1|^2` on the
/// real axis, expanded in `E`. The degree-15 and degree-16 slots of the
/// assembly buffer must vanish and the result must be real; both are checked.
fn branch_balance_poly(
    cubics: &[ComplexPolynomial; 2],
    poles1: &[C64],
    poles2: &[C64],
) -> ComplexPolynomial {
    let one = C64::new(1.0, 0.0);
    let q1 = cubics[0].mul(&ComplexPolynomial::from_roots(one, poles2));
    let q2 = cubics[1].mul(&ComplexPolynomial::from_roots(one, poles1));
    let sq1 = q1.mul(&q1.conj_coefficients());
    let sq2 = q2.mul(&q2.conj_coefficients());
    let mut buf = [C64::new(0.0, 0.0); 17];
    for (k, c) in sq1.coeffs().iter().enumerate() {
        buf[k] += c;
    }
    for (k, c) in sq2.coeffs().iter().enumerate() {
        buf[k] -= c;
    }
    let scale = buf.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(
        buf[15].norm() <= 1e-10 * scale.max(f64::MIN_POSITIVE)
            && buf[16].norm() <= 1e-10 * scale.max(f64::MIN_POSITIVE),
        "branch balance polynomial exceeds degree 15"
    );
    let max_im = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    assert!(
        max_im <= 1e-8 * scale.max(f64::MIN_POSITIVE),
        "branch balance polynomial must have real coefficients"
    );
    ComplexPolynomial::new(buf.iter().map(|z| C64::new(z.re, 0.0)).collect())
}

/// How a Fano zero was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FanoZeroKind {
    /// Persistent zero from exactly proportional ionization paths.
    Exact,
    /// Common real root of all four channel cubics.
    CommonRoot,
    /// Weak-pump quadratic prediction.
    WeakPump,
}

impl FanoZeroKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FanoZeroKind::Exact => "exact",
            FanoZeroKind::CommonRoot => "common-root",
            FanoZeroKind::WeakPump => "weak-pump",
        }
    }
}

/// A frequency where the total long-time spectrum vanishes.
#[derive(Clone, Copy, Debug)]
pub struct FanoZero {
    pub energy: f64,
    /// Normalized total spectrum evaluated at `energy`.
    pub residual: f64,
    pub kind: FanoZeroKind,
}

/// A frequency where a conditional spectrum touches zero once per Rabi
/// period.
#[derive(Clone, Copy, Debug)]
pub struct DynamicalZero {
    pub energy: f64,
    pub channel: usize,
    /// Earliest nonnegative time of the conditional minimum.
    pub t_d: f64,
    /// Oscillation phase at the minimum; pi when the minimum is a true touch.
    pub phase_at_min: f64,
    /// Minimum of the normalized conditional spectrum over one Rabi period.
    pub min_intensity: f64,
}

/// Locates persistent Fano zeros: real roots shared by all four channel
/// cubics, confirmed on the normalized total spectrum.
pub fn fano_zeros(pm: &PreparedModel) -> Result<Vec<FanoZero>> {
    if pm.params.pump_off() {
        return Ok(Vec::new());
    }
    let zp = zero_polynomials(pm);
    fano_zeros_from(pm, &zp)
}

pub fn fano_zeros_from(pm: &PreparedModel, zp: &ZeroPolynomials) -> Result<Vec<FanoZero>> {
    let reference = decompose(pm, &EnergyGrid::default_for(&pm.params));
    fano_zeros_inner(pm, zp, &reference)
}

fn fano_zeros_inner(
    pm: &PreparedModel,
    zp: &ZeroPolynomials,
    reference: &crate::spectra::SpectrumDecomposition,
) -> Result<Vec<FanoZero>> {
    if pm.params.pump_off() {
        return Ok(Vec::new());
    }
    let cfg = RootFinderConfig::default();
    let mut real_roots: Vec<Vec<f64>> = Vec::with_capacity(4);
    for ch in 0..2 {
        for br in 0..2 {
            let p = &zp.cubics[ch][br];
            if p.is_zero() {
                return Ok(Vec::new());
            }
            let set = roots_with(p, &cfg)?;
            let mut reals: Vec<f64> = set
                .roots
                .iter()
                .filter(|r| r.value.im.abs() <= REAL_ROOT_IM_TOL * 1.0f64.max(r.value.re.abs()))
                .map(|r| r.value.re)
                .collect();
            reals.sort_by(f64::total_cmp);
            real_roots.push(reals);
        }
    }

    let gamma = pm.params.gamma_total();
    let tol = FANO_MATCH_TOL * gamma.max(1e-12);
    let max_norm = reference.max_i_lt();
    if max_norm <= 0.0 {
        return Ok(Vec::new());
    }

    let mut out: Vec<FanoZero> = Vec::new();
    for &cand in &real_roots[0] {
        let mut members = vec![cand];
        let shared = real_roots[1..].iter().all(|list| {
            list.iter()
                .find(|&&x| (x - cand).abs() <= tol)
                .map(|&x| members.push(x))
                .is_some()
        });
        if !shared {
            continue;
        }
        let energy = members.iter().sum::<f64>() / members.len() as f64;
        let value = decompose_at(pm, energy).total() / reference.norm_const;
        if value > ZERO_RESIDUAL_REL * max_norm {
            continue;
        }
        if out.iter().any(|z| (z.energy - energy).abs() <= tol) {
            continue;
        }
        out.push(FanoZero {
            energy,
            residual: value,
            kind: classify_fano(&pm.params, energy, tol),
        });
    }
    out.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    out.truncate(MAX_FANO);
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

/// The proportionality `mu_b / mu = j_ab / j` decouples one continuum state
/// from both bound states, pinning the persistent zero at
/// `e_b - Re(mu_b v / mu)`.
fn classify_fano(p: &SystemParams, energy: f64, tol: f64) -> FanoZeroKind {
    let lhs = p.mu_b * p.j;
    let rhs = p.mu * p.j_ab;
    let scale = lhs.norm().max(rhs.norm()).max(1e-300);
    if (lhs - rhs).norm() <= 1e-9 * scale {
        let e_exact = p.e_b - (p.mu_b * p.v / p.mu).re;
        if (energy - e_exact).abs() <= 100.0 * tol {
            return FanoZeroKind::Exact;
        }
    }
    FanoZeroKind::CommonRoot
}

/// Evaluates the two long-time branch moduli of one channel directly from
/// the partial fractions; this stays accurate arbitrarily close to the poles.
struct BranchBalance<'a> {
    pm: &'a PreparedModel,
    channel: usize,
}

impl BranchBalance<'_> {
    /// `|a~_1(E)| - |a~_2(E)|`; a sign change is a dynamical zero.
    fn eval(&self, e: f64) -> f64 {
        let a = self.pm.reduced_at(e);
        a[0][self.channel].norm() - a[1][self.channel].norm()
    }
}

/// Locates the dynamical zeros of one conditional channel.
pub fn dynamical_zeros_channel(pm: &PreparedModel, channel: usize) -> Result<Vec<DynamicalZero>> {
    if pm.params.pump_off() {
        return Ok(Vec::new());
    }
    let zp = zero_polynomials(pm);
    let reference = decompose(pm, &EnergyGrid::default_for(&pm.params));
    let fano = fano_zeros_inner(pm, &zp, &reference)?;
    let seeds: Vec<f64> = fano.iter().map(|z| z.energy).collect();
    dynamical_zeros_channel_from(pm, &zp, &reference, &seeds, channel)
}

fn dynamical_zeros_channel_from(
    pm: &PreparedModel,
    zp: &ZeroPolynomials,
    reference: &crate::spectra::SpectrumDecomposition,
    seeds: &[f64],
    channel: usize,
) -> Result<Vec<DynamicalZero>> {
    let h = BranchBalance { pm, channel };
    let poly = &zp.dyn_poly[channel];
    if poly.is_zero() || poly.degree() == 0 {
        return Ok(Vec::new());
    }

    // global candidates from the expanded polynomial; near-degenerate leading
    // coefficients put junk roots far outside the physical range, so
    // candidates beyond the coupling-scale bound are dropped
    let bound = candidate_bound(pm);
    let cfg = RootFinderConfig::default();
    let candidates: Vec<f64> = match roots_with(poly, &cfg) {
        Ok(set) => set
            .roots
            .iter()
            .map(|r| r.value.re)
            .filter(|x| x.abs() <= bound)
            .collect(),
        Err(_) => Vec::new(),
    };

    let mut found: Vec<f64> = Vec::new();

    // sign-change scan over a grid refined around every pole
    let grid = scan_grid(pm, &candidates);
    let vals: Vec<f64> = grid.iter().map(|&e| h.eval(e)).collect();
    for i in 0..grid.len() - 1 {
        let (a, b) = (vals[i], vals[i + 1]);
        if !a.is_finite() || !b.is_finite() {
            continue;
        }
        if a == 0.0 {
            found.push(grid[i]);
        } else if a * b < 0.0 {
            if let Some(z) = bisect(&h, grid[i], grid[i + 1], a) {
                found.push(z);
            }
        }
    }

    // candidate refinement by outward bracketing; only actual sign changes
    // count, so a candidate without a crossing is dropped
    for &x0 in &candidates {
        if let Some(z) = refine_candidate(&h, x0) {
            found.push(z);
        }
    }

    // persistent zeros kill both branch amplitudes, so the balance touches
    // zero instead of crossing; they enter as seeds and face the same
    // verification
    found.extend_from_slice(seeds);

    found.sort_by(f64::total_cmp);
    found.dedup_by(|a, b| (*a - *b).abs() <= 1e-8 * 1.0f64.max(a.abs()));

    // verification on the conditional time signal
    let max_norm = reference.max_i_lt();
    if max_norm <= 0.0 {
        return Ok(Vec::new());
    }
    let mut out: Vec<DynamicalZero> = found
        .into_iter()
        .filter_map(|e| verify_dynamical(pm, &reference.norm_const, max_norm, e, channel))
        .collect();
    out.sort_by(|a, b| a.min_intensity.total_cmp(&b.min_intensity));
    out.truncate(MAX_DYNAMICAL);
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

/// Dynamical zeros of both channels.
pub fn dynamical_zeros(pm: &PreparedModel) -> Result<Vec<DynamicalZero>> {
    if pm.params.pump_off() {
        return Ok(Vec::new());
    }
    let zp = zero_polynomials(pm);
    let reference = decompose(pm, &EnergyGrid::default_for(&pm.params));
    let fano = fano_zeros_inner(pm, &zp, &reference)?;
    let seeds: Vec<f64> = fano.iter().map(|z| z.energy).collect();
    let mut out = dynamical_zeros_channel_from(pm, &zp, &reference, &seeds, 0)?;
    out.extend(dynamical_zeros_channel_from(
        pm, &zp, &reference, &seeds, 1,
    )?);
    Ok(out)
}

/// Junk polynomial roots from near-vanishing leading coefficients land far
/// outside any physically reachable zero; everything real sits within the
/// pole span plus the coupling-strength scale.
fn candidate_bound(pm: &PreparedModel) -> f64 {
    let p = &pm.params;
    let gamma = p.gamma_total().max(1e-3);
    let mu_norm = p.mu.norm().max(1e-12);
    let qg_a = (p.mu_a * p.j).norm() / mu_norm;
    let qg_b = (p.mu_b * p.v).norm() / mu_norm;
    p.e_l.abs()
        + 6.0 * gamma
        + 4.0
            * (qg_a
                + qg_b
                + p.j_ab.norm()
                + p.detuning_a().abs()
                + p.detuning_b().abs()
                + pm.rabi.delta_xi
                + 1.0)
}

fn scan_grid(pm: &PreparedModel, candidates: &[f64]) -> Vec<f64> {
    let p = &pm.params;
    let gamma = p.gamma_total().max(1e-3);
    let (lo, hi) = (p.e_l - 6.0 * gamma, p.e_l + 6.0 * gamma);
    let mut pts: Vec<f64> = (0..1201)
        .map(|i| lo + (hi - lo) * i as f64 / 1200.0)
        .collect();
    // geometric ladders around each pole resolve structure down to the pole
    // width
    for pole in pm.pole_set().poles {
        let center = pole.value.re;
        let w = pole.value.im.abs().max(1e-13);
        let mut s = w * 1e-2;
        while s < 2.0 * gamma {
            pts.push(center + s);
            pts.push(center - s);
            s *= 1.8;
        }
        pts.push(center);
    }
    for &c in candidates {
        let scale = 1.0f64.max(c.abs());
        for k in -6..=6 {
            pts.push(c + scale * 1e-4 * k as f64);
        }
    }
    pts.retain(|x| x.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * 1.0f64.max(a.abs()));
    pts
}

fn bisect(h: &BranchBalance<'_>, mut a: f64, mut b: f64, mut fa: f64) -> Option<f64> {
    for _ in 0..90 {
        let mut m = 0.5 * (a + b);
        let mut fm = h.eval(m);
        if !fm.is_finite() {
            m += (b - a) * 1e-9;
            fm = h.eval(m);
            if !fm.is_finite() {
                return None;
            }
        }
        if fm == 0.0 {
            return Some(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
        if (b - a).abs() <= 1e-15 * 1.0f64.max(a.abs()) {
            break;
        }
    }
    Some(0.5 * (a + b))
}

fn refine_candidate(h: &BranchBalance<'_>, x0: f64) -> Option<f64> {
    if !x0.is_finite() {
        return None;
    }
    let scale = 1.0f64.max(x0.abs());
    // expanding brackets
    let mut delta = 1e-9 * scale;
    while delta <= 3e-2 * scale {
        let (fa, fb) = (h.eval(x0 - delta), h.eval(x0 + delta));
        if fa.is_finite() && fb.is_finite() && fa * fb < 0.0 {
            return bisect(h, x0 - delta, x0 + delta, fa);
        }
        delta *= 3.0;
    }
    None
}

/// Confirms a candidate by minimizing the conditional long-time intensity
/// over one Rabi period.
fn verify_dynamical(
    pm: &PreparedModel,
    norm_const: &f64,
    max_norm: f64,
    energy: f64,
    channel: usize,
) -> Option<DynamicalZero> {
    let dxi = pm.rabi.delta_xi;
    let point = decompose_at(pm, energy);
    let period = TAU / dxi;
    let n = 512;
    let mut best = (0.0f64, f64::INFINITY);
    for k in 0..n {
        let t = period * k as f64 / n as f64;
        let v = point.conditional_at(channel, dxi, t);
        if v < best.1 {
            best = (t, v);
        }
    }
    // golden-section refinement around the sampled minimum
    let half = period / n as f64;
    let (mut a, mut b) = (best.0 - half, best.0 + half);
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = point.conditional_at(channel, dxi, x1);
    let mut f2 = point.conditional_at(channel, dxi, x2);
    for _ in 0..60 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = point.conditional_at(channel, dxi, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = point.conditional_at(channel, dxi, x2);
        }
    }
    let (t_star, min_raw) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let min_norm = if *norm_const > 0.0 {
        min_raw / norm_const
    } else {
        min_raw
    };
    if min_norm > ZERO_RESIDUAL_REL * max_norm {
        return None;
    }
    let t_d = t_star.rem_euclid(period);
    let phase_at_min = (dxi * t_d + point.phi[channel]).rem_euclid(TAU);
    Some(DynamicalZero {
        energy,
        channel,
        t_d,
        phase_at_min,
        min_intensity: min_norm.max(0.0),
    })
}

/// Outcome of the weak-pump quadratic for the Fano-like zero frequencies.
#[derive(Clone, Debug)]
pub struct WeakPumpPrediction {
    pub zeros: Vec<FanoZero>,
    /// False when the printed discriminant comes out genuinely complex, in
    /// which case no prediction is reported.
    pub valid: bool,
    pub discriminant: C64,
}

/// Weak-pump Fano-like zero frequencies from the canonical-transformation
/// quadratic. Independent of the pump amplitude.
///
/// The flat continuum makes the renormalized level positions and transfer
/// coupling equal their bare values; the asymmetry parameters enter only via
/// the coupling products, which stay finite for vanishing couplings.
pub fn weak_pump_zeros(p: &SystemParams) -> WeakPumpPrediction {
    let e_a = C64::new(p.e_a, 0.0);
    let e_b = C64::new(p.e_b, 0.0);
    // q_a gamma_a = mu_a j / mu and the transfer products, all finite even
    // when a coupling vanishes
    let qa_ga = p.mu_a * p.j / p.mu;
    let qb_gb = p.mu_b * p.v / p.mu;
    let qa_tc = p.mu_a * p.j_ab * p.v / p.mu;
    let qb_t = p.mu_b * p.j_ab.conj() * p.j / p.mu;
    let j_ab2 = C64::new(p.j_ab.norm_sqr(), 0.0);

    let disc = (e_a - e_b) * (e_a - e_b) + (qa_ga + qb_gb) * (qa_ga + qb_gb)
        - 2.0 * (e_a - e_b) * (qa_ga - qb_gb)
        + 4.0 * j_ab2
        - 4.0 * qa_tc
        - 4.0 * qb_t;

    let valid = disc.im.abs() <= WEAK_PUMP_IM_TOL * disc.norm().max(1e-300);
    if !valid {
        return WeakPumpPrediction {
            zeros: Vec::new(),
            valid,
            discriminant: disc,
        };
    }
    let d_re = disc.re;
    if d_re < 0.0 {
        return WeakPumpPrediction {
            zeros: Vec::new(),
            valid,
            discriminant: disc,
        };
    }
    let center = (e_a + e_b - qa_ga - qb_gb) / 2.0;
    let half = d_re.sqrt() / 2.0;
    let mut zeros = Vec::new();
    for root in [center + half, center - half] {
        if root.im.abs() <= WEAK_PUMP_IM_TOL * root.norm().max(1.0) {
            zeros.push(FanoZero {
                energy: root.re,
                residual: 0.0,
                kind: FanoZeroKind::WeakPump,
            });
        }
    }
    zeros.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    WeakPumpPrediction {
        zeros,
        valid,
        discriminant: disc,
    }
}

/// Effective dipole of the dressed continuum state at energy `e`, with the
/// mixing coefficients of the two bound states.
#[derive(Clone, Copy, Debug)]
pub struct EffectiveDipole {
    pub mu_bar: C64,
    /// Admixture of the excited neighbor atom.
    pub a: C64,
    /// Admixture of the bound autoionizing level.
    pub b: C64,
    pub determinant: C64,
}

/// Evaluates the dressed-continuum dipole; its real zeros are the weak-pump
/// Fano-like zeros.
pub fn effective_dipole(p: &SystemParams, e: f64) -> Result<EffectiveDipole> {
    let e_a = p.e_a;
    let e_b = p.e_b;
    let g_a = p.gamma_a();
    let g_b = p.gamma_b();
    let t = PI * p.j_ab.conj() * p.j * p.v.conj();
    let i = C64::i();
    let det = C64::new((e - e_a) * (e - e_b), 0.0) + i * g_a * (e - e_b) + i * g_b * (e - e_a)
        - p.j_ab.norm_sqr()
        + 2.0 * i * t.re;
    let scale = (1.0 + (e - e_a).abs()) * (1.0 + (e - e_b).abs());
    if det.norm() < 1e-14 * scale {
        return Err(Error::SingularDeterminant {
            energy: e,
            value: det.norm(),
            tolerance: 1e-14 * scale,
        });
    }
    let qa_ga = p.mu_a * p.j / p.mu;
    let qb_gb = p.mu_b * p.v / p.mu;
    let qa_tc = p.mu_a * p.j_ab * p.v / p.mu;
    let qb_t = p.mu_b * p.j_ab.conj() * p.j / p.mu;
    let numerator = det.conj()
        + (qa_ga + i * g_a) * (e - e_b)
        + qa_tc
        + i * t.conj()
        + (qb_gb + i * g_b) * (e - e_a)
        + qb_t
        + i * t;
    let mu_bar = p.mu * numerator / det.conj();
    let a = ((e - e_b) * p.j.conj() + p.j_ab.conj() * p.v.conj()) / det;
    let b = ((e - e_a) * p.v.conj() + p.j_ab * p.j.conj()) / det;
    Ok(EffectiveDipole {
        mu_bar,
        a,
        b,
        determinant: det,
    })
}

/// One tracked branch of dynamical zeros across a pump sweep.
#[derive(Clone, Debug)]
pub struct Branch {
    pub channel: usize,
    /// `(omega index, normalized frequency (E_D - e_b) / gamma)`.
    pub points: Vec<(usize, f64)>,
}

/// A change of the per-channel zero count between adjacent pump samples.
#[derive(Clone, Copy, Debug)]
pub struct BranchEvent {
    pub omega_index: usize,
    pub channel: usize,
    /// New count minus old count; pair creation/annihilation makes this even.
    pub delta: i64,
}

/// Dynamical-zero trajectories over a pump-strength grid.
#[derive(Clone, Debug)]
pub struct ZeroTrajectory {
    pub omega_values: Vec<f64>,
    pub branches: Vec<Branch>,
    pub events: Vec<BranchEvent>,
    /// Pump samples whose evaluation failed, with the error message.
    pub failures: Vec<(usize, String)>,
}

/// Sweeps the pump strength, re-deriving the pump amplitude from the base
/// couplings at each grid point, and links zeros into branches by nearest
/// neighbor continuation.
pub fn sweep(p_base: &SystemParams, omega_grid: &[f64]) -> Result<ZeroTrajectory> {
    if omega_grid.is_empty() || omega_grid.iter().any(|x| !x.is_finite() || *x == 0.0) {
        return Err(Error::InvalidInput(
            "omega grid must be nonempty with finite nonzero entries".into(),
        ));
    }
    let red = derive_reduced(p_base)?;
    let gamma = red.gamma();
    let q_w = red.q_weighted();
    let e_b = p_base.e_b;

    let columns: Vec<std::result::Result<[Vec<f64>; 2], String>> = omega_grid
        .par_iter()
        .map(|&omega| {
            let mut p = *p_base;
            p.alpha_l =
                C64::new(omega, 0.0) / ((4.0 * PI * gamma).sqrt() * (q_w + C64::i()) * p.mu);
            let pm = PreparedModel::new(&p).map_err(|e| e.to_string())?;
            let zs = dynamical_zeros(&pm).map_err(|e| e.to_string())?;
            let mut per: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
            for z in zs {
                per[z.channel].push((z.energy - e_b) / gamma);
            }
            per[0].sort_by(f64::total_cmp);
            per[1].sort_by(f64::total_cmp);
            Ok(per)
        })
        .collect();

    let mut failures = Vec::new();
    let mut branches: Vec<Branch> = Vec::new();
    let mut events: Vec<BranchEvent> = Vec::new();

    for ch in 0..2 {
        // open branches as (branch index, last value)
        let mut active: Vec<(usize, f64)> = Vec::new();
        let mut prev_count: Option<usize> = None;
        for (i, column) in columns.iter().enumerate() {
            let xs = match column {
                Ok(per) => &per[ch],
                Err(msg) => {
                    if ch == 0 {
                        failures.push((i, msg.clone()));
                    }
                    continue;
                }
            };
            // greedy nearest-neighbor matching
            let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
            for (ai, &(_, last)) in active.iter().enumerate() {
                for (xi_idx, &x) in xs.iter().enumerate() {
                    let d = (x - last).abs();
                    if d <= BRANCH_GAP {
                        pairs.push((ai, xi_idx, d));
                    }
                }
            }
            pairs.sort_by(|a, b| a.2.total_cmp(&b.2));
            let mut used_active = vec![false; active.len()];
            let mut used_new = vec![false; xs.len()];
            let mut next_active: Vec<(usize, f64)> = Vec::new();
            for (ai, xi_idx, _) in pairs {
                if used_active[ai] || used_new[xi_idx] {
                    continue;
                }
                used_active[ai] = true;
                used_new[xi_idx] = true;
                let (bidx, _) = active[ai];
                branches[bidx].points.push((i, xs[xi_idx]));
                next_active.push((bidx, xs[xi_idx]));
            }
            for (xi_idx, &x) in xs.iter().enumerate() {
                if !used_new[xi_idx] {
                    let bidx = branches.len();
                    branches.push(Branch {
                        channel: ch,
                        points: vec![(i, x)],
                    });
                    next_active.push((bidx, x));
                }
            }
            active = next_active;
            if let Some(pc) = prev_count {
                if pc != xs.len() {
                    events.push(BranchEvent {
                        omega_index: i,
                        channel: ch,
                        delta: xs.len() as i64 - pc as i64,
                    });
                }
            }
            prev_count = Some(xs.len());
        }
    }

    Ok(ZeroTrajectory {
        omega_values: omega_grid.to_vec(),
        branches,
        events,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ReducedParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn prepared(q: f64, omega: f64) -> PreparedModel {
        let p = ReducedParams {
            q_a: q,
            q_b: q,
            gamma_a: 1.0,
            gamma_b: 1.0,
            omega,
            de_a: 0.0,
            de_b: 0.0,
        }
        .realize(1.0)
        .unwrap();
        PreparedModel::new(&p).unwrap()
    }

    /// Parameters with exactly proportional ionization paths and unit widths.
    fn exact_fano_params(omega: f64) -> SystemParams {
        let mu = c(1.0, 0.0);
        let j = c(0.3, 0.0);
        let mu_b = c(0.5, 0.0);
        let j_ab = c(0.15, 0.0); // mu_b/mu = j_ab/j
        let v = c(1.0 / PI.sqrt(), 0.0);
        let mu_a = c(0.3 * PI, 0.0); // q_a = 1
        let g_a = PI * j.norm_sqr();
        let g_b = 1.0;
        let q_b = (mu_b / (PI * mu * v.conj())).re;
        let gamma = g_a + g_b;
        let q_w = (g_a * 1.0 + g_b * q_b) / gamma;
        let alpha_l =
            C64::new(omega, 0.0) / ((4.0 * PI * gamma).sqrt() * (C64::new(q_w, 0.0) + C64::i()));
        SystemParams {
            e_a: 1.0,
            e_b: 1.0,
            e_l: 1.0,
            mu_a,
            mu_b,
            mu,
            v,
            j,
            j_ab,
            alpha_l,
        }
    }

    #[test]
    fn leading_cubic_coefficient_is_strength_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let p = ReducedParams {
                q_a: rng.gen_range(-3.0..3.0),
                q_b: rng.gen_range(-3.0..3.0),
                gamma_a: rng.gen_range(0.2..1.5),
                gamma_b: rng.gen_range(0.2..1.5),
                omega: rng.gen_range(0.2..2.0),
                de_a: rng.gen_range(-0.5..0.5),
                de_b: rng.gen_range(-0.5..0.5),
            }
            .realize(1.0)
            .unwrap();
            let pm = PreparedModel::new(&p).unwrap();
            let zp = zero_polynomials(&pm);
            for ch in 0..2 {
                for br in 0..2 {
                    let sum: C64 = zp.a_coeffs[ch][br].iter().sum();
                    let cubic = &zp.cubics[ch][br];
                    let lead = if cubic.degree() == 3 {
                        cubic.coeffs()[3]
                    } else {
                        // degree collapsed because the strength sum vanishes
                        C64::new(0.0, 0.0)
                    };
                    assert!(
                        (lead - sum).norm() <= 1e-12 * sum.norm().max(1e-12),
                        "leading coefficient mismatch"
                    );
                }
            }
        }
    }

    #[test]
    fn cubic_matches_partial_fractions() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let pm = prepared(1.0, 1.3);
        let zp = zero_polynomials(&pm);
        for ch in 0..2 {
            for br in 0..2 {
                let xi = pm.xi(br);
                for _ in 0..20 {
                    let e = rng.gen_range(-6.0..8.0);
                    let mut pf = C64::new(0.0, 0.0);
                    let mut denom_prod = C64::new(1.0, 0.0);
                    for j in 0..4 {
                        let d = C64::new(e - xi, 0.0) - pm.eigen.lambdas[j];
                        pf += zp.a_coeffs[ch][br][j] / d;
                        denom_prod *= d;
                    }
                    let lhs = zp.cubics[ch][br].eval(c(e, 0.0)) / denom_prod;
                    assert!((lhs - pf).norm() <= 1e-10 * pf.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn no_pump_no_strengths() {
        let p = ReducedParams {
            q_a: 1.0,
            q_b: 1.0,
            gamma_a: 1.0,
            gamma_b: 1.0,
            omega: 0.0,
            de_a: 0.5,
            de_b: 0.0,
        }
        .realize(1.0)
        .unwrap();
        let pm = PreparedModel::new(&p).unwrap();
        let zp = zero_polynomials(&pm);
        for ch in 0..2 {
            for br in 0..2 {
                for j in 0..4 {
                    assert!(zp.a_coeffs[ch][br][j].norm() < 1e-14);
                }
            }
        }
        assert!(fano_zeros(&pm).unwrap().is_empty());
        assert!(dynamical_zeros(&pm).unwrap().is_empty());
    }

    #[test]
    fn exact_fano_zero_persists_at_strong_pumping() {
        for omega in [0.5, 2.0] {
            let p = exact_fano_params(omega);
            let pm = PreparedModel::new(&p).unwrap();
            let zs = fano_zeros(&pm).unwrap();
            assert!(!zs.is_empty(), "omega={omega}");
            let e_f = p.e_b - (p.mu_b * p.v / p.mu).re;
            let hit = zs
                .iter()
                .find(|z| (z.energy - e_f).abs() < 1e-5)
                .unwrap_or_else(|| panic!("no zero at {e_f}, got {zs:?}"));
            assert_eq!(hit.kind, FanoZeroKind::Exact);
            assert!(hit.residual < 1e-6);
        }
    }

    #[test]
    fn generic_parameters_have_no_persistent_zero() {
        let pm = prepared(1.0, 1.0); // proportionality violated (j_ab = 0)
        let zs = fano_zeros(&pm).unwrap();
        assert!(zs.is_empty(), "{zs:?}");
    }

    #[test]
    fn fano_zeros_appear_in_both_channels_dynamics() {
        let p = exact_fano_params(0.5);
        let pm = PreparedModel::new(&p).unwrap();
        let fano = fano_zeros(&pm).unwrap();
        let dyn_zeros = dynamical_zeros(&pm).unwrap();
        for fz in &fano {
            for ch in 0..2 {
                let near = dyn_zeros
                    .iter()
                    .filter(|z| z.channel == ch)
                    .map(|z| (z.energy - fz.energy).abs())
                    .fold(f64::MAX, f64::min);
                assert!(near < 1e-6, "Fano zero {fz:?} missing in channel {ch}");
            }
        }
    }

    #[test]
    fn resonant_pumping_makes_channels_coincide() {
        let pm = prepared(1.0, 0.8);
        let zs = dynamical_zeros(&pm).unwrap();
        let ch0: Vec<f64> = zs
            .iter()
            .filter(|z| z.channel == 0)
            .map(|z| z.energy)
            .collect();
        let ch1: Vec<f64> = zs
            .iter()
            .filter(|z| z.channel == 1)
            .map(|z| z.energy)
            .collect();
        assert_eq!(ch0.len(), ch1.len());
        for (a, b) in ch0.iter().zip(&ch1) {
            assert!((a - b).abs() <= 1e-8 * 1.0f64.max(a.abs()));
        }
    }

    #[test]
    fn weak_pump_limit_of_dynamical_zeros() {
        // degenerate symmetric case: zeros approach both quadratic roots
        let wp = weak_pump_zeros(&prepared(1.0, 0.5).params);
        assert!(wp.valid);
        let targets: Vec<f64> = wp.zeros.iter().map(|z| z.energy).collect();
        assert_eq!(targets.len(), 2);
        assert!((targets[0] + 1.0).abs() < 1e-12);
        assert!((targets[1] - 1.0).abs() < 1e-12);

        let mut last = [f64::MAX, f64::MAX];
        for omega in [0.05, 0.02, 0.01, 0.005] {
            let pm = prepared(1.0, omega);
            let zs = dynamical_zeros_channel(&pm, 0).unwrap();
            for (ti, &target) in targets.iter().enumerate() {
                let d = zs
                    .iter()
                    .map(|z| (z.energy - target).abs())
                    .fold(f64::MAX, f64::min);
                assert!(d < last[ti], "distance to {target} not shrinking: {d}");
                last[ti] = d;
            }
        }
        assert!(last[0] < 5e-3 * 2.0);
        assert!(last[1] < 5e-3 * 2.0);
    }

    #[test]
    fn dynamical_zero_phase_and_minimum() {
        let pm = prepared(1.0, 1.0);
        let zs = dynamical_zeros(&pm).unwrap();
        assert!(!zs.is_empty());
        for z in &zs {
            assert!(z.min_intensity <= 1e-6);
            assert!((z.phase_at_min - PI).abs() < 1e-4);
            // branch moduli balance at the zero
            let a = pm.reduced_at(z.energy);
            let (a1, a2) = (a[0][z.channel].norm(), a[1][z.channel].norm());
            assert!((a1 - a2).abs() <= 1e-8 * a1.max(a2).max(1e-300));
        }
    }

    #[test]
    fn weak_pump_decoupled_neighbor() {
        // mu_a = j = 0, j_ab = 0: zeros at e_b - q_b gamma_b and e_a
        let p = SystemParams {
            e_a: 1.3,
            e_b: 0.9,
            e_l: 1.0,
            mu_a: c(0.0, 0.0),
            mu_b: c(2.0 / PI.sqrt() * PI, 0.0), // q_b = 2 with v below
            mu: c(1.0, 0.0),
            v: c(1.0 / PI.sqrt(), 0.0),
            j: c(0.0, 0.0),
            j_ab: c(0.0, 0.0),
            alpha_l: c(0.01, 0.0),
        };
        let wp = weak_pump_zeros(&p);
        assert!(wp.valid);
        let got: Vec<f64> = wp.zeros.iter().map(|z| z.energy).collect();
        // q_b gamma_b = mu_b v / mu = 2
        let want = [0.9 - 2.0, 1.3];
        assert_eq!(got.len(), 2);
        assert!((got[0] - want[0]).abs() < 1e-12);
        assert!((got[1] - want[1]).abs() < 1e-12);
    }

    #[test]
    fn weak_pump_no_transfer_reduces_to_double_fano() {
        // j_ab = 0 reduces the quadratic to the two-path form with t = 0
        let p = SystemParams {
            e_a: 1.3,
            e_b: 0.8,
            e_l: 1.0,
            mu_a: c(0.5 * PI, 0.0),
            mu_b: c(0.7 * PI, 0.0),
            mu: c(1.0, 0.0),
            v: c(0.6, 0.0),
            j: c(0.5, 0.0),
            j_ab: c(0.0, 0.0),
            alpha_l: c(0.01, 0.0),
        };
        let wp = weak_pump_zeros(&p);
        assert!(wp.valid);
        // hand-evaluated quadratic with t = 0
        let qa_ga = (p.mu_a * p.j / p.mu).re;
        let qb_gb = (p.mu_b * p.v / p.mu).re;
        let center = (p.e_a + p.e_b - qa_ga - qb_gb) / 2.0;
        let d = (p.e_a - p.e_b).powi(2) + (qa_ga + qb_gb).powi(2)
            - 2.0 * (p.e_a - p.e_b) * (qa_ga - qb_gb);
        let want = [center - d.sqrt() / 2.0, center + d.sqrt() / 2.0];
        let got: Vec<f64> = wp.zeros.iter().map(|z| z.energy).collect();
        assert_eq!(got.len(), 2);
        assert!((got[0] - want[0]).abs() < 1e-12);
        assert!((got[1] - want[1]).abs() < 1e-12);
    }

    #[test]
    fn weak_pump_complex_discriminant_reports_no_prediction() {
        // an imaginary neighbor dipole makes the printed discriminant
        // genuinely complex; no frequencies are reported then
        let p = SystemParams {
            e_a: 1.2,
            e_b: 0.8,
            e_l: 1.0,
            mu_a: c(0.0, 0.5 * PI),
            mu_b: c(0.7 * PI, 0.0),
            mu: c(1.0, 0.0),
            v: c(0.6, 0.0),
            j: c(0.5, 0.0),
            j_ab: c(0.0, 0.0),
            alpha_l: c(0.01, 0.0),
        };
        let wp = weak_pump_zeros(&p);
        assert!(!wp.valid);
        assert!(wp.zeros.is_empty());
        assert!(wp.discriminant.im.abs() > 1e-6);
    }

    #[test]
    fn effective_dipole_vanishes_at_weak_pump_zeros() {
        let p = SystemParams {
            e_a: 1.3,
            e_b: 0.8,
            e_l: 1.0,
            mu_a: c(0.5 * PI, 0.0),
            mu_b: c(0.7 * PI, 0.0),
            mu: c(1.0, 0.0),
            v: c(0.6, 0.0),
            j: c(0.5, 0.0),
            j_ab: c(0.1, 0.0),
            alpha_l: c(0.01, 0.0),
        };
        let wp = weak_pump_zeros(&p);
        assert!(wp.valid && wp.zeros.len() == 2);
        for z in &wp.zeros {
            let ed = effective_dipole(&p, z.energy).unwrap();
            assert!(
                ed.mu_bar.norm() < 1e-10,
                "mu_bar({}) = {:.3e}",
                z.energy,
                ed.mu_bar.norm()
            );
        }
    }

    #[test]
    fn effective_dipole_reduces_to_bare_dipole() {
        let p = SystemParams {
            e_a: 1.3,
            e_b: 0.8,
            e_l: 1.0,
            mu_a: c(0.0, 0.0),
            mu_b: c(0.0, 0.0),
            mu: c(0.7, 0.2),
            v: c(0.0, 0.0),
            j: c(0.0, 0.0),
            j_ab: c(0.0, 0.0),
            alpha_l: c(0.01, 0.0),
        };
        for e in [-2.0, 0.1, 2.4] {
            let ed = effective_dipole(&p, e).unwrap();
            assert!((ed.mu_bar - p.mu).norm() < 1e-12);
        }
    }

    #[test]
    fn effective_dipole_singular_at_dark_state() {
        // degenerate levels with j_ab = 0 host a bound state in the
        // continuum; the transformation determinant vanishes there
        let pm = prepared(1.0, 0.005);
        assert!(matches!(
            effective_dipole(&pm.params, pm.params.e_b),
            Err(Error::SingularDeterminant { .. })
        ));
    }

    #[test]
    fn effective_dipole_shapes_weak_pump_wings() {
        // away from the pump line, the spectrum compensated by the square of
        // the detuning follows the dressed-dipole profile
        let pm = prepared(1.0, 0.005);
        let p = pm.params;
        let grid = EnergyGrid::default_for(&p);
        let dec = decompose(&pm, &grid);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, &e) in grid.values().iter().enumerate() {
            if (e - p.e_l).abs() <= 0.05 {
                continue;
            }
            let ed = match effective_dipole(&p, e) {
                Ok(ed) => ed,
                Err(_) => continue,
            };
            xs.push(dec.i_lt[i] * (e - p.e_l).powi(2));
            ys.push(ed.mu_bar.norm_sqr());
        }
        let corr = pearson(&xs, &ys);
        assert!(corr > 0.99, "correlation {corr}");
    }

    #[test]
    fn sweep_links_branches_and_finds_pair_events() {
        let base = prepared(1.0, 1.0).params;
        let omegas: Vec<f64> = (0..41).map(|i| 0.05 + 3.95 * i as f64 / 40.0).collect();
        let tr = sweep(&base, &omegas).unwrap();
        assert!(tr.failures.is_empty());
        assert!(
            !tr.events.is_empty(),
            "expected creation/annihilation events"
        );
        for ev in &tr.events {
            assert!(ev.delta % 2 == 0, "odd count change {ev:?}");
        }
    }

    #[test]
    fn sweep_symmetric_under_pump_sign() {
        let base = prepared(1.0, 1.0).params;
        for omega in [0.4, 0.8, 1.6] {
            let plus = sweep(&base, &[omega]).unwrap();
            let minus = sweep(&base, &[-omega]).unwrap();
            let collect = |tr: &ZeroTrajectory, ch: usize| -> Vec<f64> {
                let mut xs: Vec<f64> = tr
                    .branches
                    .iter()
                    .filter(|b| b.channel == ch)
                    .flat_map(|b| b.points.iter().map(|p| p.1))
                    .collect();
                xs.sort_by(f64::total_cmp);
                xs
            };
            for ch in 0..2 {
                let a = collect(&plus, ch);
                let b = collect(&minus, ch);
                assert_eq!(a.len(), b.len());
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn sweep_rejects_zero_samples() {
        let base = prepared(1.0, 1.0).params;
        assert!(matches!(
            sweep(&base, &[0.5, 0.0]),
            Err(Error::InvalidInput(_))
        ));
    }

    fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for (x, y) in xs.iter().zip(ys) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
            syy += (y - my) * (y - my);
        }
        sxy / (sxx * syy).sqrt()
    }
}
