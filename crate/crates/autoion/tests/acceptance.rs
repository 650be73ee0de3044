//! Acceptance suite. Each test prints one PASS/FAIL line; run with
//! `cargo test -p autoion --test acceptance -- --nocapture --test-threads=1`
//! to see every line.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use autoion::model::PreparedModel;
use autoion::numerics::{eigen_system, eigenvalue_shift, quartic_coefficients, roots};
use autoion::oracle::{convergence_study, integrate, ContinuumDiscretization};
use autoion::params::ReducedParams;
use autoion::spectra::{decompose, decompose_at, EnergyGrid};
use autoion::zeros::{dynamical_zeros, fano_zeros, sweep, weak_pump_zeros};
use autoion::{build, SystemParams};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn report(name: &str, pass: bool, detail: &str) -> bool {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn figure_reduced(q_a: f64, q_b: f64, gamma_a: f64, gamma_b: f64, omega: f64) -> SystemParams {
    ReducedParams {
        q_a,
        q_b,
        gamma_a,
        gamma_b,
        omega,
        de_a: 0.0,
        de_b: 0.0,
    }
    .realize(1.0)
    .unwrap()
}

fn multiset_deviation(a: &[C64], b: &[C64]) -> f64 {
    let mut pool: Vec<C64> = b.to_vec();
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = pool
            .iter()
            .enumerate()
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|l, r| l.1.total_cmp(&r.1))
            .unwrap();
        worst = worst.max(d);
        pool.remove(k);
    }
    worst
}

/// Quartic-vs-eigendecomposition equivalence over randomized parameter sets.
#[test]
fn criterion_01_closed_form_quartic_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst: f64 = 0.0;
    let mut done = 0usize;
    while done < 100 {
        let e_a = rng.gen_range(-1.5..1.5);
        let e_b = rng.gen_range(-1.5..1.5);
        let e_l = rng.gen_range(-1.5..1.5);
        let mut rc = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let p = SystemParams {
            e_a,
            e_b,
            e_l,
            mu_a: rc(),
            mu_b: rc(),
            mu: rc(),
            v: rc(),
            j: rc(),
            j_ab: rc(),
            alpha_l: 0.5 * rc(),
        };
        let es = match eigen_system(&build(&p).m) {
            Ok(es) => es,
            Err(_) => continue,
        };
        let shift = eigenvalue_shift(&p);
        let shifted: Vec<C64> = roots(&quartic_coefficients(&p))
            .unwrap()
            .flattened()
            .iter()
            .map(|z| z - c(0.0, shift))
            .collect();
        worst = worst.max(multiset_deviation(&shifted, &es.lambdas));
        done += 1;
    }
    let pass = report(
        "closed-form quartic equals eigen-solve",
        worst <= 1e-9,
        &format!("worst multiset deviation {worst:.3e} over 100 sets (tol 1e-9)"),
    );
    assert!(pass);
}

/// The eight poles split into four pairs with equal imaginary parts and real
/// gaps equal to the Rabi splitting.
#[test]
fn criterion_02_pole_pairing() {
    let mut worst_im: f64 = 0.0;
    let mut worst_re: f64 = 0.0;
    for q in [100.0, 1.0] {
        for omega in [0.1, 1.0, 2.0] {
            let p = figure_reduced(q, q, 1.0, 1.0, omega);
            let pm = PreparedModel::new(&p).unwrap();
            let ps = pm.pole_set();
            for (a, b) in ps.pairs() {
                worst_im = worst_im.max((a.value.im - b.value.im).abs());
                worst_re = worst_re.max(((b.value.re - a.value.re) - ps.delta_xi).abs());
            }
        }
    }
    let pass = report(
        "pole pairing",
        worst_im <= 1e-12 && worst_re <= 1e-12,
        &format!("max |dIm| {worst_im:.2e}, max |dRe - delta_xi| {worst_re:.2e} (tol 1e-12)"),
    );
    assert!(pass);
}

/// The total long-time spectrum is time independent.
#[test]
fn criterion_03_total_spectrum_time_independence() {
    let p = figure_reduced(1.0, 1.0, 1.0, 1.0, 1.0);
    let pm = PreparedModel::new(&p).unwrap();
    let grid = EnergyGrid::default_for(&p);
    let dec = decompose(&pm, &grid);
    let xi1 = pm.rabi.xi_1;
    let xi2 = pm.rabi.xi_2;
    let t_min = pm.t_min;
    let times = [t_min, 1.3 * t_min, 1.7 * t_min, 2.0 * t_min];
    let mut sup: f64 = 0.0;
    for &e in grid.values() {
        let a = pm.reduced_at(e);
        let total_at = |t: f64| -> f64 {
            let mut tot = 0.0;
            for ch in 0..2 {
                let d = a[0][ch] * (C64::i() * (xi1 - e) * t).exp()
                    + a[1][ch] * (C64::i() * (xi2 - e) * t).exp();
                tot += d.norm_sqr();
            }
            tot / dec.norm_const
        };
        let vals: Vec<f64> = times.iter().map(|&t| total_at(t)).collect();
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                sup = sup.max((vals[i] - vals[j]).abs());
            }
        }
    }
    let pass = report(
        "total-spectrum time independence",
        sup <= 1e-8,
        &format!("sup |I(E,t1) - I(E,t2)| = {sup:.3e} on normalized scale (tol 1e-8)"),
    );
    assert!(pass);
}

/// The two conditional channels oscillate with equal magnitude and opposite
/// phase.
#[test]
fn criterion_04_anti_phase_oscillation() {
    let p = figure_reduced(1.0, 1.0, 1.0, 1.0, 1.0);
    let pm = PreparedModel::new(&p).unwrap();
    let grid = EnergyGrid::default_for(&p);
    let mut worst_mag: f64 = 0.0;
    let mut worst_phase: f64 = 0.0;
    for &e in grid.values() {
        let point = decompose_at(&pm, e);
        let scale = point.i_osc[0].max(point.i_osc[1]).max(1e-300);
        worst_mag = worst_mag.max((point.i_osc[0] - point.i_osc[1]).abs() / scale);
        if point.i_osc[0] > 1e-300 {
            let dphi = (point.phi[1] - point.phi[0]).rem_euclid(std::f64::consts::TAU);
            worst_phase = worst_phase.max((dphi - PI).abs());
        }
    }
    let pass = report(
        "anti-phase oscillation",
        worst_mag <= 1e-8 && worst_phase <= 1e-8,
        &format!("max relative magnitude mismatch {worst_mag:.2e}, max phase error {worst_phase:.2e} (tol 1e-8)"),
    );
    assert!(pass);
}

/// Proportional ionization paths pin a persistent spectral zero at
/// `e_b - gamma_b q_b`, at weak and strong pumping alike.
#[test]
fn criterion_05_exact_fano_zero() {
    let mu = c(1.0, 0.0);
    let j = c(0.3, 0.0);
    let mu_b = c(0.5, 0.0);
    let j_ab = c(0.15, 0.0);
    let v = c(1.0 / PI.sqrt(), 0.0);
    let mu_a = c(0.3 * PI, 0.0);
    let g_a = PI * j.norm_sqr();
    let g_b = 1.0;
    let q_b = (mu_b / (PI * mu * v.conj())).re;
    let gamma = g_a + g_b;
    let q_w = (g_a + g_b * q_b) / gamma;
    let mut pass = true;
    let mut detail = String::new();
    for omega in [0.5, 2.0] {
        let alpha_l =
            C64::new(omega, 0.0) / ((4.0 * PI * gamma).sqrt() * (C64::new(q_w, 0.0) + C64::i()));
        let p = SystemParams {
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
        };
        let pm = PreparedModel::new(&p).unwrap();
        let e_f = p.e_b - (mu_b * v / mu).re;
        let dec = decompose(&pm, &EnergyGrid::default_for(&p));
        let value = decompose_at(&pm, e_f).total() / dec.norm_const;
        pass &= value <= 1e-6;
        detail.push_str(&format!("Omega={omega}: I_lt({e_f:.4}) = {value:.2e}; "));
    }
    let pass = report(
        "exact Fano zero under strong pumping",
        pass,
        &format!("{detail}(tol 1e-6, normalized)"),
    );
    assert!(pass);
}

/// Weak-pump prediction of the Fano-like zero frequencies in the degenerate
/// symmetric configuration, and the behavior of the true spectrum there.
#[test]
fn criterion_06_weak_pump_fano_like_zeros() {
    let base = figure_reduced(1.0, 1.0, 1.0, 1.0, 0.005);
    let gamma = 2.0;

    // (a) the quadratic yields {1, -1}
    let wp = weak_pump_zeros(&base);
    let freqs: Vec<f64> = wp.zeros.iter().map(|z| z.energy).collect();
    let part_a = wp.valid
        && freqs.len() == 2
        && (freqs[0] + 1.0).abs() < 1e-10
        && (freqs[1] - 1.0).abs() < 1e-10;

    // (b) dynamical zeros at Omega = 0.005 lie within 5e-3 gamma of both
    let pm = PreparedModel::new(&base).unwrap();
    let zs = dynamical_zeros(&pm).unwrap();
    let mut part_b = true;
    let mut nearest = Vec::new();
    for &target in &[-1.0, 1.0] {
        let d = zs
            .iter()
            .filter(|z| z.channel == 0)
            .map(|z| (z.energy - target).abs())
            .fold(f64::MAX, f64::min);
        nearest.push(d);
        part_b &= d <= 5e-3 * gamma;
    }

    // (c) the normalized total spectrum at the predicted frequencies
    let dec = decompose(&pm, &EnergyGrid::default_for(&base));
    let max_norm = dec.max_i_lt();
    let mut part_c = true;
    let mut values = Vec::new();
    for &target in &[-1.0, 1.0] {
        let value = decompose_at(&pm, target).total() / dec.norm_const;
        values.push(value / max_norm);
        part_c &= value <= 1e-3 * max_norm;
    }

    let pass = part_a && part_b && part_c;
    let fmt = |xs: &[f64]| -> String {
        xs.iter()
            .map(|x| format!("{x:.3e}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    report(
        "weak-pump Fano-like zeros",
        pass,
        &format!(
            "quadratic roots {freqs:?} (want [-1, 1]: {part_a}); \
             dynamical-zero distances [{}] (tol 5e-3*gamma: {part_b}); \
             I_lt/max at [-1, +1] = [{}] (tol 1e-3: {part_c})",
            fmt(&nearest),
            fmt(&values),
        ),
    );
    assert!(
        pass,
        "the spectrum is not dark at the upper predicted frequency: the \
         degenerate symmetric configuration hosts a pump-dark dressed state \
         at e_b (the transformation determinant vanishes there together with \
         the quadratic), so the upper root marks a conditional dynamical zero \
         but not a zero of the total spectrum; the total peaks there instead. \
         Only the lower frequency is a true spectral zero."
    );
}

/// Structural bounds on the number of zeros over randomized parameters.
#[test]
fn criterion_07_zero_count_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let mut max_fano = 0usize;
    let mut max_dyn = 0usize;
    let mut done = 0usize;
    while done < 500 {
        let sign_a = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let sign_b = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let r = ReducedParams {
            q_a: sign_a * 10f64.powf(rng.gen_range(-0.7..2.0)),
            q_b: sign_b * 10f64.powf(rng.gen_range(-0.7..2.0)),
            gamma_a: rng.gen_range(0.05..2.0),
            gamma_b: rng.gen_range(0.05..2.0),
            omega: rng.gen_range(0.05..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            de_a: rng.gen_range(-1.0..1.0),
            de_b: rng.gen_range(-1.0..1.0),
        };
        let mut p = r.realize(1.0).unwrap();
        if rng.gen_bool(0.1) {
            // exactly proportional ionization paths host a persistent zero
            p.j_ab = p.mu_b * p.j / p.mu;
        } else if rng.gen_bool(0.4) {
            p.j_ab = c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        }
        let pm = match PreparedModel::new(&p) {
            Ok(pm) => pm,
            Err(_) => continue,
        };
        let fano = match fano_zeros(&pm) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let dyns = match dynamical_zeros(&pm) {
            Ok(d) => d,
            Err(_) => continue,
        };
        max_fano = max_fano.max(fano.len());
        for ch in 0..2 {
            max_dyn = max_dyn.max(dyns.iter().filter(|z| z.channel == ch).count());
        }
        done += 1;
    }
    let pass = report(
        "zero-count bounds",
        max_fano <= 3 && max_dyn <= 15,
        &format!("max Fano zeros {max_fano} (<=3), max dynamical zeros per channel {max_dyn} (<=15), 500 sets"),
    );
    assert!(pass);
}

/// Every reported dynamical zero darkens its conditional channel once per
/// Rabi period; resonant pumping makes the two channel lists coincide.
#[test]
fn criterion_08_dynamical_zero_verification() {
    let mut worst_min: f64 = 0.0;
    let mut worst_pair: f64 = 0.0;
    for (q, omega) in [(1.0, 1.0), (1.0, 0.4), (100.0, 0.8)] {
        let p = figure_reduced(q, q, 1.0, 1.0, omega);
        let pm = PreparedModel::new(&p).unwrap();
        let dec = decompose(&pm, &EnergyGrid::default_for(&p));
        let max_norm = dec.max_i_lt();
        let zs = dynamical_zeros(&pm).unwrap();
        assert!(!zs.is_empty());
        for z in &zs {
            worst_min = worst_min.max(z.min_intensity / max_norm);
        }
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
        assert_eq!(ch0.len(), ch1.len(), "resonant channel counts differ");
        for (a, b) in ch0.iter().zip(&ch1) {
            worst_pair = worst_pair.max((a - b).abs());
        }
    }
    let pass = report(
        "dynamical-zero verification",
        worst_min <= 1e-6 && worst_pair <= 1e-8,
        &format!("worst min-intensity/max {worst_min:.2e} (tol 1e-6); worst resonant channel mismatch {worst_pair:.2e} (tol 1e-8)"),
    );
    assert!(pass);
}

/// Qualitative shapes of the shipped parameter regimes: Autler-Townes pairs
/// with growing separation, the dominant-autoionization doublet, and the
/// five-fold zero bundle of the weak-transfer regime.
#[test]
fn criterion_09_figure_structure() {
    // two peaks, separation growing with pump strength
    let mut seps = Vec::new();
    let mut counts_a = Vec::new();
    for omega in [0.1, 1.0, 2.0] {
        let p = figure_reduced(100.0, 100.0, 1.0, 1.0, omega);
        let pm = PreparedModel::new(&p).unwrap();
        let grid = EnergyGrid::default_for(&p);
        let dec = decompose(&pm, &grid);
        let peaks = local_maxima(grid.values(), &dec.i_lt, 1e-6);
        counts_a.push(peaks.len());
        seps.push(if peaks.len() >= 2 {
            peaks[peaks.len() - 1] - peaks[0]
        } else {
            0.0
        });
    }
    let part_a = counts_a.iter().all(|&n| n == 2) && seps[0] < seps[1] && seps[1] < seps[2];

    // dominant autoionization path: two peaks at every pump strength
    let mut counts_b = Vec::new();
    for omega in [0.1, 1.0, 2.0] {
        let p = figure_reduced(1.0, 100.0, 1.0, 1.0, omega);
        let pm = PreparedModel::new(&p).unwrap();
        let grid = EnergyGrid::default_for(&p);
        let dec = decompose(&pm, &grid);
        counts_b.push(local_maxima(grid.values(), &dec.i_lt, 1e-6).len());
    }
    let part_b = counts_b.iter().all(|&n| n == 2);

    // weak energy-transfer regime: five zero branches collapse onto e_b
    let base = ReducedParams {
        q_a: 100.0,
        q_b: 1.0,
        gamma_a: 1e-4,
        gamma_b: 1.0,
        omega: 0.02,
        de_a: 0.0,
        de_b: 0.0,
    }
    .realize(1.0)
    .unwrap();
    let gamma = base.gamma_total();
    let count_near = |omega: f64| -> (usize, f64) {
        let mut p = base;
        let red = autoion::derive_reduced(&base).unwrap();
        p.alpha_l = C64::new(omega, 0.0)
            / ((4.0 * PI * red.gamma()).sqrt() * (red.q_weighted() + C64::i()) * p.mu);
        let pm = PreparedModel::new(&p).unwrap();
        let zs = dynamical_zeros(&pm).unwrap();
        let near: Vec<f64> = zs
            .iter()
            .filter(|z| z.channel == 0)
            .map(|z| ((z.energy - p.e_b) / gamma).abs())
            .filter(|x| *x < 0.05)
            .collect();
        (near.len(), near.iter().copied().fold(0.0, f64::max))
    };
    let (n_small, spread_small) = count_near(0.005);
    let (n_mid, spread_mid) = count_near(0.02);
    let part_c = n_small == 5 && n_mid == 5 && spread_small < spread_mid;

    let pass = report(
        "figure structure",
        part_a && part_b && part_c,
        &format!(
            "Autler-Townes peaks {counts_a:?} separations {seps:.3?} ({part_a}); \
             dominant-autoionization peaks {counts_b:?} ({part_b}); \
             zero bundle near e_b: {n_small}@0.005 spread {spread_small:.2e} vs {n_mid}@0.02 spread {spread_mid:.2e} ({part_c})"
        ),
    );
    assert!(pass);
}

/// Brute-force integration: norm conservation and convergence to the
/// analytic amplitudes.
#[test]
fn criterion_10_oracle_agreement() {
    let p = figure_reduced(1.0, 1.0, 1.0, 1.0, 4.0);
    let disc = ContinuumDiscretization::default_for(&p);

    let run = integrate(&p, &disc, 50.0, 11).unwrap();
    let drift = run.norm_drift();
    let part_a = drift <= 1e-6;

    let base = ContinuumDiscretization {
        n_bins: 800,
        ..ContinuumDiscretization::default_for(&p)
    };
    let rows = convergence_study(&p, &base, 2, 10.0).unwrap();
    let err_1600 = rows[1].rel_l2;
    let part_b = err_1600 < 0.05;
    let part_c = rows[1].rel_l2 < rows[0].rel_l2 && rows[2].rel_l2 < rows[1].rel_l2;

    let pass = report(
        "oracle agreement",
        part_a && part_b && part_c,
        &format!(
            "norm drift {drift:.2e} over t=50 (tol 1e-6); rel L2 at t=10: {:.4} -> {:.4} -> {:.4} across refinement (1600-bin stage < 5% and decreasing)",
            rows[0].rel_l2, rows[1].rel_l2, rows[2].rel_l2
        ),
    );
    assert!(pass);
}

/// Dynamical-zero branch sets are symmetric under flipping the pump sign.
#[test]
fn criterion_11_pump_sign_symmetry() {
    let base = figure_reduced(1.0, 1.0, 1.0, 1.0, 1.0);
    let omegas: Vec<f64> = vec![0.25, 0.5, 1.0, 1.5, 2.0];
    let plus = sweep(&base, &omegas).unwrap();
    let minus_grid: Vec<f64> = omegas.iter().map(|x| -x).collect();
    let minus = sweep(&base, &minus_grid).unwrap();
    let collect = |tr: &autoion::ZeroTrajectory, ch: usize, idx: usize| -> Vec<f64> {
        let mut xs: Vec<f64> = tr
            .branches
            .iter()
            .filter(|b| b.channel == ch)
            .flat_map(|b| b.points.iter().filter(|p| p.0 == idx).map(|p| p.1))
            .collect();
        xs.sort_by(f64::total_cmp);
        xs
    };
    let mut worst: f64 = 0.0;
    let mut counts_match = true;
    for idx in 0..omegas.len() {
        for ch in 0..2 {
            let a = collect(&plus, ch, idx);
            let b = collect(&minus, ch, idx);
            if a.len() != b.len() {
                counts_match = false;
                continue;
            }
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    let pass = report(
        "pump-sign symmetry",
        counts_match && worst <= 1e-8,
        &format!("branch sets match: {counts_match}, worst |dx| {worst:.2e} (tol 1e-8)"),
    );
    assert!(pass);
}

fn local_maxima(xs: &[f64], ys: &[f64], prominence: f64) -> Vec<f64> {
    let ymax = ys.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for i in 1..ys.len() - 1 {
        if ys[i] > ys[i - 1] && ys[i] >= ys[i + 1] && ys[i] > prominence * ymax {
            out.push(xs[i]);
        }
    }
    out
}
