//! Closed-form coefficients of the characteristic quartic of the effective
//! evolution matrix, written in the shifted eigenvalue variable.
//!
//! The polynomial is monic in `L~` where the physical eigenvalues are
//! `L = L~ - i pi |mu alpha_l|^2`. Together with the direct eigen-solve of the
//! assembled matrix this gives two independent routes to the same spectrum.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use super::poly::ComplexPolynomial;
use crate::params::SystemParams;

/// The uniform imaginary shift `pi |mu alpha_l|^2`: physical eigenvalues are
/// the quartic roots minus `i` times this value.
pub fn eigenvalue_shift(p: &SystemParams) -> f64 {
    PI * p.pump_cont().norm_sqr()
}

/// Monic degree-4 polynomial whose roots are the shifted eigenvalues of the
/// effective evolution matrix.
pub fn quartic_coefficients(p: &SystemParams) -> ComplexPolynomial {
    let i = C64::i();
    let de_a = C64::new(p.detuning_a(), 0.0);
    let g_a = C64::new(p.gamma_a(), 0.0);
    let g_b = p.gamma_b();
    let shift = eigenvalue_shift(p);

    // dressed couplings: bare value minus i pi times the continuum-mediated
    // second-order path
    let e_b = C64::new(p.detuning_b(), -g_b + shift);
    let m_a = p.mu_a - i * PI * p.mu * p.j.conj();
    let m_a_c = p.mu_a.conj() - i * PI * p.mu.conj() * p.j;
    let m_b = p.mu_b - i * PI * p.mu * p.v.conj();
    let m_b_c = p.mu_b.conj() - i * PI * p.mu.conj() * p.v;
    let j_ab = p.j_ab - i * PI * p.j * p.v.conj();
    let j_ab_c = p.j_ab.conj() - i * PI * p.j.conj() * p.v;

    let al2 = C64::new(p.alpha_l.norm_sqr(), 0.0);
    let mu_a2 = C64::new(p.mu_a.norm_sqr(), 0.0);

    let a3 = -2.0 * de_a - 2.0 * e_b + i * g_a;

    let a2 = de_a * (de_a - i * g_a) + (3.0 * de_a - 2.0 * i * g_a) * e_b + e_b * e_b
        - (m_a * m_a_c + mu_a2 + 2.0 * m_b * m_b_c) * al2
        - j_ab * j_ab_c;

    let a1 = (-de_a + i * g_a) * (de_a + e_b) * e_b
        + ((de_a - i * g_a) * mu_a2
            + (de_a + 2.0 * e_b) * m_a * m_a_c
            + (2.0 * de_a - i * g_a + 2.0 * e_b) * m_b * m_b_c)
            * al2
        + (de_a + e_b) * j_ab * j_ab_c
        - ((p.mu_a + m_a) * m_b_c * j_ab + (p.mu_a.conj() + m_a_c) * m_b * j_ab_c) * al2;

    let a0 = (de_a + e_b)
        * (-e_b * m_a * m_a_c
            + (-de_a + i * g_a) * m_b * m_b_c
            + (m_a * m_b_c * j_ab + m_a_c * m_b * j_ab_c))
        * al2
        + (m_a * m_a_c * mu_a2 + m_b * m_b * m_b_c * m_b_c
            - (m_a * p.mu_a.conj() + m_a_c * p.mu_a) * m_b * m_b_c)
            * al2
            * al2;

    ComplexPolynomial::new(vec![a0, a1, a2, a3, C64::new(1.0, 0.0)])
}
