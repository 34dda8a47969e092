//! Reference computations for the integration tests. Everything here works on
//! raw amplitude vectors and avoids the library's branch-operator code, so
//! agreement with the library is meaningful.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use std::f64::consts::FRAC_1_SQRT_2;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn cis(theta: f64) -> C {
    C::from_polar(1.0, theta)
}

pub fn ket(dim: usize, terms: &[(usize, C)]) -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); dim];
    for &(i, a) in terms {
        v[i] += a;
    }
    v
}

pub fn overlap_sqr(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().norm_sqr()
}

/// Outcome of measuring qubits (1,2,3) of `|psi>_1 (x) |shared>_234` onto
/// `element` and applying `correction^dag` to qubit 4, by brute force on the
/// 16-dimensional joint vector. Returns `(probability, fidelity)`, with
/// fidelity `None` when the probability vanishes.
pub fn brute_force_branch(psi: &[C], shared: &[C], element: &[C], correction: [[C; 2]; 2]) -> (f64, Option<f64>) {
    assert_eq!((psi.len(), shared.len(), element.len()), (2, 8, 8));
    let joint: Vec<C> = (0..16).map(|k| psi[k >> 3] * shared[k & 7]).collect();
    let mut bob = [C::new(0.0, 0.0); 2];
    for (b, slot) in bob.iter_mut().enumerate() {
        for a in 0..8 {
            *slot += element[a].conj() * joint[(a << 1) | b];
        }
    }
    let p = bob[0].norm_sqr() + bob[1].norm_sqr();
    if p < 1e-20 {
        return (p, None);
    }
    // correction^dag * bob
    let u = correction;
    let out = [
        u[0][0].conj() * bob[0] + u[1][0].conj() * bob[1],
        u[0][1].conj() * bob[0] + u[1][1].conj() * bob[1],
    ];
    let f = (psi[0].conj() * out[0] + psi[1].conj() * out[1]).norm_sqr() / p;
    (p, Some(f))
}

pub fn identity() -> [[C; 2]; 2] {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

pub fn sx() -> [[C; 2]; 2] {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn sy() -> [[C; 2]; 2] {
    [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn sz() -> [[C; 2]; 2] {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
}

pub fn minus_i_sy() -> [[C; 2]; 2] {
    [[c(0.0, 0.0), c(-1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

/// GHZ measurement basis with its corrections, keyed by outcome `lmn`:
/// `|b_00m> = (|000> + (-1)^m |111>)/sqrt2`, `|b_10m> = (|100> + (-1)^m |011>)/sqrt2`.
pub fn ghz_reference() -> Vec<(usize, Vec<C>, [[C; 2]; 2])> {
    let h = c(FRAC_1_SQRT_2, 0.0);
    vec![
        (0b000, ket(8, &[(0b000, h), (0b111, h)]), identity()),
        (0b001, ket(8, &[(0b000, h), (0b111, -h)]), sz()),
        (0b100, ket(8, &[(0b100, h), (0b011, h)]), sx()),
        (0b101, ket(8, &[(0b100, h), (0b011, -h)]), minus_i_sy()),
    ]
}

pub fn ghz_amplitudes() -> Vec<C> {
    let h = c(FRAC_1_SQRT_2, 0.0);
    ket(8, &[(0b000, h), (0b111, h)])
}

pub fn w_amplitudes() -> Vec<C> {
    let t = c(1.0 / 3f64.sqrt(), 0.0);
    ket(8, &[(0b001, t), (0b010, t), (0b100, t)])
}

/// `(|001> + e^{i phi} cos g |010> + e^{i omega} sin g |100>)/sqrt2`
pub fn w_like_amplitudes(gamma: f64, phi: f64, omega: f64) -> Vec<C> {
    let h = FRAC_1_SQRT_2;
    ket(
        8,
        &[
            (0b001, c(h, 0.0)),
            (0b010, cis(phi) * gamma.cos() * h),
            (0b100, cis(omega) * gamma.sin() * h),
        ],
    )
}

/// The four W-like measurement elements for outcomes 000, 001, 010, 011 and
/// the corrections I, sigma_z, sigma_x, sigma_y.
pub fn w_like_reference(gamma: f64, phi: f64, omega: f64) -> Vec<(usize, Vec<C>, [[C; 2]; 2])> {
    let h = FRAC_1_SQRT_2;
    let y = cis(phi) * gamma.cos() * h;
    let z = cis(omega) * gamma.sin() * h;
    let one = c(h, 0.0);
    vec![
        (0b000, ket(8, &[(0b001, y), (0b010, z), (0b100, one)]), identity()),
        (0b001, ket(8, &[(0b001, y), (0b010, z), (0b100, -one)]), sz()),
        (0b010, ket(8, &[(0b101, y), (0b110, z), (0b000, one)]), sx()),
        (0b011, ket(8, &[(0b101, y), (0b110, z), (0b000, -one)]), sy()),
    ]
}

/// Reduced state of the last qubit, summed directly over the other indices.
pub fn last_qubit_density(amps: &[C]) -> [[C; 2]; 2] {
    let mut rho = [[C::new(0.0, 0.0); 2]; 2];
    for a in 0..amps.len() / 2 {
        for b in 0..2 {
            for bp in 0..2 {
                rho[b][bp] += amps[2 * a + b] * amps[2 * a + bp].conj();
            }
        }
    }
    rho
}

pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(p) + h(1.0 - p)
}

/// Entropy of a 2x2 Hermitian density matrix from its closed-form
/// eigenvalues `(1 +- sqrt((a-d)^2 + 4|b|^2)) / 2`.
pub fn qubit_entropy(rho: [[C; 2]; 2]) -> f64 {
    let (a, d, b) = (rho[0][0].re, rho[1][1].re, rho[0][1]);
    let r = ((a - d).powi(2) + 4.0 * b.norm_sqr()).sqrt();
    binary_entropy((1.0 + r) / 2.0)
}

/// Bloch-sphere message `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
pub fn message(theta: f64, phi: f64) -> Vec<C> {
    vec![c((theta / 2.0).cos(), 0.0), cis(phi) * (theta / 2.0).sin()]
}
