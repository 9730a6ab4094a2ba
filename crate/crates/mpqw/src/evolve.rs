//! Time evolution e^{-iHt} by Chebyshev expansion on the spectrum rescaled
//! with the Gershgorin bound, with an a-priori remainder certificate, plus a
//! dense eigendecomposition propagator used as an oracle.

use crate::hamiltonian::SparseHamiltonian;
use crate::statevec::StateVector;
use ndarray::prelude::*;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("cannot certify tolerance {tol} within {cap} expansion terms")]
    ToleranceUnachievable { tol: f64, cap: usize },
    #[error("tolerance {0} outside supported range")]
    BadTolerance(f64),
    #[error("negative time {0}")]
    NegativeTime(f64),
}

/// Smallest expansion degree N with certified remainder
/// 2 sum_{n>N} (tau/2)^n / n! <= tol, or None within `cap`.
fn chebyshev_degree(tau: f64, tol: f64, cap: usize) -> Option<usize> {
    if tau == 0.0 {
        return Some(0);
    }
    let log_half_tau = (tau / 2.0).ln();
    // running log(term(n)) = n log(tau/2) - log(n!)
    let mut log_term = 0.0f64;
    let mut n = 0usize;
    loop {
        n += 1;
        if n > cap {
            return None;
        }
        log_term += log_half_tau - (n as f64).ln();
        // geometric tail factor is valid once term ratio < 1
        let ratio = (tau / 2.0) / (n as f64 + 2.0);
        if ratio < 0.5 {
            // tail(n) = 2 * term(n+1) / (1 - ratio)
            let log_tail = f64::ln(2.0) + log_term + log_half_tau - ((n + 1) as f64).ln()
                - (1.0 - ratio).ln();
            if log_tail <= tol.ln() {
                return Some(n);
            }
        }
    }
}

/// Bessel J_0..J_nmax at x >= 0 by Miller's downward recurrence.
fn bessel_j(nmax: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; nmax + 1];
        out[0] = 1.0;
        return out;
    }
    let start = nmax + 20 + (x as usize) / 4 + ((nmax as f64).sqrt() as usize);
    let mut jn = vec![0.0f64; start + 2];
    jn[start + 1] = 0.0;
    jn[start] = 1e-280;
    for n in (1..=start).rev() {
        jn[n - 1] = (2.0 * n as f64 / x) * jn[n] - jn[n + 1];
        if jn[n - 1].abs() > 1e250 {
            let scale = 1e-250;
            for v in jn[n - 1..=start + 1].iter_mut() {
                *v *= scale;
            }
        }
    }
    // normalization: J_0 + 2 sum_{k>=1} J_{2k} = 1
    let mut norm = jn[0];
    let mut k = 2;
    while k <= start {
        norm += 2.0 * jn[k];
        k += 2;
    }
    jn.truncate(nmax + 1);
    for v in &mut jn {
        *v /= norm;
    }
    jn
}

/// e^{-iHt} psi to within `tol` in 2-norm, certified through the Gershgorin
/// norm bound carried by the Hamiltonian.
pub fn evolve(
    h: &SparseHamiltonian,
    psi: &StateVector,
    t: f64,
    tol: f64,
) -> Result<StateVector, EvolveError> {
    if !(1e-14..1e-2).contains(&tol) {
        return Err(EvolveError::BadTolerance(tol));
    }
    if t < 0.0 {
        return Err(EvolveError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(psi.clone());
    }
    let alpha = h.norm_bound.max(1e-300);
    let tau = alpha * t;
    let cap = (10.0 * tau) as usize + 100_000;
    let degree = chebyshev_degree(tau, tol, cap)
        .ok_or(EvolveError::ToleranceUnachievable { tol, cap })?;
    let coeff = bessel_j(degree, tau);
    let dim = h.dim;
    let inv_alpha = 1.0 / alpha;

    // Chebyshev recurrence on vectors: T_0 = psi, T_1 = (H/alpha) psi
    let mut t_prev = psi.amplitudes.clone();
    let mut acc: Vec<Complex64> = t_prev.iter().map(|a| a * coeff[0]).collect();
    if degree >= 1 {
        let mut t_curr = vec![Complex64::new(0.0, 0.0); dim];
        h.matvec(&t_prev, &mut t_curr);
        for v in &mut t_curr {
            *v *= inv_alpha;
        }
        // c_n = 2 (-i)^n J_n(tau)
        let mut phase = Complex64::new(0.0, -1.0);
        for (a, tc) in acc.iter_mut().zip(&t_curr) {
            *a += 2.0 * coeff[1] * phase * tc;
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
        for n in 2..=degree {
            // T_{n} = 2 (H/alpha) T_{n-1} - T_{n-2}
            h.matvec(&t_curr, &mut scratch);
            for i in 0..dim {
                let next = 2.0 * inv_alpha * scratch[i] - t_prev[i];
                t_prev[i] = next;
            }
            std::mem::swap(&mut t_prev, &mut t_curr);
            phase *= Complex64::new(0.0, -1.0);
            let c = 2.0 * coeff[n];
            if c != 0.0 {
                for (a, tc) in acc.iter_mut().zip(&t_curr) {
                    *a += c * phase * tc;
                }
            }
        }
    }
    Ok(StateVector {
        basis: psi.basis.clone(),
        amplitudes: acc,
    })
}

/// Dense oracle: e^{-iHt} psi via Hermitian eigendecomposition.
pub fn dense_expm_apply(
    h: &Array2<Complex64>,
    psi: &[Complex64],
    t: f64,
) -> Vec<Complex64> {
    let (evals, evecs) = h.eigh(UPLO::Lower).expect("hermitian eigendecomposition");
    let psi_arr = ArrayView1::from(psi);
    let coeffs = evecs.t().mapv(|x| x.conj()).dot(&psi_arr);
    let rotated: Array1<Complex64> = coeffs
        .iter()
        .zip(evals.iter())
        .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t))
        .collect();
    evecs.dot(&rotated).to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::enumerate_basis;
    use crate::graph::Graph;
    use crate::hamiltonian::build_hamiltonian;
    use crate::two_particle::{InteractionModel, Statistics};
    use std::sync::Arc;

    fn two_site_state() -> (SparseHamiltonian, StateVector) {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let basis = Arc::new(enumerate_basis(2, 1, Statistics::Boson).unwrap());
        let h = build_hamiltonian(&g, &basis, &InteractionModel::Onsite { u: 0.0 }).unwrap();
        let mut psi = StateVector::zero(basis);
        psi.amplitudes[0] = Complex64::new(1.0, 0.0);
        (h, psi)
    }

    #[test]
    fn zero_time_is_identity() {
        let (h, psi) = two_site_state();
        let out = evolve(&h, &psi, 0.0, 1e-10).unwrap();
        assert_eq!(out.amplitudes, psi.amplitudes);
    }

    #[test]
    fn rabi_flop_on_edge() {
        // H = sigma_x: at t = pi/2 the particle fully transfers
        let (h, psi) = two_site_state();
        let out = evolve(&h, &psi, std::f64::consts::FRAC_PI_2, 1e-12).unwrap();
        assert!(out.amplitudes[0].norm() < 1e-11);
        assert!((out.amplitudes[1].norm() - 1.0).abs() < 1e-11);
        // cos/sin pattern at a generic time
        let t = 0.7;
        let out = evolve(&h, &psi, t, 1e-12).unwrap();
        assert!((out.amplitudes[0] - Complex64::new(t.cos(), 0.0)).norm() < 1e-11);
        assert!((out.amplitudes[1] - Complex64::new(0.0, -t.sin())).norm() < 1e-11);
    }

    #[test]
    fn matches_dense_oracle_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for trial in 0..10 {
            let nv = rng.gen_range(4..12);
            let mut g = Graph::new(nv);
            for a in 0..nv {
                for b in a + 1..nv {
                    if rng.gen_bool(0.4) {
                        let _ = g.add_edge(a, b);
                    }
                }
            }
            let m = rng.gen_range(1..=2);
            let stats = [Statistics::Boson, Statistics::Fermion, Statistics::Distinguishable]
                [rng.gen_range(0..3)];
            if stats == Statistics::Fermion && m > nv {
                continue;
            }
            let basis = Arc::new(enumerate_basis(nv, m, stats).unwrap());
            let model = InteractionModel::NearestNeighbor {
                u: rng.gen_range(-2.0..2.0),
            };
            let h = build_hamiltonian(&g, &basis, &model).unwrap();
            let mut psi = StateVector::zero(basis);
            for a in &mut psi.amplitudes {
                *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            psi.normalize().unwrap();
            let t = rng.gen_range(0.1..8.0);
            let tol = 1e-10;
            let fast = evolve(&h, &psi, t, tol).unwrap();
            let slow = dense_expm_apply(&h.to_dense(), &psi.amplitudes, t);
            let err: f64 = fast
                .amplitudes
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err < tol, "trial {trial}: err {err}");
            let norm = fast.norm();
            assert!((norm - 1.0).abs() <= 10.0 * tol);
        }
    }

    #[test]
    fn tolerance_domain() {
        let (h, psi) = two_site_state();
        assert!(matches!(
            evolve(&h, &psi, 1.0, 0.5),
            Err(EvolveError::BadTolerance(_))
        ));
        assert!(matches!(
            evolve(&h, &psi, -1.0, 1e-8),
            Err(EvolveError::NegativeTime(_))
        ));
    }

    #[test]
    fn bessel_sanity() {
        let j = bessel_j(10, 1.0);
        assert!((j[0] - 0.7651976865579666).abs() < 1e-12);
        assert!((j[1] - 0.4400505857449335).abs() < 1e-12);
        // identity J_0^2 + 2 sum J_n^2 = 1 (rapid decay makes 10 terms enough at x=1)
        let s: f64 = j[0] * j[0] + 2.0 * j[1..].iter().map(|v| v * v).sum::<f64>();
        assert!((s - 1.0).abs() < 1e-12);
        // recurrence holds at larger argument
        let j = bessel_j(60, 25.0);
        for n in 1..55 {
            let lhs = j[n - 1] + j[n + 1];
            let rhs = 2.0 * n as f64 / 25.0 * j[n];
            assert!((lhs - rhs).abs() < 1e-10, "n={n}");
        }
    }
}
