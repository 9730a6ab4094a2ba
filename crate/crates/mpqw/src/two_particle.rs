//! Two-particle scattering on the infinite path for finite-range
//! interactions: reflection R, transmission T, interior amplitudes f, and
//! the exchange phase driving the two-qubit gate.
//!
//! In center-of-mass coordinates s = x + y, r = x - y the eigenstate factors
//! as e^{-i p1 s / 2} psi(r) where psi solves the effective chain problem
//!   2 cos(p1/2) (psi(r+1) + psi(r-1)) + V(|r|) psi(r) = E psi(r)
//! with E = 4 cos(p1/2) cos(p2) and plane-wave boundary conditions carrying
//! R and T.

use ndarray::prelude::*;
use ndarray_linalg::Solve;
use num_complex::Complex64;
use thiserror::Error;

pub const MAX_INTERACTION_RANGE: usize = 8;

#[derive(Debug, Error)]
pub enum TwoParticleError {
    #[error("momentum pair (p1={0}, p2={1}) outside the open domain")]
    InvalidMomentum(f64, f64),
    #[error("cos(p1/2) = 0: effective hopping vanishes")]
    VanishingHopping,
    #[error("linear system for R, T is singular")]
    DegenerateSystem,
    #[error("interaction range {0} exceeds supported maximum {MAX_INTERACTION_RANGE}")]
    RangeTooLarge(usize),
    #[error("denominator vanishes in the closed form")]
    DivisionByZero,
}

/// Finite-range pair interaction, encoded by the even profile V(|r|).
#[derive(Debug, Clone, PartialEq)]
pub enum InteractionModel {
    /// V(0) = U: two particles on one site pay U (Bose-Hubbard form
    /// (U/2) n(n-1) contributes U at double occupancy).
    Onsite { u: f64 },
    /// V(1) = U, V(0) = 0: adjacent particles pay U.
    NearestNeighbor { u: f64 },
    /// Explicit profile: profile[r] = V(r) for r = 0..=C.
    General { profile: Vec<f64> },
}

impl InteractionModel {
    pub fn range(&self) -> usize {
        match self {
            InteractionModel::Onsite { .. } => 0,
            InteractionModel::NearestNeighbor { .. } => 1,
            InteractionModel::General { profile } => profile.len().saturating_sub(1),
        }
    }

    pub fn v(&self, r: usize) -> f64 {
        match self {
            InteractionModel::Onsite { u } => {
                if r == 0 {
                    *u
                } else {
                    0.0
                }
            }
            InteractionModel::NearestNeighbor { u } => {
                if r == 1 {
                    *u
                } else {
                    0.0
                }
            }
            InteractionModel::General { profile } => profile.get(r).copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistics {
    Boson,
    Fermion,
    Distinguishable,
}

/// Solution of the relative-coordinate scattering problem at (p1, p2).
#[derive(Debug, Clone)]
pub struct TwoParticleScattering {
    pub p1: f64,
    pub p2: f64,
    pub reflection: Complex64,
    pub transmission: Complex64,
    /// Interior amplitudes f(r) for r = -(C-1) .. C-1 (empty when C = 0).
    pub interior: Vec<Complex64>,
    /// arg(T + R), the bosonic exchange phase, in (-pi, pi].
    pub theta_plus: f64,
    /// arg(T - R), the fermionic exchange phase, in (-pi, pi].
    pub theta_minus: f64,
}

impl TwoParticleScattering {
    pub fn interior_at(&self, r: i64) -> Complex64 {
        let c = (self.interior.len() + 1) / 2;
        let idx = r + c as i64 - 1;
        self.interior[idx as usize]
    }

    /// psi(r) assembled from the ansatz: incoming + reflected for r <= -C,
    /// f inside, transmitted for r >= C.
    pub fn amplitude(&self, r: i64, range: usize) -> Complex64 {
        let c = range as i64;
        let p2 = self.p2;
        if r <= -c {
            Complex64::from_polar(1.0, -p2 * r as f64)
                + self.reflection * Complex64::from_polar(1.0, p2 * r as f64)
        } else if r >= c {
            self.transmission * Complex64::from_polar(1.0, -p2 * r as f64)
        } else {
            self.interior_at(r)
        }
    }
}

fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -std::f64::consts::PI {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

fn check_momenta(p1: f64, p2: f64) -> Result<(), TwoParticleError> {
    use std::f64::consts::PI;
    if !(p1 > -PI && p1 < PI && p2 > 0.0 && p2 < PI) {
        return Err(TwoParticleError::InvalidMomentum(p1, p2));
    }
    if (p1 / 2.0).cos().abs() < 1e-12 {
        return Err(TwoParticleError::VanishingHopping);
    }
    Ok(())
}

/// Solve the finite linear system for R, T, and f at momenta (p1, p2).
pub fn solve_two_particle(
    model: &InteractionModel,
    p1: f64,
    p2: f64,
) -> Result<TwoParticleScattering, TwoParticleError> {
    check_momenta(p1, p2)?;
    let range = model.range();
    if range > MAX_INTERACTION_RANGE {
        return Err(TwoParticleError::RangeTooLarge(range));
    }
    let hop = 2.0 * (p1 / 2.0).cos();
    let energy = 2.0 * hop * p2.cos();
    let ep = |x: f64| Complex64::from_polar(1.0, x);

    let (reflection, transmission, interior) = if range == 0 {
        // continuity 1 + R = T plus the eigenvalue equation at r = 0
        let u = model.v(0);
        // unknowns (R, T)
        let mut a = Array2::<Complex64>::zeros((2, 2));
        let mut b = Array1::<Complex64>::zeros(2);
        a[(0, 0)] = 1.0.into();
        a[(0, 1)] = (-1.0).into();
        b[0] = (-1.0).into();
        // hop*(psi(1) + psi(-1)) + (u - E) psi(0) = 0 with psi(0) = T
        a[(1, 0)] = hop * ep(-p2); // from psi(-1) = e^{i p2} + R e^{-i p2}
        a[(1, 1)] = hop * ep(-p2) + Complex64::new(u - energy, 0.0);
        b[1] = -hop * ep(p2);
        let sol = a
            .solve(&b)
            .map_err(|_| TwoParticleError::DegenerateSystem)?;
        (sol[0], sol[1], Vec::new())
    } else {
        // unknowns: R, T, f(-(C-1)) .. f(C-1); equations at r = -C ..= C
        let c = range as i64;
        let nf = 2 * range - 1;
        let n = 2 + nf;
        let mut a = Array2::<Complex64>::zeros((n, n));
        let mut b = Array1::<Complex64>::zeros(n);
        // psi(r) as (coefficient over unknowns, constant)
        let psi = |r: i64| -> (Vec<(usize, Complex64)>, Complex64) {
            if r <= -c {
                (
                    vec![(0, ep(p2 * r as f64))],
                    ep(-p2 * r as f64),
                )
            } else if r >= c {
                (vec![(1, ep(-p2 * r as f64))], 0.0.into())
            } else {
                (vec![((r + c - 1) as usize + 2, 1.0.into())], 0.0.into())
            }
        };
        for (row, r) in (-c..=c).enumerate() {
            let diag = Complex64::new(model.v(r.unsigned_abs() as usize) - energy, 0.0);
            let mut add = |coeffs: (Vec<(usize, Complex64)>, Complex64), w: Complex64| {
                for (idx, v) in coeffs.0 {
                    a[(row, idx)] += w * v;
                }
                b[row] -= w * coeffs.1;
            };
            add(psi(r + 1), hop.into());
            add(psi(r - 1), hop.into());
            add(psi(r), diag);
        }
        let sol = a
            .solve(&b)
            .map_err(|_| TwoParticleError::DegenerateSystem)?;
        (sol[0], sol[1], sol.iter().skip(2).copied().collect())
    };

    Ok(TwoParticleScattering {
        p1,
        p2,
        reflection,
        transmission,
        interior,
        theta_plus: principal_arg(transmission + reflection),
        theta_minus: principal_arg(transmission - reflection),
    })
}

/// Closed-form bosonic exchange phase e^{i theta_+} for the onsite model:
/// (2 (sin k2 - sin k1) - iU) / (2 (sin k2 - sin k1) + iU) with
/// k1 = -p1/2 - p2 and k2 = -p1/2 + p2.
pub fn bose_hubbard_theta(u: f64, p1: f64, p2: f64) -> Result<Complex64, TwoParticleError> {
    check_momenta(p1, p2)?;
    let k1 = -p1 / 2.0 - p2;
    let k2 = -p1 / 2.0 + p2;
    let d = 2.0 * (k2.sin() - k1.sin());
    let denom = Complex64::new(d, u);
    if denom.norm() < 1e-300 {
        return Err(TwoParticleError::DivisionByZero);
    }
    Ok(Complex64::new(d, -u) / denom)
}

/// What the exchange phase means per particle type.
#[derive(Debug, Clone)]
pub enum ExchangeOutcome {
    /// Indistinguishable particles acquire a single global phase.
    Phase(f64),
    /// Distinguishable particles keep separate reflection/transmission
    /// channels; the encoding survives only when |R| vanishes.
    Channels {
        reflection: Complex64,
        transmission: Complex64,
        encoding_preserved: bool,
    },
}

pub const ENCODING_R_TOL: f64 = 1e-8;

pub fn exchange_phase(
    model: &InteractionModel,
    statistics: Statistics,
    p1: f64,
    p2: f64,
) -> Result<ExchangeOutcome, TwoParticleError> {
    let sol = solve_two_particle(model, p1, p2)?;
    Ok(match statistics {
        Statistics::Boson => ExchangeOutcome::Phase(sol.theta_plus),
        Statistics::Fermion => ExchangeOutcome::Phase(sol.theta_minus),
        Statistics::Distinguishable => ExchangeOutcome::Channels {
            reflection: sol.reflection,
            transmission: sol.transmission,
            encoding_preserved: sol.reflection.norm() < ENCODING_R_TOL,
        },
    })
}

/// Smallest a <= max_a with |e^{i a theta} - e^{i target}| <= tol.
pub fn cd_repeat_count(
    theta: f64,
    target: f64,
    tol: f64,
    max_a: usize,
) -> Result<usize, TwoParticleError> {
    assert!(tol > 0.0 && max_a >= 1);
    let goal = Complex64::from_polar(1.0, target);
    let step = Complex64::from_polar(1.0, theta);
    let mut acc = Complex64::new(1.0, 0.0);
    for a in 1..=max_a {
        acc *= step;
        if (acc - goal).norm() <= tol {
            return Ok(a);
        }
    }
    Err(TwoParticleError::DegenerateSystem)
}
