//! Analytic predictions for wave-packet dynamics: the square-window
//! single-particle transport state, the two-particle collision state with
//! its exchange phase, and the truncation error bound.

use crate::basis::ConfigurationBasis;
use crate::graph::VertexId;
use crate::statevec::{SiteAmplitudes, StateVector};
use crate::two_particle::Statistics;
use ndarray::Array2;
use num_complex::Complex64;
use std::sync::Arc;

/// Predicted single-particle state at time t for a packet launched toward a
/// gadget: incoming window plus S-weighted outgoing windows.
///
/// Rails use gadget coordinates (x = 1 at the terminal); `rails[q]` lists the
/// vertices of rail q outward, and the returned amplitudes live on
/// `site_count` sites. The two window terms are
///   delta_qj e^{-ikx} R(x - floor(2 t sin k))
///   + S_qj e^{ikx} R(-x - floor(2 t sin k))
/// scaled by L^{-1/2} e^{-2 i t cos k}, where R selects [M+1, M+L].
pub fn predicted_single_packet(
    s: &Array2<Complex64>,
    j: usize,
    k: f64,
    m_offset: usize,
    length: usize,
    t: f64,
    rails: &[Vec<VertexId>],
    site_count: usize,
) -> SiteAmplitudes {
    let drift = (2.0 * t * k.sin()).floor() as i64; // negative for k in (-pi, 0)
    let window = |l: i64| -> bool {
        l >= m_offset as i64 + 1 && l <= (m_offset + length) as i64
    };
    let scale = Complex64::from_polar(1.0 / (length as f64).sqrt(), -2.0 * t * k.cos());
    let mut amps = vec![Complex64::new(0.0, 0.0); site_count];
    for (q, rail) in rails.iter().enumerate() {
        for (xi, &v) in rail.iter().enumerate() {
            let x = (xi + 1) as i64;
            let mut a = Complex64::new(0.0, 0.0);
            if q == j && window(x - drift) {
                a += Complex64::from_polar(1.0, -k * x as f64);
            }
            if window(-x - drift) {
                a += s[(q, j)] * Complex64::from_polar(1.0, k * x as f64);
            }
            amps[v] += scale * a;
        }
    }
    amps
}

/// Geometry of the two-particle collision setup: both packets have length
/// `length`; the fast one starts on [-M-L, -M-1] moving right with momentum
/// -pi/2, the slow one on [M+1, M+L] moving left with momentum pi/4.
#[derive(Debug, Clone, Copy)]
pub struct CollisionGeometry {
    pub m_offset: usize,
    pub length: usize,
}

impl CollisionGeometry {
    /// Earliest integer time with both windows fully crossed, after which the
    /// prediction is two separated packets with the global exchange phase.
    pub fn separation_time(&self) -> f64 {
        let need = (2 * self.m_offset + 2 * self.length + 1) as f64;
        let mut t = 0.0f64;
        loop {
            let travelled = 2.0 * ((t / 2.0f64.sqrt()).floor() + t.floor());
            if travelled >= need {
                return t;
            }
            t += 0.25;
        }
    }
}

/// Predicted two-particle state at time t on a path, as amplitudes in the
/// given two-particle basis over `sites` path vertices. `origin` is the
/// basis site index corresponding to lattice coordinate 0.
///
/// For x <= y the amplitude is
///   (1/(sqrt(2) L)) e^{-i sqrt(2) t} [ e^{-i pi x/2} e^{i pi y/4} F(x,y,t)
///     +- e^{i theta} e^{i pi x/4} e^{-i pi y/2} F(y,x,t) ]
/// with F(u,v,t) = 1 iff u - 2 floor(t) lies in [-M-L, -M-1] and
/// v + 2 floor(t/sqrt 2) lies in [M+1, M+L].
pub fn predicted_two_packet(
    geom: &CollisionGeometry,
    theta: f64,
    t: f64,
    origin: i64,
    basis: &Arc<ConfigurationBasis>,
) -> StateVector {
    assert_eq!(basis.particles, 2);
    let m = geom.m_offset as i64;
    let l = geom.length as i64;
    let drift_fast = 2 * (t.floor() as i64);
    let drift_slow = 2 * ((t / 2.0f64.sqrt()).floor() as i64);
    let f = |u: i64, v: i64| -> bool {
        let a = u - drift_fast;
        let b = v + drift_slow;
        a >= -m - l && a <= -m - 1 && b >= m + 1 && b <= m + l
    };
    let quarter = std::f64::consts::FRAC_PI_4;
    let half = std::f64::consts::FRAC_PI_2;
    let scale = Complex64::from_polar(
        1.0 / (2.0f64.sqrt() * geom.length as f64),
        -2.0f64.sqrt() * t,
    );
    let phase = Complex64::from_polar(1.0, theta);
    let sign = match basis.statistics {
        Statistics::Fermion => -1.0,
        _ => 1.0,
    };
    // ordered-pair amplitude for x <= y
    let a_xy = |x: i64, y: i64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        if f(x, y) {
            acc += Complex64::from_polar(1.0, -half * x as f64 + quarter * y as f64);
        }
        if f(y, x) {
            acc += sign
                * phase
                * Complex64::from_polar(1.0, quarter * x as f64 - half * y as f64);
        }
        scale * acc
    };
    let mut out = StateVector::zero(basis.clone());
    for i in 0..basis.dimension() {
        let state = basis.state(i);
        match basis.statistics {
            Statistics::Distinguishable => {
                let (xs, ys) = (state[0] as i64 - origin, state[1] as i64 - origin);
                let (x, y) = (xs.min(ys), xs.max(ys));
                let amp = a_xy(x, y);
                out.amplitudes[i] = if xs <= ys { amp } else { sign * amp };
            }
            _ => {
                let x = state[0] as i64 - origin;
                let y = state[1] as i64 - origin;
                let amp = a_xy(x, y);
                out.amplitudes[i] = if x == y {
                    amp
                } else {
                    amp * 2.0f64.sqrt()
                };
            }
        }
    }
    out
}

/// Truncation error bound (4 e |H| t / N0 + 2)(delta + 2^{-N0}(1 + delta)).
pub fn truncation_bound(h_norm: f64, t: f64, n0: usize, delta: f64) -> f64 {
    assert!(n0 >= 1 && delta >= 0.0 && t >= 0.0);
    let pow = 2.0f64.powi(-(n0 as i32));
    (4.0 * std::f64::consts::E * h_norm * t / n0 as f64 + 2.0) * (delta + pow * (1.0 + delta))
}
