//! State vectors over configuration bases, square wave packets, and
//! symmetrized products of single-particle states.

use crate::basis::ConfigurationBasis;
use crate::graph::VertexId;
use crate::two_particle::Statistics;
use num_complex::Complex64;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("wave packet support [{0}, {1}] does not fit the rail of {2} vertices")]
    SupportOutOfRange(usize, usize, usize),
    #[error("(anti)symmetrization annihilated the state")]
    ZeroState,
    #[error("basis mismatch")]
    BasisMismatch,
}

#[derive(Debug, Clone)]
pub struct StateVector {
    pub basis: Arc<ConfigurationBasis>,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(basis: Arc<ConfigurationBasis>) -> Self {
        let dim = basis.dimension();
        StateVector {
            basis,
            amplitudes: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&mut self) -> Result<(), StateError> {
        let n = self.norm();
        if n < 1e-14 {
            return Err(StateError::ZeroState);
        }
        for a in &mut self.amplitudes {
            *a /= n;
        }
        Ok(())
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |<self|other>|, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }
}

/// Square wave packet: where it sits on a rail, how long it is, and which
/// way it moves. Amplitudes are L^{-1/2} e^{i p x} with p = momentum when
/// the packet travels toward increasing rail positions and p = -momentum
/// otherwise.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WavePacketSpec {
    pub rail: String,
    /// Packet occupies rail positions offset+1 ..= offset+length.
    pub offset: usize,
    pub length: usize,
    /// Momentum in (-pi, 0).
    pub momentum: f64,
    /// Direction of travel in rail coordinates.
    pub toward_positive: bool,
}

impl WavePacketSpec {
    pub fn phase_momentum(&self) -> f64 {
        if self.toward_positive {
            self.momentum
        } else {
            -self.momentum
        }
    }

    /// Amplitude at rail position x (1-based).
    pub fn amplitude(&self, x: usize) -> Complex64 {
        if x > self.offset && x <= self.offset + self.length {
            Complex64::from_polar(
                1.0 / (self.length as f64).sqrt(),
                self.phase_momentum() * x as f64,
            )
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// Single-particle amplitudes over graph sites (a plain dense vector).
pub type SiteAmplitudes = Vec<Complex64>;

/// Realize a wave packet on an explicit rail (ordered vertex list), as a
/// single-particle amplitude vector over `site_count` sites. Norm is exactly 1.
pub fn wave_packet(
    spec: &WavePacketSpec,
    rail: &[VertexId],
    site_count: usize,
) -> Result<SiteAmplitudes, StateError> {
    if spec.length < 1 || spec.offset + spec.length > rail.len() {
        return Err(StateError::SupportOutOfRange(
            spec.offset + 1,
            spec.offset + spec.length,
            rail.len(),
        ));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); site_count];
    for x in spec.offset + 1..=spec.offset + spec.length {
        amps[rail[x - 1]] = spec.amplitude(x);
    }
    Ok(amps)
}

/// Tensor the single-particle states and project into the statistics sector
/// of `basis`, normalizing the result.
///
/// Disjoint supports give norm 1 before normalization; overlapping packets
/// are renormalized, and full fermionic cancellation reports `ZeroState`.
pub fn product_and_symmetrize(
    packets: &[SiteAmplitudes],
    basis: &Arc<ConfigurationBasis>,
) -> Result<StateVector, StateError> {
    let m = basis.particles;
    if packets.len() != m || packets.iter().any(|p| p.len() != basis.sites) {
        return Err(StateError::BasisMismatch);
    }
    let supports: Vec<Vec<u16>> = packets
        .iter()
        .map(|p| {
            (0..basis.sites as u16)
                .filter(|&s| p[s as usize].norm_sqr() > 0.0)
                .collect()
        })
        .collect();
    let mut out = StateVector::zero(basis.clone());

    match basis.statistics {
        Statistics::Distinguishable => {
            let mut tuple = vec![0u16; m];
            fill_product(&supports, &mut tuple, 0, &mut |t| {
                let amp: Complex64 = t
                    .iter()
                    .enumerate()
                    .map(|(w, &s)| packets[w][s as usize])
                    .product();
                let idx = basis.index_of(t).expect("in basis");
                out.amplitudes[idx] += amp;
            });
        }
        Statistics::Boson | Statistics::Fermion => {
            let fermionic = basis.statistics == Statistics::Fermion;
            // candidate sorted configurations from the support product
            let mut configs = std::collections::HashSet::new();
            let mut tuple = vec![0u16; m];
            fill_product(&supports, &mut tuple, 0, &mut |t| {
                let mut c = t.to_vec();
                c.sort_unstable();
                configs.insert(c);
            });
            let perms = permutations(m);
            for config in configs {
                if fermionic {
                    let distinct = config.windows(2).all(|w| w[0] != w[1]);
                    if !distinct {
                        continue;
                    }
                }
                // sum over particle-to-slot assignments
                let mut total = Complex64::new(0.0, 0.0);
                for (perm, sign) in &perms {
                    let mut term = Complex64::new(1.0, 0.0);
                    for (slot, &w) in perm.iter().enumerate() {
                        term *= packets[w][config[slot] as usize];
                    }
                    total += if fermionic && *sign < 0 { -term } else { term };
                }
                // occupation normalization sqrt(m! / prod n_i!) combines with
                // the 1/sqrt(m!) of Sym to 1/sqrt(prod n_i!)
                let mut rep = 1.0f64;
                let mut run = 1usize;
                for i in 1..=m {
                    if i < m && config[i] == config[i - 1] {
                        run += 1;
                    } else {
                        for f in 2..=run {
                            rep *= f as f64;
                        }
                        run = 1;
                    }
                }
                let idx = basis.index_of(&config).expect("in basis");
                out.amplitudes[idx] = total / rep.sqrt();
            }
        }
    }
    out.normalize()?;
    Ok(out)
}

fn fill_product(
    supports: &[Vec<u16>],
    tuple: &mut Vec<u16>,
    depth: usize,
    f: &mut impl FnMut(&[u16]),
) {
    if depth == supports.len() {
        f(tuple);
        return;
    }
    for &s in &supports[depth] {
        tuple[depth] = s;
        fill_product(supports, tuple, depth + 1, f);
    }
}

/// All permutations of 0..m with parity signs (by inversion count).
fn permutations(m: usize) -> Vec<(Vec<usize>, i32)> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    permute_rec(&mut cur, 0, &mut out);
    out
}

fn permute_rec(arr: &mut Vec<usize>, depth: usize, out: &mut Vec<(Vec<usize>, i32)>) {
    if depth == arr.len() {
        let mut inversions = 0usize;
        for i in 0..arr.len() {
            for j in i + 1..arr.len() {
                if arr[i] > arr[j] {
                    inversions += 1;
                }
            }
        }
        out.push((arr.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
        return;
    }
    for i in depth..arr.len() {
        arr.swap(depth, i);
        permute_rec(arr, depth + 1, out);
        arr.swap(depth, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::enumerate_basis;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn packet_amplitudes() {
        let spec = WavePacketSpec {
            rail: "r".into(),
            offset: 2,
            length: 4,
            momentum: -std::f64::consts::FRAC_PI_4,
            toward_positive: true,
        };
        let rail: Vec<usize> = (0..10).collect();
        let amps = wave_packet(&spec, &rail, 10).unwrap();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        for x in 3..=6usize {
            let want = Complex64::from_polar(0.5, -std::f64::consts::FRAC_PI_4 * x as f64);
            assert!((amps[x - 1] - want).norm() < 1e-12);
        }
        assert_eq!(amps[0], c(0.0, 0.0));
        assert_eq!(amps[7], c(0.0, 0.0));
        // single-site packet
        let spec1 = WavePacketSpec {
            rail: "r".into(),
            offset: 0,
            length: 1,
            momentum: -std::f64::consts::FRAC_PI_4,
            toward_positive: true,
        };
        let amps = wave_packet(&spec1, &rail, 10).unwrap();
        assert!((amps[0].norm() - 1.0).abs() < 1e-12);
        // out of range
        let bad = WavePacketSpec {
            offset: 8,
            ..spec1.clone()
        };
        assert!(matches!(
            wave_packet(
                &WavePacketSpec {
                    length: 5,
                    ..bad.clone()
                },
                &rail,
                10
            ),
            Err(StateError::SupportOutOfRange(_, _, _))
        ));
    }

    #[test]
    fn boson_pair_symmetrization() {
        let basis = Arc::new(enumerate_basis(4, 2, Statistics::Boson).unwrap());
        let mut a = vec![c(0.0, 0.0); 4];
        a[0] = c(1.0, 0.0);
        let mut b = vec![c(0.0, 0.0); 4];
        b[2] = c(1.0, 0.0);
        let st = product_and_symmetrize(&[a, b], &basis).unwrap();
        assert!((st.norm() - 1.0).abs() < 1e-12);
        let idx = basis.index_of(&[0, 2]).unwrap();
        assert!((st.amplitudes[idx].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fermion_exclusion_annihilates() {
        let basis = Arc::new(enumerate_basis(3, 2, Statistics::Fermion).unwrap());
        let mut a = vec![c(0.0, 0.0); 3];
        a[1] = c(1.0, 0.0);
        assert!(matches!(
            product_and_symmetrize(&[a.clone(), a], &basis),
            Err(StateError::ZeroState)
        ));
    }

    #[test]
    fn fermion_pair_is_antisymmetric() {
        let basis = Arc::new(enumerate_basis(4, 2, Statistics::Fermion).unwrap());
        let mut a = vec![c(0.0, 0.0); 4];
        a[3] = c(1.0, 0.0);
        let mut b = vec![c(0.0, 0.0); 4];
        b[1] = c(1.0, 0.0);
        // particle 0 at site 3, particle 1 at site 1: sorted config (1,3)
        // needs a transposition, so the amplitude picks up the minus sign
        let st = product_and_symmetrize(&[a.clone(), b.clone()], &basis).unwrap();
        let idx = basis.index_of(&[1, 3]).unwrap();
        assert!((st.amplitudes[idx] - c(-1.0, 0.0)).norm() < 1e-12);
        // swapped argument order flips the sign
        let st2 = product_and_symmetrize(&[b, a], &basis).unwrap();
        assert!((st2.amplitudes[idx] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn double_occupancy_normalization() {
        // two bosons in the same single-site packet: amplitude on |ss> is 1
        let basis = Arc::new(enumerate_basis(3, 2, Statistics::Boson).unwrap());
        let mut a = vec![c(0.0, 0.0); 3];
        a[1] = c(1.0, 0.0);
        let st = product_and_symmetrize(&[a.clone(), a], &basis).unwrap();
        let idx = basis.index_of(&[1, 1]).unwrap();
        assert!((st.amplitudes[idx].norm() - 1.0).abs() < 1e-12);
        assert!((st.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlapping_packets_renormalize() {
        let basis = Arc::new(enumerate_basis(6, 2, Statistics::Boson).unwrap());
        let spec = |off| WavePacketSpec {
            rail: "r".into(),
            offset: off,
            length: 3,
            momentum: -std::f64::consts::FRAC_PI_2,
            toward_positive: true,
        };
        let rail: Vec<usize> = (0..6).collect();
        let a = wave_packet(&spec(0), &rail, 6).unwrap();
        let b = wave_packet(&spec(1), &rail, 6).unwrap();
        let st = product_and_symmetrize(&[a, b], &basis).unwrap();
        assert!((st.norm() - 1.0).abs() < 1e-12);
    }
}
