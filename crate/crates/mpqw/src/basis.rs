//! Configuration bases for m particles on V sites: ordered tuples for
//! distinguishable particles, sorted site tuples for bosons, strictly sorted
//! tuples for fermions. Enumeration is lexicographic and deterministic.

use crate::two_particle::Statistics;
use std::collections::HashMap;
use thiserror::Error;

/// Default cap on basis dimension (states), not bytes.
pub const DEFAULT_DIMENSION_CAP: usize = 20_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum BasisError {
    #[error("basis dimension {0} exceeds the configured cap {1}")]
    DimensionTooLarge(u128, usize),
    #[error("need at least one site and one particle")]
    Empty,
    #[error("fermion count {0} exceeds site count {1}")]
    TooManyFermions(usize, usize),
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Enumerated many-particle basis with a bijective index map.
#[derive(Debug, Clone)]
pub struct ConfigurationBasis {
    pub sites: usize,
    pub particles: usize,
    pub statistics: Statistics,
    /// Flat state storage: state i occupies states[i*m .. (i+1)*m].
    states: Vec<u16>,
    index: HashMap<Box<[u16]>, u32>,
}

impl ConfigurationBasis {
    pub fn dimension(&self) -> usize {
        self.states.len() / self.particles
    }

    /// Sites of state `i`: ordered tuple (distinguishable) or sorted tuple.
    pub fn state(&self, i: usize) -> &[u16] {
        let m = self.particles;
        &self.states[i * m..(i + 1) * m]
    }

    pub fn index_of(&self, state: &[u16]) -> Option<usize> {
        self.index.get(state).map(|&i| i as usize)
    }

    /// Occupation of site `site` in state `i`.
    pub fn occupation(&self, i: usize, site: u16) -> usize {
        self.state(i).iter().filter(|&&s| s == site).count()
    }

    pub fn iter_states(&self) -> impl Iterator<Item = &[u16]> {
        self.states.chunks(self.particles)
    }
}

fn predicted_dimension(v: usize, m: usize, statistics: Statistics) -> u128 {
    match statistics {
        Statistics::Distinguishable => (v as u128).pow(m as u32),
        Statistics::Boson => binomial((v + m - 1) as u128, m as u128),
        Statistics::Fermion => binomial(v as u128, m as u128),
    }
}

pub fn enumerate_basis(
    sites: usize,
    particles: usize,
    statistics: Statistics,
) -> Result<ConfigurationBasis, BasisError> {
    enumerate_basis_with_cap(sites, particles, statistics, DEFAULT_DIMENSION_CAP)
}

pub fn enumerate_basis_with_cap(
    sites: usize,
    particles: usize,
    statistics: Statistics,
    cap: usize,
) -> Result<ConfigurationBasis, BasisError> {
    if sites == 0 || particles == 0 {
        return Err(BasisError::Empty);
    }
    if statistics == Statistics::Fermion && particles > sites {
        return Err(BasisError::TooManyFermions(particles, sites));
    }
    let dim = predicted_dimension(sites, particles, statistics);
    if dim > cap as u128 {
        return Err(BasisError::DimensionTooLarge(dim, cap));
    }
    let dim = dim as usize;
    let m = particles;
    let mut states = Vec::with_capacity(dim * m);
    let mut index = HashMap::with_capacity(dim);
    let mut current = vec![0u16; m];
    if statistics == Statistics::Fermion {
        for (w, c) in current.iter_mut().enumerate() {
            *c = w as u16;
        }
    }
    let v = sites as u16;
    let mut count: u32 = 0;
    loop {
        states.extend_from_slice(&current);
        index.insert(current.clone().into_boxed_slice(), count);
        count += 1;
        // lexicographic successor
        let mut pos = m;
        loop {
            if pos == 0 {
                pos = usize::MAX;
                break;
            }
            pos -= 1;
            let limit = match statistics {
                Statistics::Fermion => v - (m - 1 - pos) as u16,
                _ => v,
            };
            if current[pos] + 1 < limit {
                current[pos] += 1;
                for w in pos + 1..m {
                    current[w] = match statistics {
                        Statistics::Distinguishable => 0,
                        Statistics::Boson => current[pos],
                        Statistics::Fermion => current[w - 1] + 1,
                    };
                }
                break;
            }
        }
        if pos == usize::MAX {
            break;
        }
    }
    debug_assert_eq!(count as usize, dim);
    Ok(ConfigurationBasis {
        sites,
        particles,
        statistics,
        states,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let b = enumerate_basis(3, 2, Statistics::Boson).unwrap();
        assert_eq!(b.dimension(), 6);
        let f = enumerate_basis(3, 2, Statistics::Fermion).unwrap();
        assert_eq!(f.dimension(), 3);
        let d = enumerate_basis(4, 3, Statistics::Distinguishable).unwrap();
        assert_eq!(d.dimension(), 64);
    }

    #[test]
    fn index_map_is_bijective() {
        for stats in [
            Statistics::Boson,
            Statistics::Fermion,
            Statistics::Distinguishable,
        ] {
            let b = enumerate_basis(5, 3, stats).unwrap();
            for i in 0..b.dimension() {
                assert_eq!(b.index_of(b.state(i)), Some(i), "{stats:?}");
            }
        }
    }

    #[test]
    fn ordering_is_lexicographic() {
        let b = enumerate_basis(4, 2, Statistics::Fermion).unwrap();
        let collected: Vec<Vec<u16>> = b.iter_states().map(|s| s.to_vec()).collect();
        assert_eq!(
            collected,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let bb = enumerate_basis(3, 2, Statistics::Boson).unwrap();
        let collected: Vec<Vec<u16>> = bb.iter_states().map(|s| s.to_vec()).collect();
        assert_eq!(
            collected,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 1],
                vec![1, 2],
                vec![2, 2]
            ]
        );
    }

    #[test]
    fn cap_is_enforced() {
        match enumerate_basis_with_cap(100, 4, Statistics::Distinguishable, 1000) {
            Err(BasisError::DimensionTooLarge(dim, cap)) => {
                assert_eq!(dim, 100_000_000);
                assert_eq!(cap, 1000);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn single_particle_is_site_basis() {
        let b = enumerate_basis(7, 1, Statistics::Boson).unwrap();
        assert_eq!(b.dimension(), 7);
        for i in 0..7 {
            assert_eq!(b.state(i), &[i as u16]);
        }
    }
}
