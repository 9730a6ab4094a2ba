//! Many-body walk Hamiltonians in CSR form: hopping along graph edges plus a
//! finite-range density-density interaction.

use crate::basis::{BasisError, ConfigurationBasis};
use crate::graph::Graph;
use crate::two_particle::{InteractionModel, Statistics};
use num_complex::Complex64;
use rayon::prelude::*;

/// Sparse Hermitian matrix over a configuration basis.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    pub dim: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    data: Vec<Complex64>,
    /// Gershgorin row-sum upper estimate of the spectral norm.
    pub norm_bound: f64,
}

impl SparseHamiltonian {
    pub fn row(&self, i: usize) -> (&[u32], &[Complex64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.data[lo..hi])
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.par_iter_mut().enumerate().for_each(|(i, out)| {
            let (cols, vals) = self.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c as usize];
            }
            *out = acc;
        });
    }

    /// Dense copy, for small-dimension oracles.
    pub fn to_dense(&self) -> ndarray::Array2<Complex64> {
        let mut m = ndarray::Array2::zeros((self.dim, self.dim));
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                m[(i, *c as usize)] = *v;
            }
        }
        m
    }

    /// max |H_ij - conj(H_ji)| by full scan.
    pub fn hermiticity_defect(&self) -> f64 {
        use std::collections::HashMap;
        let mut map: HashMap<(u32, u32), Complex64> = HashMap::with_capacity(self.nnz());
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                map.insert((i as u32, *c), *v);
            }
        }
        let mut worst = 0.0f64;
        for (&(i, j), &v) in &map {
            let vt = map
                .get(&(j, i))
                .copied()
                .unwrap_or(Complex64::new(0.0, 0.0));
            worst = worst.max((v - vt.conj()).norm());
        }
        worst
    }
}

/// Pairs of sites within BFS distance <= range, with their distance
/// (excluding distance 0).
fn close_pairs(g: &Graph, range: usize) -> Vec<(u16, u16, usize)> {
    let mut out = Vec::new();
    if range == 0 {
        return out;
    }
    let adj = g.adjacency_list();
    for v in 0..g.vertex_count() {
        // bounded BFS
        let mut dist = vec![usize::MAX; g.vertex_count()];
        let mut q = std::collections::VecDeque::new();
        dist[v] = 0;
        q.push_back(v);
        while let Some(u) = q.pop_front() {
            if dist[u] == range {
                continue;
            }
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        for (w, &d) in dist.iter().enumerate() {
            if w > v && d != usize::MAX && d >= 1 && d <= range {
                out.push((v as u16, w as u16, d));
            }
        }
    }
    out
}

/// Build the m-particle walk Hamiltonian for `model` on `graph` in the given
/// statistics sector. For m = 1 this is exactly the adjacency matrix.
pub fn build_hamiltonian(
    graph: &Graph,
    basis: &ConfigurationBasis,
    model: &InteractionModel,
) -> Result<SparseHamiltonian, BasisError> {
    assert_eq!(graph.vertex_count(), basis.sites);
    let dim = basis.dimension();
    let m = basis.particles;
    let adj = graph.adjacency_list();
    let range = model.range();
    // distance table for site pairs within the interaction range
    let mut pair_dist: std::collections::HashMap<(u16, u16), usize> =
        std::collections::HashMap::new();
    for (a, b, d) in close_pairs(graph, range) {
        pair_dist.insert((a, b), d);
    }
    let v0 = model.v(0);

    let rows: Vec<Vec<(u32, Complex64)>> = (0..dim)
        .into_par_iter()
        .map(|i| {
            let state = basis.state(i);
            let mut entries: Vec<(u32, Complex64)> = Vec::with_capacity(2 * m * 3 + 1);
            // diagonal: every unordered particle pair pays V(dist of its sites)
            let mut diag = 0.0f64;
            for w1 in 0..m {
                for w2 in w1 + 1..m {
                    let (a, b) = (state[w1], state[w2]);
                    if a == b {
                        diag += v0;
                    } else if range > 0 {
                        let key = (a.min(b), a.max(b));
                        if let Some(&d) = pair_dist.get(&key) {
                            diag += model.v(d);
                        }
                    }
                }
            }
            if diag != 0.0 {
                entries.push((i as u32, Complex64::new(diag, 0.0)));
            }
            // hopping
            match basis.statistics {
                Statistics::Distinguishable => {
                    let mut moved = state.to_vec();
                    for w in 0..m {
                        let from = state[w];
                        for &to in &adj[from as usize] {
                            moved.copy_from_slice(state);
                            moved[w] = to as u16;
                            let j = basis.index_of(&moved).expect("closed under hops");
                            entries.push((j as u32, Complex64::new(1.0, 0.0)));
                        }
                    }
                }
                Statistics::Boson => {
                    let mut moved = state.to_vec();
                    for w in 0..m {
                        let from = state[w];
                        if w > 0 && state[w - 1] == from {
                            continue; // hop each occupied site once
                        }
                        let n_from = state.iter().filter(|&&x| x == from).count() as f64;
                        for &to in &adj[from as usize] {
                            moved.copy_from_slice(state);
                            moved[w] = to as u16;
                            moved.sort_unstable();
                            let n_to = state.iter().filter(|&&x| x == to as u16).count() as f64;
                            let amp = (n_from * (n_to + 1.0)).sqrt();
                            let j = basis.index_of(&moved).expect("closed under hops");
                            entries.push((j as u32, Complex64::new(amp, 0.0)));
                        }
                    }
                }
                Statistics::Fermion => {
                    for w in 0..m {
                        let from = state[w];
                        for &to in &adj[from as usize] {
                            let to = to as u16;
                            if state.contains(&to) {
                                continue; // Pauli blocked
                            }
                            let mut moved = state.to_vec();
                            moved[w] = to;
                            moved.sort_unstable();
                            // sign: number of occupied sites strictly between
                            let (lo, hi) = (from.min(to), from.max(to));
                            let between =
                                state.iter().filter(|&&x| x > lo && x < hi).count();
                            let sign = if between % 2 == 0 { 1.0 } else { -1.0 };
                            let j = basis.index_of(&moved).expect("closed under hops");
                            entries.push((j as u32, Complex64::new(sign, 0.0)));
                        }
                    }
                }
            }
            entries.sort_unstable_by_key(|e| e.0);
            // merge duplicate columns
            let mut merged: Vec<(u32, Complex64)> = Vec::with_capacity(entries.len());
            for (c, v) in entries {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged
        })
        .collect();

    let mut indptr = Vec::with_capacity(dim + 1);
    indptr.push(0usize);
    let mut nnz = 0usize;
    for r in &rows {
        nnz += r.len();
        indptr.push(nnz);
    }
    let mut indices = Vec::with_capacity(nnz);
    let mut data = Vec::with_capacity(nnz);
    let mut norm_bound = 0.0f64;
    for r in rows {
        let row_sum: f64 = r.iter().map(|(_, v)| v.norm()).sum();
        norm_bound = norm_bound.max(row_sum);
        for (c, v) in r {
            indices.push(c);
            data.push(v);
        }
    }
    Ok(SparseHamiltonian {
        dim,
        indptr,
        indices,
        data,
        norm_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::enumerate_basis;
    use crate::gadgets;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_particle_reduces_to_adjacency() {
        let g = gadgets::momentum_switch().graph;
        let basis = enumerate_basis(g.vertex_count(), 1, Statistics::Boson).unwrap();
        let h = build_hamiltonian(&g, &basis, &InteractionModel::Onsite { u: 3.7 }).unwrap();
        let dense = h.to_dense();
        for i in 0..g.vertex_count() {
            for j in 0..g.vertex_count() {
                let want = if g.has_edge(i, j) { 1.0 } else { 0.0 };
                assert_eq!(dense[(i, j)], c(want));
            }
        }
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn two_bosons_two_sites_onsite() {
        // basis {|00>, |01>, |11>} in sorted-tuple order
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let basis = enumerate_basis(2, 2, Statistics::Boson).unwrap();
        let u = 1.9;
        let h = build_hamiltonian(&g, &basis, &InteractionModel::Onsite { u }).unwrap();
        let dense = h.to_dense();
        let r2 = 2.0f64.sqrt();
        let want = ndarray::array![
            [c(u), c(r2), c(0.0)],
            [c(r2), c(0.0), c(r2)],
            [c(0.0), c(r2), c(u)]
        ];
        assert!((&dense - &want).iter().map(|x| x.norm()).fold(0., f64::max) < 1e-15);
    }

    #[test]
    fn two_fermions_path3_nearest_neighbor() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let basis = enumerate_basis(3, 2, Statistics::Fermion).unwrap();
        let u = -0.7;
        let h =
            build_hamiltonian(&g, &basis, &InteractionModel::NearestNeighbor { u }).unwrap();
        let dense = h.to_dense();
        // states {01, 02, 12}: diagonal (U, 0, U)
        assert_eq!(dense[(0, 0)], c(u));
        assert_eq!(dense[(1, 1)], c(0.0));
        assert_eq!(dense[(2, 2)], c(u));
        assert_eq!(h.hermiticity_defect(), 0.0);
        // {0,1} -> {0,2} by hopping 1->2: no crossing, sign +1
        assert_eq!(dense[(0, 1)], c(1.0));
        // {0,2} -> {1,2} hop 0->1 sign +1; {0,2} -> {0,1} hop 2->1 sign +1
        assert_eq!(dense[(1, 2)], c(1.0));
    }

    #[test]
    fn fermion_sign_crossing() {
        // path of 4; hop 0 -> 1 in state {1,...}? use state {0,2} hop 0->... need a crossing:
        // state {1, 2} on path 0-1-2-3 with extra edge (0,3): hop 0..
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let basis = enumerate_basis(4, 2, Statistics::Fermion).unwrap();
        let h = build_hamiltonian(&g, &basis, &InteractionModel::Onsite { u: 0.0 }).unwrap();
        let dense = h.to_dense();
        // hop 0 -> 3 in state {0, 2}: site 2 lies strictly between, sign -1
        let from = basis.index_of(&[0, 2]).unwrap();
        let to = basis.index_of(&[2, 3]).unwrap();
        assert_eq!(dense[(from, to)], c(-1.0));
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn norm_bound_dominates_spectrum() {
        use ndarray_linalg::Eigh;
        let g = gadgets::hadamard_k2().graph;
        let basis = enumerate_basis(g.vertex_count(), 2, Statistics::Boson).unwrap();
        let h = build_hamiltonian(&g, &basis, &InteractionModel::Onsite { u: 2.4 }).unwrap();
        let (evals, _) = h
            .to_dense()
            .eigh(ndarray_linalg::UPLO::Lower)
            .unwrap();
        let spec = evals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        assert!(h.norm_bound >= spec);
        assert!(h.norm_bound <= spec * 4.0 + 8.0, "bound not absurdly loose");
    }
}
