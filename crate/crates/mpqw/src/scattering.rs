//! Single-particle S-matrices and scattering-state amplitudes for gadgets.
//!
//! Two equivalent solvers are provided. The `gamma` method solves the full
//! bordered system; the `q_form` method eliminates the interior first. Both
//! accept an arbitrary Hermitian gadget matrix, not just 0/1 adjacency.
//!
//! Rail coordinates follow the convention that x = 1 is the terminal vertex
//! itself, so a scattering state carries amplitude
//! `e^{-ikx} delta_{qj} + e^{ikx} S_qj(k)` for x >= 1 on rail q.

use crate::graph::Gadget;
use ndarray::prelude::*;
use ndarray_linalg::{Factorize, Solve, SVD};
use num_complex::Complex64;
use thiserror::Error;

pub const COND_SINGULAR_THRESHOLD: f64 = 1e12;

#[derive(Debug, Error)]
pub enum ScatteringError {
    #[error("momentum {0} outside (-pi, 0)")]
    InvalidMomentum(f64),
    #[error("system singular at momentum {k}: condition number {condition:.3e}")]
    SingularAtMomentum { k: f64, condition: f64 },
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

/// Partition of the gadget matrix with terminals first: A couples terminals,
/// D couples the interior, B couples interior to terminals.
#[derive(Debug, Clone)]
pub struct AdjacencyBlocks {
    pub a: Array2<Complex64>,
    pub b: Array2<Complex64>,
    pub d: Array2<Complex64>,
}

impl AdjacencyBlocks {
    pub fn terminal_count(&self) -> usize {
        self.a.nrows()
    }

    pub fn interior_count(&self) -> usize {
        self.d.nrows()
    }

    /// Full (N+m) x (N+m) gadget matrix, terminals first.
    pub fn assemble(&self) -> Array2<Complex64> {
        let n = self.terminal_count();
        let m = self.interior_count();
        let mut h = Array2::zeros((n + m, n + m));
        h.slice_mut(s![..n, ..n]).assign(&self.a);
        h.slice_mut(s![n.., ..n]).assign(&self.b);
        h.slice_mut(s![..n, n..])
            .assign(&self.b.t().mapv(|x| x.conj()));
        h.slice_mut(s![n.., n..]).assign(&self.d);
        h
    }
}

/// Partition the adjacency matrix of a gadget with terminals ordered
/// inputs-then-outputs and interior vertices in index order.
pub fn partition_adjacency(g: &Gadget) -> AdjacencyBlocks {
    let terms = g.terminals();
    let nv = g.graph.vertex_count();
    let n = terms.len();
    let m = nv - n;
    // order: terminals in S-matrix order, then remaining vertices ascending
    let mut order = terms.clone();
    let mut is_term = vec![false; nv];
    for &t in &terms {
        is_term[t] = true;
    }
    order.extend((0..nv).filter(|&v| !is_term[v]));
    let mut pos = vec![0usize; nv];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let one = Complex64::new(1.0, 0.0);
    let mut a = Array2::zeros((n, n));
    let mut b = Array2::zeros((m, n));
    let mut d = Array2::zeros((m, m));
    for &(u, v) in g.graph.edges() {
        let (i, j) = (pos[u], pos[v]);
        match (i < n, j < n) {
            (true, true) => {
                a[(i, j)] = one;
                a[(j, i)] = one;
            }
            (false, false) => {
                d[(i - n, j - n)] = one;
                d[(j - n, i - n)] = one;
            }
            (true, false) => b[(j - n, i)] = one,
            (false, true) => b[(i - n, j)] = one,
        }
    }
    AdjacencyBlocks { a, b, d }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SMatrixMethod {
    Gamma,
    QForm,
}

/// S-matrix, interior amplitudes, and conditioning data at one momentum.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    pub k: f64,
    /// N x N unitary mapping incoming rail amplitudes to outgoing ones.
    pub s: Array2<Complex64>,
    /// m x N interior amplitudes; column j belongs to the state incoming on
    /// rail j.
    pub psi: Array2<Complex64>,
    /// 2 cos k.
    pub energy: f64,
    /// Condition number of the solved system.
    pub condition: f64,
}

fn solve_mat(
    a: &Array2<Complex64>,
    rhs: &Array2<Complex64>,
) -> Result<Array2<Complex64>, ScatteringError> {
    let f = a
        .factorize()
        .map_err(|e| ScatteringError::Linalg(e.to_string()))?;
    let mut out = Array2::zeros(rhs.raw_dim());
    for (j, col) in rhs.columns().into_iter().enumerate() {
        let x = f
            .solve(&col.to_owned())
            .map_err(|e| ScatteringError::Linalg(e.to_string()))?;
        out.column_mut(j).assign(&x);
    }
    Ok(out)
}

fn condition_number(a: &Array2<Complex64>) -> f64 {
    match a.svd(false, false) {
        Ok((_, sigma, _)) => {
            let smax = sigma.iter().cloned().fold(0.0f64, f64::max);
            let smin = sigma.iter().cloned().fold(f64::INFINITY, f64::min);
            if smin <= 0.0 {
                f64::INFINITY
            } else {
                smax / smin
            }
        }
        Err(_) => f64::INFINITY,
    }
}

fn gamma_matrix(blocks: &AdjacencyBlocks, z: Complex64) -> Array2<Complex64> {
    let n = blocks.terminal_count();
    let m = blocks.interior_count();
    let mut g = Array2::<Complex64>::zeros((n + m, n + m));
    let bdag = blocks.b.t().mapv(|x| x.conj());
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = z * blocks.a[(i, j)] - if i == j { one } else { zero };
        }
        for j in 0..m {
            g[(i, n + j)] = z * bdag[(i, j)];
        }
    }
    for i in 0..m {
        for j in 0..n {
            g[(n + i, j)] = z * blocks.b[(i, j)];
        }
        for j in 0..m {
            g[(n + i, n + j)] =
                z * blocks.d[(i, j)] - if i == j { z * z + one } else { zero };
        }
    }
    g
}

/// Solve for the S-matrix and interior amplitudes of a Hermitian gadget
/// matrix given as terminal-first blocks.
pub fn s_matrix_from_blocks(
    blocks: &AdjacencyBlocks,
    k: f64,
    method: SMatrixMethod,
) -> Result<ScatteringSolution, ScatteringError> {
    if !(k > -std::f64::consts::PI && k < 0.0) {
        return Err(ScatteringError::InvalidMomentum(k));
    }
    let z = Complex64::from_polar(1.0, k);
    let zinv = Complex64::from_polar(1.0, -k);
    let n = blocks.terminal_count();
    let m = blocks.interior_count();

    let sol = match method {
        SMatrixMethod::Gamma => {
            let g_z = gamma_matrix(blocks, z);
            let cond = condition_number(&g_z);
            let g_zinv = gamma_matrix(blocks, zinv);
            let sol = solve_mat(&g_z, &g_zinv.mapv(|x| -x))
                .map_err(|_| ScatteringError::SingularAtMomentum { k, condition: cond })?;
            let s = sol.slice(s![..n, ..n]).to_owned();
            let psi = sol.slice(s![n.., ..n]).mapv(|x| z * x);
            ScatteringSolution {
                k,
                s,
                psi,
                energy: 2.0 * k.cos(),
                condition: cond,
            }
        }
        SMatrixMethod::QForm => {
            // (1/z + z - D) is shared by Q(z) and Q(1/z).
            let e = z + zinv; // 2 cos k
            let mut core = blocks.d.mapv(|x| -x);
            for i in 0..m {
                core[(i, i)] += e;
            }
            let cond_core = if m > 0 { condition_number(&core) } else { 1.0 };
            let fail = |cond: f64| ScatteringError::SingularAtMomentum { k, condition: cond };
            let bdag = blocks.b.t().mapv(|x| x.conj());
            let shared = if m > 0 {
                let inner = solve_mat(&core, &blocks.b).map_err(|_| fail(cond_core))?;
                blocks.a.clone() + bdag.dot(&inner)
            } else {
                blocks.a.clone()
            };
            let eye = Array2::<Complex64>::eye(n);
            let q_z = &eye - &shared.mapv(|x| z * x);
            let q_zinv = &eye - &shared.mapv(|x| zinv * x);
            let cond = condition_number(&q_z).max(cond_core);
            let s = solve_mat(&q_z, &q_zinv.mapv(|x| -x)).map_err(|_| fail(cond))?;
            // interior amplitudes from the eigenvalue equation:
            // (E - D) psi = B (terminal amplitudes), terminals carry
            // (1/z) I + z S in column form.
            let psi = if m > 0 {
                let t = eye.mapv(|x| x * zinv) + s.mapv(|x| z * x);
                solve_mat(&core, &blocks.b.dot(&t)).map_err(|_| fail(cond))?
            } else {
                Array2::zeros((0, n))
            };
            ScatteringSolution {
                k,
                s,
                psi,
                energy: 2.0 * k.cos(),
                condition: cond,
            }
        }
    };
    // A near-singular system is acceptable as long as the computed solution
    // is physical: the bounded scattering solution passes through
    // confined-state energies even though the direct solve is
    // ill-conditioned there. Flag only solutions that fail validation.
    let defect = unitarity_defect(&sol.s).max(blocks_residual(blocks, &sol));
    if !(defect <= VALIDATION_DEFECT_TOL) {
        return Err(ScatteringError::SingularAtMomentum {
            k,
            condition: sol.condition,
        });
    }
    Ok(sol)
}

/// Accept a solve only when the computed S-matrix is unitary and the
/// eigenvalue equation holds to this tolerance.
pub const VALIDATION_DEFECT_TOL: f64 = 1e-9;

/// Max residual of the eigenvalue equation over terminal and interior rows
/// for every incoming rail, with rail amplitudes from the scattering form.
pub fn blocks_residual(blocks: &AdjacencyBlocks, sol: &ScatteringSolution) -> f64 {
    (0..blocks.terminal_count())
        .map(|j| residual_for(blocks, sol, j))
        .fold(0.0, f64::max)
}

fn residual_for(blocks: &AdjacencyBlocks, sol: &ScatteringSolution, j: usize) -> f64 {
    let n = blocks.terminal_count();
    let m = blocks.interior_count();
    let z = Complex64::from_polar(1.0, sol.k);
    let e = Complex64::new(sol.energy, 0.0);
    let term_amp = |q: usize, x: i32| -> Complex64 {
        let inc = if q == j {
            z.powi(-x)
        } else {
            Complex64::new(0.0, 0.0)
        };
        inc + sol.s[(q, j)] * z.powi(x)
    };
    let mut worst = 0.0f64;
    for q in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..n {
            acc += blocks.a[(q, p)] * term_amp(p, 1);
        }
        for i in 0..m {
            acc += blocks.b[(i, q)].conj() * sol.psi[(i, j)];
        }
        acc += term_amp(q, 2);
        worst = worst.max((acc - e * term_amp(q, 1)).norm());
    }
    for i in 0..m {
        let mut acc = Complex64::new(0.0, 0.0);
        for q in 0..n {
            acc += blocks.b[(i, q)] * term_amp(q, 1);
        }
        for l in 0..m {
            acc += blocks.d[(i, l)] * sol.psi[(l, j)];
        }
        worst = worst.max((acc - e * sol.psi[(i, j)]).norm());
    }
    worst
}

/// S-matrix of a gadget's 0/1 adjacency at momentum k in (-pi, 0).
pub fn s_matrix(
    g: &Gadget,
    k: f64,
    method: SMatrixMethod,
) -> Result<ScatteringSolution, ScatteringError> {
    s_matrix_from_blocks(&partition_adjacency(g), k, method)
}

/// Amplitudes of the scattering state incoming on rail `j` (0-based),
/// tabulated on rail positions x = 1..=rail_extent for every rail, plus the
/// interior amplitudes.
#[derive(Debug, Clone)]
pub struct AmplitudeTable {
    /// rails[q][x-1] = amplitude at rail position x on rail q.
    pub rails: Vec<Vec<Complex64>>,
    pub interior: Vec<Complex64>,
}

pub fn scattering_state_amplitudes(
    sol: &ScatteringSolution,
    j: usize,
    rail_extent: usize,
) -> AmplitudeTable {
    let n = sol.s.nrows();
    assert!(j < n, "input rail index out of range");
    assert!(rail_extent >= 1);
    let z = Complex64::from_polar(1.0, sol.k);
    let mut rails = Vec::with_capacity(n);
    for q in 0..n {
        let mut row = Vec::with_capacity(rail_extent);
        for x in 1..=rail_extent {
            let inc = if q == j {
                z.powi(-(x as i32))
            } else {
                Complex64::new(0.0, 0.0)
            };
            row.push(inc + sol.s[(q, j)] * z.powi(x as i32));
        }
        rails.push(row);
    }
    AmplitudeTable {
        rails,
        interior: sol.psi.column(j).to_vec(),
    }
}

/// Maximum residual of the eigenvalue equation (H - 2 cos k) psi = 0 over
/// the gadget's own vertices for the state incoming on rail `j`, with
/// amplitudes extended along rails by the scattering-state formula.
pub fn eigenvalue_residual(g: &Gadget, sol: &ScatteringSolution, j: usize) -> f64 {
    residual_for(&partition_adjacency(g), sol, j)
}

/// Classification of an S-matrix against the perfect-transmission block form
/// [[0, U'], [U, 0]] with `split` input rails.
#[derive(Debug, Clone)]
pub struct BlockFormResult {
    pub is_perfect_transmission: bool,
    /// Lower-left block, present when transmission is perfect.
    pub u: Option<Array2<Complex64>>,
    /// Largest magnitude found in the two diagonal (reflection) blocks.
    pub reflection_norm: f64,
}

pub const BLOCK_FORM_TOL: f64 = 1e-8;

pub fn check_block_form(sol: &ScatteringSolution, split: usize) -> BlockFormResult {
    let n = sol.s.nrows();
    assert!(split > 0 && split < n, "split must cut the terminal list");
    let max_abs = |view: ndarray::ArrayView2<Complex64>| {
        view.iter().map(|x| x.norm()).fold(0.0f64, f64::max)
    };
    let refl = max_abs(sol.s.slice(s![..split, ..split]))
        .max(max_abs(sol.s.slice(s![split.., split..])));
    let perfect = refl < BLOCK_FORM_TOL;
    BlockFormResult {
        is_perfect_transmission: perfect,
        u: perfect.then(|| sol.s.slice(s![split.., ..split]).to_owned()),
        reflection_norm: refl,
    }
}

/// Max-entry deviation of S from unitarity.
pub fn unitarity_defect(s: &Array2<Complex64>) -> f64 {
    let prod = s.t().mapv(|x| x.conj()).dot(s);
    let n = s.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - Complex64::new(want, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_entry_err(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
        (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_edge_transmits_perfectly() {
        let g = gadgets::identity_edge();
        for k in [-PI / 4.0, -PI / 2.0, -1.1, -2.9] {
            let sol = s_matrix(&g, k, SMatrixMethod::Gamma).unwrap();
            assert!(sol.s[(0, 0)].norm() < 1e-12);
            assert!((sol.s[(1, 0)].norm() - 1.0).abs() < 1e-12);
            // transmission phase is e^{-ik}
            let want = Complex64::from_polar(1.0, -k);
            assert!((sol.s[(1, 0)] - want).norm() < 1e-12);
            assert!((sol.energy - 2.0 * k.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn path3_partition() {
        let p = gadgets::path(3).unwrap();
        let blocks = partition_adjacency(&p);
        assert_eq!(blocks.terminal_count(), 2);
        assert_eq!(blocks.interior_count(), 1);
        assert_eq!(blocks.a, Array2::zeros((2, 2)));
        assert_eq!(blocks.b, ndarray::array![[c(1., 0.), c(1., 0.)]]);
        assert_eq!(blocks.d, ndarray::array![[c(0., 0.)]]);
    }

    #[test]
    fn momentum_switch_golden() {
        let g = gadgets::momentum_switch();
        let blocks = partition_adjacency(&g);
        assert_eq!(blocks.terminal_count(), 3);
        assert_eq!(blocks.interior_count(), 10);

        let e4 = Complex64::from_polar(1.0, -PI / 4.0);
        let want4 = ndarray::array![
            [c(0., 0.), c(0., 0.), e4],
            [c(0., 0.), c(-1., 0.), c(0., 0.)],
            [e4, c(0., 0.), c(0., 0.)]
        ];
        let want2 = ndarray::array![
            [c(1., 0.), c(0., 0.), c(0., 0.)],
            [c(0., 0.), c(0., 0.), c(-1., 0.)],
            [c(0., 0.), c(-1., 0.), c(0., 0.)]
        ];
        for method in [SMatrixMethod::Gamma, SMatrixMethod::QForm] {
            let s4 = s_matrix(&g, -PI / 4.0, method).unwrap();
            assert!(max_entry_err(&s4.s, &want4) < 1e-10, "{method:?}");
            let s2 = s_matrix(&g, -PI / 2.0, method).unwrap();
            assert!(max_entry_err(&s2.s, &want2) < 1e-10, "{method:?}");
        }
    }

    #[test]
    fn gate_unitaries_golden() {
        let sqrt2 = 2.0f64.sqrt();
        // phase gate at -pi/4
        let sol = s_matrix(&gadgets::phase_gate(), -PI / 4.0, SMatrixMethod::Gamma).unwrap();
        let bf = check_block_form(&sol, 2);
        assert!(bf.is_perfect_transmission);
        let want = ndarray::array![
            [Complex64::from_polar(1.0, -PI / 4.0), c(0., 0.)],
            [c(0., 0.), c(1., 0.)]
        ];
        assert!(max_entry_err(bf.u.as_ref().unwrap(), &want) < 1e-10);

        // basis-changing gate at -pi/4
        let sol = s_matrix(&gadgets::basis_change(), -PI / 4.0, SMatrixMethod::Gamma).unwrap();
        let bf = check_block_form(&sol, 2);
        let f = c(0., -1.0 / sqrt2);
        let want = ndarray::array![[f * c(1., 0.), f * c(0., -1.)], [f * c(0., -1.), f]];
        assert!(max_entry_err(bf.u.as_ref().unwrap(), &want) < 1e-10);

        // Hadamard at -pi/2
        let sol = s_matrix(&gadgets::hadamard_k2(), -PI / 2.0, SMatrixMethod::QForm).unwrap();
        let bf = check_block_form(&sol, 2);
        let f = -Complex64::from_polar(1.0 / sqrt2, PI / 4.0);
        let want = ndarray::array![[f, f], [f, -f]];
        assert!(max_entry_err(bf.u.as_ref().unwrap(), &want) < 1e-10);

        // planar Hadamard at -pi/2
        let sol = s_matrix(&gadgets::hadamard_planar(), -PI / 2.0, SMatrixMethod::Gamma).unwrap();
        let bf = check_block_form(&sol, 2);
        let f = Complex64::from_polar(1.0 / sqrt2, -3.0 * PI / 4.0);
        let want = ndarray::array![[f, f], [f, -f]];
        assert!(max_entry_err(bf.u.as_ref().unwrap(), &want) < 1e-10);
    }

    #[test]
    fn amplitudes_satisfy_eigenvalue_equation() {
        for g in [
            gadgets::phase_gate(),
            gadgets::basis_change(),
            gadgets::hadamard_k2(),
            gadgets::momentum_switch(),
        ] {
            for k in [-PI / 4.0, -PI / 2.0, -0.9, -2.2] {
                let sol = s_matrix(&g, k, SMatrixMethod::Gamma).unwrap();
                for j in 0..sol.s.nrows() {
                    assert!(
                        eigenvalue_residual(&g, &sol, j) < 1e-10,
                        "residual at k={k}, j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn rail_amplitude_table() {
        let g = gadgets::identity_edge();
        let k = -PI / 3.0;
        let sol = s_matrix(&g, k, SMatrixMethod::Gamma).unwrap();
        let table = scattering_state_amplitudes(&sol, 0, 2);
        let z = Complex64::from_polar(1.0, k);
        // incoming rail: e^{-ikx} + 0
        assert!((table.rails[0][0] - z.powi(-1)).norm() < 1e-12);
        assert!((table.rails[0][1] - z.powi(-2)).norm() < 1e-12);
        // outgoing rail: S_10 e^{ikx}
        assert!((table.rails[1][0] - sol.s[(1, 0)] * z).norm() < 1e-12);
        assert!(table.interior.is_empty());
    }

    #[test]
    fn invalid_momentum_rejected() {
        let g = gadgets::identity_edge();
        assert!(matches!(
            s_matrix(&g, 0.3, SMatrixMethod::Gamma),
            Err(ScatteringError::InvalidMomentum(_))
        ));
        assert!(matches!(
            s_matrix(&g, 0.0, SMatrixMethod::QForm),
            Err(ScatteringError::InvalidMomentum(_))
        ));
    }

    #[test]
    fn weighted_hermitian_gadget() {
        // two terminals coupled through one interior site with complex hopping
        let blocks = AdjacencyBlocks {
            a: Array2::zeros((2, 2)),
            b: ndarray::array![[c(0.6, 0.3), c(0.9, -0.2)]],
            d: ndarray::array![[c(0.4, 0.0)]],
        };
        for method in [SMatrixMethod::Gamma, SMatrixMethod::QForm] {
            let sol = s_matrix_from_blocks(&blocks, -1.3, method).unwrap();
            assert!(unitarity_defect(&sol.s) < 1e-10, "{method:?}");
        }
        let a = s_matrix_from_blocks(&blocks, -1.3, SMatrixMethod::Gamma).unwrap();
        let b = s_matrix_from_blocks(&blocks, -1.3, SMatrixMethod::QForm).unwrap();
        assert!((&a.s - &b.s).iter().map(|x| x.norm()).fold(0., f64::max) < 1e-10);
        assert!((&a.psi - &b.psi).iter().map(|x| x.norm()).fold(0., f64::max) < 1e-10);
    }
}
