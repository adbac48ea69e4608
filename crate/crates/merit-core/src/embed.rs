//! Spectral embedding: packed symmetric storage, a top-k eigensolver,
//! and the column filter that trims low-energy nodes before embedding
//!
//! The eigensolver is orthogonal iteration on a positive-definite shift
//! of the input (Gershgorin bound, slightly inflated so the shifted
//! matrix can never be singular), with Rayleigh-Ritz extraction each
//! round and a residual-based stopping rule ‖A·U − U·Λ‖_F ≤ tol·‖A‖_F.
//! It targets the handful of leading eigenpairs a community embedding
//! needs, not general spectra.

use serde::{Deserialize, Serialize};

use crate::dense::{dot, DenseMatrix};
use crate::error::Error;
use crate::io::CoordinateData;
use crate::rng::CounterRng;

/// Symmetric n×n matrix stored as the packed upper triangle
/// (`idx(i ≤ j) = j(j+1)/2 + i`), half the memory of a square array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        assert!(hi < self.n, "index ({i}, {j}) out of range {}", self.n);
        hi * (hi + 1) / 2 + lo
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let at = self.idx(i, j);
        self.data[at] = v;
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut a = Self::zeros(n);
        for j in 0..n {
            for i in 0..=j {
                a.set(i, j, f(i, j));
            }
        }
        a
    }

    /// Build from coordinate entries. A symmetric listing may carry either
    /// triangle; a full listing must be consistent across the diagonal.
    /// Conflicting duplicate coordinates are rejected.
    pub fn from_coordinate(coord: &CoordinateData) -> Result<Self, Error> {
        if coord.rows != coord.cols {
            return Err(Error::contract(format!(
                "adjacency must be square, got {}×{}",
                coord.rows, coord.cols
            )));
        }
        let n = coord.rows;
        let mut a = Self::zeros(n);
        let mut filled = vec![false; n * (n + 1) / 2];
        for &(i, j, v) in &coord.entries {
            if i >= n || j >= n {
                return Err(Error::contract(format!("entry ({i}, {j}) out of range {n}")));
            }
            if !v.is_finite() {
                return Err(Error::contract(format!("entry ({i}, {j}) is not finite")));
            }
            let at = a.idx(i, j);
            if filled[at] && a.data[at] != v {
                return Err(Error::contract(format!(
                    "conflicting values for entry ({i}, {j}): {} vs {v}",
                    a.data[at]
                )));
            }
            a.data[at] = v;
            filled[at] = true;
        }
        Ok(a)
    }

    /// `out = A·v`, touching each stored entry once.
    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n);
        assert_eq!(out.len(), self.n);
        out.fill(0.0);
        for j in 0..self.n {
            let base = j * (j + 1) / 2;
            let vj = v[j];
            for i in 0..j {
                let a = self.data[base + i];
                out[i] += a * vj;
                out[j] += a * v[i];
            }
            out[j] += self.data[base + j] * vj;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut sq = 0.0;
        for j in 0..self.n {
            let base = j * (j + 1) / 2;
            for i in 0..j {
                sq += 2.0 * self.data[base + i] * self.data[base + i];
            }
            sq += self.data[base + j] * self.data[base + j];
        }
        sq.sqrt()
    }

    /// Gershgorin bound: max_i Σ_j |a_ij| ≥ |λ| for every eigenvalue.
    pub fn max_row_abs_sum(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for j in 0..self.n {
            let base = j * (j + 1) / 2;
            for i in 0..j {
                let a = self.data[base + i].abs();
                sums[i] += a;
                sums[j] += a;
            }
            sums[j] += self.data[base + j].abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }
}

/// Leading eigenpairs, eigenvalues descending, eigenvectors as the
/// columns of an orthonormal n×k matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
    pub converged: bool,
    pub iterations: usize,
}

/// Modified Gram-Schmidt in place. Returns false when a column collapses
/// (the iterate lost rank), which the caller treats as a hard error.
fn orthonormalize(q: &mut DenseMatrix) -> bool {
    let k = q.cols();
    for j in 0..k {
        for prev in 0..j {
            let coeff = dot(q.col(prev), q.col(j));
            let (a, b) = (prev, j);
            // Split borrows: copy the projector column head pointer via
            // index arithmetic is messier than a temporary; k is tiny.
            let pcol: Vec<f64> = q.col(a).to_vec();
            for (x, p) in q.col_mut(b).iter_mut().zip(&pcol) {
                *x -= coeff * p;
            }
        }
        let norm = dot(q.col(j), q.col(j)).sqrt();
        if norm <= 1e-300 {
            return false;
        }
        for x in q.col_mut(j) {
            *x /= norm;
        }
    }
    true
}

/// Cyclic Jacobi eigendecomposition of a small symmetric k×k matrix given
/// column-major. Returns (values, vectors) unsorted.
fn jacobi_small(k: usize, s: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; k * k];
    for d in 0..k {
        v[d * k + d] = 1.0;
    }
    let at = |i: usize, j: usize| j * k + i;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..k {
            for q in p + 1..k {
                off += s[at(p, q)] * s[at(p, q)];
            }
        }
        let total: f64 = s.iter().map(|x| x * x).sum();
        if off <= 1e-26 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                let apq = s[at(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (s[at(q, q)] - s[at(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for r in 0..k {
                    let srp = s[at(r, p)];
                    let srq = s[at(r, q)];
                    s[at(r, p)] = c * srp - sn * srq;
                    s[at(r, q)] = sn * srp + c * srq;
                }
                for r in 0..k {
                    let spr = s[at(p, r)];
                    let sqr = s[at(q, r)];
                    s[at(p, r)] = c * spr - sn * sqr;
                    s[at(q, r)] = sn * spr + c * sqr;
                }
                for r in 0..k {
                    let vrp = v[at(r, p)];
                    let vrq = v[at(r, q)];
                    v[at(r, p)] = c * vrp - sn * vrq;
                    v[at(r, q)] = sn * vrp + c * vrq;
                }
            }
        }
    }
    let values = (0..k).map(|d| s[at(d, d)]).collect();
    (values, v)
}

/// Top-k eigenpairs by algebraic value. Deterministic: the starting block
/// is drawn from a fixed internal key, so identical inputs give identical
/// output to the last bit.
pub fn top_eigenpairs(
    a: &SymmetricMatrix,
    k: usize,
    tol: f64,
    max_iters: usize,
) -> Result<EigenPairs, Error> {
    let n = a.n();
    if k == 0 || k > n {
        return Err(Error::contract(format!("requested {k} eigenpairs of order {n}")));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::contract(format!("tol must be positive, got {tol}")));
    }
    if max_iters == 0 {
        return Err(Error::contract("maxIters must be at least 1"));
    }

    let fro = a.frobenius_norm();
    let mut rng = CounterRng::new(0x5EED_0F_E16E, 0);
    let mut q = DenseMatrix::from_fn(n, k, |_, _| rng.gaussian());
    if !orthonormalize(&mut q) {
        return Err(Error::contract("starting block lost rank"));
    }
    if fro == 0.0 {
        // The zero matrix: any orthonormal block is exact.
        return Ok(EigenPairs {
            values: vec![0.0; k],
            vectors: q,
            converged: true,
            iterations: 0,
        });
    }

    // Positive-definite shift: strictly above the Gershgorin bound so
    // B = A + shift·I cannot be singular even when the bound is attained.
    let shift = a.max_row_abs_sum() * (1.0 + 1e-6) + f64::MIN_POSITIVE;
    let mut z = DenseMatrix::zeros(n, k);
    let mut scratch = vec![0.0; n];

    for iter in 1..=max_iters {
        // Power step on the shifted matrix.
        for j in 0..k {
            a.matvec(q.col(j), &mut scratch);
            for ((zi, &si), &qi) in z.col_mut(j).iter_mut().zip(&scratch).zip(q.col(j)) {
                *zi = si + shift * qi;
            }
        }
        std::mem::swap(&mut q, &mut z);
        if !orthonormalize(&mut q) {
            return Err(Error::contract("iteration block lost rank"));
        }

        // Rayleigh-Ritz on the original (unshifted) matrix.
        let mut small = vec![0.0; k * k];
        let mut aq = DenseMatrix::zeros(n, k);
        for j in 0..k {
            a.matvec(q.col(j), aq.col_mut(j));
        }
        for j in 0..k {
            for i in 0..k {
                small[j * k + i] = dot(q.col(i), aq.col(j));
            }
        }
        let (raw_values, raw_vectors) = jacobi_small(k, &mut small);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| {
            raw_values[y]
                .partial_cmp(&raw_values[x])
                .expect("finite eigenvalues")
                .then(x.cmp(&y))
        });
        let values: Vec<f64> = order.iter().map(|&i| raw_values[i]).collect();
        let mut u = DenseMatrix::zeros(n, k);
        for (col, &src) in order.iter().enumerate() {
            for r in 0..n {
                let mut acc = 0.0;
                for inner in 0..k {
                    acc += q.get(r, inner) * raw_vectors[src * k + inner];
                }
                u.set(r, col, acc);
            }
        }

        // Residual ‖A·U − U·Λ‖_F against tol·‖A‖_F.
        let mut resid_sq = 0.0;
        for j in 0..k {
            a.matvec(u.col(j), &mut scratch);
            for (s, &ui) in scratch.iter().zip(u.col(j)) {
                let r = s - values[j] * ui;
                resid_sq += r * r;
            }
        }
        if resid_sq.sqrt() <= tol * fro {
            return Ok(EigenPairs {
                values,
                vectors: u,
                converged: true,
                iterations: iter,
            });
        }
        if iter == max_iters {
            return Ok(EigenPairs {
                values,
                vectors: u,
                converged: false,
                iterations: iter,
            });
        }
    }
    unreachable!("loop returns on its last iteration");
}

/// Columns carrying a `fraction` of the total squared-norm energy: sort
/// by energy (descending, index ascending on ties), keep the shortest
/// prefix whose cumulative sum reaches `fraction·total`, and report those
/// indices ascending. The total is accumulated in the same sorted order
/// the prefix walk uses, so the comparison is exact by construction.
pub fn energy_filter(x: &DenseMatrix, fraction: f64) -> Result<Vec<usize>, Error> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::contract(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let n = x.cols();
    let energies: Vec<f64> = (0..n).map(|j| dot(x.col(j), x.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        energies[b]
            .partial_cmp(&energies[a])
            .expect("finite energies")
            .then(a.cmp(&b))
    });
    let total: f64 = order.iter().map(|&j| energies[j]).sum();
    if total == 0.0 {
        return Err(Error::contract("matrix has no energy to filter"));
    }
    let target = fraction * total;
    let mut kept = Vec::new();
    let mut cum = 0.0;
    for &j in &order {
        kept.push(j);
        cum += energies[j];
        if cum >= target {
            break;
        }
    }
    kept.sort_unstable();
    Ok(kept)
}

/// Project rows: `UᵀX`, the K-dimensional embedding of every column.
pub fn reduce_rows(u: &DenseMatrix, x: &DenseMatrix) -> DenseMatrix {
    assert_eq!(
        u.rows(),
        x.rows(),
        "basis and data have different ambient dimension"
    );
    DenseMatrix::from_fn(u.cols(), x.cols(), |r, c| dot(u.col(r), x.col(c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_indexing_is_symmetric() {
        let mut a = SymmetricMatrix::zeros(3);
        a.set(0, 2, 5.0);
        a.set(1, 0, -2.0);
        assert_eq!(a.get(2, 0), 5.0);
        assert_eq!(a.get(0, 1), -2.0);
        assert_eq!(a.data.len(), 6);
    }

    #[test]
    fn matvec_matches_dense_arithmetic() {
        let a = SymmetricMatrix::from_fn(4, |i, j| (i + 2 * j) as f64);
        let v = [1.0, -1.0, 2.0, 0.5];
        let mut out = vec![0.0; 4];
        a.matvec(&v, &mut out);
        for i in 0..4 {
            let want: f64 = (0..4).map(|j| a.get(i, j) * v[j]).sum();
            assert!((out[i] - want).abs() < 1e-12, "row {i}");
        }
    }

    #[test]
    fn coordinate_import_expands_the_symmetric_triangle() {
        let coord = CoordinateData {
            rows: 3,
            cols: 3,
            symmetric: true,
            entries: vec![(1, 0, 2.0), (2, 1, 4.0), (0, 0, 1.0)],
        };
        let a = SymmetricMatrix::from_coordinate(&coord).unwrap();
        assert_eq!(a.get(0, 1), 2.0);
        assert_eq!(a.get(1, 2), 4.0);
        assert_eq!(a.get(0, 0), 1.0);
        assert_eq!(a.get(2, 2), 0.0);
    }

    #[test]
    fn conflicting_coordinate_entries_are_rejected() {
        let coord = CoordinateData {
            rows: 2,
            cols: 2,
            symmetric: false,
            entries: vec![(0, 1, 2.0), (1, 0, 3.0)],
        };
        assert!(matches!(
            SymmetricMatrix::from_coordinate(&coord),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn diagonal_matrix_eigenpairs() {
        let a = SymmetricMatrix::from_fn(3, |i, j| {
            if i == j {
                [3.0, 2.0, 1.0][i]
            } else {
                0.0
            }
        });
        let eig = top_eigenpairs(&a, 2, 1e-10, 500).unwrap();
        assert!(eig.converged);
        assert!((eig.values[0] - 3.0).abs() < 1e-8, "{:?}", eig.values);
        assert!((eig.values[1] - 2.0).abs() < 1e-8);
        // Eigenvectors are ±e₀ and ±e₁.
        assert!(eig.vectors.get(0, 0).abs() > 1.0 - 1e-6);
        assert!(eig.vectors.get(1, 1).abs() > 1.0 - 1e-6);
    }

    #[test]
    fn gershgorin_edge_case_converges() {
        // Eigenvalues ±1, and the Gershgorin bound is exactly 1: the
        // inflated shift keeps the iteration away from singularity.
        let a = SymmetricMatrix::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let eig = top_eigenpairs(&a, 1, 1e-10, 500).unwrap();
        assert!(eig.converged);
        assert!((eig.values[0] - 1.0).abs() < 1e-8);
        let u = eig.vectors.col(0);
        assert!((u[0] - u[1]).abs() < 1e-6, "not the symmetric vector: {u:?}");
    }

    #[test]
    fn zero_matrix_short_circuits() {
        let a = SymmetricMatrix::zeros(5);
        let eig = top_eigenpairs(&a, 2, 1e-10, 10).unwrap();
        assert!(eig.converged);
        assert_eq!(eig.values, vec![0.0, 0.0]);
        assert_eq!(eig.iterations, 0);
    }

    /// Full dense cyclic Jacobi written independently of the library path:
    /// the oracle for random-matrix spectra.
    fn oracle_eigenvalues(n: usize, a: &SymmetricMatrix) -> Vec<f64> {
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| a.get(i, j)).collect())
            .collect();
        for _ in 0..200 {
            let mut off = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    off += m[i][j] * m[i][j];
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if m[p][q].abs() < 1e-18 {
                        continue;
                    }
                    let tau = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for r in 0..n {
                        let (mrp, mrq) = (m[r][p], m[r][q]);
                        m[r][p] = c * mrp - s * mrq;
                        m[r][q] = s * mrp + c * mrq;
                    }
                    for r in 0..n {
                        let (mpr, mqr) = (m[p][r], m[q][r]);
                        m[p][r] = c * mpr - s * mqr;
                        m[q][r] = s * mpr + c * mqr;
                    }
                }
            }
        }
        let mut vals: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        vals
    }

    #[test]
    fn random_spectrum_matches_independent_jacobi() {
        let mut state = 0xFEED_u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let n = 20;
        let a = SymmetricMatrix::from_fn(n, |_, _| next());
        let k = 4;
        // A flat random spectrum has no gap after the 4th value, so the
        // subspace residual decays slowly; the Ritz values themselves are
        // accurate long before the residual tolerance trips.
        let eig = top_eigenpairs(&a, k, 1e-7, 200_000).unwrap();
        assert!(eig.converged, "no convergence in {} iterations", eig.iterations);
        let oracle = oracle_eigenvalues(n, &a);
        for i in 0..k {
            assert!(
                (eig.values[i] - oracle[i]).abs() < 1e-6,
                "pair {i}: {} vs oracle {}",
                eig.values[i],
                oracle[i]
            );
        }
        // Orthonormality of the returned block.
        for i in 0..k {
            for j in 0..k {
                let ip = dot(eig.vectors.col(i), eig.vectors.col(j));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-8, "({i}, {j}): {ip}");
            }
        }
    }

    #[test]
    fn energy_filter_worked_examples() {
        // Column norms 3, 1, 0, 0 → energies 9, 1, 0, 0.
        let x = DenseMatrix::from_data(
            2,
            4,
            vec![3.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        assert_eq!(energy_filter(&x, 0.9).unwrap(), vec![0]);
        assert_eq!(energy_filter(&x, 0.95).unwrap(), vec![0, 1]);
        // fraction 1 keeps exactly the positive-energy columns.
        assert_eq!(energy_filter(&x, 1.0).unwrap(), vec![0, 1]);

        let equal = DenseMatrix::from_fn(2, 4, |i, _| if i == 0 { 1.0 } else { 0.0 });
        assert_eq!(energy_filter(&equal, 0.5).unwrap(), vec![0, 1]);
        let five = DenseMatrix::from_fn(2, 5, |i, _| if i == 0 { 1.0 } else { 0.0 });
        assert_eq!(energy_filter(&five, 0.5).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn energy_filter_rejects_degenerate_input() {
        let zero = DenseMatrix::zeros(2, 3);
        assert!(energy_filter(&zero, 0.5).is_err());
        let x = DenseMatrix::identity(2);
        assert!(energy_filter(&x, 0.0).is_err());
        assert!(energy_filter(&x, 1.5).is_err());
    }

    #[test]
    fn reduce_rows_projects_onto_the_basis() {
        let u = DenseMatrix::from_data(3, 2, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        let x = DenseMatrix::from_fn(3, 4, |i, j| (i * 10 + j) as f64);
        let y = reduce_rows(&u, &x);
        assert_eq!(y.rows(), 2);
        assert_eq!(y.cols(), 4);
        for j in 0..4 {
            assert_eq!(y.get(0, j), x.get(0, j));
            assert_eq!(y.get(1, j), x.get(1, j));
        }
    }
}
