use ndarray::{Array2, Array3, Array4};

use super::linalg::thin_qr;
use super::ttvec::TtVector;
use super::{TruncationPolicy, TtError, DENSE_CAP};

/// A linear operator on grid functions in tensor-train format: a chain of
/// 4-way cores with shapes `(r_{k-1}, n_k, m_k, r_k)` where `n_k` indexes
/// output modes and `m_k` input modes; boundary ranks are 1.
#[derive(Debug, Clone)]
pub struct TtOperator {
    cores: Vec<Array4<f64>>,
}

impl TtOperator {
    pub fn new(cores: Vec<Array4<f64>>) -> Result<Self, TtError> {
        if cores.is_empty() {
            return Err(TtError::Empty);
        }
        if cores[0].dim().0 != 1 || cores[cores.len() - 1].dim().3 != 1 {
            return Err(TtError::ShapeMismatch("boundary ranks must be 1".into()));
        }
        for k in 1..cores.len() {
            if cores[k - 1].dim().3 != cores[k].dim().0 {
                return Err(TtError::ShapeMismatch(format!(
                    "rank mismatch between cores {} and {}",
                    k - 1,
                    k
                )));
            }
        }
        for (k, c) in cores.iter().enumerate() {
            if c.iter().any(|x| !x.is_finite()) {
                return Err(TtError::NonFinite(format!("operator core {k}")));
            }
        }
        Ok(Self { cores })
    }

    pub(crate) fn from_parts(cores: Vec<Array4<f64>>) -> Self {
        debug_assert!(!cores.is_empty());
        Self { cores }
    }

    pub fn cores(&self) -> &[Array4<f64>] {
        &self.cores
    }

    pub fn ndim(&self) -> usize {
        self.cores.len()
    }

    /// Output (row) mode sizes.
    pub fn rows(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().1).collect()
    }

    /// Input (column) mode sizes.
    pub fn cols(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().2).collect()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.cores[..self.cores.len() - 1]
            .iter()
            .map(|c| c.dim().3)
            .collect()
    }

    pub fn max_rank(&self) -> usize {
        self.ranks().into_iter().max().unwrap_or(1)
    }

    /// Identity operator on the given square mode sizes; every rank is 1.
    pub fn identity(modes: &[usize]) -> Self {
        let cores = modes
            .iter()
            .map(|&n| {
                let mut c = Array4::zeros((1, n, n, 1));
                for i in 0..n {
                    c[(0, i, i, 0)] = 1.0;
                }
                c
            })
            .collect();
        Self::from_parts(cores)
    }

    /// Single-mode operator holding a dense matrix.
    pub fn from_matrix(m: &Array2<f64>) -> Result<Self, TtError> {
        let (rows, cols) = m.dim();
        let mut core = Array4::zeros((1, rows, cols, 1));
        for i in 0..rows {
            for j in 0..cols {
                core[(0, i, j, 0)] = m[(i, j)];
            }
        }
        Self::new(vec![core])
    }

    /// Diagonal operator whose diagonal is the given TT vector; exact and
    /// rank-preserving.
    pub fn diag(v: &TtVector) -> Self {
        let cores = v
            .cores()
            .iter()
            .map(|c| {
                let (r, n, rr) = c.dim();
                let mut out = Array4::zeros((r, n, n, rr));
                for a in 0..r {
                    for i in 0..n {
                        for b in 0..rr {
                            out[(a, i, i, b)] = c[(a, i, b)];
                        }
                    }
                }
                out
            })
            .collect();
        Self::from_parts(cores)
    }

    /// Reversible view of the operator as a TT vector with merged `(n, m)`
    /// modes; addition, rounding, scaling, and norms reuse vector algebra.
    fn as_vector(&self) -> TtVector {
        let cores = self
            .cores
            .iter()
            .map(|c| {
                let (r, n, m, rr) = c.dim();
                c.view()
                    .into_shape_with_order((r, n * m, rr))
                    .expect("contiguous core")
                    .to_owned()
            })
            .collect();
        TtVector::from_parts(cores)
    }

    fn from_vector(v: TtVector, rows: &[usize], cols: &[usize]) -> Self {
        let cores = v
            .cores()
            .iter()
            .zip(rows.iter().zip(cols))
            .map(|(c, (&n, &m))| {
                let (r, nm, rr) = c.dim();
                debug_assert_eq!(nm, n * m);
                c.view()
                    .into_shape_with_order((r, n, m, rr))
                    .expect("contiguous core")
                    .to_owned()
            })
            .collect();
        Self::from_parts(cores)
    }

    /// Exact sum (block-diagonal cores, ranks add).
    pub fn add(&self, other: &TtOperator) -> Result<Self, TtError> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(TtError::ShapeMismatch(format!(
                "operator shapes ({:?} x {:?}) vs ({:?} x {:?})",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        let sum = self.as_vector().add(&other.as_vector())?;
        Ok(Self::from_vector(sum, &self.rows(), &self.cols()))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_vector(self.as_vector().scale(factor), &self.rows(), &self.cols())
    }

    /// TT-rounding in the merged-mode view; the Frobenius contract of
    /// [`TtVector::round`] carries over.
    pub fn round(&self, policy: &TruncationPolicy) -> Result<Self, TtError> {
        let rounded = self.as_vector().round(policy)?;
        Ok(Self::from_vector(rounded, &self.rows(), &self.cols()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.as_vector().norm()
    }

    /// Kronecker product: mode lists concatenate with a rank-1 joining bond.
    pub fn kron(&self, other: &TtOperator) -> Self {
        let mut cores = self.cores.clone();
        cores.extend(other.cores.iter().cloned());
        Self::from_parts(cores)
    }

    /// Exact operator-by-vector product; output ranks are products of input
    /// ranks. Callers round afterwards.
    pub fn apply(&self, v: &TtVector) -> Result<TtVector, TtError> {
        if self.cols() != v.modes() {
            return Err(TtError::ShapeMismatch(format!(
                "operator cols {:?} vs vector modes {:?}",
                self.cols(),
                v.modes()
            )));
        }
        let mut cores = Vec::with_capacity(self.cores.len());
        for (a, x) in self.cores.iter().zip(v.cores()) {
            let (ra, n, m, rra) = a.dim();
            let (rx, _, rrx) = x.dim();
            // t[(a, n, a'), (x, x')] = sum_m A[a, n, m, a'] X[x, m, x']
            let a_perm = a
                .view()
                .permuted_axes([0, 1, 3, 2])
                .as_standard_layout()
                .into_owned()
                .into_shape_with_order((ra * n * rra, m))
                .expect("permuted core");
            let x_mat = x
                .view()
                .permuted_axes([1, 0, 2])
                .as_standard_layout()
                .into_owned()
                .into_shape_with_order((m, rx * rrx))
                .expect("permuted core");
            let t = a_perm.dot(&x_mat); // (ra*n*rra, rx*rrx)
            let t5 = t
                .into_shape_with_order((ra, n, rra, rx, rrx))
                .expect("regroup");
            let out = t5
                .permuted_axes([0, 3, 1, 2, 4])
                .as_standard_layout()
                .into_owned()
                .into_shape_with_order((ra * rx, n, rra * rrx))
                .expect("result core");
            cores.push(out);
        }
        Ok(TtVector::from_parts(cores))
    }

    /// Operator product `self * other` (apply `other` first) followed by
    /// rounding at the policy.
    pub fn compose(&self, other: &TtOperator, policy: &TruncationPolicy) -> Result<Self, TtError> {
        let product = self.compose_exact(other)?;
        product.round(policy)
    }

    /// Operator product without rounding; ranks multiply.
    pub fn compose_exact(&self, other: &TtOperator) -> Result<Self, TtError> {
        if self.cols() != other.rows() {
            return Err(TtError::ShapeMismatch(format!(
                "inner modes {:?} vs {:?}",
                self.cols(),
                other.rows()
            )));
        }
        let mut cores = Vec::with_capacity(self.cores.len());
        for (a, b) in self.cores.iter().zip(&other.cores) {
            let (ra, n, m, rra) = a.dim();
            let (rb, _, k, rrb) = b.dim();
            let a_perm = a
                .view()
                .permuted_axes([0, 1, 3, 2])
                .as_standard_layout()
                .into_owned()
                .into_shape_with_order((ra * n * rra, m))
                .expect("permuted core");
            let b_perm = b
                .view()
                .permuted_axes([1, 0, 2, 3])
                .as_standard_layout()
                .into_owned()
                .into_shape_with_order((m, rb * k * rrb))
                .expect("permuted core");
            let t = a_perm.dot(&b_perm);
            let t6 = t
                .into_shape_with_order((ra, n, rra, rb, k, rrb))
                .expect("regroup");
            let out = t6
                .permuted_axes([0, 3, 1, 4, 2, 5])
                .as_standard_layout()
                .into_owned()
                .into_shape_with_order((ra * rb, n, k, rra * rrb))
                .expect("result core");
            cores.push(out);
        }
        Ok(Self::from_parts(cores))
    }

    /// Materialize as a dense matrix with row-major multi-indices on both
    /// sides. Only legal below the densification cap.
    pub fn to_dense_matrix(&self) -> Result<Array2<f64>, TtError> {
        let nrows: usize = self.rows().iter().product();
        let ncols: usize = self.cols().iter().product();
        let size = nrows.saturating_mul(ncols);
        if size > DENSE_CAP {
            return Err(TtError::DenseCap { size, cap: DENSE_CAP });
        }
        // acc[(I, J), a]: row block I, column block J, rank a
        let mut acc = Array2::from_elem((1, 1), 1.0);
        let mut prows = 1usize;
        let mut pcols = 1usize;
        for core in &self.cores {
            let (r, n, m, rr) = core.dim();
            let core_m = core
                .view()
                .into_shape_with_order((r, n * m * rr))
                .expect("contiguous core");
            let t = acc.dot(&core_m); // (prows*pcols, n*m*rr)
            let t5 = t
                .into_shape_with_order((prows, pcols, n, m, rr))
                .expect("regroup");
            let t5 = t5.permuted_axes([0, 2, 1, 3, 4]);
            acc = t5
                .as_standard_layout()
                .into_owned()
                .into_shape_with_order((prows * n * pcols * m, rr))
                .expect("flatten");
            prows *= n;
            pcols *= m;
        }
        let flat = acc.into_raw_vec_and_offset().0;
        Ok(Array2::from_shape_vec((prows, pcols), flat).expect("final matrix"))
    }

    /// Reshape every square mode of size `2^L` (common `L`) into `L` modes of
    /// size 2x2, pairing row and column bits of equal significance,
    /// little-endian within each physical dimension. Exact.
    pub fn qtt_fold(&self) -> Result<Self, TtError> {
        let n = self.cores[0].dim().1;
        for c in &self.cores {
            if c.dim().1 != n || c.dim().2 != n {
                return Err(TtError::ShapeMismatch(
                    "fold requires equal square modes".into(),
                ));
            }
        }
        if !n.is_power_of_two() || n < 2 {
            return Err(TtError::NotPowerOfTwo(n));
        }
        let level = n.trailing_zeros() as usize;
        let mut out: Vec<Array4<f64>> = Vec::with_capacity(self.cores.len() * level);
        for core in &self.cores {
            let (r, _, _, rr) = core.dim();
            // Remap (i, j) to paired bits p_b = 2*rowbit_b + colbit_b,
            // pair 0 (least significant bits) slowest within the block.
            let total = 1usize << (2 * level);
            let mut flat = vec![0.0; r * total * rr];
            for a in 0..r {
                for i in 0..n {
                    for j in 0..n {
                        let mut off = 0usize;
                        for b in 0..level {
                            let p = 2 * ((i >> b) & 1) + ((j >> b) & 1);
                            off = off * 4 + p;
                        }
                        for c2 in 0..rr {
                            flat[(a * total + off) * rr + c2] = core[(a, i, j, c2)];
                        }
                    }
                }
            }
            // Sequential exact QR splits into cores of mode size 4.
            let mut carry = Array2::from_shape_vec((r, total * rr), flat)
                .map_err(|e| TtError::ShapeMismatch(e.to_string()))?;
            let mut rank = r;
            for _ in 0..level - 1 {
                let cols = carry.dim().1;
                let m = carry
                    .into_shape_with_order((rank * 4, cols / 4))
                    .expect("quaternary split");
                let (q, rmat) = thin_qr(&m);
                let rho = q.dim().1;
                out.push(
                    q.into_shape_with_order((rank, 2, 2, rho))
                        .expect("q row count"),
                );
                carry = rmat;
                rank = rho;
            }
            out.push(
                carry
                    .into_shape_with_order((rank, 2, 2, rr))
                    .expect("final paired core"),
            );
        }
        Ok(Self::from_parts(out))
    }

    /// Inverse of [`TtOperator::qtt_fold`]: merge each consecutive group of
    /// `level` 2x2 cores back into one `2^level x 2^level` core. Exact.
    pub fn qtt_unfold(&self, level: usize) -> Result<Self, TtError> {
        if level == 0 || self.cores.len() % level != 0 {
            return Err(TtError::ShapeMismatch(format!(
                "{} paired modes cannot be grouped by {}",
                self.cores.len(),
                level
            )));
        }
        if self.cores.iter().any(|c| c.dim().1 != 2 || c.dim().2 != 2) {
            return Err(TtError::ShapeMismatch("unfold expects 2x2 modes".into()));
        }
        let n = 1usize << level;
        let mut cores = Vec::with_capacity(self.cores.len() / level);
        for group in self.cores.chunks(level) {
            let r = group[0].dim().0;
            let mut acc = group[0]
                .view()
                .into_shape_with_order((r * 4, group[0].dim().3))
                .expect("contiguous core")
                .to_owned();
            for c in &group[1..] {
                let (rc, _, _, rrc) = c.dim();
                let c_m = c
                    .view()
                    .into_shape_with_order((rc, 4 * rrc))
                    .expect("contiguous core");
                let rows = acc.dim().0;
                acc = acc
                    .dot(&c_m)
                    .into_shape_with_order((rows * 4, rrc))
                    .expect("regroup");
            }
            let rr = acc.dim().1;
            let flat = acc.into_raw_vec_and_offset().0;
            let total = 1usize << (2 * level);
            let mut merged = Array4::zeros((r, n, n, rr));
            for a in 0..r {
                for i in 0..n {
                    for j in 0..n {
                        let mut off = 0usize;
                        for b in 0..level {
                            let p = 2 * ((i >> b) & 1) + ((j >> b) & 1);
                            off = off * 4 + p;
                        }
                        for c2 in 0..rr {
                            merged[(a, i, j, c2)] = flat[(a * total + off) * rr + c2];
                        }
                    }
                }
            }
            cores.push(merged);
        }
        Ok(Self::from_parts(cores))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::DenseTensor;

    fn tridiag(n: usize, lo: f64, mid: f64, hi: f64) -> Array2<f64> {
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            m[(i, i)] = mid;
            if i > 0 {
                m[(i, i - 1)] = lo;
            }
            if i + 1 < n {
                m[(i, i + 1)] = hi;
            }
        }
        m
    }

    #[test]
    fn identity_applies_as_noop() {
        let v = TtVector::from_dense(
            &DenseTensor::from_fn(vec![3, 4], |ix| (ix[0] * 4 + ix[1]) as f64).unwrap(),
            &TruncationPolicy::exact(),
        )
        .unwrap();
        let id = TtOperator::identity(&[3, 4]);
        let w = id.apply(&v).unwrap();
        let diff = v
            .to_dense()
            .unwrap()
            .max_abs_diff(&w.to_dense().unwrap())
            .unwrap();
        assert!(diff < 1e-14);
    }

    #[test]
    fn second_difference_stencil_on_ones() {
        let n = 6;
        let dx2 = 0.25;
        let stencil = tridiag(n, 1.0, -2.0, 1.0).mapv(|x| x / dx2);
        let op = TtOperator::from_matrix(&stencil).unwrap();
        let ones = TtVector::ones(&[n]);
        let out = op.apply(&ones).unwrap().to_dense().unwrap();
        // zero-Dirichlet ends see the truncated stencil
        assert!((out.get(&[0]) + 1.0 / dx2).abs() < 1e-14);
        assert!((out.get(&[n - 1]) + 1.0 / dx2).abs() < 1e-14);
        for i in 1..n - 1 {
            assert!(out.get(&[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn compose_with_identity() {
        let m = tridiag(4, -1.0, 0.0, 1.0);
        let b = TtOperator::from_matrix(&m).unwrap();
        let id = TtOperator::identity(&[4]);
        let c = id.compose(&b, &TruncationPolicy::tol(1e-14)).unwrap();
        let dense = c.to_dense_matrix().unwrap();
        for (x, y) in dense.iter().zip(m.iter()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn compose_matches_dense_matmul() {
        let m = tridiag(8, 1.0, -2.0, 1.0);
        let op = TtOperator::from_matrix(&m).unwrap().qtt_fold().unwrap();
        let sq = op.compose(&op, &TruncationPolicy::tol(1e-13)).unwrap();
        let dense = sq.qtt_unfold(3).unwrap().to_dense_matrix().unwrap();
        let want = m.dot(&m);
        let scale = want.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for (x, y) in dense.iter().zip(want.iter()) {
            assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn fold_preserves_matrix() {
        let m = tridiag(16, 1.0, -2.0, 1.0);
        let op = TtOperator::from_matrix(&m).unwrap();
        let folded = op.qtt_fold().unwrap();
        assert_eq!(folded.rows(), vec![2; 4]);
        let back = folded.qtt_unfold(4).unwrap().to_dense_matrix().unwrap();
        for (x, y) in back.iter().zip(m.iter()) {
            assert!((x - y).abs() < 1e-13);
        }
        // second difference has small QTT rank once rounded
        let rounded = folded.round(&TruncationPolicy::tol(1e-12)).unwrap();
        assert!(rounded.max_rank() <= 5, "ranks {:?}", rounded.ranks());
    }

    #[test]
    fn diag_reconstructs_diagonal() {
        let v = TtVector::from_dense(
            &DenseTensor::from_fn(vec![2, 2], |ix| 1.0 + (ix[0] * 2 + ix[1]) as f64).unwrap(),
            &TruncationPolicy::exact(),
        )
        .unwrap();
        let d = TtOperator::diag(&v).to_dense_matrix().unwrap();
        let vals = v.to_dense().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { vals.data()[i] } else { 0.0 };
                assert!((d[(i, j)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kron_concatenates_ranks() {
        let a = TtOperator::from_matrix(&tridiag(2, 0.0, 1.0, 0.0)).unwrap();
        let b = TtOperator::from_matrix(&tridiag(3, 1.0, -2.0, 1.0)).unwrap();
        let k = a.kron(&b);
        assert_eq!(k.rows(), vec![2, 3]);
        assert_eq!(k.ranks(), vec![1]);
    }
}
