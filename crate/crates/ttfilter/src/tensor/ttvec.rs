use ndarray::{Array2, Array3};

use super::dense::DenseTensor;
use super::linalg::{thin_lq, thin_qr, thin_svd, truncation_rank};
use super::{TruncationPolicy, TtError, DENSE_CAP};

/// A grid function in tensor-train format: a chain of 3-way cores with
/// shapes `(r_{k-1}, n_k, r_k)` and boundary ranks `r_0 = r_d = 1`.
#[derive(Debug, Clone)]
pub struct TtVector {
    cores: Vec<Array3<f64>>,
}

impl TtVector {
    /// Build from cores, validating the rank chain, boundary ranks, and
    /// finiteness of every entry.
    pub fn new(cores: Vec<Array3<f64>>) -> Result<Self, TtError> {
        if cores.is_empty() {
            return Err(TtError::Empty);
        }
        if cores[0].dim().0 != 1 || cores[cores.len() - 1].dim().2 != 1 {
            return Err(TtError::ShapeMismatch("boundary ranks must be 1".into()));
        }
        for k in 1..cores.len() {
            if cores[k - 1].dim().2 != cores[k].dim().0 {
                return Err(TtError::ShapeMismatch(format!(
                    "rank mismatch between cores {} and {}: {} vs {}",
                    k - 1,
                    k,
                    cores[k - 1].dim().2,
                    cores[k].dim().0
                )));
            }
        }
        for (k, c) in cores.iter().enumerate() {
            if c.dim().1 == 0 {
                return Err(TtError::Empty);
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(TtError::NonFinite(format!("core {k}")));
            }
        }
        Ok(Self { cores })
    }

    pub(crate) fn from_parts(cores: Vec<Array3<f64>>) -> Self {
        debug_assert!(!cores.is_empty());
        debug_assert_eq!(cores[0].dim().0, 1);
        debug_assert_eq!(cores[cores.len() - 1].dim().2, 1);
        Self { cores }
    }

    pub fn cores(&self) -> &[Array3<f64>] {
        &self.cores
    }

    pub fn ndim(&self) -> usize {
        self.cores.len()
    }

    pub fn modes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().1).collect()
    }

    /// Interior bond ranks `(r_1, ..., r_{d-1})`.
    pub fn ranks(&self) -> Vec<usize> {
        self.cores[..self.cores.len() - 1]
            .iter()
            .map(|c| c.dim().2)
            .collect()
    }

    pub fn max_rank(&self) -> usize {
        self.ranks().into_iter().max().unwrap_or(1)
    }

    pub fn num_entries(&self) -> usize {
        self.modes().iter().product()
    }

    /// All-ones tensor with the given mode sizes; every rank is 1.
    pub fn ones(modes: &[usize]) -> Self {
        Self::from_parts(
            modes
                .iter()
                .map(|&n| Array3::from_elem((1, n, 1), 1.0))
                .collect(),
        )
    }

    /// Single-mode tensor holding a 1-D grid function.
    pub fn from_vec(values: Vec<f64>) -> Result<Self, TtError> {
        let n = values.len();
        let core = Array3::from_shape_vec((1, n, 1), values)
            .map_err(|e| TtError::ShapeMismatch(e.to_string()))?;
        Self::new(vec![core])
    }

    /// TT-SVD compression of a dense tensor.
    ///
    /// The relative error budget is split as `tol/sqrt(d-1)` per unfolding so
    /// the end-to-end reconstruction error stays below `tol * ||a||_F`.
    pub fn from_dense(a: &DenseTensor, policy: &TruncationPolicy) -> Result<Self, TtError> {
        let shape = a.shape().to_vec();
        let d = shape.len();
        let norm = a.frobenius_norm();
        let budget = if d > 1 {
            policy.tol * norm / ((d - 1) as f64).sqrt()
        } else {
            0.0
        };

        let mut cores = Vec::with_capacity(d);
        let mut rank = 1usize;
        let mut carry: Vec<f64> = a.data().to_vec();
        for k in 0..d - 1 {
            let n_k = shape[k];
            let rest: usize = shape[k + 1..].iter().product();
            let m = Array2::from_shape_vec((rank * n_k, rest), carry)
                .map_err(|e| TtError::ShapeMismatch(e.to_string()))?;
            let svd = thin_svd(&m)?;
            let keep = policy.check_rank(k, truncation_rank(&svd.s, budget))?;
            let core = svd
                .u
                .slice(ndarray::s![.., ..keep])
                .to_owned()
                .into_shape_with_order((rank, n_k, keep))
                .expect("u slice size");
            cores.push(core);
            let mut next = svd.vt.slice(ndarray::s![..keep, ..]).to_owned();
            for (i, mut row) in next.rows_mut().into_iter().enumerate() {
                row.mapv_inplace(|x| x * svd.s[i]);
            }
            rank = keep;
            carry = next.into_raw_vec_and_offset().0;
        }
        let last = Array3::from_shape_vec((rank, shape[d - 1], 1), carry)
            .map_err(|e| TtError::ShapeMismatch(e.to_string()))?;
        cores.push(last);
        Ok(Self::from_parts(cores))
    }

    /// Contract all cores into a dense tensor. Only legal below the
    /// densification cap.
    pub fn to_dense(&self) -> Result<DenseTensor, TtError> {
        let size = self.num_entries();
        if size > DENSE_CAP {
            return Err(TtError::DenseCap { size, cap: DENSE_CAP });
        }
        let mut acc = Array2::from_elem((1, 1), 1.0);
        for core in &self.cores {
            let (r, n, rr) = core.dim();
            let core_m = core
                .view()
                .into_shape_with_order((r, n * rr))
                .expect("contiguous core");
            let prod = acc.dot(&core_m); // (rows, n*rr)
            let rows = prod.dim().0;
            acc = prod
                .into_shape_with_order((rows * n, rr))
                .expect("row-major regroup");
        }
        debug_assert_eq!(acc.dim().1, 1);
        DenseTensor::new(self.modes(), acc.into_raw_vec_and_offset().0)
    }

    /// TT-rounding: right-to-left orthogonalization followed by a
    /// left-to-right truncated SVD sweep.
    ///
    /// Guarantees `||self - result||_F <= tol * ||self||_F`; ranks never
    /// increase and must stay within the policy's cap.
    pub fn round(&self, policy: &TruncationPolicy) -> Result<Self, TtError> {
        let d = self.cores.len();
        if d == 1 {
            return Ok(self.clone());
        }
        let mut cores = self.cores.clone();

        // Right-to-left LQ sweep: leave cores 1..d with orthonormal rows.
        for k in (1..d).rev() {
            let (r, n, rr) = cores[k].dim();
            let m = cores[k]
                .view()
                .into_shape_with_order((r, n * rr))
                .expect("contiguous core")
                .to_owned();
            let (l, q) = thin_lq(&m);
            let rho = q.dim().0;
            cores[k] = q
                .into_shape_with_order((rho, n, rr))
                .expect("lq row count");
            let (rp, np, _) = cores[k - 1].dim();
            let prev = cores[k - 1]
                .view()
                .into_shape_with_order((rp * np, r))
                .expect("contiguous core")
                .to_owned();
            cores[k - 1] = prev
                .dot(&l)
                .into_shape_with_order((rp, np, rho))
                .expect("absorb shape");
        }

        let norm = cores[0].iter().map(|x| x * x).sum::<f64>().sqrt();
        let budget = policy.tol * norm / ((d - 1) as f64).sqrt();

        // Left-to-right truncated SVD sweep.
        let mut rank = 1usize;
        for k in 0..d - 1 {
            let (_, n, rr) = cores[k].dim();
            let m = cores[k]
                .view()
                .into_shape_with_order((rank * n, rr))
                .expect("contiguous core")
                .to_owned();
            let svd = thin_svd(&m)?;
            let keep = policy.check_rank(k, truncation_rank(&svd.s, budget))?;
            cores[k] = svd
                .u
                .slice(ndarray::s![.., ..keep])
                .to_owned()
                .into_shape_with_order((rank, n, keep))
                .expect("u slice size");
            let mut sv = svd.vt.slice(ndarray::s![..keep, ..]).to_owned();
            for (i, mut row) in sv.rows_mut().into_iter().enumerate() {
                row.mapv_inplace(|x| x * svd.s[i]);
            }
            let (_, n_next, rr_next) = cores[k + 1].dim();
            let next = cores[k + 1]
                .view()
                .into_shape_with_order((rr, n_next * rr_next))
                .expect("contiguous core")
                .to_owned();
            cores[k + 1] = sv
                .dot(&next)
                .into_shape_with_order((keep, n_next, rr_next))
                .expect("carry shape");
            rank = keep;
        }
        Ok(Self::from_parts(cores))
    }

    /// Exact sum via block-diagonal cores; output ranks are the sums of the
    /// input ranks, no truncation.
    pub fn add(&self, other: &TtVector) -> Result<Self, TtError> {
        if self.modes() != other.modes() {
            return Err(TtError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.modes(),
                other.modes()
            )));
        }
        let d = self.cores.len();
        if d == 1 {
            return Ok(Self::from_parts(vec![&self.cores[0] + &other.cores[0]]));
        }
        let mut cores = Vec::with_capacity(d);
        for k in 0..d {
            let a = &self.cores[k];
            let b = &other.cores[k];
            let (ra, n, rra) = a.dim();
            let (rb, _, rrb) = b.dim();
            let (rl, rr) = if k == 0 {
                (1, rra + rrb)
            } else if k == d - 1 {
                (ra + rb, 1)
            } else {
                (ra + rb, rra + rrb)
            };
            let mut c = Array3::zeros((rl, n, rr));
            let (off_l, off_r) = if k == 0 { (0, rra) } else { (ra, rra) };
            for i in 0..ra.min(rl) {
                for j in 0..n {
                    for l in 0..rra.min(rr) {
                        c[(i, j, l)] = a[(i, j, l)];
                    }
                }
            }
            for i in 0..rb {
                for j in 0..n {
                    for l in 0..rrb {
                        let row = if k == 0 { 0 } else { off_l + i };
                        let col = if k == d - 1 { 0 } else { off_r + l };
                        c[(row, j, col)] = b[(i, j, l)];
                    }
                }
            }
            cores.push(c);
        }
        Ok(Self::from_parts(cores))
    }

    /// Exact elementwise product; output ranks are the products of the input
    /// ranks.
    pub fn hadamard(&self, other: &TtVector) -> Result<Self, TtError> {
        if self.modes() != other.modes() {
            return Err(TtError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.modes(),
                other.modes()
            )));
        }
        let mut cores = Vec::with_capacity(self.cores.len());
        for (a, b) in self.cores.iter().zip(&other.cores) {
            let (ra, n, rra) = a.dim();
            let (rb, _, rrb) = b.dim();
            let mut c = Array3::zeros((ra * rb, n, rra * rrb));
            for i in 0..n {
                for p in 0..ra {
                    for q in 0..rb {
                        for s in 0..rra {
                            let av = a[(p, i, s)];
                            if av == 0.0 {
                                continue;
                            }
                            for t in 0..rrb {
                                c[(p * rb + q, i, s * rrb + t)] = av * b[(q, i, t)];
                            }
                        }
                    }
                }
            }
            cores.push(c);
        }
        Ok(Self::from_parts(cores))
    }

    /// Euclidean inner product of the reconstructions, contracted core by
    /// core without densification.
    pub fn dot(&self, other: &TtVector) -> Result<f64, TtError> {
        if self.modes() != other.modes() {
            return Err(TtError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.modes(),
                other.modes()
            )));
        }
        // m has shape (r_a, r_b); start with the 1x1 identity.
        let mut m = Array2::from_elem((1, 1), 1.0);
        for (a, b) in self.cores.iter().zip(&other.cores) {
            let (ra, n, rra) = a.dim();
            let (rb, _, rrb) = b.dim();
            let a_m = a
                .view()
                .into_shape_with_order((ra, n * rra))
                .expect("contiguous core");
            // t[(b, i), a'] = sum_a m[a, b] A[a, (i, a')]
            let t = m.t().dot(&a_m); // (rb, n*rra)
            let t = t
                .into_shape_with_order((rb * n, rra))
                .expect("row-major regroup");
            let b_m = b
                .view()
                .into_shape_with_order((rb * n, rrb))
                .expect("contiguous core");
            m = t.t().dot(&b_m); // (rra, rrb)
        }
        Ok(m[(0, 0)])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).map_or(0.0, |x| x.max(0.0).sqrt())
    }

    /// Kronecker (tensor) product: modes concatenate, the joining bond has
    /// rank 1, entries are `A(i) * B(j)`. Exact.
    pub fn kron(&self, other: &TtVector) -> Self {
        let mut cores = self.cores.clone();
        cores.extend(other.cores.iter().cloned());
        Self::from_parts(cores)
    }

    /// Scale by a constant (absorbed into the first core).
    pub fn scale(&self, factor: f64) -> Self {
        let mut cores = self.cores.clone();
        cores[0].mapv_inplace(|x| x * factor);
        Self::from_parts(cores)
    }

    /// Reshape every mode of size `2^L` (common `L`) into `L` binary modes.
    ///
    /// Bit order within each physical dimension is little-endian: the first
    /// folded mode carries the least significant bit of the original grid
    /// index. The split is exact (QR based); callers round afterwards if
    /// compression is wanted.
    pub fn qtt_fold(&self) -> Result<Self, TtError> {
        let modes = self.modes();
        let n = modes[0];
        if modes.iter().any(|&m| m != n) {
            return Err(TtError::ShapeMismatch(format!(
                "fold requires equal mode sizes, got {:?}",
                modes
            )));
        }
        if !n.is_power_of_two() || n < 2 {
            return Err(TtError::NotPowerOfTwo(n));
        }
        let level = n.trailing_zeros() as usize;
        let mut cores = Vec::with_capacity(self.cores.len() * level);
        for core in &self.cores {
            split_core_binary(core, level, &mut cores)?;
        }
        Ok(Self::from_parts(cores))
    }

    /// Inverse of [`TtVector::qtt_fold`]: merge each consecutive group of
    /// `level` binary modes back into one mode of size `2^level`. Exact.
    pub fn qtt_unfold(&self, level: usize) -> Result<Self, TtError> {
        if level == 0 || self.cores.len() % level != 0 {
            return Err(TtError::ShapeMismatch(format!(
                "{} binary modes cannot be grouped by {}",
                self.cores.len(),
                level
            )));
        }
        if self.modes().iter().any(|&m| m != 2) {
            return Err(TtError::ShapeMismatch("unfold expects binary modes".into()));
        }
        let n = 1usize << level;
        let mut cores = Vec::with_capacity(self.cores.len() / level);
        for group in self.cores.chunks(level) {
            // Contract the group into (r, 2, 2, ..., 2, r'), bit axes in
            // little-endian order, then remap bits to the grid index.
            let r = group[0].dim().0;
            let mut acc = group[0]
                .view()
                .into_shape_with_order((r * 2, group[0].dim().2))
                .expect("contiguous core")
                .to_owned();
            for c in &group[1..] {
                let (rc, _, rrc) = c.dim();
                let c_m = c
                    .view()
                    .into_shape_with_order((rc, 2 * rrc))
                    .expect("contiguous core");
                let rows = acc.dim().0;
                acc = acc
                    .dot(&c_m)
                    .into_shape_with_order((rows * 2, rrc))
                    .expect("row-major regroup");
            }
            let rr = acc.dim().1;
            let flat = acc.into_raw_vec_and_offset().0;
            // flat index layout: ((a * 2 + b0) * 2 + b1) ... * rr + c
            let mut merged = Array3::zeros((r, n, rr));
            for a in 0..r {
                for idx in 0..n {
                    // recover row-major bit offset from little-endian bits of idx
                    let mut bit_off = 0usize;
                    for b in 0..level {
                        bit_off = bit_off * 2 + ((idx >> b) & 1);
                    }
                    for c in 0..rr {
                        merged[(a, idx, c)] = flat[(a * n + bit_off) * rr + c];
                    }
                }
            }
            cores.push(merged);
        }
        Ok(Self::from_parts(cores))
    }
}

/// Split one core `(r, 2^level, r')` into `level` binary cores via exact QR.
fn split_core_binary(
    core: &Array3<f64>,
    level: usize,
    out: &mut Vec<Array3<f64>>,
) -> Result<(), TtError> {
    let (r, n, rr) = core.dim();
    debug_assert_eq!(n, 1 << level);
    // Remap to row-major bit layout (b0 slowest among bit axes = LSB first).
    let mut flat = vec![0.0; r * n * rr];
    for a in 0..r {
        for idx in 0..n {
            let mut bit_off = 0usize;
            for b in 0..level {
                bit_off = bit_off * 2 + ((idx >> b) & 1);
            }
            for c in 0..rr {
                flat[(a * n + bit_off) * rr + c] = core[(a, idx, c)];
            }
        }
    }
    let mut carry = Array2::from_shape_vec((r, n * rr), flat)
        .map_err(|e| TtError::ShapeMismatch(e.to_string()))?;
    let mut rank = r;
    for _ in 0..level - 1 {
        let cols = carry.dim().1;
        let m = carry
            .into_shape_with_order((rank * 2, cols / 2))
            .expect("binary split");
        let (q, rmat) = thin_qr(&m);
        let rho = q.dim().1;
        out.push(
            q.into_shape_with_order((rank, 2, rho))
                .expect("q row count"),
        );
        carry = rmat;
        rank = rho;
    }
    out.push(
        carry
            .into_shape_with_order((rank, 2, rr))
            .expect("final binary core"),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy(tol: f64) -> TruncationPolicy {
        TruncationPolicy::tol(tol)
    }

    fn dense_from(shape: Vec<usize>, f: impl FnMut(&[usize]) -> f64) -> DenseTensor {
        DenseTensor::from_fn(shape, f).unwrap()
    }

    #[test]
    fn separable_tensor_compresses_to_rank_one() {
        let a = dense_from(vec![2, 2, 2], |_| 1.0);
        let tt = TtVector::from_dense(&a, &policy(1e-12)).unwrap();
        assert_eq!(tt.ranks(), vec![1, 1]);
        let back = tt.to_dense().unwrap();
        assert!(a.max_abs_diff(&back).unwrap() < 1e-14);
    }

    #[test]
    fn identity_matrix_has_full_tt_rank() {
        // singular values of the unfolding are all 1
        let a = dense_from(vec![4, 4], |ix| if ix[0] == ix[1] { 1.0 } else { 0.0 });
        let tt = TtVector::from_dense(&a, &policy(1e-12)).unwrap();
        assert_eq!(tt.ranks(), vec![4]);
    }

    #[test]
    fn lossless_roundtrip() {
        let a = dense_from(vec![3, 4, 2], |ix| {
            ((ix[0] * 31 + ix[1] * 7 + ix[2] * 3) as f64).sin()
        });
        let tt = TtVector::from_dense(&a, &policy(0.0)).unwrap();
        let back = tt.to_dense().unwrap();
        assert!(a.max_abs_diff(&back).unwrap() < 1e-13 * a.frobenius_norm());
    }

    #[test]
    fn zero_core_reconstructs_to_zeros() {
        let tt = TtVector::from_parts(vec![
            Array3::zeros((1, 3, 2)),
            Array3::from_elem((2, 3, 1), 1.0),
        ]);
        let d = tt.to_dense().unwrap();
        assert!(d.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rank_one_outer_product() {
        let u = vec![1.0, 2.0];
        let v = vec![3.0, -1.0, 0.5];
        let tt = TtVector::from_vec(u.clone())
            .unwrap()
            .kron(&TtVector::from_vec(v.clone()).unwrap());
        let d = tt.to_dense().unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert!((d.get(&[i, j]) - u[i] * v[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn kron_of_basis_vectors() {
        let e1 = TtVector::from_vec(vec![0.0, 1.0, 0.0]).unwrap();
        let e2 = TtVector::from_vec(vec![0.0, 0.0, 1.0]).unwrap();
        let k = e1.kron(&e2);
        assert_eq!(k.ranks(), vec![1]);
        let d = k.to_dense().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if (i, j) == (1, 2) { 1.0 } else { 0.0 };
                assert_eq!(d.get(&[i, j]), want);
            }
        }
    }

    #[test]
    fn add_sums_ranks_and_cancels() {
        let a = dense_from(vec![2, 2], |ix| (ix[0] + 2 * ix[1]) as f64 + 1.0);
        let tt = TtVector::from_dense(&a, &policy(1e-14)).unwrap();
        let sum = tt.add(&tt.scale(-1.0)).unwrap();
        assert!(sum.to_dense().unwrap().frobenius_norm() < 1e-13);

        let ones = TtVector::ones(&[2, 2, 2]);
        let two = ones.add(&ones).unwrap();
        assert_eq!(two.ranks(), vec![2, 2]);
        assert!(two.to_dense().unwrap().data().iter().all(|&x| x == 2.0));
    }

    #[test]
    fn hadamard_identities() {
        let a = dense_from(vec![2, 3, 2], |ix| (ix[0] * 5 + ix[1] * 2 + ix[2]) as f64 - 3.0);
        let tt = TtVector::from_dense(&a, &policy(1e-13)).unwrap();
        let ones = TtVector::ones(&[2, 3, 2]);
        let same = tt.hadamard(&ones).unwrap();
        assert!(a.max_abs_diff(&same.to_dense().unwrap()).unwrap() < 1e-13);
        let zero = tt.hadamard(&ones.scale(0.0)).unwrap();
        assert!(zero.to_dense().unwrap().frobenius_norm() == 0.0);
    }

    #[test]
    fn dot_matches_norms() {
        let a = dense_from(vec![2, 2, 2], |ix| (ix[0] + ix[1] * 3 + ix[2] * 7) as f64);
        let tt = TtVector::from_dense(&a, &policy(1e-14)).unwrap();
        let nrm2 = tt.dot(&tt).unwrap();
        let want: f64 = a.data().iter().map(|x| x * x).sum();
        assert!((nrm2 - want).abs() < 1e-11 * want.max(1.0));
        assert!(nrm2 >= 0.0);

        let e11 = TtVector::from_vec(vec![1.0, 0.0])
            .unwrap()
            .kron(&TtVector::from_vec(vec![1.0, 0.0]).unwrap());
        let e22 = TtVector::from_vec(vec![0.0, 1.0])
            .unwrap()
            .kron(&TtVector::from_vec(vec![0.0, 1.0]).unwrap());
        assert_eq!(e11.dot(&e22).unwrap(), 0.0);
    }

    #[test]
    fn round_recovers_inflated_rank_one() {
        let ones = TtVector::ones(&[2, 2, 2]);
        let inflated = ones.add(&ones).unwrap().add(&ones).unwrap();
        assert_eq!(inflated.ranks(), vec![3, 3]);
        let rounded = inflated.round(&policy(1e-10)).unwrap();
        assert_eq!(rounded.ranks(), vec![1, 1]);
        assert!(rounded.to_dense().unwrap().data().iter().all(|&x| (x - 3.0).abs() < 1e-12));
    }

    #[test]
    fn round_at_zero_keeps_values() {
        let a = dense_from(vec![3, 3, 3], |ix| ((ix[0] * 11 + ix[1] * 5 + ix[2]) as f64).cos());
        let tt = TtVector::from_dense(&a, &policy(0.0)).unwrap();
        let rounded = tt.round(&policy(0.0)).unwrap();
        assert!(rounded
            .ranks()
            .iter()
            .zip(tt.ranks().iter())
            .all(|(r, r0)| r <= r0));
        assert!(a.max_abs_diff(&rounded.to_dense().unwrap()).unwrap() < 1e-13 * a.frobenius_norm());
    }

    #[test]
    fn round_respects_rank_cap() {
        let a = dense_from(vec![4, 4], |ix| if ix[0] == ix[1] { 1.0 } else { 0.0 });
        let tt = TtVector::from_dense(&a, &policy(1e-14)).unwrap();
        let tight = TruncationPolicy::new(1e-14, Some(2)).unwrap();
        match tt.round(&tight) {
            Err(TtError::RankOverflow { needed, cap, .. }) => {
                assert_eq!(needed, 4);
                assert_eq!(cap, 2);
            }
            other => panic!("expected rank overflow, got {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = TtVector::ones(&[2, 2]);
        let b = TtVector::ones(&[2, 3]);
        assert!(matches!(a.add(&b), Err(TtError::ShapeMismatch(_))));
        assert!(matches!(a.hadamard(&b), Err(TtError::ShapeMismatch(_))));
        assert!(matches!(a.dot(&b), Err(TtError::ShapeMismatch(_))));
    }

    #[test]
    fn fold_linear_ramp() {
        let v = TtVector::from_vec(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let folded = v.qtt_fold().unwrap();
        assert_eq!(folded.modes(), vec![2, 2]);
        let d = folded.to_dense().unwrap();
        // little-endian bits: entry (b0, b1) holds v[b0 + 2*b1]
        for b0 in 0..2 {
            for b1 in 0..2 {
                assert!((d.get(&[b0, b1]) - (b0 + 2 * b1) as f64).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn fold_unfold_roundtrip() {
        let a = dense_from(vec![16, 16], |ix| {
            ((ix[0] * 3 + 1) as f64).sin() * ((ix[1] + 2) as f64).ln()
        });
        let tt = TtVector::from_dense(&a, &policy(0.0)).unwrap();
        let folded = tt.qtt_fold().unwrap();
        assert_eq!(folded.modes(), vec![2; 8]);
        let back = folded.qtt_unfold(4).unwrap();
        let d = back.to_dense().unwrap();
        assert!(a.max_abs_diff(&d).unwrap() < 1e-13 * a.frobenius_norm());
    }

    #[test]
    fn fold_rejects_non_power_of_two() {
        let v = TtVector::from_vec(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(v.qtt_fold(), Err(TtError::NotPowerOfTwo(3))));
    }
}
