//! Factorization kernels for TT sweeps: thin SVD/QR/LQ on row-major
//! unfoldings, with deterministic ordering and sign conventions so repeated
//! runs produce bit-identical cores.

use nalgebra::DMatrix;
use ndarray::Array2;

use super::TtError;

pub(crate) struct ThinSvd {
    pub u: Array2<f64>,
    pub s: Vec<f64>,
    pub vt: Array2<f64>,
}

fn to_dmatrix(a: &Array2<f64>) -> DMatrix<f64> {
    let (m, n) = a.dim();
    DMatrix::from_row_iterator(m, n, a.iter().copied())
}

fn from_dmatrix(m: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Thin SVD with singular values sorted descending and the first nonzero
/// entry of each left singular vector made positive.
pub(crate) fn thin_svd(a: &Array2<f64>) -> Result<ThinSvd, TtError> {
    let (rows, cols) = a.dim();
    let k = rows.min(cols);
    let svd = nalgebra::linalg::SVD::try_new(to_dmatrix(a), true, true, f64::EPSILON, 0)
        .ok_or(TtError::SvdFailure { rows, cols })?;
    let u_full = svd.u.expect("requested U");
    let vt_full = svd.v_t.expect("requested V^T");
    let s_full = svd.singular_values;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        s_full[j]
            .partial_cmp(&s_full[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let mut u = Array2::zeros((rows, k));
    let mut vt = Array2::zeros((k, cols));
    let mut s = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        if !s_full[src].is_finite() {
            return Err(TtError::SvdFailure { rows, cols });
        }
        s.push(s_full[src]);
        let flip = u_full
            .column(src)
            .iter()
            .find(|&&x| x != 0.0)
            .map_or(false, |&x| x < 0.0);
        let sign = if flip { -1.0 } else { 1.0 };
        for i in 0..rows {
            u[(i, dst)] = sign * u_full[(i, src)];
        }
        for j in 0..cols {
            vt[(dst, j)] = sign * vt_full[(src, j)];
        }
    }
    Ok(ThinSvd { u, s, vt })
}

/// Thin QR: `a = q.dot(r)` with `q` of shape (m, min(m, n)).
pub(crate) fn thin_qr(a: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let (m, n) = a.dim();
    let k = m.min(n);
    let qr = to_dmatrix(a).qr();
    let q = from_dmatrix(&qr.q());
    let r_full = from_dmatrix(&qr.r());
    debug_assert_eq!(q.dim(), (m, k));
    debug_assert_eq!(r_full.dim(), (k, n));
    (q, r_full)
}

/// Thin LQ: `a = l.dot(q)` with `q` of shape (min(m, n), n) having
/// orthonormal rows. Computed as the QR of the transpose.
pub(crate) fn thin_lq(a: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let at = a.t().to_owned();
    let (qt, rt) = thin_qr(&at);
    (rt.t().to_owned(), qt.t().to_owned())
}

/// Smallest kept rank whose discarded tail satisfies
/// `sum_{i >= k} s[i]^2 <= budget^2`, never below 1.
///
/// With `budget = 0` only exact zeros are discarded.
pub(crate) fn truncation_rank(s: &[f64], budget: f64) -> usize {
    let budget_sq = budget * budget;
    let mut tail = 0.0;
    let mut rank = s.len();
    while rank > 1 {
        let sigma = s[rank - 1];
        let next_tail = tail + sigma * sigma;
        if next_tail > budget_sq || (budget == 0.0 && sigma != 0.0) {
            break;
        }
        tail = next_tail;
        rank -= 1;
    }
    rank
}
