//! Polynomial-kernel engine.
//!
//! `φ(t - f) = Σ_k b_k (t - f)^{2k}` expands binomially in `t`, so the
//! filter needs the spatial averages of the moment images `f^m` for
//! `m = 1 .. 2K-1` (the zeroth moment averages to 1). Samples are divided by
//! the plane's peak magnitude first so the moments stay in `[-1, 1]`.

use super::{FilterStats, ETA_GUARD};
use crate::kernel::PolyKernel;
use crate::spatial::SpatialSpec;

pub(super) fn filter_plane(
    plane: &[f64],
    width: usize,
    height: usize,
    spatial: &SpatialSpec,
    kernel: &PolyKernel,
) -> (Vec<f64>, FilterStats) {
    let terms = kernel.terms();
    let max_moment = 2 * terms - 1;
    let peak = plane.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { peak } else { 1.0 };
    let u: Vec<f64> = plane.iter().map(|v| v / scale).collect();

    // b_k in normalized units: b_k * scale^{2k}
    let mut b = Vec::with_capacity(terms);
    let mut s2k = 1.0;
    for &bk in kernel.coeffs_even() {
        b.push(bk * s2k);
        s2k *= scale * scale;
    }

    // moments[m] = average of u^m; moments[0] is the constant 1
    let mut moments: Vec<Vec<f64>> = Vec::with_capacity(max_moment + 1);
    moments.push(Vec::new());
    let mut power = u.clone();
    for m in 1..=max_moment {
        if m > 1 {
            power.iter_mut().zip(&u).for_each(|(p, x)| *p *= x);
        }
        moments.push(spatial.filter_plane(&power, width, height));
    }
    let moment = |m: usize, i: usize| if m == 0 { 1.0 } else { moments[m][i] };

    let binom = binomial_rows(2 * terms);
    let mut guard_hits = 0;
    let out = (0..plane.len())
        .map(|i| {
            let neg_u = -u[i];
            let mut num = 0.0;
            let mut den = 0.0;
            for (k, bk) in b.iter().enumerate() {
                let deg = 2 * k;
                // Σ_j C(deg, j) t^j (-u)^{deg-j}
                let mut pw = 1.0;
                let mut n_k = 0.0;
                let mut d_k = 0.0;
                for j in (0..=deg).rev() {
                    let c = binom[deg][j] * pw;
                    d_k += c * moment(j, i);
                    n_k += c * moment(j + 1, i);
                    pw *= neg_u;
                }
                num += bk * n_k;
                den += bk * d_k;
            }
            if den < ETA_GUARD {
                guard_hits += 1;
                plane[i]
            } else {
                scale * num / den
            }
        })
        .collect();

    (
        out,
        FilterStats {
            spatial_passes: max_moment,
            guard_hits,
        },
    )
}

fn binomial_rows(max: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0]];
    for n in 1..=max {
        let prev = &rows[n - 1];
        let mut row = vec![1.0; n + 1];
        for j in 1..n {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows
}
