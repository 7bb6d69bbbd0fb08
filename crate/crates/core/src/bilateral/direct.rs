use rayon::prelude::*;

use super::{FilterStats, ETA_GUARD};
use crate::spatial::mirror_index;

/// Largest sample spread for which range weights are tabulated.
const TABLE_SPREAD: f64 = 65536.0;

/// Range weights for integer differences, when every sample is an integer.
///
/// `table[d + spread]` is `range_fn(d)` evaluated at exactly the same
/// argument the untabulated loop would use, so results are bit-identical.
fn range_table(plane: &[f64], range_fn: &(dyn Fn(f64) -> f64 + Sync)) -> Option<(Vec<f64>, i64)> {
    let (lo, hi) = plane
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo > TABLE_SPREAD || plane.iter().any(|v| v.fract() != 0.0) {
        return None;
    }
    let spread = (hi - lo) as i64;
    Some((
        (-spread..=spread).map(|d| range_fn(d as f64)).collect(),
        spread,
    ))
}

pub(super) fn filter_plane(
    plane: &[f64],
    width: usize,
    height: usize,
    taps: &[f64],
    range_fn: &(dyn Fn(f64) -> f64 + Sync),
) -> (Vec<f64>, FilterStats) {
    let r = (taps.len() / 2) as isize;
    let cols: Vec<usize> = (-r..width as isize + r).map(|i| mirror_index(i, width)).collect();
    let rows: Vec<usize> = (-r..height as isize + r).map(|i| mirror_index(i, height)).collect();
    let table = range_table(plane, range_fn);

    let mut out = vec![0.0; plane.len()];
    let guard_hits: usize = out
        .par_chunks_mut(width)
        .enumerate()
        .map(|(y, out_row)| {
            let mut hits = 0;
            for (x, out) in out_row.iter_mut().enumerate() {
                let center = plane[y * width + x];
                let mut num = 0.0;
                let mut eta = 0.0;
                for (ty, wy) in taps.iter().enumerate() {
                    let src_row = &plane[rows[y + ty] * width..][..width];
                    for (tx, wx) in taps.iter().enumerate() {
                        let v = src_row[cols[x + tx]];
                        let phi = match &table {
                            Some((t, spread)) => t[((v - center) as i64 + spread) as usize],
                            None => range_fn(v - center),
                        };
                        let w = wy * wx * phi;
                        num += w * v;
                        eta += w;
                    }
                }
                if eta < ETA_GUARD {
                    *out = center;
                    hits += 1;
                } else {
                    *out = num / eta;
                }
            }
            hits
        })
        .sum();

    (
        out,
        FilterStats {
            spatial_passes: 0,
            guard_hits,
        },
    )
}
