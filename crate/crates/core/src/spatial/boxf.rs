use super::{mirror_index, LineFilter};

/// Running box average along one line of fixed length.
///
/// The mirror extension is periodic with period `P = 2(n-1)`, so the
/// cumulative sum of the extended line at any position `k` is
/// `floor(k/P) * total + prefix[k mod P]`. A window sum is then two lookups,
/// whatever the radius.
pub(crate) struct BoxLine {
    radius: usize,
    len: usize,
}

impl BoxLine {
    pub(crate) fn new(radius: usize, len: usize) -> Self {
        Self { radius, len }
    }
}

impl LineFilter for BoxLine {
    fn filter_line(&self, src: &[f64], dst: &mut [f64], prefix: &mut Vec<f64>) {
        let n = self.len;
        debug_assert_eq!(src.len(), n);
        if n == 1 || self.radius == 0 {
            dst.copy_from_slice(src);
            return;
        }
        let period = 2 * (n - 1);
        prefix.clear();
        prefix.push(0.0);
        let mut acc = 0.0;
        for j in 0..period {
            acc += src[mirror_index(j as isize, n)];
            prefix.push(acc);
        }
        let total = acc;
        let p = period as isize;
        let cumulative = |k: isize| k.div_euclid(p) as f64 * total + prefix[k.rem_euclid(p) as usize];

        let r = self.radius as isize;
        let norm = 1.0 / (2 * self.radius + 1) as f64;
        for (x, out) in dst.iter_mut().enumerate() {
            let x = x as isize;
            *out = (cumulative(x + r + 1) - cumulative(x - r)) * norm;
        }
    }
}
