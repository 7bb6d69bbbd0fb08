//! Fourth-order recursive Gaussian (Deriche).
//!
//! The continuous impulse response
//!
//! ```text
//! g(x) = Σ_j (a_j cos(w_j x) + b_j sin(w_j x)) e^{-l_j x},   x = |n| / σ
//! ```
//!
//! approximates `exp(-x²/2)` to about 5e-4 of its peak. Each of the two
//! damped-sinusoid terms is a second-order section
//! `y[n] = α x[n] + β x[n-1] + d1 y[n-1] + d2 y[n-2]` whose impulse response
//! is the term sampled at `n >= 0`. The two-sided response is the causal
//! section plus its time reverse minus the doubly counted `n = 0` tap.
//! Coefficients are scaled so the whole filter has unit DC gain.
//!
//! Boundaries: the mirror-extended line is even and periodic with period
//! `P = 2(n-1)`, so the anti-causal output at `i` equals the causal output at
//! `P - i`. The section state consistent with the infinite periodic input
//! solves `s = A^P s + z`, where `z` is the state reached after one period
//! from rest. The line mean is removed before filtering and added back, which
//! keeps constants exact for any sigma.
//!
//! The recursion runs down columns, [`STRIP`] columns at a time, so the
//! inner loops are independent across lanes; rows are handled by
//! transposing.

use rayon::prelude::*;

use super::transpose;

pub const MIN_RECURSIVE_SIGMA: f64 = 0.5;

/// `(a, b, w, l)` for the two terms.
const TERMS: [(f64, f64, f64, f64); 2] = [(1.68, 3.735, 0.6318, 1.783), (-0.6803, -0.2598, 1.997, 1.723)];

/// Columns processed together.
const STRIP: usize = 16;

#[derive(Debug, Clone, Copy)]
struct Section {
    alpha: f64,
    beta: f64,
    d1: f64,
    d2: f64,
}

impl Section {
    /// Unnormalized section for one term at scale `sigma`, and its two-sided
    /// DC gain.
    fn new(term: (f64, f64, f64, f64), sigma: f64) -> (Self, f64) {
        let (a, b, w, l) = term;
        let omega = w / sigma;
        let r = (-l / sigma).exp();
        let one_minus_r = -(-l / sigma).exp_m1();
        // 1 - cos ω without cancellation
        let vers = 2.0 * (0.5 * omega).sin().powi(2);
        let sec = Self {
            alpha: a,
            beta: r * (b * omega.sin() - a * omega.cos()),
            d1: 2.0 * r * omega.cos(),
            d2: -r * r,
        };
        let num = a * (one_minus_r + r * vers) + b * r * omega.sin();
        let den = one_minus_r * one_minus_r + 2.0 * r * vers;
        (sec, 2.0 * num / den - a)
    }

    fn scaled(self, k: f64) -> Self {
        Self {
            alpha: self.alpha * k,
            beta: self.beta * k,
            ..self
        }
    }

    /// `(I - A^P)^-1` for the state `(y[n-1], y[n-2])`.
    fn periodic_inverse(&self, period: usize) -> [[f64; 2]; 2] {
        let mut ap = [[0.0; 2]; 2];
        for c in 0..2 {
            let mut s = [0.0; 2];
            s[c] = 1.0;
            for _ in 0..period {
                s = [self.d1 * s[0] + self.d2 * s[1], s[0]];
            }
            ap[0][c] = s[0];
            ap[1][c] = s[1];
        }
        invert2(&[[1.0 - ap[0][0], -ap[0][1]], [-ap[1][0], 1.0 - ap[1][1]]])
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct RecursiveGaussian {
    sections: [Section; 2],
}

type Lanes = [f64; STRIP];

/// Per-lane state of one section.
#[derive(Clone, Copy)]
struct State {
    y1: Lanes,
    y2: Lanes,
}

impl State {
    const REST: State = State {
        y1: [0.0; STRIP],
        y2: [0.0; STRIP],
    };

    #[inline(always)]
    fn step(&mut self, sec: &Section, x: &Lanes, prev: &Lanes, out: &mut Lanes) {
        for c in 0..STRIP {
            let y = sec.alpha * x[c] + sec.beta * prev[c] + sec.d1 * self.y1[c] + sec.d2 * self.y2[c];
            self.y2[c] = self.y1[c];
            self.y1[c] = y;
            out[c] = y;
        }
    }

    fn solve(&mut self, inv: &[[f64; 2]; 2]) {
        for c in 0..STRIP {
            let (z1, z2) = (self.y1[c], self.y2[c]);
            self.y1[c] = inv[0][0] * z1 + inv[0][1] * z2;
            self.y2[c] = inv[1][0] * z1 + inv[1][1] * z2;
        }
    }
}

impl RecursiveGaussian {
    pub(crate) fn new(sigma: f64) -> Self {
        let (s0, g0) = Section::new(TERMS[0], sigma);
        let (s1, g1) = Section::new(TERMS[1], sigma);
        let k = 1.0 / (g0 + g1);
        Self {
            sections: [s0.scaled(k), s1.scaled(k)],
        }
    }

    /// Filters a `width x height` plane along both axes.
    pub(crate) fn filter_plane(&self, src: &[f64], width: usize, height: usize) -> Vec<f64> {
        let t = transpose(src, width, height);
        let t = self.filter_columns(&t, height, width);
        let t = transpose(&t, height, width);
        self.filter_columns(&t, width, height)
    }

    /// Filters every column of a row-major `width x height` plane.
    pub(crate) fn filter_columns(&self, src: &[f64], width: usize, height: usize) -> Vec<f64> {
        if height == 1 {
            return src.to_vec();
        }
        let period = 2 * (height - 1);
        let inv = [
            self.sections[0].periodic_inverse(period),
            self.sections[1].periodic_inverse(period),
        ];
        let strips: Vec<Vec<f64>> = (0..width.div_ceil(STRIP))
            .into_par_iter()
            .map(|k| self.strip(src, width, height, k * STRIP, &inv))
            .collect();

        let mut out = vec![0.0; src.len()];
        out.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
            for (k, strip) in strips.iter().enumerate() {
                let c0 = k * STRIP;
                let sw = STRIP.min(width - c0);
                row[c0..c0 + sw].copy_from_slice(&strip[y * STRIP..y * STRIP + sw]);
            }
        });
        out
    }

    /// One strip of up to `STRIP` columns starting at `c0`; returns
    /// `height` rows of `STRIP` lanes (unused lanes are zero).
    fn strip(&self, src: &[f64], width: usize, height: usize, c0: usize, inv: &[[[f64; 2]; 2]; 2]) -> Vec<f64> {
        let n = height;
        let period = 2 * (n - 1);
        let sw = STRIP.min(width - c0);
        let mirror = |j: usize| if j < n { j } else { period - j };
        let load = |j: usize, mean: &Lanes| {
            let row = &src[mirror(j) * width + c0..][..sw];
            let mut x = [0.0; STRIP];
            for c in 0..sw {
                x[c] = row[c] - mean[c];
            }
            x
        };

        let mut mean = [0.0; STRIP];
        for j in 0..period {
            let x = load(j, &[0.0; STRIP]);
            for c in 0..STRIP {
                mean[c] += x[c];
            }
        }
        mean.iter_mut().for_each(|m| *m /= period as f64);

        let [sa, sb] = &self.sections;
        let alpha = sa.alpha + sb.alpha;
        let mut a = State::REST;
        let mut b = State::REST;
        let (mut ya, mut yb) = ([0.0; STRIP], [0.0; STRIP]);

        let mut prev = load(period - 1, &mean);
        for j in 0..period {
            let x = load(j, &mean);
            a.step(sa, &x, &prev, &mut ya);
            b.step(sb, &x, &prev, &mut yb);
            prev = x;
        }
        a.solve(&inv[0]);
        b.solve(&inv[1]);

        let mut out = vec![0.0; n * STRIP];
        for row in out.chunks_exact_mut(STRIP) {
            row.copy_from_slice(&mean);
        }
        let mut prev = load(period - 1, &mean);
        for j in 0..period {
            let x = load(j, &mean);
            a.step(sa, &x, &prev, &mut ya);
            b.step(sb, &x, &prev, &mut yb);
            prev = x;
            // causal part lands on j, anti-causal part on P - j
            if j < n {
                let o = &mut out[j * STRIP..][..STRIP];
                for c in 0..STRIP {
                    o[c] += ya[c] + yb[c] - alpha * x[c];
                }
            }
            let i = (period - j) % period;
            if i < n {
                let o = &mut out[i * STRIP..][..STRIP];
                for c in 0..STRIP {
                    o[c] += ya[c] + yb[c];
                }
            }
        }
        out
    }
}

fn invert2(m: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_image;
    use super::super::{gaussian_fir, gaussian_recursive, mirror_index, Boundary};
    use super::*;
    use crate::image::{error_stats, Image};

    /// Two-sided response built straight from the closed form.
    fn closed_form(sigma: f64, k: i64) -> f64 {
        let x = k.unsigned_abs() as f64 / sigma;
        TERMS
            .iter()
            .map(|&(a, b, w, l)| (a * (w * x).cos() + b * (w * x).sin()) * (-l * x).exp())
            .sum()
    }

    #[test]
    fn matches_periodized_closed_form() {
        // circular convolution of the mirrored period with the periodized,
        // unit-sum impulse response; 19 columns cover a full and a partial strip
        for (sigma, n) in [(1.5, 9), (4.0, 9), (7.0, 30), (3.0, 2)] {
            let width = 19;
            let src: Vec<f64> = (0..n * width).map(|i| ((i * 37) % 11) as f64).collect();
            let out = RecursiveGaussian::new(sigma).filter_columns(&src, width, n);

            let p = 2 * (n - 1) as i64;
            let reach = (60.0 * sigma) as i64;
            let mut h = vec![0.0; p as usize];
            for k in -reach..=reach {
                h[k.rem_euclid(p) as usize] += closed_form(sigma, k);
            }
            let total: f64 = h.iter().sum();
            for col in 0..width {
                let ext: Vec<f64> = (0..p).map(|j| src[mirror_index(j as isize, n) * width + col]).collect();
                for i in 0..n {
                    let pu = p as usize;
                    let v: f64 = (0..pu).map(|k| h[k] * ext[(i + pu - k) % pu]).sum::<f64>() / total;
                    let got = out[i * width + col];
                    assert!((got - v).abs() < 1e-9, "sigma {sigma} col {col} i {i}: {got} vs {v}");
                }
            }
        }
    }

    #[test]
    fn constant_is_fixed_point() {
        for sigma in [0.5, 10.0, 100.0, 5000.0] {
            let img = Image::constant(23, 17, 77.0).unwrap();
            let out = gaussian_recursive(&img, sigma, Boundary::Mirror).unwrap();
            assert!(out.samples().iter().all(|v| (v - 77.0).abs() < 1e-9), "sigma {sigma}");
        }
    }

    #[test]
    fn close_to_fir_on_noise() {
        let img = random_image(64, 64, 21);
        for sigma in [2.0, 3.0, 5.0, 12.0, 30.0, 50.0] {
            let a = gaussian_recursive(&img, sigma, Boundary::Mirror).unwrap();
            let b = gaussian_fir(&img, sigma, Boundary::Mirror).unwrap();
            let s = error_stats(&a, &b).unwrap();
            assert!(s.max_abs < 0.01 * 255.0, "sigma {sigma}: {s:?}");
        }
    }

    #[test]
    fn impulse_response_is_even() {
        let (w, h) = (61, 61);
        let mut s = vec![0.0; w * h];
        s[30 * w + 30] = 1.0;
        let out = gaussian_recursive(&Image::new(w, h, 1, s).unwrap(), 4.0, Boundary::Mirror).unwrap();
        let peak = out.get(0, 30, 30);
        for d in 1..12 {
            assert!((out.get(0, 30 - d, 30) - out.get(0, 30 + d, 30)).abs() < 1e-12 * peak);
            assert!((out.get(0, 30, 30 - d) - out.get(0, 30, 30 + d)).abs() < 1e-12 * peak);
        }
    }

    #[test]
    fn short_lines() {
        let img = Image::new(2, 1, 1, vec![0.0, 10.0]).unwrap();
        let out = gaussian_recursive(&img, 3.0, Boundary::Mirror).unwrap();
        assert!((out.get(0, 0, 0) + out.get(0, 1, 0) - 10.0).abs() < 1e-9);
        let one = Image::new(1, 1, 1, vec![4.0]).unwrap();
        assert_eq!(gaussian_recursive(&one, 3.0, Boundary::Mirror).unwrap().samples(), &[4.0]);
    }
}
