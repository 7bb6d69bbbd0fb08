use super::{mirror_index, LineFilter};

/// Sampled Gaussian on `[-ceil(4σ), ceil(4σ)]`, renormalized to unit sum.
pub fn gaussian_taps(sigma: f64) -> Vec<f64> {
    let radius = (4.0 * sigma).ceil() as isize;
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / denom).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

pub(crate) struct FirLine {
    taps: Vec<f64>,
}

impl FirLine {
    pub(crate) fn new(sigma: f64) -> Self {
        Self {
            taps: gaussian_taps(sigma),
        }
    }
}

impl LineFilter for FirLine {
    fn filter_line(&self, src: &[f64], dst: &mut [f64], _scratch: &mut Vec<f64>) {
        let n = src.len();
        let r = (self.taps.len() / 2) as isize;
        for (x, out) in dst.iter_mut().enumerate() {
            let x = x as isize;
            let mut acc = 0.0;
            if x - r >= 0 && x + r < n as isize {
                let window = &src[(x - r) as usize..=(x + r) as usize];
                for (t, v) in self.taps.iter().zip(window) {
                    acc += t * v;
                }
            } else {
                for (k, t) in self.taps.iter().enumerate() {
                    acc += t * src[mirror_index(x + k as isize - r, n)];
                }
            }
            *out = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_image;
    use super::super::{gaussian_fir, mirror_index, Boundary};
    use super::gaussian_taps;
    use crate::image::{error_stats, Image};

    #[test]
    fn constant_is_fixed_point() {
        let img = Image::constant(11, 9, 200.0).unwrap();
        let out = gaussian_fir(&img, 2.5, Boundary::Mirror).unwrap();
        assert!(out.samples().iter().all(|v| (v - 200.0).abs() < 1e-10));
    }

    #[test]
    fn impulse_response_is_symmetric_gaussian() {
        let (w, h, sigma) = (41usize, 41usize, 3.0);
        let mut s = vec![0.0; w * h];
        s[20 * w + 20] = 1.0;
        let out = gaussian_fir(&Image::new(w, h, 1, s).unwrap(), sigma, Boundary::Mirror).unwrap();
        let peak = out.get(0, 20, 20);
        for j in -8isize..=8 {
            for i in -8isize..=8 {
                let v = out.get(0, (20 + i) as usize, (20 + j) as usize);
                let expected = peak * (-((i * i + j * j) as f64) / (2.0 * sigma * sigma)).exp();
                assert!((v - expected).abs() < 1e-14, "{i},{j}");
                assert_eq!(v, out.get(0, (20 - i) as usize, (20 + j) as usize));
                assert_eq!(v, out.get(0, (20 + i) as usize, (20 - j) as usize));
            }
        }
    }

    #[test]
    fn separable_matches_direct_2d_convolution() {
        let img = random_image(32, 32, 9);
        let sigma = 3.0;
        let taps = gaussian_taps(sigma);
        let r = (taps.len() / 2) as isize;
        let mut direct = Vec::new();
        for y in 0..32isize {
            for x in 0..32isize {
                let mut acc = 0.0;
                for j in -r..=r {
                    for i in -r..=r {
                        let w = taps[(i + r) as usize] * taps[(j + r) as usize];
                        acc += w * img.get(0, mirror_index(x - i, 32), mirror_index(y - j, 32));
                    }
                }
                direct.push(acc);
            }
        }
        let direct = Image::new(32, 32, 1, direct).unwrap();
        let fast = gaussian_fir(&img, sigma, Boundary::Mirror).unwrap();
        assert!(error_stats(&fast, &direct).unwrap().max_abs < 1e-10);
    }

    #[test]
    fn truncation_keeps_mass() {
        let sigma: f64 = 5.0;
        let r = (4.0 * sigma).ceil() as i64;
        let full: f64 = (-200i64..=200).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).sum();
        let kept: f64 = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).sum();
        assert!(1.0 - kept / full < 1e-4);
    }
}
