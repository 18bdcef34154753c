use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Exactly rounded floating-point sum (Shewchuk's non-overlapping partials).
///
/// The result does not depend on the order in which values were added or
/// accumulators merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactSum {
    partials: Vec<f64>,
    nonfinite: f64,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        if !value.is_finite() {
            self.nonfinite += value;
            return;
        }
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                core::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
        self.nonfinite += other.nonfinite;
    }

    pub fn value(&self) -> f64 {
        if self.nonfinite != 0.0 || self.nonfinite.is_nan() {
            return self.nonfinite;
        }
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // round half-even correction across the remaining partials
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

/// Order-independent mean and covariance of complex samples viewed as
/// points of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexSampleStats {
    pub count: usize,
    pub mean: Complex64,
    /// Unbiased covariance of `(Re, Im)`.
    pub cov: [[f64; 2]; 2],
    /// `mean |z|²`
    pub abs_second: f64,
}

impl ComplexSampleStats {
    /// Needs at least two samples.
    pub fn from_samples(samples: &[Complex64]) -> Self {
        let m = samples.len() as f64;
        let sum_re: ExactSum = samples.iter().map(|z| z.re).collect();
        let sum_im: ExactSum = samples.iter().map(|z| z.im).collect();
        let mean = Complex64::new(sum_re.value() / m, sum_im.value() / m);
        let centred = |f: &dyn Fn(Complex64) -> f64| -> f64 {
            samples.iter().map(|&z| f(z - mean)).collect::<ExactSum>().value() / (m - 1.0)
        };
        let srr = centred(&|d| d.re * d.re);
        let sii = centred(&|d| d.im * d.im);
        let sri = centred(&|d| d.re * d.im);
        let abs_second = samples.iter().map(|z| z.norm_sqr()).collect::<ExactSum>().value() / m;
        Self { count: samples.len(), mean, cov: [[srr, sri], [sri, sii]], abs_second }
    }

    /// Standard error of the mean of each component.
    pub fn mean_stderr(&self) -> [f64; 2] {
        let m = self.count as f64;
        [libm::sqrt(self.cov[0][0] / m), libm::sqrt(self.cov[1][1] / m)]
    }
}
