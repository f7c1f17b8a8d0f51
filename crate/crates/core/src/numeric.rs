//! Small numerical utilities shared by the evaluation modules.

use num_bigint::BigUint;
use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Componentwise compensated sum of complex numbers.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `exp(w) - 1` without cancellation for small `|w|`.
pub fn complex_expm1(w: Complex64) -> Complex64 {
    let (a, b) = (w.re, w.im);
    let half_sin = (0.5 * b).sin();
    Complex64::new(
        a.exp_m1() * b.cos() - 2.0 * half_sin * half_sin,
        a.exp() * b.sin(),
    )
}

/// Natural logarithm of a positive big integer.
///
/// Uses the top 64 bits as the mantissa and the bit length for the exponent,
/// so the result is accurate to a few ulps regardless of magnitude.
pub fn ln_biguint(x: &BigUint) -> Option<f64> {
    let bits = x.bits();
    if bits == 0 {
        return None;
    }
    if bits <= 64 {
        let v = x.iter_u64_digits().next().unwrap_or(0);
        return Some((v as f64).ln());
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let mantissa = top.iter_u64_digits().next().unwrap_or(0) as f64;
    Some(mantissa.ln() + shift as f64 * std::f64::consts::LN_2)
}

/// Round to 15 significant decimal digits.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Format with at most 15 significant digits, shortest representation.
pub fn fmt15(x: f64) -> String {
    let r = round_sig15(x);
    if r.is_finite() {
        format!("{r}")
    } else {
        format!("{x}")
    }
}

/// Least-squares slope of `ln|y|` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `true` when the sequence is strictly decreasing from `start` onwards.
pub fn strictly_decreasing_from(values: &[f64], start: usize) -> bool {
    values
        .get(start..)
        .map(|tail| tail.windows(2).all(|w| w[1] < w[0]))
        .unwrap_or(true)
}

/// Standard normal CDF through the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}
