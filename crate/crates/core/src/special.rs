//! Real `zeta` and `Gamma`, and the constants attached to a fixed `k`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::check_k;
use crate::numeric::{round_sig15, CompensatedSum};
use crate::{Error, Result};

/// Even-index Bernoulli numbers `B_2, B_4, ..., B_20`.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Riemann zeta on `(1, inf)`.
///
/// Partial sum up to `N - 1 = 19` followed by the Euler–Maclaurin tail
/// with ten Bernoulli corrections.
pub fn riemann_zeta(x: f64) -> Result<f64> {
    if !(x > 1.0) || x.is_nan() {
        return Err(Error::Domain {
            function: "riemann_zeta",
            value: x,
            reason: "requires x > 1",
        });
    }
    if x > 60.0 {
        // 2^-x already below 1e-18
        return Ok(1.0 + 2f64.powf(-x) + 3f64.powf(-x));
    }
    const N: f64 = 20.0;
    let mut acc = CompensatedSum::new();
    for n in (1..20).rev() {
        acc.add((n as f64).powf(-x));
    }
    let n_pow = N.powf(-x);
    acc.add(N * n_pow / (x - 1.0));
    acc.add(0.5 * n_pow);
    // term_j = B_2j / (2j)! * x (x+1) ... (x+2j-2) * N^{-x-2j+1}
    let mut rising = x;
    let mut factorial = 2.0;
    let mut power = n_pow / N;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        acc.add(b / factorial * rising * power);
        let i = 2.0 * (j as f64 + 1.0);
        rising *= (x + i - 1.0) * (x + i);
        factorial *= (i + 1.0) * (i + 2.0);
        power /= N * N;
    }
    Ok(acc.value())
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma on `(0, inf)`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain {
            function: "gamma_fn",
            value: x,
            reason: "requires x > 0",
        });
    }
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return Ok(PI / ((PI * x).sin() * lanczos(1.0 - x)));
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    // split the power to stay finite for x up to ~171
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * series
}

/// The constants of the asymptotic formulas for a fixed `k`.
///
/// `omega[m] = (1/k) zeta(1+1/k) Gamma(m+1/k)`, `Omega = omega[1]`,
/// `Phi = (1 - 2^{-1/k}) Omega`, `beta = (k+1) Omega^{k/(k+1)}` and
/// `alpha = Omega^{k/(k+1)} / ((2 pi)^{(k+1)/2} sqrt(1+1/k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSet {
    pub k: u32,
    /// Indexed by `m`, always covering at least `0..=2`.
    pub omega: Vec<f64>,
    pub big_omega: f64,
    pub phi: f64,
    pub alpha: f64,
    pub beta: f64,
    zeta_factor: f64,
}

impl ConstantSet {
    /// `omega_{k,m}`, computed on the fly beyond the cached range.
    pub fn omega(&self, m: u32) -> f64 {
        match self.omega.get(m as usize) {
            Some(&w) => w,
            None => {
                let inv_k = 1.0 / self.k as f64;
                self.zeta_factor * gamma_fn(m as f64 + inv_k).expect("positive argument")
            }
        }
    }

    /// `(1 - 2^{-1/k})`, the distinct-parts scaling of every `omega`.
    pub fn distinct_factor(&self) -> f64 {
        1.0 - 2f64.powf(-1.0 / self.k as f64)
    }

    /// JSON object with every real rounded to 15 significant digits.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Repr {
            k: u32,
            omega: BTreeMap<String, f64>,
            #[serde(rename = "Omega")]
            big_omega: f64,
            #[serde(rename = "Phi")]
            phi: f64,
            alpha: f64,
            beta: f64,
        }
        let repr = Repr {
            k: self.k,
            omega: self
                .omega
                .iter()
                .enumerate()
                .map(|(m, w)| (m.to_string(), round_sig15(*w)))
                .collect(),
            big_omega: round_sig15(self.big_omega),
            phi: round_sig15(self.phi),
            alpha: round_sig15(self.alpha),
            beta: round_sig15(self.beta),
        };
        serde_json::to_value(repr).expect("constants serialize")
    }
}

pub fn constants(k: u32, m_max: u32) -> Result<ConstantSet> {
    check_k(k)?;
    let kf = k as f64;
    let inv_k = 1.0 / kf;
    let zeta_factor = riemann_zeta(1.0 + inv_k)? / kf;
    let omega = (0..=m_max.max(2))
        .map(|m| gamma_fn(m as f64 + inv_k).map(|g| zeta_factor * g))
        .collect::<Result<Vec<_>>>()?;
    let big_omega = omega[1];
    let power = big_omega.powf(kf / (kf + 1.0));
    Ok(ConstantSet {
        k,
        big_omega,
        phi: (1.0 - 2f64.powf(-inv_k)) * big_omega,
        alpha: power / ((2.0 * PI).powf((kf + 1.0) / 2.0) * (1.0 + inv_k).sqrt()),
        beta: (kf + 1.0) * power,
        omega,
        zeta_factor,
    })
}
