//! Saddle points and coefficient estimates, all in log space.
//!
//! With `t = e^{-s}`, Hayman's estimate of the `n`-th coefficient is
//! `ln a_n ~ F(-s) + n s - ln(sqrt(2 pi) sigma(e^{-s}))` where `s` solves
//! `m(e^{-s}) = n`. The Báez-Duarte variant replaces the exact root by the
//! root of the leading-order mean `Omega s^{-1-1/k} = n`, and substituting
//! the leading asymptotics of `F` and `sigma` at that point gives the closed
//! Hardy–Ramanujan form.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bigcount::CoeffTable;
use crate::error::{check_k, check_positive};
use crate::family::{fulcrum_real, mean, variance, DEFAULT_EPS};
use crate::special::constants;
use crate::{Error, PartitionKind, Result};

pub const DEFAULT_RTOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SaddleMethod {
    BaezDuarte,
    ExactRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleResult {
    pub kind: PartitionKind,
    pub k: u32,
    pub n: u64,
    pub method: SaddleMethod,
    pub s: f64,
    /// `m(e^{-s}) - n`; zero by convention for [`SaddleMethod::BaezDuarte`].
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateFormula {
    Hayman,
    HaymanBd,
    ClosedFormHr,
    ClosedFormQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogEstimate {
    pub kind: PartitionKind,
    pub k: u32,
    pub n: u64,
    pub formula: EstimateFormula,
    /// Natural log of the estimate.
    pub log_value: f64,
    /// Set for Hayman-type estimates of `q_k(n)`: strong Gaussianity of
    /// `Q_k` is not established, so these carry no guarantee.
    pub heuristic: bool,
}

impl LogEstimate {
    /// `ln(estimate / a_n)`, or `None` when the table lacks a positive `a_n`.
    pub fn log_ratio_to(&self, table: &CoeffTable) -> Option<f64> {
        if table.kind() != self.kind || table.k() != self.k {
            return None;
        }
        table.ln_coeff(self.n as usize).map(|exact| self.log_value - exact)
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    Ok(())
}

/// Leading-order mean constant: `Omega_k` for `P_k`, `Phi_k` for `Q_k`.
fn mean_constant(kind: PartitionKind, k: u32) -> Result<f64> {
    let c = constants(k, 2)?;
    Ok(match kind {
        PartitionKind::Unrestricted => c.big_omega,
        PartitionKind::Distinct => c.phi,
    })
}

/// Closed-form saddle `s_n = (C/n)^{k/(k+1)}` with `C = Omega_k` (or `Phi_k`).
pub fn bd_saddle(kind: PartitionKind, k: u32, n: u64) -> Result<SaddleResult> {
    check_n(n)?;
    let c = mean_constant(kind, k)?;
    let kf = k as f64;
    Ok(SaddleResult {
        kind,
        k,
        n,
        method: SaddleMethod::BaezDuarte,
        s: (c / n as f64).powf(kf / (kf + 1.0)),
        residual: 0.0,
    })
}

/// Leading-order mean `C s^{-1-1/k}` at `s`.
pub fn approximate_mean(kind: PartitionKind, k: u32, s: f64) -> Result<f64> {
    check_positive("s", s)?;
    Ok(mean_constant(kind, k)? * s.powf(-1.0 - 1.0 / k as f64))
}

/// Root of `m(e^{-s}) = n` with `|m - n| <= rtol n`.
///
/// Bisection on a bracket around the closed-form saddle until the bracket
/// is within 1% of `s`, then safeguarded Newton steps using `dm/ds = -sigma^2`.
pub fn exact_saddle(kind: PartitionKind, k: u32, n: u64, rtol: f64) -> Result<SaddleResult> {
    check_k(k)?;
    check_n(n)?;
    if !(rtol > 0.0 && rtol <= 1e-3) {
        return Err(Error::invalid("rtol", format!("must lie in (0, 1e-3], got {rtol}")));
    }
    let target = n as f64;
    let tol = rtol * target;
    let m = |s: f64| mean(kind, k, s, DEFAULT_EPS);
    let guess = bd_saddle(kind, k, n)?.s;
    let (mut lo, mut hi) = (guess / 4.0, guess * 4.0);
    let mut iterations = 0;
    // mean is decreasing in s: need m(lo) >= n >= m(hi)
    while m(lo)? < target {
        lo /= 4.0;
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::Convergence { iterations, lo, hi });
        }
    }
    while m(hi)? > target {
        hi *= 4.0;
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::Convergence { iterations, lo, hi });
        }
    }
    let mut s = 0.5 * (lo + hi);
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let value = m(s)?;
        let residual = value - target;
        if residual.abs() <= tol {
            return Ok(SaddleResult {
                kind,
                k,
                n,
                method: SaddleMethod::ExactRoot,
                s,
                residual,
            });
        }
        if residual > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let mut next = 0.5 * (lo + hi);
        if hi - lo <= 1e-2 * s {
            let newton = s + residual / variance(kind, k, s, DEFAULT_EPS)?;
            if newton > lo && newton < hi {
                next = newton;
            }
        }
        s = next;
    }
    Err(Error::Convergence { iterations, lo, hi })
}

/// Hayman's estimate at the given saddle.
pub fn hayman_estimate(saddle: &SaddleResult) -> Result<LogEstimate> {
    let SaddleResult { kind, k, n, s, .. } = *saddle;
    let log_f = fulcrum_real(kind, k, s, DEFAULT_EPS)?;
    let sigma = variance(kind, k, s, DEFAULT_EPS)?.sqrt();
    Ok(LogEstimate {
        kind,
        k,
        n,
        formula: match saddle.method {
            SaddleMethod::ExactRoot => EstimateFormula::Hayman,
            SaddleMethod::BaezDuarte => EstimateFormula::HaymanBd,
        },
        log_value: log_f + n as f64 * s - ((2.0 * PI).sqrt() * sigma).ln(),
        heuristic: kind == PartitionKind::Distinct,
    })
}

/// `ln(alpha_k n^{-(3k+1)/(2k+2)} e^{beta_k n^{1/(k+1)}})`.
pub fn hr_closed_form(k: u32, n: u64) -> Result<LogEstimate> {
    check_n(n)?;
    let c = constants(k, 2)?;
    let (kf, nf) = (k as f64, n as f64);
    let log_value = c.alpha.ln() - (3.0 * kf + 1.0) / (2.0 * kf + 2.0) * nf.ln()
        + c.beta * nf.powf(1.0 / (kf + 1.0));
    Ok(LogEstimate {
        kind: PartitionKind::Unrestricted,
        k,
        n,
        formula: EstimateFormula::ClosedFormHr,
        log_value,
        heuristic: false,
    })
}

/// Closed-form estimate of `q_k(n)` built on `Phi_k = (1 - 2^{-1/k}) Omega_k`.
pub fn qk_closed_form(k: u32, n: u64) -> Result<LogEstimate> {
    check_n(n)?;
    let c = constants(k, 2)?;
    let (kf, nf) = (k as f64, n as f64);
    let log_value = -(2.0 * PI.sqrt()).ln() + kf / (2.0 * kf + 2.0) * c.phi.ln()
        - 0.5 * (1.0 + 1.0 / kf).ln()
        - (2.0 * kf + 1.0) / (2.0 * kf + 2.0) * nf.ln()
        + (kf + 1.0) * c.phi.powf(kf / (kf + 1.0)) * nf.powf(1.0 / (kf + 1.0));
    Ok(LogEstimate {
        kind: PartitionKind::Distinct,
        k,
        n,
        formula: EstimateFormula::ClosedFormQ,
        log_value,
        heuristic: false,
    })
}

/// The closed form matching `kind`.
pub fn closed_form(kind: PartitionKind, k: u32, n: u64) -> Result<LogEstimate> {
    match kind {
        PartitionKind::Unrestricted => hr_closed_form(k, n),
        PartitionKind::Distinct => qk_closed_form(k, n),
    }
}

/// `omega_{k,0} s^{-1/k} + (1/2) ln s - k ln sqrt(2 pi)`.
pub fn second_order_log_p(k: u32, s: f64) -> Result<f64> {
    check_positive("s", s)?;
    let c = constants(k, 2)?;
    let kf = k as f64;
    Ok(c.omega[0] * s.powf(-1.0 / kf) + 0.5 * s.ln() - kf * (2.0 * PI).sqrt().ln())
}
