//! Numerical witnesses for the limit statements about the families of
//! `P_k` and `Q_k`.
//!
//! Every check evaluates a quantity that should tend to `0` (or `1`) as
//! `s -> 0` on a decreasing grid of `s` values. [`run_suite`] gathers them
//! into a self-describing [`DiagnosticsReport`] whose verdicts use the
//! thresholds from [`crate::fixtures`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_k, check_positive};
use crate::family::{fulcrum_derivative, sample, FamilyPoint, DEFAULT_EPS};
use crate::fixtures::{self, Fixtures};
use crate::numeric::{log_log_slope, normal_cdf, strictly_decreasing_from, CompensatedSum};
use crate::special::constants;
use crate::{Error, PartitionKind, Result};

pub const DEFAULT_QUAD_TOL: f64 = 1e-7;
/// Panels each quadrature region starts with before adaptive refinement.
const INITIAL_PANELS: usize = 32;
const MAX_DEPTH: u32 = 40;

/// `s = 0.5 * 2^{-i}`, `i = 0..=8`.
pub fn default_s_grid() -> Vec<f64> {
    (0..=8).map(|i| 0.5 * 0.5f64.powi(i)).collect()
}

/// `points` equally spaced values in `(0, pi]`.
pub fn default_phi_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|i| PI * i as f64 / points as f64).collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("s_grid", "must not be empty"));
    }
    for &s in grid {
        check_positive("s_grid", s)?;
    }
    if !grid.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::invalid("s_grid", "must be strictly decreasing"));
    }
    Ok(())
}

/// `F^(j)(-s) / F''(-s)^{j/2}` for `j = 3..=m_max`.
pub fn gaussianity_ratios(kind: PartitionKind, k: u32, s: f64, m_max: u32) -> Result<Vec<f64>> {
    if m_max < 3 {
        return Err(Error::invalid("m_max", "must be >= 3"));
    }
    let second = fulcrum_derivative(kind, k, 2, s, DEFAULT_EPS)?;
    (3..=m_max)
        .map(|j| Ok(fulcrum_derivative(kind, k, j, s, DEFAULT_EPS)? / second.powf(j as f64 / 2.0)))
        .collect()
}

/// `s^{m+1/k} F^(m)(-s) / omega_{k,m}` along the grid (for `Q_k` the
/// constant carries the extra factor `1 - 2^{-1/k}`). Tends to `1`.
pub fn fulcrum_asymptotic_check(kind: PartitionKind, k: u32, m: u32, s_grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(s_grid)?;
    let c = constants(k, m)?;
    let scale = match kind {
        PartitionKind::Unrestricted => c.omega(m),
        PartitionKind::Distinct => c.omega(m) * c.distinct_factor(),
    };
    let exponent = m as f64 + 1.0 / k as f64;
    s_grid
        .par_iter()
        .map(|&s| Ok(s.powf(exponent) * fulcrum_derivative(kind, k, m, s, DEFAULT_EPS)? / scale))
        .collect()
}

struct SimpsonState {
    evaluations: usize,
    worst_excess: f64,
}

fn simpson_rule(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse(
    f: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    state: &mut SimpsonState,
) -> Result<(f64, f64)> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    state.evaluations += 2;
    let left = simpson_rule(a, m, fa, flm, fm);
    let right = simpson_rule(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let err = delta.abs() / 15.0;
    if err <= tol || depth == 0 {
        if err > tol {
            state.worst_excess = state.worst_excess.max(err - tol);
        }
        return Ok((left + right + delta / 15.0, err));
    }
    let (l, el) = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, state)?;
    let (r, er) = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, state)?;
    Ok((l + r, el + er))
}

/// Adaptive Simpson over `[a, b]`, starting from [`INITIAL_PANELS`] panels.
/// Returns the value and the accumulated error estimate.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    check_positive("quad_tol", tol)?;
    if b <= a {
        return Ok((0.0, 0.0));
    }
    let mut state = SimpsonState {
        evaluations: 0,
        worst_excess: 0.0,
    };
    let h = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;
    let mut value = CompensatedSum::new();
    let mut error = 0.0;
    let mut x0 = a;
    let mut f0 = f(a)?;
    for i in 1..=INITIAL_PANELS {
        let x1 = if i == INITIAL_PANELS { b } else { a + i as f64 * h };
        let xm = 0.5 * (x0 + x1);
        let (fm, f1) = (f(xm)?, f(x1)?);
        let whole = simpson_rule(x0, x1, f0, fm, f1);
        let (v, e) = simpson_recurse(f, x0, x1, f0, fm, f1, whole, panel_tol, MAX_DEPTH, &mut state)?;
        value.add(v);
        error += e;
        x0 = x1;
        f0 = f1;
    }
    if error > tol {
        return Err(Error::Quadrature {
            tol,
            estimate: value.value(),
            error,
        });
    }
    Ok((value.value(), error))
}

/// `int_{-pi sigma}^{pi sigma} |E e^{i theta X} - e^{-theta^2/2}| d theta`
/// for the normalized variable, split at `theta = s^{-1/(2k)}`.
pub fn strong_gauss_l1(kind: PartitionKind, k: u32, s: f64, quad_tol: f64) -> Result<f64> {
    strong_gauss_l1_split(kind, k, s, quad_tol, 1.0)
}

/// As [`strong_gauss_l1`] with the split at `split_constant * s^{-1/(2k)}`.
pub fn strong_gauss_l1_split(kind: PartitionKind, k: u32, s: f64, quad_tol: f64, split_constant: f64) -> Result<f64> {
    check_positive("quad_tol", quad_tol)?;
    check_positive("split_constant", split_constant)?;
    let point = FamilyPoint::new(kind, k, s, DEFAULT_EPS)?;
    let upper = PI * point.sigma();
    let split = (split_constant * s.powf(-1.0 / (2.0 * k as f64))).min(upper);
    let integrand = |theta: f64| -> Result<f64> {
        let c = point.char_fn(theta)?;
        Ok((c - (-0.5 * theta * theta).exp()).norm())
    };
    // the integrand is even in theta
    let (inner, _) = adaptive_simpson(&integrand, 0.0, split, 0.25 * quad_tol)?;
    let (outer, _) = adaptive_simpson(&integrand, split, upper, 0.25 * quad_tol)?;
    Ok(2.0 * (inner + outer))
}

/// Fitted constants of the two-regime bound on `|f(e^{-s+i phi})| / f(e^{-s})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwlFit {
    pub kind: PartitionKind,
    pub k: u32,
    pub s: f64,
    /// Largest `d1` with `ratio <= exp(-d1 phi^2 s^{-(2+1/k)})` for `phi <= 2 pi s`.
    pub d1: f64,
    /// Largest `d2` with `ratio <= exp(-d2 s^{-1/k})` for `2 pi s < phi <= pi`.
    pub d2: f64,
    /// Grid points with `ratio >= 1` away from `phi = 0`.
    pub violations: usize,
    pub inner_points: usize,
    pub outer_points: usize,
    /// Modulus ratio at `phi = 2 pi s` and at `phi = pi`.
    pub ratio_at_threshold: f64,
    pub ratio_at_pi: f64,
}

/// Scans `phi_grid` (positive values up to `pi`) and fits `d1`, `d2`.
///
/// Accepts `Q_k` as an exploratory mode: no such bound is established for it.
pub fn twl_bound_scan(kind: PartitionKind, k: u32, s: f64, phi_grid: &[f64]) -> Result<TwlFit> {
    check_k(k)?;
    if !(s > 0.0 && s < std::f64::consts::LN_2) {
        return Err(Error::invalid("s", format!("must lie in (0, ln 2), got {s}")));
    }
    if phi_grid.iter().any(|&p| !(p > 0.0 && p <= PI)) || phi_grid.is_empty() {
        return Err(Error::invalid("phi_grid", "values must lie in (0, pi]"));
    }
    let point = FamilyPoint::new(kind, k, s, DEFAULT_EPS)?;
    let log_ratio = |phi: f64| point.modulus_ratio(phi).map(f64::ln);
    let logs: Vec<f64> = phi_grid.par_iter().map(|&phi| log_ratio(phi)).collect::<Result<_>>()?;
    let threshold = 2.0 * PI * s;
    let kf = k as f64;
    let mut d1 = f64::INFINITY;
    let mut d2 = f64::INFINITY;
    let (mut inner_points, mut outer_points, mut violations) = (0, 0, 0);
    for (&phi, &l) in phi_grid.iter().zip(&logs) {
        if l >= 0.0 {
            violations += 1;
        }
        if phi <= threshold {
            inner_points += 1;
            d1 = d1.min(-l * s.powf(2.0 + 1.0 / kf) / (phi * phi));
        } else {
            outer_points += 1;
            d2 = d2.min(-l * s.powf(1.0 / kf));
        }
    }
    Ok(TwlFit {
        kind,
        k,
        s,
        d1,
        d2,
        violations,
        inner_points,
        outer_points,
        ratio_at_threshold: log_ratio(threshold)?.exp(),
        ratio_at_pi: log_ratio(PI)?.exp(),
    })
}

/// `(m(e^{-s}) - Omega s^{-1-1/k}) / sigma(e^{-s})` along the grid.
pub fn bd_condition_check(k: u32, s_grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(s_grid)?;
    let c = constants(k, 2)?;
    s_grid
        .par_iter()
        .map(|&s| {
            let p = FamilyPoint::new(PartitionKind::Unrestricted, k, s, DEFAULT_EPS)?;
            Ok((p.mean() - c.big_omega * s.powf(-1.0 - 1.0 / k as f64)) / p.sigma())
        })
        .collect()
}

/// `s (Omega s^{-1-1/k} - m(e^{-s}))`, which lies in `[0, 1]` for every `s`.
pub fn bd_scaled_gap(k: u32, s_grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(s_grid)?;
    let c = constants(k, 2)?;
    s_grid
        .par_iter()
        .map(|&s| {
            let m = crate::family::mean(PartitionKind::Unrestricted, k, s, DEFAULT_EPS)?;
            Ok(s * (c.big_omega * s.powf(-1.0 - 1.0 / k as f64) - m))
        })
        .collect()
}

/// `|F(-s) - second-order log P_k(e^{-s})|` along the grid. Gaps below
/// `resolution_ulps` ulp of `|F(-s)|` are not resolved in `f64` and are
/// returned as zero.
pub fn second_order_gaps(k: u32, s_grid: &[f64], resolution_ulps: f64) -> Result<Vec<f64>> {
    check_grid(s_grid)?;
    s_grid
        .par_iter()
        .map(|&s| {
            let f = crate::family::fulcrum_real(PartitionKind::Unrestricted, k, s, 1e-16)?;
            let gap = (f - crate::saddle::second_order_log_p(k, s)?).abs();
            Ok(if gap < resolution_ulps * f64::EPSILON * f.abs() { 0.0 } else { gap })
        })
        .collect()
}

/// Kolmogorov–Smirnov distance between the exact law `P(X = n)`,
/// `n = 0..pmf.len()`, and the normal law with the same mean and variance.
pub fn ks_distance_lattice(pmf: &[f64]) -> f64 {
    let mean: f64 = pmf.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let var: f64 = pmf.iter().enumerate().map(|(n, p)| (n as f64 - mean).powi(2) * p).sum();
    let sigma = var.sqrt();
    let mut below = 0.0;
    let mut d: f64 = 0.0;
    for (n, p) in pmf.iter().enumerate() {
        let f = normal_cdf((n as f64 - mean) / sigma);
        d = d.max((f - below).abs());
        below += p;
        d = d.max((below - f).abs());
    }
    d
}

/// Second Bernoulli polynomial `t^2 - t + 1/6`.
pub fn bernoulli_b2(t: f64) -> f64 {
    t * t - t + 1.0 / 6.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerMaclaurinCheck {
    /// `1/12 - int_1^inf B_2({x}) / (2 x^2) dx`
    pub lhs: f64,
    /// `1 - ln sqrt(2 pi)`
    pub rhs: f64,
    /// Number of unit intervals summed exactly.
    pub intervals: u64,
    /// Bound on the integral over `[1 + intervals, inf)`.
    pub tail_bound: f64,
}

/// `int_m^{m+1} B_2({x}) / (2 x^2) dx`.
///
/// In closed form this is `1 + 1/(12 m(m+1)) - (m + 1/2) ln(1 + 1/m)`; with
/// `y = 1/(2m+1)` it becomes `sum_{i>=2} y^{2i} (2i-2) / (3(2i+1))`,
/// which has no cancellation.
pub fn b2_unit_integral(m: u64) -> f64 {
    let y = 1.0 / (2 * m + 1) as f64;
    let y2 = y * y;
    let mut power = y2 * y2;
    let mut acc = 0.0;
    let mut i = 2u32;
    loop {
        let term = power * (2 * i - 2) as f64 / (3 * (2 * i + 1)) as f64;
        acc += term;
        if term < 1e-18 * acc {
            break;
        }
        power *= y2;
        i += 1;
    }
    acc
}

/// Bound on `int_{N}^{inf} B_2({x})/(2x^2) dx` from the series above:
/// each unit piece is below `3 / (128 m^4)`.
pub fn b2_tail_bound(first_interval: u64) -> f64 {
    let n = first_interval as f64;
    1.0 / (128.0 * (n - 1.0).powi(3))
}

pub fn euler_maclaurin_identity_check(quad_tol: f64) -> Result<EulerMaclaurinCheck> {
    check_positive("quad_tol", quad_tol)?;
    let mut intervals = 1u64;
    while b2_tail_bound(intervals + 1) > quad_tol {
        intervals *= 2;
    }
    let mut acc = CompensatedSum::new();
    for m in (1..=intervals).rev() {
        acc.add(b2_unit_integral(m));
    }
    Ok(EulerMaclaurinCheck {
        lhs: 1.0 / 12.0 - acc.value(),
        rhs: 1.0 - (2.0 * PI).sqrt().ln(),
        intervals,
        tail_bound: b2_tail_bound(intervals + 1),
    })
}

/// Kolmogorov–Smirnov distance between a sample and the standard normal.
pub fn ks_distance_normal(values: &[f64]) -> f64 {
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let f = normal_cdf(x);
        acc.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

/// KS distance of `(X_t - m) / sigma` sampled `draws` times.
pub fn clt_empirical_check(kind: PartitionKind, k: u32, s: f64, draws: usize, seed: u64) -> Result<f64> {
    if draws < 10_000 {
        return Err(Error::invalid("draws", "must be >= 10^4"));
    }
    let point = FamilyPoint::new(kind, k, s, DEFAULT_EPS)?;
    let (m, sigma) = (point.mean(), point.sigma());
    let normalized: Vec<f64> = sample(&point, draws, seed)?
        .into_iter()
        .map(|x| (x as f64 - m) / sigma)
        .collect();
    Ok(ks_distance_normal(&normalized))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Gauss,
    Strong,
    Twl,
    Bd,
    Em,
    Clt,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Suite::Gauss, Suite::Strong, Suite::Twl, Suite::Bd, Suite::Em, Suite::Clt];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gauss => "gauss",
            Suite::Strong => "strong",
            Suite::Twl => "twl",
            Suite::Bd => "bd",
            Suite::Em => "em",
            Suite::Clt => "clt",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub criterion: String,
    pub passed: bool,
}

/// Metric sequences aligned with a decreasing `s` grid, plus verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub suite: Suite,
    pub kind: PartitionKind,
    pub k: u32,
    pub grid: Vec<f64>,
    pub metrics: BTreeMap<String, Vec<f64>>,
    /// Quantities not indexed by `s` (fitted slopes, the identity check).
    pub scalars: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, Verdict>,
    /// True when the suite probes a statement not established for `kind`.
    pub exploratory: bool,
}

impl DiagnosticsReport {
    fn new(suite: Suite, kind: PartitionKind, k: u32, grid: Vec<f64>) -> Self {
        DiagnosticsReport {
            suite,
            kind,
            k,
            grid,
            metrics: BTreeMap::new(),
            scalars: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            exploratory: false,
        }
    }

    fn metric(&mut self, name: &str, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.grid.len());
        self.metrics.insert(name.to_string(), values);
    }

    fn verdict(&mut self, name: &str, criterion: String, passed: bool) {
        self.verdicts.insert(name.to_string(), Verdict { criterion, passed });
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.values().all(|v| v.passed)
    }

    /// `(metric, s, value)` rows, metrics in name order, then scalars with an empty `s`.
    pub fn csv_rows(&self) -> Vec<(String, Option<f64>, f64)> {
        let mut rows = Vec::new();
        for (name, values) in &self.metrics {
            for (s, v) in self.grid.iter().zip(values) {
                rows.push((name.clone(), Some(*s), *v));
            }
        }
        for (name, v) in &self.scalars {
            rows.push((name.clone(), None, *v));
        }
        rows
    }
}

/// `|x_i - target|` strictly decreasing after `burn_in` and final value
/// below `threshold`. Deviations under `floor` count as zero, and a run of
/// zeros only has to stay there.
pub fn approaches(values: &[f64], target: f64, burn_in: usize, threshold: f64, floor: f64) -> bool {
    let dev: Vec<f64> = values
        .iter()
        .map(|v| (v - target).abs())
        .map(|d| if d < floor { 0.0 } else { d })
        .collect();
    let monotone = dev
        .windows(2)
        .skip(burn_in)
        .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
    monotone && dev.last().is_some_and(|d| *d < threshold)
}

/// Runs one suite (or all of them, see [`run_all`]) with the shipped fixture thresholds.
pub fn run_suite(kind: PartitionKind, k: u32, suite: Suite, seed: u64) -> Result<DiagnosticsReport> {
    check_k(k)?;
    let fx = fixtures::load();
    match suite {
        Suite::Gauss => gauss_suite(kind, k, fx),
        Suite::Strong => strong_suite(kind, k, fx),
        Suite::Twl => twl_suite(kind, k, fx),
        Suite::Bd => bd_suite(kind, k, fx),
        Suite::Em => em_suite(kind, k, fx),
        Suite::Clt => clt_suite(kind, k, seed, fx),
        Suite::All => Err(Error::invalid("suite", "use run_all for the combined suite")),
    }
}

pub fn run_all(kind: PartitionKind, k: u32, seed: u64) -> Result<Vec<DiagnosticsReport>> {
    Suite::EACH.iter().map(|&s| run_suite(kind, k, s, seed)).collect()
}

fn gauss_suite(kind: PartitionKind, k: u32, fx: &Fixtures) -> Result<DiagnosticsReport> {
    let grid = default_s_grid();
    let mut report = DiagnosticsReport::new(Suite::Gauss, kind, k, grid.clone());
    const M_MAX: u32 = 6;
    let ratios: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&s| gaussianity_ratios(kind, k, s, M_MAX))
        .collect::<Result<_>>()?;
    for (idx, j) in (3..=M_MAX).enumerate() {
        let values: Vec<f64> = ratios.iter().map(|r| r[idx]).collect();
        let slope = log_log_slope(&grid, &values);
        let expected = (j as f64 / 2.0 - 1.0) / k as f64;
        let name = format!("gaussianity_ratio_j{j}");
        report.verdict(
            &name,
            "strictly decreasing along the grid".to_string(),
            strictly_decreasing_from(&values, 0),
        );
        if j == 3 {
            // higher ratios have not reached their limiting slope on this grid
            report.verdict(
                &format!("{name}_slope"),
                format!("log-log slope within {} of {expected}", fx.gauss.slope_tolerance),
                (slope - expected).abs() <= fx.gauss.slope_tolerance,
            );
        }
        report.scalars.insert(format!("{name}_slope"), slope);
        report.metric(&name, values);
    }
    for m in 0..=3 {
        let values = fulcrum_asymptotic_check(kind, k, m, &grid)?;
        let name = format!("fulcrum_asymptotic_m{m}");
        let burn_in = fx.fulcrum.burn_in;
        let threshold = fx.fulcrum_grid_threshold(kind, k, m);
        report.verdict(
            &name,
            format!("|x - 1| strictly decreasing from index {burn_in}, final < {threshold}"),
            approaches(&values, 1.0, burn_in, threshold, fx.fulcrum.resolved),
        );
        report.metric(&name, values);
    }
    Ok(report)
}

fn strong_suite(kind: PartitionKind, k: u32, fx: &Fixtures) -> Result<DiagnosticsReport> {
    let grid = fx.strong.s_grid.clone();
    let mut report = DiagnosticsReport::new(Suite::Strong, kind, k, grid.clone());
    report.exploratory = kind == PartitionKind::Distinct;
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&s| strong_gauss_l1(kind, k, s, DEFAULT_QUAD_TOL))
        .collect::<Result<_>>()?;
    let threshold = fx.strong_threshold(kind, k);
    report.verdict(
        "strong_gauss_l1",
        format!("strictly decreasing, final < {threshold}"),
        strictly_decreasing_from(&values, 0) && values.last().is_some_and(|v| *v < threshold),
    );
    report.metric("strong_gauss_l1", values);
    Ok(report)
}

fn twl_suite(kind: PartitionKind, k: u32, fx: &Fixtures) -> Result<DiagnosticsReport> {
    let grid = fx.twl.s_grid.clone();
    let mut report = DiagnosticsReport::new(Suite::Twl, kind, k, grid.clone());
    report.exploratory = kind == PartitionKind::Distinct;
    let phi_grid = default_phi_grid(fx.twl.phi_points);
    let fits: Vec<TwlFit> = grid
        .iter()
        .map(|&s| twl_bound_scan(kind, k, s, &phi_grid))
        .collect::<Result<_>>()?;
    let d1: Vec<f64> = fits.iter().map(|f| f.d1).collect();
    let d2: Vec<f64> = fits.iter().map(|f| f.d2).collect();
    let (d1_floor, d2_floor) = fx.twl_floors(kind, k);
    let violations: usize = fits.iter().map(|f| f.violations).sum();
    report.verdict("d1", format!("every fitted d1 > {d1_floor}"), d1.iter().all(|&d| d > d1_floor));
    report.verdict("d2", format!("every fitted d2 > {d2_floor}"), d2.iter().all(|&d| d > d2_floor));
    report.verdict("violations", "no grid point with ratio >= 1".into(), violations == 0);
    let spread = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min);
    report.verdict(
        "stability",
        "max/min of d1 and of d2 across s within a factor 3".into(),
        spread(&d1) <= 3.0 && spread(&d2) <= 3.0,
    );
    report.metric("ratio_at_pi", fits.iter().map(|f| f.ratio_at_pi).collect());
    report.metric("ratio_at_threshold", fits.iter().map(|f| f.ratio_at_threshold).collect());
    report.metric("violations", fits.iter().map(|f| f.violations as f64).collect());
    report.metric("d1", d1);
    report.metric("d2", d2);
    Ok(report)
}

fn bd_suite(kind: PartitionKind, k: u32, fx: &Fixtures) -> Result<DiagnosticsReport> {
    let grid = default_s_grid();
    let mut report = DiagnosticsReport::new(Suite::Bd, kind, k, grid.clone());
    if kind == PartitionKind::Distinct {
        // the approximant is defined for P_k only
        report.exploratory = true;
        return Ok(report);
    }
    let values = bd_condition_check(k, &grid)?;
    let gaps = bd_scaled_gap(k, &grid)?;
    let slope = log_log_slope(&grid, &values);
    let (target, tol) = fx.bd_slope(k);
    report.verdict(
        "bd_slope",
        format!("log-log slope within {tol} of {target}"),
        (slope - target).abs() <= tol,
    );
    report.verdict(
        "bd_metric",
        format!("|metric| strictly decreasing from index {}", fx.bd.burn_in),
        approaches(&values, 0.0, fx.bd.burn_in, f64::INFINITY, 0.0),
    );
    report.verdict(
        "bd_scaled_gap",
        "s (m~ - m) within [0, 1]".into(),
        gaps.iter().all(|g| (0.0..=1.0).contains(g)),
    );
    report.scalars.insert("bd_slope".into(), slope);
    report.metric("bd_metric", values);
    report.metric("bd_scaled_gap", gaps);
    Ok(report)
}

fn em_suite(kind: PartitionKind, k: u32, fx: &Fixtures) -> Result<DiagnosticsReport> {
    let mut report = DiagnosticsReport::new(Suite::Em, kind, k, Vec::new());
    let check = euler_maclaurin_identity_check(fx.em.quad_tol)?;
    let diff = (check.lhs - check.rhs).abs();
    report.scalars.insert("lhs".into(), check.lhs);
    report.scalars.insert("rhs".into(), check.rhs);
    report.scalars.insert("abs_diff".into(), diff);
    report.scalars.insert("tail_bound".into(), check.tail_bound);
    report.verdict("identity", format!("|lhs - rhs| <= {}", fx.em.tolerance), diff <= fx.em.tolerance);
    Ok(report)
}

fn clt_suite(kind: PartitionKind, k: u32, seed: u64, fx: &Fixtures) -> Result<DiagnosticsReport> {
    let grid = fx.clt.s_grid.clone();
    let mut report = DiagnosticsReport::new(Suite::Clt, kind, k, grid.clone());
    let values: Vec<f64> = grid
        .iter()
        .map(|&s| clt_empirical_check(kind, k, s, fx.clt.draws, seed))
        .collect::<Result<_>>()?;
    let threshold = fx.ks_threshold(kind, k);
    report.verdict(
        "ks",
        format!("final KS < {threshold} and below the first grid value"),
        values.last().is_some_and(|v| *v < threshold && *v < values[0]),
    );
    report.metric("ks", values);
    Ok(report)
}
