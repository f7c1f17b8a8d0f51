//! The Khinchin family of `P_k` and `Q_k`.
//!
//! Everything is expressed through the fulcrum `F(z) = ln f(e^z)`,
//! `Re z < 0`. For `P_k`
//!
//! ```text
//! F(z) = sum_j -Log(1 - e^{j^k z}),
//! F^(m)(z) = sum_j j^{mk} D_m(u_j),   u_j = 1 / (e^{-j^k z} - 1),
//! ```
//!
//! where `D_m` is an integer polynomial obtained from `u' = -u(u+1)`.
//! For `Q_k` the fulcrum is `G(z) = F(z) - F(2z)`, so
//! `G^(m)(z) = F^(m)(z) - 2^m F^(m)(2z)`. Mean and variance at `t = e^{-s}`
//! are `F'(-s)` and `F''(-s)`.
//!
//! Every series is truncated at a certified index `J`: for `j > J`
//! the terms are bounded by `K_m y^m e^{-ys}` with `y = j^k`, and the tail
//! by the corresponding integral from `J^k` to infinity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bigcount::CoeffTable;
use crate::error::{check_k, check_positive};
use crate::numeric::{complex_expm1, CompensatedComplexSum, CompensatedSum};
use crate::{Error, PartitionKind, Result};

/// Default absolute tail tolerance for all series.
pub const DEFAULT_EPS: f64 = 1e-12;
/// Highest derivative order supported by [`fulcrum_derivative`].
pub const MAX_DERIVATIVE_ORDER: u32 = 8;
/// Hard cap on the number of retained product factors.
pub const MAX_TERMS: u64 = 100_000_000;
/// Probability that a sampled partition uses a part beyond the truncation.
pub const SAMPLE_TAIL_PROBABILITY: f64 = 1e-9;

const SAMPLE_CHUNK: usize = 1024;

/// A certified truncation of one of the fulcrum series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesTruncation {
    pub eps: f64,
    /// Number of retained factors `j = 1..=terms`.
    pub terms: u64,
    /// Upper bound on the absolute value of the discarded tail.
    pub tail_bound: f64,
}

/// `K_m = sum_r r^{m-1} e^{-(r-1)}`, so that
/// `sum_r r^{m-1} e^{-r x} <= K_m e^{-x}` for `x >= 1`.
fn tail_constant(m: u32) -> f64 {
    let mut acc = 0.0;
    for r in 1..200u32 {
        let r = r as f64;
        acc += r.powi(m as i32 - 1) * (-(r - 1.0)).exp();
    }
    acc
}

/// `int_Y^inf y^m e^{-ys} dy` in closed form.
fn power_exp_tail(m: u32, y: f64, s: f64) -> f64 {
    let mut acc = 0.0;
    let mut coeff = 1.0; // m! / (m-i)!
    for i in 0..=m {
        acc += coeff * y.powi((m - i) as i32) / s.powi(i as i32 + 1);
        coeff *= (m - i) as f64;
    }
    (-y * s).exp() * acc
}

/// Tail bound after keeping `j = 1..=terms`, or `None` when the
/// monotonicity conditions for the integral comparison do not hold yet.
fn tail_bound(kind: PartitionKind, k: u32, m: u32, s: f64, terms: u64, scale: f64) -> Option<f64> {
    let y = (terms as f64).powi(k as i32);
    if y * s < 1.0 || y * s < m as f64 {
        return None;
    }
    let km = tail_constant(m);
    let mut bound = km * power_exp_tail(m, y, s);
    if kind == PartitionKind::Distinct {
        bound += 2f64.powi(m as i32) * km * power_exp_tail(m, y, 2.0 * s);
    }
    Some(scale * bound)
}

/// Smallest certified `J` for the `m`-th derivative series at `Re z = -s`.
pub fn series_truncation(kind: PartitionKind, k: u32, m: u32, s: f64, eps: f64) -> Result<SeriesTruncation> {
    truncation_scaled(kind, k, m, s, eps, 1.0)
}

fn truncation_scaled(kind: PartitionKind, k: u32, m: u32, s: f64, eps: f64, scale: f64) -> Result<SeriesTruncation> {
    check_k(k)?;
    check_positive("s", s)?;
    check_positive("eps", eps)?;
    let ok = |j: u64| tail_bound(kind, k, m, s, j, scale).filter(|b| *b <= eps);
    let mut hi = 1u64;
    while ok(hi).is_none() {
        if hi >= MAX_TERMS {
            return Err(Error::Truncation {
                eps,
                achieved: tail_bound(kind, k, m, s, MAX_TERMS, scale).unwrap_or(f64::INFINITY),
                terms: MAX_TERMS,
            });
        }
        hi = (hi * 2).min(MAX_TERMS);
    }
    let mut lo = hi / 2; // fails (or is 0)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(SeriesTruncation {
        eps,
        terms: hi,
        tail_bound: tail_bound(kind, k, m, s, hi, scale).unwrap_or(f64::INFINITY),
    })
}

/// Coefficients of `D_m(u) = (-1)^m h^(m)(x)` with `h(x) = -ln(1 - e^{-x})`
/// and `u = 1/(e^x - 1)`, lowest degree first.
///
/// `D_1 = u` and `D_{m+1} = u(u+1) D_m'(u)`; all coefficients are nonnegative.
pub fn derivative_polynomial(m: u32) -> Vec<i64> {
    assert!(m >= 1, "D_m is defined for m >= 1");
    let mut poly = vec![0i64, 1];
    for _ in 1..m {
        let mut next = vec![0i64; poly.len() + 1];
        for (deg, &c) in poly.iter().enumerate().skip(1) {
            let d = deg as i64 * c; // coefficient of u^{deg-1} in D'
            next[deg] += d; // times u
            next[deg + 1] += d; // times u^2
        }
        poly = next;
    }
    poly
}

fn horner_real(poly: &[f64], u: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

fn horner_complex(poly: &[f64], u: Complex64) -> Complex64 {
    poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
}

/// `Log(1 + w)`, accurate for small `|w|`.
fn complex_ln_1p(w: Complex64) -> Complex64 {
    let modulus_sq_m1 = 2.0 * w.re + w.norm_sqr();
    Complex64::new(0.5 * modulus_sq_m1.ln_1p(), w.im.atan2(1.0 + w.re))
}

/// `-ln(1 - e^{-x})` for `x > 0`.
fn neg_log_one_minus_exp(x: f64) -> f64 {
    if x > std::f64::consts::LN_2 {
        -(-(-x).exp()).ln_1p()
    } else {
        -(-(-x).exp_m1()).ln()
    }
}

/// `-Log(1 - e^{-w})` for `Re w > 0`.
fn complex_neg_log_one_minus_exp(w: Complex64) -> Complex64 {
    if w.re > std::f64::consts::LN_2 {
        -complex_ln_1p(-(-w).exp())
    } else {
        -(-complex_expm1(-w)).ln()
    }
}

fn check_z(z: Complex64) -> Result<f64> {
    if !(z.re < 0.0) || !z.im.is_finite() {
        return Err(Error::Domain {
            function: "fulcrum",
            value: z.re,
            reason: "requires Re z < 0",
        });
    }
    Ok(-z.re)
}

fn check_order(m: u32) -> Result<()> {
    if m > MAX_DERIVATIVE_ORDER {
        return Err(Error::invalid(
            "m",
            format!("derivative order must be <= {MAX_DERIVATIVE_ORDER}"),
        ));
    }
    Ok(())
}

fn part_weight(j: u64, k: u32) -> f64 {
    (j as f64).powi(k as i32)
}

/// `F(z)` for `P_k` or `G(z) = F(z) - F(2z)` for `Q_k`, `Re z < 0`.
pub fn fulcrum(kind: PartitionKind, k: u32, z: Complex64, eps: f64) -> Result<Complex64> {
    fulcrum_derivative_complex(kind, k, 0, z, eps)
}

/// Real fulcrum at `-s`.
pub fn fulcrum_real(kind: PartitionKind, k: u32, s: f64, eps: f64) -> Result<f64> {
    fulcrum_derivative(kind, k, 0, s, eps)
}

/// `F^(m)(-s)` (or `G^(m)(-s)`); `m = 0` is the fulcrum itself.
pub fn fulcrum_derivative(kind: PartitionKind, k: u32, m: u32, s: f64, eps: f64) -> Result<f64> {
    check_order(m)?;
    let trunc = series_truncation(kind, k, m, s, eps)?;
    let poly: Vec<f64> = if m == 0 {
        Vec::new()
    } else {
        derivative_polynomial(m).into_iter().map(|c| c as f64).collect()
    };
    let eval = |x: f64| -> f64 {
        if m == 0 {
            neg_log_one_minus_exp(x)
        } else {
            horner_real(&poly, 1.0 / x.exp_m1())
        }
    };
    let two_m = 2f64.powi(m as i32);
    let mut acc = CompensatedSum::new();
    for j in 1..=trunc.terms {
        let y = part_weight(j, k);
        let weight = y.powi(m as i32);
        acc.add(weight * eval(y * s));
        if kind == PartitionKind::Distinct {
            acc.add(-two_m * weight * eval(2.0 * y * s));
        }
    }
    Ok(acc.value())
}

/// `F^(m)(z)` (or `G^(m)(z)`) at a complex point of the left half-plane.
pub fn fulcrum_derivative_complex(kind: PartitionKind, k: u32, m: u32, z: Complex64, eps: f64) -> Result<Complex64> {
    check_order(m)?;
    let s = check_z(z)?;
    let trunc = series_truncation(kind, k, m, s, eps)?;
    let poly: Vec<f64> = if m == 0 {
        Vec::new()
    } else {
        derivative_polynomial(m).into_iter().map(|c| c as f64).collect()
    };
    let eval = |w: Complex64| -> Complex64 {
        if m == 0 {
            complex_neg_log_one_minus_exp(w)
        } else {
            horner_complex(&poly, complex_expm1(w).inv())
        }
    };
    let two_m = 2f64.powi(m as i32);
    let mut acc = CompensatedComplexSum::new();
    for j in 1..=trunc.terms {
        let y = part_weight(j, k);
        let weight = y.powi(m as i32);
        let w = -z * y;
        acc.add(eval(w) * weight);
        if kind == PartitionKind::Distinct {
            acc.add(eval(w * 2.0) * (-two_m * weight));
        }
    }
    Ok(acc.value())
}

/// `F(-s + i phi) - F(-s)`, summed factor by factor.
///
/// Each factor contributes `-Log(1 - u (e^{i y phi} - 1))` with
/// `u = 1/(e^{ys} - 1)`, which avoids the cancellation of two large sums.
pub fn fulcrum_increment(kind: PartitionKind, k: u32, s: f64, phi: f64, eps: f64) -> Result<Complex64> {
    if !phi.is_finite() {
        return Err(Error::invalid("phi", "must be finite"));
    }
    let trunc = truncation_scaled(kind, k, 0, s, eps, 2.0)?;
    let factor = |x: f64, angle: f64| -> Complex64 {
        let u = 1.0 / x.exp_m1();
        let half = (0.5 * angle).sin();
        let rotation_m1 = Complex64::new(-2.0 * half * half, angle.sin());
        -complex_ln_1p(-rotation_m1 * u)
    };
    let mut acc = CompensatedComplexSum::new();
    for j in 1..=trunc.terms {
        let y = part_weight(j, k);
        acc.add(factor(y * s, y * phi));
        if kind == PartitionKind::Distinct {
            acc.add(-factor(2.0 * y * s, 2.0 * y * phi));
        }
    }
    Ok(acc.value())
}

pub fn mean(kind: PartitionKind, k: u32, s: f64, eps: f64) -> Result<f64> {
    fulcrum_derivative(kind, k, 1, s, eps)
}

pub fn variance(kind: PartitionKind, k: u32, s: f64, eps: f64) -> Result<f64> {
    fulcrum_derivative(kind, k, 2, s, eps)
}

/// `|f(e^{-s+i phi})| / f(e^{-s})`.
pub fn pgf_modulus_ratio(kind: PartitionKind, k: u32, s: f64, phi: f64, eps: f64) -> Result<f64> {
    Ok(fulcrum_increment(kind, k, s, phi, eps)?.re.exp())
}

/// Characteristic function of `(X_t - m)/sigma` at `theta`, `t = e^{-s}`.
pub fn char_fn_normalized(kind: PartitionKind, k: u32, s: f64, theta: f64, eps: f64) -> Result<Complex64> {
    FamilyPoint::new(kind, k, s, eps)?.char_fn(theta)
}

/// One member `X_t`, `t = e^{-s}`, of the family, with its moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyPoint {
    kind: PartitionKind,
    k: u32,
    s: f64,
    mean: f64,
    variance: f64,
    log_normalizer: f64,
    tail_eps: f64,
}

impl FamilyPoint {
    pub fn new(kind: PartitionKind, k: u32, s: f64, eps: f64) -> Result<Self> {
        check_k(k)?;
        check_positive("s", s)?;
        let mean = mean(kind, k, s, eps)?;
        let variance = variance(kind, k, s, eps)?;
        let log_normalizer = fulcrum_real(kind, k, s, eps)?;
        Ok(FamilyPoint {
            kind,
            k,
            s,
            mean,
            variance,
            log_normalizer,
            tail_eps: eps,
        })
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        (-self.s).exp()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }

    /// `F(-s) = ln f(t)`.
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }

    pub fn char_fn(&self, theta: f64) -> Result<Complex64> {
        let sigma = self.sigma();
        let inc = fulcrum_increment(self.kind, self.k, self.s, theta / sigma, self.tail_eps)?;
        Ok((inc - Complex64::new(0.0, theta * self.mean / sigma)).exp())
    }

    pub fn modulus_ratio(&self, phi: f64) -> Result<f64> {
        pgf_modulus_ratio(self.kind, self.k, self.s, phi, self.tail_eps)
    }
}

/// `P(X_t = n) = a_n t^n / f(t)`, evaluated in log space.
pub fn pmf(point: &FamilyPoint, n: usize, table: &CoeffTable) -> Result<f64> {
    if table.kind() != point.kind || table.k() != point.k {
        return Err(Error::invalid(
            "table",
            format!(
                "table is ({}, k={}) but point is ({}, k={})",
                table.kind(),
                table.k(),
                point.kind,
                point.k
            ),
        ));
    }
    if n > table.n_max() {
        return Err(Error::invalid("n", format!("{n} exceeds table n_max {}", table.n_max())));
    }
    Ok(match table.ln_coeff(n) {
        Some(ln_a) => (ln_a - n as f64 * point.s - point.log_normalizer).exp(),
        None => 0.0,
    })
}

/// Number of parts retained when sampling: the probability that any part
/// `j^k` with `j` beyond it is used is at most [`SAMPLE_TAIL_PROBABILITY`].
pub fn sample_truncation(k: u32, s: f64) -> u64 {
    // P(part j used) <= e^{-j^k s}; sum over j > J is <= e^{-J^k s} / s
    let mut j = 1u64;
    while (-part_weight(j, k) * s).exp() / s > SAMPLE_TAIL_PROBABILITY {
        j += 1;
    }
    j
}

/// Independent draws of `X_t`.
///
/// `X_t` is the sum over parts `j^k` of `j^k` times an independent
/// geometric count with success probability `1 - t^{j^k}` (for `P_k`) or a
/// Bernoulli indicator with success probability `t^{j^k}/(1 + t^{j^k})`
/// (for `Q_k`). Draws are produced in fixed chunks, each with its own
/// ChaCha stream, so the output depends only on `seed`.
pub fn sample(point: &FamilyPoint, count: usize, seed: u64) -> Result<Vec<u64>> {
    if count == 0 {
        return Err(Error::invalid("count", "must be >= 1"));
    }
    let terms = sample_truncation(point.k, point.s);
    let parts: Vec<(u64, f64, f64)> = (1..=terms)
        .map(|j| {
            let y = part_weight(j, point.k);
            let rate = y * point.s;
            let u = (-rate).exp();
            let threshold = match point.kind {
                PartitionKind::Unrestricted => u,
                PartitionKind::Distinct => u / (1.0 + u),
            };
            (y as u64, rate, threshold)
        })
        .collect();
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let draws: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            (0..len)
                .map(|_| draw_one(&parts, point.kind, &mut rng))
                .collect()
        })
        .collect();
    Ok(draws.into_iter().flatten().collect())
}

fn draw_one(parts: &[(u64, f64, f64)], kind: PartitionKind, rng: &mut ChaCha8Rng) -> u64 {
    let mut total = 0u64;
    for &(part, rate, threshold) in parts {
        let v: f64 = rng.random();
        if v >= threshold {
            continue;
        }
        let multiplicity = match kind {
            // P(G >= g) = P(v <= e^{-g rate}); v < threshold already means G >= 1
            PartitionKind::Unrestricted => {
                let v = v.max(f64::MIN_POSITIVE);
                ((-v.ln()) / rate).floor().max(1.0) as u64
            }
            PartitionKind::Distinct => 1,
        };
        total += part * multiplicity;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigcount::count_partitions;
    use crate::special::constants;
    use PartitionKind::{Distinct, Unrestricted};

    const EPS: f64 = DEFAULT_EPS;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn derivative_polynomials() {
        assert_eq!(derivative_polynomial(1), vec![0, 1]);
        assert_eq!(derivative_polynomial(2), vec![0, 1, 1]);
        assert_eq!(derivative_polynomial(3), vec![0, 1, 3, 2]);
        for m in 1..=MAX_DERIVATIVE_ORDER {
            let p = derivative_polynomial(m);
            assert!(p.iter().all(|&c| c >= 0));
            // leading coefficient (m-1)!
            let lead: i64 = (1..m as i64).product();
            assert_eq!(*p.last().unwrap(), lead);
        }
    }

    #[test]
    fn fulcrum_against_direct_product() {
        // ln prod_{j<=60} (1 - e^{-j})^{-1}; the tail past 60 is < 1e-26
        let mut product = 1.0f64;
        for j in 1..=60 {
            product /= 1.0 - (-(j as f64)).exp();
        }
        let z = Complex64::new(-1.0, 0.0);
        let f = fulcrum(Unrestricted, 1, z, 1e-16).unwrap();
        assert!(rel(f.re, product.ln()) < 1e-14);
        assert_eq!(f.im, 0.0);
        assert!(rel(fulcrum_real(Unrestricted, 1, 1.0, 1e-16).unwrap(), product.ln()) < 1e-14);
        // the default tolerance is absolute
        assert!((fulcrum_real(Unrestricted, 1, 1.0, EPS).unwrap() - product.ln()).abs() < EPS);
    }

    #[test]
    fn distinct_fulcrum_against_direct_product() {
        let direct: f64 = (1..=60).map(|j| (1.0 + (-(j as f64)).exp()).ln()).sum();
        let f = fulcrum(Distinct, 1, Complex64::new(-1.0, 0.0), 1e-16).unwrap();
        assert!(rel(f.re, direct) < 1e-14);
    }

    #[test]
    fn real_fulcrum_has_zero_imaginary_part() {
        for k in 1..=4 {
            for kind in [Unrestricted, Distinct] {
                let f = fulcrum(kind, k, Complex64::new(-0.3, 0.0), EPS).unwrap();
                assert_eq!(f.im, 0.0);
            }
        }
    }

    #[test]
    fn fulcrum_rejects_right_half_plane() {
        assert!(matches!(
            fulcrum(Unrestricted, 1, Complex64::new(0.0, 1.0), EPS),
            Err(Error::Domain { .. })
        ));
        assert!(fulcrum_derivative(Unrestricted, 1, 1, -0.5, EPS).is_err());
        assert!(fulcrum_derivative(Unrestricted, 1, 9, 0.5, EPS).is_err());
        assert!(fulcrum_derivative(Unrestricted, 0, 1, 0.5, EPS).is_err());
    }

    #[test]
    fn truncation_failure_is_reported() {
        let err = series_truncation(Unrestricted, 1, 2, 1e-9, 1e-300).unwrap_err();
        assert!(matches!(err, Error::Truncation { terms: MAX_TERMS, .. }));
    }

    #[test]
    fn truncation_is_certified_against_brute_tail() {
        for (k, m, s) in [(1, 0, 0.3), (1, 2, 0.05), (2, 1, 0.01), (3, 3, 0.2)] {
            let tr = series_truncation(Unrestricted, k, m, s, 1e-10).unwrap();
            let poly: Vec<f64> = if m == 0 {
                vec![]
            } else {
                derivative_polynomial(m).into_iter().map(|c| c as f64).collect()
            };
            let mut tail = 0.0;
            for j in tr.terms + 1..tr.terms + 100_000 {
                let y = part_weight(j, k);
                let x = y * s;
                tail += if m == 0 {
                    neg_log_one_minus_exp(x)
                } else {
                    y.powi(m as i32) * horner_real(&poly, 1.0 / x.exp_m1())
                };
            }
            assert!(tail <= tr.tail_bound && tr.tail_bound <= 1e-10, "{k} {m} {s}");
        }
    }

    #[test]
    fn first_derivative_closed_form() {
        let direct: f64 = (1..=200)
            .map(|j| {
                let e = (-(j as f64)).exp();
                j as f64 * e / (1.0 - e)
            })
            .sum();
        assert!(rel(mean(Unrestricted, 1, 1.0, 1e-16).unwrap(), direct) < 1e-14);
        let direct2: f64 = (1..=60)
            .map(|j| {
                let e = (-(j as f64)).exp();
                (j * j) as f64 * e / ((1.0 - e) * (1.0 - e))
            })
            .sum();
        assert!(rel(variance(Unrestricted, 1, 1.0, 1e-16).unwrap(), direct2) < 1e-13);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // d/ds F(-s) = -F'(-s)
        let h = 1e-5;
        for kind in [Unrestricted, Distinct] {
            for k in 1..=3 {
                for m in 0..=3 {
                    let s = 0.5;
                    let up = fulcrum_derivative(kind, k, m, s + h, EPS).unwrap();
                    let down = fulcrum_derivative(kind, k, m, s - h, EPS).unwrap();
                    let fd = -(up - down) / (2.0 * h);
                    let exact = fulcrum_derivative(kind, k, m + 1, s, EPS).unwrap();
                    assert!(rel(fd, exact) < 1e-6, "{kind} k={k} m={m}: {fd} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn complex_derivative_matches_real_on_axis() {
        for kind in [Unrestricted, Distinct] {
            for m in 0..=4 {
                let real = fulcrum_derivative(kind, 2, m, 0.2, EPS).unwrap();
                let cplx = fulcrum_derivative_complex(kind, 2, m, Complex64::new(-0.2, 0.0), EPS).unwrap();
                assert!(rel(cplx.re, real) < 1e-13 && cplx.im.abs() < 1e-13 * real.abs());
            }
        }
    }

    #[test]
    fn complex_derivative_matches_complex_finite_difference() {
        let z = Complex64::new(-0.4, 0.7);
        let h = 1e-5;
        for kind in [Unrestricted, Distinct] {
            let up = fulcrum(kind, 1, z + h, EPS).unwrap();
            let down = fulcrum(kind, 1, z - h, EPS).unwrap();
            let fd = (up - down) / (2.0 * h);
            let exact = fulcrum_derivative_complex(kind, 1, 1, z, EPS).unwrap();
            assert!((fd - exact).norm() < 1e-6 * exact.norm());
        }
    }

    #[test]
    fn increment_matches_difference_of_fulcrums() {
        for kind in [Unrestricted, Distinct] {
            let (s, phi) = (0.3, 0.9);
            let a = fulcrum(kind, 1, Complex64::new(-s, phi), EPS).unwrap();
            let b = fulcrum_real(kind, 1, s, EPS).unwrap();
            let inc = fulcrum_increment(kind, 1, s, phi, EPS).unwrap();
            assert!((inc - (a - b)).norm() < 1e-11);
        }
    }

    #[test]
    fn mean_for_large_s_is_one_term() {
        let m = mean(Unrestricted, 1, 20.0, EPS).unwrap();
        assert!(rel(m, (-20f64).exp()) < 1e-8);
    }

    #[test]
    fn variance_is_t_times_mean_derivative() {
        // sigma^2 = t dm/dt = -dm/ds
        let s = 0.3;
        let h = 1e-5;
        for kind in [Unrestricted, Distinct] {
            let dm = (mean(kind, 1, s + h, EPS).unwrap() - mean(kind, 1, s - h, EPS).unwrap()) / (2.0 * h);
            assert!(rel(-dm, variance(kind, 1, s, EPS).unwrap()) < 1e-5);
        }
    }

    #[test]
    fn mean_head_for_squares() {
        let c = constants(2, 2).unwrap();
        let s: f64 = 0.01;
        let head = c.omega(1) * s.powf(-1.5);
        assert!(rel(mean(Unrestricted, 2, s, EPS).unwrap(), head) < 0.05);
    }

    #[test]
    fn char_fn_basics() {
        let p = FamilyPoint::new(Unrestricted, 1, 0.1, EPS).unwrap();
        let at0 = p.char_fn(0.0).unwrap();
        assert_eq!(at0, Complex64::new(1.0, 0.0));
        for theta in [0.3, 1.0, 2.5, 7.0] {
            let c = p.char_fn(theta).unwrap();
            assert!(c.norm() <= 1.0 + 1e-12);
            let modulus = p.modulus_ratio(theta / p.sigma()).unwrap();
            assert!((c.norm() - modulus).abs() < 1e-13);
        }
    }

    #[test]
    fn char_fn_against_pmf_sum() {
        let s = 0.05;
        let p = FamilyPoint::new(Unrestricted, 1, s, EPS).unwrap();
        let n_max = (p.mean() + 20.0 * p.sigma()).ceil() as usize;
        let table = count_partitions(Unrestricted, 1, n_max).unwrap();
        let theta = 1.0;
        let mut acc = CompensatedComplexSum::new();
        for n in 0..=n_max {
            let w = pmf(&p, n, &table).unwrap();
            let angle = theta * (n as f64 - p.mean()) / p.sigma();
            acc.add(Complex64::from_polar(w, angle));
        }
        let direct = acc.value();
        let c = p.char_fn(theta).unwrap();
        assert!((direct - c).norm() < 1e-6, "{direct} vs {c}");
    }

    #[test]
    fn modulus_ratio_on_full_turns() {
        for kind in [Unrestricted, Distinct] {
            assert!((pgf_modulus_ratio(kind, 2, 0.2, 0.0, EPS).unwrap() - 1.0).abs() < 1e-15);
            let two_pi = 2.0 * std::f64::consts::PI;
            assert!((pgf_modulus_ratio(kind, 2, 0.2, two_pi, EPS).unwrap() - 1.0).abs() < 1e-12);
            let r = pgf_modulus_ratio(kind, 2, 0.2, 1.0, EPS).unwrap();
            assert!(r > 0.0 && r < 1.0);
        }
    }

    #[test]
    fn pmf_normalization_and_values() {
        let p = FamilyPoint::new(Unrestricted, 1, 1.0, 1e-16).unwrap();
        let table = count_partitions(Unrestricted, 1, 200).unwrap();
        assert!(rel(pmf(&p, 0, &table).unwrap(), (-p.log_normalizer()).exp()) < 1e-15);
        let product: f64 = (1..=60).map(|j| 1.0 / (1.0 - (-(j as f64)).exp())).product();
        assert!(rel(pmf(&p, 1, &table).unwrap(), (-1f64).exp() / product) < 1e-13);

        let q = FamilyPoint::new(Distinct, 1, 0.1, EPS).unwrap();
        let n_max = (q.mean() + 15.0 * q.sigma()).ceil() as usize;
        let table = count_partitions(Distinct, 1, n_max).unwrap();
        let total: CompensatedSum = (0..=n_max).map(|n| pmf(&q, n, &table).unwrap()).collect();
        assert!((total.value() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pmf_moments_match_fulcrum_moments() {
        for kind in [Unrestricted, Distinct] {
            let p = FamilyPoint::new(kind, 2, 0.05, EPS).unwrap();
            let n_max = 2 * (p.mean() + 40.0 * p.sigma()).ceil() as usize;
            assert!(p.mean() <= n_max as f64 / 2.0);
            let table = count_partitions(kind, 2, n_max).unwrap();
            let first: CompensatedSum = (0..=n_max).map(|n| n as f64 * pmf(&p, n, &table).unwrap()).collect();
            assert!(rel(first.value(), p.mean()) < 1e-6);
        }
    }

    #[test]
    fn pmf_rejects_mismatched_table() {
        let p = FamilyPoint::new(Unrestricted, 1, 1.0, EPS).unwrap();
        let table = count_partitions(Distinct, 1, 10).unwrap();
        assert!(matches!(pmf(&p, 1, &table), Err(Error::InvalidParameter { .. })));
        let table = count_partitions(Unrestricted, 1, 10).unwrap();
        assert!(pmf(&p, 11, &table).is_err());
    }

    #[test]
    fn mean_is_strictly_decreasing() {
        for kind in [Unrestricted, Distinct] {
            let grid: Vec<f64> = (0..40).map(|i| 2.0 * 0.85f64.powi(i)).collect();
            let means: Vec<f64> = grid.iter().map(|&s| mean(kind, 2, s, EPS).unwrap()).collect();
            assert!(means.windows(2).all(|w| w[1] > w[0]));
        }
    }

    fn monte_carlo_check(kind: PartitionKind, k: u32, s: f64) {
        let p = FamilyPoint::new(kind, k, s, EPS).unwrap();
        let draws = sample(&p, 100_000, 7).unwrap();
        let n = draws.len() as f64;
        let xs: Vec<f64> = draws.iter().map(|&d| d as f64).collect();
        let m = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        assert!((m - p.mean()).abs() < 5.0 * (var / n).sqrt(), "{kind}: mean {m} vs {}", p.mean());
        // standard error of the sample variance from the fourth central moment
        let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
        let se_var = ((m4 - var * var) / n).sqrt();
        assert!((var - p.variance()).abs() < 5.0 * se_var, "{kind}: var {var} vs {}", p.variance());
        let table = count_partitions(kind, k, 0).unwrap();
        let p0 = pmf(&p, 0, &table).unwrap();
        let f0 = draws.iter().filter(|&&d| d == 0).count() as f64 / n;
        assert!((f0 - p0).abs() < 5.0 * (p0 * (1.0 - p0) / n).sqrt() + 1e-12);
    }

    #[test]
    fn sampling_matches_moments() {
        monte_carlo_check(Unrestricted, 1, 0.5);
        monte_carlo_check(Unrestricted, 2, 0.3);
        monte_carlo_check(Distinct, 1, 0.5);
        monte_carlo_check(Distinct, 2, 0.1);
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = FamilyPoint::new(Unrestricted, 1, 0.2, EPS).unwrap();
        assert_eq!(sample(&p, 5000, 42).unwrap(), sample(&p, 5000, 42).unwrap());
        assert_ne!(sample(&p, 5000, 42).unwrap(), sample(&p, 5000, 43).unwrap());
        assert_eq!(sample(&p, 3000, 42).unwrap()[..], sample(&p, 5000, 42).unwrap()[..3000]);
        assert!(sample(&p, 0, 1).is_err());
    }
}
