//! Exact coefficients of `P_k` and `Q_k`.
//!
//! Two independent routes produce the same table:
//!
//! - [`count_partitions`]: dense knapsack over the parts `j^k <= n_max`
//!   (unbounded multiplicity for `P_k`, 0/1 for `Q_k`);
//! - [`count_via_log_recurrence`]: `n a_n = sum_{m=1}^{n} c(m) a_{n-m}`, where
//!   `c = delta_k` for `P_k` and `c = epsilon_k` for `Q_k` are the
//!   coefficients of `z d/dz ln f`.

use std::io::Write;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::check_k;
use crate::numeric::ln_biguint;
use crate::{Error, PartitionKind, Result};

/// Exact coefficients `a_0..=a_{n_max}` of `P_k` or `Q_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    kind: PartitionKind,
    k: u32,
    coeffs: Vec<BigUint>,
}

impl CoeffTable {
    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.coeffs.get(n)
    }

    /// `ln a_n`, or `None` when `a_n = 0` or `n` is out of range.
    pub fn ln_coeff(&self, n: usize) -> Option<f64> {
        self.coeffs.get(n).and_then(ln_biguint)
    }

    /// Writes `n,coeff` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,coeff")?;
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{n},{c}")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CoeffTableRepr::from(self)).expect("table serializes")
    }
}

/// Wire form: big integers as exact decimal strings.
#[derive(Serialize, Deserialize)]
struct CoeffTableRepr {
    kind: PartitionKind,
    k: u32,
    n_max: usize,
    coeffs: Vec<String>,
}

impl From<&CoeffTable> for CoeffTableRepr {
    fn from(t: &CoeffTable) -> Self {
        CoeffTableRepr {
            kind: t.kind,
            k: t.k,
            n_max: t.n_max(),
            coeffs: t.coeffs.iter().map(|c| c.to_str_radix(10)).collect(),
        }
    }
}

impl Serialize for CoeffTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffTableRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoeffTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CoeffTableRepr::deserialize(d)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|c| c.parse::<BigUint>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if coeffs.len() != repr.n_max + 1 {
            return Err(D::Error::custom("coeffs length does not match n_max"));
        }
        if repr.k == 0 {
            return Err(D::Error::custom("k must be positive"));
        }
        Ok(CoeffTable {
            kind: repr.kind,
            k: repr.k,
            coeffs,
        })
    }
}

/// The k-th powers `1, 2^k, 3^k, ...` not exceeding `limit`.
pub fn kth_powers_up_to(k: u32, limit: u64) -> Vec<u64> {
    (1u64..)
        .map(|j| j.checked_pow(k))
        .take_while(|p| matches!(p, Some(p) if *p <= limit))
        .flatten()
        .collect()
}

/// Number of big-integer additions the knapsack performs.
pub fn knapsack_cost(k: u32, n_max: usize) -> u128 {
    kth_powers_up_to(k.max(1), n_max as u64)
        .iter()
        .map(|&p| (n_max as u128 + 1).saturating_sub(p as u128))
        .sum()
}

pub fn count_partitions(kind: PartitionKind, k: u32, n_max: usize) -> Result<CoeffTable> {
    check_k(k)?;
    let mut coeffs = vec![BigUint::zero(); n_max + 1];
    coeffs[0] = BigUint::one();
    for part in kth_powers_up_to(k, n_max as u64) {
        let part = part as usize;
        match kind {
            PartitionKind::Unrestricted => {
                for n in part..=n_max {
                    let (lo, hi) = coeffs.split_at_mut(n);
                    hi[0] += &lo[n - part];
                }
            }
            PartitionKind::Distinct => {
                for n in (part..=n_max).rev() {
                    let (lo, hi) = coeffs.split_at_mut(n);
                    if !lo[n - part].is_zero() {
                        hi[0] += &lo[n - part];
                    }
                }
            }
        }
    }
    Ok(CoeffTable { kind, k, coeffs })
}

/// `delta_k(n) = sum_{j^k | n} j^k`.
pub fn delta_k(k: u32, n: u64) -> Result<BigUint> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    let sum: u128 = kth_powers_up_to(k, n)
        .into_iter()
        .filter(|&p| n.is_multiple_of(p))
        .map(u128::from)
        .sum();
    Ok(BigUint::from(sum))
}

/// `epsilon_k(n) = -sum_{j^k | n} (-1)^{n / j^k} j^k`.
pub fn epsilon_k(k: u32, n: u64) -> Result<BigInt> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    let sum: i128 = kth_powers_up_to(k, n)
        .into_iter()
        .filter(|&p| n.is_multiple_of(p))
        .map(|p| if (n / p) % 2 == 1 { p as i128 } else { -(p as i128) })
        .sum();
    Ok(BigInt::from(sum))
}

/// `delta_k(1..=n_max)` by the `j^k`-strided sieve; index 0 holds 0.
pub fn delta_sieve(k: u32, n_max: usize) -> Vec<u64> {
    let mut out = vec![0u64; n_max + 1];
    for p in kth_powers_up_to(k.max(1), n_max as u64) {
        let p = p as usize;
        for m in (p..=n_max).step_by(p) {
            out[m] += p as u64;
        }
    }
    out
}

/// `epsilon_k(1..=n_max)` by the same sieve; index 0 holds 0.
pub fn epsilon_sieve(k: u32, n_max: usize) -> Vec<i64> {
    let mut out = vec![0i64; n_max + 1];
    for p in kth_powers_up_to(k.max(1), n_max as u64) {
        let p = p as usize;
        for (q, m) in (p..=n_max).step_by(p).enumerate() {
            // q counts from 0, so m / p = q + 1
            if q % 2 == 0 {
                out[m] += p as i64;
            } else {
                out[m] -= p as i64;
            }
        }
    }
    out
}

pub fn count_via_log_recurrence(kind: PartitionKind, k: u32, n_max: usize) -> Result<CoeffTable> {
    check_k(k)?;
    let weights: Vec<i64> = match kind {
        PartitionKind::Unrestricted => delta_sieve(k, n_max).into_iter().map(|d| d as i64).collect(),
        PartitionKind::Distinct => epsilon_sieve(k, n_max),
    };
    let mut coeffs: Vec<BigInt> = Vec::with_capacity(n_max + 1);
    coeffs.push(BigInt::one());
    for n in 1..=n_max {
        let mut acc = BigInt::zero();
        for m in 1..=n {
            let w = weights[m];
            if w != 0 && !coeffs[n - m].is_zero() {
                acc += &coeffs[n - m] * w;
            }
        }
        let (quot, rem) = acc.div_rem(&BigInt::from(n));
        if !rem.is_zero() || quot.sign() == Sign::Minus {
            return Err(Error::InexactDivision { index: n });
        }
        coeffs.push(quot);
    }
    let coeffs = coeffs
        .into_iter()
        .map(|c| c.to_biguint().expect("checked nonnegative"))
        .collect();
    Ok(CoeffTable { kind, k, coeffs })
}

/// Outcome of checking `P_k(z) = Q_k(z) P_k(z^2)` coefficientwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProductIdentityReport {
    pub k: u32,
    pub n_max: usize,
    /// First index where the convolution differs from `p_k(n)`.
    pub first_failure: Option<usize>,
}

impl ProductIdentityReport {
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

pub fn verify_product_identity(k: u32, n_max: usize) -> Result<ProductIdentityReport> {
    let p = count_partitions(PartitionKind::Unrestricted, k, n_max)?;
    let q = count_partitions(PartitionKind::Distinct, k, n_max)?;
    Ok(check_product_identity(&p, &q))
}

/// Same check on precomputed tables of equal length and the same `k`.
pub fn check_product_identity(p: &CoeffTable, q: &CoeffTable) -> ProductIdentityReport {
    let n_max = p.n_max().min(q.n_max());
    let support: Vec<usize> = (0..=n_max).filter(|&i| !q.coeffs[i].is_zero()).collect();
    let first_failure = (0..=n_max).find(|&n| {
        let mut acc = BigUint::zero();
        for &i in support.iter().take_while(|&&i| i <= n) {
            if (n - i) % 2 == 0 {
                acc += &q.coeffs[i] * &p.coeffs[(n - i) / 2];
            }
        }
        acc != p.coeffs[n]
    });
    ProductIdentityReport {
        k: p.k,
        n_max,
        first_failure,
    }
}
