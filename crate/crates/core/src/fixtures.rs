//! Thresholds, burn-in indices and grids for the numerical checks.
//!
//! They live in `fixtures/thresholds.toml`, next to the commands that
//! produced them, and are compiled into the library.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::PartitionKind;

const SOURCE: &str = include_str!("../fixtures/thresholds.toml");

#[derive(Debug, Clone, Deserialize)]
pub struct Fixtures {
    pub fulcrum: FulcrumFixture,
    pub second_order: SecondOrderFixture,
    pub gauss: GaussFixture,
    pub hr: HrFixture,
    pub coherence: CoherenceFixture,
    pub bd: BdFixture,
    pub strong: StrongFixture,
    pub twl: TwlFixture,
    pub em: EmFixture,
    pub clt: CltFixture,
    pub domination: DominationFixture,
}

/// Per-`m` tolerances (index `m = 0..=3`) for `k = 1, 2`.
#[derive(Debug, Clone, Deserialize)]
pub struct PerM {
    pub k1: [f64; 4],
    pub k2: [f64; 4],
}

impl PerM {
    /// Infinite (no threshold) outside the calibrated range.
    fn get(&self, k: u32, m: u32) -> f64 {
        let row = match k {
            1 => &self.k1,
            2 => &self.k2,
            _ => return f64::INFINITY,
        };
        row.get(m as usize).copied().unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct FulcrumFixture {
    pub s_check: f64,
    pub burn_in: usize,
    /// `|ratio - 1|` allowed at `s_check`.
    pub tolerance: PerM,
    /// `|ratio - 1|` allowed at the smallest default-grid value, `P_k`.
    pub grid_final: PerM,
    /// Same for `Q_k`.
    pub grid_final_distinct: PerM,
    /// Deviations below this are at the `f64` floor and count as zero.
    pub resolved: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SecondOrderFixture {
    pub s_grid: Vec<f64>,
    pub final_gap_k1: f64,
    pub final_gap_k2: f64,
    /// Gaps below this many ulp of `|F(-s)|` count as zero.
    pub resolution_ulps: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GaussFixture {
    pub slope_tolerance: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct HrFixture {
    pub k1_exponents: [u32; 2],
    pub k1_burn_in: usize,
    pub k1_final: f64,
    pub k2_grid: Vec<u64>,
    pub k2_burn_in: usize,
    pub k2_final: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CoherenceFixture {
    pub k1_max_pairwise: f64,
    pub k2_max_pairwise: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BdFixture {
    pub burn_in: usize,
    pub k1_slope: f64,
    pub k1_tolerance: f64,
    pub k2_slope: f64,
    pub k2_tolerance: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StrongFixture {
    pub s_grid: Vec<f64>,
    pub final_k1: f64,
    pub final_k2: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TwlFixture {
    pub s_grid: Vec<f64>,
    pub phi_points: usize,
    pub d1_floor_k1: f64,
    pub d2_floor_k1: f64,
    pub d1_floor_k2: f64,
    pub d2_floor_k2: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EmFixture {
    pub quad_tol: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CltFixture {
    pub s_grid: Vec<f64>,
    pub draws: usize,
    pub ks_threshold: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DominationFixture {
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
    pub relative_slack: f64,
}

impl Fixtures {
    pub fn fulcrum_tolerance(&self, k: u32, m: u32) -> f64 {
        self.fulcrum.tolerance.get(k, m)
    }

    pub fn fulcrum_grid_threshold(&self, kind: PartitionKind, k: u32, m: u32) -> f64 {
        match kind {
            PartitionKind::Unrestricted => self.fulcrum.grid_final.get(k, m),
            PartitionKind::Distinct => self.fulcrum.grid_final_distinct.get(k, m),
        }
    }

    pub fn second_order_final(&self, k: u32) -> f64 {
        match k {
            1 => self.second_order.final_gap_k1,
            2 => self.second_order.final_gap_k2,
            _ => f64::INFINITY,
        }
    }

    /// Calibrated for `P_k`, `k = 1, 2`; infinite elsewhere.
    pub fn strong_threshold(&self, kind: PartitionKind, k: u32) -> f64 {
        match (kind, k) {
            (PartitionKind::Unrestricted, 1) => self.strong.final_k1,
            (PartitionKind::Unrestricted, 2) => self.strong.final_k2,
            _ => f64::INFINITY,
        }
    }

    /// Calibrated for `P_k`, `k = 1, 2`; elsewhere only positivity is asked for.
    pub fn twl_floors(&self, kind: PartitionKind, k: u32) -> (f64, f64) {
        match (kind, k) {
            (PartitionKind::Unrestricted, 1) => (self.twl.d1_floor_k1, self.twl.d2_floor_k1),
            (PartitionKind::Unrestricted, 2) => (self.twl.d1_floor_k2, self.twl.d2_floor_k2),
            _ => (0.0, 0.0),
        }
    }

    /// The KS threshold applies to `P_1`; elsewhere it is infinite.
    pub fn ks_threshold(&self, kind: PartitionKind, k: u32) -> f64 {
        if kind == PartitionKind::Unrestricted && k == 1 {
            self.clt.ks_threshold
        } else {
            f64::INFINITY
        }
    }

    /// Target slope and tolerance; `1/(2k)` with the wider tolerance beyond `k = 2`.
    pub fn bd_slope(&self, k: u32) -> (f64, f64) {
        match k {
            1 => (self.bd.k1_slope, self.bd.k1_tolerance),
            2 => (self.bd.k2_slope, self.bd.k2_tolerance),
            _ => (0.5 / k as f64, self.bd.k1_tolerance),
        }
    }
}

pub fn load() -> &'static Fixtures {
    static CELL: OnceLock<Fixtures> = OnceLock::new();
    CELL.get_or_init(|| toml::from_str(SOURCE).expect("embedded fixture file parses"))
}
