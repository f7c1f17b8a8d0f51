//! Prints the observed values behind `fixtures/thresholds.toml`.
//!
//!     cargo run --release --example calibrate

use powerpart::bigcount::count_partitions;
use powerpart::diagnostics::{
    bd_condition_check, clt_empirical_check, default_phi_grid, default_s_grid, fulcrum_asymptotic_check,
    second_order_gaps, strong_gauss_l1, twl_bound_scan, DEFAULT_QUAD_TOL,
};
use powerpart::fixtures;
use powerpart::numeric::log_log_slope;
use powerpart::saddle::{bd_saddle, exact_saddle, hayman_estimate, hr_closed_form, DEFAULT_RTOL};
use powerpart::PartitionKind::{self, Distinct, Unrestricted};

fn deviations(values: &[f64]) -> String {
    values.iter().map(|v| format!("{:.4e}", (v - 1.0).abs())).collect::<Vec<_>>().join(" ")
}

fn main() {
    let fx = fixtures::load();
    let grid = default_s_grid();

    println!("[fulcrum] |ratio - 1| at s = {}, then along the default grid", fx.fulcrum.s_check);
    for kind in [Unrestricted, Distinct] {
        for k in [1u32, 2] {
            for m in 0..=3 {
                let at = fulcrum_asymptotic_check(kind, k, m, &[fx.fulcrum.s_check]).unwrap();
                let along = fulcrum_asymptotic_check(kind, k, m, &grid).unwrap();
                println!("  {kind} k={k} m={m}: {} | {}", deviations(&at), deviations(&along));
            }
        }
    }

    println!("[second_order] gaps on {:?}", fx.second_order.s_grid);
    for k in [1u32, 2] {
        println!("  k={k}: {:?}", second_order_gaps(k, &fx.second_order.s_grid, fx.second_order.resolution_ulps).unwrap());
    }

    println!("[hr] / [coherence] |exp(closed form)/p(n) - 1| and max pairwise |dlog|");
    let [lo, hi] = fx.hr.k1_exponents;
    let grids = [((lo..=hi).map(|e| 1u64 << e).collect::<Vec<_>>(), 1u32), (fx.hr.k2_grid.clone(), 2)];
    for (ns, k) in grids {
        let table = count_partitions(Unrestricted, k, *ns.last().unwrap() as usize).unwrap();
        for n in ns {
            let hr = hr_closed_form(k, n).unwrap();
            let exact = hayman_estimate(&exact_saddle(Unrestricted, k, n, DEFAULT_RTOL).unwrap()).unwrap();
            let bd = hayman_estimate(&bd_saddle(Unrestricted, k, n).unwrap()).unwrap();
            let logs = [exact.log_value, bd.log_value, hr.log_value];
            let spread = logs.iter().fold(f64::MIN, |a, &b| a.max(b)) - logs.iter().fold(f64::MAX, |a, &b| a.min(b));
            println!("  k={k} n={n}: {:.4e} {:.4e}", (hr.log_ratio_to(&table).unwrap().exp() - 1.0).abs(), spread);
        }
    }

    println!("[bd] slopes");
    for k in [1u32, 2] {
        println!("  k={k}: {:.4}", log_log_slope(&grid, &bd_condition_check(k, &grid).unwrap()));
    }

    println!("[strong] L1 on {:?}", fx.strong.s_grid);
    for k in [1u32, 2] {
        let v: Vec<f64> = fx.strong.s_grid.iter().map(|&s| strong_gauss_l1(Unrestricted, k, s, DEFAULT_QUAD_TOL).unwrap()).collect();
        println!("  k={k}: {v:?}");
    }

    println!("[twl] d1, d2 on {:?}", fx.twl.s_grid);
    let phi = default_phi_grid(fx.twl.phi_points);
    for k in [1u32, 2] {
        for &s in &fx.twl.s_grid {
            let f = twl_bound_scan(Unrestricted, k, s, &phi).unwrap();
            println!("  k={k} s={s}: d1={:.4} d2={:.4} violations={}", f.d1, f.d2, f.violations);
        }
    }

    println!("[clt] KS on {:?}, {} draws, seed {}", fx.clt.s_grid, fx.clt.draws, fx.clt.seed);
    let cases: [(PartitionKind, u32); 3] = [(Unrestricted, 1), (Unrestricted, 2), (Distinct, 2)];
    for (kind, k) in cases {
        let v: Vec<f64> = fx
            .clt
            .s_grid
            .iter()
            .map(|&s| clt_empirical_check(kind, k, s, fx.clt.draws, fx.clt.seed).unwrap())
            .collect();
        println!("  {kind} k={k}: {v:?}");
    }
}
