//! Representation counts `ψ_{2,k}(n) = Σ_{m₁^k + m₂^k = n} Λ(m₁)Λ(m₂)` and the
//! averages `G_{q,k}(N) = Σ_{n ≤ N, q | n} ψ_{2,k}(n)`.
//!
//! Pairs are ordered: `(m₁, m₂)` and `(m₂, m₁)` both count, the diagonal once.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::arith::{euler_phi, iroot, weighted_prime_powers};
use crate::error::invalid;
use crate::sigma::{sigma_closed_form, ClosedFormMode};
use crate::summation::NeumaierSum;
use crate::Result;

/// Prime powers `m₁` per work unit. Fixed so that the floating-point
/// accumulation order never depends on the thread count.
const BLOCK: usize = 32;
/// Blocks evaluated concurrently before being folded into the table.
const WAVE: usize = 64;

/// Sparse map `n ↦ ψ_{2,k}(n)` over representable `n ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationTable {
    n_max: u64,
    k: u32,
    entries: BTreeMap<u64, f64>,
}

impl RepresentationTable {
    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: u64) -> Option<f64> {
        self.entries.get(&n).copied()
    }

    /// Entries in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().map(|(&n, &v)| (n, v))
    }

    /// `G_{q,k}(N)` for the table's own `N`.
    pub fn g_qk(&self, q: u64) -> f64 {
        self.g_qk_upto(q, self.n_max)
    }

    /// `Σ_{n ≤ bound, q | n} ψ_{2,k}(n)` with compensated summation.
    pub fn g_qk_upto(&self, q: u64, bound: u64) -> f64 {
        assert!(q >= 1, "q must be positive");
        self.entries
            .range(..=bound)
            .filter(|(&n, _)| n % q == 0)
            .map(|(_, &v)| v)
            .collect::<NeumaierSum>()
            .value()
    }

    /// Sum of `ψ_{2,k}(n)` over `n ≤ N` with `n ≡ r (mod q)`.
    pub fn residue_class_sum(&self, q: u64, r: u64) -> f64 {
        self.entries
            .iter()
            .filter(|(&n, _)| n % q == r % q)
            .map(|(_, &v)| v)
            .collect::<NeumaierSum>()
            .value()
    }
}

/// Builds `ψ_{2,k}(n)` for all `n ≤ N` by a double loop over prime powers.
///
/// Work is split into fixed blocks of `m₁` that run on the current rayon
/// pool; blocks are folded in order, so the table is bit-identical for any
/// worker count. `N < 2^{k+1}` yields an empty table.
pub fn build_rep_table(n_max: u64, k: u32) -> Result<RepresentationTable> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let top = iroot(n_max, k);
    let pps = weighted_prime_powers(top)?;
    let powers: Vec<(u64, f64)> = pps
        .iter()
        .map(|&(m, l)| (m.pow(k), l))
        .collect();

    let blocks: Vec<&[(u64, f64)]> = powers.chunks(BLOCK).collect();
    let mut acc: HashMap<u64, f64> = HashMap::new();
    for wave in blocks.chunks(WAVE) {
        let partials: Vec<Vec<(u64, f64)>> = wave
            .par_iter()
            .map(|block| block_contributions(block, &powers, n_max))
            .collect();
        for part in partials {
            for (n, v) in part {
                *acc.entry(n).or_insert(0.0) += v;
            }
        }
    }
    Ok(RepresentationTable {
        n_max,
        k,
        entries: acc.into_iter().collect(),
    })
}

/// Contributions of one block of `m₁`, summed per `n` in increasing `m₁`.
fn block_contributions(block: &[(u64, f64)], powers: &[(u64, f64)], n_max: u64) -> Vec<(u64, f64)> {
    let mut out: Vec<(u64, f64)> = Vec::new();
    for &(a, la) in block {
        for &(b, lb) in powers {
            let n = a + b;
            if n > n_max {
                break;
            }
            out.push((n, la * lb));
        }
    }
    // Stable: equal n keep their m₁ order.
    out.sort_by_key(|&(n, _)| n);
    let mut merged: Vec<(u64, f64)> = Vec::with_capacity(out.len());
    for (n, v) in out {
        match merged.last_mut() {
            Some((m, acc)) if *m == n => *acc += v,
            _ => merged.push((n, v)),
        }
    }
    merged
}

/// `G_{q,k}(N)` from a table.
pub fn g_qk(table: &RepresentationTable, q: u64) -> f64 {
    table.g_qk(q)
}

/// One point of the main-term ratio scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub n: u64,
    pub q: u64,
    pub k: u32,
    pub g_qk: f64,
    pub g_1k: f64,
    pub sigma: i64,
    pub phi: u64,
    /// `G_{q,k}·φ(q) / (Σ_k(q)·G_{1,k})`; undefined when `Σ_k(q) = 0`.
    pub ratio: Option<f64>,
    /// `G_{q,k} − (Σ_k(q)/φ(q))·G_{1,k}`.
    pub residual: f64,
    /// `residual / (N^{1/k} log² N)`.
    pub residual_normalized: f64,
}

impl RatioRow {
    pub fn ratio_error(&self) -> Option<f64> {
        self.ratio.map(|r| (r - 1.0).abs())
    }
}

fn check_grid(grid: &[u64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("grid must not be empty"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("grid must be strictly ascending"));
    }
    if grid[0] < 2 {
        return Err(invalid("grid values must be at least 2"));
    }
    Ok(())
}

/// Compares `G_{q,k}(N)` against `(Σ_k(q)/φ(q))·G_{1,k}(N)` along a grid.
///
/// `Σ_k(q)` comes from the corrected closed form. A single table at the
/// largest `N` serves every grid point.
pub fn ratio_scan(grid: &[u64], q: u64, k: u32) -> Result<Vec<RatioRow>> {
    ratio_scan_with_mode(grid, q, k, ClosedFormMode::Corrected)
}

/// [`ratio_scan`] with `Σ_k(q)` taken from the given closed-form table.
pub fn ratio_scan_with_mode(grid: &[u64], q: u64, k: u32, mode: ClosedFormMode) -> Result<Vec<RatioRow>> {
    check_grid(grid)?;
    if q < 2 {
        return Err(invalid("q must be at least 2"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let sigma = sigma_closed_form(q, k as u64, mode)?;
    let phi = euler_phi(q)?;
    let table = build_rep_table(*grid.last().unwrap(), k)?;
    Ok(grid
        .iter()
        .map(|&n| {
            let g_qk = table.g_qk_upto(q, n);
            let g_1k = table.g_qk_upto(1, n);
            let main = sigma as f64 / phi as f64 * g_1k;
            let ratio = (sigma != 0).then(|| g_qk * phi as f64 / (sigma as f64 * g_1k));
            let residual = g_qk - main;
            let nf = n as f64;
            let scale = nf.powf(1.0 / k as f64) * nf.ln().powi(2);
            RatioRow {
                n,
                q,
                k,
                g_qk,
                g_1k,
                sigma,
                phi,
                ratio,
                residual,
                residual_normalized: residual / scale,
            }
        })
        .collect())
}

/// Growth of `G_{1,k}(N)` under two normalisations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u64,
    pub k: u32,
    pub g_1k: f64,
    /// `G_{1,k}(N) / N^{1+1/k}`.
    pub heuristic_normalized: f64,
    /// `G_{1,k}(N) / N^{2/k}`.
    pub area_normalized: f64,
    /// `Γ(1+1/k)² / Γ(1+2/k)`, the area of `{x, y ≥ 0 : x^k + y^k ≤ 1}`.
    pub area_constant: f64,
}

/// `G_{1,k}(N)` along a grid, normalised by `N^{1+1/k}` and by `N^{2/k}`.
///
/// Replacing `Λ` by its mean value turns `G_{1,k}(N)` into a lattice-point
/// count in `{m₁^k + m₂^k ≤ N}`, whose size is `N^{2/k}` times the area
/// constant; the `N^{1+1/k}` column is reported alongside for comparison.
pub fn g1k_growth_probe(grid: &[u64], k: u32) -> Result<Vec<GrowthRow>> {
    check_grid(grid)?;
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let table = build_rep_table(*grid.last().unwrap(), k)?;
    let kf = k as f64;
    let area_constant = gamma(1.0 + 1.0 / kf).powi(2) / gamma(1.0 + 2.0 / kf);
    Ok(grid
        .iter()
        .map(|&n| {
            let g_1k = table.g_qk_upto(1, n);
            let nf = n as f64;
            GrowthRow {
                n,
                k,
                g_1k,
                heuristic_normalized: g_1k / nf.powf(1.0 + 1.0 / kf),
                area_normalized: g_1k / nf.powf(2.0 / kf),
                area_constant,
            }
        })
        .collect())
}
