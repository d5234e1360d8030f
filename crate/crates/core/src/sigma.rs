//! The singular constant `Σ_k(q) = Σ_{χ^k = χ₀} χ(−1)`.
//!
//! Three evaluators are kept side by side:
//!
//! * [`sigma_char_sum`] enumerates all characters mod `q` (the definition),
//! * [`sigma_bruteforce`] counts units `x` with `x^k ≡ −1 (mod q)`,
//! * [`sigma_closed_form`] multiplies per-prime-power case formulas.
//!
//! The closed form has two tables for powers of two. [`ClosedFormMode::Paper`]
//! reproduces the published case list; [`ClosedFormMode::Corrected`] is the
//! table read off the solution counts, which is `1` when `α = 1` or `k` is
//! odd and `0` otherwise (an odd unit's even power is `≡ 1 (mod 4)`, so it
//! never reaches `−1` once `4 | q`).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{factorize, gcd, pow_mod};
use crate::characters::UnitGroup;
use crate::error::invalid;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosedFormMode {
    Paper,
    #[default]
    Corrected,
}

impl fmt::Display for ClosedFormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClosedFormMode::Paper => "paper",
            ClosedFormMode::Corrected => "corrected",
        })
    }
}

impl FromStr for ClosedFormMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Self::Paper),
            "corrected" => Ok(Self::Corrected),
            other => Err(invalid(format!("unknown mode {other:?} (expected paper|corrected)"))),
        }
    }
}

fn check_args(q: u64, k: u64) -> Result<()> {
    if q == 0 {
        return Err(invalid("q must be at least 1"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    Ok(())
}

/// `Σ_k(q)` from its definition, by enumerating all `φ(q)` characters.
pub fn sigma_char_sum(q: u64, k: u64) -> Result<i64> {
    check_args(q, k)?;
    let group = UnitGroup::new(q)?;
    Ok(sigma_char_sum_in(&group, k))
}

/// `Σ_k(q)` over a prebuilt group.
pub fn sigma_char_sum_in(group: &UnitGroup, k: u64) -> i64 {
    group
        .characters()
        .filter(|chi| chi.pow(k).is_principal())
        .map(|chi| chi.parity())
        .sum()
}

/// Number of characters with `χ^k = χ₀`.
pub fn kth_power_trivial_count(group: &UnitGroup, k: u64) -> u64 {
    group.characters().filter(|chi| chi.pow(k).is_principal()).count() as u64
}

/// `#{1 ≤ x ≤ q : gcd(x, q) = 1, x^k ≡ −1 (mod q)}`, with `Σ_k(1) = 1`.
pub fn sigma_bruteforce(q: u64, k: u64) -> Result<i64> {
    check_args(q, k)?;
    if q == 1 {
        return Ok(1);
    }
    let target = q - 1;
    Ok((1..=q)
        .filter(|&x| gcd(x, q) == 1 && pow_mod(x, k, q) == target)
        .count() as i64)
}

/// Closed-form value together with one case label per prime-power factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub value: i64,
    pub case_trace: Vec<String>,
}

/// `Σ_k(q)` as a product of per-prime-power closed forms.
pub fn sigma_closed_form(q: u64, k: u64, mode: ClosedFormMode) -> Result<i64> {
    Ok(sigma_closed_form_traced(q, k, mode)?.value)
}

pub fn sigma_closed_form_traced(q: u64, k: u64, mode: ClosedFormMode) -> Result<ClosedForm> {
    check_args(q, k)?;
    let mut value = 1i64;
    let mut case_trace = Vec::new();
    for (p, alpha) in factorize(q)? {
        let (v, label) = if p == 2 {
            match mode {
                ClosedFormMode::Paper => two_power_paper(alpha, k),
                ClosedFormMode::Corrected => two_power_corrected(alpha, k),
            }
        } else {
            odd_prime_power(p, alpha, k)
        };
        case_trace.push(format!("{p}^{alpha}: {label} => {v}"));
        value *= v;
    }
    Ok(ClosedForm { value, case_trace })
}

fn odd_prime_power(p: u64, alpha: u32, k: u64) -> (i64, String) {
    let phi = (p - 1) * p.pow(alpha - 1);
    let d = gcd(k, phi);
    let delta = phi / d;
    let value = if delta % 2 == 0 {
        d as i64
    } else if d % 2 == 0 {
        0
    } else {
        1
    };
    let parity = if delta % 2 == 0 { "even" } else { "odd" };
    (value, format!("(k,phi)={d} delta={delta} {parity}"))
}

/// 2-adic valuation of `k`.
fn two_adic(k: u64) -> u32 {
    k.trailing_zeros()
}

fn two_power_paper(alpha: u32, k: u64) -> (i64, String) {
    let beta = two_adic(k);
    let phi = 1u64 << (alpha - 1);
    if alpha == 1 || k % 2 == 1 {
        return (1, format!("alpha={alpha} beta={beta} alpha=1 or k odd"));
    }
    if alpha == 2 {
        return (0, format!("alpha=2 beta={beta} k even"));
    }
    let a = alpha as i64;
    let b = beta as i64;
    if b >= a - 2 {
        let d = gcd(k, phi) as i64;
        (d, format!("alpha={alpha} beta={beta} beta>=alpha-2 => (k,phi)"))
    } else if b >= 3 {
        (1 << beta, format!("alpha={alpha} beta={beta} 3<=beta<alpha-2 => 2^beta"))
    } else {
        // 1 ≤ β ≤ 2 < α − 2 is missing from the stated case list; the proof's
        // branch "1 ≤ β < α − 2" gives 2^β here.
        (1 << beta, format!("alpha={alpha} beta={beta} uncovered 1<=beta<3, proof branch => 2^beta"))
    }
}

fn two_power_corrected(alpha: u32, k: u64) -> (i64, String) {
    let beta = two_adic(k);
    if alpha == 1 || k % 2 == 1 {
        (1, format!("alpha={alpha} beta={beta} alpha=1 or k odd"))
    } else {
        (0, format!("alpha={alpha} beta={beta} alpha>=2 and k even"))
    }
}

/// One row of the three-way adjudication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SigmaReport {
    pub q: u64,
    pub k: u64,
    pub mode: ClosedFormMode,
    pub via_char_sum: i64,
    pub via_closed_form: i64,
    pub via_bruteforce: i64,
    pub agree: bool,
    pub case_trace: Vec<String>,
}

impl SigmaReport {
    /// The definition and the solution count differ; this would be a bug.
    pub fn oracle_mismatch(&self) -> bool {
        self.via_char_sum != self.via_bruteforce
    }

    pub fn closed_form_mismatch(&self) -> bool {
        self.via_closed_form != self.via_char_sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModulusFilter {
    #[default]
    All,
    OddOnly,
}

impl ModulusFilter {
    fn admits(self, q: u64) -> bool {
        match self {
            ModulusFilter::All => true,
            ModulusFilter::OddOnly => q % 2 == 1,
        }
    }
}

/// Runs all three evaluators over `1 ≤ q ≤ q_max`, `1 ≤ k ≤ k_max`.
///
/// Rows are sorted by `q` then `k` regardless of how the grid is sharded.
pub fn verify_sigma(
    q_max: u64,
    k_max: u64,
    mode: ClosedFormMode,
    filter: ModulusFilter,
) -> Result<Vec<SigmaReport>> {
    if q_max == 0 || k_max == 0 {
        return Err(invalid("q_max and k_max must be at least 1"));
    }
    let per_q: Vec<Result<Vec<SigmaReport>>> = (1..=q_max)
        .into_par_iter()
        .filter(|&q| filter.admits(q))
        .map(|q| {
            let group = UnitGroup::new(q)?;
            (1..=k_max)
                .map(|k| {
                    let via_char_sum = sigma_char_sum_in(&group, k);
                    let via_bruteforce = sigma_bruteforce(q, k)?;
                    let closed = sigma_closed_form_traced(q, k, mode)?;
                    Ok(SigmaReport {
                        q,
                        k,
                        mode,
                        via_char_sum,
                        via_closed_form: closed.value,
                        via_bruteforce,
                        agree: via_char_sum == via_bruteforce && via_char_sum == closed.value,
                        case_trace: closed.case_trace,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for chunk in per_q {
        rows.extend(chunk?);
    }
    Ok(rows)
}

/// `sigma_bruteforce(2^α, k)` for `1 ≤ α ≤ alpha_max`, `1 ≤ k ≤ k_max`,
/// row-major in `α`.
pub fn two_power_table(alpha_max: u32, k_max: u64) -> Result<Vec<(u32, u64, i64)>> {
    let mut out = Vec::new();
    for alpha in 1..=alpha_max {
        for k in 1..=k_max {
            out.push((alpha, k, sigma_bruteforce(1 << alpha, k)?));
        }
    }
    Ok(out)
}
