//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use primepow::analytic::{gqk_by_quadrature, i_n_at, i_n_direct, EvalPoint, PowerSeries, TruncationPolicy};
use primepow::arith::gcd;
use primepow::characters::{RootSum, UnitGroup};
use primepow::reps::{build_rep_table, ratio_scan};
use primepow::sigma::{
    sigma_bruteforce, sigma_char_sum, sigma_char_sum_in, sigma_closed_form, ClosedFormMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1_char_sum_equals_bruteforce() -> Outcome {
    let mut cases = 0;
    for q in 1..=2000u64 {
        let group = UnitGroup::new(q).map_err(|e| e.to_string())?;
        for k in 1..=12u64 {
            let a = sigma_char_sum_in(&group, k);
            let b = sigma_bruteforce(q, k).map_err(|e| e.to_string())?;
            check(a == b, || format!("q={q} k={k}: char sum {a}, bruteforce {b}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases"))
}

fn prime_powers_up_to(limit: u64, odd: bool) -> Vec<(u64, u64, u32)> {
    let mut out = Vec::new();
    for p in 2..=limit {
        if (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) || (odd && p == 2) || (!odd && p != 2) {
            continue;
        }
        let (mut pa, mut a) = (p, 1);
        while pa <= limit {
            out.push((p, pa, a));
            pa *= p;
            a += 1;
        }
    }
    out
}

fn ac2_closed_form() -> Outcome {
    let mut odd_cases = 0;
    for (_, q, _) in prime_powers_up_to(5000, true) {
        for k in 1..=12u64 {
            let oracle = sigma_bruteforce(q, k).map_err(|e| e.to_string())?;
            for mode in [ClosedFormMode::Paper, ClosedFormMode::Corrected] {
                let c = sigma_closed_form(q, k, mode).map_err(|e| e.to_string())?;
                check(c == oracle, || format!("{mode} q={q} k={k}: closed {c}, oracle {oracle}"))?;
            }
            odd_cases += 1;
        }
    }
    let mut paper_discrepancies = Vec::new();
    let mut two_cases = 0;
    for (_, q, _) in prime_powers_up_to(1024, false) {
        for k in 1..=16u64 {
            let oracle = sigma_bruteforce(q, k).map_err(|e| e.to_string())?;
            let corrected = sigma_closed_form(q, k, ClosedFormMode::Corrected).map_err(|e| e.to_string())?;
            check(corrected == oracle, || format!("corrected q={q} k={k}: {corrected} vs oracle {oracle}"))?;
            let paper = sigma_closed_form(q, k, ClosedFormMode::Paper).map_err(|e| e.to_string())?;
            if paper != oracle {
                paper_discrepancies.push((q, k));
            }
            two_cases += 1;
        }
    }
    check(paper_discrepancies.contains(&(8, 2)), || "paper-mode list lacks (8,2)".into())?;
    let shown: Vec<String> = paper_discrepancies.iter().take(6).map(|(q, k)| format!("({q},{k})")).collect();
    Ok(format!(
        "{odd_cases} odd prime-power cases; {two_cases} 2-power cases match in corrected mode; paper mode differs on {} incl. {} ...",
        paper_discrepancies.len(),
        shown.join(" ")
    ))
}

fn ac3_multiplicativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut cache: HashMap<(u64, u64), i64> = HashMap::new();
    let mut sigma = |q: u64, k: u64| -> Result<i64, String> {
        if let Some(&v) = cache.get(&(q, k)) {
            return Ok(v);
        }
        let v = sigma_char_sum(q, k).map_err(|e| e.to_string())?;
        cache.insert((q, k), v);
        Ok(v)
    };
    let mut done = 0;
    while done < 500 {
        let a = rng.gen_range(1..=300u64);
        let b = rng.gen_range(1..=300u64);
        if gcd(a, b) != 1 {
            continue;
        }
        let k = rng.gen_range(1..=8u64);
        let (sa, sb, sab) = (sigma(a, k)?, sigma(b, k)?, sigma(a * b, k)?);
        check(sab == sa * sb, || format!("k={k}: Σ({a}·{b}) = {sab} but Σ({a})Σ({b}) = {}", sa * sb))?;
        done += 1;
    }
    Ok("500 coprime pairs".into())
}

fn ac4_sigma_one() -> Outcome {
    for q in 1..=10_000u64 {
        let v = sigma_char_sum(q, 1).map_err(|e| e.to_string())?;
        check(v == 1, || format!("Σ₁({q}) = {v}"))?;
    }
    Ok("q ≤ 10000".into())
}

fn ac5_decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let policy = TruncationPolicy::default();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let q = rng.gen_range(1..=30u64);
        let k = rng.gen_range(1..=4u32);
        let n = rng.gen_range(4..=500u64);
        let alpha: f64 = rng.gen();
        let series = PowerSeries::new(n, k, &policy).map_err(|e| e.to_string())?;
        let point = EvalPoint::new(n, alpha).map_err(|e| e.to_string())?;
        let f = series.f_direct(&point, q).map_err(|e| e.to_string())?;
        let (s1, s2) = series.f_decomposed(&point, q).map_err(|e| e.to_string())?;
        let diff = (f - s1 - s2).norm();
        let rel = if f.norm() > 0.0 { diff / f.norm() } else { diff };
        check(rel < 1e-9, || format!("q={q} k={k} N={n} α={alpha}: relative error {rel:e}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("20 configurations, worst relative error {worst:.1e}"))
}

fn ac6_quadrature() -> Outcome {
    let policy = TruncationPolicy::default();
    let mut worst = 0.0f64;
    for n in [50u64, 100] {
        for k in [2u32, 3] {
            let table = build_rep_table(n, k).map_err(|e| e.to_string())?;
            for q in [1u64, 2, 3, 5] {
                let quad = gqk_by_quadrature(n, q, k, None, &policy).map_err(|e| e.to_string())?;
                let direct = table.g_qk(q);
                let diff = (quad.value - direct).abs();
                let rel = if direct != 0.0 { diff / direct } else { diff };
                check(rel < 1e-6, || {
                    format!("N={n} q={q} k={k}: quadrature {} vs direct {direct}", quad.value)
                })?;
                worst = worst.max(rel);
            }
        }
    }
    Ok(format!("16 cases, worst relative difference {worst:.1e}"))
}

fn ac7_ratio_trend() -> Outcome {
    let grid = [10_000u64, 100_000, 1_000_000];
    let rows = ratio_scan(&grid, 5, 2).map_err(|e| e.to_string())?;
    let errs: Vec<f64> = rows.iter().map(|r| r.ratio_error().unwrap_or(f64::NAN)).collect();
    check(errs.windows(2).all(|w| w[1] < w[0]), || format!("|ratio − 1| not strictly decreasing: {errs:?}"))?;
    check(errs[2] < 0.2, || format!("|ratio − 1| = {} at N = 10⁶", errs[2]))?;

    let table = build_rep_table(1_000_000, 2).map_err(|e| e.to_string())?;
    let norm: Vec<f64> = grid
        .iter()
        .map(|&n| table.g_qk_upto(3, n) / (n as f64).powf(1.5))
        .collect();
    check(norm.windows(2).all(|w| w[1] < w[0]), || format!("G_3,2/N^1.5 not decreasing: {norm:?}"))?;
    Ok(format!(
        "(5,2) errors {:.4} {:.4} {:.4}; G_3,2/N^1.5 {:.2e} {:.2e} {:.2e}",
        errs[0], errs[1], errs[2], norm[0], norm[1], norm[2]
    ))
}

fn ac8_i_n_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let e = std::f64::consts::E;
    let mut max_ratio = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=10_000u64);
        let alpha: f64 = rng.gen_range(-0.5..0.5);
        let point = EvalPoint::new(n, alpha).map_err(|e| e.to_string())?;
        let bound = e * (n as f64).min(1.0 / alpha.abs());
        let closed = i_n_at(&point, n).map_err(|e| e.to_string())?.norm();
        let direct = i_n_direct(&point, n).norm();
        check(closed <= bound && direct <= bound, || {
            format!("N={n} α={alpha}: |I_N| = {closed} (direct {direct}) > {bound}")
        })?;
        max_ratio = max_ratio.max(closed / bound);
    }
    Ok(format!("1000 samples, max |I_N|/bound {max_ratio:.3}"))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn lambda(m: u64) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let p = (2..=m).find(|d| m % d == 0).unwrap();
    if !is_prime(p) {
        return 0.0;
    }
    let mut r = m;
    while r % p == 0 {
        r /= p;
    }
    if r == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}

fn ac9_bruteforce_psi() -> Outcome {
    let mut entries = 0;
    for k in [2u32, 3] {
        let table = build_rep_table(500, k).map_err(|e| e.to_string())?;
        let mut expected = vec![0.0f64; 501];
        let mut m1 = 1u64;
        while m1.pow(k) < 500 {
            let mut m2 = 1u64;
            while m1.pow(k) + m2.pow(k) <= 500 {
                expected[(m1.pow(k) + m2.pow(k)) as usize] += lambda(m1) * lambda(m2);
                m2 += 1;
            }
            m1 += 1;
        }
        for n in 1..=500u64 {
            let got = table.get(n).unwrap_or(0.0);
            let want = expected[n as usize];
            let ok = if want == 0.0 { got == 0.0 } else { ((got - want) / want).abs() < 1e-12 };
            check(ok, || format!("k={k} n={n}: table {got}, brute force {want}"))?;
            entries += 1;
        }
        for n_max in [1u64, 2, 17, 100, 499] {
            let small = build_rep_table(n_max, k).map_err(|e| e.to_string())?;
            for n in 1..=n_max {
                check(small.get(n) == table.get(n), || format!("k={k} N={n_max} n={n}: prefix table differs"))?;
            }
        }
    }
    Ok(format!("{entries} entries"))
}

fn ac10_orthogonality() -> Outcome {
    let mut sums = 0u64;
    for q in 1..=200u64 {
        let group = UnitGroup::new(q).map_err(|e| e.to_string())?;
        let l = group.exponent();
        let phi = group.order() as i64;
        let units: Vec<u64> = group.units().collect();
        let chars: Vec<_> = group.characters().collect();
        check(chars.len() as i64 == phi, || format!("q={q}: {} characters, φ = {phi}", chars.len()))?;
        let phases: Vec<Vec<u64>> = chars
            .iter()
            .map(|c| units.iter().map(|&n| c.phase(n).expect("unit")).collect())
            .collect();
        let mut memo: HashMap<Vec<i64>, Option<i64>> = HashMap::new();
        let mut exact = |hist: Vec<i64>| -> Option<i64> {
            if let Some(v) = memo.get(&hist) {
                return *v;
            }
            let mut s = RootSum::new(l);
            for (t, &c) in hist.iter().enumerate() {
                s.add_phase(t as u64, c);
            }
            let v = s.to_integer();
            memo.insert(hist, v);
            v
        };
        // rows: Σ_n χ(n) ψ̄(n) = φ(q)·[χ = ψ]
        for (i, a) in phases.iter().enumerate() {
            for (j, b) in phases.iter().enumerate() {
                let mut hist = vec![0i64; l as usize];
                for (x, y) in a.iter().zip(b) {
                    hist[((x + l - y) % l) as usize] += 1;
                }
                let want = if i == j { phi } else { 0 };
                let got = exact(hist);
                check(got == Some(want), || format!("q={q} row ({i},{j}): {got:?}, want {want}"))?;
                sums += 1;
            }
        }
        // columns: Σ_χ χ(n) χ̄(m) = φ(q)·[n ≡ m]
        for u in 0..units.len() {
            for v in 0..units.len() {
                let mut hist = vec![0i64; l as usize];
                for p in &phases {
                    hist[((p[u] + l - p[v]) % l) as usize] += 1;
                }
                let want = if u == v { phi } else { 0 };
                let got = exact(hist);
                check(got == Some(want), || {
                    format!("q={q} column ({}, {}): {got:?}, want {want}", units[u], units[v])
                })?;
                sums += 1;
            }
        }
    }
    Ok(format!("{sums} exact sums"))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Outcome); 10] = [
        ("AC1", "character sum equals brute-force count, q ≤ 2000, k ≤ 12", ac1_char_sum_equals_bruteforce),
        ("AC2", "closed form: odd prime powers exact, 2-powers corrected exact, paper discrepancies listed", ac2_closed_form),
        ("AC3", "Σ_k multiplicative on random coprime pairs", ac3_multiplicativity),
        ("AC4", "Σ₁(q) = 1 for q ≤ 10⁴", ac4_sigma_one),
        ("AC5", "F = S1 + S2 within 1e-9 relative", ac5_decomposition),
        ("AC6", "quadrature matches direct G_qk within 1e-6", ac6_quadrature),
        ("AC7", "main-term ratio trend for (5,2) and (3,2)", ac7_ratio_trend),
        ("AC8", "|I_N(z⁻¹)| ≤ e·min(N, 1/|α|)", ac8_i_n_bound),
        ("AC9", "representation table equals brute-force pairs, N ≤ 500", ac9_bruteforce_psi),
        ("AC10", "exact row and column orthogonality, q ≤ 200", ac10_orthogonality),
    ];
    let mut failed = 0;
    for (id, title, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id} {title} [{detail}; {secs:.2}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id} {title} [{why}; {secs:.2}s]");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
