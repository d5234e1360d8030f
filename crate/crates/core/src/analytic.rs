//! Generating functions on the circle `|z| = e^{−1/N}`.
//!
//! * `Ψ_k(z, χ) = Σ_n χ(n) Λ(n) z^{n^k}` (with `χ` omitted: `Ψ_k(z)`),
//! * `F_{q,k}(z) = Σ_{q | n} ψ_{2,k}(n) z^n`, computed directly as a pair sum and
//!   through its character decomposition `S₁ + S₂`,
//! * `I_N(z^{−1}) = Σ_{n ≤ N} z^{−n}` in closed form,
//! * `G_{q,k}(N) = ∫₀¹ F_{q,k}(z) I_N(z^{−1}) dα` by exact uniform quadrature,
//! * mean squares `J₁`, `J₂` of the character-twisted partial sums `ψ_k(x, χ)`.
//!
//! The infinite series are cut at the base `M(N, k)` where `e^{−M^k/N}` drops
//! below the policy's `ε`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::arith::{gcd, pow_mod, weighted_prime_powers};
use crate::characters::{DirichletCharacter, UnitGroup};
use crate::error::invalid;
use crate::summation::NeumaierSum;
use crate::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-18;

/// Largest truncation cutoff a [`PowerSeries`] will sieve to.
pub const MAX_SERIES_CUTOFF: u64 = 100_000_000;

/// A point `z = e^{−1/N} e(α)` of the circle of radius `e^{−1/N}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    n: u64,
    alpha: f64,
}

impl EvalPoint {
    /// `alpha` is reduced into `[0, 1)`.
    pub fn new(n: u64, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("N must be positive"));
        }
        if !alpha.is_finite() {
            return Err(invalid("alpha must be finite"));
        }
        let alpha = alpha.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs
        let alpha = if alpha >= 1.0 { 0.0 } else { alpha };
        Ok(Self { n, alpha })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Distance from `α` to the nearest integer.
    pub fn alpha_norm(&self) -> f64 {
        self.alpha.min(1.0 - self.alpha)
    }

    pub fn radius(&self) -> f64 {
        (-1.0 / self.n as f64).exp()
    }

    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(self.radius(), TAU * self.alpha)
    }

    /// `w = 1/N − 2πiα`, so that `z = e^{−w}`.
    pub fn w(&self) -> Complex64 {
        Complex64::new(1.0 / self.n as f64, -TAU * self.alpha)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.n, -self.alpha).expect("finite alpha")
    }

    /// `z^e`, with the phase `e·α mod 1` reduced without losing the low bits
    /// of the product.
    pub fn z_pow(&self, e: u64) -> Complex64 {
        let modulus = (-(e as f64) / self.n as f64).exp();
        Complex64::from_polar(modulus, TAU * frac_product(e, self.alpha))
    }
}

/// `e·α mod 1` using an error-free product split.
fn frac_product(e: u64, alpha: f64) -> f64 {
    let ef = e as f64;
    let p = ef * alpha;
    let err = ef.mul_add(alpha, -p);
    let f = (p - p.floor()) + err;
    f.rem_euclid(1.0)
}

/// Where the infinite series over `n` are cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    epsilon: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl TruncationPolicy {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Smallest `M` with `e^{−M^k/N} < ε`.
    pub fn cutoff(&self, n: u64, k: u32) -> u64 {
        let target = n as f64 * (1.0 / self.epsilon).ln();
        let mut m = target.powf(1.0 / k as f64).floor().max(1.0) as u64;
        while m > 1 && ((m - 1) as f64).powi(k as i32) > target {
            m -= 1;
        }
        while (m as f64).powi(k as i32) <= target {
            m += 1;
        }
        m
    }

    /// Upper bound for the discarded tail `Σ_{n > M} Λ(n) e^{−n^k/N}`, using `Λ(n) ≤ log n`.
    /// It stays below `2 ε log(M) N^{1/k}`.
    pub fn tail_bound(&self, n: u64, k: u32) -> f64 {
        let m = self.cutoff(n, k);
        let nf = n as f64;
        let mut acc = NeumaierSum::new();
        let mut j = m + 1;
        loop {
            let x = j as f64;
            let term = x.ln() * (-x.powi(k as i32) / nf).exp();
            acc += term;
            if term < 1e-300 || term < acc.value() * 1e-18 {
                break;
            }
            j += 1;
        }
        acc.value()
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    base: u64,
    lambda: f64,
    power: u64,
}

/// The prime powers below the truncation cutoff for a given `(N, k)`, reused
/// across evaluation points.
#[derive(Debug, Clone)]
pub struct PowerSeries {
    n: u64,
    k: u32,
    cutoff: u64,
    terms: Vec<Term>,
}

impl PowerSeries {
    pub fn new(n: u64, k: u32, policy: &TruncationPolicy) -> Result<Self> {
        if n < 1 {
            return Err(invalid("N must be positive"));
        }
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        let cutoff = policy.cutoff(n, k);
        if cutoff > MAX_SERIES_CUTOFF {
            return Err(invalid(format!(
                "series for N = {n}, k = {k} needs prime powers up to {cutoff}, above the limit {MAX_SERIES_CUTOFF}; lower N or raise epsilon"
            )));
        }
        let terms = weighted_prime_powers(cutoff)?
            .into_iter()
            .map(|(m, lambda)| {
                let power = m
                    .checked_pow(k)
                    .ok_or_else(|| invalid(format!("{m}^{k} overflows")))?;
                Ok(Term {
                    base: m,
                    lambda,
                    power,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, k, cutoff, terms })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// Number of prime powers kept.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_point(&self, point: &EvalPoint) -> Result<()> {
        if point.n != self.n {
            return Err(invalid(format!(
                "point has N = {}, series was truncated for N = {}",
                point.n, self.n
            )));
        }
        Ok(())
    }

    /// `Ψ_k(z, χ)`; `None` means the untwisted `Ψ_k(z)`.
    pub fn psi(&self, point: &EvalPoint, chi: Option<&DirichletCharacter<'_>>) -> Result<Complex64> {
        self.check_point(point)?;
        let values = chi.map(|c| c.complex_table());
        let q = chi.map_or(1, |c| c.modulus());
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for t in &self.terms {
            let weight = match &values {
                Some(v) => v[(t.base % q) as usize],
                None => Complex64::new(1.0, 0.0),
            };
            if weight == Complex64::new(0.0, 0.0) {
                continue;
            }
            let term = weight * t.lambda * point.z_pow(t.power);
            re += term.re;
            im += term.im;
        }
        Ok(Complex64::new(re.value(), im.value()))
    }

    fn residues(&self, q: u64) -> Vec<u64> {
        self.terms.iter().map(|t| pow_mod(t.base, self.k as u64, q)).collect()
    }

    /// `F_{q,k}(z) = Σ_{q | m₁^k + m₂^k} Λ(m₁)Λ(m₂) z^{m₁^k + m₂^k}` as a direct pair sum.
    pub fn f_direct(&self, point: &EvalPoint, q: u64) -> Result<Complex64> {
        self.check_point(point)?;
        if q == 0 {
            return Err(invalid("q must be positive"));
        }
        Ok(self.pair_sum(point, q, |_| true))
    }

    fn pair_sum(&self, point: &EvalPoint, q: u64, keep_first: impl Fn(u64) -> bool) -> Complex64 {
        let res = self.residues(q);
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for (a, ra) in self.terms.iter().zip(&res) {
            if !keep_first(a.base) {
                continue;
            }
            for (b, rb) in self.terms.iter().zip(&res) {
                if (ra + rb) % q != 0 {
                    continue;
                }
                let term = point.z_pow(a.power + b.power) * (a.lambda * b.lambda);
                re += term.re;
                im += term.im;
            }
        }
        Complex64::new(re.value(), im.value())
    }

    /// The split `F_{q,k}(z) = S₁ + S₂`:
    /// `S₁ = φ(q)^{−1} Σ_χ χ(−1) Ψ_k(z, χ^k) Ψ_k(z, χ̄^k)` over all characters mod `q`,
    /// and `S₂` the pairs with `gcd(m₁, q) > 1`, summed directly.
    pub fn f_decomposed(&self, point: &EvalPoint, q: u64) -> Result<(Complex64, Complex64)> {
        self.check_point(point)?;
        let group = UnitGroup::new(q)?;
        let mut cache: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        let mut psi_of = |chi: &DirichletCharacter<'_>| -> Result<Complex64> {
            if let Some(v) = cache.get(chi.exponents()) {
                return Ok(*v);
            }
            let v = self.psi(point, Some(chi))?;
            cache.insert(chi.exponents().to_vec(), v);
            Ok(v)
        };
        let mut s1 = Complex64::new(0.0, 0.0);
        for chi in group.characters() {
            let a = psi_of(&chi.pow(self.k as u64))?;
            let b = psi_of(&chi.conj().pow(self.k as u64))?;
            s1 += a * b * chi.parity() as f64;
        }
        s1 /= group.order() as f64;
        let s2 = self.pair_sum(point, q, |m| gcd(m, q) > 1);
        Ok((s1, s2))
    }

    /// Distinct exponents `e = m₁^k + m₂^k` with `q | e` and their aggregated weights.
    pub fn f_coefficients(&self, q: u64) -> BTreeMap<u64, f64> {
        let res = self.residues(q);
        let mut coeffs: BTreeMap<u64, f64> = BTreeMap::new();
        for (a, ra) in self.terms.iter().zip(&res) {
            for (b, rb) in self.terms.iter().zip(&res) {
                if (ra + rb) % q == 0 {
                    *coeffs.entry(a.power + b.power).or_insert(0.0) += a.lambda * b.lambda;
                }
            }
        }
        coeffs
    }
}

/// `Ψ_k(z, χ)` at a point.
pub fn psi_k_at(
    point: &EvalPoint,
    k: u32,
    chi: Option<&DirichletCharacter<'_>>,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    PowerSeries::new(point.n, k, policy)?.psi(point, chi)
}

/// `F_{q,k}(z)` as a direct pair sum.
pub fn f_qk_direct(point: &EvalPoint, q: u64, k: u32, policy: &TruncationPolicy) -> Result<Complex64> {
    PowerSeries::new(point.n, k, policy)?.f_direct(point, q)
}

/// `(S₁, S₂)` with `F_{q,k}(z) = S₁ + S₂`.
pub fn f_qk_decomposed(
    point: &EvalPoint,
    q: u64,
    k: u32,
    policy: &TruncationPolicy,
) -> Result<(Complex64, Complex64)> {
    PowerSeries::new(point.n, k, policy)?.f_decomposed(point, q)
}

/// `e^{x} − 1` for complex `x`, accurate near zero.
fn complex_expm1(x: Complex64) -> Complex64 {
    let (s, c) = x.im.sin_cos();
    let half = (x.im / 2.0).sin();
    Complex64::new(
        x.re.exp_m1() * c - 2.0 * half * half,
        x.re.exp() * s,
    )
}

/// `I_{terms}(z^{−1}) = Σ_{1 ≤ m ≤ terms} z^{−m}` in closed form.
pub fn i_n_at(point: &EvalPoint, terms: u64) -> Result<Complex64> {
    if terms == 0 {
        return Err(invalid("I_N needs N ≥ 1"));
    }
    // z^{-1} = e^{w} with Re w = 1/N > 0, so z^{-1} ≠ 1.
    let w = point.w();
    let u = w.exp();
    let num = complex_expm1(w * terms as f64);
    let den = complex_expm1(w);
    Ok(u * num / den)
}

/// `Σ_{1 ≤ m ≤ terms} z^{−m}` by direct summation.
pub fn i_n_direct(point: &EvalPoint, terms: u64) -> Complex64 {
    let nf = point.n as f64;
    (1..=terms)
        .map(|m| {
            let modulus = (m as f64 / nf).exp();
            Complex64::from_polar(modulus, -TAU * frac_product(m, point.alpha))
        })
        .sum()
}

/// Outcome of the quadrature reconstruction of `G_{q,k}(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    /// Imaginary part of the quadrature sum; zero up to rounding.
    pub imaginary: f64,
    pub points: u64,
    pub max_exponent: u64,
}

/// `G_{q,k}(N) = ∫₀¹ F_{q,k}(z) I_N(z^{−1}) dα` by the `M`-point rule at `α_j = j/M`.
///
/// With `F` truncated to exponents `≤ E`, the integrand is a trigonometric
/// polynomial with frequencies in `[−N, E]`, so any `M > E + N` integrates it
/// exactly. `points = None` picks `M = E + N + 1`.
pub fn gqk_by_quadrature(
    n: u64,
    q: u64,
    k: u32,
    points: Option<u64>,
    policy: &TruncationPolicy,
) -> Result<Quadrature> {
    if q == 0 {
        return Err(invalid("q must be positive"));
    }
    let series = PowerSeries::new(n, k, policy)?;
    let coeffs = series.f_coefficients(q);
    let max_exponent = coeffs.keys().next_back().copied().unwrap_or(0);
    let required = max_exponent + n;
    let m = points.unwrap_or(required + 1);
    if m <= required {
        return Err(Error::Aliasing {
            points: m,
            required,
            max_exponent,
            n,
        });
    }
    let nf = n as f64;
    let weighted: Vec<(u64, f64)> = coeffs
        .iter()
        .map(|(&e, &c)| (e, c * (-(e as f64) / nf).exp()))
        .filter(|&(_, c)| c != 0.0)
        .collect();

    let samples: Vec<Complex64> = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut re = NeumaierSum::new();
            let mut im = NeumaierSum::new();
            for &(e, c) in &weighted {
                let t = ((e as u128 * j as u128) % m as u128) as f64;
                let (s, co) = (TAU * t / m as f64).sin_cos();
                re += c * co;
                im += c * s;
            }
            let f = Complex64::new(re.value(), im.value());
            let point = EvalPoint::new(n, j as f64 / m as f64).expect("finite");
            f * i_n_at(&point, n).expect("n ≥ 1")
        })
        .collect();

    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for s in samples {
        re += s.re;
        im += s.im;
    }
    Ok(Quadrature {
        value: re.value() / m as f64,
        imaginary: im.value() / m as f64,
        points: m,
        max_exponent,
    })
}

/// `Ψ_k(e^{−1/N}) / N^{1/k}` with two candidate limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: u64,
    pub k: u32,
    pub psi: f64,
    pub normalized: f64,
    /// `Γ(1 + 1/k)`.
    pub gamma_candidate: f64,
    /// `k^{−1} Γ(1 + 1/k)^{1/k}`.
    pub stated_candidate: f64,
}

/// Normalised `Ψ_k` on the positive real axis along a grid of `N`.
pub fn mainterm_constant_probe(grid: &[u64], k: u32, policy: &TruncationPolicy) -> Result<Vec<ProbeRow>> {
    if grid.is_empty() {
        return Err(invalid("grid must not be empty"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let kf = k as f64;
    let g = gamma(1.0 + 1.0 / kf);
    grid.iter()
        .map(|&n| {
            let point = EvalPoint::new(n, 0.0)?;
            let psi = psi_k_at(&point, k, None, policy)?.re;
            Ok(ProbeRow {
                n,
                k,
                psi,
                normalized: psi / (n as f64).powf(1.0 / kf),
                gamma_candidate: g,
                stated_candidate: g.powf(1.0 / kf) / kf,
            })
        })
        .collect()
}

/// The step function `x ↦ ψ_k(x, χ) = Σ_{n ≤ x} χ^k(n) Λ(n)`.
#[derive(Debug, Clone)]
pub struct PartialSumPath {
    q: u64,
    k: u32,
    jumps: Vec<u64>,
    /// `values[i]` is the path on `[jumps[i], jumps[i+1])`.
    values: Vec<Complex64>,
}

impl PartialSumPath {
    pub fn new(chi: &DirichletCharacter<'_>, k: u32, limit: u64) -> Result<Self> {
        let twisted = chi.pow(k as u64);
        let table = twisted.complex_table();
        let q = chi.modulus();
        let mut jumps = Vec::new();
        let mut values = Vec::new();
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, lambda) in weighted_prime_powers(limit)? {
            let c = table[(m % q) as usize];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc += c * lambda;
            jumps.push(m);
            values.push(acc);
        }
        Ok(Self { q, k, jumps, values })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn jumps(&self) -> &[u64] {
        &self.jumps
    }

    pub fn value_at(&self, x: f64) -> Complex64 {
        let idx = self.jumps.partition_point(|&n| n as f64 <= x);
        if idx == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[idx - 1]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JIntegrals {
    pub x: f64,
    pub h: f64,
    /// `∫₀^X |ψ_k(x, χ)|² dx`.
    pub j1: f64,
    /// `∫₀^X |ψ_k(x + h, χ) − ψ_k(x, χ)|² dx`.
    pub j2: f64,
}

/// `J₁(X)` and `J₂(X, h)`, integrated exactly over the step intervals.
pub fn j_integrals(x: f64, h: f64, chi: &DirichletCharacter<'_>, k: u32) -> Result<JIntegrals> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid("X must be finite and non-negative"));
    }
    if !(h >= 0.0 && h <= x) {
        return Err(invalid(format!("h must lie in [0, X], got h = {h}, X = {x}")));
    }
    if chi.pow(k as u64).is_principal() {
        return Err(invalid("mean-square bounds need χ^k ≠ χ₀"));
    }
    let path = PartialSumPath::new(chi, k, (x + h).floor() as u64)?;

    let mut j1 = NeumaierSum::new();
    let mut breaks: Vec<f64> = vec![0.0];
    breaks.extend(path.jumps().iter().map(|&n| n as f64).filter(|&n| n < x));
    breaks.push(x);
    for w in breaks.windows(2) {
        let v = path.value_at(w[0]);
        j1 += v.norm_sqr() * (w[1] - w[0]);
    }

    let mut breaks: Vec<f64> = vec![0.0, x];
    for &n in path.jumps() {
        let n = n as f64;
        if n < x {
            breaks.push(n);
        }
        if n - h > 0.0 && n - h < x {
            breaks.push(n - h);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut j2 = NeumaierSum::new();
    for w in breaks.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let d = path.value_at(mid + h) - path.value_at(mid);
        j2 += d.norm_sqr() * len;
    }
    Ok(JIntegrals {
        x,
        h,
        j1: j1.value(),
        j2: j2.value(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::build_rep_table;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn policy_validation_and_cutoff() {
        assert!(TruncationPolicy::new(1.0).is_err());
        assert!(TruncationPolicy::new(0.0).is_err());
        assert!(TruncationPolicy::new(f64::NAN).is_err());
        let p = policy();
        for (n, k) in [(100u64, 2u32), (10_000, 2), (500, 3), (1_000_000, 2), (50, 4)] {
            let m = p.cutoff(n, k);
            let decay = |m: u64| (-(m as f64).powi(k as i32) / n as f64).exp();
            assert!(decay(m) < p.epsilon());
            assert!(decay(m - 1) >= p.epsilon());
            let expected = ((n as f64 * (1.0 / p.epsilon()).ln()).powf(1.0 / k as f64)).ceil() as u64;
            assert!(m.abs_diff(expected) <= 1, "{m} vs {expected}");
        }
    }

    #[test]
    fn tail_is_below_epsilon_scale() {
        let p = policy();
        for (n, k) in [(100u64, 2u32), (10_000, 2), (1000, 3), (1000, 1)] {
            let m = p.cutoff(n, k) as f64;
            let tail = p.tail_bound(n, k);
            assert!(tail < p.epsilon() * 2.0 * m.ln() * (n as f64).powf(1.0 / k as f64), "N={n} k={k}: {tail}");
        }
    }

    #[test]
    fn psi_real_axis_matches_gamma_constant() {
        let point = EvalPoint::new(10_000, 0.0).unwrap();
        let v = psi_k_at(&point, 2, None, &policy()).unwrap();
        assert!(v.im.abs() < 1e-12);
        let expected = gamma(1.5) * 100.0;
        assert!((v.re / expected - 1.0).abs() < 0.05, "{} vs {}", v.re, expected);
    }

    #[test]
    fn psi_mod_one_character_is_untwisted() {
        let g = UnitGroup::new(1).unwrap();
        let chi0 = g.principal();
        let point = EvalPoint::new(300, 0.37).unwrap();
        let a = psi_k_at(&point, 2, Some(&chi0), &policy()).unwrap();
        let b = psi_k_at(&point, 2, None, &policy()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn principal_character_differs_by_prime_divisors_of_q() {
        let p = policy();
        for q in [2u64, 6, 10, 30] {
            let g = UnitGroup::new(q).unwrap();
            let series = PowerSeries::new(2000, 2, &p).unwrap();
            let point = EvalPoint::new(2000, 0.21).unwrap();
            let a = series.psi(&point, Some(&g.principal())).unwrap();
            let b = series.psi(&point, None).unwrap();
            let bound: f64 = crate::arith::factorize(q)
                .unwrap()
                .pairs()
                .iter()
                .map(|&(pr, _)| {
                    let mut s = 0.0;
                    let mut m = pr;
                    while m <= series.cutoff() {
                        s += (pr as f64).ln();
                        m *= pr;
                    }
                    s
                })
                .sum();
            assert!((a - b).norm() <= bound + 1e-12, "q={q}");
        }
    }

    #[test]
    fn f_for_q1_is_psi_squared() {
        let p = policy();
        for (n, alpha) in [(100u64, 0.0), (200, 0.3), (500, 0.77)] {
            let point = EvalPoint::new(n, alpha).unwrap();
            let f = f_qk_direct(&point, 1, 2, &p).unwrap();
            let psi = psi_k_at(&point, 2, None, &p).unwrap();
            assert!((f - psi * psi).norm() <= 1e-9 * f.norm().max(1.0));
        }
    }

    #[test]
    fn f_subsets_are_dominated_on_real_axis() {
        let p = policy();
        let point = EvalPoint::new(100, 0.0).unwrap();
        let f1 = f_qk_direct(&point, 1, 2, &p).unwrap();
        let f2 = f_qk_direct(&point, 2, 2, &p).unwrap();
        assert!(f2.im.abs() < 1e-12 && f2.re > 0.0 && f2.re <= f1.re);
    }

    #[test]
    fn f_mod_three_only_sees_powers_of_three() {
        let p = policy();
        let point = EvalPoint::new(100, 0.0).unwrap();
        let f3 = f_qk_direct(&point, 3, 2, &p).unwrap();
        let series = PowerSeries::new(100, 2, &p).unwrap();
        let l3 = 3f64.ln();
        let mut expect = 0.0;
        let mut a = 3u64;
        while a <= series.cutoff() {
            let mut b = 3u64;
            while b <= series.cutoff() {
                expect += l3 * l3 * (-((a * a + b * b) as f64) / 100.0).exp();
                b *= 3;
            }
            a *= 3;
        }
        assert!((f3.re - expect).abs() < 1e-12 * expect.max(1.0));
        assert!(f3.re < 0.05 * f_qk_direct(&point, 1, 2, &p).unwrap().re);
    }

    #[test]
    fn decomposition_examples() {
        let p = policy();
        let point = EvalPoint::new(200, 0.3).unwrap();
        let f = f_qk_direct(&point, 5, 2, &p).unwrap();
        let (s1, s2) = f_qk_decomposed(&point, 5, 2, &p).unwrap();
        assert!((f - s1 - s2).norm() / f.norm() < 1e-9);

        // q = 2: one character, S₂ is the pairs with m₁ a power of two.
        let series = PowerSeries::new(200, 2, &p).unwrap();
        let (s1, s2) = series.f_decomposed(&point, 2).unwrap();
        let f = series.f_direct(&point, 2).unwrap();
        assert!((f - s1 - s2).norm() <= 1e-9 * f.norm());
        let psi_odd = series.psi(&point, Some(&UnitGroup::new(2).unwrap().principal())).unwrap();
        assert!((s1 - psi_odd * psi_odd).norm() <= 1e-9 * s1.norm());
    }

    #[test]
    fn decomposition_random_configurations() {
        let p = policy();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let q = rng.gen_range(2..=30);
            let k = rng.gen_range(1..=4);
            let n = rng.gen_range(4..=300);
            let alpha: f64 = rng.gen();
            let point = EvalPoint::new(n, alpha).unwrap();
            let series = PowerSeries::new(n, k, &p).unwrap();
            let f = series.f_direct(&point, q).unwrap();
            let (s1, s2) = series.f_decomposed(&point, q).unwrap();
            assert!((f - s1 - s2).norm() < 1e-9 * (1.0 + f.norm()), "q={q} k={k} N={n}");
        }
    }

    #[test]
    fn i_n_closed_form_matches_direct_sum() {
        for (n, alpha) in [(1u64, 0.3), (10, 0.0), (100, 0.25), (1000, 1e-6), (5000, 0.49), (777, 0.9)] {
            let point = EvalPoint::new(n, alpha).unwrap();
            let a = i_n_at(&point, n).unwrap();
            let b = i_n_direct(&point, n);
            assert!((a - b).norm() <= 1e-9 * b.norm().max(1.0), "N={n} α={alpha}: {a} vs {b}");
        }
        let point = EvalPoint::new(1, 0.3).unwrap();
        assert!((i_n_at(&point, 1).unwrap() - point.z().inv()).norm() < 1e-14);
        // α = 0: Σ r^{−n} = (r^{−N} − 1)/(1 − r)
        let point = EvalPoint::new(50, 0.0).unwrap();
        let r = point.radius();
        let expect = (r.powi(-50) - 1.0) / (1.0 - r);
        assert!((i_n_at(&point, 50).unwrap().re - expect).abs() < 1e-9 * expect);
        assert!(i_n_at(&point, 0).is_err());
    }

    #[test]
    fn i_n_bound_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = std::f64::consts::E;
        for _ in 0..500 {
            let n = rng.gen_range(1..=10_000);
            let alpha: f64 = rng.gen_range(1e-9..1.0);
            let point = EvalPoint::new(n, alpha).unwrap();
            let v = i_n_at(&point, n).unwrap().norm();
            let bound = e * (n as f64).min(1.0 / point.alpha_norm());
            assert!(v <= bound, "N={n} α={alpha}: {v} > {bound}");
        }
    }

    #[test]
    fn quadrature_recovers_direct_average() {
        let p = policy();
        for (n, q, k) in [(50u64, 2u64, 2u32), (50, 1, 2), (30, 3, 3)] {
            let direct = build_rep_table(n, k).unwrap().g_qk(q);
            let quad = gqk_by_quadrature(n, q, k, None, &p).unwrap();
            assert!((quad.value - direct).abs() <= 1e-6 * direct.max(1e-300) + 1e-9, "{quad:?} vs {direct}");
            assert!(quad.imaginary.abs() < 1e-6 * direct.max(1.0));
        }
        let quad = gqk_by_quadrature(7, 1, 2, None, &p).unwrap();
        assert!(quad.value.abs() < 1e-9);
    }

    #[test]
    fn quadrature_flags_aliasing() {
        let err = gqk_by_quadrature(50, 1, 2, Some(100), &policy()).unwrap_err();
        assert!(matches!(err, Error::Aliasing { points: 100, .. }));
    }

    #[test]
    fn conjugation_symmetry() {
        let p = policy();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let q = rng.gen_range(3..=25);
            let g = UnitGroup::new(q).unwrap();
            let chars: Vec<_> = g.characters().collect();
            let chi = &chars[rng.gen_range(0..chars.len())];
            let n = rng.gen_range(10..=400);
            let k = rng.gen_range(1..=3);
            let point = EvalPoint::new(n, rng.gen()).unwrap();
            let series = PowerSeries::new(n, k, &p).unwrap();
            let lhs = series.psi(&point, Some(&chi.conj())).unwrap();
            let rhs = series.psi(&point.conj(), Some(chi)).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
            let top = series.psi(&EvalPoint::new(n, 0.0).unwrap(), None).unwrap().re;
            assert!(lhs.norm() <= top + 1e-9);
        }
    }

    #[test]
    fn probe_k1_tends_to_one() {
        let rows = mainterm_constant_probe(&[1000, 10_000, 100_000], 1, &policy()).unwrap();
        let last = rows.last().unwrap();
        assert!((last.normalized - 1.0).abs() < 0.02, "{}", last.normalized);
        assert_eq!(last.gamma_candidate, 1.0);
    }

    #[test]
    fn j_integrals_examples() {
        let g = UnitGroup::new(5).unwrap();
        let chi = g.character(&[1]).unwrap();
        let j = j_integrals(1.5, 0.5, &chi, 2).unwrap();
        assert_eq!(j.j1, 0.0);
        for x in [100.0, 1000.0, 10_000.0] {
            let j = j_integrals(x, x, &chi, 2).unwrap();
            let norm = j.j1 / (x * x * 10f64.ln().powi(2));
            assert!(norm < 5.0, "X={x}: {norm}");
            let j1_2x = j_integrals(2.0 * x, 0.0, &chi, 2).unwrap().j1;
            assert!(j.j2 <= 4.0 * j1_2x);
        }
        // χ² = χ₀ for the quadratic character: rejected.
        let quad = g.character(&[2]).unwrap();
        assert!(j_integrals(100.0, 1.0, &quad, 2).is_err());
        assert!(j_integrals(100.0, 200.0, &chi, 2).is_err());
    }

    #[test]
    fn j_integrals_match_fine_riemann_sum() {
        let g = UnitGroup::new(7).unwrap();
        let chi = g.character(&[1]).unwrap();
        let (x, h) = (60.0, 7.5);
        let j = j_integrals(x, h, &chi, 2).unwrap();
        let path = PartialSumPath::new(&chi, 2, 100).unwrap();
        let steps = 600_000;
        let dx = x / steps as f64;
        let (mut a, mut b) = (0.0, 0.0);
        for i in 0..steps {
            let t = (i as f64 + 0.5) * dx;
            a += path.value_at(t).norm_sqr() * dx;
            b += (path.value_at(t + h) - path.value_at(t)).norm_sqr() * dx;
        }
        assert!((j.j1 - a).abs() < 1e-3 * a.max(1.0));
        assert!((j.j2 - b).abs() < 1e-3 * b.max(1.0));
    }
}
