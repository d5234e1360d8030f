//! Exact integer arithmetic: linear sieve, von Mangoldt values, factorization,
//! Euler's totient and prime-power enumeration.

use std::fmt;

use crate::error::invalid;
use crate::Result;

/// Sieve of smallest prime factors together with the von Mangoldt function.
///
/// The prime-power structure is kept exactly (`prime_power_base`), so callers
/// that need exactness never have to look at the floating `lambda` values.
#[derive(Debug, Clone)]
pub struct SieveTable {
    limit: usize,
    spf: Vec<u32>,
    /// `p` when the index is a power of the prime `p`, else 0.
    base: Vec<u32>,
    lambda: Vec<f64>,
    primes: Vec<u32>,
}

/// Builds the sieve tables for `0..=limit` in linear time.
pub fn build_sieve(limit: u64) -> Result<SieveTable> {
    SieveTable::new(limit)
}

impl SieveTable {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(invalid(format!("sieve limit must be at least 2, got {limit}")));
        }
        if limit > u32::MAX as u64 {
            return Err(invalid(format!("sieve limit {limit} exceeds u32 range")));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si {
                    break;
                }
                let t = i * p as usize;
                if t > n {
                    break;
                }
                spf[t] = p;
            }
        }

        let mut base = vec![0u32; n + 1];
        let mut lambda = vec![0.0f64; n + 1];
        for i in 2..=n {
            let p = spf[i];
            let rest = i / p as usize;
            if rest == 1 || base[rest] == p {
                base[i] = p;
                lambda[i] = (p as f64).ln();
            }
        }

        Ok(Self {
            limit: n,
            spf,
            base,
            lambda,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit as u64
    }

    /// Smallest prime factor of `n` for `2 ≤ n ≤ limit`.
    pub fn spf(&self, n: u64) -> Option<u64> {
        if n < 2 || n as usize > self.limit {
            return None;
        }
        Some(self.spf[n as usize] as u64)
    }

    /// `Λ(n)`; zero for `n ≤ 1`, composite non-prime-powers and out-of-range `n`.
    pub fn von_mangoldt(&self, n: u64) -> f64 {
        self.lambda.get(n as usize).copied().unwrap_or(0.0)
    }

    /// The prime `p` when `n = p^a` with `a ≥ 1`.
    pub fn prime_power_base(&self, n: u64) -> Option<u64> {
        match self.base.get(n as usize) {
            Some(&p) if p != 0 => Some(p as u64),
            _ => None,
        }
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn lambda_values(&self) -> &[f64] {
        &self.lambda
    }

    /// Factorization using the sieve when `n ≤ limit`, trial division by the
    /// sieved primes otherwise.
    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(invalid("cannot factorize 0"));
        }
        if n as usize > self.limit {
            return factorize(n);
        }
        let mut pairs = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            pairs.push((p as u64, e));
        }
        Ok(Factorization(pairs))
    }

    /// Prime powers `m` with `m^k ≤ bound`, ascending. Requires `bound^{1/k} ≤ limit`.
    pub fn prime_powers_with_kth_power_below(&self, bound: u64, k: u32) -> Vec<u64> {
        let top = iroot(bound, k).min(self.limit as u64);
        (2..=top).filter(|&m| self.base[m as usize] != 0).collect()
    }
}

/// Prime factorization as `(prime, exponent)` pairs with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Recomposes the factored integer.
    pub fn value(&self) -> u64 {
        self.0.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// Prime-power factors `p^e`, in increasing order of `p`.
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, e)| p.pow(e))
    }
}

impl IntoIterator for Factorization {
    type Item = (u64, u32);
    type IntoIter = std::vec::IntoIter<(u64, u32)>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Factorization by trial division.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(invalid("cannot factorize 0"));
    }
    let mut pairs = Vec::new();
    let mut m = n;
    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0;
        while *m % p == 0 {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            pairs.push((p, e));
        }
    };
    push(2, &mut m);
    let mut d = 3u64;
    while d.saturating_mul(d) <= m {
        push(d, &mut m);
        d += 2;
    }
    if m > 1 {
        pairs.push((m, 1));
    }
    Ok(Factorization(pairs))
}

/// Euler's totient `φ(n)`.
pub fn euler_phi(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(phi_of(&f))
}

pub(crate) fn phi_of(f: &Factorization) -> u64 {
    f.pairs()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// All prime powers `m` with `m^k ≤ limit`, ascending.
pub fn prime_powers_with_kth_power_below(limit: u64, k: u32) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(invalid(format!("limit must be at least 2, got {limit}")));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let top = iroot(limit, k);
    if top < 2 {
        return Ok(Vec::new());
    }
    let sieve = SieveTable::new(top)?;
    Ok(sieve.prime_powers_with_kth_power_below(limit, k))
}

/// Prime powers up to `limit` paired with their von Mangoldt weight.
pub fn weighted_prime_powers(limit: u64) -> Result<Vec<(u64, f64)>> {
    if limit < 2 {
        return Ok(Vec::new());
    }
    let sieve = SieveTable::new(limit)?;
    Ok((2..=limit)
        .filter_map(|m| {
            let l = sieve.von_mangoldt(m);
            (l > 0.0).then_some((m, l))
        })
        .collect())
}

/// Largest `r` with `r^k ≤ n`.
pub fn iroot(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    while r > 0 && checked_pow(r, k).map_or(true, |v| v > n) {
        r -= 1;
    }
    while checked_pow(r + 1, k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m`; returns 0 when `m == 1`.
pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Solutions of `x ≡ a (mod m1)`, `x ≡ b (mod m2)` for coprime moduli.
pub fn crt_pair(a: u64, m1: u64, b: u64, m2: u64) -> u64 {
    debug_assert_eq!(gcd(m1, m2), 1);
    let m = m1 * m2;
    // x = a + m1 * t, with m1 * t ≡ b - a (mod m2)
    let inv = mod_inverse(m1 % m2, m2).expect("coprime moduli");
    let diff = (b % m2 + m2 - a % m2) % m2;
    let t = mul_mod(diff, inv, m2);
    (a % m + mul_mod(m1 % m, t, m)) % m
}

/// Inverse of `a` modulo `m` when it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}
