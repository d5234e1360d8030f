//! Dirichlet characters modulo `q`, built from the cyclic decomposition of
//! `(Z/qZ)^*` and evaluated exactly as roots of unity.
//!
//! For an odd prime power `p^a` the unit group is cyclic and we use its
//! smallest primitive root. For `2^a` with `a ≥ 3` the group is
//! `⟨−1⟩ × ⟨5⟩` of orders `2` and `2^{a−2}`; for `a = 2` it is `⟨−1⟩`.
//! Each local generator is lifted to a residue mod `q` that is `≡ 1` modulo
//! the other prime-power factors, so the components multiply independently.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::arith::{crt_pair, factorize, gcd, lcm, mul_mod, phi_of, pow_mod};
use crate::error::invalid;
use crate::Result;

/// The exact root of unity `e(num / order)`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    order: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, order: 1 };

    pub fn new(num: u64, order: u64) -> Self {
        assert!(order >= 1, "root of unity needs a positive order");
        let num = num % order;
        if num == 0 {
            return Self::ONE;
        }
        let g = gcd(num, order);
        Self {
            num: num / g,
            order: order / g,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    /// Exact multiplicative order.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    /// `+1` or `−1` when the value is real.
    pub fn sign(&self) -> Option<i64> {
        match self.order {
            1 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn mul(self, other: Self) -> Self {
        let l = lcm(self.order, other.order);
        let a = self.num as u128 * (l / self.order) as u128;
        let b = other.num as u128 * (l / other.order) as u128;
        Self::new(((a + b) % l as u128) as u64, l)
    }

    pub fn pow(self, k: u64) -> Self {
        Self::new(mul_mod(self.num, k % self.order, self.order), self.order)
    }

    pub fn conj(self) -> Self {
        Self::new(self.order - self.num, self.order)
    }

    /// Numerator of this root written over `order`, which must be a multiple
    /// of the exact order.
    pub fn numerator_over(&self, order: u64) -> u64 {
        assert_eq!(order % self.order, 0, "order {order} not a multiple of {}", self.order);
        self.num * (order / self.order)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.num as f64 / self.order as f64)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({}/{})", self.num, self.order)
    }
}

/// One cyclic factor of `(Z/qZ)^*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicComponent {
    /// Prime whose power this component belongs to.
    pub prime: u64,
    /// The prime-power factor `p^a` of `q`.
    pub prime_power: u64,
    pub order: u64,
    /// Generator modulo the prime power.
    pub local_generator: u64,
    /// Generator modulo `q` (≡ 1 modulo the other prime-power factors).
    pub generator: u64,
}

/// `(Z/qZ)^*` as a product of cyclic groups with a full discrete-log table.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    modulus: u64,
    phi: u64,
    exponent: u64,
    components: Vec<CyclicComponent>,
    /// Row `u` holds the exponent vector of residue `u`; only valid for units.
    dlog: Vec<u32>,
    unit: Vec<bool>,
}

/// Builds the unit group of `Z/qZ`.
pub fn build_unit_group(q: u64) -> Result<UnitGroup> {
    UnitGroup::new(q)
}

impl UnitGroup {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(invalid("modulus must be positive"));
        }
        if q > u32::MAX as u64 {
            return Err(invalid(format!("modulus {q} too large for a dlog table")));
        }
        let fact = factorize(q)?;
        let phi = phi_of(&fact);

        let mut components = Vec::new();
        for &(p, e) in fact.pairs() {
            let pe = p.pow(e);
            let local: Vec<(u64, u64)> = if p == 2 {
                match e {
                    1 => vec![],
                    2 => vec![(2, 3)],
                    _ => vec![(2, pe - 1), (1 << (e - 2), 5)],
                }
            } else {
                let order = (p - 1) * p.pow(e - 1);
                vec![(order, smallest_primitive_root(pe, order))]
            };
            let rest = q / pe;
            for (order, g) in local {
                let generator = if rest == 1 { g } else { crt_pair(g, pe, 1, rest) };
                components.push(CyclicComponent {
                    prime: p,
                    prime_power: pe,
                    order,
                    local_generator: g,
                    generator,
                });
            }
        }
        debug_assert_eq!(components.iter().map(|c| c.order).product::<u64>(), phi);
        let exponent = components.iter().fold(1, |acc, c| lcm(acc, c.order));

        let (dlog, unit) = dlog_table(q, &components);
        Ok(Self {
            modulus: q,
            phi,
            exponent,
            components,
            dlog,
            unit,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `φ(q)`, the group order.
    pub fn order(&self) -> u64 {
        self.phi
    }

    /// Least common multiple of the component orders; every character value
    /// is an `exponent`-th root of unity.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn components(&self) -> &[CyclicComponent] {
        &self.components
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn is_unit(&self, n: u64) -> bool {
        self.unit[(n % self.modulus) as usize]
    }

    /// Exponent vector `(e_1, …, e_r)` with `n ≡ Π g_i^{e_i} (mod q)`.
    pub fn dlog(&self, n: u64) -> Option<&[u32]> {
        let u = (n % self.modulus) as usize;
        if !self.unit[u] {
            return None;
        }
        let r = self.rank();
        Some(&self.dlog[u * r..(u + 1) * r])
    }

    /// Units `0 ≤ u < q` in increasing order (for `q = 1` this is `[0]`).
    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.modulus).filter(|&u| self.unit[u as usize])
    }

    pub fn principal(&self) -> DirichletCharacter<'_> {
        DirichletCharacter {
            group: self,
            exps: vec![0; self.rank()],
        }
    }

    /// Character with the given exponents on the generators.
    pub fn character(&self, exps: &[u32]) -> Result<DirichletCharacter<'_>> {
        if exps.len() != self.rank() {
            return Err(invalid(format!(
                "modulus {} has {} components, got {} exponents",
                self.modulus,
                self.rank(),
                exps.len()
            )));
        }
        for (a, c) in exps.iter().zip(&self.components) {
            if *a as u64 >= c.order {
                return Err(invalid(format!("exponent {a} out of range for component of order {}", c.order)));
            }
        }
        Ok(DirichletCharacter {
            group: self,
            exps: exps.to_vec(),
        })
    }

    /// All `φ(q)` characters in lexicographic order of exponent vectors.
    pub fn characters(&self) -> CharacterIter<'_> {
        CharacterIter {
            group: self,
            next: Some(vec![0; self.rank()]),
        }
    }
}

/// Enumerates every character of a group.
pub fn enumerate_characters(group: &UnitGroup) -> Vec<DirichletCharacter<'_>> {
    group.characters().collect()
}

pub struct CharacterIter<'g> {
    group: &'g UnitGroup,
    next: Option<Vec<u32>>,
}

impl<'g> Iterator for CharacterIter<'g> {
    type Item = DirichletCharacter<'g>;

    fn next(&mut self) -> Option<Self::Item> {
        let exps = self.next.take()?;
        let mut succ = exps.clone();
        let mut i = succ.len();
        let mut done = true;
        while i > 0 {
            i -= 1;
            succ[i] += 1;
            if (succ[i] as u64) < self.group.components[i].order {
                done = false;
                break;
            }
            succ[i] = 0;
        }
        if !done {
            self.next = Some(succ);
        }
        Some(DirichletCharacter {
            group: self.group,
            exps,
        })
    }
}

fn smallest_primitive_root(pe: u64, order: u64) -> u64 {
    if order == 1 {
        return 1;
    }
    let prime_factors: Vec<u64> = factorize(order)
        .expect("positive order")
        .pairs()
        .iter()
        .map(|&(r, _)| r)
        .collect();
    (2..pe)
        .find(|&g| {
            gcd(g, pe) == 1 && prime_factors.iter().all(|&r| pow_mod(g, order / r, pe) != 1)
        })
        .expect("odd prime powers have primitive roots")
}

fn dlog_table(q: u64, components: &[CyclicComponent]) -> (Vec<u32>, Vec<bool>) {
    let r = components.len();
    let n = q as usize;
    let mut dlog = vec![0u32; n * r];
    let mut unit = vec![false; n];
    // Odometer over exponent vectors with running prefix products.
    let mut exps = vec![0u32; r];
    let mut prefix = vec![1 % q; r + 1];
    loop {
        for i in 0..r {
            prefix[i + 1] = mul_mod(prefix[i], pow_mod(components[i].generator, exps[i] as u64, q), q);
        }
        let u = prefix[r] as usize;
        debug_assert!(!unit[u], "generators not independent mod {q}");
        unit[u] = true;
        dlog[u * r..(u + 1) * r].copy_from_slice(&exps);

        let mut i = r;
        loop {
            if i == 0 {
                return (dlog, unit);
            }
            i -= 1;
            exps[i] += 1;
            if (exps[i] as u64) < components[i].order {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// A Dirichlet character, identified by its exponents on the group generators:
/// `χ(g_i) = e(a_i / d_i)`.
#[derive(Debug, Clone)]
pub struct DirichletCharacter<'g> {
    group: &'g UnitGroup,
    exps: Vec<u32>,
}

impl PartialEq for DirichletCharacter<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.group.modulus == other.group.modulus && self.exps == other.exps
    }
}

impl Eq for DirichletCharacter<'_> {}

impl<'g> DirichletCharacter<'g> {
    pub fn group(&self) -> &'g UnitGroup {
        self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_principal(&self) -> bool {
        self.exps.iter().all(|&a| a == 0)
    }

    /// `χ(n)` as a numerator over [`UnitGroup::exponent`], or `None` off the units.
    pub fn phase(&self, n: u64) -> Option<u64> {
        let l = self.group.exponent;
        let e = self.group.dlog(n)?;
        let mut t = 0u64;
        for ((a, x), c) in self.exps.iter().zip(e).zip(&self.group.components) {
            t += (*a as u64 * *x as u64 % c.order) * (l / c.order);
        }
        Some(t % l)
    }

    /// Exact value `χ(n)`; `None` stands for `0` when `gcd(n, q) > 1`.
    pub fn eval(&self, n: u64) -> Option<RootOfUnity> {
        self.phase(n).map(|t| RootOfUnity::new(t, self.group.exponent))
    }

    /// `χ^k`, i.e. exponents multiplied by `k` modulo each component order.
    pub fn pow(&self, k: u64) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(&self.group.components)
            .map(|(&a, c)| mul_mod(a as u64, k % c.order, c.order) as u32)
            .collect();
        Self {
            group: self.group,
            exps,
        }
    }

    pub fn conj(&self) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(&self.group.components)
            .map(|(&a, c)| ((c.order - a as u64) % c.order) as u32)
            .collect();
        Self {
            group: self.group,
            exps,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modulus(), other.modulus(), "characters of different moduli");
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&self.group.components)
            .map(|((&a, &b), c)| ((a as u64 + b as u64) % c.order) as u32)
            .collect();
        Self {
            group: self.group,
            exps,
        }
    }

    /// Multiplicative order of the character.
    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(&self.group.components)
            .fold(1, |acc, (&a, c)| lcm(acc, c.order / gcd(a as u64, c.order)))
    }

    /// `χ(−1)`, exactly `+1` or `−1`.
    pub fn parity(&self) -> i64 {
        let minus_one = self.group.modulus - 1;
        self.eval(minus_one)
            .and_then(|v| v.sign())
            .expect("χ(−1) is a unit value of order at most 2")
    }

    /// Phases of `χ(0), χ(1), …, χ(q−1)` over [`UnitGroup::exponent`].
    pub fn phase_table(&self) -> Vec<Option<u64>> {
        (0..self.group.modulus).map(|n| self.phase(n)).collect()
    }

    /// Complex values of `χ(0), …, χ(q−1)`, zeros off the units.
    pub fn complex_table(&self) -> Vec<Complex64> {
        let l = self.group.exponent;
        let roots: Vec<Complex64> = (0..l)
            .map(|t| RootOfUnity::new(t, l).to_complex())
            .collect();
        (0..self.group.modulus)
            .map(|n| self.phase(n).map_or(Complex64::new(0.0, 0.0), |t| roots[t as usize]))
            .collect()
    }
}

impl fmt::Display for DirichletCharacter<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ mod {} (", self.group.modulus)?;
        for (i, a) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// `χ^k` for a character.
pub fn char_pow<'g>(chi: &DirichletCharacter<'g>, k: u64) -> DirichletCharacter<'g> {
    chi.pow(k)
}

/// `χ(−1)`.
pub fn char_parity(chi: &DirichletCharacter<'_>) -> i64 {
    chi.parity()
}

/// `χ(n)`, `None` meaning zero.
pub fn eval_character(chi: &DirichletCharacter<'_>, n: u64) -> Option<RootOfUnity> {
    chi.eval(n)
}

/// An integer combination `Σ c_t e(t/L)` of `L`-th roots of unity, evaluated
/// exactly by reduction modulo the cyclotomic polynomial `Φ_L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootSum {
    order: u64,
    counts: Vec<i64>,
}

impl RootSum {
    pub fn new(order: u64) -> Self {
        assert!(order >= 1);
        Self {
            order,
            counts: vec![0; order as usize],
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Adds `coeff · e(t / L)`.
    pub fn add_phase(&mut self, t: u64, coeff: i64) {
        self.counts[(t % self.order) as usize] += coeff;
    }

    pub fn add(&mut self, root: RootOfUnity, coeff: i64) {
        self.add_phase(root.numerator_over(self.order), coeff);
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    /// Coordinates in the basis `1, ζ, …, ζ^{φ(L)−1}` of `Q(ζ_L)`.
    pub fn reduced(&self) -> Vec<i128> {
        let phi = cyclotomic_polynomial(self.order);
        let m = phi.len() - 1;
        let mut r: Vec<i128> = self.counts.iter().map(|&c| c as i128).collect();
        for i in (m..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            for (j, &pj) in phi.iter().enumerate() {
                r[i - m + j] -= c * pj as i128;
            }
        }
        r.truncate(m);
        r
    }

    /// The exact value when it is a rational integer.
    pub fn to_integer(&self) -> Option<i64> {
        let r = self.reduced();
        if r.iter().skip(1).all(|&c| c == 0) {
            Some(r.first().copied().unwrap_or(0) as i64)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.to_integer() == Some(0)
    }

    pub fn to_complex(&self) -> Complex64 {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(t, &c)| RootOfUnity::new(t as u64, self.order).to_complex() * c as f64)
            .sum()
    }
}

/// Integer coefficients of `Φ_n`, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    thread_local! {
        static CACHE: std::cell::RefCell<HashMap<u64, Vec<i64>>> = std::cell::RefCell::new(HashMap::new());
    }
    if let Some(p) = CACHE.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    // Φ_n = Π_{d | n} (x^d − 1)^{μ(n/d)}
    let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    let mut poly: Vec<i64> = vec![1];
    for &d in &divisors {
        if mobius(n / d) == 1 {
            let d = d as usize;
            let mut next = vec![0i64; poly.len() + d];
            for (i, &c) in poly.iter().enumerate() {
                next[i + d] += c;
                next[i] -= c;
            }
            poly = next;
        }
    }
    for &d in &divisors {
        if mobius(n / d) == -1 {
            let d = d as usize;
            let deg = poly.len() - 1 - d;
            let mut quot = vec![0i64; deg + 1];
            for j in 0..=deg {
                let prev = if j >= d { quot[j - d] } else { 0 };
                quot[j] = prev - poly[j];
            }
            poly = quot;
        }
    }
    CACHE.with(|c| c.borrow_mut().insert(n, poly.clone()));
    poly
}

fn mobius(n: u64) -> i32 {
    let f = factorize(n).expect("positive");
    if f.pairs().iter().any(|&(_, e)| e > 1) {
        0
    } else if f.pairs().len() % 2 == 0 {
        1
    } else {
        -1
    }
}
