//! Modular arithmetic over machine integers: totients, primitive roots,
//! indices (discrete logarithms), linear congruences and n-th power residues.
//!
//! Indices are normalized to `[0, φ(m) - 1]`, so `index(r, 1, m) == 0` and
//! divisibility tests of the form `d | ind_r a` work without special cases.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

/// Discrete logs over groups of at most this order are found by a linear scan.
const EXHAUSTIVE_DLOG_LIMIT: u64 = 64;

/// Largest prime for which a full index table is built and cached.
const INDEX_TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexValue {
    pub base_r: u64,
    pub value: u64,
    pub modulus_phi: u64,
}

/// Residues solving a congruence, sorted ascending in `[0, modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceSolution {
    pub representatives: Vec<u64>,
    pub modulus: u64,
}

impl CongruenceSolution {
    fn empty(modulus: u64) -> Self {
        CongruenceSolution {
            representatives: Vec::new(),
            modulus,
        }
    }

    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_solvable(&self) -> bool {
        !self.representatives.is_empty()
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `b^e mod m` by square-and-multiply. Negative bases are reduced first.
pub fn mod_pow(b: i64, e: u64, m: u64) -> u64 {
    assert!(m >= 1, "modulus must be positive");
    if m == 1 {
        return 0;
    }
    let mut base = b.rem_euclid(m as i64) as u64;
    let mut exp = e;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let ext = (a as i128).extended_gcd(&(m as i128));
    if ext.gcd != 1 {
        return None;
    }
    Some(ext.x.rem_euclid(m as i128) as u64)
}

/// Trial-division factorization, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        factors.push((n, 1));
    }
    factors
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let f = factorize(n);
    f.len() == 1 && f[0].1 == 1
}

pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "totient is defined for n >= 1");
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Smallest `k >= 1` with `a^k ≡ 1 (mod m)`, or `None` when `a` is not a unit.
pub fn multiplicative_order(a: i64, m: u64) -> Option<u64> {
    let a = a.rem_euclid(m as i64) as u64;
    if m == 1 {
        return Some(1);
    }
    if a.gcd(&m) != 1 {
        return None;
    }
    let mut order = euler_phi(m);
    for (f, _) in factorize(order) {
        while order % f == 0 && mod_pow(a as i64, order / f, m) == 1 {
            order /= f;
        }
    }
    Some(order)
}

/// True when `m` is 1, 2, 4, `p^k` or `2p^k` for an odd prime `p`.
pub fn has_primitive_root(m: u64) -> bool {
    match m {
        0 => false,
        1 | 2 | 4 => true,
        _ => {
            let odd = if m % 2 == 0 { m / 2 } else { m };
            if odd % 2 == 0 {
                return false;
            }
            factorize(odd).len() == 1
        }
    }
}

pub fn is_primitive_root(r: i64, m: u64) -> bool {
    multiplicative_order(r, m) == Some(euler_phi(m))
}

/// The smallest primitive root modulo `m`, or `None` when the unit group
/// is not cyclic. For `m = 2` the root is 1.
pub fn find_primitive_root(m: u64) -> Option<u64> {
    if m < 2 || !has_primitive_root(m) {
        return None;
    }
    let phi = euler_phi(m);
    let prime_factors: Vec<u64> = factorize(phi).into_iter().map(|(f, _)| f).collect();
    (1..m).find(|&g| {
        g.gcd(&m) == 1
            && prime_factors
                .iter()
                .all(|&f| mod_pow(g as i64, phi / f, m) != 1)
    })
}

/// Solves `base^x ≡ target (mod m)` for `x` in `[0, order)`, where `order`
/// is the multiplicative order of `base`.
pub fn discrete_log(base: u64, target: u64, m: u64, order: u64) -> Option<u64> {
    let target = target % m;
    if order <= EXHAUSTIVE_DLOG_LIMIT {
        let mut acc = 1 % m;
        for x in 0..order {
            if acc == target {
                return Some(x);
            }
            acc = mul_mod(acc, base, m);
        }
        return None;
    }

    // baby-step giant-step
    let step = (order as f64).sqrt().ceil() as u64;
    let mut baby = HashMap::with_capacity(step as usize);
    let mut acc = 1 % m;
    for j in 0..step {
        baby.entry(acc).or_insert(j);
        acc = mul_mod(acc, base, m);
    }
    let giant = mod_inverse(mod_pow(base as i64, step, m), m)?;
    let mut gamma = target;
    for i in 0..=step {
        if let Some(&j) = baby.get(&gamma) {
            let x = i * step + j;
            if x < order {
                return Some(x);
            }
        }
        gamma = mul_mod(gamma, giant, m);
    }
    None
}

/// The index of `a` to the base `r` modulo `m`.
pub fn index(r: i64, a: i64, m: u64) -> Result<IndexValue> {
    if m == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let a_red = a.rem_euclid(m as i64) as u64;
    if a_red.gcd(&m) != 1 {
        return Err(Error::NotCoprime { a, m });
    }
    if !is_primitive_root(r, m) {
        return Err(Error::NotPrimitiveRoot { r, m });
    }
    let phi = euler_phi(m);
    let base = r.rem_euclid(m as i64) as u64;
    let value = discrete_log(base, a_red, m, phi)
        .ok_or_else(|| Error::Internal(format!("no discrete log of {a} base {r} mod {m}")))?;
    Ok(IndexValue {
        base_r: base,
        value,
        modulus_phi: phi,
    })
}

/// All `x` in `[0, |n|)` with `a·x ≡ b (mod n)`.
pub fn solve_linear(a: i64, b: i64, n: i64) -> Result<CongruenceSolution> {
    if n == 0 {
        return Err(Error::InvalidArgument("modulus must be nonzero".into()));
    }
    let n = n.unsigned_abs() as i128;
    let a = (a as i128).rem_euclid(n);
    let b = (b as i128).rem_euclid(n);
    let ext = a.extended_gcd(&n);
    let g = ext.gcd;
    if b % g != 0 {
        return Ok(CongruenceSolution::empty(n as u64));
    }
    let step = n / g;
    let x0 = (ext.x * (b / g)).rem_euclid(step);
    let mut representatives: Vec<u64> = (0..g).map(|t| (x0 + t * step) as u64).collect();
    representatives.sort_unstable();
    Ok(CongruenceSolution {
        representatives,
        modulus: n as u64,
    })
}

/// All solutions of `x^n ≡ a (mod m)` for `m` with a primitive root.
///
/// With `d = gcd(n, φ(m))` the congruence is solvable iff `d` divides the
/// index of `a`, and then it has exactly `d` solutions `r^t` where `t` runs
/// over the solutions of `n·t ≡ ind a (mod φ(m))`.
pub fn power_residue_solve(n: u64, a: i64, m: u64) -> Result<CongruenceSolution> {
    if n == 0 {
        return Err(Error::InvalidArgument("exponent must be at least 1".into()));
    }
    let r = find_primitive_root(m).ok_or(Error::NonCyclicModulus(m))?;
    let ind = index(r as i64, a, m)?;
    let phi = ind.modulus_phi;
    let exponents = solve_linear((n % phi) as i64, ind.value as i64, phi as i64)?;
    let mut representatives: Vec<u64> = exponents
        .representatives
        .iter()
        .map(|&t| mod_pow(r as i64, t, m))
        .collect();
    representatives.sort_unstable();
    Ok(CongruenceSolution {
        representatives,
        modulus: m,
    })
}

/// Whether `x^q ≡ a0 (mod p)` has a solution.
pub fn is_qth_residue(a0: i64, q: u64, p: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if q == 0 {
        return Err(Error::InvalidArgument("exponent must be at least 1".into()));
    }
    if a0.rem_euclid(p as i64) == 0 {
        return Err(Error::NotCoprime { a: a0, m: p });
    }
    if p == 2 {
        // the only unit is 1, and 1^q = 1
        return Ok((1..p).any(|x| mod_pow(x as i64, q, p) == a0.rem_euclid(2) as u64));
    }
    if p <= INDEX_TABLE_LIMIT {
        let table = IndexTable::for_prime(p);
        let d = q.gcd(&(p - 1));
        return Ok(table.index_of(a0) % d == 0);
    }
    Ok(power_residue_solve(q, a0, p)?.is_solvable())
}

/// Full index table for a prime modulus, keyed by residue.
#[derive(Debug)]
pub struct IndexTable {
    pub modulus: u64,
    pub root: u64,
    logs: Vec<u32>,
}

impl IndexTable {
    fn build(p: u64) -> IndexTable {
        let root = find_primitive_root(p).expect("prime moduli have primitive roots");
        let mut logs = vec![0u32; p as usize];
        let mut acc = 1u64;
        for e in 0..p - 1 {
            logs[acc as usize] = e as u32;
            acc = mul_mod(acc, root, p);
        }
        IndexTable {
            modulus: p,
            root,
            logs,
        }
    }

    /// Shared table for the prime `p`, built on first use.
    pub fn for_prime(p: u64) -> Arc<IndexTable> {
        static CACHE: OnceLock<RwLock<HashMap<u64, Arc<IndexTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(t) = cache.read().expect("index cache poisoned").get(&p) {
            return Arc::clone(t);
        }
        let table = Arc::new(IndexTable::build(p));
        let mut guard = cache.write().expect("index cache poisoned");
        Arc::clone(guard.entry(p).or_insert(table))
    }

    pub fn index_of(&self, a: i64) -> u64 {
        let a = a.rem_euclid(self.modulus as i64) as usize;
        debug_assert!(a != 0);
        self.logs[a] as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_power(n: u64, a: i64, m: u64) -> Vec<u64> {
        let a = a.rem_euclid(m as i64) as u64;
        (0..m).filter(|&x| mod_pow(x as i64, n, m) == a).collect()
    }

    #[test]
    fn totients() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(9), 6);
        assert_eq!(
            euler_phi(9),
            (1..9u64).filter(|x| x.gcd(&9) == 1).count() as u64
        );
        for p in [2u64, 3, 5, 7, 101, 7919] {
            assert_eq!(euler_phi(p), p - 1);
        }
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(3, 6, 7), 1);
        assert_eq!(mod_pow(2, 0, 11), 1);
        assert_eq!(mod_pow(-1, 3, 7), 6);
        for a in 1..13 {
            assert_eq!(mod_pow(a, 12, 13), 1);
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(find_primitive_root(7), Some(3));
        assert_eq!(find_primitive_root(8), None);
        assert_eq!(find_primitive_root(9), Some(2));
        assert_eq!(find_primitive_root(2), Some(1));
        assert_eq!(find_primitive_root(4), Some(3));
        assert_eq!(find_primitive_root(13), Some(2));
        assert_eq!(find_primitive_root(12), None);
        assert_eq!(find_primitive_root(50), Some(3));
    }

    #[test]
    fn index_examples() {
        assert_eq!(index(3, 2, 7).unwrap().value, 2);
        assert_eq!(index(3, 6, 7).unwrap().value, 3);
        assert_eq!(index(3, 1, 7).unwrap().value, 0);
        assert_eq!(index(2, 1, 9).unwrap().value, 0);
    }

    #[test]
    fn index_errors() {
        assert_eq!(index(3, 7, 7), Err(Error::NotCoprime { a: 7, m: 7 }));
        assert_eq!(index(2, 3, 7), Err(Error::NotPrimitiveRoot { r: 2, m: 7 }));
    }

    #[test]
    fn bsgs_matches_scan_on_large_group() {
        let p = 10007;
        let r = find_primitive_root(p).unwrap();
        for a in [1u64, 2, 5000, 10006] {
            let ind = index(r as i64, a as i64, p).unwrap();
            assert!(ind.value < p - 1);
            assert_eq!(mod_pow(r as i64, ind.value, p), a);
        }
    }

    #[test]
    fn linear_examples() {
        assert_eq!(
            solve_linear(6, 9, 15).unwrap().representatives,
            vec![4, 9, 14]
        );
        assert!(!solve_linear(2, 1, 4).unwrap().is_solvable());
        assert_eq!(solve_linear(1, 23, 10).unwrap().representatives, vec![3]);
        assert_eq!(
            solve_linear(6, 9, -15).unwrap().representatives,
            vec![4, 9, 14]
        );
        assert!(solve_linear(1, 1, 0).is_err());
    }

    #[test]
    fn power_residue_examples() {
        assert_eq!(
            power_residue_solve(3, 6, 7).unwrap().representatives,
            vec![3, 5, 6]
        );
        assert!(!power_residue_solve(3, 2, 7).unwrap().is_solvable());
        assert_eq!(
            power_residue_solve(2, 7, 9).unwrap().representatives,
            vec![4, 5]
        );
        assert_eq!(
            power_residue_solve(3, 1, 2).unwrap().representatives,
            vec![1]
        );
        assert_eq!(
            power_residue_solve(2, 1, 8),
            Err(Error::NonCyclicModulus(8))
        );
        assert_eq!(
            power_residue_solve(2, 3, 9),
            Err(Error::NotCoprime { a: 3, m: 9 })
        );
    }

    #[test]
    fn qth_residues() {
        assert!(is_qth_residue(2, 3, 5).unwrap());
        assert!(!is_qth_residue(2, 3, 7).unwrap());
        assert!(is_qth_residue(1, 9, 19).unwrap());
        assert!(is_qth_residue(1, 3, 2).unwrap());
        assert!(is_qth_residue(0, 3, 7).is_err());
        assert_eq!(is_qth_residue(1, 3, 9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn power_residue_agrees_with_enumeration() {
        let moduli: Vec<u64> = (3..2000u64)
            .filter(|&m| has_primitive_root(m) && m % 4 != 0)
            .collect();
        for &m in moduli.iter().filter(|&&m| m < 400 || m % 97 == 0) {
            for n in 1..=12u64 {
                for a in (1..m as i64).filter(|a| a.gcd(&(m as i64)) == 1) {
                    let got = power_residue_solve(n, a, m).unwrap();
                    let want = brute_power(n, a, m);
                    assert_eq!(got.representatives, want, "x^{n} = {a} mod {m}");
                    if got.is_solvable() {
                        assert_eq!(got.count() as u64, n.gcd(&euler_phi(m)));
                    }
                }
            }
        }
    }

    #[test]
    fn linear_agrees_with_enumeration() {
        for n in (1..=120i64).chain([997, 1000]) {
            for a in [-7i64, 0, 1, 2, 6, 12, 35, 120] {
                for b in [-3i64, 0, 1, 4, 9, 30] {
                    let got = solve_linear(a, b, n).unwrap().representatives;
                    let want: Vec<u64> = (0..n)
                        .filter(|&x| (a * x - b).rem_euclid(n) == 0)
                        .map(|x| x as u64)
                        .collect();
                    assert_eq!(got, want, "{a}x = {b} mod {n}");
                }
            }
        }
    }

    #[test]
    fn primitive_root_has_full_order() {
        for m in 2..3000u64 {
            if let Some(r) = find_primitive_root(m) {
                assert_eq!(
                    multiplicative_order(r as i64, m),
                    Some(euler_phi(m)),
                    "m = {m}"
                );
            } else {
                assert!(!has_primitive_root(m));
            }
        }
    }
}
