//! Canonical decompositions `x = ε·δ·y^q` and the table of digits `j` for
//! which `i^p ≡ i + j p (mod p^2)` has no solution `i`.
//!
//! For a prime `q < p`:
//! * if `p ≢ 1 (mod q)` every unit is a `q`-th power, so `ε = 1` and `δ = p^i`;
//! * if `p ≡ 1 (mod q)` then `ε = η^j` for a fixed unit `η` that is not a
//!   `q`-th power (the smallest primitive root mod `p`).
//!
//! For `q = p` odd, `ε = x_0 + x_1 p` whenever the unit part is not a `p`-th
//! power, and `δ = p^j` with `j = γ(x) mod p`.
//!
//! Decompositions are existence statements; different `ε` may represent the
//! same class, and the one returned is whatever the fixed scan order hits
//! first.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::congruence::{find_primitive_root, is_prime, mod_pow};
use crate::error::{Error, Result};
use crate::padic::PAdic;
use crate::roots::{check_coprime, check_qp, lift_roots, root_count};

/// Largest prime accepted by [`j_no_solution_table`].
pub const TABLE_PRIME_LIMIT: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// `p ≡ 1 (mod q)`: `ε = η^j`.
    CoprimeWithEta,
    /// `p ≢ 1 (mod q)`: `ε = 1`.
    CoprimePlain,
    /// `q = p`: `ε ∈ E_1`.
    QEqualsP,
}

impl Form {
    pub fn as_str(&self) -> &'static str {
        match self {
            Form::CoprimeWithEta => "coprime_with_eta",
            Form::CoprimePlain => "coprime_plain",
            Form::QEqualsP => "q_equals_p",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub q: u64,
    pub form: Form,
    pub epsilon: PAdic,
    /// `ε` as an ordinary integer.
    pub epsilon_value: u64,
    /// `δ = p^delta_exponent`.
    pub delta_exponent: u32,
    pub y: PAdic,
    pub eta: Option<u64>,
    pub eta_exponent: Option<u32>,
}

impl Decomposition {
    /// `ε·δ·y^q`.
    pub fn recompose(&self) -> Result<PAdic> {
        self.epsilon
            .mul(&self.y.pow_nat(self.q)?)
            .map(|v| v.shift(self.delta_exponent as i64))
    }
}

fn check_coprime_hypotheses(p: u64, q: u64) -> Result<()> {
    if !is_prime(q) {
        return Err(Error::Hypothesis(format!("q = {q} must be prime")));
    }
    if q >= p {
        return Err(Error::Hypothesis(format!(
            "q = {q} must be smaller than p = {p}"
        )));
    }
    Ok(())
}

/// The smallest primitive root mod `p` as a constant p-adic unit; it is not a
/// `q`-th power whenever `q | p - 1`.
pub fn find_nonresidue_unit(p: u64, q: u64, precision: usize) -> Result<PAdic> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    check_coprime_hypotheses(p, q)?;
    if p % q != 1 {
        return Err(Error::Hypothesis(format!(
            "p = {p} is not 1 mod q = {q}; every unit is a {q}-th power"
        )));
    }
    let g = find_primitive_root(p).expect("primes have primitive roots");
    let eta = PAdic::from_integer(g, p, precision)?;
    if check_coprime(&eta, q)?.solvable {
        return Err(Error::Internal(format!(
            "primitive root {g} is a {q}-th power mod {p}"
        )));
    }
    Ok(eta)
}

/// True when no `p^i η^j` with `0 <= i, j < q`, `i + j > 0`, is a `q`-th power.
pub fn verify_c1(p: u64, q: u64) -> Result<bool> {
    let eta = find_nonresidue_unit(p, q, 4)?;
    for i in 0..q {
        for j in 0..q {
            if i + j == 0 {
                continue;
            }
            let value = if j == 0 {
                PAdic::one(p, 4)?
            } else {
                eta.pow_nat(j)?
            }
            .shift(i as i64);
            if check_coprime(&value, q)?.solvable {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn split_valuation(x: &PAdic, q: u64) -> Result<(i64, u32)> {
    let gamma = x.gamma().ok_or(Error::ZeroInput)?;
    Ok((
        gamma.div_euclid(q as i64),
        gamma.rem_euclid(q as i64) as u32,
    ))
}

fn canonical_root(t: &PAdic, q: u64, n: usize) -> Result<PAdic> {
    let roots = lift_roots(t, q, n)?;
    roots
        .canonical()
        .cloned()
        .ok_or_else(|| Error::Internal("empty root set".into()))
}

/// `x = ε·p^i·y^q` for a prime `q < p`.
pub fn classify_coprime(x: &PAdic, q: u64) -> Result<Decomposition> {
    let p = x.prime();
    check_coprime_hypotheses(p, q)?;
    let (quot, i) = split_valuation(x, q)?;
    let u = x.unit_part()?;
    let n = u.precision().ok_or(Error::ZeroInput)?;

    if p % q != 1 {
        debug_assert_eq!(root_count(p, q), Some(1));
        let w = canonical_root(&u, q, n)?;
        return Ok(Decomposition {
            q,
            form: Form::CoprimePlain,
            epsilon: PAdic::one(p, n)?,
            epsilon_value: 1,
            delta_exponent: i,
            y: w.shift(quot),
            eta: None,
            eta_exponent: None,
        });
    }

    let eta = find_nonresidue_unit(p, q, n)?;
    let g = eta.digit(0).expect("η is a nonzero digit");
    let eta_inv = eta.inv()?;
    let mut eps = PAdic::one(p, n)?;
    let mut t = u.clone();
    for j in 0..q as u32 {
        if check_coprime(&t, q)?.solvable {
            let w = canonical_root(&t, q, n)?;
            return Ok(Decomposition {
                q,
                form: Form::CoprimeWithEta,
                epsilon: eps,
                epsilon_value: g.pow(j),
                delta_exponent: i,
                y: w.shift(quot),
                eta: Some(g),
                eta_exponent: Some(j),
            });
        }
        t = t.mul(&eta_inv)?;
        eps = eps.mul(&eta)?;
    }
    Err(Error::Internal(format!(
        "no power of η = {g} makes {x} a {q}-th power"
    )))
}

/// `x = ε·p^j·y^p` for odd `p`, with `ε ∈ E_1`.
pub fn classify_p(x: &PAdic) -> Result<Decomposition> {
    let p = x.prime();
    if p == 2 {
        return Err(Error::Hypothesis(
            "classification for q = p needs odd p".into(),
        ));
    }
    let (quot, j) = split_valuation(x, p)?;
    let u = x.unit_part()?;
    let n = u.precision().ok_or(Error::ZeroInput)?;
    if n < 3 {
        return Err(Error::InsufficientPrecision {
            needed: 3,
            available: n,
        });
    }
    let (epsilon, epsilon_value) = if check_qp(&u)?.solvable {
        (PAdic::one(p, n)?, 1)
    } else {
        let d = u.digits_to(2)?;
        let value = d[0] + d[1] * p;
        (PAdic::from_integer(value, p, n)?, value)
    };
    let t = u.div(&epsilon)?;
    let w = canonical_root(&t, p, n - 1)?;
    Ok(Decomposition {
        q: p,
        form: Form::QEqualsP,
        epsilon,
        epsilon_value,
        delta_exponent: j,
        y: w.shift(quot),
        eta: None,
        eta_exponent: None,
    })
}

fn check_odd_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::Hypothesis("p must be odd".into()));
    }
    Ok(())
}

/// `j_i` with `i^p ≡ i + j_i p (mod p^2)`, for `i` in `1..p`.
fn fermat_digits(p: u64) -> Vec<u64> {
    let p2 = p * p;
    (1..p).map(|i| (mod_pow(i as i64, p, p2) / p) % p).collect()
}

/// `E_1 = {1} ∪ {i + j p : i^p ≢ i + j p (mod p^2)}`, sorted.
pub fn epsilon_set(p: u64) -> Result<Vec<u64>> {
    check_odd_prime(p)?;
    let p2 = p * p;
    let mut set: Vec<u64> = (1..p)
        .flat_map(|i| (0..p).map(move |j| (i, j)))
        .filter(|&(i, j)| mod_pow(i as i64, p, p2) != i + j * p)
        .map(|(i, j)| i + j * p)
        .collect();
    set.push(1);
    set.sort_unstable();
    set.dedup();
    Ok(set)
}

/// `J_p`: digits `j` in `[0, p-1]` for which `i^p ≡ i + j p (mod p^2)` has
/// no solution `i` in `[1, p-1]`.
pub fn no_solution_digits(p: u64) -> Result<Vec<u64>> {
    check_odd_prime(p)?;
    let mut hit = vec![false; p as usize];
    for j in fermat_digits(p) {
        hit[j as usize] = true;
    }
    Ok((0..p).filter(|&j| !hit[j as usize]).collect())
}

/// `J_p` for every odd prime up to `p_max`.
pub fn j_no_solution_table(p_max: u64) -> Result<BTreeMap<u64, Vec<u64>>> {
    if p_max > TABLE_PRIME_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "p_max = {p_max} exceeds the limit {TABLE_PRIME_LIMIT}"
        )));
    }
    (3..=p_max)
        .filter(|&p| is_prime(p))
        .map(|p| Ok((p, no_solution_digits(p)?)))
        .collect()
}

/// `{1} ∪ {i + j p : j ∈ J_p, 1 <= i < p}`, the smaller ε-sets obtained by
/// restricting `j` to the table entries.
pub fn table_epsilon_set(p: u64) -> Result<Vec<u64>> {
    let js = no_solution_digits(p)?;
    let mut set: Vec<u64> = js
        .iter()
        .flat_map(|&j| (1..p).map(move |i| i + j * p))
        .collect();
    set.push(1);
    set.sort_unstable();
    set.dedup();
    Ok(set)
}

/// One line per prime: `p=<p>: j1, j2, ...`.
pub fn format_j_table(table: &BTreeMap<u64, Vec<u64>>) -> String {
    let mut out = String::new();
    for (p, js) in table {
        let row: Vec<String> = js.iter().map(u64::to_string).collect();
        writeln!(out, "p={p}: {}", row.join(", ")).expect("writing to a String");
    }
    out
}
