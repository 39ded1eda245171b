//! Multinomial bookkeeping for `(x_0 + x_1 p + x_2 p^2 + …)^q`.
//!
//! Expanded as a polynomial in `p` (no carries), the coefficient of `p^k` is
//! `q·x_0^(q-1)·x_k + N_k(x_0, …, x_{k-1})`, where `N_k` sums
//! `q!/(m_0!⋯m_{k-1}!) · x_0^m_0 ⋯ x_{k-1}^m_{k-1}` over all exponent tuples
//! with `Σ m_i = q` and `Σ i·m_i = k`. In particular `N_1 = 0`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// One monomial of `N_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NkTerm {
    /// `m_0, …, m_{k-1}`.
    pub exponents: Vec<u64>,
    pub coefficient: BigUint,
}

impl NkTerm {
    /// `coefficient · Π x_i^{m_i}`; digits beyond `x` count as zero.
    pub fn evaluate(&self, x: &[u64]) -> BigUint {
        let mut value = self.coefficient.clone();
        for (i, &m) in self.exponents.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let xi = x.get(i).copied().unwrap_or(0);
            if xi == 0 {
                return BigUint::zero();
            }
            value *= num_traits::pow(BigUint::from(xi), m as usize);
        }
        value
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `q! / Π parts_i!`, computed as the telescoping product
/// `C(m_0, m_0) · C(m_0 + m_1, m_1) ⋯ C(m_0 + … + m_{k-1}, m_{k-1})`.
pub fn multinomial_coeff(q: u64, parts: &[u64]) -> Result<BigUint> {
    let total: u64 = parts.iter().sum();
    if total != q {
        return Err(Error::InvalidArgument(format!(
            "parts sum to {total}, expected {q}"
        )));
    }
    let mut running = 0;
    let mut acc = BigUint::one();
    for &m in parts {
        running += m;
        acc *= binomial(running, m);
    }
    Ok(acc)
}

/// Every exponent tuple contributing to `N_k` for the power `q`, with its
/// multinomial coefficient. Empty for `k = 1`.
pub fn nk_terms(q: u64, k: usize) -> Vec<NkTerm> {
    let mut terms = Vec::new();
    if k < 2 {
        return terms;
    }
    let mut exponents = vec![0u64; k];
    collect_tuples(q, k - 1, k as u64, q, &mut exponents, &mut terms);
    terms
}

// Backtracks over m_i for i = idx, idx-1, …, 1 with both constraint sums
// pruned; m_0 takes whatever count is left.
fn collect_tuples(
    q: u64,
    idx: usize,
    weight_left: u64,
    count_left: u64,
    exponents: &mut Vec<u64>,
    out: &mut Vec<NkTerm>,
) {
    if idx == 0 {
        if weight_left == 0 {
            exponents[0] = count_left;
            let coefficient = multinomial_coeff(q, exponents).expect("tuple sums to q");
            out.push(NkTerm {
                exponents: exponents.clone(),
                coefficient,
            });
            exponents[0] = 0;
        }
        return;
    }
    let i = idx as u64;
    let max_m = (weight_left / i).min(count_left);
    for m in (0..=max_m).rev() {
        exponents[idx] = m;
        collect_tuples(
            q,
            idx - 1,
            weight_left - m * i,
            count_left - m,
            exponents,
            out,
        );
    }
    exponents[idx] = 0;
}

/// Exact value of `N_k(x_0, …, x_{k-1})`.
pub fn compute_nk(q: u64, x: &[u64], k: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if x.len() < k {
        return Err(Error::InsufficientPrecision {
            needed: k,
            available: x.len(),
        });
    }
    Ok(nk_terms(q, k).iter().map(|t| t.evaluate(x)).sum())
}

/// The uncarried coefficient of `p^k` in `(Σ x_i p^i)^q`:
/// `q·x_0^(q-1)·x_k + N_k`, reading `x_k` as zero past the end of `x`.
pub fn expansion_coefficient(q: u64, x: &[u64], k: usize) -> Result<BigUint> {
    if x.is_empty() {
        return Err(Error::InsufficientPrecision {
            needed: 1,
            available: 0,
        });
    }
    if k == 0 {
        return Ok(num_traits::pow(BigUint::from(x[0]), q as usize));
    }
    let mut padded = x.to_vec();
    if padded.len() < k + 1 {
        padded.resize(k + 1, 0);
    }
    let linear = BigUint::from(q)
        * num_traits::pow(BigUint::from(padded[0]), (q - 1) as usize)
        * BigUint::from(padded[k]);
    Ok(linear + compute_nk(q, &padded, k)?)
}

/// Precomputed `N_k` term lists for one exponent `q` and all `k <= k_max`.
#[derive(Debug, Clone)]
pub struct NkTable {
    q: u64,
    terms: Vec<Vec<NkTerm>>,
}

impl NkTable {
    pub fn new(q: u64, k_max: usize) -> NkTable {
        NkTable {
            q,
            terms: (0..=k_max).map(|k| nk_terms(q, k)).collect(),
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k_max(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self, k: usize) -> &[NkTerm] {
        &self.terms[k]
    }

    pub fn eval(&self, k: usize, x: &[u64]) -> BigUint {
        self.terms[k].iter().map(|t| t.evaluate(x)).sum()
    }
}

/// For `q = p`: `(p | N_k, p | k)`. For nonzero digits these two flags
/// always differ.
pub fn nk_dichotomy(p: u64, k: usize, x: &[u64]) -> Result<(bool, bool)> {
    let nk = compute_nk(p, x, k)?;
    let divides_nk = (&nk % BigUint::from(p)).is_zero();
    Ok((divides_nk, k as u64 % p == 0))
}

/// Number of carries when adding `m` and `n` in base `p`, which is the
/// exponent of `p` in `C(m + n, m)`.
pub fn binom_valuation_kummer(m: u64, n: u64, p: u64) -> u32 {
    assert!(p >= 2, "base must be at least 2");
    let (mut a, mut b, mut carry, mut carries) = (m, n, 0u64, 0u32);
    while a > 0 || b > 0 || carry > 0 {
        let s = a % p + b % p + carry;
        carry = u64::from(s >= p);
        carries += carry as u32;
        a /= p;
        b /= p;
    }
    carries
}

/// `Ñ_pk = N_pk - p(p-1)·x_0^(p-2)·x_1·x_{pk-1}`: the part of `N_pk` that
/// does not involve `x_{pk-1}`. Needs `x_0, …, x_{pk-2}`.
pub fn ntilde_pk(p: u64, x: &[u64], k: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let pk = p as usize * k;
    if pk - 1 <= 1 {
        // p = 2, k = 1: the index pk-1 coincides with 1
        return Err(Error::InvalidArgument(
            "x_{pk-1} must be distinct from x_1".into(),
        ));
    }
    if x.len() < pk - 1 {
        return Err(Error::InsufficientPrecision {
            needed: pk - 1,
            available: x.len(),
        });
    }
    let mut digits = x[..pk - 1].to_vec();
    digits.push(0);
    compute_nk(p, &digits, pk)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial_coeff(3, &[3]).unwrap(), big(1));
        assert_eq!(multinomial_coeff(5, &[2, 2, 1]).unwrap(), big(30));
        assert_eq!(multinomial_coeff(4, &[0, 4, 0]).unwrap(), big(1));
        assert!(multinomial_coeff(5, &[2, 2]).is_err());
        for p in [2u64, 3, 5, 7, 11, 13] {
            for m in 1..p {
                let c = multinomial_coeff(p, &[m, p - m]).unwrap();
                assert!((c % big(p)).is_zero());
            }
        }
    }

    #[test]
    fn nk_examples() {
        assert_eq!(compute_nk(5, &[3], 1).unwrap(), big(0));
        // (x0 + x1 p)^2 = x0^2 + 2 x0 x1 p + x1^2 p^2
        assert_eq!(compute_nk(2, &[1, 1], 2).unwrap(), big(1));
        // (x0 + x1 p)^3 has p^2 coefficient 3 x0 x1^2
        assert_eq!(compute_nk(3, &[1, 2], 2).unwrap(), big(12));
        assert!(compute_nk(3, &[1], 2).is_err());
    }

    #[test]
    fn dichotomy_examples() {
        let (div_nk, div_k) = nk_dichotomy(3, 2, &[1, 2]).unwrap();
        assert!(div_nk && !div_k);
        // N_3 = x1^3 + 6 x0 x1 x2 = 7
        assert_eq!(compute_nk(3, &[1, 1, 1], 3).unwrap(), big(7));
        let (div_nk, div_k) = nk_dichotomy(3, 3, &[1, 1, 1]).unwrap();
        assert!(!div_nk && div_k);
        assert_eq!(nk_dichotomy(5, 1, &[1]).unwrap(), (true, false));
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(binom_valuation_kummer(3, 3, 2), 2);
        assert_eq!(binom_valuation_kummer(2, 2, 2), 1);
        for p in [2u64, 3, 5, 7, 11] {
            for k in 1..p {
                assert_eq!(binom_valuation_kummer(k, p - k, p), 1);
            }
        }
        assert_eq!(binom_valuation_kummer(0, 0, 3), 0);
    }

    #[test]
    fn ntilde_examples() {
        assert_eq!(ntilde_pk(3, &[1, 1, 1], 1).unwrap(), big(1));
        assert_eq!(
            ntilde_pk(3, &[1, 1, 1], 1).unwrap(),
            compute_nk(3, &[1, 1, 1], 3).unwrap() - big(6)
        );
        // x = (1, 0, ...): N_3 reduces to x_1^3 = 0
        assert_eq!(ntilde_pk(3, &[1, 0], 1).unwrap(), big(0));
        assert!(ntilde_pk(2, &[1], 1).is_err());
        assert!(ntilde_pk(5, &[1, 2, 3], 1).is_err());
    }

    #[test]
    fn ntilde_ignores_pivot_digit() {
        for p in [3u64, 5, 7] {
            for k in 1..=3usize {
                let pk = p as usize * k;
                let base: Vec<u64> = (0..pk).map(|i| (i as u64 * 5 + 1) % p).collect();
                let expected = ntilde_pk(p, &base, k).unwrap();
                for d in 0..p {
                    let mut x = base.clone();
                    x[pk - 1] = d;
                    let full = compute_nk(p, &x, pk).unwrap();
                    let pivot = big(p * (p - 1))
                        * num_traits::pow(big(x[0]), (p - 2) as usize)
                        * big(x[1])
                        * big(d);
                    assert_eq!(full - pivot, expected);
                }
            }
        }
    }

    #[test]
    fn table_matches_direct() {
        let table = NkTable::new(5, 12);
        let x = [1u64, 4, 2, 3, 0, 1, 4, 4, 2, 1, 3, 2];
        for k in 1..=12 {
            assert_eq!(table.eval(k, &x), compute_nk(5, &x, k).unwrap());
        }
        assert_eq!(table.k_max(), 12);
    }
}
