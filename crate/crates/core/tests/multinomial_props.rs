use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use padic_roots::multinomial::{
    binom_valuation_kummer, binomial, compute_nk, expansion_coefficient, multinomial_coeff,
    nk_dichotomy, nk_terms, ntilde_pk, NkTable,
};

/// Coefficients of `(Σ x_i t^i)^q` by repeated polynomial multiplication,
/// truncated past degree `deg`.
fn poly_power(x: &[u64], q: u64, deg: usize) -> Vec<BigUint> {
    let mut acc = vec![BigUint::zero(); deg + 1];
    acc[0] = BigUint::one();
    for _ in 0..q {
        let mut next = vec![BigUint::zero(); deg + 1];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &xj) in x.iter().enumerate().take(deg + 1 - i) {
                next[i + j] += a * xj;
            }
        }
        acc = next;
    }
    acc
}

fn factorial_valuation(n: u64, p: u64) -> u32 {
    let mut v = 0;
    let mut pk = p;
    while pk <= n {
        v += (n / pk) as u32;
        pk *= p;
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn expansion_matches_polynomial_power(
        q in 1u64..9,
        x in prop::collection::vec(0u64..13, 1..9),
    ) {
        let deg = x.len() + 2;
        let coeffs = poly_power(&x, q, deg);
        for k in 0..=deg {
            prop_assert_eq!(&expansion_coefficient(q, &x, k).unwrap(), &coeffs[k], "k={}", k);
        }
    }

    #[test]
    fn nk_excludes_the_linear_term(
        q in 2u64..8,
        x in prop::collection::vec(1u64..10, 2..8),
    ) {
        let k = x.len() - 1;
        let full = poly_power(&x, q, k)[k].clone();
        let linear = BigUint::from(q) * num_traits::pow(BigUint::from(x[0]), (q - 1) as usize)
            * BigUint::from(x[k]);
        prop_assert_eq!(compute_nk(q, &x, k).unwrap(), full - linear);
    }

    #[test]
    fn kummer_matches_legendre(m in 0u64..3000, n in 0u64..3000, p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
        let legendre = factorial_valuation(m + n, p) - factorial_valuation(m, p) - factorial_valuation(n, p);
        prop_assert_eq!(binom_valuation_kummer(m, n, p), legendre);
    }

    #[test]
    fn binomials_are_divisible_by_n_over_gcd(n in 1u64..200, k in 0u64..200) {
        prop_assume!(k <= n);
        let c = binomial(n, k);
        if k > 0 {
            let d = n / n.gcd(&k);
            prop_assert!((c.clone() % BigUint::from(d)).is_zero());
        }
        prop_assert_eq!(c, binomial(n, n - k));
    }

    #[test]
    fn dichotomy_on_nonzero_digits(
        p in prop::sample::select(vec![3u64, 5, 7]),
        seed in prop::collection::vec(1u64..1000, 15),
        k in 1usize..15,
    ) {
        let x: Vec<u64> = seed.iter().map(|s| 1 + s % (p - 1)).collect();
        let (divides_nk, divides_k) = nk_dichotomy(p, k, &x).unwrap();
        prop_assert_ne!(divides_nk, divides_k);
    }
}

#[test]
fn multinomial_sums_to_power_of_length() {
    // Σ over compositions of q into r parts = r^q
    for q in 1u64..=8 {
        for r in 1usize..=4 {
            let mut total = BigUint::zero();
            let mut parts = vec![0u64; r];
            loop {
                if parts.iter().sum::<u64>() == q {
                    total += multinomial_coeff(q, &parts).unwrap();
                }
                let mut i = 0;
                while i < r {
                    parts[i] += 1;
                    if parts[i] <= q {
                        break;
                    }
                    parts[i] = 0;
                    i += 1;
                }
                if i == r {
                    break;
                }
            }
            assert_eq!(total, num_traits::pow(BigUint::from(r), q as usize));
        }
    }
}

#[test]
fn term_tuples_satisfy_both_constraints() {
    for q in 2u64..=7 {
        for k in 1usize..=12 {
            for t in nk_terms(q, k) {
                assert_eq!(t.exponents.len(), k);
                assert_eq!(t.exponents.iter().sum::<u64>(), q);
                let weight: u64 = t
                    .exponents
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| i as u64 * m)
                    .sum();
                assert_eq!(weight, k as u64);
            }
        }
    }
}

#[test]
fn ntilde_drops_only_the_pivot_term() {
    let table = NkTable::new(5, 10);
    let x = [2u64, 3, 1, 4, 4, 1, 2, 3, 3, 1];
    let full = table.eval(10, &x);
    // p(p-1)·x0^(p-2)·x1·x9
    let pivot = BigUint::from(5u64 * 4) * num_traits::pow(BigUint::from(2u64), 3) * 3u64 * 1u64;
    assert_eq!(ntilde_pk(5, &x, 2).unwrap(), full - pivot);
}
