//! Truncated p-adic numbers in canonical form `p^γ (x_0 + x_1 p + x_2 p^2 + …)`.
//!
//! A nonzero value stores its valuation `γ` and the unit part as an exact
//! integer residue modulo `p^N`, where `N` is the relative precision (the
//! number of known digits). The digit vector is derived from that residue.
//!
//! Guaranteed output precision:
//! - `mul`, `inv`, `pow_nat`: the minimum relative precision of the inputs;
//! - `add`, `sub`: the minimum absolute precision `γ + N`, so leading-digit
//!   cancellation eats into the relative precision of the result.

use std::cmp::{min, Ordering};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::congruence::is_prime;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// The exact zero.
    Zero,
    /// A value only known to be divisible by `p^abs_precision`, typically the
    /// result of total cancellation in a sum.
    Negligible { abs_precision: i64 },
    /// `p^gamma · unit` with `p ∤ unit` and `unit < p^precision`.
    Nonzero {
        gamma: i64,
        unit: BigUint,
        precision: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdic {
    p: u64,
    repr: Repr,
}

pub(crate) fn p_pow(p: u64, k: usize) -> BigUint {
    num_traits::pow(BigUint::from(p), k)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u64 {
    assert!(!n.is_zero(), "valuation of zero is infinite");
    let p = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Splits `n = p^v · m` with `p ∤ m` for `n ≠ 0`.
fn split_unsigned(mut n: BigUint, p: u64) -> (usize, BigUint) {
    let pb = BigUint::from(p);
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

impl PAdic {
    fn check_prime(p: u64) -> Result<()> {
        if is_prime(p) {
            Ok(())
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn zero(p: u64) -> Result<PAdic> {
        Self::check_prime(p)?;
        Ok(PAdic {
            p,
            repr: Repr::Zero,
        })
    }

    pub fn one(p: u64, precision: usize) -> Result<PAdic> {
        Self::from_integer(1, p, precision)
    }

    /// Builds `p^gamma · residue` where `residue` is known modulo `p^width`.
    /// Extracts any factors of `p` from the residue into the valuation.
    pub(crate) fn normalize(p: u64, gamma: i64, residue: BigUint, width: usize) -> PAdic {
        let residue = residue % p_pow(p, width);
        if width == 0 || residue.is_zero() {
            return PAdic {
                p,
                repr: Repr::Negligible {
                    abs_precision: gamma + width as i64,
                },
            };
        }
        let (v, unit) = split_unsigned(residue, p);
        PAdic {
            p,
            repr: Repr::Nonzero {
                gamma: gamma + v as i64,
                unit,
                precision: width - v,
            },
        }
    }

    /// Canonical expansion of `num/den` with `precision` unit-part digits.
    pub fn from_rational(
        num: impl Into<BigInt>,
        den: impl Into<BigInt>,
        p: u64,
        precision: usize,
    ) -> Result<PAdic> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Self::check_prime(p)?;
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if num.is_zero() {
            return Ok(PAdic {
                p,
                repr: Repr::Zero,
            });
        }
        let pb = BigInt::from(p);
        let vn = valuation(&num, p);
        let vd = valuation(&den, p);
        let n = &num / num_traits::pow(pb.clone(), vn as usize);
        let d = &den / num_traits::pow(pb, vd as usize);
        let modulus = BigInt::from(p_pow(p, precision));
        let d_inv = d
            .mod_floor(&modulus)
            .modinv(&modulus)
            .expect("denominator is a p-adic unit");
        let unit = (n * d_inv).mod_floor(&modulus);
        Ok(PAdic {
            p,
            repr: Repr::Nonzero {
                gamma: vn as i64 - vd as i64,
                unit: unit.to_biguint().expect("reduced residue is nonnegative"),
                precision,
            },
        })
    }

    pub fn from_integer(n: impl Into<BigInt>, p: u64, precision: usize) -> Result<PAdic> {
        Self::from_rational(n, 1, p, precision)
    }

    /// Normalizes `p^gamma · Σ digits[i] p^i`, carrying any digit `>= p`.
    /// The relative precision is the number of digits supplied, minus any
    /// leading zeros produced by the carries.
    pub fn from_digits(p: u64, gamma: i64, digits: &[u64]) -> Result<PAdic> {
        Self::check_prime(p)?;
        if digits.is_empty() {
            return Err(Error::ZeroPrecision);
        }
        let pb = BigUint::from(p);
        let value = digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &pb + BigUint::from(d));
        Ok(Self::normalize(p, gamma, value, digits.len()))
    }

    /// `p^gamma · unit` where `unit` is read modulo `p^precision`.
    pub fn from_unit_residue(p: u64, gamma: i64, unit: BigUint, precision: usize) -> Result<PAdic> {
        Self::check_prime(p)?;
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        Ok(Self::normalize(p, gamma, unit, precision))
    }

    /// Parses `n`, `n/d` or the explicit digit form `g;d0,d1,...`.
    ///
    /// Explicit digits denote the finite sum `p^g (d0 + d1 p + …)`; it is
    /// expanded to `max(precision, #digits)` digits.
    pub fn parse(input: &str, p: u64, precision: usize) -> Result<PAdic> {
        let fail = |reason: &str| Error::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        Self::check_prime(p)?;
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let s = input.trim();
        if let Some((g, ds)) = s.split_once(';') {
            let gamma: i64 = g.trim().parse().map_err(|_| fail("bad valuation"))?;
            let digits = ds
                .split(',')
                .map(|d| d.trim().parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| fail("bad digit"))?;
            if digits.iter().any(|&d| d >= p) {
                return Err(fail("digit out of range [0, p-1]"));
            }
            if digits[0] == 0 {
                return Err(fail("leading digit must be nonzero"));
            }
            let mut padded = digits;
            if padded.len() < precision {
                padded.resize(precision, 0);
            }
            return Self::from_digits(p, gamma, &padded);
        }
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = BigInt::from_str(n).map_err(|_| fail("bad numerator"))?;
        let den = BigInt::from_str(d).map_err(|_| fail("bad denominator"))?;
        Self::from_rational(num, den, p, precision)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// True only for the exact zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// True when the value is zero up to its known precision.
    pub fn is_negligible(&self) -> bool {
        matches!(self.repr, Repr::Negligible { .. })
    }

    /// True when the value has a canonical form (known nonzero leading digit).
    pub fn is_nonzero(&self) -> bool {
        matches!(self.repr, Repr::Nonzero { .. })
    }

    pub fn gamma(&self) -> Option<i64> {
        match self.repr {
            Repr::Nonzero { gamma, .. } => Some(gamma),
            _ => None,
        }
    }

    /// Number of known unit-part digits.
    pub fn precision(&self) -> Option<usize> {
        match self.repr {
            Repr::Nonzero { precision, .. } => Some(precision),
            _ => None,
        }
    }

    /// The exponent `k` such that the value is known modulo `p^k`.
    /// `None` for the exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::Negligible { abs_precision } => Some(abs_precision),
            Repr::Nonzero {
                gamma, precision, ..
            } => Some(gamma + precision as i64),
        }
    }

    /// The unit part as an integer residue modulo `p^precision`.
    pub fn unit_residue(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Nonzero { unit, .. } => Some(unit),
            _ => None,
        }
    }

    fn nonzero_parts(&self) -> Result<(i64, &BigUint, usize)> {
        match &self.repr {
            Repr::Nonzero {
                gamma,
                unit,
                precision,
            } => Ok((*gamma, unit, *precision)),
            _ => Err(Error::ZeroInput),
        }
    }

    fn same_field(&self, other: &PAdic) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::PrimeMismatch(self.p, other.p))
        }
    }

    /// All known unit-part digits `x_0, …, x_{N-1}`; empty for zero.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Nonzero {
                unit, precision, ..
            } => residue_digits(unit, self.p, *precision),
            _ => Vec::new(),
        }
    }

    /// The first `k` unit-part digits.
    pub fn digits_to(&self, k: usize) -> Result<Vec<u64>> {
        let (_, unit, precision) = self.nonzero_parts()?;
        if k > precision {
            return Err(Error::InsufficientPrecision {
                needed: k,
                available: precision,
            });
        }
        Ok(residue_digits(unit, self.p, k))
    }

    /// The unit-part digit `x_i`, or `None` beyond the known precision.
    pub fn digit(&self, i: usize) -> Option<u64> {
        let (_, unit, precision) = self.nonzero_parts().ok()?;
        if i >= precision {
            return None;
        }
        let d = (unit / p_pow(self.p, i)) % BigUint::from(self.p);
        d.to_u64()
    }

    /// `x / p^γ(x)`: valuation zero, same digits.
    pub fn unit_part(&self) -> Result<PAdic> {
        let (_, unit, precision) = self.nonzero_parts()?;
        Ok(PAdic {
            p: self.p,
            repr: Repr::Nonzero {
                gamma: 0,
                unit: unit.clone(),
                precision,
            },
        })
    }

    /// `|x|_p = p^{-γ(x)}`; the exact zero has norm 0.
    pub fn norm(&self) -> Result<BigRational> {
        match self.repr {
            Repr::Zero => Ok(BigRational::zero()),
            Repr::Negligible { .. } => Err(Error::ZeroInput),
            Repr::Nonzero { gamma, .. } => {
                let pk = BigInt::from(p_pow(self.p, gamma.unsigned_abs() as usize));
                Ok(if gamma >= 0 {
                    BigRational::new(BigInt::one(), pk)
                } else {
                    BigRational::from_integer(pk)
                })
            }
        }
    }

    /// Drops digits beyond `precision`.
    pub fn truncate(&self, precision: usize) -> Result<PAdic> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        match &self.repr {
            Repr::Nonzero {
                gamma,
                unit,
                precision: n,
            } => {
                let n = min(*n, precision);
                Ok(Self::normalize(self.p, *gamma, unit.clone(), n))
            }
            _ => Ok(self.clone()),
        }
    }

    /// Multiplies by `p^k`.
    pub fn shift(&self, k: i64) -> PAdic {
        let repr = match &self.repr {
            Repr::Zero => Repr::Zero,
            Repr::Negligible { abs_precision } => Repr::Negligible {
                abs_precision: abs_precision + k,
            },
            Repr::Nonzero {
                gamma,
                unit,
                precision,
            } => Repr::Nonzero {
                gamma: gamma + k,
                unit: unit.clone(),
                precision: *precision,
            },
        };
        PAdic { p: self.p, repr }
    }

    pub fn neg(&self) -> PAdic {
        match &self.repr {
            Repr::Nonzero {
                gamma,
                unit,
                precision,
            } => {
                let modulus = p_pow(self.p, *precision);
                PAdic {
                    p: self.p,
                    repr: Repr::Nonzero {
                        gamma: *gamma,
                        unit: modulus - unit,
                        precision: *precision,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &PAdic) -> Result<PAdic> {
        self.same_field(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let abs = min(
            self.abs_precision().expect("nonzero"),
            other.abs_precision().expect("nonzero"),
        );
        let terms: Vec<(i64, &BigUint)> = [self, other]
            .iter()
            .filter_map(|x| x.nonzero_parts().ok().map(|(g, u, _)| (g, u)))
            .collect();
        let Some(base) = terms.iter().map(|&(g, _)| g).min() else {
            return Ok(PAdic {
                p: self.p,
                repr: Repr::Negligible { abs_precision: abs },
            });
        };
        if abs <= base {
            return Ok(PAdic {
                p: self.p,
                repr: Repr::Negligible { abs_precision: abs },
            });
        }
        let width = (abs - base) as usize;
        let mut sum = BigUint::zero();
        for (g, u) in terms {
            let offset = (g - base) as usize;
            if offset < width {
                sum += u * p_pow(self.p, offset);
            }
        }
        Ok(Self::normalize(self.p, base, sum, width))
    }

    pub fn sub(&self, other: &PAdic) -> Result<PAdic> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PAdic) -> Result<PAdic> {
        self.same_field(other)?;
        let p = self.p;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Repr::Zero,
            (Repr::Negligible { abs_precision: a }, Repr::Negligible { abs_precision: b }) => {
                Repr::Negligible {
                    abs_precision: a + b,
                }
            }
            (Repr::Negligible { abs_precision }, Repr::Nonzero { gamma, .. })
            | (Repr::Nonzero { gamma, .. }, Repr::Negligible { abs_precision }) => {
                Repr::Negligible {
                    abs_precision: abs_precision + gamma,
                }
            }
            (
                Repr::Nonzero {
                    gamma: g1,
                    unit: u1,
                    precision: n1,
                },
                Repr::Nonzero {
                    gamma: g2,
                    unit: u2,
                    precision: n2,
                },
            ) => {
                let n = min(*n1, *n2);
                Repr::Nonzero {
                    gamma: g1 + g2,
                    unit: (u1 * u2) % p_pow(p, n),
                    precision: n,
                }
            }
        };
        Ok(PAdic { p, repr })
    }

    pub fn inv(&self) -> Result<PAdic> {
        let (gamma, unit, precision) = self.nonzero_parts()?;
        let modulus = p_pow(self.p, precision);
        let inverse = unit
            .modinv(&modulus)
            .ok_or_else(|| Error::Internal("unit part is not invertible".into()))?;
        Ok(PAdic {
            p: self.p,
            repr: Repr::Nonzero {
                gamma: -gamma,
                unit: inverse,
                precision,
            },
        })
    }

    pub fn div(&self, other: &PAdic) -> Result<PAdic> {
        self.mul(&other.inv()?)
    }

    pub fn pow_nat(&self, q: u64) -> Result<PAdic> {
        if q == 0 {
            return Err(Error::InvalidArgument("exponent must be at least 1".into()));
        }
        let repr = match &self.repr {
            Repr::Zero => Repr::Zero,
            Repr::Negligible { abs_precision } => Repr::Negligible {
                abs_precision: abs_precision * q as i64,
            },
            Repr::Nonzero {
                gamma,
                unit,
                precision,
            } => Repr::Nonzero {
                gamma: gamma * q as i64,
                unit: pow_mod(unit, q, &p_pow(self.p, *precision)),
                precision: *precision,
            },
        };
        Ok(PAdic { p: self.p, repr })
    }

    /// Whether `x ≡ y (mod p^k)`, i.e. `v_p(x - y) >= k`, provably at the
    /// known precision.
    pub fn eq_mod(&self, other: &PAdic, k: i64) -> Result<bool> {
        let diff = self.sub(other)?;
        Ok(match diff.repr {
            Repr::Zero => true,
            Repr::Negligible { abs_precision } => abs_precision >= k,
            Repr::Nonzero { gamma, .. } => gamma >= k,
        })
    }

    /// Integer residue of a p-adic integer modulo `p^k`.
    pub fn residue_mod(&self, k: usize) -> Result<BigUint> {
        match &self.repr {
            Repr::Zero => Ok(BigUint::zero()),
            Repr::Negligible { abs_precision } if *abs_precision >= k as i64 => Ok(BigUint::zero()),
            Repr::Nonzero {
                gamma,
                unit,
                precision,
            } if *gamma >= 0 => {
                let known = *gamma + *precision as i64;
                if known < k as i64 {
                    return Err(Error::InsufficientPrecision {
                        needed: k,
                        available: known.max(0) as usize,
                    });
                }
                if *gamma >= k as i64 {
                    return Ok(BigUint::zero());
                }
                Ok((unit * p_pow(self.p, *gamma as usize)) % p_pow(self.p, k))
            }
            Repr::Nonzero { .. } => Err(Error::InvalidArgument(
                "negative valuation has no integer residue".into(),
            )),
            Repr::Negligible { abs_precision } => Err(Error::InsufficientPrecision {
                needed: k,
                available: (*abs_precision).max(0) as usize,
            }),
        }
    }

    /// Compares unit residues; used to order roots reproducibly.
    pub(crate) fn cmp_residue(&self, other: &PAdic) -> Ordering {
        (self.gamma(), self.unit_residue()).cmp(&(other.gamma(), other.unit_residue()))
    }
}

pub(crate) fn residue_digits(unit: &BigUint, p: u64, k: usize) -> Vec<u64> {
    let pb = BigUint::from(p);
    let mut digits = Vec::with_capacity(k);
    let mut rest = unit.clone();
    for _ in 0..k {
        let (q, r) = rest.div_rem(&pb);
        digits.push(r.to_u64().expect("digit fits in u64"));
        rest = q;
    }
    digits
}

/// `base^e mod m` by square-and-multiply; cheaper than `BigUint::modpow`
/// for the small exponents used here.
pub(crate) fn pow_mod(base: &BigUint, mut e: u64, m: &BigUint) -> BigUint {
    let mut result = BigUint::one() % m;
    let mut b = base % m;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &b % m;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b % m;
        }
    }
    result
}

impl fmt::Display for PAdic {
    /// `g;d0,d1,...` for nonzero values, `0` for the exact zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Negligible { abs_precision } => write!(f, "O({}^{})", self.p, abs_precision),
            Repr::Nonzero { gamma, .. } => {
                let digits: Vec<String> = self.digits().iter().map(u64::to_string).collect();
                write!(f, "{};{}", gamma, digits.join(","))
            }
        }
    }
}
