//! Exact bound arithmetic and the classification of `k`.

use num_bigint::BigInt;
use serde::Serialize;

/// Shape of `k` as far as the lower bounds care.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Factorization {
    /// `k = p^alpha`, `alpha ≥ 1`.
    PrimePower {
        p: u64,
        alpha: u32,
    },
    /// `k = p·q` with `p < q` distinct primes.
    Semiprime {
        p: u64,
        q: u64,
    },
    Other,
}

impl Factorization {
    /// Trial division; fine for the `k ≤ 10⁶` this crate is used with.
    pub fn of(k: u64) -> Self {
        if k < 2 {
            return Factorization::Other;
        }
        let mut primes: Vec<(u64, u32)> = Vec::new();
        let mut rest = k;
        let mut p = 2;
        while p * p <= rest {
            if rest % p == 0 {
                let mut e = 0;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                primes.push((p, e));
            }
            p += 1;
        }
        if rest > 1 {
            primes.push((rest, 1));
        }
        match primes.as_slice() {
            [(p, alpha)] => Factorization::PrimePower {
                p: *p,
                alpha: *alpha,
            },
            [(p, 1), (q, 1)] => Factorization::Semiprime { p: *p, q: *q },
            _ => Factorization::Other,
        }
    }

    /// Primes that may play the role of `p`: one for prime powers, both for semiprimes.
    pub fn named_primes(&self) -> Vec<u64> {
        match *self {
            Factorization::PrimePower { p, .. } => vec![p],
            Factorization::Semiprime { p, q } => vec![p, q],
            Factorization::Other => vec![],
        }
    }

    pub fn is_odd_prime_power(&self) -> bool {
        matches!(*self, Factorization::PrimePower { p, .. } if p != 2)
    }

    pub fn is_odd_semiprime(&self) -> bool {
        matches!(*self, Factorization::Semiprime { p, .. } if p != 2)
    }

    /// Odd prime power or product of two distinct odd primes.
    pub fn in_scope(&self) -> bool {
        self.is_odd_prime_power() || self.is_odd_semiprime()
    }
}

/// `(k + 2)·size − k² − k + 2`.
pub fn theorem_bound(k: u64, size: u64) -> BigInt {
    let k = BigInt::from(k);
    (&k + 2u32) * BigInt::from(size) - &k * &k - &k + 2u32
}

/// `8·k^k`, the size above which the theorem bound is proven.
pub fn size_threshold(k: u64) -> BigInt {
    BigInt::from(8u32) * BigInt::from(k).pow(k as u32)
}

/// `8·k^(k−1)`, the matching threshold for the largest class.
pub fn class_threshold(k: u64) -> BigInt {
    BigInt::from(8u32) * BigInt::from(k).pow(k as u32 - 1)
}

/// `(k + 2)·size − 4·k^(k−1)`.
pub fn unconditional_bound(k: u64, size: u64) -> BigInt {
    (BigInt::from(k) + 2u32) * BigInt::from(size)
        - BigInt::from(4u32) * BigInt::from(k).pow(k as u32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(
            Factorization::of(9),
            Factorization::PrimePower { p: 3, alpha: 2 }
        );
        assert_eq!(
            Factorization::of(7),
            Factorization::PrimePower { p: 7, alpha: 1 }
        );
        assert_eq!(
            Factorization::of(15),
            Factorization::Semiprime { p: 3, q: 5 }
        );
        assert_eq!(Factorization::of(45), Factorization::Other);
        assert_eq!(Factorization::of(1), Factorization::Other);
        assert_eq!(
            Factorization::of(999_983),
            Factorization::PrimePower {
                p: 999_983,
                alpha: 1
            }
        );
        assert!(!Factorization::of(8).in_scope());
        assert!(!Factorization::of(6).in_scope());
        assert!(Factorization::of(21).in_scope());
        assert_eq!(Factorization::of(15).named_primes(), vec![3, 5]);
    }

    #[test]
    fn theorem_bound_values() {
        assert_eq!(theorem_bound(9, 100), BigInt::from(1012));
        assert_eq!(theorem_bound(3, 217), BigInt::from(1075));
        assert_eq!(theorem_bound(15, 2), BigInt::from(-204));
    }

    #[test]
    fn thresholds_are_exact() {
        assert_eq!(size_threshold(3), BigInt::from(216));
        assert_eq!(size_threshold(5), BigInt::from(25_000));
        assert_eq!(unconditional_bound(9, 0), BigInt::from(-172_186_884));
        assert_eq!(size_threshold(15).to_string(), "3503151123046875000");
        assert!(size_threshold(16) > BigInt::from(u64::MAX));
        assert!(size_threshold(25) > BigInt::from(u64::MAX));
        assert_eq!(
            size_threshold(25),
            BigInt::from(8) * BigInt::from(25u64).pow(25)
        );
    }
}
