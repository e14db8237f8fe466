//! Arithmetic in Z/pZ and Z/p²Z, binomial coefficients modulo p and
//! Fermat exponent reduction.
//!
//! Residues are plain `u64` values kept canonical in `[0, m)`. Products are
//! widened to `u128`, so any modulus below 2^64 is safe.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Canonical representative of a residue class, always in `[0, m)`.
pub type Residue = u64;

/// A validated prime modulus `p >= 5` with factorial tables.
///
/// Cloning is cheap: the tables live behind an `Arc`.
#[derive(Clone)]
pub struct Prime {
    inner: Arc<Tables>,
}

struct Tables {
    p: u64,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl fmt::Debug for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prime({})", self.inner.p)
    }
}

impl PartialEq for Prime {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p
    }
}

impl Eq for Prime {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Validates `p` and builds the factorial tables.
pub fn make_prime(p: i64) -> Result<Prime> {
    if p < 5 {
        return Err(Error::TooSmall(p));
    }
    let p = p as u64;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = p as usize;
    let mut fact = vec![1u64; n];
    for i in 1..n {
        fact[i] = mul_mod(fact[i - 1], i as u64, p);
    }
    let mut inv_fact = vec![1u64; n];
    inv_fact[n - 1] = mod_pow(fact[n - 1], p - 2, p);
    for i in (1..n).rev() {
        inv_fact[i - 1] = mul_mod(inv_fact[i], i as u64, p);
    }
    Ok(Prime {
        inner: Arc::new(Tables { p, fact, inv_fact }),
    })
}

impl TryFrom<i64> for Prime {
    type Error = Error;

    fn try_from(p: i64) -> Result<Self> {
        make_prime(p)
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod modulus`, with `0^0 = 1`.
pub fn mod_pow(base: Residue, mut exp: u64, modulus: u64) -> Residue {
    debug_assert!(modulus >= 2);
    let mut result = 1 % modulus;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, modulus);
        }
        b = mul_mod(b, b, modulus);
        exp >>= 1;
    }
    result
}

/// Inverse of `a` modulo `modulus` by the extended Euclidean algorithm.
///
/// Works for prime powers, where exponentiation by `p - 2` does not.
pub fn mod_inverse(a: Residue, modulus: u64) -> Result<Residue> {
    let m = modulus as i128;
    let (mut old_r, mut r) = ((a % modulus) as i128, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible { value: a, modulus });
    }
    Ok(old_s.rem_euclid(m) as u64)
}

/// Normalizes a signed integer into `[0, modulus)`.
#[inline]
pub fn reduce_signed(x: i64, modulus: u64) -> Residue {
    (x as i128).rem_euclid(modulus as i128) as u64
}

impl Prime {
    #[inline]
    pub fn p(&self) -> u64 {
        self.inner.p
    }

    /// `p - 1` as a signed integer, the period of exponents for nonzero bases.
    #[inline]
    pub fn order(&self) -> i64 {
        self.inner.p as i64 - 1
    }

    #[inline]
    pub fn p_squared(&self) -> u64 {
        self.inner.p * self.inner.p
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> Residue {
        reduce_signed(x, self.inner.p)
    }

    #[inline]
    pub fn add(&self, a: Residue, b: Residue) -> Residue {
        let s = a + b;
        if s >= self.inner.p {
            s - self.inner.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Residue, b: Residue) -> Residue {
        if a >= b {
            a - b
        } else {
            a + self.inner.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: Residue) -> Residue {
        if a == 0 {
            0
        } else {
            self.inner.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Residue, b: Residue) -> Residue {
        a * b % self.inner.p
    }

    #[inline]
    pub fn pow(&self, base: Residue, exp: u64) -> Residue {
        mod_pow(base, exp, self.inner.p)
    }

    /// `base^exp` for a signed exponent, reducing the exponent modulo `p - 1`.
    ///
    /// Only meaningful for nonzero bases; a zero base with a negative
    /// exponent is a caller bug and panics in debug builds.
    pub fn pow_signed(&self, base: Residue, exp: i64) -> Residue {
        if exp >= 0 {
            return self.pow(base, exp as u64);
        }
        debug_assert!(!base.is_multiple_of(self.inner.p), "negative power of zero");
        self.pow(base, exp.rem_euclid(self.order()) as u64)
    }

    /// `(-1)^e` as a residue.
    #[inline]
    pub fn sign(&self, e: i64) -> Residue {
        if e.rem_euclid(2) == 0 {
            1
        } else {
            self.inner.p - 1
        }
    }

    pub fn inv(&self, a: Residue) -> Result<Residue> {
        mod_inverse(a, self.inner.p)
    }

    /// `n!` for `0 <= n < p`.
    #[inline]
    pub fn fact(&self, n: usize) -> Residue {
        self.inner.fact[n]
    }

    #[inline]
    pub fn inv_fact(&self, n: usize) -> Residue {
        self.inner.inv_fact[n]
    }

    /// `C(n, k) mod p` for `0 <= n < p`; zero when `k < 0` or `k > n`.
    pub fn binom(&self, n: i64, k: i64) -> Result<Residue> {
        if n < 0 || n as u64 >= self.inner.p {
            return Err(Error::TopOutOfRange { n, p: self.inner.p });
        }
        Ok(self.binom_unchecked(n, k))
    }

    /// Like [`Prime::binom`] but treats any `n` outside `[0, p)` as a bug.
    ///
    /// Every closed form in this crate keeps binomial tops inside `[0, p)`,
    /// so they use this variant.
    #[inline]
    pub(crate) fn binom_unchecked(&self, n: i64, k: i64) -> Residue {
        debug_assert!(
            n >= 0 && (n as u64) < self.inner.p,
            "binomial top {n} out of range"
        );
        if k < 0 || k > n {
            return 0;
        }
        let t = &self.inner;
        let (n, k) = (n as usize, k as usize);
        self.mul(t.fact[n], self.mul(t.inv_fact[k], t.inv_fact[n - k]))
    }

    /// Exponent `e'` in `{1, ..., p-1}` with `e' ≡ exp (mod p-1)`.
    ///
    /// Valid for nonzero bases only: multiples of `p - 1` map to `p - 1`,
    /// never to 0.
    pub fn fermat_reduce(&self, exp: i64) -> i64 {
        let r = exp.rem_euclid(self.order());
        if r == 0 {
            self.order()
        } else {
            r
        }
    }
}

/// `C(n, k) mod p` as a free function; see [`Prime::binom`].
pub fn binom(pr: &Prime, n: i64, k: i64) -> Result<Residue> {
    pr.binom(n, k)
}

/// See [`Prime::fermat_reduce`].
pub fn fermat_reduce(pr: &Prime, exp: i64) -> i64 {
    pr.fermat_reduce(exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: i64) -> Prime {
        make_prime(n).unwrap()
    }

    #[test]
    fn prime_validation() {
        assert_eq!(p(11).p(), 11);
        assert!(matches!(make_prime(9), Err(Error::NotPrime(9))));
        assert!(matches!(make_prime(3), Err(Error::TooSmall(3))));
        assert!(matches!(make_prime(2), Err(Error::TooSmall(2))));
        assert!(matches!(make_prime(-7), Err(Error::TooSmall(-7))));
        assert!(matches!(make_prime(25), Err(Error::NotPrime(25))));
        assert!(make_prime(9973).is_ok());
    }

    #[test]
    fn factorial_tables() {
        for q in [5, 7, 11, 13, 97] {
            let pr = p(q);
            assert_eq!(pr.fact(0), 1);
            for i in 1..q as usize {
                assert_eq!(pr.fact(i), pr.mul(i as u64, pr.fact(i - 1)));
            }
            for i in 0..q as usize {
                assert_eq!(pr.mul(pr.fact(i), pr.inv_fact(i)), 1);
            }
            // Wilson
            assert_eq!(pr.fact(q as usize - 1), q as u64 - 1);
        }
    }

    #[test]
    fn pow_examples() {
        assert_eq!(mod_pow(2, 10, 11), 1);
        assert_eq!(mod_pow(0, 0, 7), 1);
        assert_eq!(mod_pow(2, 5, 11), 10);
        assert_eq!(mod_pow(0, 3, 7), 0);
        assert_eq!(mod_pow(5, 0, 2), 1);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(4, 25).unwrap(), 19);
        assert!(matches!(
            mod_inverse(5, 25),
            Err(Error::NotInvertible {
                value: 5,
                modulus: 25
            })
        ));
        assert!(mod_inverse(0, 7).is_err());
    }

    #[test]
    fn binom_examples() {
        let pr = p(11);
        assert_eq!(binom(&pr, 7, 3).unwrap(), 2);
        assert_eq!(binom(&pr, 7, -1).unwrap(), 0);
        assert_eq!(binom(&pr, 3, 5).unwrap(), 0);
        assert!(matches!(
            binom(&pr, 11, 2),
            Err(Error::TopOutOfRange { n: 11, p: 11 })
        ));
        assert!(binom(&pr, -1, 0).is_err());
    }

    #[test]
    fn fermat_reduce_examples() {
        let pr = p(11);
        assert_eq!(fermat_reduce(&pr, 19), 9);
        assert_eq!(fermat_reduce(&pr, 10), 10);
        assert_eq!(fermat_reduce(&pr, 3), 3);
        assert_eq!(fermat_reduce(&pr, 20), 10);
        assert_eq!(fermat_reduce(&pr, -1), 9);
    }

    #[test]
    fn fermat_little_theorem() {
        for q in [5i64, 7, 11, 13, 17, 19, 23, 29, 31] {
            let pr = p(q);
            for a in 1..q as u64 {
                assert_eq!(pr.pow(a, q as u64 - 1), 1);
            }
        }
    }

    #[test]
    fn cancellation_and_pascal_exhaustive() {
        for q in [5i64, 7, 11, 13] {
            let pr = p(q);
            for n in 0..q {
                for k in 0..=n {
                    for s in 0..=k {
                        let lhs = pr.mul(pr.binom_unchecked(n, k), pr.binom_unchecked(k, s));
                        let rhs =
                            pr.mul(pr.binom_unchecked(n, s), pr.binom_unchecked(n - s, k - s));
                        assert_eq!(lhs, rhs, "p={q} n={n} k={k} s={s}");
                    }
                }
                if n >= 1 {
                    for k in 0..=n {
                        assert_eq!(
                            pr.binom_unchecked(n, k),
                            pr.add(
                                pr.binom_unchecked(n - 1, k - 1),
                                pr.binom_unchecked(n - 1, k)
                            )
                        );
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_matches_fermat(idx in 0usize..8, a in 1u64..10_000) {
            let q = [5u64, 7, 11, 13, 101, 997, 7919, 9973][idx];
            let a = a % q;
            prop_assume!(a != 0);
            prop_assert_eq!(mod_inverse(a, q).unwrap(), mod_pow(a, q - 2, q));
        }

        #[test]
        fn inverse_mod_p_squared(idx in 0usize..6, a in 1u64..1_000_000) {
            let q = [5u64, 7, 11, 13, 97, 9973][idx];
            let m = q * q;
            let a = a % m;
            prop_assume!(!a.is_multiple_of(q));
            let inv = mod_inverse(a, m).unwrap();
            prop_assert_eq!(mul_mod(a, inv, m), 1);
        }

        #[test]
        fn reduce_signed_canonical(x in any::<i64>(), m in 2u64..1_000_000) {
            let r = reduce_signed(x, m);
            prop_assert!(r < m);
            prop_assert_eq!((x as i128 - r as i128).rem_euclid(m as i128), 0);
        }
    }
}
