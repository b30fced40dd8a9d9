//! Integer factorization by trial division with primality and
//! perfect-power checks on the cofactor.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

/// Sieve of Eratosthenes up to `n` inclusive.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin with the first 13 prime bases; deterministic below 3.3e24.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for &p in &MR_BASES {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'base: for &a in &MR_BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// True when the Miller-Rabin answer above is a proof.
pub fn primality_is_proven(n: &BigInt) -> bool {
    n.bits() <= 81 && n < &"3317044064679887385961981".parse::<BigInt>().unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CofactorStatus {
    /// Fully factored.
    One,
    /// Cofactor is prime (proven when below the deterministic range).
    Prime,
    /// Cofactor `c` has no prime factor below the bound and `c < bound^3`,
    /// so it is a prime or a product of two distinct primes, or a square.
    /// `squarefree_certified` tells which.
    Composite,
}

#[derive(Debug, Clone, Serialize)]
pub struct Factorization {
    pub sign: i8,
    /// `(prime, exponent)` in increasing order, cofactor excluded.
    pub primes: Vec<(BigInt, u32)>,
    /// Unfactored part, coprime to all listed primes.
    pub cofactor: BigInt,
    pub cofactor_status: CofactorStatus,
    /// Cofactor proven squarefree.
    pub squarefree_certified: bool,
    pub bound: u64,
}

impl Factorization {
    /// Product of `p^(e div 2)` over found primes.
    pub fn square_part_root(&self) -> BigInt {
        let mut r = BigInt::one();
        for (p, e) in &self.primes {
            r *= p.pow(e / 2);
        }
        r
    }

    /// Primes `p` with `p^2 | n`, including a cofactor that is a prime square.
    pub fn square_divisor_primes(&self) -> Vec<BigInt> {
        let mut v: Vec<BigInt> =
            self.primes.iter().filter(|(_, e)| *e >= 2).map(|(p, _)| p.clone()).collect();
        if let Some(r) = self.cofactor_prime_square_root() {
            v.push(r);
        }
        v
    }

    fn cofactor_prime_square_root(&self) -> Option<BigInt> {
        if self.cofactor <= BigInt::one() {
            return None;
        }
        let r = self.cofactor.sqrt();
        (&r * &r == self.cofactor && is_probable_prime(&r)).then_some(r)
    }

    /// Exactly recomputes the factored integer.
    pub fn value(&self) -> BigInt {
        let mut v = self.cofactor.clone();
        for (p, e) in &self.primes {
            v *= p.pow(*e);
        }
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    /// `2^5 · 7 · c` style rendering.
    pub fn display(&self) -> String {
        let mut parts: Vec<String> = self
            .primes
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        if !self.cofactor.is_one() {
            parts.push(self.cofactor.to_string());
        }
        let body = if parts.is_empty() { "1".to_string() } else { parts.join(" * ") };
        if self.sign < 0 {
            format!("-{body}")
        } else {
            body
        }
    }
}

/// Trial division by primes up to `bound`, then classify the cofactor.
pub fn trial_factor(n: &BigInt, bound: u64) -> Factorization {
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut primes = Vec::new();
    if m.is_zero() {
        return Factorization {
            sign: 0,
            primes,
            cofactor: m,
            cofactor_status: CofactorStatus::Composite,
            squarefree_certified: false,
            bound,
        };
    }
    for &p in small_primes(bound).iter() {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            primes.push((pb, e));
        }
    }
    // Leftover m is 1, a prime (if p^2 > m stopped us), or has no factor <= bound.
    if m > BigInt::one() && m.to_u64().is_some_and(|v| v <= bound.saturating_mul(bound)) {
        let p = m.clone();
        let idx = primes.partition_point(|(q, _)| q < &p);
        primes.insert(idx, (p, 1));
        m = BigInt::one();
    }
    let (status, sqf) = if m.is_one() {
        (CofactorStatus::One, true)
    } else if is_probable_prime(&m) {
        (CofactorStatus::Prime, true)
    } else {
        let b = BigInt::from(bound);
        let cube = &b * &b * &b;
        let r = m.sqrt();
        let square = &r * &r == m;
        (CofactorStatus::Composite, m < cube && !square)
    };
    Factorization { sign, primes, cofactor: m, cofactor_status: status, squarefree_certified: sqf, bound }
}

fn small_primes(bound: u64) -> std::sync::Arc<Vec<u64>> {
    use std::sync::{Arc, Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<(u64, Arc<Vec<u64>>)>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| Mutex::new((0, Arc::new(Vec::new()))));
    let mut g = cell.lock().unwrap();
    if g.0 < bound {
        *g = (bound, Arc::new(primes_up_to(bound)));
        return g.1.clone();
    }
    if g.0 == bound {
        return g.1.clone();
    }
    let v: Vec<u64> = g.1.iter().copied().take_while(|&p| p <= bound).collect();
    Arc::new(v)
}

/// `(r, k)` with `n = r^k` and `k` maximal, for `n >= 2`.
pub fn perfect_power(n: &BigInt) -> (BigInt, u32) {
    let mut best = (n.clone(), 1u32);
    if n < &BigInt::from(4) {
        return best;
    }
    let maxk = n.bits() as u32;
    for k in 2..=maxk {
        let r = n.nth_root(k);
        if r < BigInt::from(2) {
            break;
        }
        if r.pow(k) == *n {
            best = (r, k);
        }
    }
    best
}

/// Distinct prime divisors of a small integer.
pub fn prime_divisors_u64(mut n: u64) -> Vec<u64> {
    let mut v = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            v.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        v.push(n);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(s: &str) -> BigInt {
        s.parse().unwrap()
    }

    #[test]
    fn small_factorizations() {
        let f = trial_factor(&bi("-108000032"), DEFAULT_TRIAL_BOUND);
        assert_eq!(f.display(), "-2^5 * 7 * 31 * 103 * 151");
        assert_eq!(f.value(), bi("-108000032"));
        let f = trial_factor(&bi("2075"), DEFAULT_TRIAL_BOUND);
        assert_eq!(f.display(), "5^2 * 83");
        assert_eq!(f.square_divisor_primes(), vec![bi("5")]);
        let f = trial_factor(&BigInt::one(), DEFAULT_TRIAL_BOUND);
        assert!(f.primes.is_empty() && f.cofactor.is_one());
    }

    #[test]
    fn large_prime_cofactor() {
        let big = bi("1649120827309715616889");
        let n = bi("4") * bi("25") * bi("7") * bi("967") * &big;
        let f = trial_factor(&n, DEFAULT_TRIAL_BOUND);
        assert_eq!(f.cofactor, big);
        assert_eq!(f.cofactor_status, CofactorStatus::Prime);
        assert!(f.squarefree_certified);
        assert_eq!(f.display(), "2^2 * 5^2 * 7 * 967 * 1649120827309715616889");
    }

    #[test]
    fn square_cofactor_is_flagged() {
        let p = bi("1000003");
        let n = &p * &p * 3;
        let f = trial_factor(&n, 1000);
        assert!(!f.squarefree_certified);
        assert_eq!(f.square_divisor_primes(), vec![p]);
    }

    #[test]
    fn miller_rabin() {
        let primes = primes_up_to(2000);
        for n in 0..2000u64 {
            assert_eq!(is_probable_prime(&BigInt::from(n)), primes.binary_search(&n).is_ok(), "{n}");
        }
        assert!(!is_probable_prime(&bi("3215031751")));
        assert!(is_probable_prime(&bi("2305843009213693951")));
    }

    #[test]
    fn powers() {
        assert_eq!(perfect_power(&bi("1024")), (bi("2"), 10));
        assert_eq!(perfect_power(&bi("1000")), (bi("10"), 3));
        assert_eq!(perfect_power(&bi("12")), (bi("12"), 1));
    }
}
