//! Integer primitives: primality, Kronecker symbols, modular square roots and
//! factorization (trial division plus Brent's variant of Pollard rho).

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

const TRIAL_LIMIT: u64 = 100_000;

/// Primes below 100 000, sieved once.
pub fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(TRIAL_LIMIT))
}

fn sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the listed bases decide primality for
/// every 64-bit integer).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'base: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut k = n + 1;
    if k <= 2 {
        return 2;
    }
    if k % 2 == 0 {
        k += 1;
    }
    while !is_prime_u64(k) {
        k += 2;
    }
    k
}

/// Euler's totient by trial division; the arguments here are moduli of
/// machine size, so nothing fancier is warranted.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut phi = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut pk = 1;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            phi *= pk - pk / p;
        }
        p += 1;
    }
    if n > 1 {
        phi *= n - 1;
    }
    phi
}

/// Miller-Rabin with fixed bases; rigorous below 2⁶⁴ and a strong
/// probabilistic test above (the inputs here are never adversarial).
pub fn is_probable_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let n_u = n.magnitude();
    let one = BigUint::one();
    let two = &one + &one;
    if n_u.is_even() {
        return false;
    }
    let n_minus_1 = n_u - &one;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    // 40 fixed small-prime bases keep the test deterministic across runs.
    'base: for &a in small_primes().iter().take(40) {
        let a = BigUint::from(a);
        if &a >= n_u {
            continue;
        }
        let mut x = a.modpow(&d, n_u);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n_u);
            if x == n_minus_1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Kronecker symbol (a|n), total on n ≠ 0 and defined as usual at n = 0
/// (1 iff a = ±1). Completely multiplicative in both arguments.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i32 {
    if n.is_zero() {
        return if a.magnitude().is_one() { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n.clone();
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    let t = n.trailing_zeros().unwrap_or(0);
    n >>= t;
    if t > 0 {
        if a.is_even() {
            return 0;
        }
        if t % 2 == 1 {
            // (a|2) by a mod 8.
            let r = (a.mod_floor(&BigInt::from(8))).to_u8().unwrap();
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol (a|n) for odd positive n.
    let mut a = a.mod_floor(&n);
    while !a.is_zero() {
        let ta = a.trailing_zeros().unwrap_or(0);
        a >>= ta;
        if ta % 2 == 1 {
            let r = (n.mod_floor(&BigInt::from(8))).to_u8().unwrap();
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&BigInt::from(4)).to_u8().unwrap() == 3
            && n.mod_floor(&BigInt::from(4)).to_u8().unwrap() == 3
        {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Convenience wrapper for machine-sized arguments.
pub fn kronecker_i64(a: i64, n: i64) -> i32 {
    kronecker(&BigInt::from(a), &BigInt::from(n))
}

/// Square root of `a` modulo an odd prime `p` by Tonelli-Shanks; returns the
/// smaller of the two roots, or None when `a` is a non-residue.
pub fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    debug_assert!(p > 2 && is_prime_u64(p));
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let r = if p % 4 == 3 {
        powmod(a, (p + 1) / 4, p)
    } else {
        // Full Tonelli-Shanks: write p − 1 = q·2^s with q odd.
        let s = (p - 1).trailing_zeros();
        let q = (p - 1) >> s;
        let mut z = 2;
        while powmod(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = powmod(z, q, p);
        let mut t = powmod(a, q, p);
        let mut r = powmod(a, (q + 1) / 2, p);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mulmod(t2, t2, p);
                i += 1;
            }
            let b = powmod(c, 1 << (m - i - 1), p);
            m = i;
            c = mulmod(b, b, p);
            t = mulmod(t, c, p);
            r = mulmod(r, b, p);
        }
        r
    };
    Some(r.min(p - r))
}

/// Effort and determinism knobs for [`factor_with`].
#[derive(Debug, Clone, Copy)]
pub struct FactorSettings {
    /// Iteration cap per Brent-rho attempt before giving up on a cofactor.
    pub rho_iterations: u64,
    /// Seed for the randomized parts; mathematical output is seed-independent
    /// (a different seed can only change how long factoring takes).
    pub seed: u64,
}

impl Default for FactorSettings {
    fn default() -> Self {
        FactorSettings { rho_iterations: 1 << 22, seed: 0x5eed_cafe }
    }
}

/// Complete factorization of n ≠ 0 (sign discarded) with default effort.
pub fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    factor_with(n, &FactorSettings::default())
}

/// Complete factorization of n ≠ 0, or [`Error::FactorizationIncomplete`]
/// carrying the factors found so far and the stuck cofactor.
pub fn factor_with(n: &BigInt, settings: &FactorSettings) -> Result<Vec<(BigInt, u32)>> {
    assert!(!n.is_zero(), "factor: n must be nonzero");
    let mut m = n.abs();
    let mut found: Vec<BigInt> = Vec::new();
    if m.is_one() {
        return Ok(Vec::new());
    }
    for &p in small_primes() {
        let p_big = BigInt::from(p);
        if (&p_big * &p_big) > m {
            break;
        }
        while m.is_multiple_of(&p_big) {
            m /= &p_big;
            found.push(p_big.clone());
        }
        if m.is_one() {
            break;
        }
    }
    let mut pending = vec![m];
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    while let Some(c) = pending.pop() {
        if c.is_one() {
            continue;
        }
        if is_probable_prime(&c) {
            found.push(c);
            continue;
        }
        // Perfect powers first: rho behaves poorly on p^k.
        if let Some((root, _)) = perfect_power(&c) {
            pending.push(root.clone());
            pending.push(&c / &root);
            continue;
        }
        match brent_rho(&c, settings.rho_iterations, &mut rng) {
            Some(f) => {
                pending.push(&c / &f);
                pending.push(f);
            }
            None => {
                found.sort();
                return Err(Error::FactorizationIncomplete {
                    residual: c,
                    partial: group_factors(found),
                    effort: settings.rho_iterations,
                });
            }
        }
    }
    found.sort();
    Ok(group_factors(found))
}

fn group_factors(sorted: Vec<BigInt>) -> Vec<(BigInt, u32)> {
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for p in sorted {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Detects n = r^k with k ≥ 2 and returns (r, k) for the largest such k.
fn perfect_power(n: &BigInt) -> Option<(BigInt, u32)> {
    let bits = n.bits();
    for k in (2..=bits.max(2)).rev() {
        let root = n.nth_root(k as u32);
        if num_traits::pow::Pow::pow(&root, k as u32) == *n {
            return Some((root, k as u32));
        }
    }
    None
}

/// Brent's cycle-based Pollard rho with batched gcds. Returns a nontrivial
/// factor of composite odd n, or None once the iteration budget is spent.
fn brent_rho(n: &BigInt, max_iters: u64, rng: &mut ChaCha8Rng) -> Option<BigInt> {
    if n.is_even() {
        return Some(BigInt::from(2));
    }
    let mut spent = 0u64;
    while spent < max_iters {
        let c = BigInt::from(rng.gen_range(1u64..1 << 31));
        let mut y = BigInt::from(rng.gen_range(2u64..1 << 31)) % n;
        let step = |x: &BigInt| (x * x + &c) % n;
        let mut g = BigInt::one();
        let mut r = 1u64;
        let mut q = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        'outer: while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                let batch = 128.min(r - k);
                for _ in 0..batch {
                    y = step(&y);
                    q = (&q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += batch;
                spent += batch;
                if spent >= max_iters {
                    break 'outer;
                }
            }
            r *= 2;
        }
        if g == *n {
            // Backtrack one step at a time to recover the factor.
            loop {
                ys = step(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Pow;

    #[test]
    fn kronecker_identity_and_small_cases() {
        for &p in &[3i64, 5, 7, 11, 13, 97, 1031] {
            assert_eq!(kronecker_i64(1, p), 1);
        }
        assert_eq!(kronecker_i64(3, 5), -1); // squares mod 5 are {1, 4}
        assert_eq!(kronecker_i64(2, 7), 1);
        assert_eq!(kronecker_i64(2, 3), -1);
        assert_eq!(kronecker_i64(0, 9), 0);
        assert_eq!(kronecker_i64(-1, 5), 1);
        assert_eq!(kronecker_i64(-1, 7), -1);
    }

    #[test]
    fn kronecker_square_class() {
        // 26·78 = 2028 = 3·26², so (2028|p) = (3|p) away from 2, 13.
        for &p in &[5i64, 7, 11, 17, 19, 23, 29, 31, 37] {
            assert_eq!(kronecker_i64(2028, p), kronecker_i64(3, p));
        }
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for &p in &[3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 97] {
            for a in 0..p {
                let e = powmod(a, (p - 1) / 2, p);
                let want = if e == 0 {
                    0
                } else if e == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker_i64(a as i64, p as i64), want, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let a = rng.gen_range(-500i64..500);
            let b = rng.gen_range(-500i64..500);
            let n = rng.gen_range(-300i64..300);
            if n == 0 {
                continue;
            }
            assert_eq!(
                kronecker_i64(a * b, n),
                kronecker_i64(a, n) * kronecker_i64(b, n),
                "a={a} b={b} n={n}"
            );
            assert_eq!(
                kronecker_i64(a, n * 35),
                kronecker_i64(a, n) * kronecker_i64(a, 35)
            );
        }
    }

    #[test]
    fn sqrt_mod_matches_squares() {
        for &p in &[3u64, 5, 7, 11, 13, 101, 997] {
            for a in 0..p {
                match sqrt_mod_p(a, p) {
                    Some(r) => assert_eq!(mulmod(r, r, p), a),
                    None => assert_eq!(kronecker_i64(a as i64, p as i64), -1),
                }
            }
        }
    }

    #[test]
    fn primality_small_range() {
        let primes = small_primes();
        let mut idx = 0;
        for n in 0..10_000u64 {
            let is_p = idx < primes.len() && primes[idx] == n;
            if is_p {
                idx += 1;
            }
            assert_eq!(is_prime_u64(n), is_p, "n={n}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
        assert_eq!(next_prime(13), 17);
        assert_eq!(next_prime(0), 2);
    }

    #[test]
    fn factor_examples() {
        let f = factor(&BigInt::from(27)).unwrap();
        assert_eq!(f, vec![(BigInt::from(3), 3)]);
        let f = factor(&BigInt::from(46656)).unwrap();
        assert_eq!(f, vec![(BigInt::from(2), 6), (BigInt::from(3), 6)]);
        let f = factor(&BigInt::from(32768)).unwrap();
        assert_eq!(f, vec![(BigInt::from(2), 15)]);
        // 181² + 7·1⁶ = 32768 is the hit this example comes from.
        assert_eq!(BigInt::from(181 * 181 + 7), BigInt::from(2).pow(15u32));
    }

    #[test]
    fn factor_recomposes() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..300 {
            let n = BigInt::from(rng.gen_range(2u64..1_000_000_000_000));
            let f = factor(&n).unwrap();
            let mut prod = BigInt::one();
            for (p, e) in &f {
                assert!(is_probable_prime(p));
                prod *= p.pow(*e);
            }
            assert_eq!(prod, n);
        }
    }

    #[test]
    fn factor_semiprime_and_perfect_power() {
        // (2³¹−1)² slips past trial division and needs the perfect-power path.
        let m = BigInt::from(2_147_483_647u64);
        let n = &m * &m;
        assert_eq!(factor(&n).unwrap(), vec![(m.clone(), 2)]);
        let n = &m * BigInt::from(2_147_483_629u64);
        let f = factor(&n).unwrap();
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn factor_incomplete_reports_partial() {
        // Product of two ~100-bit primes with a hopeless iteration budget.
        let p: BigInt = "1267650600228229401496703205653".parse().unwrap();
        let q: BigInt = "1267650600228229401496703205361".parse().unwrap();
        assert!(is_probable_prime(&p) && is_probable_prime(&q));
        let n = BigInt::from(12) * &p * &q;
        let settings = FactorSettings { rho_iterations: 8, seed: 1 };
        match factor_with(&n, &settings) {
            Err(Error::FactorizationIncomplete { residual, partial, .. }) => {
                assert_eq!(residual, &p * &q);
                assert_eq!(partial, vec![(BigInt::from(2), 2), (BigInt::from(3), 1)]);
            }
            other => panic!("expected FactorizationIncomplete, got {other:?}"),
        }
    }
}
