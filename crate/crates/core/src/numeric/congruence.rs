//! Elementary number theory: Euler's totient and linear congruences.

/// Extended Euclid: returns `(g, x, y)` with `a·x + b·y = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    ext_gcd(a, b).0
}

/// Number of `k` in `1..=m` coprime to `m` (so `φ(1) = 1`).
pub fn euler_totient(m: u64) -> u64 {
    assert!(m >= 1, "totient of zero");
    let mut n = m;
    let mut result = m;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Minimal `n ≥ 1` with `a·n ≡ c (mod m)`, or `None` when `gcd(a, m) ∤ c`.
pub fn min_congruence_solution(a: i64, c: i64, m: u64) -> Option<u64> {
    assert!(m >= 1, "modulus must be positive");
    let m = m as i64;
    let a = a.rem_euclid(m);
    let c = c.rem_euclid(m);
    // g ≥ 1 because m ≥ 1
    let (g, x, _) = ext_gcd(a, m);
    if c % g != 0 {
        return None;
    }
    let step = m / g;
    let base = ((x as i128 * (c / g) as i128).rem_euclid(step as i128)) as i64;
    Some(if base == 0 { step as u64 } else { base as u64 })
}

fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc = 1u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Euler-theorem form of the solution for coprime `(a, m)`: the minimal positive
/// representative of `c·a^(φ(m)−1) mod m`. `None` when `gcd(a, m) ≠ 1`.
pub fn congruence_solution_by_totient(a: i64, c: i64, m: u64) -> Option<u64> {
    assert!(m >= 1, "modulus must be positive");
    let mi = m as i64;
    let a = a.rem_euclid(mi) as u64;
    if gcd(a as i64, mi) != 1 {
        return None;
    }
    let inv = mod_pow(a, euler_totient(m) - 1, m);
    let c = c.rem_euclid(mi) as u128;
    let v = (c * inv as u128 % m as u128) as u64;
    Some(if v == 0 { m } else { v })
}
