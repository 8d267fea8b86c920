//! Arithmetic over small prime fields GF(p), enough to enumerate the hash
//! family of non-constant low-degree polynomials.

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn next_prime(q: u64) -> u64 {
    let mut p = q.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Evaluate a_0 + a_1 x + ... + a_{k-1} x^{k-1} over GF(q) by Horner.
pub fn poly_eval(coeffs: &[u64], x: u64, q: u64) -> u64 {
    let mut acc: u64 = 0;
    for &c in coeffs.iter().rev() {
        acc = (acc as u128 * x as u128 % q as u128) as u64;
        acc = (acc + c) % q;
    }
    acc
}
