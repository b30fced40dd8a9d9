//! Dense polynomials over F_p (ascending `u64` coefficients, trimmed).

use crate::linalg::{mod_inv, mulmod};

pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn deg(a: &[u64]) -> usize {
    a.len().saturating_sub(1)
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = mod_inv(b[db], p);
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1;
        let q = mulmod(r[k], inv, p);
        if q != 0 {
            for i in 0..=db {
                let v = mulmod(q, b[i], p);
                r[k - db + i] = (r[k - db + i] + p - v) % p;
            }
        }
        r.pop();
        r = trim(r);
    }
    trim(r)
}

pub fn div(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() <= db {
        return vec![];
    }
    let inv = mod_inv(b[db], p);
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let k = r.len() - 1;
        let c = mulmod(r[k], inv, p);
        q[k - db] = c;
        for i in 0..=db {
            let v = mulmod(c, b[i], p);
            r[k - db + i] = (r[k - db + i] + p - v) % p;
        }
        r.pop();
    }
    trim(q)
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(r)
}

pub fn mulmod_poly(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    rem(&mul(a, b, p), m, p)
}

pub fn powmod_poly(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut r = vec![1u64];
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_poly(&r, &b, m, p);
        }
        b = mulmod_poly(&b, &b, m, p);
        e >>= 1;
    }
    r
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let r = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(r)
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let inv = mod_inv(l, p);
        a.iter_mut().for_each(|x| *x = mulmod(*x, inv, p));
    }
    a
}

/// Degrees of the irreducible factors of a squarefree `f` (distinct-degree factorization).
pub fn factor_degrees(f: &[u64], p: u64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut g = f.to_vec();
    let x = vec![0, 1];
    let mut h = x.clone();
    let mut d = 0;
    while deg(&g) > 0 {
        d += 1;
        if 2 * d > deg(&g) {
            out.push(deg(&g));
            break;
        }
        h = powmod_poly(&h, p, &g, p);
        let c = gcd(&g, &sub(&h, &x, p), p);
        let k = deg(&c);
        if k > 0 {
            out.extend(std::iter::repeat_n(d, k / d));
            g = div(&g, &c, p);
            h = rem(&h, &g, p);
        }
    }
    out
}

/// Distinct roots in F_p of `f` (any `f` with nonzero leading coefficient), ascending.
pub fn roots(f: &[u64], p: u64) -> Vec<u64> {
    let f = trim(f.to_vec());
    if deg(&f) == 0 {
        return vec![];
    }
    if p < 64 {
        return (0..p).filter(|&x| eval(&f, x, p) == 0).collect();
    }
    let xp = powmod_poly(&[0, 1], p, &f, p);
    let h = gcd(&f, &sub(&xp, &[0, 1], p), p);
    let mut out = Vec::new();
    split_linear(&h, p, 1, &mut out);
    out.sort_unstable();
    out
}

fn split_linear(h: &[u64], p: u64, mut a: u64, out: &mut Vec<u64>) {
    match deg(h) {
        0 => {}
        1 => out.push((p - mulmod(h[0], mod_inv(h[1], p), p)) % p),
        _ => loop {
            // gcd(h, (x + a)^((p-1)/2) - 1) splits h for about half of all a.
            let t = powmod_poly(&[a % p, 1], (p - 1) / 2, h, p);
            let g = gcd(h, &sub(&t, &[1], p), p);
            a += 1;
            if deg(&g) > 0 && deg(&g) < deg(h) {
                let q = div(h, &g, p);
                split_linear(&g, p, a, out);
                split_linear(&q, p, a, out);
                return;
            }
        },
    }
}

pub fn eval(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| (mulmod(acc, x, p) + c) % p)
}
