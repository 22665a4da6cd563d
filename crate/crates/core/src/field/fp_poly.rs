//! Dense polynomials over a prime field, used only while building a
//! [`FieldContext`](super::FieldContext). Coefficients are stored
//! low-degree-first with no trailing zeros.

pub(crate) type Poly = Vec<u32>;

pub(crate) fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime and small; Fermat
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

pub(crate) fn sub(a: &[u32], b: &[u32], p: u32) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn rem(a: &[u32], m: &[u32], p: u32) -> Poly {
    let mut r: Poly = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let factor = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &c) in m.iter().enumerate() {
            let idx = shift + i;
            r[idx] = ((r[idx] as u64 + (p - factor) as u64 * c as u64) % p as u64) as u32;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] += x as u64 * y as u64;
        }
    }
    let prod: Poly = prod.into_iter().map(|c| (c % p as u64) as u32).collect();
    rem(&prod, m, p)
}

pub(crate) fn pow_mod(base: &[u32], mut e: u128, m: &[u32], p: u32) -> Poly {
    let mut result: Poly = vec![1];
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(&result, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    result
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// x^(p^k) mod m, by k successive p-th powers.
fn frobenius_power_of_x(k: u32, m: &[u32], p: u32) -> Poly {
    let mut cur: Poly = rem(&[0, 1], m, p);
    for _ in 0..k {
        cur = pow_mod(&cur, p as u128, m, p);
    }
    cur
}

/// Rabin's test: `m` (monic, degree `d`) is irreducible over F_p iff
/// x^(p^d) = x mod m and gcd(x^(p^(d/l)) - x, m) = 1 for each prime l | d.
pub(crate) fn is_irreducible(m: &[u32], p: u32) -> bool {
    let d = (m.len() - 1) as u32;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    let full = frobenius_power_of_x(d, m, p);
    if sub(&full, &rem(&x, m, p), p) != Vec::<u32>::new() {
        return false;
    }
    for l in prime_factors(d as u64) {
        let part = frobenius_power_of_x(d / l as u32, m, p);
        let diff = sub(&part, &x, p);
        let g = gcd(m, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
