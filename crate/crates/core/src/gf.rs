//! Arithmetic in GF(p^m).
//!
//! Elements are integers in `[0, q)` whose base-`p` digits are the
//! coefficients of the residue polynomial, constant term least significant.
//! The same encoding is used on the wire.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// A field element, tagged only by its integer encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

struct Tables {
    p: u32,
    m: u32,
    modulus: u32,
    q: u32,
    // exp has length 2(q-1) so that log a + log b never needs a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// A finite field GF(p^m) with a fixed modulus. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.t, &other.t)
            || (self.t.p == other.t.p && self.t.m == other.t.m && self.t.modulus == other.t.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.m == 1 {
            write!(f, "GF({})", self.t.p)
        } else {
            write!(f, "GF({}^{}; poly={})", self.t.p, self.t.m, self.t.modulus)
        }
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn digits(mut v: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for d in out.iter_mut() {
        *d = v % p;
        v /= p;
    }
    out
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Remainder of `a` modulo `b` over GF(p); coefficient vectors, constant first.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.iter().rposition(|&c| c != 0).expect("nonzero divisor");
    let lead_inv = inv_mod_p(b[db], p);
    while let Some(dr) = r.iter().rposition(|&c| c != 0) {
        if dr < db {
            break;
        }
        let f = r[dr] * lead_inv % p;
        for (i, &bi) in b[..=db].iter().enumerate() {
            let s = dr - db + i;
            r[s] = (r[s] + p - f * bi % p) % p;
        }
    }
    r
}

fn is_irreducible(modulus: &[u32], p: u32, m: u32) -> bool {
    // trial division by every monic polynomial of degree 1..=m/2
    for d in 1..=m / 2 {
        let count = p.pow(d);
        for low in 0..count {
            let mut f = digits(low, p, d as usize);
            f.push(1);
            if poly_rem(modulus, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn slow_mul(a: u32, b: u32, p: u32, m: u32, modulus: &[u32]) -> u32 {
    if m == 1 {
        return ((a as u64 * b as u64) % p as u64) as u32;
    }
    let m = m as usize;
    let da = digits(a, p, m);
    let db = digits(b, p, m);
    let mut prod = vec![0u32; 2 * m - 1];
    for i in 0..m {
        for j in 0..m {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    let r = poly_rem(&prod, modulus, p);
    undigits(&r[..m], p)
}

impl Field {
    /// Builds GF(p^m) reduced by `modulus` (ignored when `m == 1`).
    pub fn new(p: u32, m: u32, modulus: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrimeCharacteristic(p));
        }
        if m == 0 {
            return Err(Error::DegreeMismatch(m));
        }
        let q = (p as u64).checked_pow(m).filter(|&q| q <= MAX_ORDER);
        let q = match q {
            Some(q) => q as u32,
            None => return Err(Error::FieldTooLarge((p as u64).saturating_pow(m))),
        };
        let (modulus, mod_digits) = if m == 1 {
            (0, vec![0, 1])
        } else {
            if modulus < q || modulus / q != 1 {
                return Err(Error::DegreeMismatch(m));
            }
            let ds = digits(modulus, p, m as usize + 1);
            if !is_irreducible(&ds, p, m) {
                return Err(Error::ReducibleModulus);
            }
            (modulus, ds)
        };

        // exp/log tables from the first primitive element
        let order = q - 1;
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        'search: for g in 1..q {
            let mut x = 1u32;
            for i in 0..order {
                if i > 0 && x == 1 {
                    continue 'search;
                }
                exp[i as usize] = x;
                x = slow_mul(x, g, p, m, &mod_digits);
            }
            break;
        }
        for i in 0..order as usize {
            exp[i + order as usize] = exp[i];
            log[exp[i] as usize] = i as u32;
        }
        Ok(Field {
            t: Arc::new(Tables {
                p,
                m,
                modulus,
                q,
                exp,
                log,
            }),
        })
    }

    /// GF(q) with the smallest irreducible modulus (integer order).
    pub fn with_order(q: u32) -> Result<Field> {
        let (p, m) = prime_power(q).ok_or(Error::NonPrimeCharacteristic(q))?;
        if m == 1 {
            return Field::new(p, 1, 0);
        }
        for modulus in q..2 * q {
            match Field::new(p, m, modulus) {
                Ok(f) => return Ok(f),
                Err(Error::ReducibleModulus) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::ReducibleModulus)
    }

    pub fn p(&self) -> u32 {
        self.t.p
    }
    pub fn m(&self) -> u32 {
        self.t.m
    }
    /// Normalized modulus encoding; `0` for prime fields.
    pub fn modulus(&self) -> u32 {
        self.t.modulus
    }
    pub fn q(&self) -> u32 {
        self.t.q
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.0 < self.t.q
    }

    /// Validates an integer as an element of this field.
    pub fn elem(&self, v: u32) -> Result<Fe> {
        if v < self.t.q {
            Ok(Fe(v))
        } else {
            Err(Error::Parse {
                line: 0,
                msg: format!("{v} is not an element of {self:?}"),
            })
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let t = &*self.t;
        if t.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if t.m == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= t.p { s - t.p } else { s });
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0, 1);
        while x > 0 || y > 0 {
            out += ((x % t.p + y % t.p) % t.p) * place;
            x /= t.p;
            y /= t.p;
            place *= t.p;
        }
        Fe(out)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        let t = &*self.t;
        if t.p == 2 {
            return a;
        }
        if t.m == 1 {
            return Fe(if a.0 == 0 { 0 } else { t.p - a.0 });
        }
        let (mut x, mut out, mut place) = (a.0, 0, 1);
        while x > 0 {
            out += ((t.p - x % t.p) % t.p) * place;
            x /= t.p;
            place *= t.p;
        }
        Fe(out)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let t = &*self.t;
        Fe(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let t = &*self.t;
        let order = t.q - 1;
        Ok(Fe(t.exp[((order - t.log[a.0 as usize]) % order) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let t = &*self.t;
        let order = (t.q - 1) as u64;
        let l = (t.log[a.0 as usize] as u64 * (e % order)) % order;
        Fe(t.exp[l as usize])
    }

    /// A square root of `a`. Unique in characteristic 2; otherwise the
    /// root with the smaller encoding.
    pub fn sqrt(&self, a: Fe) -> Result<Fe> {
        if self.t.p == 2 {
            return Ok(self.pow(a, (self.t.q / 2) as u64));
        }
        self.elements()
            .find(|&b| self.mul(b, b) == a)
            .ok_or(Error::NoRoot)
    }

    /// All elements in increasing encoding, starting with zero.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.t.q).map(Fe)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.t.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.t.q))
    }
}

/// Splits `q` as `p^m` with `p` prime.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut r, mut m) = (q, 0);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf16() -> Field {
        Field::new(2, 4, 19).unwrap()
    }

    // carry-less multiply then reduce by X^4+X+1, independent of the tables
    fn gf16_oracle_mul(a: u32, b: u32) -> u32 {
        let mut r = 0u32;
        for i in 0..4 {
            if (b >> i) & 1 == 1 {
                r ^= a << i;
            }
        }
        for bit in (4..8).rev() {
            if (r >> bit) & 1 == 1 {
                r ^= 0b10011 << (bit - 4);
            }
        }
        r
    }

    #[test]
    fn construction() {
        let f = gf16();
        assert_eq!((f.p(), f.m(), f.q(), f.modulus()), (2, 4, 16, 19));
        let f7 = Field::new(7, 1, 0).unwrap();
        assert_eq!(f7.q(), 7);
        assert_eq!(Field::new(7, 1, 123).unwrap(), f7);
        assert_eq!(Field::new(2, 2, 6).unwrap_err(), Error::ReducibleModulus);
        assert_eq!(
            Field::new(4, 1, 0).unwrap_err(),
            Error::NonPrimeCharacteristic(4)
        );
        assert_eq!(Field::new(2, 4, 7).unwrap_err(), Error::DegreeMismatch(4));
        assert_eq!(Field::new(2, 4, 40).unwrap_err(), Error::DegreeMismatch(4));
        assert!(matches!(Field::new(2, 17, 0), Err(Error::FieldTooLarge(_))));
    }

    #[test]
    fn reducible_found_by_exhaustive_factor_search() {
        // X^2+X = X(X+1); every degree-2 monic over GF(2) checked by brute force
        for modulus in 4..8u32 {
            let brute = (2..4u32).any(|a| (2..4u32).any(|b| gf_2_poly_mul(a, b) == modulus));
            assert_eq!(
                Field::new(2, 2, modulus).is_err(),
                brute,
                "modulus {modulus}"
            );
        }
    }

    fn gf_2_poly_mul(a: u32, b: u32) -> u32 {
        (0..8)
            .filter(|i| (b >> i) & 1 == 1)
            .fold(0, |r, i| r ^ (a << i))
    }

    #[test]
    fn gf16_table_matches_oracle() {
        let f = gf16();
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(f.mul(Fe(a), Fe(b)).0, gf16_oracle_mul(a, b));
            }
        }
        assert_eq!(f.mul(Fe(2), Fe(9)), Fe(1));
    }

    #[test]
    fn small_values() {
        let f7 = Field::new(7, 1, 0).unwrap();
        assert_eq!(f7.mul(Fe(3), Fe(5)), Fe(1));
        assert_eq!(f7.inv(Fe(3)).unwrap(), Fe(5));
        assert_eq!(f7.inv(Fe(0)), Err(Error::DivisionByZero));
        assert_eq!(f7.sqrt(Fe(2)).unwrap(), Fe(3));
        assert_eq!(f7.sqrt(Fe(3)), Err(Error::NoRoot));
        let f = gf16();
        assert_eq!(f.inv(Fe(2)).unwrap(), Fe(9));
        assert_eq!(f.inv(Fe(1)).unwrap(), Fe(1));
        assert_eq!(f.sqrt(Fe(1)).unwrap(), Fe(1));
    }

    #[test]
    fn inverse_matches_exhaustive_search() {
        for f in [
            gf16(),
            Field::new(3, 2, 10).unwrap(),
            Field::new(5, 1, 0).unwrap(),
        ] {
            for a in f.elements().skip(1) {
                let brute = f.elements().find(|&b| f.mul(a, b) == Fe::ONE).unwrap();
                assert_eq!(f.inv(a).unwrap(), brute);
            }
        }
    }

    #[test]
    fn square_roots() {
        let f = gf16();
        for a in f.elements() {
            assert_eq!(f.sqrt(a).unwrap(), f.pow(a, 8));
            assert_eq!(f.mul(f.sqrt(a).unwrap(), f.sqrt(a).unwrap()), a);
        }
        let f7 = Field::new(7, 1, 0).unwrap();
        let squares: Vec<u32> = f7
            .elements()
            .filter(|&a| f7.sqrt(a).is_ok())
            .map(|a| a.0)
            .collect();
        assert_eq!(squares, vec![0, 1, 2, 4]);
    }

    #[test]
    fn enumeration() {
        let f2 = Field::new(2, 1, 0).unwrap();
        assert_eq!(f2.elements().collect::<Vec<_>>(), vec![Fe(0), Fe(1)]);
        let f7 = Field::new(7, 1, 0).unwrap();
        assert_eq!(
            f7.elements().map(|a| a.0).collect::<Vec<_>>(),
            (0..7).collect::<Vec<_>>()
        );
        let all: Vec<Fe> = gf16().elements().collect();
        assert_eq!((all.len(), all[0], all[15]), (16, Fe(0), Fe(15)));
    }

    #[test]
    fn with_order_picks_smallest_modulus() {
        assert_eq!(Field::with_order(16).unwrap().modulus(), 19);
        assert_eq!(Field::with_order(32).unwrap().modulus(), 37);
        assert_eq!(Field::with_order(7).unwrap().q(), 7);
        assert!(Field::with_order(12).is_err());
    }

    fn fields() -> Vec<Field> {
        vec![
            gf16(),
            Field::new(2, 5, 37).unwrap(),
            Field::new(7, 1, 0).unwrap(),
            Field::new(3, 3, 27 + 2 * 3 + 1).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn field_axioms(fi in 0usize..4, a in 0u32.., b in 0u32.., c in 0u32..) {
            let f = &fields()[fi];
            let (a, b, c) = (Fe(a % f.q()), Fe(b % f.q()), Fe(c % f.q()));
            prop_assert_eq!(f.add(a, b), f.add(b, a));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
            prop_assert_eq!(f.mul(a, Fe::ZERO), Fe::ZERO);
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
            }
            let sq = f.mul(a, a);
            let r = f.sqrt(sq).unwrap();
            prop_assert_eq!(f.mul(r, r), sq);
        }

        #[test]
        fn frobenius_char2(a in 0u32..32, b in 0u32..32) {
            let f = Field::new(2, 5, 37).unwrap();
            let (a, b) = (Fe(a), Fe(b));
            let s = f.add(a, b);
            prop_assert_eq!(f.mul(s, s), f.add(f.mul(a, a), f.mul(b, b)));
        }
    }
}
