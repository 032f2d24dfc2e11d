//! Dense univariate polynomials, coefficients constant-first.

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};

pub fn trim(p: &mut Vec<Fe>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[Fe]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn eval(f: &Field, p: &[Fe], x: Fe) -> Fe {
    p.iter()
        .rev()
        .fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Quotient and remainder of `a / b`.
pub fn divmod(f: &Field, a: &[Fe], b: &[Fe]) -> Result<(Vec<Fe>, Vec<Fe>)> {
    let db = degree(b).ok_or(Error::DivisionByZero)?;
    let lead_inv = f.inv(b[db])?;
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return Ok((Vec::new(), r));
    }
    let mut quot = vec![Fe::ZERO; r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        quot[dr - db] = c;
        for (i, &bc) in b[..=db].iter().enumerate() {
            let idx = dr - db + i;
            r[idx] = f.sub(r[idx], f.mul(c, bc));
        }
    }
    trim(&mut r);
    trim(&mut quot);
    Ok((quot, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_identity() {
        let f = Field::new(7, 1, 0).unwrap();
        // (x^2 + 3x + 2) = (x + 1)(x + 2)
        let a = [Fe(2), Fe(3), Fe(1)];
        let (q, r) = divmod(&f, &a, &[Fe(1), Fe(1)]).unwrap();
        assert_eq!(q, vec![Fe(2), Fe(1)]);
        assert!(r.is_empty());
        let (q, r) = divmod(&f, &a, &[Fe(0), Fe(1)]).unwrap();
        assert_eq!((q, r), (vec![Fe(3), Fe(1)], vec![Fe(2)]));
        assert_eq!(eval(&f, &a, Fe(5)), Fe((25 + 15 + 2) % 7));
        assert_eq!(divmod(&f, &a, &[Fe(0)]), Err(Error::DivisionByZero));
    }
}
