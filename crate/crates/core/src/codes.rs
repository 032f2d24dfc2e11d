//! Linear codes as canonical row spaces, with duality, star products and
//! the square-dimension distinguisher.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::linalg::{self, Matrix};

/// A linear code, stored by its reduced row echelon generator so that equal
/// codes compare equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearCode {
    gen: Matrix,
    pivots: Vec<usize>,
}

impl LinearCode {
    /// The row space of `g`; dependent rows are allowed.
    pub fn from_generator(g: &Matrix) -> Result<LinearCode> {
        let (gen, pivots) = g.rref();
        if gen.rows() == 0 {
            return Err(Error::ZeroMatrix);
        }
        Ok(LinearCode { gen, pivots })
    }

    pub fn from_rows<V: AsRef<[Fe]>>(field: &Field, n: usize, rows: &[V]) -> Result<LinearCode> {
        LinearCode::from_generator(&Matrix::from_rows(field, n, rows)?)
    }

    /// Uniformly random code of dimension exactly `k`.
    pub fn random<R: Rng + ?Sized>(field: &Field, n: usize, k: usize, rng: &mut R) -> LinearCode {
        assert!(1 <= k && k <= n);
        loop {
            let g = Matrix::random(field, k, n, rng);
            if g.rank() == k {
                return LinearCode::from_generator(&g).expect("nonzero");
            }
        }
    }

    pub fn field(&self) -> &Field {
        self.gen.field()
    }
    pub fn n(&self) -> usize {
        self.gen.cols()
    }
    pub fn k(&self) -> usize {
        self.gen.rows()
    }
    /// Canonical generator, `k x n`.
    pub fn generator(&self) -> &Matrix {
        &self.gen
    }
    /// Pivot columns of the canonical generator: an information set.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn dual(&self) -> Result<LinearCode> {
        if self.k() == self.n() {
            return Err(Error::FullSpaceDual);
        }
        LinearCode::from_generator(&self.gen.right_kernel())
    }

    pub fn contains(&self, v: &[Fe]) -> Result<bool> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: v.len(),
            });
        }
        // reduce v against the canonical basis
        let f = self.field();
        let mut r = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = r[p];
            if !c.is_zero() {
                linalg::axpy(f, &mut r, f.neg(c), self.gen.row(i));
            }
        }
        Ok(r.iter().all(|e| e.is_zero()))
    }

    /// `self ⊆ other`
    pub fn is_subcode_of(&self, other: &LinearCode) -> Result<bool> {
        for row in self.gen.row_vecs() {
            if !other.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `u * G` for the canonical generator.
    pub fn encode(&self, u: &[Fe]) -> Result<Vec<Fe>> {
        self.gen.left_mul(u)
    }

    pub fn random_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Fe> {
        let u = linalg::random_vec(self.field(), self.k(), rng);
        self.encode(&u).expect("sized")
    }

    pub fn intersect(&self, other: &LinearCode) -> Result<Option<LinearCode>> {
        let m = linalg::intersect_rowspaces(&self.gen, &other.gen)?;
        Ok(LinearCode::from_generator(&m).ok())
    }
}

/// Span of `{a_i ⋆ b_j}` over the basis rows of both codes.
pub fn star_product(a: &LinearCode, b: &LinearCode) -> Result<LinearCode> {
    if a.n() != b.n() || a.field() != b.field() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let f = a.field();
    let mut m = Matrix::zeros(f, 0, a.n());
    for ra in a.gen.row_vecs() {
        for rb in b.gen.row_vecs() {
            m.push_row(&linalg::star(f, ra, rb))?;
        }
    }
    LinearCode::from_generator(&m)
}

/// Dimension of the span of `{z_i ⋆ g_j}` without canonicalizing it.
pub fn star_span_dim(f: &Field, zs: &[&[Fe]], code: &LinearCode) -> usize {
    let mut m = Matrix::zeros(f, 0, code.n());
    for z in zs {
        for g in code.gen.row_vecs() {
            m.push_row(&linalg::star(f, z, g)).expect("width matches");
        }
    }
    m.rank()
}

/// The square code `<C ⋆ C>`.
pub fn square(c: &LinearCode) -> LinearCode {
    // products i <= j suffice by commutativity
    let f = c.field();
    let rows: Vec<&[Fe]> = c.gen.row_vecs().collect();
    let mut m = Matrix::zeros(f, 0, c.n());
    for i in 0..rows.len() {
        for j in i..rows.len() {
            m.push_row(&linalg::star(f, rows[i], rows[j]))
                .expect("width matches");
        }
    }
    LinearCode::from_generator(&m).expect("square of a nonzero code is nonzero")
}

/// `min(k(k+1)/2, n)`
pub fn generic_square_dim(k: usize, n: usize) -> usize {
    (k * (k + 1) / 2).min(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Generic,
    NonGeneric,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Generic => "Generic",
            Verdict::NonGeneric => "NonGeneric",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinguishReport {
    pub n: usize,
    pub k: usize,
    pub square_dim: usize,
    pub generic_dim: usize,
    pub verdict: Verdict,
    /// `(dim of the dual's square, generic value)` when `k > n/2`.
    pub dual: Option<(usize, usize)>,
}

pub fn distinguish(c: &LinearCode) -> DistinguishReport {
    let (n, k) = (c.n(), c.k());
    let square_dim = square(c).k();
    let generic_dim = generic_square_dim(k, n);
    let verdict = if square_dim < generic_dim {
        Verdict::NonGeneric
    } else {
        Verdict::Generic
    };
    let dual = if 2 * k > n && k < n {
        let d = c.dual().expect("k < n");
        Some((square(&d).k(), generic_square_dim(n - k, n)))
    } else {
        None
    };
    DistinguishReport {
        n,
        k,
        square_dim,
        generic_dim,
        verdict,
        dual,
    }
}

impl fmt::Display for DistinguishReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "square_dim={} generic={} verdict={}",
            self.square_dim, self.generic_dim, self.verdict
        )?;
        if let Some((d, g)) = self.dual {
            let dv = if d < g {
                Verdict::NonGeneric
            } else {
                Verdict::Generic
            };
            write!(f, " dual_square_dim={d} dual_generic={g} dual_verdict={dv}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use crate::grs::GrsParams;
    use crate::rng;
    use proptest::prelude::*;

    fn gf16() -> Field {
        Field::new(2, 4, 19).unwrap()
    }

    #[test]
    fn canonicalization() {
        let f = gf16();
        let full = LinearCode::from_generator(&Matrix::identity(&f, 4)).unwrap();
        assert_eq!((full.k(), full.n()), (4, 4));
        let f7 = Field::new(7, 1, 0).unwrap();
        let c =
            LinearCode::from_generator(&Matrix::from_u32(&f7, &[&[1, 2, 3], &[2, 4, 6]]).unwrap())
                .unwrap();
        assert_eq!(c.k(), 1);
        let g = Matrix::random(&f, 3, 8, &mut rng::seeded(1));
        let s = Matrix::random_invertible(&f, 3, &mut rng::seeded(2));
        assert_eq!(
            LinearCode::from_generator(&g).unwrap(),
            LinearCode::from_generator(&s.mul(&g).unwrap()).unwrap()
        );
        assert_eq!(
            LinearCode::from_generator(&Matrix::zeros(&f, 2, 3)),
            Err(Error::ZeroMatrix)
        );
    }

    #[test]
    fn duality() {
        let f = gf16();
        let n = 7;
        let rep = LinearCode::from_rows(&f, n, &[vec![Fe(1); n]]).unwrap();
        let d = rep.dual().unwrap();
        assert_eq!(d.k(), n - 1);
        for row in d.generator().row_vecs() {
            assert_eq!(linalg::dot(&f, row, &vec![Fe(1); n]), Fe::ZERO);
        }
        assert_eq!(d.dual().unwrap(), rep);
        let full = LinearCode::from_generator(&Matrix::identity(&f, 3)).unwrap();
        assert_eq!(full.dual(), Err(Error::FullSpaceDual));
    }

    #[test]
    fn grs_dual_square_dimension() {
        let f = gf16();
        let mut r = rng::seeded(11);
        for k in [9, 10, 11, 12] {
            let p = GrsParams::random(&f, 15, k, &mut r);
            let d = p.code().dual().unwrap();
            assert_eq!(square(&d).k(), (2 * (15 - k) - 1).min(15));
        }
    }

    #[test]
    fn star_examples() {
        let f7 = Field::new(7, 1, 0).unwrap();
        let v = linalg::star(&f7, &[Fe(1), Fe(2), Fe(3)], &[Fe(2), Fe(0), Fe(1)]);
        assert_eq!(v, vec![Fe(2), Fe(0), Fe(3)]);

        let f = gf16();
        let mut r = rng::seeded(3);
        let a = LinearCode::random(&f, 10, 3, &mut r);
        let ones = LinearCode::from_rows(&f, 10, &[vec![Fe(1); 10]]).unwrap();
        assert_eq!(star_product(&a, &ones).unwrap(), a);

        let x: Vec<Fe> = f.elements().skip(1).collect();
        let y: Vec<Fe> = (0..15).map(|_| f.random_nonzero(&mut r)).collect();
        let g3 = GrsParams::new(&f, x.clone(), y.clone(), 3).unwrap().code();
        let g2 = GrsParams::new(&f, x, y, 2).unwrap().code();
        assert_eq!(star_product(&g3, &g2).unwrap().k(), 4);
    }

    #[test]
    fn square_examples() {
        let f = gf16();
        let mut r = rng::seeded(4);
        for k in 1..=8 {
            let c = GrsParams::random(&f, 15, k, &mut r).code();
            assert_eq!(square(&c).k(), 2 * k - 1);
        }
        let one = LinearCode::random(&f, 15, 1, &mut r);
        assert_eq!(square(&one).k(), 1);
        let sixes = (0..100)
            .filter(|_| square(&LinearCode::random(&f, 15, 3, &mut r)).k() == 6)
            .count();
        assert!(sixes > 50, "{sixes}");
    }

    #[test]
    fn membership() {
        let f = gf16();
        let mut r = rng::seeded(5);
        let c = LinearCode::random(&f, 9, 4, &mut r);
        assert!(c.contains(&[Fe::ZERO; 9]).unwrap());
        for row in c.generator().row_vecs() {
            assert!(c.contains(row).unwrap());
        }
        assert!(c.contains(&c.random_codeword(&mut r)).unwrap());
        let outside = loop {
            let v = linalg::random_vec(&f, 9, &mut r);
            let mut m = c.generator().clone();
            m.push_row(&v).unwrap();
            if m.rank() == 5 {
                break v;
            }
        };
        assert!(!c.contains(&outside).unwrap());
        assert!(matches!(
            c.contains(&[Fe(0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distinguisher() {
        let f = gf16();
        let mut r = rng::seeded(6);
        let grs = GrsParams::random(&f, 15, 6, &mut r).code();
        let rep = distinguish(&grs);
        assert_eq!(
            (rep.square_dim, rep.generic_dim, rep.verdict),
            (11, 15, Verdict::NonGeneric)
        );
        assert_eq!(
            rep.to_string(),
            "square_dim=11 generic=15 verdict=NonGeneric"
        );
        let rnd = distinguish(&LinearCode::random(&f, 15, 6, &mut r));
        assert_eq!((rnd.square_dim, rnd.verdict), (15, Verdict::Generic));
        let one = distinguish(&LinearCode::random(&f, 15, 1, &mut r));
        assert_eq!(
            (one.square_dim, one.generic_dim, one.verdict),
            (1, 1, Verdict::Generic)
        );

        let high = distinguish(&GrsParams::random(&f, 15, 11, &mut r).code());
        assert_eq!(high.verdict, Verdict::Generic);
        assert_eq!(high.dual, Some((7, 10)));
    }

    proptest! {
        #[test]
        fn star_laws(seed in 0u64..5000, ka in 1usize..4, kb in 1usize..4) {
            let f = gf16();
            let mut r = rng::seeded(seed);
            let n = 12;
            let a = LinearCode::random(&f, n, ka, &mut r);
            let b = LinearCode::random(&f, n, kb, &mut r);
            let ab = star_product(&a, &b).unwrap();
            prop_assert!(ab.k() <= ka * kb);
            prop_assert_eq!(&ab, &star_product(&b, &a).unwrap());
            // monotone in the first argument
            let mut bigger = a.generator().clone();
            bigger.push_row(&linalg::random_vec(&f, n, &mut r)).unwrap();
            let a2 = LinearCode::from_generator(&bigger).unwrap();
            prop_assert!(ab.is_subcode_of(&star_product(&a2, &b).unwrap()).unwrap());
            prop_assert_eq!(square(&a), star_product(&a, &a).unwrap());
        }
    }
}
