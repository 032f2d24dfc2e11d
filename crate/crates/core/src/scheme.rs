//! The McEliece variant whose permutation is replaced by `Q = Π + αᵀβ`.
//!
//! Public key `G_pub = S⁻¹ G_sec Q⁻¹`; ciphertext `c = m G_pub + e` with
//! `wt(e) = ⌊(n-k)/2⌋`. Decryption guesses the scalar `⟨e, α⟩`, since
//! `e R = ⟨e, α⟩ β`.

use rand::Rng;

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::grs::GrsParams;
use crate::linalg::{self, Matrix};

/// Resampling cap for key generation.
pub const KEYGEN_ATTEMPTS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    g_pub: Matrix,
}

impl PublicKey {
    pub fn new(g_pub: Matrix) -> Result<PublicKey> {
        let (k, n) = (g_pub.rows(), g_pub.cols());
        if k == 0 || k >= n || g_pub.rank() != k {
            return Err(Error::InvalidDimensions { n, k });
        }
        Ok(PublicKey { g_pub })
    }

    pub fn g_pub(&self) -> &Matrix {
        &self.g_pub
    }
    pub fn field(&self) -> &Field {
        self.g_pub.field()
    }
    pub fn n(&self) -> usize {
        self.g_pub.cols()
    }
    pub fn k(&self) -> usize {
        self.g_pub.rows()
    }
    /// Error weight budget.
    pub fn t(&self) -> usize {
        (self.n() - self.k()) / 2
    }
    pub fn code(&self) -> LinearCode {
        LinearCode::from_generator(&self.g_pub).expect("full rank")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    grs: GrsParams,
    s: Matrix,
    perm: Vec<usize>,
    alpha: Vec<Fe>,
    beta: Vec<Fe>,
    // R Π⁻¹ = bᵀ a
    a: Vec<Fe>,
    b: Vec<Fe>,
    lambda: Vec<Fe>,
}

impl SecretKey {
    /// Assembles a key and derives `a`, `b` and `λ`. Fails when `Q` is singular
    /// or the pieces have inconsistent sizes.
    pub fn new(
        grs: GrsParams,
        s: Matrix,
        perm: Vec<usize>,
        alpha: Vec<Fe>,
        beta: Vec<Fe>,
    ) -> Result<SecretKey> {
        let (n, k) = (grs.n(), grs.k());
        let f = grs.field().clone();
        let mut seen = vec![false; n];
        let perm_ok = perm.len() == n
            && perm
                .iter()
                .all(|&i| i < n && !std::mem::replace(&mut seen[i], true));
        if !perm_ok || s.rows() != k || s.cols() != k || alpha.len() != n || beta.len() != n {
            return Err(Error::InvalidDimensions { n, k });
        }
        if s.rank() != k {
            return Err(Error::NoSolution);
        }
        let a: Vec<Fe> = perm.iter().map(|&i| beta[i]).collect();
        let b = alpha.clone();
        let denom = f.add(Fe::ONE, linalg::dot(&f, &a, &b));
        let scale = f.neg(f.inv(denom).map_err(|_| Error::NoSolution)?);
        let lambda = linalg::scale(&f, scale, &b);
        Ok(SecretKey {
            grs,
            s,
            perm,
            alpha,
            beta,
            a,
            b,
            lambda,
        })
    }

    pub fn field(&self) -> &Field {
        self.grs.field()
    }
    pub fn n(&self) -> usize {
        self.grs.n()
    }
    pub fn k(&self) -> usize {
        self.grs.k()
    }
    pub fn t(&self) -> usize {
        self.grs.t()
    }
    /// The unpermuted secret code `C_sec`.
    pub fn grs(&self) -> &GrsParams {
        &self.grs
    }
    pub fn s(&self) -> &Matrix {
        &self.s
    }
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }
    pub fn alpha(&self) -> &[Fe] {
        &self.alpha
    }
    pub fn beta(&self) -> &[Fe] {
        &self.beta
    }
    pub fn a(&self) -> &[Fe] {
        &self.a
    }
    pub fn b(&self) -> &[Fe] {
        &self.b
    }
    pub fn lambda(&self) -> &[Fe] {
        &self.lambda
    }

    /// `C = C_sec Π⁻¹` as a GRS code.
    pub fn permuted_grs(&self) -> GrsParams {
        self.grs.permuted(&self.perm)
    }

    pub fn permutation_matrix(&self) -> Matrix {
        Matrix::permutation(self.field(), &self.perm)
    }

    /// `Q = Π + αᵀβ`
    pub fn q_matrix(&self) -> Matrix {
        let f = self.field();
        let n = self.n();
        let mut q = self.permutation_matrix();
        for i in 0..n {
            for j in 0..n {
                let v = f.add(q.get(i, j), f.mul(self.alpha[i], self.beta[j]));
                q.set(i, j, v);
            }
        }
        q
    }

    /// `P = I + bᵀa`, so that `Q = P Π` and `C_pub = C P⁻¹`.
    pub fn p_matrix(&self) -> Matrix {
        let f = self.field();
        let n = self.n();
        let mut p = Matrix::identity(f, n);
        for i in 0..n {
            for j in 0..n {
                let v = f.add(p.get(i, j), f.mul(self.b[i], self.a[j]));
                p.set(i, j, v);
            }
        }
        p
    }

    pub fn public_key(&self) -> Result<PublicKey> {
        let q_inv = self.q_matrix().inverse()?;
        let s_inv = self.s.inverse()?;
        let g = s_inv.mul(&self.grs.generator())?.mul(&q_inv)?;
        PublicKey::new(g)
    }

    /// `c Π`, i.e. coordinate `i` moved to `perm[i]`.
    fn apply_perm(&self, c: &[Fe]) -> Vec<Fe> {
        let mut out = vec![Fe::ZERO; c.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = c[i];
        }
        out
    }
}

pub fn keygen<R: Rng + ?Sized>(
    f: &Field,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<(PublicKey, SecretKey)> {
    if k == 0 || k >= n || n > f.q() as usize {
        return Err(Error::InvalidDimensions { n, k });
    }
    let nonzero_vec = |rng: &mut R| loop {
        let v = linalg::random_vec(f, n, rng);
        if linalg::weight(&v) > 0 {
            return v;
        }
    };
    for _ in 0..KEYGEN_ATTEMPTS {
        let grs = GrsParams::random(f, n, k, rng);
        let s = Matrix::random_invertible(f, k, rng);
        let perm = linalg::random_perm(n, rng);
        let alpha = nonzero_vec(rng);
        let beta = nonzero_vec(rng);
        let sk = match SecretKey::new(grs, s, perm, alpha, beta) {
            Ok(sk) => sk,
            // 1 + <a, b> = 0 makes Q singular
            Err(Error::NoSolution) => continue,
            Err(e) => return Err(e),
        };
        let c = sk.permuted_grs().code();
        let lambda_in_dual = c
            .generator()
            .row_vecs()
            .all(|row| linalg::dot(f, row, sk.lambda()).is_zero());
        if lambda_in_dual {
            continue;
        }
        let pk = sk.public_key()?;
        if pk.code() == c {
            continue;
        }
        return Ok((pk, sk));
    }
    Err(Error::ResampleExhausted(KEYGEN_ATTEMPTS))
}

/// Encrypts with a uniformly random error of weight exactly `t`.
pub fn encrypt<R: Rng + ?Sized>(pk: &PublicKey, m: &[Fe], rng: &mut R) -> Result<Vec<Fe>> {
    let e = random_error(pk.field(), pk.n(), pk.t(), rng);
    encrypt_with_error(pk, m, &e)
}

/// Weight-`t` vector: support first, then nonzero values.
pub fn random_error<R: Rng + ?Sized>(f: &Field, n: usize, t: usize, rng: &mut R) -> Vec<Fe> {
    let mut e = vec![Fe::ZERO; n];
    for i in rand::seq::index::sample(rng, n, t) {
        e[i] = f.random_nonzero(rng);
    }
    e
}

pub fn encrypt_with_error(pk: &PublicKey, m: &[Fe], e: &[Fe]) -> Result<Vec<Fe>> {
    if m.len() != pk.k() {
        return Err(Error::DimensionMismatch {
            expected: pk.k(),
            got: m.len(),
        });
    }
    if e.len() != pk.n() {
        return Err(Error::DimensionMismatch {
            expected: pk.n(),
            got: e.len(),
        });
    }
    let c = pk.g_pub().left_mul(m)?;
    Ok(linalg::add_vec(pk.field(), &c, e))
}

/// Every plaintext `m` with `wt(c - m G_pub) <= t`, ordered as by
/// [`choose_plaintext`]. Small parameters admit several.
pub fn decrypt_candidates(sk: &SecretKey, pk: &PublicKey, c: &[Fe]) -> Result<Vec<Vec<Fe>>> {
    let f = sk.field();
    let n = sk.n();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.len(),
        });
    }
    let g_sec = sk.grs.generator();
    let c_pi = sk.apply_perm(c);
    let c_alpha = linalg::dot(f, c, &sk.alpha);
    let mut found = Vec::new();
    for gamma in f.elements() {
        let shift = f.sub(c_alpha, gamma);
        let mut cp = c_pi.clone();
        linalg::axpy(f, &mut cp, shift, &sk.beta);
        let Ok((word, _)) = sk.grs.decode(&cp) else {
            continue;
        };
        let u = g_sec.solve_left(&word)?;
        let m = sk.s.left_mul(&u)?;
        // the implied error must be light and consistent with the guess
        let e = linalg::sub_vec(f, c, &pk.g_pub().left_mul(&m)?);
        if linalg::weight(&e) <= sk.t() && linalg::dot(f, &e, &sk.alpha) == gamma {
            found.push(m);
        }
    }
    order_candidates(pk, c, found)
}

/// Sorts by distance of `m G_pub` to `c`, then lexicographically, and
/// drops duplicates.
pub fn order_candidates(pk: &PublicKey, c: &[Fe], mut found: Vec<Vec<Fe>>) -> Result<Vec<Vec<Fe>>> {
    let f = pk.field();
    let mut keyed = Vec::with_capacity(found.len());
    for m in found.drain(..) {
        let d = linalg::weight(&linalg::sub_vec(f, c, &pk.g_pub().left_mul(&m)?));
        keyed.push((d, m));
    }
    keyed.sort();
    keyed.dedup();
    Ok(keyed.into_iter().map(|(_, m)| m).collect())
}

/// The nearest of the candidates, ties broken lexicographically.
pub fn choose_plaintext(candidates: Vec<Vec<Fe>>) -> Option<Vec<Fe>> {
    candidates.into_iter().next()
}

/// Legitimate decryption: sweep `γ = ⟨e, α⟩` over the field, decode
/// `c Q - γ β = m S⁻¹ G_sec + e Π` in the secret code and keep the nearest
/// verified plaintext.
pub fn decrypt(sk: &SecretKey, pk: &PublicKey, c: &[Fe]) -> Result<Vec<Fe>> {
    choose_plaintext(decrypt_candidates(sk, pk, c)?).ok_or(Error::DecryptionFailure)
}
