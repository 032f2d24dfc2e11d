//! Key recovery from the public key alone.
//!
//! The public code `C_pub` shares the codimension-one subcode
//! `C_λ⊥ = C ∩ ⟨λ⟩⊥` with the permuted secret GRS code `C`. Triples of
//! codewords inside `C_λ⊥` are detected by the dimension of
//! `span{z_i ⋆ g_j}`, which drops from `3k-3` to at most `2k+2`. The square
//! of `C_λ⊥` is a GRS code, which exposes the evaluation points; the
//! multipliers and a valid `(a, λ)` pair follow by linear algebra. High-rate
//! keys are attacked through the dual code.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::codes::{self, LinearCode};
use crate::error::{Error, Result};
use crate::gf::Fe;
use crate::grs::{self, GrsParams};
use crate::linalg::{self, Matrix};
use crate::scheme::{self, PublicKey};

/// Draws allowed when sampling a vector subject to exclusion constraints.
const CONSTRAINED_DRAWS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Auto,
    LowRate,
    HighRateDual,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Auto => "auto",
            Branch::LowRate => "low-rate",
            Branch::HighRateDual => "high-rate-dual",
        })
    }
}

impl FromStr for Branch {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Branch, String> {
        match s {
            "auto" => Ok(Branch::Auto),
            "low-rate" | "low" => Ok(Branch::LowRate),
            "high-rate-dual" | "dual" => Ok(Branch::HighRateDual),
            _ => Err(format!(
                "unknown branch {s:?} (auto, low-rate, high-rate-dual)"
            )),
        }
    }
}

/// `2k + 2 < n` with `k >= 6`.
pub fn low_rate_applies(n: usize, k: usize) -> bool {
    k >= 6 && 2 * k + 2 < n
}

/// `2k > n + 2` with `n - k >= 6`.
pub fn dual_applies(n: usize, k: usize) -> bool {
    k < n && n - k >= 6 && 2 * k > n + 2
}

/// The branch `Auto` would take, or `NotApplicable`.
pub fn applicable_branch(n: usize, k: usize) -> Result<Branch> {
    if low_rate_applies(n, k) {
        Ok(Branch::LowRate)
    } else if dual_applies(n, k) {
        Ok(Branch::HighRateDual)
    } else {
        Err(Error::NotApplicable { n, k })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackConfig {
    /// Cap on drawn triples across all restarts.
    pub max_outer_trials: u64,
    pub branch: Branch,
}

impl AttackConfig {
    /// `100 q^3` trials, automatic branch.
    pub fn for_field_order(q: u32) -> AttackConfig {
        AttackConfig {
            max_outer_trials: 100 * u64::from(q).pow(3),
            branch: Branch::Auto,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttackStats {
    /// Triples drawn by the subcode search.
    pub outer_trials: u64,
    /// Searches restarted after a failed verification.
    pub restarts: u64,
    /// `Some` once a branch ran; `None` for the degenerate shortcut.
    pub branch: Option<Branch>,
}

/// Result of the subcode search.
#[derive(Clone, Debug)]
pub struct ClambdaSearch {
    pub code: LinearCode,
    pub trials: u64,
    pub restarts: u64,
}

#[derive(Clone, Debug)]
pub struct RecoveredKey {
    /// The permuted secret code `C`.
    pub grs: GrsParams,
    pub a0: Vec<Fe>,
    pub lambda0: Vec<Fe>,
    /// `C_pub ∩ C`, of dimension `k - 1`.
    pub c_lambda_perp: LinearCode,
    pub stats: AttackStats,
}

impl RecoveredKey {
    /// `φ(p) = p + ⟨λ0, p⟩ a0`
    pub fn phi(&self, p: &[Fe]) -> Vec<Fe> {
        let f = self.grs.field();
        let mut out = p.to_vec();
        linalg::axpy(f, &mut out, linalg::dot(f, &self.lambda0, p), &self.a0);
        out
    }

    /// `⟨a0, λ0⟩ ≠ -1` and `φ` maps `C` onto `pub`.
    pub fn is_valid_for(&self, public: &LinearCode) -> bool {
        let f = self.grs.field();
        if f.add(linalg::dot(f, &self.a0, &self.lambda0), Fe::ONE)
            .is_zero()
        {
            return false;
        }
        let image: Vec<Vec<Fe>> = self
            .grs
            .generator()
            .row_vecs()
            .map(|p| self.phi(p))
            .collect();
        let Ok(m) = Matrix::from_rows(f, self.grs.n(), &image) else {
            return false;
        };
        m.rank() == self.grs.k() && image.iter().all(|v| public.contains(v).unwrap_or(false))
    }
}

/// Recovers `C_λ⊥` from a public code of dimension `k` with `2k + 2 < n`,
/// `k >= 6`.
pub fn find_clambda_basis<R: Rng + ?Sized>(
    public: &LinearCode,
    cfg: &AttackConfig,
    rng: &mut R,
) -> Result<ClambdaSearch> {
    let (n, k) = (public.n(), public.k());
    if !low_rate_applies(n, k) {
        return Err(Error::NotApplicable { n, k });
    }
    let mut trials = 0;
    let mut restarts = 0;
    let code = search(
        public,
        cfg.max_outer_trials,
        &mut trials,
        &mut restarts,
        rng,
    )?;
    Ok(ClambdaSearch {
        code,
        trials,
        restarts,
    })
}

fn search<R: Rng + ?Sized>(
    public: &LinearCode,
    budget: u64,
    trials: &mut u64,
    restarts: &mut u64,
    rng: &mut R,
) -> Result<LinearCode> {
    let f = public.field();
    let (n, k) = (public.n(), public.k());
    let threshold = 2 * k + 2;
    let inner_cap = 16 * f.q() as usize;
    let low = |zs: &[&[Fe]]| codes::star_span_dim(f, zs, public) <= threshold;

    'outer: loop {
        if *trials >= budget {
            return Err(Error::TrialBudgetExceeded(budget));
        }
        *trials += 1;
        let z: Vec<Vec<Fe>> = (0..3).map(|_| public.random_codeword(rng)).collect();
        let mut basis = Matrix::from_rows(f, n, &z)?;
        if !low(&[&z[0], &z[1], &z[2]]) || basis.rank() != 3 {
            continue;
        }
        for _ in 4..k {
            let mut found = false;
            for _ in 0..inner_cap {
                let zs = public.random_codeword(rng);
                // all three pairs of the seed triple, which rejects far more
                // outsiders than the single pair (z1, z2) at small n
                let pairs = [(0, 1), (0, 2), (1, 2)];
                if !pairs.iter().all(|&(i, j)| low(&[&z[i], &z[j], &zs])) {
                    continue;
                }
                let mut grown = basis.clone();
                grown.push_row(&zs)?;
                if grown.rank() == grown.rows() {
                    basis = grown;
                    found = true;
                    break;
                }
            }
            if !found {
                *restarts += 1;
                continue 'outer;
            }
        }
        let span = LinearCode::from_generator(&basis)?;
        if codes::square(&span).k() == 2 * k - 1 {
            return Ok(span);
        }
        *restarts += 1;
    }
}

/// From `C_λ⊥` of dimension `k - 1`, the GRS code of dimension `k` that
/// contains it and whose square structure it shares.
pub fn recover_secret_grs(c_lp: &LinearCode, k: usize) -> Result<GrsParams> {
    let f = c_lp.field();
    let n = c_lp.n();
    if k < 2 || c_lp.k() != k - 1 {
        return Err(Error::PreconditionViolated(
            "subcode must have dimension k - 1",
        ));
    }
    if 2 * k - 1 > n {
        return Err(Error::NotGrs);
    }
    let sq = codes::square(c_lp);
    if sq.k() != 2 * k - 1 {
        return Err(Error::NotGrs);
    }
    let sq_params = grs::ss_recover(&sq)?;
    let x = sq_params.x().to_vec();
    let squares_match = |y: &[Fe]| {
        GrsParams::new(f, x.clone(), linalg::star(f, y, y), 2 * k - 1).is_ok_and(|p| p.code() == sq)
    };
    let y = match grs::recover_multipliers_where(&x, k, c_lp, squares_match) {
        Ok(y) => y,
        Err(Error::NoSolution) if f.p() == 2 => grs::sqrt_multipliers(f, sq_params.y())?,
        Err(Error::NoSolution) => return Err(Error::NotGrs),
        Err(e) => return Err(e),
    };
    let params = GrsParams::new(f, x, y, k).map_err(|_| Error::NotGrs)?;
    if !c_lp.is_subcode_of(&params.code())? {
        return Err(Error::NotGrs);
    }
    Ok(params)
}

fn draw<R: Rng + ?Sized>(
    space: &LinearCode,
    rng: &mut R,
    mut ok: impl FnMut(&[Fe]) -> bool,
) -> Result<Vec<Fe>> {
    for _ in 0..CONSTRAINED_DRAWS {
        let v = space.random_codeword(rng);
        if ok(&v) {
            return Ok(v);
        }
    }
    Err(Error::PreconditionViolated("no admissible vector found"))
}

/// Orthogonal complement of the span of `rows` (the full space if empty).
fn complement(f: &crate::gf::Field, n: usize, rows: &[&[Fe]]) -> Result<LinearCode> {
    if rows.is_empty() {
        return LinearCode::from_generator(&Matrix::identity(f, n));
    }
    LinearCode::from_rows(f, n, rows)?.dual()
}

/// A valid `(a0, λ0)` pair for `(public, c)`, with `⟨a0, λ0⟩ = 0`.
pub fn recover_valid_pair<R: Rng + ?Sized>(
    public: &LinearCode,
    c: &LinearCode,
    rng: &mut R,
) -> Result<(Vec<Fe>, Vec<Fe>)> {
    let f = c.field();
    let (n, k) = (c.n(), c.k());
    if public == c || public.n() != n || public.k() != k {
        return Err(Error::PreconditionViolated(
            "public code must differ from the secret code",
        ));
    }
    let meet =
        public
            .intersect(c)?
            .filter(|m| m.k() + 1 == k)
            .ok_or(Error::PreconditionViolated(
                "intersection must have dimension k - 1",
            ))?;
    let pub_dual = public.dual()?;
    let c_dual = c.dual()?;
    let outside = |code: &LinearCode, v: &[Fe]| !code.contains(v).unwrap_or(true);

    let r1 = draw(&pub_dual, rng, |v| outside(&c_dual, v))?;
    let meet_dual = meet.dual()?;
    let duals_meet = pub_dual.intersect(&c_dual)?;
    // b0 proportional to r1 on C + <a> leaves no admissible a0; redraw it
    let mut pair = None;
    for _ in 0..100 {
        let b0 = draw(&meet_dual, rng, |v| outside(&c_dual, v))?;
        let mut rows: Vec<&[Fe]> = duals_meet
            .iter()
            .flat_map(|m| m.generator().row_vecs())
            .collect();
        rows.push(&b0);
        let w = complement(f, n, &rows)?;
        let admissible = |v: &[Fe]| outside(c, v) && !linalg::dot(f, v, &r1).is_zero();
        if let Some(a0) = (0..64)
            .map(|_| w.random_codeword(rng))
            .find(|v| admissible(v))
        {
            pair = Some((a0, b0));
            break;
        }
    }
    let (a0, b0) = pair.ok_or(Error::PreconditionViolated("no admissible vector found"))?;
    let p1 = draw(c, rng, |v| outside(public, v))?;

    let den = f.mul(linalg::dot(f, &b0, &p1), linalg::dot(f, &a0, &r1));
    if den.is_zero() {
        return Err(Error::PreconditionViolated("vanishing denominator"));
    }
    let gamma = f.neg(f.div(linalg::dot(f, &p1, &r1), den)?);
    Ok((a0, linalg::scale(f, gamma, &b0)))
}

/// Runs the full attack on a public key.
pub fn attack<R: Rng + ?Sized>(
    pk: &PublicKey,
    cfg: &AttackConfig,
    rng: &mut R,
) -> Result<RecoveredKey> {
    let f = pk.field();
    let (n, k) = (pk.n(), pk.k());
    let branch = match cfg.branch {
        Branch::Auto => applicable_branch(n, k)?,
        Branch::LowRate if low_rate_applies(n, k) => Branch::LowRate,
        Branch::HighRateDual if dual_applies(n, k) => Branch::HighRateDual,
        _ => return Err(Error::NotApplicable { n, k }),
    };
    let public = pk.code();
    let public_dual = public.dual()?;

    let degenerate = match branch {
        Branch::HighRateDual => codes::square(&public_dual).k() < 2 * (n - k),
        _ => codes::square(&public).k() < 2 * k,
    };
    if degenerate {
        // the public code is itself GRS; φ is the identity
        let grs = grs::ss_recover(&public)?;
        let mut a0 = vec![Fe::ZERO; n];
        a0[0] = Fe::ONE;
        let head: Vec<&[Fe]> = public.generator().row_vecs().take(k - 1).collect();
        let c_lambda_perp = if head.is_empty() {
            public.clone()
        } else {
            LinearCode::from_rows(f, n, &head)?
        };
        return Ok(RecoveredKey {
            grs,
            a0,
            lambda0: vec![Fe::ZERO; n],
            c_lambda_perp,
            stats: AttackStats::default(),
        });
    }

    let mut stats = AttackStats {
        branch: Some(branch),
        ..AttackStats::default()
    };
    loop {
        let attempt = match branch {
            Branch::HighRateDual => search(
                &public_dual,
                cfg.max_outer_trials,
                &mut stats.outer_trials,
                &mut stats.restarts,
                rng,
            )
            .and_then(|sub| recover_secret_grs(&sub, n - k))
            .and_then(|dual_grs| primal_from_dual(&dual_grs, k)),
            _ => search(
                &public,
                cfg.max_outer_trials,
                &mut stats.outer_trials,
                &mut stats.restarts,
                rng,
            )
            .and_then(|sub| recover_secret_grs(&sub, k)),
        };
        let grs = match attempt {
            Ok(g) => g,
            Err(Error::NotGrs) => {
                stats.restarts += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let c = grs.code();
        let (a0, lambda0) = match recover_valid_pair(&public, &c, rng) {
            Ok(pair) => pair,
            Err(Error::PreconditionViolated(_)) => {
                stats.restarts += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let c_lambda_perp = public
            .intersect(&c)?
            .expect("checked by recover_valid_pair");
        return Ok(RecoveredKey {
            grs,
            a0,
            lambda0,
            c_lambda_perp,
            stats,
        });
    }
}

/// `C = (C⊥)⊥` as a GRS code on the same points.
fn primal_from_dual(dual_grs: &GrsParams, k: usize) -> Result<GrsParams> {
    let f = dual_grs.field();
    let c = dual_grs.code().dual()?;
    let y = grs::recover_multipliers(dual_grs.x(), k, &c).map_err(|_| Error::NotGrs)?;
    let params = GrsParams::new(f, dual_grs.x().to_vec(), y, k).map_err(|_| Error::NotGrs)?;
    if params.code() != c {
        return Err(Error::NotGrs);
    }
    Ok(params)
}

/// Every plaintext within radius `t` of `z`, found through the shifts
/// `z + α a0`, one of which lies within the decoding radius of `C`.
pub fn decrypt_candidates_with_pair(
    rk: &RecoveredKey,
    pk: &PublicKey,
    z: &[Fe],
) -> Result<Vec<Vec<Fe>>> {
    let f = pk.field();
    let n = pk.n();
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    let mut found = Vec::new();
    for alpha in f.elements() {
        let mut shifted = z.to_vec();
        linalg::axpy(f, &mut shifted, alpha, &rk.a0);
        let Ok((p, _)) = rk.grs.decode(&shifted) else {
            continue;
        };
        let c = rk.phi(&p);
        if linalg::weight(&linalg::sub_vec(f, z, &c)) > pk.t() {
            continue;
        }
        if let Ok(m) = pk.g_pub().solve_left(&c) {
            found.push(m);
        }
    }
    scheme::order_candidates(pk, z, found)
}

/// Decrypts with a recovered key, choosing among candidates exactly as
/// [`scheme::decrypt`] does.
pub fn decrypt_with_pair(rk: &RecoveredKey, pk: &PublicKey, z: &[Fe]) -> Result<Vec<Fe>> {
    scheme::choose_plaintext(decrypt_candidates_with_pair(rk, pk, z)?).ok_or(Error::DecodeFailure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use crate::rng;

    fn gf16() -> Field {
        Field::new(2, 4, 19).unwrap()
    }

    #[test]
    fn applicability() {
        assert_eq!(applicable_branch(15, 6), Ok(Branch::LowRate));
        assert_eq!(applicable_branch(15, 9), Ok(Branch::HighRateDual));
        for k in [7, 8] {
            assert_eq!(
                applicable_branch(15, k),
                Err(Error::NotApplicable { n: 15, k })
            );
        }
        // the k >= 6 floor
        assert!(applicable_branch(15, 5).is_err());
        assert!(applicable_branch(15, 10).is_err());
        assert_eq!("dual".parse::<Branch>(), Ok(Branch::HighRateDual));
        assert!("sideways".parse::<Branch>().is_err());
    }

    #[test]
    fn low_rate_end_to_end() {
        let f = gf16();
        let mut r = rng::seeded(11);
        let (pk, sk) = scheme::keygen(&f, 15, 6, &mut r).unwrap();
        let rk = attack(&pk, &AttackConfig::for_field_order(16), &mut r).unwrap();
        assert_eq!(rk.grs.code(), sk.permuted_grs().code());
        assert_eq!(
            rk.c_lambda_perp,
            pk.code().intersect(&rk.grs.code()).unwrap().unwrap()
        );
        assert!(rk.is_valid_for(&pk.code()));
        for _ in 0..5 {
            let m = linalg::random_vec(&f, 6, &mut r);
            let c = scheme::encrypt(&pk, &m, &mut r).unwrap();
            assert_eq!(decrypt_with_pair(&rk, &pk, &c).unwrap(), m);
        }
    }

    #[test]
    fn budget_and_branch_errors() {
        let f = gf16();
        let mut r = rng::seeded(5);
        let (pk, _) = scheme::keygen(&f, 15, 6, &mut r).unwrap();
        let cfg = AttackConfig {
            max_outer_trials: 3,
            branch: Branch::Auto,
        };
        assert!(matches!(
            attack(&pk, &cfg, &mut r),
            Err(Error::TrialBudgetExceeded(3))
        ));
        let cfg = AttackConfig {
            branch: Branch::HighRateDual,
            ..AttackConfig::for_field_order(16)
        };
        assert!(matches!(
            attack(&pk, &cfg, &mut r),
            Err(Error::NotApplicable { .. })
        ));
        let (pk7, _) = scheme::keygen(&f, 15, 7, &mut r).unwrap();
        assert!(matches!(
            attack(&pk7, &AttackConfig::for_field_order(16), &mut r),
            Err(Error::NotApplicable { n: 15, k: 7 })
        ));
    }

    #[test]
    fn plain_grs_key_takes_the_shortcut() {
        let f = gf16();
        let mut r = rng::seeded(9);
        let p = GrsParams::random(&f, 15, 6, &mut r);
        let pk = PublicKey::new(p.generator()).unwrap();
        let rk = attack(&pk, &AttackConfig::for_field_order(16), &mut r).unwrap();
        assert_eq!(rk.grs.code(), p.code());
        assert_eq!(rk.stats, AttackStats::default());
        assert!(rk.is_valid_for(&pk.code()));
        let m = linalg::random_vec(&f, 6, &mut r);
        let c = scheme::encrypt(&pk, &m, &mut r).unwrap();
        assert_eq!(decrypt_with_pair(&rk, &pk, &c).unwrap(), m);
    }

    #[test]
    fn random_word_is_rejected() {
        let f = gf16();
        let mut r = rng::seeded(21);
        let (pk, sk) = scheme::keygen(&f, 15, 6, &mut r).unwrap();
        let c = sk.permuted_grs().code();
        let (a0, lambda0) = recover_valid_pair(&pk.code(), &c, &mut r).unwrap();
        let rk = RecoveredKey {
            grs: sk.permuted_grs(),
            a0,
            lambda0,
            c_lambda_perp: pk.code().intersect(&c).unwrap().unwrap(),
            stats: AttackStats::default(),
        };
        assert!(rk.is_valid_for(&pk.code()));
        let mut failures = 0;
        for _ in 0..20 {
            let z = linalg::random_vec(&f, 15, &mut r);
            if decrypt_with_pair(&rk, &pk, &z) == Err(Error::DecodeFailure) {
                failures += 1;
            }
        }
        assert!(failures >= 15, "{failures}");
    }
}
