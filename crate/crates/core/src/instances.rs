//! Seeded random test instances: M-matrices, weak regular splittings and
//! commuting circulant families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::linalg::{lu_solve, solve_right, DenseMatrix};
use crate::splitting::Splitting;

pub type InstanceRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonsingular M-matrix: off-diagonals in `(-1, 0]`, diagonal = off-diagonal row sum + U(0.1, 1).
pub fn random_m_matrix(rng: &mut impl Rng, n: usize) -> DenseMatrix {
    let mut a = DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { -rng.random_range(0.0..1.0) });
    for i in 0..n {
        let off: f64 = a.row(i).iter().map(|v| v.abs()).sum();
        a[(i, i)] = off + rng.random_range(0.1..1.0);
    }
    a
}

/// Entries uniform in `[0, scale)`.
pub fn random_nonneg(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(0.0..1.0) * scale)
}

/// Entries uniform in `[-scale, scale)`.
pub fn random_dense(rng: &mut impl Rng, n: usize, scale: f64) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0) * scale)
}

/// Nonnegative matrix rescaled to infinity norm `norm`.
fn nonneg_with_norm(rng: &mut impl Rng, n: usize, norm: f64) -> DenseMatrix {
    let h = random_nonneg(rng, n, n, 1.0);
    let s = h.norm_inf();
    if s == 0.0 {
        h
    } else {
        h.scale(norm / s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplittingKind {
    /// `U = A + N` with `N >= 0` keeping `U` a Z-matrix.
    Regular,
    /// `U = A (I - H)^-1`, so `U^-1 V = H >= 0`.
    TypeI,
    /// `U = (I - H)^-1 A`, so `V U^-1 = H >= 0`.
    TypeII,
}

/// A candidate splitting of `a` built to be of the given kind; callers should still classify it
/// (`U^-1 >= 0` is not guaranteed for the weak kinds when `H` is large).
pub fn candidate_splitting(rng: &mut impl Rng, a: &DenseMatrix, kind: SplittingKind, h_norm: f64) -> Result<Splitting> {
    let n = a.rows();
    match kind {
        SplittingKind::Regular => {
            let n_mat = DenseMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    rng.random_range(0.0..1.0)
                } else {
                    rng.random_range(0.0..1.0) * a[(i, j)].min(0.0).abs()
                }
            });
            Splitting::new(a.clone(), a.checked_add(&n_mat)?, n_mat)
        }
        SplittingKind::TypeI => {
            let eye = DenseMatrix::identity(n);
            let h = nonneg_with_norm(rng, n, h_norm);
            let u = solve_right(a, &eye.checked_sub(&h)?)?;
            let v = u.checked_sub(a)?;
            Splitting::new(a.clone(), u, v)
        }
        SplittingKind::TypeII => {
            let eye = DenseMatrix::identity(n);
            let h = nonneg_with_norm(rng, n, h_norm);
            let u = lu_solve(&eye.checked_sub(&h)?, a)?;
            let v = u.checked_sub(a)?;
            Splitting::new(a.clone(), u, v)
        }
    }
}

/// Outer splitting `A = U - V` and inner splitting `U = F - G`, all circulant, so every pair commutes.
#[derive(Debug, Clone)]
pub struct CirculantFamily {
    pub a: DenseMatrix,
    pub outer: Splitting,
    pub inner: Splitting,
}

fn circulant_from(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Nonnegative circulant row that keeps `U + G` a Z-matrix.
fn z_preserving_row(rng: &mut impl Rng, u_row: &[f64]) -> Vec<f64> {
    u_row
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let cap = if j == 0 { 0.5 * x } else { x.min(0.0).abs() };
            rng.random_range(0.0..1.0) * cap
        })
        .collect()
}

/// Random circulant family with `A` an M-matrix, outer regular and inner weak regular of type II.
///
/// With `scalar_u` the outer `U` is a multiple of the identity, which makes
/// `G >= G F^-1 G` hold for every type II inner splitting.
pub fn circulant_family(rng: &mut impl Rng, n: usize, scalar_u: bool) -> Result<CirculantFamily> {
    let cone = SimplicialCone::orthant(n);
    for _ in 0..200 {
        let v_row = circulant_from(rng, n, 0.0, 1.0);
        let v_sum: f64 = v_row.iter().sum();
        let mut u_row = if scalar_u {
            vec![0.0; n]
        } else {
            let mut r = circulant_from(rng, n, -1.0, 0.0);
            r[0] = 0.0;
            r
        };
        let off: f64 = u_row.iter().map(|x| x.abs()).sum();
        u_row[0] = off + v_sum + rng.random_range(0.1..1.0);
        let u = DenseMatrix::circulant(&u_row);
        let v = DenseMatrix::circulant(&v_row);
        let outer = Splitting::from_parts(u.clone(), v)?;

        let inner = if rng.random_bool(0.5) {
            let g = DenseMatrix::circulant(&z_preserving_row(rng, &u_row));
            Splitting::from_parts(u.checked_add(&g)?, g)?
        } else {
            let mut w_row = circulant_from(rng, n, 0.0, 1.0);
            let total: f64 = w_row.iter().sum();
            let target = rng.random_range(0.05..0.6);
            w_row.iter_mut().for_each(|x| *x *= target / total);
            let w = DenseMatrix::circulant(&w_row);
            let eye = DenseMatrix::identity(n);
            let f = lu_solve(&eye.checked_sub(&w)?, &u)?;
            let g = f.checked_sub(&u)?;
            Splitting::new(u.clone(), f, g)?
        };
        if inner.classify(&cone)?.weak_type2 {
            return Ok(CirculantFamily {
                a: outer.a().clone(),
                outer,
                inner,
            });
        }
    }
    Err(Error::InvalidConfig("no type II inner splitting found".into()))
}

/// A second type II inner splitting of the family's `U`, independent of the first.
pub fn another_inner(rng: &mut impl Rng, family: &CirculantFamily) -> Result<Splitting> {
    let n = family.a.rows();
    let cone = SimplicialCone::orthant(n);
    let u = family.outer.u();
    let u_row = u.row(0).to_vec();
    for _ in 0..200 {
        let inner = if rng.random_bool(0.5) {
            let g = DenseMatrix::circulant(&z_preserving_row(rng, &u_row));
            Splitting::from_parts(u.checked_add(&g)?, g)?
        } else {
            let mut w_row = circulant_from(rng, n, 0.0, 1.0);
            let total: f64 = w_row.iter().sum();
            let target = rng.random_range(0.05..0.6);
            w_row.iter_mut().for_each(|x| *x *= target / total);
            let eye = DenseMatrix::identity(n);
            let f = lu_solve(&eye.checked_sub(&DenseMatrix::circulant(&w_row))?, u)?;
            let g = f.checked_sub(u)?;
            Splitting::new(u.clone(), f, g)?
        };
        if inner.classify(&cone)?.weak_type2 {
            return Ok(inner);
        }
    }
    Err(Error::InvalidConfig("no type II inner splitting found".into()))
}
