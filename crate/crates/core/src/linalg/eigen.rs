//! Eigenvalue estimation.
//!
//! Two independent routes to the spectral radius are provided:
//!
//! * [`perron_power`]: shifted power iteration for entrywise-nonnegative
//!   matrices. The shift `A + sI` makes the Perron root strictly dominant even
//!   for imprimitive matrices, and Collatz-Wielandt bounds give a certified
//!   stopping test whenever the iterate stays positive.
//! * [`eigenvalues`]: balancing, Householder reduction to Hessenberg form and
//!   the Francis double-shift QR iteration, returning every eigenvalue
//!   (complex pairs included).
//!
//! [`spectral_radius`] picks the power route for nonnegative input and falls
//! back to QR when the power iteration stalls (defective Perron root).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector, LuFactors};

/// Iteration cap for the power route.
pub const POWER_MAX_ITER: usize = 100_000;

const POWER_SEED: u64 = 0x7e0_57a6e;
const QR_MAX_ITS_PER_ROOT: usize = 60;

/// An eigenvalue `re + i im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Result of a power iteration: Perron root, a nonnegative eigenvector with unit infinity norm.
#[derive(Debug, Clone)]
pub struct PerronPair {
    pub value: f64,
    pub vector: DenseVector,
    pub iterations: usize,
}

fn require_square(a: &DenseMatrix, op: &'static str) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::dims(op, "square matrix", format!("{}x{}", a.rows(), a.cols())))
    }
}

/// Spectral radius `max |lambda|` to relative accuracy `tol`.
pub fn spectral_radius(a: &DenseMatrix, tol: f64) -> Result<f64> {
    require_square(a, "spectral_radius")?;
    if a.is_entrywise_nonneg(0.0) {
        match perron_power(a, tol, POWER_MAX_ITER) {
            Ok(pair) => return Ok(pair.value),
            Err(Error::NoConvergence { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    spectral_radius_qr(a)
}

/// Spectral radius from the full QR eigenvalue computation.
pub fn spectral_radius_qr(a: &DenseMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?
        .iter()
        .map(Eigenvalue::modulus)
        .fold(0.0, f64::max))
}

/// Spectral radius by power iteration; `a` must be entrywise nonnegative.
pub fn spectral_radius_power(a: &DenseMatrix, tol: f64) -> Result<f64> {
    Ok(perron_power(a, tol, POWER_MAX_ITER)?.value)
}

/// Perron root and eigenvector of an entrywise-nonnegative matrix.
///
/// Two starts are tried (uniform, then seeded random), each with half the
/// iteration budget. On failure the error carries the best estimate.
pub fn perron_power(a: &DenseMatrix, tol: f64, max_iter: usize) -> Result<PerronPair> {
    require_square(a, "perron_power")?;
    if !a.is_entrywise_nonneg(0.0) {
        return Err(Error::HypothesisMismatch(
            "power iteration requires an entrywise nonnegative matrix".into(),
        ));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(PerronPair {
            value: 0.0,
            vector: DenseVector::zeros(0),
            iterations: 0,
        });
    }
    let norm = a.norm_inf();
    if norm == 0.0 {
        let mut v = DenseVector::zeros(n);
        v[0] = 1.0;
        return Ok(PerronPair {
            value: 0.0,
            vector: v,
            iterations: 0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let budget = (max_iter / 2).max(1);
    let mut best = f64::NAN;
    let mut used = 0;
    for attempt in 0..2 {
        let start: Vec<f64> = if attempt == 0 {
            vec![1.0; n]
        } else {
            (0..n).map(|_| rng.random_range(0.5..1.5)).collect()
        };
        match power_run(a, 0.1 * norm, start, tol, budget) {
            Ok(mut pair) => {
                pair.iterations += used;
                return Ok(pair);
            }
            Err((estimate, its)) => {
                best = estimate;
                used += its;
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: used,
        best,
    })
}

fn power_run(
    a: &DenseMatrix,
    shift: f64,
    mut x: Vec<f64>,
    tol: f64,
    budget: usize,
) -> std::result::Result<PerronPair, (f64, usize)> {
    let n = a.rows();
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(*v));
    x.iter_mut().for_each(|v| *v /= scale);

    let mut y = vec![0.0; n];
    let mut prev_lambda = f64::NAN;
    let mut prev_delta = f64::NAN;
    let mut calm_steps = 0;
    let mut estimate = f64::NAN;

    for it in 1..=budget {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = a.row(i).iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() + shift * x[i];
        }
        let lambda = y.iter().fold(0.0_f64, |m, v| m.max(*v));
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err((estimate, it));
        }

        // Collatz-Wielandt: min_i (Bx)_i/x_i <= rho(B) <= max_i (Bx)_i/x_i for x > 0.
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        let mut positive = true;
        for (yi, xi) in y.iter().zip(&x) {
            if *xi <= 0.0 {
                positive = false;
                break;
            }
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }

        let mut step = 0.0_f64;
        for (xi, yi) in x.iter_mut().zip(&y) {
            let next = yi / lambda;
            step = step.max((next - *xi).abs());
            *xi = next;
        }
        estimate = lambda - shift;
        let target = tol * estimate.abs().max(f64::MIN_POSITIVE);

        if positive && hi - lo <= target {
            return Ok(PerronPair {
                value: (0.5 * (hi + lo) - shift).max(0.0),
                vector: DenseVector::from_vec(x),
                iterations: it,
            });
        }

        // Geometric tail estimate from the contraction of successive changes.
        let delta = (lambda - prev_lambda).abs();
        let ratio = delta / prev_delta;
        let settled = if delta == 0.0 && step <= tol {
            true
        } else if ratio.is_finite() && ratio < 1.0 {
            let tail = ratio / (1.0 - ratio);
            delta * tail <= target && step * tail <= tol.sqrt().min(1e-6)
        } else {
            false
        };
        calm_steps = if settled { calm_steps + 1 } else { 0 };
        if calm_steps >= 3 {
            return Ok(PerronPair {
                value: estimate.max(0.0),
                vector: DenseVector::from_vec(x),
                iterations: it,
            });
        }
        prev_delta = delta;
        prev_lambda = lambda;
    }
    Err((estimate, budget))
}

/// All eigenvalues of a general real square matrix.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Eigenvalue>> {
    require_square(a, "eigenvalues")?;
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hqr(&mut h)
}

/// Diagonal similarity scaling by powers of two so row and column norms are comparable.
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = a.rows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (in place, similarity preserved).
fn hessenberg(a: &mut DenseMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let alpha_norm = (k + 1..n).map(|i| a[(i, k)].powi(2)).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = if x0 >= 0.0 { -alpha_norm } else { alpha_norm };
        for (idx, i) in (k + 1..n).enumerate() {
            v[idx] = a[(i, k)];
        }
        v[0] -= alpha;
        let vnorm = v[..m].iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v[..m].iter_mut().for_each(|x| *x /= vnorm);

        // H = (I - 2vv^T) applied from the left to rows k+1.., then from the right to cols k+1..
        for j in 0..n {
            let s: f64 = (0..m).map(|idx| v[idx] * a[(k + 1 + idx, j)]).sum();
            for idx in 0..m {
                a[(k + 1 + idx, j)] -= 2.0 * v[idx] * s;
            }
        }
        for i in 0..n {
            let s: f64 = (0..m).map(|idx| a[(i, k + 1 + idx)] * v[idx]).sum();
            for idx in 0..m {
                a[(i, k + 1 + idx)] -= 2.0 * s * v[idx];
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; destroys `a`.
fn hqr(a: &mut DenseMatrix) -> Result<Vec<Eigenvalue>> {
    let n = a.rows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }

    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let mut total_its = 0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let (mut p, mut q, mut r): (f64, f64, f64);
            // Find the lowest negligible subdiagonal element.
            let mut l = nu;
            while l >= 1 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() + s == s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }

            if its == QR_MAX_ITS_PER_ROOT {
                let best = wr
                    .iter()
                    .zip(&wi)
                    .skip(nu + 1)
                    .map(|(re, im)| re.hypot(*im))
                    .fold(0.0, f64::max);
                return Err(Error::NoConvergence {
                    iterations: total_its,
                    best,
                });
            }
            if its > 0 && its % 10 == 0 {
                // Exceptional shift.
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_its += 1;

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            let mut z;
            loop {
                z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=nn and columns m..=nn.
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != nu - 1 { a[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = a[(k, j)] + q * a[(k + 1, j)];
                        if k != nu - 1 {
                            p += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= p * z;
                        }
                        a[(k + 1, j)] -= p * y;
                        a[(k, j)] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k != nu - 1 {
                            p += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= p * r;
                        }
                        a[(i, k + 1)] -= p * q;
                        a[(i, k)] -= p;
                    }
                }
                k += 1;
            }
            if l + 1 >= nu {
                break;
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Eigenvalue { re, im })
        .collect())
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    require_square(a, "symmetric_eigenvalues")?;
    let n = a.rows();
    let mut m = a.clone();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = sign(1.0, theta) / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev = m.diagonal();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

/// 2-norm condition number `sigma_max / sigma_min` from the eigenvalues of `A^T A`.
pub fn condition_number_2(a: &DenseMatrix) -> Result<f64> {
    LuFactors::new(a)?;
    let ata = a.transpose().matmul(a)?;
    let ev = symmetric_eigenvalues(&ata)?;
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    if lo <= 0.0 {
        return Err(Error::SingularMatrix {
            column: 0,
            pivot: lo,
            threshold: 0.0,
        });
    }
    Ok((hi / lo).sqrt())
}
