//! Eigenvalues of small real matrices: Gaussian-elimination reduction to
//! upper Hessenberg form followed by the Francis double-shift QR iteration.

use alloc::vec::Vec;

use thiserror::Error;

use crate::math::{self, SquareMatrix};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EigenError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("QR iteration did not converge")]
    NoConvergence,
    #[error("matrix is empty")]
    Empty,
}

const MAX_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Dense working copy with 1-based indexing.
struct Work {
    n: usize,
    a: Vec<f64>,
}

impl Work {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[(i - 1) * self.n + (j - 1)]
    }

    #[inline]
    fn put(&mut self, i: usize, j: usize, v: f64) {
        self.a[(i - 1) * self.n + (j - 1)] = v;
    }

    #[inline]
    fn sub(&mut self, i: usize, j: usize, v: f64) {
        self.a[(i - 1) * self.n + (j - 1)] -= v;
    }

    fn swap(&mut self, i1: usize, j1: usize, i2: usize, j2: usize) {
        let t = self.at(i1, j1);
        self.put(i1, j1, self.at(i2, j2));
        self.put(i2, j2, t);
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

fn hessenberg(w: &mut Work) {
    let n = w.n;
    for m in 2..n {
        let mut x = 0.0f64;
        let mut i = m;
        for j in m..=n {
            if w.at(j, m - 1).abs() > x.abs() {
                x = w.at(j, m - 1);
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                w.swap(i, j, m, j);
            }
            for j in 1..=n {
                w.swap(j, i, j, m);
            }
        }
        if x != 0.0 {
            for i in (m + 1)..=n {
                let mut y = w.at(i, m - 1);
                if y != 0.0 {
                    y /= x;
                    w.put(i, m - 1, y);
                    for j in m..=n {
                        let v = y * w.at(m, j);
                        w.sub(i, j, v);
                    }
                    for j in 1..=n {
                        let v = y * w.at(j, i);
                        w.put(j, m, w.at(j, m) + v);
                    }
                }
            }
        }
    }
    // Discard the elimination multipliers stored below the subdiagonal.
    for i in 3..=n {
        for j in 1..(i - 1) {
            w.put(i, j, 0.0);
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix as `(re, im)` pairs.
fn hessenberg_qr(w: &mut Work) -> Result<Vec<(f64, f64)>, EigenError> {
    let n = w.n;
    let mut wr = alloc::vec![0.0; n + 1];
    let mut wi = alloc::vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += w.at(i, j).abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let (mut x, mut y, mut z): (f64, f64, f64);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = w.at(l - 1, l - 1).abs() + w.at(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if w.at(l, l - 1).abs() + s == s {
                    w.put(l, l - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            x = w.at(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                y = w.at(nn - 1, nn - 1);
                let ww = w.at(nn, nn - 1) * w.at(nn - 1, nn);
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + ww;
                    z = math::sqrt(q.abs());
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - ww / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITERATIONS_PER_EIGENVALUE {
                        return Err(EigenError::NoConvergence);
                    }
                    let mut ww = ww;
                    if its == 10 || its == 20 {
                        // Exceptional shift.
                        t += x;
                        for i in 1..=nn {
                            w.sub(i, i, x);
                        }
                        let s = w.at(nn, nn - 1).abs() + w.at(nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        ww = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = w.at(m, m);
                        let rr = x - z;
                        let s = y - z;
                        p = (rr * s - ww) / w.at(m + 1, m) + w.at(m, m + 1);
                        q = w.at(m + 1, m + 1) - z - rr - s;
                        r = w.at(m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = w.at(m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (w.at(m - 1, m - 1).abs() + z.abs() + w.at(m + 1, m + 1).abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        w.put(i, i - 2, 0.0);
                        if i != m + 2 {
                            w.put(i, i - 3, 0.0);
                        }
                    }
                    let mut k = m;
                    while k + 1 <= nn {
                        if k != m {
                            p = w.at(k, k - 1);
                            q = w.at(k + 1, k - 1);
                            r = 0.0;
                            if k != nn - 1 {
                                r = w.at(k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign(math::sqrt(p * p + q * q + r * r), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    w.put(k, k - 1, -w.at(k, k - 1));
                                }
                            } else {
                                w.put(k, k - 1, -s * x);
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = w.at(k, j) + q * w.at(k + 1, j);
                                if k != nn - 1 {
                                    p += r * w.at(k + 2, j);
                                    w.sub(k + 2, j, p * z);
                                }
                                w.sub(k + 1, j, p * y);
                                w.sub(k, j, p * x);
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * w.at(i, k) + y * w.at(i, k + 1);
                                if k != nn - 1 {
                                    p += z * w.at(i, k + 2);
                                    w.sub(i, k + 2, p * r);
                                }
                                w.sub(i, k + 1, p * q);
                                w.sub(i, k, p);
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| (wr[i], wi[i])).collect())
}

/// All eigenvalues as `(real, imaginary)` pairs, in no particular order.
pub fn eigenvalues(matrix: &SquareMatrix) -> Result<Vec<(f64, f64)>, EigenError> {
    let n = matrix.dim();
    if n == 0 {
        return Err(EigenError::Empty);
    }
    if matrix.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    let mut w = Work {
        n,
        a: matrix.as_slice().to_vec(),
    };
    hessenberg(&mut w);
    hessenberg_qr(&mut w)
}

/// Smallest real part over the spectrum.
pub fn min_eigenvalue(matrix: &SquareMatrix) -> Result<f64, EigenError> {
    Ok(eigenvalues(matrix)?
        .into_iter()
        .map(|(re, _)| re)
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> SquareMatrix {
        SquareMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn small_cases() {
        assert_eq!(min_eigenvalue(&m(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap(), 1.0);
        assert!((min_eigenvalue(&m(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap() + 1.0).abs() < 1e-15);
        assert!(min_eigenvalue(&m(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap().abs() < 1e-15);
        assert_eq!(min_eigenvalue(&m(&[&[2.5]])).unwrap(), 2.5);
    }

    #[test]
    fn rotation_has_complex_pair() {
        let ev = eigenvalues(&m(&[&[0.0, -1.0], &[1.0, 0.0]])).unwrap();
        for (re, im) in ev {
            assert!(re.abs() < 1e-15);
            assert!((im.abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn triangular_diagonal() {
        let a = m(&[&[3.0, 1.0, 4.0], &[0.0, -2.0, 5.0], &[0.0, 0.0, 7.0]]);
        let mut ev: Vec<f64> = eigenvalues(&a).unwrap().into_iter().map(|e| e.0).collect();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([-2.0, 3.0, 7.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_rejected() {
        assert_eq!(
            min_eigenvalue(&m(&[&[f64::NAN]])),
            Err(EigenError::NonFinite)
        );
    }
}
