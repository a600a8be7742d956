//! Pfaffians of skew-symmetric complex matrices.

use crate::linalg::{CMat, C64, ONE, ZERO};

/// Pfaffian by expansion along the first row; exponential cost, used for 2l ≤ 6.
pub fn pfaffian_expansion(a: &CMat) -> C64 {
    let idx: Vec<usize> = (0..a.nrows()).collect();
    expand(a, &idx)
}

fn expand(a: &CMat, idx: &[usize]) -> C64 {
    match idx.len() {
        0 => ONE,
        m if m % 2 == 1 => ZERO,
        2 => a[(idx[0], idx[1])],
        _ => {
            let first = idx[0];
            let mut acc = ZERO;
            for k in 1..idx.len() {
                let v = a[(first, idx[k])];
                if v == ZERO {
                    continue;
                }
                let rest: Vec<usize> = idx[1..].iter().copied().filter(|&j| j != idx[k]).collect();
                let term = v * expand(a, &rest);
                if k % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

/// Pfaffian by pivoted skew Gaussian elimination to tridiagonal form.
pub fn pfaffian_tridiagonal(a: &CMat) -> C64 {
    let n = a.nrows();
    if n % 2 == 1 {
        return ZERO;
    }
    let mut a = a.clone();
    let mut pf = ONE;
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = a[(k + 1, k)].norm();
        for r in k + 2..n {
            let v = a[(r, k)].norm();
            if v > best {
                best = v;
                kp = r;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)];
        if pivot == ZERO {
            return ZERO;
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<C64> = (k + 2..n).map(|c| a[(k, c)] / pivot).collect();
            let col: Vec<C64> = (k + 2..n).map(|r| a[(r, k + 1)]).collect();
            for (ri, r) in (k + 2..n).enumerate() {
                for (ci, c) in (k + 2..n).enumerate() {
                    a[(r, c)] += tau[ri] * col[ci] - col[ri] * tau[ci];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Dispatches on size: expansion up to 6×6, elimination beyond.
pub fn pfaffian_skew(a: &CMat) -> C64 {
    if a.nrows() <= 6 {
        pfaffian_expansion(a)
    } else {
        pfaffian_tridiagonal(a)
    }
}

/// ∂Pf/∂A_{pq} for p < q, returned as the skew matrix C with Σ_{p<q} C_pq dA_pq = dPf.
pub fn pfaffian_cofactors(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut c = CMat::zeros(n, n);
    for p in 0..n {
        for q in p + 1..n {
            let keep: Vec<usize> = (0..n).filter(|&j| j != p && j != q).collect();
            let minor = a.select_rows(&keep).select_columns(&keep);
            let v = pfaffian_skew(&minor);
            let v = if (p + q) % 2 == 1 { v } else { -v };
            c[(p, q)] = v;
            c[(q, p)] = -v;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{complex_gaussian, rng_from_seed};

    fn random_skew(n: usize, seed: u64) -> CMat {
        let mut rng = rng_from_seed(seed);
        let mut a = CMat::zeros(n, n);
        for p in 0..n {
            for q in p + 1..n {
                let z = complex_gaussian(&mut rng);
                a[(p, q)] = z;
                a[(q, p)] = -z;
            }
        }
        a
    }

    #[test]
    fn small_cases() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = C64::new(3.0, 1.0);
        a[(1, 0)] = -a[(0, 1)];
        assert_eq!(pfaffian_skew(&a), C64::new(3.0, 1.0));
        // Pf of the 4x4 block: a12 a34 - a13 a24 + a14 a23
        let a = random_skew(4, 9);
        let want = a[(0, 1)] * a[(2, 3)] - a[(0, 2)] * a[(1, 3)] + a[(0, 3)] * a[(1, 2)];
        assert!((pfaffian_expansion(&a) - want).norm() < 1e-14);
        assert!((pfaffian_tridiagonal(&a) - want).norm() < 1e-13);
    }

    #[test]
    fn methods_agree_and_square_to_determinant() {
        for (k, n) in [2usize, 4, 6, 8].iter().enumerate() {
            let a = random_skew(*n, 100 + k as u64);
            let e = pfaffian_expansion(&a);
            let t = pfaffian_tridiagonal(&a);
            assert!((e - t).norm() < 1e-11 * e.norm().max(1.0), "n = {n}");
            let det = a.clone().determinant();
            assert!((t * t - det).norm() < 1e-10 * det.norm().max(1.0));
        }
    }

    #[test]
    fn cofactors_match_finite_differences() {
        let a = random_skew(6, 4);
        let c = pfaffian_cofactors(&a);
        let h = 1e-6;
        for p in 0..6 {
            for q in p + 1..6 {
                let mut ap = a.clone();
                ap[(p, q)] += h;
                ap[(q, p)] -= h;
                let mut am = a.clone();
                am[(p, q)] -= h;
                am[(q, p)] += h;
                let fd = (pfaffian_skew(&ap) - pfaffian_skew(&am)) / (2.0 * h);
                assert!((fd - c[(p, q)]).norm() < 1e-7);
            }
        }
    }
}
