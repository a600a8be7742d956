use crate::algebra::{AlgebraContext, Family};
use crate::error::{GzError, Result};
use crate::invariants::kw_map;
use crate::linalg::{elementary_from_power_sums, max_abs_vec, CMat, C64, ONE, ZERO};

/// Upper Hessenberg with every subdiagonal entry equal to 1.
pub fn is_unit_hessenberg(h: &CMat) -> bool {
    let n = h.nrows();
    (0..n).all(|r| (0..n).all(|c| if r == c + 1 { h[(r, c)] == ONE } else { r <= c + 1 || h[(r, c)] == ZERO }))
}

/// Monic characteristic polynomial (coefficients low → high) from power sums p_1..p_i.
fn char_poly_from_power_sums(p: &[C64]) -> Vec<C64> {
    let i = p.len();
    let e = elementary_from_power_sums(p);
    let mut poly = vec![ZERO; i + 1];
    poly[i] = ONE;
    for (k, ek) in e.iter().enumerate() {
        let k = k + 1;
        poly[i - k] = if k % 2 == 0 { *ek } else { -*ek };
    }
    poly
}

/// The unique unit upper Hessenberg matrix H with Φ(H) = c. Corner i is fixed by the
/// level-i values: with p_k the characteristic polynomial of corner k,
/// p_i = (λ − h_ii) p_{i−1} − Σ_{k<i} h_{ki} p_{k−1}, which is triangular in column i.
pub fn hessenberg_section(ctx: &AlgebraContext, c: &[C64]) -> Result<CMat> {
    if ctx.family() != Family::GeneralLinear {
        return Err(GzError::NotGeneralLinear);
    }
    if c.len() != ctx.gz_count() {
        return Err(GzError::TargetLength { expected: ctx.gz_count(), got: c.len() });
    }
    let n = ctx.n();
    let mut h = CMat::zeros(n, n);
    for r in 1..n {
        h[(r, r - 1)] = ONE;
    }
    // corner polynomials p_0 .. p_n
    let mut polys: Vec<Vec<C64>> = vec![vec![ONE]];
    let mut offset = 0;
    for i in 1..=n {
        let target = char_poly_from_power_sums(&c[offset..offset + i]);
        offset += i;
        // rem = λ p_{i−1} − p_i, of degree ≤ i−1
        let mut rem = vec![ZERO; i + 1];
        for (k, v) in polys[i - 1].iter().enumerate() {
            rem[k + 1] += v;
        }
        for (k, v) in target.iter().enumerate() {
            rem[k] -= v;
        }
        // expand rem in the monic basis p_{i−1}, …, p_0; the coefficient of p_{k−1} is h_{k,i}
        for k in (1..=i).rev() {
            let coef = rem[k - 1];
            h[(k - 1, i - 1)] = coef;
            for (m, v) in polys[k - 1].iter().enumerate() {
                rem[m] -= coef * v;
            }
        }
        polys.push(target);
    }
    let got = kw_map(ctx, &h)?.values;
    let diff: Vec<C64> = got.iter().zip(c).map(|(a, b)| a - b).collect();
    let res = max_abs_vec(&diff);
    if res > 1e-9 * max_abs_vec(c).max(1.0) {
        return Err(GzError::Numerical(format!("Hessenberg section residual {res:.3e}")));
    }
    Ok(h)
}
