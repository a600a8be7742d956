//! Seeded random elements and constructed members of the strata.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Algebra, AlgebraContext, Family};
use crate::error::{GzError, Result};
use crate::linalg::{matrix_exp, CMat, CVec, C64};

pub type GzRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> GzRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `k` derived from `seed`.
pub fn sub_seed(seed: u64, k: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian, E|z|² = 1.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, scale: f64) -> CVec {
    CVec::from_iterator(len, (0..len).map(|_| complex_gaussian(rng) * scale))
}

/// Element with independent complex Gaussian basis coordinates.
pub fn random_element<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R, scale: f64) -> CMat {
    alg.from_coords(&gaussian_vector(rng, alg.dim(), scale))
}

/// exp of a random element of g_i embedded in the top algebra.
pub fn random_group_element<R: Rng + ?Sized>(
    ctx: &AlgebraContext,
    i: usize,
    rng: &mut R,
    scale: f64,
) -> Result<CMat> {
    let alg = ctx.level(i)?.algebra();
    let y = random_element(alg, rng, scale);
    Ok(matrix_exp(&ctx.embed(i, &y)?))
}

/// Point uniformly distributed in the annulus r_lo ≤ |z| ≤ r_hi.
pub fn annulus_point<R: Rng + ?Sized>(rng: &mut R, r_lo: f64, r_hi: f64) -> C64 {
    let r = rng.random_range(r_lo..r_hi);
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(r, phi)
}

/// ε-values for every level of an orthogonal chain such that consecutive
/// spectra {±λ} are separated by at least `gap`. Levels in `nilpotent` get all zeros.
pub fn separated_spectra<R: Rng + ?Sized>(
    ctx: &AlgebraContext,
    nilpotent: &[usize],
    gap: f64,
    rng: &mut R,
) -> Result<Vec<Vec<C64>>> {
    if ctx.family() != Family::Orthogonal {
        return Err(GzError::NotOrthogonal);
    }
    for &i in nilpotent {
        if i % 2 == 1 || i < 4 || i >= ctx.n() {
            return Err(GzError::Invalid(format!("level {i} cannot be made nilpotent")));
        }
        if nilpotent.contains(&(i + 1)) || nilpotent.contains(&(i - 1)) {
            return Err(GzError::Invalid("adjacent nilpotent levels share spectrum 0".into()));
        }
    }
    let mut out: Vec<Vec<C64>> = Vec::new();
    for lvl in ctx.levels() {
        let i = lvl.index();
        let r = lvl.algebra().rank();
        if nilpotent.contains(&i) {
            out.push(vec![C64::new(0.0, 0.0); r]);
            continue;
        }
        let prev: Vec<C64> = out.last().cloned().unwrap_or_default();
        let prev_zero = prev.iter().any(|z| z.norm() == 0.0);
        let mut eps: Vec<C64> = Vec::with_capacity(r);
        let mut tries = 0;
        while eps.len() < r {
            tries += 1;
            if tries > 10_000 {
                return Err(GzError::Numerical("could not place separated eigenvalues".into()));
            }
            let z = annulus_point(rng, 0.5, 1.5);
            let clash = |w: &C64| (z - w).norm() < gap || (z + w).norm() < gap;
            if prev.iter().any(clash) || eps.iter().any(clash) {
                continue;
            }
            if prev_zero && z.norm() < gap {
                continue;
            }
            eps.push(z);
        }
        out.push(eps);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|k| sub_seed(7, k)).collect();
        let b: Vec<u64> = (0..4).map(|k| sub_seed(7, k)).collect();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] != w[1]));
        let mut r1 = rng_from_seed(5);
        let mut r2 = rng_from_seed(5);
        assert_eq!(complex_gaussian(&mut r1), complex_gaussian(&mut r2));
    }

    #[test]
    fn random_elements_are_members() {
        let mut rng = rng_from_seed(1);
        for n in 2..=8 {
            let g = Algebra::new(Family::Orthogonal, n).unwrap();
            let x = random_element(&g, &mut rng, 1.0);
            assert!(g.check_member(&x).is_ok());
        }
    }

    #[test]
    fn separated_spectra_respect_gaps() {
        let ctx = AlgebraContext::new(Family::Orthogonal, 7).unwrap();
        let mut rng = rng_from_seed(2);
        let s = separated_spectra(&ctx, &[4, 6], 0.1, &mut rng).unwrap();
        assert_eq!(s.len(), 6);
        assert!(s[2].iter().all(|z| z.norm() == 0.0));
        assert!(separated_spectra(&ctx, &[5], 0.1, &mut rng).is_err());
    }
}
