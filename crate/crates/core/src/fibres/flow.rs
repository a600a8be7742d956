use crate::algebra::AlgebraContext;
use crate::error::Result;
use crate::invariants::gz_gradient;
use crate::linalg::{matrix_exp, CMat, C64};

/// x(t) = Ad(exp(t ∇f_{i,j}(x)))·x. The gradient is constant along its own flow, so this
/// is the exact Hamiltonian flow of f_{i,j}.
pub fn gz_flow(ctx: &AlgebraContext, x: &CMat, index: (usize, usize), t: f64) -> Result<CMat> {
    let (i, j) = index;
    let g = gz_gradient(ctx, x, i, j)? * C64::new(t, 0.0);
    let a = matrix_exp(&g);
    let ainv = matrix_exp(&(-g));
    let y = a * x * ainv;
    // drop rounding drift out of g
    let top = ctx.top();
    Ok(top.from_coords(&top.coords(&y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Family;
    use crate::invariants::{kw_map, slots};
    use crate::linalg::max_abs;
    use crate::sampling::{random_element, rng_from_seed};

    #[test]
    fn time_zero_is_identity_and_values_are_conserved() {
        let ctx = AlgebraContext::new(Family::Orthogonal, 6).unwrap();
        let mut rng = rng_from_seed(6);
        let x = random_element(ctx.top(), &mut rng, 0.15);
        let phi = kw_map(&ctx, &x).unwrap();
        for s in slots(&ctx) {
            assert!(max_abs(&(gz_flow(&ctx, &x, (s.level, s.j), 0.0).unwrap() - &x)) < 1e-15);
            for t in [0.1, 1.0, 10.0] {
                let y = gz_flow(&ctx, &x, (s.level, s.j), t).unwrap();
                let d = kw_map(&ctx, &y).unwrap().max_abs_diff(&phi);
                assert!(d < 1e-8, "slot {s:?} t {t}: {d:e}");
            }
        }
    }

    #[test]
    fn flows_commute() {
        let ctx = AlgebraContext::new(Family::Orthogonal, 5).unwrap();
        let mut rng = rng_from_seed(7);
        let x = random_element(ctx.top(), &mut rng, 0.3);
        let a = (3, 1);
        let b = (4, 2);
        let ab = gz_flow(&ctx, &gz_flow(&ctx, &x, a, 1.0).unwrap(), b, 1.0).unwrap();
        let ba = gz_flow(&ctx, &gz_flow(&ctx, &x, b, 1.0).unwrap(), a, 1.0).unwrap();
        assert!(max_abs(&(ab - ba)) < 1e-7);
    }
}
