//! Numeric tail bounds: a parametric Janson bound for families of forest
//! copies, the exponential Janson form, a hypergeometric lower-tail Chernoff
//! bound, and union-bound composition.
//!
//! All bounds are evaluated in log-space and clamped to `[0, 1]`.

use serde::Serialize;

/// Name of the generic Janson variant, recorded in every report.
pub const JANSON_GENERIC_VARIANT: &str = "exp(-lambda + delta_bar/2)";
pub const JANSON_FOREST_VARIANT: &str = "2^(-c_F rho^2 p n^2) [c_F parametric]";
pub const CHERNOFF_VARIANT: &str = "exp(-t^2 mu / 2) [lower tail]";
pub const UNION_VARIANT: &str = "min(1, sum)";

/// A bound together with the exponent it was computed from.
///
/// `exponent` is the natural logarithm of the unclamped bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub bound: f64,
    pub exponent: f64,
    pub variant: &'static str,
}

impl Bound {
    fn from_ln(ln: f64, variant: &'static str) -> Self {
        let bound = if ln >= 0.0 { 1.0 } else { ln.exp() };
        Self {
            bound,
            exponent: ln,
            variant,
        }
    }
}

/// Formats a probability with six significant digits.
pub fn format_probability(p: f64) -> String {
    format!("{p:.5e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JansonForestInput {
    pub rho: f64,
    pub p: f64,
    pub n: f64,
    /// The constant is left free; 1 by default.
    pub c_f: f64,
}

impl JansonForestInput {
    pub fn new(rho: f64, p: f64, n: f64) -> Self {
        Self { rho, p, n, c_f: 1.0 }
    }
}

/// `min(1, 2^{-c_F ρ² p n²})`: probability that `G(n, p)` misses every copy of
/// a forest from a family of density `ρ`.
pub fn janson_forest_bound(input: &JansonForestInput) -> Bound {
    assert!(input.rho > 0.0 && input.c_f > 0.0, "rho and c_F must be positive");
    let ln = -input.c_f * input.rho * input.rho * input.p * input.n * input.n * std::f64::consts::LN_2;
    Bound::from_ln(ln, JANSON_FOREST_VARIANT)
}

/// The augmentation constant `2 / (c_F ρ²)` at which the parametric bound
/// drops to `4^{-n}` for `p = C/n`.
pub fn implied_augmentation_constant(rho: f64, c_f: f64) -> f64 {
    2.0 / (c_f * rho * rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JansonGenericInput {
    /// Expected number of copies.
    pub lambda: f64,
    /// Sum of `P(A_i ∧ A_j)` over ordered dependent pairs `i ≠ j`.
    pub delta_bar: f64,
}

/// `min(1, exp(−λ + Δ̄/2))`.
pub fn janson_generic_bound(input: &JansonGenericInput) -> Bound {
    assert!(input.lambda >= 0.0 && input.delta_bar >= 0.0, "lambda and delta_bar must be non-negative");
    Bound::from_ln(-input.lambda + input.delta_bar / 2.0, JANSON_GENERIC_VARIANT)
}

/// `exp(−t²μ/2)`, bounding `P(X ≤ (1−t)μ)` for a hypergeometric (or
/// binomial) `X` with mean `μ`.
pub fn chernoff_hypergeometric(mu: f64, t: f64) -> Bound {
    assert!(mu >= 0.0, "mean must be non-negative");
    assert!((0.0..1.0).contains(&t), "deviation fraction must lie in [0,1)");
    Bound::from_ln(-t * t * mu / 2.0, CHERNOFF_VARIANT)
}

/// `min(1, Σ parts)`.
pub fn union_bound(parts: &[f64]) -> Bound {
    assert!(parts.iter().all(|p| (0.0..=1.0).contains(p)), "probabilities must lie in [0,1]");
    let sum: f64 = parts.iter().sum();
    Bound {
        bound: sum.min(1.0),
        exponent: if sum > 0.0 { sum.ln() } else { f64::NEG_INFINITY },
        variant: UNION_VARIANT,
    }
}

/// Janson inputs for a family of edge sets in `G(n, p)`: copies are events
/// "all edges of the set present", two copies are dependent when they share
/// an edge.
pub fn janson_inputs_for_family(family: &[Vec<(usize, usize)>], p: f64) -> JansonGenericInput {
    let prob = |edges: usize| p.powi(edges as i32);
    let lambda = family.iter().map(|f| prob(f.len())).sum();
    let mut delta_bar = 0.0;
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate() {
            if i == j {
                continue;
            }
            let shared = a.iter().filter(|e| b.contains(e)).count();
            if shared > 0 {
                delta_bar += prob(a.len() + b.len() - shared);
            }
        }
    }
    JansonGenericInput { lambda, delta_bar }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forest_bound_values() {
        let b = janson_forest_bound(&JansonForestInput {
            rho: 1.0,
            p: 1.0,
            n: 1.0,
            c_f: 1.0,
        });
        assert!((b.bound - 0.5).abs() < 1e-15);
        let b = janson_forest_bound(&JansonForestInput::new(1.0, 0.0, 50.0));
        assert_eq!(b.bound, 1.0);
        // far below f64's subnormal range, still finite in log-space
        let b = janson_forest_bound(&JansonForestInput::new(1.0, 1.0, 1e4));
        assert_eq!(b.bound, 0.0);
        assert!(b.exponent.is_finite());
    }

    #[test]
    fn forest_bound_is_monotone() {
        let base = JansonForestInput {
            rho: 0.3,
            p: 0.1,
            n: 20.0,
            c_f: 0.5,
        };
        let b0 = janson_forest_bound(&base).bound;
        for bumped in [
            JansonForestInput { rho: 0.4, ..base },
            JansonForestInput { p: 0.2, ..base },
            JansonForestInput { n: 21.0, ..base },
            JansonForestInput { c_f: 0.6, ..base },
        ] {
            assert!(janson_forest_bound(&bumped).bound < b0);
        }
    }

    #[test]
    fn generic_bound_values() {
        let b = janson_generic_bound(&JansonGenericInput {
            lambda: 3.0,
            delta_bar: 0.0,
        });
        assert!((b.bound - (-3.0f64).exp()).abs() < 1e-15);
        let b = janson_generic_bound(&JansonGenericInput {
            lambda: 0.0,
            delta_bar: 5.0,
        });
        assert_eq!(b.bound, 1.0);
        assert_eq!(b.variant, JANSON_GENERIC_VARIANT);
    }

    #[test]
    fn chernoff_values() {
        assert_eq!(chernoff_hypergeometric(100.0, 0.0).bound, 1.0);
        let b = chernoff_hypergeometric(200.0, 0.5);
        assert!((b.bound - (-25.0f64).exp()).abs() < 1e-20);
    }

    #[test]
    fn union_values() {
        assert!((union_bound(&[0.1, 0.2]).bound - 0.3).abs() < 1e-15);
        assert_eq!(union_bound(&[1.0, 1.0]).bound, 1.0);
        assert_eq!(union_bound(&[]).bound, 0.0);
    }

    #[test]
    fn implied_constant() {
        assert_eq!(implied_augmentation_constant(0.5, 2.0), 4.0);
    }

    #[test]
    fn family_inputs_for_disjoint_edges() {
        let fam = vec![vec![(0, 1)], vec![(2, 3)]];
        let inp = janson_inputs_for_family(&fam, 0.5);
        assert_eq!(inp.lambda, 1.0);
        assert_eq!(inp.delta_bar, 0.0);
        let fam = vec![vec![(0, 1), (1, 2)], vec![(1, 2), (2, 0)]];
        let inp = janson_inputs_for_family(&fam, 0.5);
        assert_eq!(inp.lambda, 0.5);
        assert_eq!(inp.delta_bar, 2.0 * 0.125);
    }
}
