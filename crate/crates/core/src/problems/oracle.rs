use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::poly::{PopInstance, Sense, VarDomain};

/// Largest instance [`brute_force`] enumerates exhaustively.
pub const MAX_ENUMERATION_VARS: usize = 20;

/// Best objective value found by [`brute_force`].
#[derive(Clone, Debug, PartialEq)]
pub struct BruteForce {
    /// `None` when no feasible point was found.
    pub value: Option<f64>,
    pub point: Option<Vec<f64>>,
    /// True when every feasible point was examined.
    pub exact: bool,
}

fn better(sense: Sense, a: f64, b: f64) -> bool {
    match sense {
        Sense::Max => a > b,
        Sense::Min => a < b,
    }
}

fn discrete_point(domains: &[VarDomain], mask: u64) -> Vec<f64> {
    domains
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let bit = mask >> i & 1 == 1;
            match d {
                VarDomain::PlusMinusOne => {
                    if bit {
                        -1.0
                    } else {
                        1.0
                    }
                }
                _ => f64::from(u8::from(bit)),
            }
        })
        .collect()
}

/// Optimum of a POP whose variables are all ±1 or binary, by enumeration (parallel over
/// chunks of the `2ⁿ` assignments). Other instances, or instances above
/// [`MAX_ENUMERATION_VARS`] variables, fall back to seeded random sampling of `samples`
/// points with box and discrete domains honored and free variables drawn from
/// `[-1, 1]`; the result is then flagged inexact.
pub fn brute_force(pop: &PopInstance, samples: usize, seed: u64, tol: f64) -> BruteForce {
    let n = pop.nvars;
    let all_discrete = pop.domains.iter().all(|d| d.is_discrete());
    if all_discrete && n <= MAX_ENUMERATION_VARS {
        let best = (0..1u64 << n)
            .into_par_iter()
            .filter_map(|mask| {
                let x = discrete_point(&pop.domains, mask);
                pop.is_feasible(&x, tol).then(|| (pop.value(&x), mask))
            })
            .reduce_with(|a, b| {
                if better(pop.sense, b.0, a.0) || (a.0 == b.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            });
        return BruteForce {
            value: best.map(|b| b.0),
            point: best.map(|b| discrete_point(&pop.domains, b.1)),
            exact: true,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..samples {
        let x: Vec<f64> = pop
            .domains
            .iter()
            .map(|d| match *d {
                VarDomain::Free => rng.random_range(-1.0..=1.0),
                VarDomain::Box { lo, hi } => rng.random_range(lo..=hi),
                VarDomain::PlusMinusOne => {
                    if rng.random::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
                VarDomain::Binary => f64::from(u8::from(rng.random::<bool>())),
            })
            .collect();
        if !pop.is_feasible(&x, tol) {
            continue;
        }
        let v = pop.value(&x);
        if best.as_ref().is_none_or(|b| better(pop.sense, v, b.0)) {
            best = Some((v, x));
        }
    }
    BruteForce {
        value: best.as_ref().map(|b| b.0),
        point: best.map(|b| b.1),
        exact: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{encode_maxcut, encode_miqcp, GraphInstance, QuadInstance};
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn cycle_and_bqp() {
        let r = brute_force(&encode_maxcut(&GraphInstance::cycle(4)), 0, 0, 1e-9);
        assert_eq!(r.value, Some(4.0));
        assert!(r.exact);
        let q = DMatrix::from_row_slice(2, 2, &[0.0, -0.5, -0.5, 0.0]);
        let mut inst = QuadInstance::new("bqp", Sense::Min, q, DVector::from_vec(vec![-1.0, -1.0]));
        inst.integer = vec![true; 2];
        inst.a_eq = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        inst.b_eq = DVector::from_vec(vec![1.0]);
        let r = brute_force(&encode_miqcp(&inst).unwrap(), 0, 0, 1e-9);
        assert_eq!(r.value, Some(-1.0));
    }

    #[test]
    fn sampling_is_flagged() {
        let g = GraphInstance::random("r", 24, 0.2, false, 1);
        let r = brute_force(&encode_maxcut(&g), 2000, 3, 1e-9);
        assert!(!r.exact && r.value.is_some());
        assert_eq!(r, brute_force(&encode_maxcut(&g), 2000, 3, 1e-9));
    }
}
