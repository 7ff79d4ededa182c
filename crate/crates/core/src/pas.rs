//! `(1 + ε)`-approximation for weighted segment set cover parameterized by `k`.
//!
//! For every candidate value `W` of the heaviest segment in an optimum, drop
//! heavier segments, round the remaining weights up to few distinct values
//! and run the exact branching solver on the rounded instance. Rounded
//! weights only steer the search; reported weights are original ones.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{param, Result};
use crate::fpt::Branching;
use crate::geometry::{integer, Rational};
use crate::instance::{Instance, Solution};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundedWeights {
    /// Rounded weight per segment of the input instance.
    pub weights: Vec<Rational>,
    /// The guessed heaviest weight `W`.
    pub heaviest: Rational,
    pub distinct_count: usize,
}

/// Number of geometric brackets `⌈log_{1+ε/2}(2k/ε)⌉`, by exact iteration.
pub fn bracket_count(k: usize, eps: &Rational) -> usize {
    let ratio = Rational::one() + eps / integer(2);
    let target = Rational::from_integer(BigInt::from(2 * k)) / eps;
    let mut power = Rational::one();
    let mut i = 0;
    while power < target {
        power *= &ratio;
        i += 1;
    }
    i
}

/// Rounds every weight `w` up: to `(ε/2k)·W` when `w <= (ε/2k)·W`, otherwise
/// to `W/(1+ε/2)^i` for the unique `i` with `W/(1+ε/2)^{i+1} < w <= W/(1+ε/2)^i`.
pub fn round_weights(
    instance: &Instance,
    heaviest: &Rational,
    k: usize,
    eps: &Rational,
) -> Result<RoundedWeights> {
    if !eps.is_positive() {
        return Err(param(format!("epsilon must be positive, got {eps}")));
    }
    if k == 0 {
        return Err(param("weight rounding needs k >= 1"));
    }
    if !heaviest.is_positive() {
        return Err(param(format!(
            "heaviest weight W must be positive, got {heaviest}"
        )));
    }
    let floor = eps / Rational::from_integer(BigInt::from(2 * k)) * heaviest;
    let ratio = Rational::one() + eps / integer(2);
    let mut weights = Vec::with_capacity(instance.segments().len());
    for (index, ws) in instance.segments().iter().enumerate() {
        let w = &ws.weight;
        if w > heaviest {
            return Err(param(format!(
                "segment {index} has weight {w} above the guessed heaviest weight {heaviest}"
            )));
        }
        if *w <= floor {
            weights.push(floor.clone());
            continue;
        }
        let mut bracket = heaviest.clone();
        loop {
            let lower = &bracket / &ratio;
            if *w > lower {
                break;
            }
            bracket = lower;
        }
        weights.push(bracket);
    }
    let distinct_count = weights.iter().collect::<BTreeSet<_>>().len();
    Ok(RoundedWeights {
        weights,
        heaviest: heaviest.clone(),
        distinct_count,
    })
}

/// A cover with at most `k` segments whose original weight is at most
/// `(1 + ε)` times the optimum, or `None` when no such cover exists.
pub fn solve_pas(instance: &Instance, k: usize, eps: &Rational) -> Result<Option<Solution>> {
    if !eps.is_positive() {
        return Err(param(format!("epsilon must be positive, got {eps}")));
    }
    if k == 0 {
        return Ok(instance.points().is_empty().then(Solution::empty));
    }
    let mut engine = Branching::new(instance, Vec::new());
    let mut best: Option<Solution> = None;
    for heaviest in instance.distinct_weights() {
        let family: Vec<usize> = (0..instance.segments().len())
            .filter(|&i| *instance.weight(i) <= heaviest)
            .collect();
        let search_weights = if heaviest.is_zero() {
            vec![Rational::zero(); instance.segments().len()]
        } else {
            let kept = instance.restrict_segments(&family);
            let rounded = round_weights(&kept, &heaviest, k, eps)?;
            let mut full = vec![Rational::zero(); instance.segments().len()];
            for (&i, w) in family.iter().zip(rounded.weights) {
                full[i] = w;
            }
            full
        };
        engine.set_weights(search_weights);
        let Some((_, indices)) = engine.solve(family, k) else {
            continue;
        };
        let candidate = Solution::from_indices(instance, indices)?;
        if best.as_ref().is_none_or(|b| candidate.better_than(b)) {
            best = Some(candidate);
        }
    }
    if best.is_none() && instance.points().is_empty() {
        best = Some(Solution::empty());
    }
    Ok(best)
}
