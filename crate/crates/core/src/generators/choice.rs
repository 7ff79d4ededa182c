use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::serialize_rational;
use crate::error::{param, Result};
use crate::geometry::{integer, Point, Rational, Segment};
use crate::instance::{Instance, InstanceBuilder, Solution};

/// Sets of positive integers, each entirely below the next.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chain {
    pub sets: Vec<Vec<usize>>,
}

impl Chain {
    pub fn new(sets: Vec<Vec<usize>>) -> Chain {
        Chain { sets }
    }
}

/// Input of `gen choice`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiceInput {
    pub n: usize,
    pub chains: Vec<Chain>,
}

/// A gadget segment running from `after⁺` (or `0`) to `before⁻` (or `N + 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceSegment {
    pub index: usize,
    pub after: Option<usize>,
    pub before: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainMeta {
    pub sets: Vec<Vec<usize>>,
    pub segments: Vec<ChoiceSegment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceMeta {
    pub n: usize,
    pub ell: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub eps: Rational,
    /// The horizontal line carrying the gadget.
    #[serde(serialize_with = "serialize_rational")]
    pub y: Rational,
    pub zero: usize,
    /// `minus[i - 1]` is the index of the point `i - ε`.
    pub minus: Vec<usize>,
    pub integers: Vec<usize>,
    pub plus: Vec<usize>,
    pub chains: Vec<ChainMeta>,
}

impl ChoiceMeta {
    /// `N + 1 - 2ℓ/N²`, the length of a cover leaving out one transversal.
    pub fn transversal_length(&self) -> Rational {
        integer(self.n as i64 + 1) - integer(2 * self.ell as i64) * &self.eps
    }

    /// `N + 1 - 2/N`, the least length covering everything but the integers.
    pub fn lower_bound(&self) -> Rational {
        integer(self.n as i64 + 1) - integer(2) / integer(self.n as i64)
    }

    /// Indices of all points except the integers `1..=N`.
    pub fn non_integer_points(&self) -> Vec<usize> {
        let mut out = vec![self.zero];
        out.extend(&self.minus);
        out.extend(&self.plus);
        out.sort_unstable();
        out
    }
}

fn validate(n: usize, chains: &[Chain]) -> Result<usize> {
    let Some(first) = chains.first() else {
        return Ok(0);
    };
    let ell = first.sets.len();
    if ell == 0 {
        return Err(param("chains must have at least one set"));
    }
    let mut seen = HashSet::new();
    for (j, chain) in chains.iter().enumerate() {
        if chain.sets.len() != ell {
            return Err(param(format!(
                "chain {j} has {} sets, chain 0 has {ell}",
                chain.sets.len()
            )));
        }
        for (t, set) in chain.sets.iter().enumerate() {
            if set.is_empty() {
                return Err(param(format!("set {t} of chain {j} is empty")));
            }
            for &a in set {
                if a == 0 || a > n {
                    return Err(param(format!(
                        "element {a} of chain {j} is outside 1..={n}"
                    )));
                }
                if !seen.insert(a) {
                    return Err(param(format!("element {a} occurs in two chain sets")));
                }
            }
            if t > 0 {
                let prev_max = chain.sets[t - 1].iter().max().expect("nonempty");
                let min = set.iter().min().expect("nonempty");
                if prev_max >= min {
                    return Err(param(format!(
                        "chain {j}: set {} is not entirely below set {t}",
                        t - 1
                    )));
                }
            }
        }
    }
    Ok(ell)
}

/// Adds the gadget on the line `y`, weighting segments by their length when
/// `by_length` is set and by 1 otherwise.
pub(crate) fn add_choice_gadget(
    b: &mut InstanceBuilder,
    n: usize,
    chains: &[Chain],
    y: &Rational,
    by_length: bool,
    tag: &str,
) -> Result<ChoiceMeta> {
    let ell = validate(n, chains)?;
    let eps = Rational::new(1.into(), (n * n).into());
    let at = |x: Rational| Point::new(x, y.clone());
    let minus_x = |i: usize| integer(i as i64) - &eps;
    let plus_x = |i: usize| integer(i as i64) + &eps;

    let zero = b.add_point(at(integer(0)), format!("{tag}0"));
    let (mut minus, mut integers, mut plus) = (Vec::new(), Vec::new(), Vec::new());
    for i in 1..=n {
        minus.push(b.add_point(at(minus_x(i)), format!("{tag}{i}-")));
        integers.push(b.add_point(at(integer(i as i64)), format!("{tag}{i}")));
        plus.push(b.add_point(at(plus_x(i)), format!("{tag}{i}+")));
    }

    let mut chain_metas = Vec::new();
    for (j, chain) in chains.iter().enumerate() {
        let mut pairs: Vec<(Option<usize>, Option<usize>)> = Vec::new();
        pairs.extend(chain.sets[0].iter().map(|&a| (None, Some(a))));
        for t in 0..ell - 1 {
            for &a in &chain.sets[t] {
                pairs.extend(chain.sets[t + 1].iter().map(|&c| (Some(a), Some(c))));
            }
        }
        pairs.extend(chain.sets[ell - 1].iter().map(|&a| (Some(a), None)));
        let segments = pairs
            .into_iter()
            .map(|(after, before)| {
                let lo = after.map_or_else(|| integer(0), plus_x);
                let hi = before.map_or_else(|| integer(n as i64 + 1), minus_x);
                let weight = if by_length { &hi - &lo } else { integer(1) };
                let name = |e: Option<usize>, end: &str| {
                    e.map_or_else(|| end.to_string(), |v| v.to_string())
                };
                let label = format!(
                    "{tag}chain{j}[{},{}]",
                    name(after, "0"),
                    name(before, "N+1")
                );
                let index = b.add_segment(Segment::new(at(lo), at(hi)), weight, label);
                ChoiceSegment {
                    index,
                    after,
                    before,
                }
            })
            .collect();
        chain_metas.push(ChainMeta {
            sets: chain.sets.clone(),
            segments,
        });
    }

    Ok(ChoiceMeta {
        n,
        ell,
        eps,
        y: y.clone(),
        zero,
        minus,
        integers,
        plus,
        chains: chain_metas,
    })
}

/// The choice gadget on the x-axis with unit weights. Requires `N > 100`.
pub fn gen_choice(n: usize, chains: &[Chain]) -> Result<(Instance, ChoiceMeta)> {
    if n <= 100 {
        return Err(param(format!("the choice gadget needs N > 100, got {n}")));
    }
    gen_choice_unchecked_for_tests(n, chains)
}

/// Test-only: [`gen_choice`] without the `N > 100` requirement, for gadgets
/// small enough to enumerate.
#[doc(hidden)]
pub fn gen_choice_unchecked_for_tests(
    n: usize,
    chains: &[Chain],
) -> Result<(Instance, ChoiceMeta)> {
    if n == 0 {
        return Err(param("N must be positive"));
    }
    let mut b = InstanceBuilder::new();
    let meta = add_choice_gadget(&mut b, n, chains, &integer(0), false, "")?;
    Ok((b.build()?, meta))
}

/// The `ℓ + 1` segments of chain `j` that cover every gadget point except
/// the transversal `pick` (one element per set, in chain order).
pub fn build_choice_cover(
    instance: &Instance,
    meta: &ChoiceMeta,
    j: usize,
    pick: &[usize],
) -> Result<Solution> {
    let chain = meta
        .chains
        .get(j)
        .ok_or_else(|| param(format!("no chain {j}; there are {}", meta.chains.len())))?;
    if pick.len() != meta.ell {
        return Err(param(format!(
            "{} elements picked, chain has {} sets",
            pick.len(),
            meta.ell
        )));
    }
    for (t, (b, set)) in pick.iter().zip(&chain.sets).enumerate() {
        if !set.contains(b) {
            return Err(param(format!("{b} is not in set {t} of chain {j}")));
        }
    }
    let ends: Vec<Option<usize>> = std::iter::once(None)
        .chain(pick.iter().map(|&b| Some(b)))
        .chain(std::iter::once(None))
        .collect();
    let indices = ends
        .windows(2)
        .map(|w| {
            chain
                .segments
                .iter()
                .find(|s| s.after == w[0] && s.before == w[1])
                .map(|s| s.index)
                .ok_or_else(|| {
                    param(format!(
                        "chain {j} has no segment from {:?} to {:?}",
                        w[0], w[1]
                    ))
                })
        })
        .collect::<Result<Vec<usize>>>()?;
    Solution::from_indices(instance, indices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{axis_parallel_length, rational};
    use crate::instance::verify_cover;

    #[test]
    fn figure_example() {
        let (inst, meta) =
            gen_choice_unchecked_for_tests(8, &[Chain::new(vec![vec![3], vec![7]])]).unwrap();
        assert_eq!(inst.points().len(), 25);
        assert_eq!(inst.segments().len(), 3);
        let cover = build_choice_cover(&inst, &meta, 0, &[3, 7]).unwrap();
        assert_eq!(cover.len(), 3);
        let total: Rational = cover
            .indices()
            .iter()
            .map(|&i| axis_parallel_length(inst.segment(i)).unwrap())
            .sum();
        assert_eq!(total, rational(9 * 16 - 1, 16));
        assert_eq!(total, meta.transversal_length());
        let report = verify_cover(&inst, &cover, None).unwrap();
        let missing: Vec<usize> = vec![meta.integers[2], meta.integers[6]];
        assert_eq!(report.uncovered_points, missing);
    }

    #[test]
    fn no_chains_no_segments() {
        let (inst, meta) = gen_choice(101, &[]).unwrap();
        assert!(inst.segments().is_empty());
        assert_eq!(inst.points().len(), 1 + 3 * 101);
        assert_eq!(meta.ell, 0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(gen_choice(100, &[]).is_err());
        let c = |sets: Vec<Vec<usize>>| Chain::new(sets);
        assert!(gen_choice_unchecked_for_tests(8, &[c(vec![vec![3], vec![2]])]).is_err());
        assert!(gen_choice_unchecked_for_tests(8, &[c(vec![vec![3], vec![9]])]).is_err());
        assert!(gen_choice_unchecked_for_tests(8, &[c(vec![vec![3]]), c(vec![vec![3]])]).is_err());
        assert!(
            gen_choice_unchecked_for_tests(8, &[c(vec![vec![3]]), c(vec![vec![4], vec![5]])])
                .is_err()
        );
        assert!(gen_choice_unchecked_for_tests(8, &[c(vec![vec![], vec![5]])]).is_err());
        let (inst, meta) =
            gen_choice_unchecked_for_tests(8, &[c(vec![vec![1, 2], vec![5]])]).unwrap();
        assert!(build_choice_cover(&inst, &meta, 0, &[3, 5]).is_err());
        assert!(build_choice_cover(&inst, &meta, 0, &[1]).is_err());
        assert!(build_choice_cover(&inst, &meta, 1, &[1, 5]).is_err());
    }

    #[test]
    fn single_set_chain_uses_two_segments() {
        let (inst, meta) =
            gen_choice_unchecked_for_tests(8, &[Chain::new(vec![vec![2, 4]])]).unwrap();
        let cover = build_choice_cover(&inst, &meta, 0, &[4]).unwrap();
        assert_eq!(cover.len(), 2);
    }
}
