//! Exhaustive ground truth.
//!
//! Both searches branch only on segments that cover the lowest-index point
//! still uncovered: every cover contains such a segment, so nothing is lost,
//! and every inclusion-minimal cover is reachable.

use fixedbitset::FixedBitSet;
use num_traits::Zero;

use crate::geometry::Rational;
use crate::instance::{coverage_sets, Instance, Solution};

/// Minimum-weight cover of `target` using at most `k` of `candidates`.
///
/// Ties are broken by fewer segments, then by the lexicographically smallest
/// sorted index list. Returns the weight and the sorted indices.
pub(crate) fn best_cover(
    target: &FixedBitSet,
    candidates: &[usize],
    masks: &[FixedBitSet],
    weights: &[Rational],
    k: usize,
) -> Option<(Rational, Vec<usize>)> {
    let mut search = BestCover {
        candidates,
        masks,
        weights,
        k,
        chosen: Vec::with_capacity(k),
        best: None,
    };
    search.descend(target.clone(), Rational::zero());
    search.best
}

struct BestCover<'a> {
    candidates: &'a [usize],
    masks: &'a [FixedBitSet],
    weights: &'a [Rational],
    k: usize,
    chosen: Vec<usize>,
    best: Option<(Rational, Vec<usize>)>,
}

impl BestCover<'_> {
    fn descend(&mut self, uncovered: FixedBitSet, weight: Rational) {
        let Some(first) = uncovered.ones().next() else {
            let mut indices = self.chosen.clone();
            indices.sort_unstable();
            let better = match &self.best {
                None => true,
                Some((bw, bi)) => (&weight, indices.len(), &indices) < (bw, bi.len(), bi),
            };
            if better {
                self.best = Some((weight, indices));
            }
            return;
        };
        if self.chosen.len() == self.k {
            return;
        }
        for &s in self.candidates {
            if !self.masks[s].contains(first) || self.chosen.contains(&s) {
                continue;
            }
            let next_weight = &weight + &self.weights[s];
            if matches!(&self.best, Some((bw, _)) if next_weight > *bw) {
                continue;
            }
            let mut rest = uncovered.clone();
            rest.difference_with(&self.masks[s]);
            self.chosen.push(s);
            self.descend(rest, next_weight);
            self.chosen.pop();
        }
    }
}

/// Minimum-weight cover of all points with at most `k` segments, or `None`
/// when no such cover exists.
pub fn brute_force(instance: &Instance, k: usize) -> Option<Solution> {
    let masks = coverage_sets(instance);
    let weights: Vec<Rational> = instance
        .segments()
        .iter()
        .map(|s| s.weight.clone())
        .collect();
    let mut target = FixedBitSet::with_capacity(instance.points().len());
    target.insert_range(..);
    let candidates: Vec<usize> = (0..masks.len()).collect();
    best_cover(&target, &candidates, &masks, &weights, k)
        .map(|(_, indices)| Solution::from_indices(instance, indices).expect("indices in range"))
}

/// Smallest number `c <= limit` of masks whose union contains `target`.
pub fn min_cover_size(target: &FixedBitSet, masks: &[FixedBitSet], limit: usize) -> Option<usize> {
    (0..=limit).find(|&budget| coverable(target.clone(), masks, budget))
}

fn coverable(uncovered: FixedBitSet, masks: &[FixedBitSet], budget: usize) -> bool {
    let Some(first) = uncovered.ones().next() else {
        return true;
    };
    if budget == 0 {
        return false;
    }
    masks.iter().filter(|m| m.contains(first)).any(|m| {
        let mut rest = uncovered.clone();
        rest.difference_with(m);
        coverable(rest, masks, budget - 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{integer, Point, Segment};
    use crate::instance::WeightedSegment;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn bits(len: usize, ones: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(len);
        for &i in ones {
            b.insert(i);
        }
        b
    }

    #[test]
    fn empty_universe_needs_nothing() {
        let inst = Instance::unweighted(vec![], vec![Segment::new(pt(0, 0), pt(1, 0))]);
        let s = brute_force(&inst, 0).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.weight(), &integer(0));
    }

    #[test]
    fn pigeonhole_infeasible() {
        let pts = vec![pt(0, 0), pt(1, 0), pt(2, 0)];
        let segs = pts.iter().cloned().map(Segment::degenerate).collect();
        let inst = Instance::unweighted(pts, segs);
        assert!(brute_force(&inst, 2).is_none());
        assert_eq!(brute_force(&inst, 3).unwrap().len(), 3);
    }

    #[test]
    fn prefers_lighter_then_smaller() {
        let pts = vec![pt(0, 0), pt(2, 0)];
        let w = |a: (i64, i64), b: (i64, i64), w: i64| WeightedSegment {
            segment: Segment::new(pt(a.0, a.1), pt(b.0, b.1)),
            weight: integer(w),
        };
        let inst = Instance::new(
            pts,
            vec![
                w((0, 0), (2, 0), 3),
                w((0, 0), (0, 0), 1),
                w((2, 0), (2, 0), 1),
                w((0, 0), (2, 0), 2),
            ],
        )
        .unwrap();
        assert_eq!(brute_force(&inst, 1).unwrap().indices(), &[3]);
        // {1, 2} and {3} both weigh 2; the single segment wins.
        assert_eq!(brute_force(&inst, 2).unwrap().indices(), &[3]);
    }

    #[test]
    fn zero_weight_redundancy_is_not_preferred() {
        let pts = vec![pt(0, 0)];
        let inst = Instance::new(
            pts,
            vec![
                WeightedSegment {
                    segment: Segment::new(pt(5, 5), pt(6, 6)),
                    weight: integer(0),
                },
                WeightedSegment {
                    segment: Segment::degenerate(pt(0, 0)),
                    weight: integer(0),
                },
            ],
        )
        .unwrap();
        assert_eq!(brute_force(&inst, 2).unwrap().indices(), &[1]);
    }

    #[test]
    fn min_cover_size_basics() {
        assert_eq!(min_cover_size(&bits(4, &[]), &[], 0), Some(0));
        let masks = [
            bits(4, &[0, 1]),
            bits(4, &[1, 2]),
            bits(4, &[2, 3]),
            bits(4, &[3]),
        ];
        assert_eq!(min_cover_size(&bits(4, &[0, 1, 2, 3]), &masks, 4), Some(2));
        assert_eq!(min_cover_size(&bits(4, &[0, 1, 2, 3]), &masks, 1), None);
        assert_eq!(min_cover_size(&bits(5, &[4]), &masks, 3), None);
    }
}
