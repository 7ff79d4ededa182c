//! Branching solver for weighted segment set cover parameterized by the
//! solution size `k` and the number `q` of distinct weights.
//!
//! Each node of the search
//! 1. drops segments that are dominated (same weight, coverage contained in
//!    another segment's coverage), leaving a *reasonable* family;
//! 2. if some line carries at least `k + 1` remaining points, branches on the
//!    at most `q·k` segments of a hitting set that every small cover meets;
//! 3. otherwise gives up when more than `k²` points remain, since no segment
//!    can cover more than `k` of them;
//! 4. otherwise solves the (now tiny) rest exhaustively.
//!
//! Points with identical coordinates are treated as one location.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use fixedbitset::FixedBitSet;
use num_traits::Zero;

use crate::error::{param, Error, Result};
use crate::geometry::{collinear_with, Line, Point, Rational, Segment};
use crate::instance::{coverage_sets, Instance, Solution};
use crate::oracle::best_cover;

/// An instance after exhaustive removal of dominated segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReasonableInstance {
    pub instance: Instance,
    /// `kept[j]` is the original index of the `j`-th surviving segment.
    pub kept: Vec<usize>,
}

/// Instrumentation gathered by [`solve_fpt_with_stats`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: usize,
    /// Deepest branching level reached (never exceeds `k`).
    pub max_depth: usize,
    pub max_children: usize,
    /// Whether every branching node had at most `q·k` children, `q` being the
    /// number of distinct weights among segments collinear with the branching line.
    pub branching_within_bound: bool,
}

/// One representative index per distinct point location (first occurrence).
pub(crate) fn distinct_locations(points: &[Point]) -> FixedBitSet {
    let mut seen = HashSet::new();
    let mut reps = FixedBitSet::with_capacity(points.len());
    for (j, p) in points.iter().enumerate() {
        if seen.insert(p) {
            reps.insert(j);
        }
    }
    reps
}

/// Lines spanned by pairs of the given points, each with the set of given
/// points on it. The points must have pairwise distinct locations.
pub(crate) fn spanned_lines(
    points: &[Point],
    subset: &FixedBitSet,
) -> BTreeMap<Line, BTreeSet<usize>> {
    let idx: Vec<usize> = subset.ones().collect();
    let mut lines: BTreeMap<Line, BTreeSet<usize>> = BTreeMap::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            let line = Line::through(&points[i], &points[j]).expect("distinct locations");
            let on = lines.entry(line).or_default();
            on.insert(i);
            on.insert(j);
        }
    }
    lines
}

/// The line with the most points among those with at least `min_points`,
/// ties broken by the canonical coefficient order.
fn richest_line(points: &[Point], subset: &FixedBitSet, min_points: usize) -> Option<Line> {
    let lines = spanned_lines(points, subset);
    let mut best: Option<(usize, &Line)> = None;
    for (line, on) in &lines {
        if on.len() >= min_points && best.is_none_or(|(n, _)| on.len() > n) {
            best = Some((on.len(), line));
        }
    }
    if let Some((_, line)) = best {
        return Some(line.clone());
    }
    // A lone location lies on infinitely many lines; the horizontal one is
    // canonically smallest.
    let mut ones = subset.ones();
    match (ones.next(), ones.next()) {
        (Some(j), None) if min_points <= 1 => {
            let p = &points[j];
            Some(
                Line::from_coefficients(
                    Rational::zero(),
                    Rational::from_integer(1.into()),
                    -p.y.clone(),
                )
                .expect("nonzero normal"),
            )
        }
        _ => None,
    }
}

/// A line containing at least `k + 1` distinct points of the instance, or `None`.
pub fn find_long_line(instance: &Instance, k: usize) -> Option<Line> {
    let reps = distinct_locations(instance.points());
    richest_line(instance.points(), &reps, k + 1)
}

pub fn reduce_reasonable(instance: &Instance) -> ReasonableInstance {
    let masks = coverage_sets(instance);
    let weights: Vec<Rational> = instance
        .segments()
        .iter()
        .map(|s| s.weight.clone())
        .collect();
    let all: Vec<usize> = (0..masks.len()).collect();
    let mut universe = FixedBitSet::with_capacity(instance.points().len());
    universe.insert_range(..);
    let kept = reasonable_family(&universe, &all, &masks, &weights);
    ReasonableInstance {
        instance: instance.restrict_segments(&kept),
        kept,
    }
}

/// Survivors of the domination rule on the coverage restricted to `remaining`.
/// `A` is dropped when some other `B` has the same weight and covers a
/// superset; among equal coverages the lowest index survives.
fn reasonable_family(
    remaining: &FixedBitSet,
    family: &[usize],
    masks: &[FixedBitSet],
    weights: &[Rational],
) -> Vec<usize> {
    let cover: Vec<FixedBitSet> = family
        .iter()
        .map(|&s| {
            let mut m = masks[s].clone();
            m.grow(remaining.len());
            m.intersect_with(remaining);
            m
        })
        .collect();
    family
        .iter()
        .enumerate()
        .filter(|&(a, &sa)| {
            !family.iter().enumerate().any(|(b, &sb)| {
                a != b
                    && weights[sa] == weights[sb]
                    && cover[a].is_subset(&cover[b])
                    && (cover[a] != cover[b] || sb < sa)
            })
        })
        .map(|(_, &s)| s)
        .collect()
}

/// Segments of `family` collinear with `line` that cover `x_i` but not
/// `x_{i-1}`, for `i = 1..=k`, where `x_1 < x_2 < …` are the remaining points
/// on the line in lexicographic order.
fn hitting_set(
    points: &[Point],
    segments: &[&Segment],
    remaining: &FixedBitSet,
    family: &[usize],
    masks: &[FixedBitSet],
    line: &Line,
    k: usize,
) -> Vec<usize> {
    let mut on_line: Vec<usize> = remaining
        .ones()
        .filter(|&j| line.contains(&points[j]))
        .collect();
    on_line.sort_by(|&a, &b| points[a].cmp(&points[b]));
    let collinear: Vec<usize> = family
        .iter()
        .copied()
        .filter(|&s| collinear_with(segments[s], line))
        .collect();
    let mut chosen = BTreeSet::new();
    for i in 0..k.min(on_line.len()) {
        for &s in &collinear {
            let covers_here = masks[s].contains(on_line[i]);
            let covers_prev = i > 0 && masks[s].contains(on_line[i - 1]);
            if covers_here && !covers_prev {
                chosen.insert(s);
            }
        }
    }
    chosen.into_iter().collect()
}

/// The hitting set `ℛ` for a reasonable instance and a line with at least
/// `k + 1` of its points: every cover of size at most `k` uses a member.
/// Indices refer to `ri.instance`.
pub fn hitting_candidates(ri: &ReasonableInstance, line: &Line, k: usize) -> Result<Vec<usize>> {
    let points = ri.instance.points();
    let reps = distinct_locations(points);
    let on = reps.ones().filter(|&j| line.contains(&points[j])).count();
    if on < k + 1 {
        return Err(param(format!(
            "line {line} carries {on} distinct points, at least {} required",
            k + 1
        )));
    }
    let masks = coverage_sets(&ri.instance);
    let segments: Vec<&Segment> = ri.instance.segments().iter().map(|s| &s.segment).collect();
    let family: Vec<usize> = (0..segments.len()).collect();
    Ok(hitting_set(
        points, &segments, &reps, &family, &masks, line, k,
    ))
}

pub(crate) struct Branching<'a> {
    points: &'a [Point],
    segments: Vec<&'a Segment>,
    masks: Vec<FixedBitSet>,
    weights: Vec<Rational>,
    pub(crate) stats: SearchStats,
}

impl<'a> Branching<'a> {
    /// Search engine over `instance`'s geometry with the given per-segment weights.
    pub(crate) fn new(instance: &'a Instance, weights: Vec<Rational>) -> Self {
        Branching {
            points: instance.points(),
            segments: instance.segments().iter().map(|s| &s.segment).collect(),
            masks: coverage_sets(instance),
            weights,
            stats: SearchStats {
                branching_within_bound: true,
                ..SearchStats::default()
            },
        }
    }

    pub(crate) fn set_weights(&mut self, weights: Vec<Rational>) {
        self.weights = weights;
    }

    /// Minimum-weight cover of all point locations using at most `k` members of `family`.
    pub(crate) fn solve(&mut self, family: Vec<usize>, k: usize) -> Option<(Rational, Vec<usize>)> {
        let remaining = distinct_locations(self.points);
        self.node(remaining, family, k, 0)
    }

    fn node(
        &mut self,
        remaining: FixedBitSet,
        family: Vec<usize>,
        k: usize,
        depth: usize,
    ) -> Option<(Rational, Vec<usize>)> {
        self.stats.nodes += 1;
        if remaining.is_clear() {
            return Some((Rational::zero(), Vec::new()));
        }
        if k == 0 {
            return None;
        }
        let family = reasonable_family(&remaining, &family, &self.masks, &self.weights);

        if let Some(line) = richest_line(self.points, &remaining, k + 1) {
            let candidates = hitting_set(
                self.points,
                &self.segments,
                &remaining,
                &family,
                &self.masks,
                &line,
                k,
            );
            let q = family
                .iter()
                .filter(|&&s| collinear_with(self.segments[s], &line))
                .map(|&s| &self.weights[s])
                .collect::<BTreeSet<_>>()
                .len();
            self.stats.max_depth = self.stats.max_depth.max(depth + 1);
            self.stats.max_children = self.stats.max_children.max(candidates.len());
            if candidates.len() > q * k {
                self.stats.branching_within_bound = false;
            }

            let mut best: Option<(Rational, Vec<usize>)> = None;
            for s in candidates {
                let mut rest = remaining.clone();
                rest.difference_with(&self.masks[s]);
                let sub_family: Vec<usize> = family.iter().copied().filter(|&t| t != s).collect();
                if let Some((w, mut idx)) = self.node(rest, sub_family, k - 1, depth + 1) {
                    let w = w + &self.weights[s];
                    idx.push(s);
                    idx.sort_unstable();
                    let better = match &best {
                        None => true,
                        Some((bw, bi)) => (&w, idx.len(), &idx) < (bw, bi.len(), bi),
                    };
                    if better {
                        best = Some((w, idx));
                    }
                }
            }
            return best;
        }

        if remaining.count_ones(..) > k * k {
            return None;
        }
        best_cover(&remaining, &family, &self.masks, &self.weights, k)
    }
}

/// Minimum-weight cover with at most `k` segments, or `None` if none exists.
pub fn solve_fpt(instance: &Instance, k: usize) -> Option<Solution> {
    solve_fpt_with_stats(instance, k).0
}

pub fn solve_fpt_with_stats(instance: &Instance, k: usize) -> (Option<Solution>, SearchStats) {
    let weights = instance
        .segments()
        .iter()
        .map(|s| s.weight.clone())
        .collect();
    let mut engine = Branching::new(instance, weights);
    let family = (0..instance.segments().len()).collect();
    let answer = engine
        .solve(family, k)
        .map(|(_, idx)| Solution::from_indices(instance, idx).expect("indices in range"));
    (answer, engine.stats)
}

/// The unweighted case: all segments must carry the same weight.
pub fn solve_unweighted(instance: &Instance, k: usize) -> Result<Option<Solution>> {
    let distinct = instance.distinct_weights();
    if distinct.len() > 1 {
        return Err(Error::Parameter(format!(
            "unweighted solver needs equal weights, found {} distinct values",
            distinct.len()
        )));
    }
    Ok(solve_fpt(instance, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::integer;
    use crate::instance::WeightedSegment;
    use crate::oracle::brute_force;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn ws(a: (i64, i64), b: (i64, i64), w: i64) -> WeightedSegment {
        WeightedSegment {
            segment: Segment::new(pt(a.0, a.1), pt(b.0, b.1)),
            weight: integer(w),
        }
    }

    #[test]
    fn identical_segments_keep_lowest_index() {
        let inst = Instance::new(
            vec![pt(0, 0), pt(1, 0)],
            vec![ws((0, 0), (1, 0), 1), ws((0, 0), (1, 0), 1)],
        )
        .unwrap();
        let ri = reduce_reasonable(&inst);
        assert_eq!(ri.kept, vec![0]);
    }

    #[test]
    fn domination_needs_equal_weight() {
        let pts = vec![pt(0, 0), pt(1, 0), pt(2, 0)];
        let same = Instance::new(
            pts.clone(),
            vec![ws((0, 0), (1, 0), 2), ws((0, 0), (2, 0), 2)],
        )
        .unwrap();
        assert_eq!(reduce_reasonable(&same).kept, vec![1]);
        let cheaper =
            Instance::new(pts, vec![ws((0, 0), (1, 0), 1), ws((0, 0), (2, 0), 2)]).unwrap();
        assert_eq!(reduce_reasonable(&cheaper).kept, vec![0, 1]);
    }

    #[test]
    fn long_line_on_axis() {
        let k = 3;
        let pts: Vec<Point> = (0..k as i64 + 2)
            .map(|x| pt(x, 0))
            .chain([pt(0, 7)])
            .collect();
        let inst = Instance::unweighted(pts, vec![]);
        let l = find_long_line(&inst, k).unwrap();
        assert_eq!(l, Line::through(&pt(0, 0), &pt(1, 0)).unwrap());
    }

    #[test]
    fn no_long_line_in_general_position() {
        let inst = Instance::unweighted(vec![pt(0, 0), pt(1, 3), pt(4, 1), pt(7, 7)], vec![]);
        assert!(find_long_line(&inst, 2).is_none());
    }

    #[test]
    fn duplicate_points_count_once() {
        let inst = Instance::unweighted(
            vec![pt(0, 0), pt(0, 0), pt(0, 0)],
            vec![Segment::degenerate(pt(0, 0))],
        );
        assert!(find_long_line(&inst, 1).is_none());
        assert_eq!(solve_fpt(&inst, 1).unwrap().indices(), &[0]);
    }

    #[test]
    fn hitting_candidates_hand_trace() {
        let pts: Vec<Point> = (0..4).map(|x| pt(x, 0)).collect();
        let inst = Instance::unweighted(
            pts,
            vec![
                Segment::new(pt(0, 0), pt(3, 0)),
                Segment::new(pt(1, 0), pt(3, 0)),
            ],
        );
        let ri = reduce_reasonable(&inst);
        // [1,3] is covered by [0,3] but both have weight 1, so [1,3] is dominated.
        assert_eq!(ri.kept, vec![0]);

        // Distinct weights keep both; the hand trace gives R_1 = {[0,3]}, R_2 = {[1,3]}.
        let inst = Instance::new(
            (0..4).map(|x| pt(x, 0)).collect(),
            vec![ws((0, 0), (3, 0), 1), ws((1, 0), (3, 0), 2)],
        )
        .unwrap();
        let ri = reduce_reasonable(&inst);
        assert_eq!(ri.kept, vec![0, 1]);
        let x_axis = Line::through(&pt(0, 0), &pt(1, 0)).unwrap();
        assert_eq!(hitting_candidates(&ri, &x_axis, 2).unwrap(), vec![0, 1]);
        assert!(hitting_candidates(&ri, &x_axis, 4).is_err());
    }

    #[test]
    fn single_point_single_segment() {
        let inst = Instance::new(vec![pt(0, 0)], vec![ws((-1, 0), (1, 0), 5)]).unwrap();
        assert_eq!(solve_fpt(&inst, 1).unwrap().weight(), &integer(5));
    }

    #[test]
    fn too_many_scattered_points() {
        // k = 2, k² + 1 = 5 points with no three collinear.
        let pts = vec![pt(0, 0), pt(1, 3), pt(4, 1), pt(7, 8), pt(2, 9)];
        let mut segs = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                segs.push(Segment::new(pts[i].clone(), pts[j].clone()));
            }
        }
        let inst = Instance::unweighted(pts, segs);
        assert!(find_long_line(&inst, 2).is_none());
        assert!(solve_fpt(&inst, 2).is_none());
        assert!(brute_force(&inst, 2).is_none());
    }

    #[test]
    fn unweighted_rejects_mixed_weights() {
        let inst = Instance::new(
            vec![pt(0, 0)],
            vec![ws((0, 0), (1, 0), 1), ws((0, 0), (0, 1), 2)],
        )
        .unwrap();
        assert!(solve_unweighted(&inst, 1).is_err());
        let uni = Instance::unweighted(vec![pt(0, 0)], vec![Segment::new(pt(0, 0), pt(1, 0))]);
        assert_eq!(solve_unweighted(&uni, 1).unwrap().unwrap().len(), 1);
    }

    #[test]
    fn branching_matches_brute_force_on_a_line() {
        let pts: Vec<Point> = (0..7).map(|x| pt(x, 0)).chain([pt(3, 4)]).collect();
        let inst = Instance::new(
            pts,
            vec![
                ws((0, 0), (3, 0), 3),
                ws((2, 0), (6, 0), 4),
                ws((4, 0), (6, 0), 1),
                ws((0, 0), (2, 0), 1),
                ws((3, 0), (3, 4), 2),
                ws((3, 4), (3, 4), 1),
                ws((0, 0), (6, 0), 9),
            ],
        )
        .unwrap();
        for k in 0..=4 {
            let (fpt, stats) = solve_fpt_with_stats(&inst, k);
            let brute = brute_force(&inst, k);
            assert_eq!(
                fpt.as_ref().map(|s| s.weight().clone()),
                brute.as_ref().map(|s| s.weight().clone()),
                "k = {k}"
            );
            assert!(stats.max_depth <= k);
            assert!(stats.branching_within_bound);
        }
    }
}
