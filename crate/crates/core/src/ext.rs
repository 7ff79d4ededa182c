//! Weighted segment set cover with `δ`-extension: the chosen segments only
//! have to cover the points after each is stretched by the factor `1 + δ`,
//! but their weight is compared against the unstretched optimum.
//!
//! The solver shrinks the universe to a kernel. Points off every long line
//! are kept; on each long line only a dense subset survives, small enough
//! that the kernel has at most `k² + k·(2 + 4/δ)^k` points. Segments are cut
//! down to one cheapest representative per pair of kernel points, and the
//! kernel is solved exhaustively.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::error::{param, Result};
use crate::fpt::{distinct_locations, spanned_lines};
use crate::geometry::{ceil, check_delta, integer, Line, Point, Rational, Segment};
use crate::instance::{coverage_sets, Instance, Labels, Solution, WeightedSegment};
use crate::oracle::brute_force;

/// Points on a common line, stored by their one-dimensional coordinate
/// along it (see [`Line::parameter`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollinearSet {
    line: Line,
    coords: Vec<Rational>,
}

impl CollinearSet {
    /// Sorts the points along `line` and merges coinciding ones.
    pub fn new(line: Line, points: &[Point]) -> Result<CollinearSet> {
        if let Some(off) = points.iter().find(|t| !line.contains(t)) {
            return Err(param(format!("point {off} is not on {line}")));
        }
        let coords: BTreeSet<Rational> = points.iter().map(|t| line.parameter(t)).collect();
        Ok(CollinearSet {
            line,
            coords: coords.into_iter().collect(),
        })
    }

    /// Like [`CollinearSet::new`] with the line taken from the points
    /// themselves; a single location gets the horizontal line through it.
    pub fn from_points(points: &[Point]) -> Result<CollinearSet> {
        let (lo, hi) = match (points.iter().min(), points.iter().max()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => {
                return Err(param(
                    "a collinear set needs at least one point to fix its line",
                ))
            }
        };
        let line = if lo == hi {
            Line::from_coefficients(Rational::zero(), Rational::one(), -lo.y.clone())?
        } else {
            Line::through(lo, hi)?
        };
        CollinearSet::new(line, points)
    }

    pub fn line(&self) -> &Line {
        &self.line
    }

    /// Strictly increasing coordinates.
    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn points(&self) -> Vec<Point> {
        self.coords.iter().map(|t| self.line.point_at(t)).collect()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn contains(&self, t: &Point) -> bool {
        self.line.contains(t) && self.coords.binary_search(&self.line.parameter(t)).is_ok()
    }

    fn subset(&self, keep: BTreeSet<usize>) -> CollinearSet {
        CollinearSet {
            line: self.line.clone(),
            coords: keep.into_iter().map(|i| self.coords[i].clone()).collect(),
        }
    }
}

/// `(2 + 4/δ)^k`, the size bound of a dense subset.
pub fn dense_size_bound(k: usize, delta: &Rational) -> Rational {
    (integer(2) + integer(4) / delta).pow(k)
}

/// A subset `A ⊆ C` such that any at most `k` segments covering `A`, once
/// `δ`-extended, cover all of `C`. Contains the extreme points of `C` and has
/// at most `(2 + 4/δ)^k` elements.
pub fn dense_subset(c: &CollinearSet, k: usize, delta: &Rational) -> Result<CollinearSet> {
    check_delta(delta)?;
    if k == 0 {
        return Err(param("dense subsets need k >= 1"));
    }
    let pieces = ceil(&(Rational::one() + integer(4) / delta));
    let mut keep = BTreeSet::new();
    dense_rec(&c.coords, 0, k, &pieces, &mut keep);
    Ok(c.subset(keep))
}

fn dense_rec(
    coords: &[Rational],
    offset: usize,
    k: usize,
    pieces: &BigInt,
    keep: &mut BTreeSet<usize>,
) {
    if coords.len() <= 1 {
        keep.extend(offset..offset + coords.len());
        return;
    }
    if k == 1 {
        keep.insert(offset);
        keep.insert(offset + coords.len() - 1);
        return;
    }
    let lo = &coords[0];
    let width = (&coords[coords.len() - 1] - lo) / Rational::from_integer(pieces.clone());
    let mut start = 0;
    let mut i = BigInt::zero();
    while &i < pieces {
        let left = lo + &width * Rational::from_integer(i.clone());
        let right = &left + &width;
        while start < coords.len() && coords[start] < left {
            start += 1;
        }
        let end = start + coords[start..].iter().take_while(|t| **t <= right).count();
        if end > start {
            dense_rec(&coords[start..end], offset + start, k - 1, pieces, keep);
        }
        i += 1;
    }
}

/// Exhaustive check that `a` is `(k, δ)`-dense in `c`, for small inputs.
///
/// Shrinking a segment shrinks its extension, so it suffices to try covers
/// whose segments run between points of `a` and split `a` into consecutive
/// blocks.
pub fn density_check(c: &CollinearSet, a: &CollinearSet, k: usize, delta: &Rational) -> bool {
    assert!(check_delta(delta).is_ok(), "delta must be positive");
    let cs = c.points();
    let ap = a.points();
    let mut chosen = Vec::new();
    blocks_extend_to(&ap, 0, k, delta, &cs, &mut chosen)
}

fn blocks_extend_to(
    a: &[Point],
    start: usize,
    budget: usize,
    delta: &Rational,
    c: &[Point],
    chosen: &mut Vec<Segment>,
) -> bool {
    if start == a.len() {
        return c
            .iter()
            .all(|t| chosen.iter().any(|s| s.extension_contains(delta, t)));
    }
    if budget == 0 {
        return true;
    }
    (start..a.len()).all(|end| {
        chosen.push(Segment::new(a[start].clone(), a[end].clone()));
        let ok = blocks_extend_to(a, end + 1, budget - 1, delta, c, chosen);
        chosen.pop();
        ok
    })
}

/// Lines carrying more than `k` distinct point locations, in canonical order.
/// Only lines through two distinct locations are considered.
pub fn long_lines(instance: &Instance, k: usize) -> Vec<Line> {
    let reps = distinct_locations(instance.points());
    spanned_lines(instance.points(), &reps)
        .into_iter()
        .filter(|(_, on)| on.len() > k)
        .map(|(line, _)| line)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Infeasibility {
    /// More than `k` long lines: no segment lies on two of them, and each
    /// needs a segment along it.
    TooManyLongLines,
    /// More than `k²` locations off all long lines: a segment covers at most
    /// `k` of them.
    TooManyOffLinePoints,
}

/// Indices of the first point at each location that lies on no line of `lines`.
fn off_line_points(instance: &Instance, lines: &[Line]) -> Vec<usize> {
    let points = instance.points();
    distinct_locations(points)
        .ones()
        .filter(|&j| !lines.iter().any(|l| l.contains(&points[j])))
        .collect()
}

/// A certificate that no cover with at most `k` segments exists, if a
/// counting argument gives one.
pub fn infeasibility_precheck(instance: &Instance, k: usize) -> Option<Infeasibility> {
    let lines = long_lines(instance, k);
    if lines.len() > k {
        return Some(Infeasibility::TooManyLongLines);
    }
    if off_line_points(instance, &lines).len() > k * k {
        return Some(Infeasibility::TooManyOffLinePoints);
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    /// Kernel points and segments, with original weights and labels.
    pub reduced: Instance,
    /// Original index of each kernel point.
    pub point_provenance: Vec<usize>,
    /// Original index of each kernel segment.
    pub segment_provenance: Vec<usize>,
    pub long_lines: Vec<Line>,
    /// Original indices of the kept points off every long line.
    pub off_line: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelOutcome {
    Kernel(Kernel),
    Infeasible(Infeasibility),
}

pub fn kernelize(instance: &Instance, k: usize, delta: &Rational) -> Result<KernelOutcome> {
    check_delta(delta)?;
    if k == 0 {
        return Err(param("kernelization needs k >= 1"));
    }
    let points = instance.points();
    let lines = long_lines(instance, k);
    if lines.len() > k {
        return Ok(KernelOutcome::Infeasible(Infeasibility::TooManyLongLines));
    }
    let off_line = off_line_points(instance, &lines);
    if off_line.len() > k * k {
        return Ok(KernelOutcome::Infeasible(
            Infeasibility::TooManyOffLinePoints,
        ));
    }

    let reps = distinct_locations(points);
    let mut kept: BTreeSet<usize> = off_line.iter().copied().collect();
    for line in &lines {
        let on: Vec<usize> = reps.ones().filter(|&j| line.contains(&points[j])).collect();
        let by_coord: BTreeMap<Rational, usize> = on
            .iter()
            .map(|&j| (line.parameter(&points[j]), j))
            .collect();
        let c = CollinearSet::new(
            line.clone(),
            &on.iter().map(|&j| points[j].clone()).collect::<Vec<_>>(),
        )?;
        for t in dense_subset(&c, k, delta)?.coords() {
            kept.insert(by_coord[t]);
        }
    }
    let point_provenance: Vec<usize> = kept.into_iter().collect();

    let sub_points: Vec<Point> = point_provenance
        .iter()
        .map(|&j| points[j].clone())
        .collect();
    let probe = Instance::new(sub_points.clone(), instance.segments().to_vec())?;
    let masks = coverage_sets(&probe);
    let mut chosen = BTreeSet::new();
    for u in 0..sub_points.len() {
        for v in u..sub_points.len() {
            let cheapest = (0..masks.len())
                .filter(|&s| masks[s].contains(u) && masks[s].contains(v))
                .min_by(|&x, &y| instance.weight(x).cmp(instance.weight(y)).then(x.cmp(&y)));
            chosen.extend(cheapest);
        }
    }
    let segment_provenance: Vec<usize> = chosen.into_iter().collect();

    let segments: Vec<WeightedSegment> = segment_provenance
        .iter()
        .map(|&s| instance.segments()[s].clone())
        .collect();
    let labels = instance.labels();
    let pick = |all: &[String], idx: &[usize]| -> Vec<String> {
        if all.is_empty() {
            Vec::new()
        } else {
            idx.iter().map(|&i| all[i].clone()).collect()
        }
    };
    let labels = Labels {
        points: pick(&labels.points, &point_provenance),
        segments: pick(&labels.segments, &segment_provenance),
    };
    Ok(KernelOutcome::Kernel(Kernel {
        reduced: Instance::with_labels(sub_points, segments, labels)?,
        point_provenance,
        segment_provenance,
        long_lines: lines,
        off_line,
    }))
}

/// At most `k` segments whose `δ`-extensions cover every point, weighing no
/// more than the lightest plain cover with at most `k` segments. `None` only
/// when no plain cover with at most `k` segments exists.
pub fn solve_ext(instance: &Instance, k: usize, delta: &Rational) -> Result<Option<Solution>> {
    check_delta(delta)?;
    if k == 0 {
        return Ok(instance.points().is_empty().then(Solution::empty));
    }
    let kernel = match kernelize(instance, k, delta)? {
        KernelOutcome::Kernel(kernel) => kernel,
        KernelOutcome::Infeasible(_) => return Ok(None),
    };
    brute_force(&kernel.reduced, k)
        .map(|s| {
            Solution::from_indices(
                instance,
                s.indices().iter().map(|&i| kernel.segment_provenance[i]),
            )
        })
        .transpose()
}

/// Coverage of the kernel points by every kernel segment; handy for
/// enumerating kernel covers.
pub fn kernel_masks(kernel: &Kernel) -> Vec<FixedBitSet> {
    coverage_sets(&kernel.reduced)
}
