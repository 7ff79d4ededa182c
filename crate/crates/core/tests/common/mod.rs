#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use segcover::ext::CollinearSet;
use segcover::generators::{CnfFormula, Literal};
use segcover::geometry::{integer, Point, Rational, Segment};
use segcover::instance::{Instance, WeightedSegment};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const DIRECTIONS: [(i64, i64); 8] = [
    (1, 0),
    (0, 1),
    (1, 1),
    (1, -1),
    (1, 2),
    (2, 1),
    (1, -2),
    (3, 1),
];

/// Grid points `a + t·d` inside `[0, 20]²`.
fn lattice_line(a: (i64, i64), d: (i64, i64)) -> Vec<(i64, i64)> {
    (-20..=20)
        .map(|t| (a.0 + t * d.0, a.1 + t * d.1))
        .filter(|&(x, y)| (0..=20).contains(&x) && (0..=20).contains(&y))
        .collect()
}

fn pt((x, y): (i64, i64)) -> Point {
    Point::from_ints(x, y)
}

/// A small weighted instance on the grid `[0, 20]²`: points clustered on a
/// few lines plus strays, at most 15 points and 10 segments, weights in
/// `1..=5`, and a budget `k <= 3`. Most segments run along the lines, so a
/// fair share of the instances is feasible.
pub fn random_instance(r: &mut ChaCha8Rng) -> (Instance, usize) {
    let lines: Vec<Vec<(i64, i64)>> = (0..r.gen_range(1..=3))
        .map(|_| {
            let a = (r.gen_range(0..=20), r.gen_range(0..=20));
            let full = lattice_line(a, *DIRECTIONS.choose(r).unwrap());
            let lo = r.gen_range(0..full.len());
            let hi = r.gen_range(lo..full.len().min(lo + 8));
            full[lo..=hi].to_vec()
        })
        .collect();
    let mut points = Vec::new();
    for line in &lines {
        let take = r.gen_range(1..=6).min(line.len());
        points.extend(line.choose_multiple(r, take).copied());
    }
    let strays: Vec<(i64, i64)> = (0..r.gen_range(0..=2))
        .map(|_| (r.gen_range(0..=20), r.gen_range(0..=20)))
        .collect();
    points.extend(&strays);
    if r.gen_bool(0.1) {
        let dup = *points.choose(r).unwrap();
        points.push(dup);
    }
    points.shuffle(r);
    points.truncate(15);

    let mut segments = Vec::new();
    for line in &lines {
        if r.gen_bool(0.7) {
            segments.push(Segment::new(pt(line[0]), pt(*line.last().unwrap())));
        }
    }
    for s in &strays {
        if r.gen_bool(0.6) {
            segments.push(Segment::degenerate(pt(*s)));
        }
    }
    while segments.len() < 10 && r.gen_bool(0.8) {
        let roll: f64 = r.gen();
        let s = if roll < 0.6 {
            let line = lines.choose(r).unwrap();
            Segment::new(pt(*line.choose(r).unwrap()), pt(*line.choose(r).unwrap()))
        } else if roll < 0.8 {
            Segment::degenerate(pt(*points.choose(r).unwrap()))
        } else {
            Segment::new(
                pt(*points.choose(r).unwrap()),
                pt(*points.choose(r).unwrap()),
            )
        };
        segments.push(s);
    }
    segments.shuffle(r);
    segments.truncate(10);
    let segments = segments
        .into_iter()
        .map(|segment| WeightedSegment {
            segment,
            weight: integer(r.gen_range(1..=5)),
        })
        .collect();
    let instance = Instance::new(points.into_iter().map(pt).collect(), segments).unwrap();
    (instance, r.gen_range(0..=3))
}

pub fn corpus(seed: u64, count: usize) -> Vec<(Instance, usize)> {
    let mut r = rng(seed);
    (0..count).map(|_| random_instance(&mut r)).collect()
}

/// Up to `max_len` distinct collinear points with clustered parameters.
pub fn random_collinear(r: &mut ChaCha8Rng, max_len: usize) -> CollinearSet {
    let a = (r.gen_range(-10..=10), r.gen_range(-10..=10));
    let d = *DIRECTIONS.choose(r).unwrap();
    let len = r.gen_range(1..=max_len);
    let mut ts: Vec<Rational> = Vec::new();
    let clusters = r.gen_range(1..=4);
    for _ in 0..len {
        let centre = (r.gen_range(0..clusters) * 50) as i64;
        let offset = Rational::new(r.gen_range(0..40i64).into(), r.gen_range(1..=4i64).into());
        ts.push(integer(centre) + offset);
    }
    let points: Vec<Point> = ts
        .iter()
        .map(|t| {
            Point::new(
                integer(a.0) + t * integer(d.0),
                integer(a.1) + t * integer(d.1),
            )
        })
        .collect();
    CollinearSet::from_points(&points).unwrap()
}

/// A random (E3,E5)-formula on `n` variables satisfied by `planted`.
pub fn planted_formula(r: &mut ChaCha8Rng, n: usize, planted: &[bool]) -> CnfFormula {
    let mut slots: Vec<usize> = (1..=n).flat_map(|v| std::iter::repeat_n(v, 5)).collect();
    slots.shuffle(r);
    let clauses = slots
        .chunks(3)
        .map(|c| {
            let mut lits = [0, 1, 2].map(|p| Literal {
                var: c[p],
                negated: r.gen_bool(0.5),
            });
            if !lits.iter().any(|l| l.holds(planted)) {
                let p = r.gen_range(0..3);
                lits[p].negated = !lits[p].negated;
            }
            lits
        })
        .collect();
    CnfFormula::new(n, clauses).unwrap()
}

/// All index subsets of `0..n`, as bit patterns.
pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}
