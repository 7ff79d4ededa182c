//! Exact planar primitives.
//!
//! Every scalar is an arbitrary-precision [`Rational`]; no floating point is
//! used anywhere. Segments are closed, their `δ`-extensions are open at the
//! two scaled extremes, and a degenerate (single-point) segment extends to
//! itself.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{param, Error, Result};

/// The sole numeric scalar: coordinates, weights, `ε` and `δ`.
pub type Rational = BigRational;

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den` reduced to lowest terms. Panics on a zero denominator.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a literal of the form `int` or `num/den` (optional leading `-`,
/// positive denominator, decimal digits only).
pub fn parse_rational(literal: &str) -> Result<Rational> {
    let fail = |reason: &str| Error::Rational {
        literal: literal.to_string(),
        reason: reason.to_string(),
    };
    let (num, den) = match literal.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (literal, None),
    };
    let digits = num.strip_prefix('-').unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(fail(
            "numerator must be an optionally signed decimal integer",
        ));
    }
    let numer: BigInt = num.parse().map_err(|_| fail("bad numerator"))?;
    let denom: BigInt = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(fail("denominator must be an unsigned decimal integer"));
            }
            d.parse().map_err(|_| fail("bad denominator"))?
        }
    };
    if denom.is_zero() {
        return Err(fail("zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical literal: `int` when the denominator is one, `num/den` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Smallest integer not below `r`.
pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(integer(x), integer(y))
    }

    pub fn translated(&self, dx: &Rational, dy: &Rational) -> Self {
        Point::new(&self.x + dx, &self.y + dy)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Closed segment with canonical orientation `p <= q` (lexicographic).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    p: Point,
    q: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        if a <= b {
            Segment { p: a, q: b }
        } else {
            Segment { p: b, q: a }
        }
    }

    /// The single-point segment `[t, t]`.
    pub fn degenerate(t: Point) -> Self {
        Segment { p: t.clone(), q: t }
    }

    pub fn p(&self) -> &Point {
        &self.p
    }

    pub fn q(&self) -> &Point {
        &self.q
    }

    pub fn is_degenerate(&self) -> bool {
        self.p == self.q
    }

    pub fn is_horizontal(&self) -> bool {
        self.p.y == self.q.y
    }

    pub fn is_vertical(&self) -> bool {
        self.p.x == self.q.x
    }

    pub fn is_axis_parallel(&self) -> bool {
        self.is_horizontal() || self.is_vertical()
    }

    /// Supporting line; `None` for a degenerate segment.
    pub fn line(&self) -> Option<Line> {
        Line::through(&self.p, &self.q).ok()
    }

    fn cross(&self, t: &Point) -> Rational {
        let (p, q) = (&self.p, &self.q);
        (&q.x - &p.x) * (&t.y - &p.y) - (&q.y - &p.y) * (&t.x - &p.x)
    }

    /// Closed membership.
    pub fn contains(&self, t: &Point) -> bool {
        if !self.cross(t).is_zero() {
            return false;
        }
        let (p, q) = (&self.p, &self.q);
        let (lo_y, hi_y) = if p.y <= q.y {
            (&p.y, &q.y)
        } else {
            (&q.y, &p.y)
        };
        p.x <= t.x && t.x <= q.x && lo_y <= &t.y && &t.y <= hi_y
    }

    /// Membership in the `δ`-extension. The caller guarantees `delta > 0`.
    pub(crate) fn extension_contains(&self, delta: &Rational, t: &Point) -> bool {
        if self.is_degenerate() {
            return *t == self.p;
        }
        if !self.cross(t).is_zero() {
            return false;
        }
        // Project onto an axis along which the segment has positive extent;
        // p < q lexicographically so the projected span is positive.
        let (lo, hi, v) = if self.p.x != self.q.x {
            (&self.p.x, &self.q.x, &t.x)
        } else {
            (&self.p.y, &self.q.y, &t.y)
        };
        let two = integer(2);
        let mid = (lo + hi) / &two;
        let reach = (Rational::one() + delta) * (hi - lo) / &two;
        (v - &mid).abs() < reach
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.p, self.q)
    }
}

/// A line `a·x + b·y + c = 0` in canonical integer form: `gcd(|a|,|b|,|c|) = 1`
/// and the first nonzero of `(a, b)` is positive, so equal lines compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Line {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl Line {
    /// Builds a canonical line from arbitrary rational coefficients.
    pub fn from_coefficients(a: Rational, b: Rational, c: Rational) -> Result<Line> {
        if a.is_zero() && b.is_zero() {
            return Err(param("line coefficients (a, b) must not both be zero"));
        }
        let lcm = a.denom().lcm(b.denom()).lcm(c.denom());
        let scale = |r: &Rational| r.numer() * (&lcm / r.denom());
        let (mut a, mut b, mut c) = (scale(&a), scale(&b), scale(&c));
        let g = a.gcd(&b).gcd(&c);
        a /= &g;
        b /= &g;
        c /= &g;
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            a = -a;
            b = -b;
            c = -c;
        }
        Ok(Line { a, b, c })
    }

    pub fn through(p: &Point, q: &Point) -> Result<Line> {
        if p == q {
            return Err(param(format!("line through identical points {p}")));
        }
        let a = &q.y - &p.y;
        let b = &p.x - &q.x;
        let c = -(&a * &p.x + &b * &p.y);
        Line::from_coefficients(a, b, c)
    }

    pub fn coefficients(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    pub fn contains(&self, t: &Point) -> bool {
        let value = Rational::from_integer(self.a.clone()) * &t.x
            + Rational::from_integer(self.b.clone()) * &t.y
            + Rational::from_integer(self.c.clone());
        value.is_zero()
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero()
    }

    /// One-dimensional coordinate along the line, increasing in the
    /// lexicographic `(x, y)` order of the points on it.
    pub fn parameter(&self, t: &Point) -> Rational {
        if self.is_vertical() {
            t.y.clone()
        } else {
            t.x.clone()
        }
    }

    /// Inverse of [`Line::parameter`].
    pub fn point_at(&self, t: &Rational) -> Point {
        let a = Rational::from_integer(self.a.clone());
        let b = Rational::from_integer(self.b.clone());
        let c = Rational::from_integer(self.c.clone());
        if self.is_vertical() {
            Point::new(-c / a, t.clone())
        } else {
            let y = -(a * t + c) / b;
            Point::new(t.clone(), y)
        }
    }
}

/// Serialized as `{"a": "…", "b": "…", "c": "…"}` with decimal integer strings.
impl Serialize for Line {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Line", 3)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.serialize_field("c", &self.c.to_string())?;
        st.end()
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x + {}y + {} = 0", self.a, self.b, self.c)
    }
}

pub fn on_segment(s: &Segment, t: &Point) -> bool {
    s.contains(t)
}

/// Whether `t` lies in `s^{+δ}`: the open homothetic image of `s` about its
/// midpoint with ratio `1 + δ`, together with `s` itself.
pub fn covers_extended(s: &Segment, delta: &Rational, t: &Point) -> Result<bool> {
    check_delta(delta)?;
    Ok(s.extension_contains(delta, t))
}

pub(crate) fn check_delta(delta: &Rational) -> Result<()> {
    if delta.is_positive() {
        Ok(())
    } else {
        Err(param(format!("delta must be positive, got {delta}")))
    }
}

pub fn line_through(p: &Point, q: &Point) -> Result<Line> {
    Line::through(p, q)
}

pub fn collinear_with(s: &Segment, l: &Line) -> bool {
    l.contains(s.p()) && l.contains(s.q())
}

/// Endpoints of the smallest segment covering a collinear point set: none
/// for an empty set, one point when all points coincide, two otherwise.
pub fn extreme_points(points: &[Point]) -> Result<Vec<Point>> {
    let (lo, hi) = match (points.iter().min(), points.iter().max()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Ok(Vec::new()),
    };
    if lo == hi {
        return Ok(vec![lo.clone()]);
    }
    let line = Line::through(lo, hi)?;
    if let Some(off) = points.iter().find(|t| !line.contains(t)) {
        return Err(param(format!(
            "points are not collinear: {off} is off {line}"
        )));
    }
    Ok(vec![lo.clone(), hi.clone()])
}

/// Exact length of a horizontal or vertical segment.
pub fn axis_parallel_length(s: &Segment) -> Result<Rational> {
    if s.is_horizontal() {
        Ok(&s.q().x - &s.p().x)
    } else if s.is_vertical() {
        Ok(&s.q().y - &s.p().y)
    } else {
        Err(Error::Unsupported(format!(
            "length of oblique segment {s} is not rational in general"
        )))
    }
}
