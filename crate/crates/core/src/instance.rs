//! Instances, solutions, cover verification and the JSON file formats.
//!
//! Instance file:
//! `{"points": [["x","y"],…], "segments": [{"p":["x","y"],"q":["x","y"],"w":"r"},…], "labels": {…}}`
//! where every scalar is a rational literal (`"int"` or `"num/den"`).
//!
//! Solution file: `{"feasible": true|false, "indices": […], "weight": "r"}`;
//! `indices` and `weight` are omitted for an infeasible answer.

use std::fmt;

use fixedbitset::FixedBitSet;
use num_traits::{Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_delta, format_rational, parse_rational, Point, Rational, Segment};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedSegment {
    pub segment: Segment,
    pub weight: Rational,
}

/// Optional provenance tags, parallel to the point and segment lists.
/// An empty list means "no labels" for that kind.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Labels {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<String>,
}

impl Labels {
    fn is_empty(&self) -> bool {
        self.points.is_empty() && self.segments.is_empty()
    }
}

/// A weighted segment set cover instance: the universe of points and the
/// family of weighted segments. Identity is positional; duplicates are legal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    points: Vec<Point>,
    segments: Vec<WeightedSegment>,
    labels: Labels,
}

impl Instance {
    pub fn new(points: Vec<Point>, segments: Vec<WeightedSegment>) -> Result<Instance> {
        Instance::with_labels(points, segments, Labels::default())
    }

    pub fn with_labels(
        points: Vec<Point>,
        segments: Vec<WeightedSegment>,
        labels: Labels,
    ) -> Result<Instance> {
        if let Some((index, ws)) = segments
            .iter()
            .enumerate()
            .find(|(_, ws)| ws.weight.is_negative())
        {
            return Err(Error::NegativeWeight {
                index,
                weight: format_rational(&ws.weight),
            });
        }
        if !labels.points.is_empty() && labels.points.len() != points.len() {
            return Err(Error::Parameter(format!(
                "{} point labels for {} points",
                labels.points.len(),
                points.len()
            )));
        }
        if !labels.segments.is_empty() && labels.segments.len() != segments.len() {
            return Err(Error::Parameter(format!(
                "{} segment labels for {} segments",
                labels.segments.len(),
                segments.len()
            )));
        }
        Ok(Instance {
            points,
            segments,
            labels,
        })
    }

    /// Unit-weight instance.
    pub fn unweighted(points: Vec<Point>, segments: Vec<Segment>) -> Instance {
        let segments = segments
            .into_iter()
            .map(|segment| WeightedSegment {
                segment,
                weight: Rational::from_integer(1.into()),
            })
            .collect();
        Instance {
            points,
            segments,
            labels: Labels::default(),
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn segments(&self) -> &[WeightedSegment] {
        &self.segments
    }

    pub fn segment(&self, index: usize) -> &Segment {
        &self.segments[index].segment
    }

    pub fn weight(&self, index: usize) -> &Rational {
        &self.segments[index].weight
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn point_label(&self, index: usize) -> Option<&str> {
        self.labels.points.get(index).map(String::as_str)
    }

    pub fn segment_label(&self, index: usize) -> Option<&str> {
        self.labels.segments.get(index).map(String::as_str)
    }

    /// Distinct weight values in ascending order.
    pub fn distinct_weights(&self) -> Vec<Rational> {
        let mut ws: Vec<Rational> = self.segments.iter().map(|s| s.weight.clone()).collect();
        ws.sort();
        ws.dedup();
        ws
    }

    /// The same points with a subset of the segments, in the given order.
    pub fn restrict_segments(&self, keep: &[usize]) -> Instance {
        let segments = keep.iter().map(|&i| self.segments[i].clone()).collect();
        let labels = Labels {
            points: self.labels.points.clone(),
            segments: if self.labels.segments.is_empty() {
                Vec::new()
            } else {
                keep.iter()
                    .map(|&i| self.labels.segments[i].clone())
                    .collect()
            },
        };
        Instance {
            points: self.points.clone(),
            segments,
            labels,
        }
    }

    /// The same geometry with replaced weights (one per segment).
    pub fn reweighted(&self, weights: Vec<Rational>) -> Result<Instance> {
        if weights.len() != self.segments.len() {
            return Err(Error::Parameter(format!(
                "{} weights for {} segments",
                weights.len(),
                self.segments.len()
            )));
        }
        let segments = self
            .segments
            .iter()
            .zip(weights)
            .map(|(s, weight)| WeightedSegment {
                segment: s.segment.clone(),
                weight,
            })
            .collect();
        Instance::with_labels(self.points.clone(), segments, self.labels.clone())
    }
}

/// Incremental construction with optional labels; used by the generators.
#[derive(Debug, Default)]
pub struct InstanceBuilder {
    points: Vec<Point>,
    segments: Vec<WeightedSegment>,
    point_labels: Vec<String>,
    segment_labels: Vec<String>,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        InstanceBuilder::default()
    }

    pub fn add_point(&mut self, p: Point, label: impl Into<String>) -> usize {
        self.points.push(p);
        self.point_labels.push(label.into());
        self.points.len() - 1
    }

    pub fn add_segment(
        &mut self,
        segment: Segment,
        weight: Rational,
        label: impl Into<String>,
    ) -> usize {
        self.segments.push(WeightedSegment { segment, weight });
        self.segment_labels.push(label.into());
        self.segments.len() - 1
    }

    pub fn point(&self, index: usize) -> &Point {
        &self.points[index]
    }

    pub fn build(self) -> Result<Instance> {
        Instance::with_labels(
            self.points,
            self.segments,
            Labels {
                points: self.point_labels,
                segments: self.segment_labels,
            },
        )
    }
}

/// A chosen subfamily: sorted, duplicate-free segment indices and their total weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Solution {
    indices: Vec<usize>,
    weight: Rational,
}

impl Solution {
    pub fn empty() -> Solution {
        Solution {
            indices: Vec::new(),
            weight: Rational::zero(),
        }
    }

    pub fn from_indices(
        instance: &Instance,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Solution> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        let len = instance.segments.len();
        if let Some(&index) = indices.iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange { index, len });
        }
        let weight = indices.iter().map(|&i| &instance.segments[i].weight).sum();
        Ok(Solution { indices, weight })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Order used for deterministic tie-breaking: lighter first, then fewer
    /// segments, then the lexicographically smaller index list.
    pub fn better_than(&self, other: &Solution) -> bool {
        (&self.weight, self.indices.len(), &self.indices)
            < (&other.weight, other.indices.len(), &other.indices)
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} (weight {})", self.indices, self.weight)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub covered: bool,
    pub uncovered_points: Vec<usize>,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub delta_used: Option<Rational>,
}

/// Checks that every point lies on a selected segment, or in a selected
/// segment's `δ`-extension when `delta` is given.
pub fn verify_cover(
    instance: &Instance,
    solution: &Solution,
    delta: Option<&Rational>,
) -> Result<CoverReport> {
    if let Some(d) = delta {
        check_delta(d)?;
    }
    let len = instance.segments.len();
    if let Some(&index) = solution.indices.iter().find(|&&i| i >= len) {
        return Err(Error::IndexOutOfRange { index, len });
    }
    let chosen: Vec<&Segment> = solution
        .indices
        .iter()
        .map(|&i| instance.segment(i))
        .collect();
    let uncovered_points: Vec<usize> = instance
        .points
        .iter()
        .enumerate()
        .filter(|(_, t)| {
            !chosen.iter().any(|s| match delta {
                Some(d) => s.extension_contains(d, t),
                None => s.contains(t),
            })
        })
        .map(|(j, _)| j)
        .collect();
    Ok(CoverReport {
        covered: uncovered_points.is_empty(),
        uncovered_points,
        delta_used: delta.cloned(),
    })
}

/// Bit `j` of mask `m` is set iff segment `m` covers point `j` (closed membership).
pub fn coverage_sets(instance: &Instance) -> Vec<FixedBitSet> {
    let n = instance.points.len();
    instance
        .segments
        .iter()
        .map(|ws| {
            let mut mask = FixedBitSet::with_capacity(n);
            for (j, t) in instance.points.iter().enumerate() {
                if ws.segment.contains(t) {
                    mask.insert(j);
                }
            }
            mask
        })
        .collect()
}

/// A rational serialized as its canonical literal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalLiteral(pub Rational);

impl Serialize for RationalLiteral {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalLiteral {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s)
            .map(RationalLiteral)
            .map_err(de::Error::custom)
    }
}

fn serialize_opt_rational<S: Serializer>(
    value: &Option<Rational>,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    match value {
        Some(r) => serializer.serialize_str(&format_rational(r)),
        None => serializer.serialize_none(),
    }
}

type PointLiteral = [RationalLiteral; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRecord {
    p: PointLiteral,
    q: PointLiteral,
    w: RationalLiteral,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRecord {
    points: Vec<PointLiteral>,
    segments: Vec<SegmentRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Labels>,
}

fn to_point([x, y]: PointLiteral) -> Point {
    Point::new(x.0, y.0)
}

fn from_point(p: &Point) -> PointLiteral {
    [RationalLiteral(p.x.clone()), RationalLiteral(p.y.clone())]
}

pub(crate) fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn load_instance(text: &str) -> Result<Instance> {
    let record: InstanceRecord = serde_json::from_str(text).map_err(json_error)?;
    let points = record.points.into_iter().map(to_point).collect();
    let segments = record
        .segments
        .into_iter()
        .map(|s| WeightedSegment {
            segment: Segment::new(to_point(s.p), to_point(s.q)),
            weight: s.w.0,
        })
        .collect();
    Instance::with_labels(points, segments, record.labels.unwrap_or_default())
}

/// Canonical serialization: pretty JSON, positional order, trailing newline.
pub fn save_instance(instance: &Instance) -> String {
    let record = InstanceRecord {
        points: instance.points.iter().map(from_point).collect(),
        segments: instance
            .segments
            .iter()
            .map(|ws| SegmentRecord {
                p: from_point(ws.segment.p()),
                q: from_point(ws.segment.q()),
                w: RationalLiteral(ws.weight.clone()),
            })
            .collect(),
        labels: (!instance.labels.is_empty()).then(|| instance.labels.clone()),
    };
    let mut text =
        serde_json::to_string_pretty(&record).expect("instance serialization is infallible");
    text.push('\n');
    text
}

/// On-disk form of a solver answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionRecord {
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<RationalLiteral>,
}

impl SolutionRecord {
    pub fn from_answer(answer: Option<&Solution>) -> SolutionRecord {
        match answer {
            Some(s) => SolutionRecord {
                feasible: true,
                indices: Some(s.indices.clone()),
                weight: Some(RationalLiteral(s.weight.clone())),
            },
            None => SolutionRecord {
                feasible: false,
                indices: None,
                weight: None,
            },
        }
    }

    /// Resolves the record against an instance. A stated weight must match
    /// the recomputed one.
    pub fn to_solution(&self, instance: &Instance) -> Result<Option<Solution>> {
        if !self.feasible {
            return Ok(None);
        }
        let indices = self
            .indices
            .clone()
            .ok_or_else(|| Error::Parameter("feasible solution without \"indices\"".into()))?;
        let solution = Solution::from_indices(instance, indices)?;
        if let Some(w) = &self.weight {
            if w.0 != solution.weight {
                return Err(Error::Parameter(format!(
                    "stated weight {} differs from the selected segments' total {}",
                    w.0, solution.weight
                )));
            }
        }
        Ok(Some(solution))
    }
}

pub fn load_solution(text: &str) -> Result<SolutionRecord> {
    serde_json::from_str(text).map_err(json_error)
}

pub fn save_solution(answer: Option<&Solution>) -> String {
    let mut text = serde_json::to_string(&SolutionRecord::from_answer(answer))
        .expect("solution serialization is infallible");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{integer, rational};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn single() -> Instance {
        Instance::unweighted(vec![pt(1, 0)], vec![Segment::new(pt(0, 0), pt(2, 0))])
    }

    #[test]
    fn load_minimal_document() {
        let text =
            r#"{"points": [["1","0"]], "segments": [{"p":["0","0"],"q":["2","0"],"w":"1"}]}"#;
        let inst = load_instance(text).unwrap();
        assert_eq!(inst.points().len(), 1);
        assert_eq!(inst.segments().len(), 1);
        assert_eq!(inst, single());
    }

    #[test]
    fn negative_weight_is_rejected() {
        let text = r#"{"points": [], "segments": [{"p":["0","0"],"q":["2","0"],"w":"-1/2"}]}"#;
        assert!(matches!(
            load_instance(text),
            Err(Error::NegativeWeight { index: 0, .. })
        ));
    }

    #[test]
    fn malformed_rational_reports_position() {
        let text = "{\"points\": [\n  [\"1\", \"x/2\"]\n], \"segments\": []}";
        match load_instance(text) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("x/2"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_instance("{\"points\": ["),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            load_instance(r#"{"points": [], "segments": [], "extra": 1}"#),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn save_is_canonical() {
        // Reversed endpoints and unreduced fractions normalize on load.
        let text = r#"{"points": [["2/4","0"]], "segments": [{"p":["2","0"],"q":["0","0"],"w":"6/3"}],
                       "labels": {"points": ["a"]}}"#;
        let inst = load_instance(text).unwrap();
        let saved = save_instance(&inst);
        assert!(saved.contains("\"1/2\""));
        assert_eq!(load_instance(&saved).unwrap(), inst);
        assert_eq!(save_instance(&load_instance(&saved).unwrap()), saved);
        assert_eq!(inst.point_label(0), Some("a"));
    }

    #[test]
    fn label_count_mismatch_is_rejected() {
        let text = r#"{"points": [["0","0"]], "segments": [], "labels": {"points": ["a", "b"]}}"#;
        assert!(load_instance(text).is_err());
    }

    #[test]
    fn verify_examples() {
        let inst = single();
        let s = Solution::from_indices(&inst, [0]).unwrap();
        assert!(verify_cover(&inst, &s, None).unwrap().covered);

        let two = Instance::unweighted(
            vec![pt(1, 0), pt(5, 5)],
            vec![Segment::new(pt(0, 0), pt(2, 0))],
        );
        let r = verify_cover(&two, &Solution::empty(), None).unwrap();
        assert!(!r.covered);
        assert_eq!(r.uncovered_points, vec![0, 1]);

        let bad = Solution {
            indices: vec![3],
            weight: integer(0),
        };
        assert!(matches!(
            verify_cover(&inst, &bad, None),
            Err(Error::IndexOutOfRange { index: 3, len: 1 })
        ));
        assert!(verify_cover(&inst, &s, Some(&integer(0))).is_err());
    }

    #[test]
    fn extension_covers_more() {
        let inst = Instance::unweighted(
            vec![pt(0, 0), pt(3, 0)],
            vec![Segment::new(pt(0, 0), pt(2, 0))],
        );
        let s = Solution::from_indices(&inst, [0]).unwrap();
        assert!(!verify_cover(&inst, &s, None).unwrap().covered);
        assert!(!verify_cover(&inst, &s, Some(&integer(1))).unwrap().covered);
        let r = verify_cover(&inst, &s, Some(&rational(3, 2))).unwrap();
        assert!(r.covered);
        assert_eq!(r.delta_used, Some(rational(3, 2)));
    }

    #[test]
    fn coverage_sets_examples() {
        let empty = Instance::unweighted(vec![], vec![Segment::new(pt(0, 0), pt(1, 0))]);
        assert_eq!(coverage_sets(&empty)[0].count_ones(..), 0);
        let masks = coverage_sets(&single());
        assert_eq!(masks[0].ones().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn solution_weight_and_order() {
        let inst = Instance::new(
            vec![],
            vec![
                WeightedSegment {
                    segment: Segment::new(pt(0, 0), pt(1, 0)),
                    weight: integer(2),
                },
                WeightedSegment {
                    segment: Segment::new(pt(0, 0), pt(1, 1)),
                    weight: rational(1, 2),
                },
            ],
        )
        .unwrap();
        let s = Solution::from_indices(&inst, [1, 0, 1]).unwrap();
        assert_eq!(s.indices(), &[0, 1]);
        assert_eq!(s.weight(), &rational(5, 2));
        let light = Solution::from_indices(&inst, [1]).unwrap();
        assert!(light.better_than(&s));
        assert!(Solution::from_indices(&inst, [2]).is_err());
    }

    #[test]
    fn solution_records() {
        assert_eq!(save_solution(None), "{\"feasible\":false}\n");
        let inst = single();
        let s = Solution::from_indices(&inst, [0]).unwrap();
        let text = save_solution(Some(&s));
        assert_eq!(
            text,
            "{\"feasible\":true,\"indices\":[0],\"weight\":\"1\"}\n"
        );
        let back = load_solution(&text).unwrap().to_solution(&inst).unwrap();
        assert_eq!(back, Some(s));
        let wrong = r#"{"feasible":true,"indices":[0],"weight":"2"}"#;
        assert!(load_solution(wrong).unwrap().to_solution(&inst).is_err());
    }

    #[test]
    fn cover_report_json() {
        let r = CoverReport {
            covered: true,
            uncovered_points: vec![],
            delta_used: Some(rational(1, 2)),
        };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"covered":true,"uncovered_points":[],"delta_used":"1/2"}"#
        );
    }
}
