use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::geometry::{Point, Segment};
use crate::instance::{verify_cover, Instance, InstanceBuilder, Solution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    /// Variable index in `1..=n`.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    /// From the DIMACS convention: `v` is `x_v`, `-v` is `¬x_v`.
    pub fn from_dimacs(lit: i64) -> Result<Literal> {
        if lit == 0 {
            return Err(param("literal 0 is not allowed"));
        }
        Ok(Literal {
            var: lit.unsigned_abs() as usize,
            negated: lit < 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    /// `eta[v - 1]` is the value of `x_v`.
    pub fn holds(self, eta: &[bool]) -> bool {
        eta[self.var - 1] != self.negated
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CnfRecord {
    variables: usize,
    clauses: Vec<[i64; 3]>,
}

/// A CNF formula with exactly three literals per clause and exactly five
/// occurrences per variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CnfRecord", into = "CnfRecord")]
pub struct CnfFormula {
    variables: usize,
    clauses: Vec<[Literal; 3]>,
}

impl TryFrom<CnfRecord> for CnfFormula {
    type Error = Error;

    fn try_from(r: CnfRecord) -> Result<CnfFormula> {
        let clauses = r
            .clauses
            .iter()
            .map(|c| {
                Ok([
                    Literal::from_dimacs(c[0])?,
                    Literal::from_dimacs(c[1])?,
                    Literal::from_dimacs(c[2])?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        CnfFormula::new(r.variables, clauses)
    }
}

impl From<CnfFormula> for CnfRecord {
    fn from(f: CnfFormula) -> CnfRecord {
        CnfRecord {
            variables: f.variables,
            clauses: f
                .clauses
                .iter()
                .map(|c| c.map(Literal::to_dimacs))
                .collect(),
        }
    }
}

impl CnfFormula {
    pub fn new(variables: usize, clauses: Vec<[Literal; 3]>) -> Result<CnfFormula> {
        if variables == 0 || !variables.is_multiple_of(3) {
            return Err(param(format!(
                "variable count must be a positive multiple of 3, got {variables}"
            )));
        }
        if clauses.len() != 5 * variables / 3 {
            return Err(param(format!(
                "{} clauses, expected 5n/3 = {}",
                clauses.len(),
                5 * variables / 3
            )));
        }
        let mut occurrences = vec![0usize; variables + 1];
        for (i, clause) in clauses.iter().enumerate() {
            for lit in clause {
                if lit.var == 0 || lit.var > variables {
                    return Err(param(format!(
                        "clause {} uses variable {} outside 1..={variables}",
                        i + 1,
                        lit.var
                    )));
                }
                occurrences[lit.var] += 1;
            }
        }
        if let Some(v) = (1..=variables).find(|&v| occurrences[v] != 5) {
            return Err(param(format!(
                "variable {v} occurs {} times, expected 5",
                occurrences[v]
            )));
        }
        Ok(CnfFormula { variables, clauses })
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    pub fn satisfied_count(&self, eta: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| l.holds(eta)))
            .count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariableGadget {
    /// Points `a, b, c, d, e, f`.
    pub points: [usize; 6],
    /// `(a,d), (b,f), (c,g)`.
    pub choose_true: [usize; 3],
    /// `(a,c), (d,e), (f,h)`.
    pub choose_false: [usize; 3],
    pub x_true_segment: usize,
    pub x_false_segment: usize,
}

impl VariableGadget {
    pub fn segments(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .choose_true
            .iter()
            .chain(&self.choose_false)
            .copied()
            .collect();
        all.sort_unstable();
        all
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrGadget {
    /// Points `l, m, n, o, p, q, r, s, t, u, v`.
    pub points: [usize; 11],
    /// `(q,r), (s,u)`.
    pub choose_false: [usize; 2],
    /// `(m,s), (o,u), (t,v)`.
    pub choose_true: [usize; 3],
    /// `(l,n), (n,p)`.
    pub move_variable: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseGadget {
    pub literals: [i64; 3],
    /// `x0, x1, y0, y1, z0, z1`.
    pub move_points: [usize; 6],
    /// `(x0,x1), (y0,y1), (z0,z1), (x1,l_0), (y1,p_0), (z1,p_1)`.
    pub move_segments: [usize; 6],
    pub ors: [OrGadget; 2],
    /// All points of the clause gadget, sorted.
    pub points: Vec<usize>,
    /// All 20 segments of the clause gadget, sorted.
    pub segments: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SatMeta {
    pub n: usize,
    pub m: usize,
    /// Horizontal scale `L = 100n` of the variable gadgets.
    pub l: i64,
    /// Size `64n/3` of a cover for a satisfiable formula.
    pub base_size: usize,
    pub variables: Vec<VariableGadget>,
    pub clauses: Vec<ClauseGadget>,
}

struct Placer {
    b: InstanceBuilder,
    at: HashMap<Point, usize>,
}

impl Placer {
    fn point(&mut self, x: i64, y: i64, label: String) -> usize {
        let p = Point::from_ints(x, y);
        if let Some(&j) = self.at.get(&p) {
            return j;
        }
        let j = self.b.add_point(p.clone(), label);
        self.at.insert(p, j);
        j
    }

    fn segment(&mut self, p: (i64, i64), q: (i64, i64), label: String) -> usize {
        let s = Segment::new(Point::from_ints(p.0, p.1), Point::from_ints(q.0, q.1));
        self.b.add_segment(s, crate::geometry::integer(1), label)
    }
}

const OR_OFFSETS: [(char, i64, i64); 11] = [
    ('l', 0, 0),
    ('m', 0, 1),
    ('n', 0, 2),
    ('o', 0, 3),
    ('p', 0, 4),
    ('q', 1, 1),
    ('r', 1, 3),
    ('s', 2, 1),
    ('t', 2, 2),
    ('u', 2, 3),
    ('v', 3, 2),
];

fn or_gadget(pl: &mut Placer, n: i64, i: i64, j: i64, covered: &mut Vec<usize>) -> OrGadget {
    let (bx, by) = (20 * i + 3 + 3 * j, 4 * (n + 1) + 2 * j);
    let at = |name: char| {
        let &(_, dx, dy) = OR_OFFSETS
            .iter()
            .find(|o| o.0 == name)
            .expect("known point");
        (bx + dx, by + dy)
    };
    let mut points = [0; 11];
    for (slot, &(name, dx, dy)) in OR_OFFSETS.iter().enumerate() {
        points[slot] = pl.point(bx + dx, by + dy, format!("C{i}.or{j}.{name}"));
    }
    // v is not part of the gadget's own point set; l of the second gadget
    // coincides with v of the first, and v of the second is a clause point.
    covered.extend(&points[..10]);
    let mut seg = |a: char, b: char| pl.segment(at(a), at(b), format!("C{i}.or{j}.({a},{b})"));
    OrGadget {
        choose_false: [seg('q', 'r'), seg('s', 'u')],
        choose_true: [seg('m', 's'), seg('o', 'u'), seg('t', 'v')],
        move_variable: [seg('l', 'n'), seg('n', 'p')],
        points,
    }
}

/// Reduction to unweighted segment set cover with axis-parallel segments.
pub fn gen_sat(f: &CnfFormula) -> Result<(Instance, SatMeta)> {
    let n = f.variables() as i64;
    let l = 100 * n;
    let mut pl = Placer {
        b: InstanceBuilder::new(),
        at: HashMap::new(),
    };

    let mut variables = Vec::new();
    for i in 1..=n {
        let y = 4 * i;
        let pos = [
            ('a', -3 * l, y),
            ('b', -2 * l, y),
            ('c', -l, y),
            ('d', -3 * l, y + 1),
            ('e', -2 * l, y + 1),
            ('f', -2 * l, y + 2),
            ('g', l, y),
            ('h', l, y + 2),
        ];
        let at = |name: char| {
            let &(_, x, y) = pos.iter().find(|p| p.0 == name).expect("known point");
            (x, y)
        };
        let mut points = [0; 6];
        for (slot, &(name, x, y)) in pos[..6].iter().enumerate() {
            points[slot] = pl.point(x, y, format!("x{i}.{name}"));
        }
        let mut seg = |a: char, b: char| pl.segment(at(a), at(b), format!("x{i}.({a},{b})"));
        let choose_true = [seg('a', 'd'), seg('b', 'f'), seg('c', 'g')];
        let choose_false = [seg('a', 'c'), seg('d', 'e'), seg('f', 'h')];
        variables.push(VariableGadget {
            points,
            x_true_segment: choose_true[2],
            x_false_segment: choose_false[2],
            choose_true,
            choose_false,
        });
    }

    let mut clauses = Vec::new();
    for (idx, clause) in f.clauses().iter().enumerate() {
        let i = idx as i64 + 1;
        let height = |w: &Literal| 4 * w.var as i64 + 2 * i64::from(w.negated);
        let top = 4 * (n + 1);
        let x0 = (20 * i, height(&clause[0]));
        let x1 = (20 * i, top);
        let y0 = (20 * i + 1, height(&clause[1]));
        let y1 = (20 * i + 1, top + 4);
        let z0 = (20 * i + 2, height(&clause[2]));
        let z1 = (20 * i + 2, top + 6);
        let mut move_points = [0; 6];
        for (slot, (name, p)) in [
            ("x0", x0),
            ("x1", x1),
            ("y0", y0),
            ("y1", y1),
            ("z0", z0),
            ("z1", z1),
        ]
        .into_iter()
        .enumerate()
        {
            move_points[slot] = pl.point(p.0, p.1, format!("C{i}.{name}"));
        }
        let mut points: Vec<usize> = move_points.to_vec();
        let or0 = or_gadget(&mut pl, n, i, 0, &mut points);
        let or1 = or_gadget(&mut pl, n, i, 1, &mut points);
        points.push(or1.points[10]);
        points.sort_unstable();
        points.dedup();

        let l0 = (20 * i + 3, top);
        let p0 = (20 * i + 3, top + 4);
        let p1 = (20 * i + 6, top + 6);
        let move_segments = [
            pl.segment(x0, x1, format!("C{i}.(x0,x1)")),
            pl.segment(y0, y1, format!("C{i}.(y0,y1)")),
            pl.segment(z0, z1, format!("C{i}.(z0,z1)")),
            pl.segment(x1, l0, format!("C{i}.(x1,l0)")),
            pl.segment(y1, p0, format!("C{i}.(y1,p0)")),
            pl.segment(z1, p1, format!("C{i}.(z1,p1)")),
        ];
        let mut segments: Vec<usize> = move_segments.to_vec();
        for g in [&or0, &or1] {
            segments.extend(
                g.choose_false
                    .iter()
                    .chain(&g.choose_true)
                    .chain(&g.move_variable),
            );
        }
        segments.sort_unstable();
        clauses.push(ClauseGadget {
            literals: clause.map(Literal::to_dimacs),
            move_points,
            move_segments,
            ors: [or0, or1],
            points,
            segments,
        });
    }

    let meta = SatMeta {
        n: f.variables(),
        m: f.clauses().len(),
        l,
        base_size: 64 * f.variables() / 3,
        variables,
        clauses,
    };
    Ok((pl.b.build()?, meta))
}

/// Eleven segments covering the clause gadget except its literal point at
/// position `pos` (0, 1 or 2), or twelve covering all of it when `pos` is `None`.
pub fn clause_solution(c: &ClauseGadget, pos: Option<usize>) -> Result<Vec<usize>> {
    let [x0x1, y0y1, z0z1, x1l0, y1p0, z1p1] = c.move_segments;
    let [or0, or1] = &c.ors;
    let [ln0, np0] = or0.move_variable;
    let [ln1, np1] = or1.move_variable;
    let mut s = Vec::new();
    match pos {
        Some(0) => {
            s.extend([np0, np1, x1l0, y0y1, z0z1]);
            s.extend(or0.choose_true.iter().chain(&or1.choose_true));
        }
        Some(1) => {
            s.extend([ln0, np1, y1p0, x0x1, z0z1]);
            s.extend(or0.choose_true.iter().chain(&or1.choose_true));
        }
        Some(2) => {
            s.extend([ln0, np0, ln1, x0x1, y0y1, z1p1]);
            s.extend(or0.choose_false.iter().chain(&or1.choose_true));
        }
        None => {
            s.extend([ln0, np0, ln1, np1, x0x1, y0y1, z0z1, or1.choose_true[2]]);
            s.extend(or0.choose_false.iter().chain(&or1.choose_false));
        }
        Some(p) => return Err(param(format!("literal position {p} is not 0, 1 or 2"))),
    }
    s.sort_unstable();
    Ok(s)
}

/// For each clause, the first literal position satisfied by `eta`.
pub fn satisfying_choice(meta: &SatMeta, eta: &[bool]) -> Result<Vec<Option<usize>>> {
    check_assignment(meta, eta)?;
    meta.clauses
        .iter()
        .map(|c| {
            let lits = c.literals.map(Literal::from_dimacs);
            let mut first = None;
            for (p, lit) in lits.into_iter().enumerate() {
                if lit?.holds(eta) && first.is_none() {
                    first = Some(p);
                }
            }
            Ok(first)
        })
        .collect()
}

fn check_assignment(meta: &SatMeta, eta: &[bool]) -> Result<()> {
    if eta.len() != meta.n {
        return Err(param(format!(
            "assignment has {} values for {} variables",
            eta.len(),
            meta.n
        )));
    }
    Ok(())
}

/// The cover of size `64n/3 + u`, `u` being the number of clauses given no
/// literal: each variable gadget takes the three segments of its value and
/// each clause gadget is closed through its chosen satisfied literal.
pub fn build_sat_solution(
    instance: &Instance,
    meta: &SatMeta,
    eta: &[bool],
    choice: &[Option<usize>],
) -> Result<Solution> {
    check_assignment(meta, eta)?;
    if choice.len() != meta.m {
        return Err(param(format!(
            "{} literal choices for {} clauses",
            choice.len(),
            meta.m
        )));
    }
    let mut indices = Vec::new();
    for (v, value) in meta.variables.iter().zip(eta) {
        indices.extend(if *value {
            v.choose_true
        } else {
            v.choose_false
        });
    }
    for (i, (c, pos)) in meta.clauses.iter().zip(choice).enumerate() {
        if let Some(p) = *pos {
            let lit = c.literals.get(p).ok_or_else(|| {
                param(format!(
                    "clause {}: literal position {p} is not 0, 1 or 2",
                    i + 1
                ))
            })?;
            if !Literal::from_dimacs(*lit)?.holds(eta) {
                return Err(param(format!(
                    "clause {}: literal {lit} is false under the assignment",
                    i + 1
                )));
            }
        }
        indices.extend(clause_solution(c, *pos)?);
    }
    Solution::from_indices(instance, indices)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SatDecoding {
    pub assignment: Vec<bool>,
    /// Variables whose gadget uses at least four segments (1-based).
    pub overpaid_variables: Vec<usize>,
    /// Clauses whose gadget uses at least twelve segments (1-based).
    pub overpaid_clauses: Vec<usize>,
}

/// Reads an assignment off a cover: a variable is true when its gadget is
/// overpaid or its true-segment is used.
pub fn decode_sat_assignment(
    instance: &Instance,
    meta: &SatMeta,
    s: &Solution,
) -> Result<SatDecoding> {
    let report = verify_cover(instance, s, None)?;
    if !report.covered {
        return Err(param(format!(
            "not a cover: {} points uncovered, first is {}",
            report.uncovered_points.len(),
            report.uncovered_points[0]
        )));
    }
    let mut out = SatDecoding {
        assignment: Vec::with_capacity(meta.n),
        overpaid_variables: Vec::new(),
        overpaid_clauses: Vec::new(),
    };
    for (i, v) in meta.variables.iter().enumerate() {
        let used = v.segments().iter().filter(|&&x| s.contains(x)).count();
        if used >= 4 {
            out.overpaid_variables.push(i + 1);
            out.assignment.push(true);
        } else {
            out.assignment.push(s.contains(v.x_true_segment));
        }
    }
    for (i, c) in meta.clauses.iter().enumerate() {
        if c.segments.iter().filter(|&&x| s.contains(x)).count() >= 12 {
            out.overpaid_clauses.push(i + 1);
        }
    }
    Ok(out)
}
