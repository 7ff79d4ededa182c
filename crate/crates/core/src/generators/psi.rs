use std::collections::{BTreeMap, BTreeSet};

use num_traits::Pow;
use serde::{Deserialize, Serialize};

use super::choice::{add_choice_gadget, build_choice_cover, Chain, ChoiceMeta};
use super::serialize_rational;
use crate::error::{param, Result};
use crate::geometry::{integer, Point, Rational, Segment};
use crate::instance::{Instance, InstanceBuilder, Solution};

/// A partitioned subgraph isomorphism instance: a 3-regular pattern `H` on
/// vertices `1..=k` and a host graph `G` on vertices `0..g_vertices`, whose
/// vertex `u` has color `coloring[u]` in `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiInput {
    pub k: usize,
    pub h_edges: Vec<(usize, usize)>,
    pub g_vertices: usize,
    pub g_edges: Vec<(usize, usize)>,
    pub coloring: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiEdge {
    pub u: usize,
    pub v: usize,
    /// Position of the edge on the x-axis.
    pub xi: usize,
    pub segment: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiColor {
    pub color: usize,
    /// Neighbors of `color` in `H`, in the order of their edge classes.
    pub neighbors: [usize; 3],
    /// `vertices[j]` is the vertex of `G` behind chain `j` of the gadget.
    pub vertices: Vec<usize>,
    pub gadget: ChoiceMeta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiMeta {
    pub k: usize,
    pub ell: usize,
    /// Number of edges of the padded host graph.
    pub n: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub delta: Rational,
    /// `k·(N + 1 - 6/N²) + δ·ℓ`.
    #[serde(serialize_with = "serialize_rational")]
    pub budget: Rational,
    /// Cardinality `11k/2` of the intended solution.
    pub k_prime: usize,
    pub h_edges: Vec<(usize, usize)>,
    /// Coloring of the padded host graph; copies are appended after the
    /// original vertices.
    pub coloring: Vec<usize>,
    /// `copy_of[c]` is the original vertex behind padded vertex `g_vertices + c`.
    pub copy_of: Vec<usize>,
    pub edges: Vec<PsiEdge>,
    pub colors: Vec<PsiColor>,
}

fn normalize(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

fn validate(p: &PsiInput) -> Result<BTreeSet<(usize, usize)>> {
    let mut h = BTreeSet::new();
    let mut degree = vec![0usize; p.k + 1];
    for &(a, b) in &p.h_edges {
        if a == 0 || b == 0 || a > p.k || b > p.k || a == b {
            return Err(param(format!(
                "pattern edge ({a}, {b}) is not between distinct vertices of 1..={}",
                p.k
            )));
        }
        if !h.insert(normalize(a, b)) {
            return Err(param(format!("pattern edge ({a}, {b}) is repeated")));
        }
        degree[a] += 1;
        degree[b] += 1;
    }
    if p.k == 0 {
        return Err(param("the pattern graph needs at least one vertex"));
    }
    if let Some(a) = (1..=p.k).find(|&a| degree[a] != 3) {
        return Err(param(format!(
            "pattern graph is not 3-regular: vertex {a} has degree {}",
            degree[a]
        )));
    }
    if p.coloring.len() != p.g_vertices {
        return Err(param(format!(
            "{} colors for {} host vertices",
            p.coloring.len(),
            p.g_vertices
        )));
    }
    if let Some((u, &c)) = p
        .coloring
        .iter()
        .enumerate()
        .find(|(_, &c)| c == 0 || c > p.k)
    {
        return Err(param(format!(
            "host vertex {u} has color {c} outside 1..={}",
            p.k
        )));
    }
    let mut g = BTreeSet::new();
    for &(u, v) in &p.g_edges {
        if u >= p.g_vertices || v >= p.g_vertices || u == v {
            return Err(param(format!(
                "host edge ({u}, {v}) is not between distinct vertices of 0..{}",
                p.g_vertices
            )));
        }
        if !g.insert(normalize(u, v)) {
            return Err(param(format!("host edge ({u}, {v}) is repeated")));
        }
        if !h.contains(&normalize(p.coloring[u], p.coloring[v])) {
            return Err(param(format!(
                "host edge ({u}, {v}) joins colors {} and {}, which are not adjacent in the pattern",
                p.coloring[u], p.coloring[v]
            )));
        }
    }
    Ok(h)
}

/// Reduction to weighted segment set cover. The host graph is padded by
/// copying its highest-degree vertex until it has more than `100k` edges.
pub fn gen_psi(p: &PsiInput) -> Result<(Instance, PsiMeta)> {
    let h = validate(p)?;
    let k = p.k;
    let ell = h.len();

    let mut coloring = p.coloring.clone();
    let mut edges: Vec<(usize, usize)> = p.g_edges.iter().map(|&(u, v)| normalize(u, v)).collect();
    let mut copy_of = Vec::new();
    if edges.len() <= 100 * k {
        let mut degree = vec![0usize; p.g_vertices];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let Some(source) = (0..p.g_vertices)
            .filter(|&u| degree[u] > 0)
            .max_by_key(|&u| (degree[u], std::cmp::Reverse(u)))
        else {
            return Err(param("the host graph has no edges to pad with"));
        };
        let incident: Vec<usize> = edges
            .iter()
            .filter_map(|&(u, v)| {
                if u == source {
                    Some(v)
                } else if v == source {
                    Some(u)
                } else {
                    None
                }
            })
            .collect();
        while edges.len() <= 100 * k {
            let copy = coloring.len();
            coloring.push(coloring[source]);
            copy_of.push(source);
            edges.extend(incident.iter().map(|&w| normalize(w, copy)));
        }
    }

    // Group the host edges by pattern edge; ξ numbers the classes consecutively.
    let mut classes: BTreeMap<(usize, usize), Vec<(usize, usize)>> =
        h.iter().map(|&e| (e, Vec::new())).collect();
    for &(u, v) in &edges {
        classes
            .get_mut(&normalize(coloring[u], coloring[v]))
            .expect("validated")
            .push((u, v));
    }
    let n = edges.len();
    let mut xi_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut class_rank: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut next = 1;
    for (rank, (ab, list)) in classes.iter().enumerate() {
        class_rank.insert(*ab, rank);
        for &e in list {
            xi_of.insert(e, next);
            next += 1;
        }
    }

    let mut b = InstanceBuilder::new();
    let mut colors = Vec::new();
    for a in 1..=k {
        let mut neighbors: Vec<usize> = h
            .iter()
            .filter_map(|&(x, y)| {
                if x == a {
                    Some(y)
                } else if y == a {
                    Some(x)
                } else {
                    None
                }
            })
            .collect();
        neighbors.sort_by_key(|&nb| class_rank[&normalize(a, nb)]);
        let neighbors: [usize; 3] = neighbors.try_into().expect("3-regular");
        let mut vertices = Vec::new();
        let mut chains = Vec::new();
        for u in (0..coloring.len()).filter(|&u| coloring[u] == a) {
            let sets: Vec<Vec<usize>> = neighbors
                .iter()
                .map(|&nb| {
                    let mut set: Vec<usize> = classes[&normalize(a, nb)]
                        .iter()
                        .filter(|&&(x, y)| x == u || y == u)
                        .map(|e| xi_of[e])
                        .collect();
                    set.sort_unstable();
                    set
                })
                .collect();
            if sets.iter().all(|s| !s.is_empty()) {
                vertices.push(u);
                chains.push(Chain::new(sets));
            }
        }
        let gadget = add_choice_gadget(
            &mut b,
            n,
            &chains,
            &integer(a as i64),
            true,
            &format!("c{a}:"),
        )?;
        colors.push(PsiColor {
            color: a,
            neighbors,
            vertices,
            gadget,
        });
    }

    let delta = Rational::new(1.into(), num_bigint::BigInt::from(n).pow(4u32));
    let mut edge_metas = Vec::new();
    for &(u, v) in &edges {
        let xi = xi_of[&(u, v)];
        let x = integer(xi as i64);
        let s = Segment::new(
            Point::new(x.clone(), integer(coloring[u] as i64)),
            Point::new(x, integer(coloring[v] as i64)),
        );
        let segment = b.add_segment(s, delta.clone(), format!("edge{u}-{v}"));
        edge_metas.push(PsiEdge { u, v, xi, segment });
    }

    let nn = Rational::from_integer(n.into());
    let per_color = &nn + integer(1) - integer(6) / (&nn * &nn);
    let budget = integer(k as i64) * per_color + &delta * integer(ell as i64);
    let meta = PsiMeta {
        k,
        ell,
        n,
        delta,
        budget,
        k_prime: 11 * k / 2,
        h_edges: h.into_iter().collect(),
        coloring,
        copy_of,
        edges: edge_metas,
        colors,
    };
    Ok((b.build()?, meta))
}

/// The solution of cardinality `11k/2` and weight equal to the budget built
/// from an embedding `phi`, where `phi[a - 1]` is the host vertex of pattern
/// vertex `a` (padded numbering).
pub fn build_psi_solution(instance: &Instance, meta: &PsiMeta, phi: &[usize]) -> Result<Solution> {
    if phi.len() != meta.k {
        return Err(param(format!(
            "embedding has {} entries, pattern has {} vertices",
            phi.len(),
            meta.k
        )));
    }
    let edge_of: BTreeMap<(usize, usize), &PsiEdge> = meta
        .edges
        .iter()
        .map(|e| (normalize(e.u, e.v), e))
        .collect();
    let mut indices = Vec::new();
    for &(a, b) in &meta.h_edges {
        let (u, v) = (phi[a - 1], phi[b - 1]);
        let e = edge_of.get(&normalize(u, v)).ok_or_else(|| {
            param(format!(
                "pattern edge ({a}, {b}) maps to non-edge ({u}, {v})"
            ))
        })?;
        indices.push(e.segment);
    }
    for color in &meta.colors {
        let a = color.color;
        let u = phi[a - 1];
        if meta.coloring.get(u) != Some(&a) {
            return Err(param(format!(
                "vertex {u} chosen for pattern vertex {a} does not have color {a}"
            )));
        }
        let j = color
            .vertices
            .iter()
            .position(|&w| w == u)
            .ok_or_else(|| param(format!("vertex {u} has no gadget chain for color {a}")))?;
        let pick: Vec<usize> = color
            .neighbors
            .iter()
            .map(|&nb| edge_of[&normalize(u, phi[nb - 1])].xi)
            .collect();
        indices.extend(
            build_choice_cover(instance, &color.gadget, j, &pick)?
                .indices()
                .iter()
                .copied(),
        );
    }
    Solution::from_indices(instance, indices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::verify_cover;

    fn k4() -> Vec<(usize, usize)> {
        vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    }

    /// `K4` planted on vertices 0..4 plus one decoy per color.
    fn planted() -> PsiInput {
        let mut g_edges: Vec<(usize, usize)> = k4().iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        g_edges.extend([(4, 1), (5, 2), (6, 7), (4, 7)]);
        PsiInput {
            k: 4,
            h_edges: k4(),
            g_vertices: 8,
            g_edges,
            coloring: vec![1, 2, 3, 4, 1, 2, 3, 4],
        }
    }

    #[test]
    fn k4_solution_hits_budget() {
        let (inst, meta) = gen_psi(&planted()).unwrap();
        assert!(meta.n > 400);
        assert!(inst.segments().iter().all(|s| s.segment.is_axis_parallel()));
        let s = build_psi_solution(&inst, &meta, &[0, 1, 2, 3]).unwrap();
        assert_eq!(s.len(), 22);
        assert_eq!(meta.k_prime, 22);
        assert_eq!(s.weight(), &meta.budget);
        assert!(verify_cover(&inst, &s, None).unwrap().covered);
    }

    #[test]
    fn xi_is_a_bijection_with_contiguous_classes() {
        let (_, meta) = gen_psi(&planted()).unwrap();
        let mut xs: Vec<usize> = meta.edges.iter().map(|e| e.xi).collect();
        xs.sort_unstable();
        assert_eq!(xs, (1..=meta.n).collect::<Vec<_>>());
        for &(a, b) in &meta.h_edges {
            let mut class: Vec<usize> = meta
                .edges
                .iter()
                .filter(|e| normalize(meta.coloring[e.u], meta.coloring[e.v]) == (a, b))
                .map(|e| e.xi)
                .collect();
            class.sort_unstable();
            if let (Some(&lo), Some(&hi)) = (class.first(), class.last()) {
                assert_eq!(hi - lo + 1, class.len());
            }
        }
    }

    #[test]
    fn rejections() {
        let mut p = planted();
        p.h_edges = vec![(1, 2)];
        assert!(gen_psi(&p).is_err());
        let mut p = planted();
        p.g_edges.push((0, 4));
        assert!(gen_psi(&p).is_err());
        let (inst, meta) = gen_psi(&planted()).unwrap();
        assert!(build_psi_solution(&inst, &meta, &[4, 1, 2, 3]).is_err());
        assert!(build_psi_solution(&inst, &meta, &[1, 0, 2, 3]).is_err());
    }

    #[test]
    fn vertices_missing_a_neighbor_class_get_no_chain() {
        let (_, meta) = gen_psi(&planted()).unwrap();
        // Vertex 4 (color 1) only reaches color 2 and color 4.
        assert!(!meta.colors[0].vertices.contains(&4));
        assert!(meta.colors[0].vertices.contains(&0));
    }
}
