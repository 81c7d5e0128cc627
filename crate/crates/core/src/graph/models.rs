//! Star graphs, weighted rays and trees glued at a common root.
//!
//! A [`RadialModel`] lists the pieces glued at the root. It can be built
//! vertex by vertex, or lumped into a path whose level `k` carries the total
//! weight and conductance of that level. For walks started at the root and
//! for radial ground states the two agree exactly.

use serde::{Deserialize, Serialize};

use super::weighted::{VertexLabel, WeightedGraph};
use crate::error::{Error, Result};

/// Largest explicit graph we are willing to build.
const MAX_EXPLICIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    /// Unit weights.
    UnitRay,
    /// Weight `(1+n)^2` at depth `n`.
    SquareRay,
    /// Weight `e^{2n}` at depth `n`.
    ExpRay,
    /// Unit weights, two children per vertex.
    BinaryTree,
}

impl Component {
    /// Weight of a single vertex at depth `k`.
    pub fn vertex_weight(self, k: usize) -> f64 {
        match self {
            Component::UnitRay | Component::BinaryTree => 1.0,
            Component::SquareRay => ((1 + k) as f64).powi(2),
            Component::ExpRay => (2.0 * k as f64).exp(),
        }
    }

    /// Number of vertices at depth `k >= 1`.
    pub fn width(self, k: usize) -> f64 {
        match self {
            Component::BinaryTree => 2f64.powi(k as i32),
            _ => 1.0,
        }
    }

    /// Total weight at depth `k`.
    pub fn level_weight(self, k: usize) -> f64 {
        self.width(k) * self.vertex_weight(k)
    }

    /// Total conductance between depths `k` and `k+1`.
    pub fn level_conductance(self, k: usize) -> f64 {
        self.width(k + 1) * 0.5 * (self.vertex_weight(k) + self.vertex_weight(k + 1))
    }

    /// Components modelling the end of a degenerate manifold, truncated only for computation.
    fn truncated(self) -> bool {
        matches!(self, Component::UnitRay | Component::SquareRay)
    }
}

/// Model of a geometrically finite end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GfModel {
    /// `e^{2n}`-weighted ray.
    WeightedRay,
    BinaryTree,
}

impl GfModel {
    pub fn component(self) -> Component {
        match self {
            GfModel::WeightedRay => Component::ExpRay,
            GfModel::BinaryTree => Component::BinaryTree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub component: Component,
    pub copies: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialModel {
    pub parts: Vec<Part>,
}

impl RadialModel {
    /// `d` unit rays of length `depth`.
    pub fn star(d: usize, depth: usize) -> Result<Self> {
        if d == 0 || depth == 0 {
            return Err(Error::Domain(format!("star needs d >= 1 and L >= 1 (got d={d}, L={depth})")));
        }
        Ok(Self { parts: vec![Part { component: Component::UnitRay, copies: d, depth }] })
    }

    /// `d` square-weighted rays of length `ray_depth` and `p` GF components of depth `gf_depth`.
    pub fn mixed(d: usize, p: usize, ray_depth: usize, gf: GfModel, gf_depth: usize) -> Result<Self> {
        if d == 0 || ray_depth == 0 {
            return Err(Error::Domain(format!("mixed model needs d >= 1 and L >= 1 (got d={d}, L={ray_depth})")));
        }
        let mut parts = vec![Part { component: Component::SquareRay, copies: d, depth: ray_depth }];
        if p > 0 {
            if gf_depth == 0 {
                return Err(Error::Domain("GF components need depth >= 1".into()));
            }
            parts.push(Part { component: gf.component(), copies: p, depth: gf_depth });
        }
        Ok(Self { parts })
    }

    pub fn explicit_size(&self) -> f64 {
        1.0 + self
            .parts
            .iter()
            .map(|p| p.copies as f64 * (1..=p.depth).map(|k| p.component.width(k)).sum::<f64>())
            .sum::<f64>()
    }

    /// Every vertex of every copy; labels number the copies from 1.
    pub fn explicit(&self) -> Result<WeightedGraph> {
        let size = self.explicit_size();
        if size > MAX_EXPLICIT as f64 {
            return Err(Error::Domain(format!("explicit model would have {size:.3e} vertices")));
        }
        let mut weights = vec![1.0];
        let mut labels = vec![VertexLabel { component: 0, depth: 0 }];
        let mut edges = Vec::new();
        let mut frontier = Vec::new();
        let mut copy = 0u32;
        for part in &self.parts {
            let c = part.component;
            for _ in 0..part.copies {
                copy += 1;
                let mut level = vec![0usize];
                for k in 1..=part.depth {
                    let fan = if c == Component::BinaryTree { 2 } else { 1 };
                    let mut next = Vec::with_capacity(level.len() * fan);
                    for &u in &level {
                        for _ in 0..fan {
                            let v = weights.len();
                            weights.push(c.vertex_weight(k));
                            labels.push(VertexLabel { component: copy, depth: k as u32 });
                            edges.push((u, v));
                            next.push(v);
                        }
                    }
                    level = next;
                }
                if c.truncated() {
                    frontier.extend_from_slice(&level);
                }
            }
        }
        Ok(WeightedGraph::new(weights, &edges)?.with_labels(labels)?.with_frontier(frontier))
    }

    /// One vertex per (part, depth); labels number the parts from 1.
    pub fn lumped(&self) -> Result<WeightedGraph> {
        let mut weights = vec![1.0];
        let mut labels = vec![VertexLabel { component: 0, depth: 0 }];
        let mut edges = Vec::new();
        let mut frontier = Vec::new();
        for (i, part) in self.parts.iter().enumerate() {
            let c = part.component;
            let m = part.copies as f64;
            let mut prev = 0;
            for k in 1..=part.depth {
                let v = weights.len();
                weights.push(m * c.level_weight(k));
                labels.push(VertexLabel { component: i as u32 + 1, depth: k as u32 });
                edges.push((prev, v, m * c.level_conductance(k - 1)));
                prev = v;
            }
            if c.truncated() {
                frontier.push(prev);
            }
        }
        Ok(WeightedGraph::with_conductances(weights, &edges)?.with_labels(labels)?.with_frontier(frontier))
    }
}

/// Root plus `d` unit rays of length `l`; the root is vertex 0.
pub fn build_star(d: usize, l: usize) -> Result<WeightedGraph> {
    RadialModel::star(d, l)?.explicit()
}

/// Root plus `d` square-weighted rays and `p` GF components, all of depth `l`.
pub fn build_mixed(d: usize, p: usize, l: usize, gf: GfModel) -> Result<WeightedGraph> {
    RadialModel::mixed(d, p, l, gf, l)?.explicit()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_shapes() {
        let g = build_star(1, 5).unwrap();
        assert_eq!((g.len(), g.edge_count()), (6, 5));
        let g = build_star(3, 4).unwrap();
        assert_eq!(g.len(), 13);
        assert_eq!(g.neighbors(0).len(), 3);
        let vols = g.ball_measures(0, 4);
        for (r, v) in vols.iter().enumerate() {
            assert_eq!(*v, (3 * r + 1) as f64);
        }
        assert_eq!(g.frontier().len(), 3);
        assert!(build_star(0, 4).is_err());
    }

    #[test]
    fn mixed_audit() {
        assert!(build_mixed(0, 1, 4, GfModel::BinaryTree).is_err());
        let g = build_mixed(2, 1, 3, GfModel::BinaryTree).unwrap();
        // root + 2 rays of 3 + tree with 2+4+8
        assert_eq!(g.len(), 1 + 6 + 14);
        assert_eq!(g.neighbors(0).len(), 4);
        let labels = g.labels().unwrap();
        for (v, l) in labels.iter().enumerate() {
            let want = match l.component {
                0 => 1.0,
                1 | 2 => ((1 + l.depth) as f64).powi(2),
                _ => 1.0,
            };
            assert_eq!(g.weight(v), want);
        }
        let e = build_mixed(1, 1, 3, GfModel::WeightedRay).unwrap();
        assert_eq!(e.weight(e.len() - 1), 6f64.exp());
    }

    #[test]
    fn square_ray_volume_is_cubic() {
        let g = build_mixed(1, 0, 200, GfModel::BinaryTree).unwrap();
        let v = g.ball_measures(0, 200);
        for r in 3..=200usize {
            let r3 = (r as f64).powi(3);
            assert!(v[r] >= r3 / 4.0 && v[r] <= 3.0 * r3);
            let exact = ((r + 1) * (r + 2) * (2 * r + 3) / 6) as f64;
            assert_eq!(v[r], exact);
        }
    }

    #[test]
    fn lumped_levels_sum_explicit_levels() {
        let m = RadialModel::mixed(2, 1, 4, GfModel::BinaryTree, 5).unwrap();
        let ex = m.explicit().unwrap();
        let lu = m.lumped().unwrap();
        let mut tot_ex = std::collections::BTreeMap::new();
        let parts_of = |c: u32| {
            if c == 0 {
                0
            } else if c <= 2 {
                1
            } else {
                2
            }
        };
        for (v, l) in ex.labels().unwrap().iter().enumerate() {
            *tot_ex.entry((parts_of(l.component), l.depth)).or_insert(0.0) += ex.weight(v);
        }
        for (v, l) in lu.labels().unwrap().iter().enumerate() {
            assert_eq!(tot_ex[&(l.component, l.depth)], lu.weight(v));
        }
        assert_eq!(lu.stationary(0), ex.stationary(0));
    }
}
