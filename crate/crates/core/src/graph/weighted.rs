//! Connected vertex-weighted graphs with edge conductances.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which piece of a model graph a vertex belongs to, and how deep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLabel {
    /// 0 for the root, then one index per glued component.
    pub component: u32,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    weights: Vec<f64>,
    /// `(neighbour, conductance)` lists.
    adj: Vec<Vec<(usize, f64)>>,
    labels: Option<Vec<VertexLabel>>,
    /// Vertices on an artificial truncation frontier.
    frontier: Vec<usize>,
}

impl WeightedGraph {
    /// Graph with the default conductance `c(u,v) = (m(u) + m(v)) / 2`.
    pub fn new(weights: Vec<f64>, edges: &[(usize, usize)]) -> Result<Self> {
        let with_c: Vec<(usize, usize, f64)> = edges
            .iter()
            .map(|&(u, v)| {
                let c = match (weights.get(u), weights.get(v)) {
                    (Some(a), Some(b)) => 0.5 * (a + b),
                    _ => f64::NAN,
                };
                (u, v, c)
            })
            .collect();
        Self::with_conductances(weights, &with_c)
    }

    /// Graph with explicit edge conductances, as for radially lumped models.
    pub fn with_conductances(weights: Vec<f64>, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidGraph(format!("weight of vertex {i} is not positive and finite")));
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for &(u, v, c) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) names a missing vertex")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) has conductance {c}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
            adj[u].push((v, c));
            adj[v].push((u, c));
        }
        let g = Self { weights, adj, labels: None, frontier: Vec::new() };
        let reach = g.distances_from(0).iter().filter(|d| d.is_some()).count();
        if reach != n {
            return Err(Error::InvalidGraph(format!("graph is disconnected ({reach} of {n} vertices reachable)")));
        }
        Ok(g)
    }

    pub fn with_labels(mut self, labels: Vec<VertexLabel>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::InvalidGraph("label count differs from vertex count".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_frontier(mut self, frontier: Vec<usize>) -> Self {
        self.frontier = frontier;
        self
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn labels(&self) -> Option<&[VertexLabel]> {
        self.labels.as_deref()
    }

    pub fn frontier(&self) -> &[usize] {
        &self.frontier
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v, c)` with `u < v`, in vertex order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            for &(v, c) in list {
                if u < v {
                    out.push((u, v, c));
                }
            }
        }
        out
    }

    /// Reversing measure of the conductance walk: `pi(u) = sum_v c(u,v)`.
    pub fn stationary(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|e| e.1).sum()
    }

    /// Hop distances from `root`; `None` for unreachable vertices.
    pub fn distances_from(&self, root: usize) -> Vec<Option<usize>> {
        let mut d = vec![None; self.len()];
        let mut queue = VecDeque::new();
        d[root] = Some(0);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let du = d[u].expect("queued vertices are reached");
            for &(v, _) in &self.adj[u] {
                if d[v].is_none() {
                    d[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        d
    }

    /// Vertices within `r` hops of `root`, in increasing distance.
    pub fn ball(&self, root: usize, r: usize) -> Vec<usize> {
        let d = self.distances_from(root);
        let mut v: Vec<usize> = (0..self.len()).filter(|&i| d[i].is_some_and(|x| x <= r)).collect();
        v.sort_by_key(|&i| (d[i], i));
        v
    }

    /// `mu(B(root, r))` for `r = 0..=r_max`.
    pub fn ball_measures(&self, root: usize, r_max: usize) -> Vec<f64> {
        let d = self.distances_from(root);
        let mut shell = vec![0.0; r_max + 1];
        for (v, dv) in d.iter().enumerate() {
            if let Some(k) = *dv {
                if k <= r_max {
                    shell[k] += self.weights[v];
                }
            }
        }
        let mut acc = 0.0;
        shell
            .iter()
            .map(|s| {
                acc += s;
                acc
            })
            .collect()
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = GraphFile {
            vertices: self.weights.iter().enumerate().map(|(i, &w)| VertexRecord { id: i as u64, weight: w }).collect(),
            edges: self.edges().iter().map(|e| [e.0 as u64, e.1 as u64]).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Reads `{vertices: [{id, weight}], edges: [[id, id]]}` with default conductances.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(s)?;
        let mut index = BTreeMap::new();
        for (i, v) in file.vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {}", v.id)));
            }
        }
        let edges = file
            .edges
            .iter()
            .map(|[a, b]| match (index.get(a), index.get(b)) {
                (Some(&u), Some(&v)) => Ok((u, v)),
                _ => Err(Error::InvalidGraph(format!("edge [{a},{b}] names a missing vertex"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.vertices.iter().map(|v| v.weight).collect(), &edges)
    }
}

#[derive(Serialize, Deserialize)]
struct VertexRecord {
    id: u64,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<VertexRecord>,
    edges: Vec<[u64; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_graphs() {
        assert!(WeightedGraph::new(vec![1.0, 1.0], &[]).is_err());
        assert!(WeightedGraph::new(vec![1.0, 1.0], &[(0, 0), (0, 1)]).is_err());
        assert!(WeightedGraph::new(vec![1.0, -1.0], &[(0, 1)]).is_err());
        assert!(WeightedGraph::new(vec![1.0, 1.0], &[(0, 1), (1, 0)]).is_err());
        assert!(WeightedGraph::new(vec![1.0], &[]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let g = WeightedGraph::new(vec![1.0, 4.0, 9.0], &[(0, 1), (1, 2)]).unwrap();
        let s = g.to_json_string().unwrap();
        let h = WeightedGraph::from_json_str(&s).unwrap();
        assert_eq!(g, h);
        assert!(WeightedGraph::from_json_str(r#"{"vertices":[{"id":3,"weight":1}],"edges":[[3,4]]}"#).is_err());
    }

    #[test]
    fn measures_and_conductances() {
        let g = WeightedGraph::new(vec![1.0, 4.0, 9.0], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.ball_measures(0, 3), vec![1.0, 5.0, 14.0, 14.0]);
        assert_eq!(g.stationary(1), 2.5 + 6.5);
    }
}
