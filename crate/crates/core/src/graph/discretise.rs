//! Greedy ε-nets of point clouds in H3.

use serde::Serialize;

use super::weighted::WeightedGraph;
use crate::error::{Error, Result};
use crate::hyperbolic::{ball_volume, dist, PointH3};
use crate::orbits::OrbitBall;

#[derive(Debug, Clone)]
pub struct Net {
    pub graph: WeightedGraph,
    pub points: Vec<PointH3>,
    pub eps: f64,
}

/// Maximal ε-separated subset, edges at distance `<= 2 eps`, weight `vol(B(eps))`.
///
/// Points are inserted in order of distance to the first point, ties kept in
/// input order. A net whose graph is disconnected is an error.
pub fn discretise(points: &[PointH3], eps: f64) -> Result<Net> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive (got {eps})")));
    }
    let first = points.first().ok_or_else(|| Error::Domain("no points to discretise".into()))?;
    let mut order: Vec<(f64, usize)> = points.iter().enumerate().map(|(i, p)| (dist(first, p), i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut net: Vec<PointH3> = Vec::new();
    for (_, i) in order {
        let p = points[i];
        if net.iter().all(|q| dist(q, &p) > eps) {
            net.push(p);
        }
    }
    let mut edges = Vec::new();
    for i in 0..net.len() {
        for j in i + 1..net.len() {
            if dist(&net[i], &net[j]) <= 2.0 * eps {
                edges.push((i, j));
            }
        }
    }
    let graph = WeightedGraph::new(vec![ball_volume(eps); net.len()], &edges)?;
    Ok(Net { graph, points: net, eps })
}

/// `g y` for every element of the ball.
pub fn orbit_points(ball: &OrbitBall) -> Vec<PointH3> {
    ball.elements.iter().map(|g| g.apply(&ball.y)).collect()
}

/// Fitted constants with `d_G <= a d_H + b` and `d_H <= a d_G + b` on every pair.
#[derive(Debug, Clone, Serialize)]
pub struct QuasiIsometry {
    pub a: f64,
    pub b: f64,
    pub graph_diameter: usize,
    pub hyperbolic_diameter: f64,
    pub vertices: usize,
    pub edges: usize,
}

impl QuasiIsometry {
    pub fn diameter_ratio(&self) -> f64 {
        self.graph_diameter as f64 / self.hyperbolic_diameter
    }
}

pub fn quasi_isometry(net: &Net) -> QuasiIsometry {
    let n = net.points.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        let dg = net.graph.distances_from(i);
        for j in i + 1..n {
            let hops = dg[j].expect("nets are connected") as f64;
            pairs.push((hops, dist(&net.points[i], &net.points[j])));
        }
    }
    // slope from pairs far enough apart that the additive constant is negligible
    let far = |&&(g, h): &&(f64, f64)| h >= 2.0 * net.eps && g > 0.0;
    let hi = pairs.iter().filter(far).map(|(g, h)| g / h).fold(1.0, f64::max);
    let lo = pairs.iter().filter(far).map(|(g, h)| g / h).fold(1.0, f64::min);
    let a = hi.max(1.0 / lo);
    let b = pairs.iter().map(|&(g, h)| (g - a * h).max(h - a * g)).fold(0.0, f64::max);
    QuasiIsometry {
        a,
        b,
        graph_diameter: pairs.iter().map(|p| p.0 as usize).max().unwrap_or(0),
        hyperbolic_diameter: pairs.iter().map(|p| p.1).fold(0.0, f64::max),
        vertices: n,
        edges: net.graph.edge_count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{enumerate_ball, Builtin, EnumerationConfig};

    fn geodesic(n: usize, spacing: f64) -> Vec<PointH3> {
        (0..n).map(|k| PointH3::new(0.0, 0.0, (k as f64 * spacing).exp()).unwrap()).collect()
    }

    #[test]
    fn geodesic_is_a_path() {
        let net = discretise(&geodesic(9, 1.0), 0.6).unwrap();
        assert_eq!(net.graph.len(), 9);
        assert_eq!(net.graph.edge_count(), 8);
        assert!((0..9).all(|v| net.graph.neighbors(v).len() <= 2));
        // spacing 1 with eps 0.4 leaves no edges at all
        assert!(matches!(discretise(&geodesic(9, 1.0), 0.4), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn single_point_and_empty() {
        let net = discretise(&[PointH3::basepoint()], 0.4).unwrap();
        assert_eq!((net.graph.len(), net.graph.edge_count()), (1, 0));
        assert!(discretise(&[], 0.4).is_err());
        let q = quasi_isometry(&net);
        assert_eq!(q.graph_diameter, 0);
    }

    #[test]
    fn dense_cloud_is_thinned() {
        let pts = geodesic(41, 0.1);
        let net = discretise(&pts, 0.35).unwrap();
        for i in 0..net.points.len() {
            for j in i + 1..net.points.len() {
                assert!(dist(&net.points[i], &net.points[j]) > 0.35);
            }
        }
        assert!(pts.iter().all(|p| net.points.iter().any(|q| dist(p, q) <= 0.35)));
    }

    #[test]
    fn cyclic_orbit_is_a_path_up_to_quasi_isometry() {
        let g = Builtin::Cyclic { length: 1.0 }.presentation().unwrap();
        let j = PointH3::basepoint();
        let ball = enumerate_ball(&g, &j, &j, 12.0, &EnumerationConfig::default()).unwrap();
        let net = discretise(&orbit_points(&ball), 0.6).unwrap();
        assert_eq!(net.graph.len(), 25);
        assert_eq!(net.graph.edge_count(), 24);
        let q = quasi_isometry(&net);
        assert_eq!(q.graph_diameter, 24);
        assert!((q.hyperbolic_diameter - 24.0).abs() < 1e-9);
        let r = q.diameter_ratio();
        assert!(r >= 1.0 / q.a - 1e-9 && r <= q.a + 1e-9);
        assert!((q.a - 1.0).abs() < 1e-9 && q.b < 1e-9);
    }

    #[test]
    fn schottky_orbit_net_is_a_tree() {
        let g = Builtin::Schottky { length: 3.0 }.presentation().unwrap();
        let j = PointH3::basepoint();
        let ball = enumerate_ball(&g, &j, &j, 8.0, &EnumerationConfig::default()).unwrap();
        let net = discretise(&orbit_points(&ball), 1.6).unwrap();
        assert_eq!(net.graph.len(), ball.len());
        assert_eq!(net.graph.edge_count(), net.graph.len() - 1);
        let q = quasi_isometry(&net);
        assert!(q.a >= 1.0 / 3.0 && q.a.is_finite());
    }
}
