//! Brute-force oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use citeproj::metrics::MetricVector;
use citeproj::{PaperId, ProjectionPair};

pub fn pair(n: usize, edges: &[(usize, usize)]) -> ProjectionPair {
    let cited = (0..n).map(|i| PaperId::new(format!("c{i:03}")).unwrap()).collect();
    ProjectionPair::new(PaperId::new("v0").unwrap(), cited, edges.to_vec()).unwrap()
}

/// Undirected adjacency matrix; every metric is evaluated by direct enumeration.
pub struct Dense {
    adj: Vec<Vec<bool>>,
}

impl Dense {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a != b {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
        Dense { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn deg(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&x| x).count()
    }

    pub fn density(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        let mut m = 0;
        for a in 0..n {
            for b in a + 1..n {
                m += usize::from(self.adj[a][b]);
            }
        }
        m as f64 / (n * (n - 1) / 2) as f64
    }

    pub fn clustering(&self) -> f64 {
        let n = self.n();
        if n == 0 {
            return 0.0;
        }
        let mut total = 0.0;
        for v in 0..n {
            let mut possible = 0;
            let mut closed = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if self.adj[v][a] && self.adj[v][b] {
                        possible += 1;
                        closed += usize::from(self.adj[a][b]);
                    }
                }
            }
            if possible > 0 {
                total += closed as f64 / possible as f64;
            }
        }
        total / n as f64
    }

    pub fn connectivity(&self) -> f64 {
        let n = self.n();
        if n == 0 {
            return 0.0;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for a in 0..n {
            for b in 0..n {
                if self.adj[a][b] {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let mut sizes = HashMap::new();
        for v in 0..n {
            *sizes.entry(find(&mut parent, v)).or_insert(0usize) += 1;
        }
        *sizes.values().max().unwrap() as f64 / n as f64
    }

    pub fn simple_paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        fn go(d: &Dense, path: &mut Vec<usize>, t: usize, out: &mut Vec<Vec<usize>>) {
            let last = *path.last().unwrap();
            if last == t {
                out.push(path.clone());
                return;
            }
            for w in 0..d.n() {
                if d.adj[last][w] && !path.contains(&w) {
                    path.push(w);
                    go(d, path, t, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut vec![s], t, &mut out);
        out
    }

    /// Normalized betweenness from explicit enumeration of all shortest paths.
    pub fn betweenness(&self) -> Vec<f64> {
        let n = self.n();
        let mut bc = vec![0.0; n];
        if n < 3 {
            return bc;
        }
        for s in 0..n {
            for t in s + 1..n {
                let paths = self.simple_paths(s, t);
                let Some(shortest) = paths.iter().map(Vec::len).min() else {
                    continue;
                };
                let geodesics: Vec<_> = paths.iter().filter(|p| p.len() == shortest).collect();
                for (v, b) in bc.iter_mut().enumerate() {
                    if v == s || v == t {
                        continue;
                    }
                    let through = geodesics.iter().filter(|p| p.contains(&v)).count();
                    *b += through as f64 / geodesics.len() as f64;
                }
            }
        }
        let pairs = ((n - 1) * (n - 2) / 2) as f64;
        bc.iter().map(|b| b / pairs).collect()
    }

    pub fn constraint(&self, i: usize, standard: bool) -> f64 {
        let n = self.n();
        let p: Vec<Vec<f64>> = (0..n)
            .map(|a| {
                let d = self.deg(a);
                (0..n)
                    .map(|b| if self.adj[a][b] { 1.0 / d as f64 } else { 0.0 })
                    .collect()
            })
            .collect();
        let mut total = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let term = if standard {
                let indirect: f64 = (0..n).filter(|&k| k != i && k != j).map(|k| p[i][k] * p[k][j]).sum();
                p[i][j] + indirect
            } else {
                (0..n).filter(|&k| k != j).map(|k| p[i][k] * p[k][j]).sum()
            };
            total += term * term;
        }
        total
    }
}

pub fn oracle_vector(p: &ProjectionPair, standard: bool) -> MetricVector {
    let gp = Dense::new(p.n_cited(), p.gp_edges());
    let gp0 = Dense::new(p.n_cited() + 1, &p.gp0_edges());
    let f = p.focal_index();
    MetricVector {
        density: gp.density(),
        clustering: gp.clustering(),
        connectivity: gp.connectivity(),
        max_betweenness: gp.betweenness().into_iter().fold(0.0, f64::max),
        focal_betweenness: gp0.betweenness()[f],
        focal_constraint: gp0.constraint(f, standard),
    }
}

