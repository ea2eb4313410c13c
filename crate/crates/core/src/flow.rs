//! Dinic max-flow over floating-point capacities.
//!
//! Residual capacities at or below `tol` count as saturated, which keeps
//! augmentation finite under rounding.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    level: Vec<i32>,
    cursor: Vec<usize>,
    tol: f64,
}

impl FlowNetwork {
    pub fn new(nodes: usize, tol: f64) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            edges: Vec::new(),
            level: vec![-1; nodes],
            cursor: vec![0; nodes],
            tol,
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0.0 });
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > self.tol && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
    }

    fn augment(&mut self, u: usize, t: usize, pushed: f64) -> f64 {
        if u == t {
            return pushed;
        }
        while self.cursor[u] < self.adj[u].len() {
            let e = self.adj[u][self.cursor[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > self.tol && self.level[to] == self.level[u] + 1 {
                let got = self.augment(to, t, pushed.min(cap));
                if got > 0.0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            self.cursor[u] += 1;
        }
        0.0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let got = self.augment(s, t, f64::INFINITY);
                if got <= 0.0 {
                    break;
                }
                total += got;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network; call after
    /// [`FlowNetwork::max_flow`]. This is the source side of a minimum cut.
    pub fn source_side(&mut self, s: usize) -> Vec<bool> {
        self.bfs(s);
        self.level.iter().map(|&l| l >= 0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_network() {
        // CLRS figure 26.1: max flow 23.
        let mut g = FlowNetwork::new(6, 1e-12);
        for &(u, v, c) in &[
            (0, 1, 16.0),
            (0, 2, 13.0),
            (2, 1, 4.0),
            (1, 3, 12.0),
            (3, 2, 9.0),
            (2, 4, 14.0),
            (4, 3, 7.0),
            (3, 5, 20.0),
            (4, 5, 4.0),
        ] {
            g.add_edge(u, v, c);
        }
        assert!((g.max_flow(0, 5) - 23.0).abs() < 1e-12);
        let side = g.source_side(0);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn disconnected_is_zero() {
        let mut g = FlowNetwork::new(3, 1e-12);
        g.add_edge(0, 1, 5.0);
        assert_eq!(g.max_flow(0, 2), 0.0);
    }
}
