//! Dense-matrix brute force of the mass-based graph recurrence.
//!
//! Written against the model equations directly, with `std` floating point
//! instead of `libm` and a full `n x n` matrix where 0 means "no edge". Shares
//! no code with the engine.

#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct Dense {
    pub mu: f64,
    pub sigma: f64,
    pub mass: Vec<f64>,
    pub alive: Vec<bool>,
    pub w: Vec<Vec<f64>>,
    pub phase: u64,
}

#[derive(Debug, Clone)]
pub enum DenseEvent {
    /// 1-based endpoints.
    Edge(usize, usize, f64),
    Node(f64),
    Prune(f64),
}

impl Dense {
    pub fn f(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let z = (x.ln() - self.mu) / self.sigma;
        x.ln() + 1.0 / (x * PI * self.sigma * (1.0 + z * z))
    }

    /// `edges` use 1-based indices.
    pub fn new(mu: f64, sigma: f64, masses: &[f64], edges: &[(usize, usize, f64)]) -> Self {
        let n = masses.len();
        let mut w = vec![vec![0.0; n]; n];
        for &(i, j, x) in edges {
            w[i - 1][j - 1] = x;
            w[j - 1][i - 1] = x;
        }
        Dense {
            mu,
            sigma,
            mass: masses.to_vec(),
            alive: vec![true; n],
            w,
            phase: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.mass.len()
    }

    pub fn settle(&mut self) {
        let n = self.n();
        let m0 = self.mass.clone();
        let w0 = self.w.clone();
        let mut m1 = vec![0.0; n];
        for i in 0..n {
            m1[i] = m0[i] + (0..n).map(|k| self.f(w0[k][i])).sum::<f64>();
        }
        for i in 0..n {
            for j in 0..n {
                if w0[i][j] != 0.0 {
                    self.w[i][j] = w0[i][j] + (m1[i] + m1[j]).ln();
                }
            }
        }
        self.mass = m1;
        self.phase = 1;
    }

    pub fn apply(&mut self, event: &DenseEvent) {
        match *event {
            DenseEvent::Edge(k, l, wbar) => self.add_edge(k - 1, l - 1, wbar),
            DenseEvent::Node(m) => self.add_node(m),
            DenseEvent::Prune(theta) => self.prune(theta),
        }
        self.phase += 1;
    }

    fn add_edge(&mut self, k: usize, l: usize, wbar: f64) {
        assert_eq!(self.w[k][l], 0.0, "oracle: edge already present");
        let prev = self.w.clone();
        let mk_prev = self.mass[k];
        let ml_prev = self.mass[l];
        self.mass[k] = mk_prev + self.f(wbar);
        self.mass[l] = ml_prev + self.f(wbar);
        let new_w = wbar + (self.mass[k] + self.mass[l]).ln();
        for p in 0..self.n() {
            if p != l && prev[k][p] != 0.0 {
                let v = prev[k][p] + (self.mass[k] - mk_prev).ln();
                self.w[k][p] = v;
                self.w[p][k] = v;
            }
            if p != k && prev[p][l] != 0.0 {
                let v = prev[p][l] + (self.mass[l] - ml_prev).ln();
                self.w[p][l] = v;
                self.w[l][p] = v;
            }
        }
        self.w[k][l] = new_w;
        self.w[l][k] = new_w;
    }

    fn add_node(&mut self, m: f64) {
        self.mass.push(m);
        self.alive.push(true);
        for row in &mut self.w {
            row.push(0.0);
        }
        let n = self.n();
        self.w.push(vec![0.0; n]);
    }

    fn prune(&mut self, theta: f64) {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if self.w[i][j] != 0.0 && self.w[i][j] < theta {
                    self.w[i][j] = 0.0;
                }
            }
        }
        for i in 0..n {
            if self.alive[i] && self.w[i].iter().all(|&x| x == 0.0) {
                self.alive[i] = false;
            }
        }
    }

    /// Unconnected pairs of alive nodes, 1-based, ascending.
    pub fn free_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.alive[i] && self.alive[j] && self.w[i][j] == 0.0 {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }
}
