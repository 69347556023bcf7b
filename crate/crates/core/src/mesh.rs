//! Partitions of `[0, 1]`, including the piecewise-uniform Shishkin mesh
//! that resolves a boundary layer at `x = 1`.
//!
//! Elements are indexed from zero: element `e` spans `[x_e, x_{e+1}]`.
//! Nodes are indexed `0..=N`.

use std::ops::Deref;

use crate::error::{Error, Result};

/// A partition `0 = x_0 < x_1 < ... < x_N = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
    widths: Vec<f64>,
}

impl Mesh {
    /// Builds a mesh from its nodes; widths are taken as node differences.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let widths: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        Self::from_parts(nodes, widths)
    }

    fn from_parts(nodes: Vec<f64>, widths: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh("need at least one element".into()));
        }
        if widths.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::InvalidMesh("nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, widths })
    }

    /// `n` equal elements on `[0, 1]`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMesh("need at least one element".into()));
        }
        let h = 1.0 / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
        nodes[n] = 1.0;
        Self::from_parts(nodes, vec![h; n])
    }

    /// Number of elements `N`.
    pub fn n_elements(&self) -> usize {
        self.widths.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    /// Width of element `e`.
    pub fn width(&self, e: usize) -> f64 {
        self.widths[e]
    }

    pub fn midpoint(&self, e: usize) -> f64 {
        self.nodes[e] + 0.5 * self.widths[e]
    }

    /// Index `N/2` of the node separating the coarse and fine halves.
    pub fn transition_index(&self) -> usize {
        self.n_elements() / 2
    }

    /// `min(h_j, h_{j+1})` at node `j`, with ghost widths `h_0 := h_1` and
    /// `h_{N+1} := h_N`.
    pub fn delta_h(&self, j: usize) -> Result<f64> {
        let n = self.n_elements();
        if j > n {
            return Err(Error::IndexOutOfRange { index: j, max: n });
        }
        let left = self.widths[j.max(1) - 1];
        let right = self.widths[j.min(n - 1)];
        Ok(left.min(right))
    }

    /// Physical coordinate of reference point `xhat` in element `e`.
    pub fn to_physical(&self, e: usize, xhat: f64) -> f64 {
        self.midpoint(e) + 0.5 * self.widths[e] * xhat
    }

    /// Reference coordinate of `x` with respect to element `e`.
    pub fn to_reference(&self, e: usize, x: f64) -> f64 {
        2.0 * (x - self.midpoint(e)) / self.widths[e]
    }

    /// Element containing `x`; nodes belong to the element on their left
    /// except `x_0`.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.n_elements();
        match self.nodes.partition_point(|&node| node < x) {
            0 => 0,
            p => (p - 1).min(n - 1),
        }
    }
}

/// The piecewise-uniform layer-adapted mesh: `N/2` equal elements on
/// `[0, 1 - tau]` and `N/2` equal elements on `[1 - tau, 1]`, with
/// `tau = min(1/2, (sigma * epsilon / alpha) * ln N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShishkinMesh {
    mesh: Mesh,
    tau: f64,
    sigma: f64,
    alpha: f64,
    epsilon: f64,
}

impl ShishkinMesh {
    pub fn new(n: usize, epsilon: f64, sigma: f64, alpha: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidMesh(format!(
                "element count must be even and at least 4, got {n}"
            )));
        }
        for (name, v) in [("epsilon", epsilon), ("sigma", sigma), ("alpha", alpha)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidMesh(format!("{name} must be positive, got {v}")));
            }
        }
        let nf = n as f64;
        let tau = (sigma * epsilon / alpha * nf.ln()).min(0.5);
        let half = n / 2;
        let coarse = 2.0 * (1.0 - tau) / nf;
        let fine = 2.0 * tau / nf;

        // Closed form per node; no accumulation across the fine half.
        let mut nodes = Vec::with_capacity(n + 1);
        for j in 0..=half {
            nodes.push(coarse * j as f64);
        }
        for j in half + 1..=n {
            nodes.push(1.0 - fine * (n - j) as f64);
        }
        nodes[half] = 1.0 - tau;
        nodes[n] = 1.0;

        let mut widths = vec![coarse; half];
        widths.extend(std::iter::repeat_n(fine, half));
        let mesh = Mesh::from_parts(nodes, widths)?;
        Ok(Self { mesh, tau, sigma, alpha, epsilon })
    }

    /// Transition width `tau`; the transition point is `1 - tau`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Whether `tau` was clamped to `1/2` (the mesh is then uniform).
    pub fn is_clamped(&self) -> bool {
        self.tau == 0.5
    }

    pub fn as_mesh(&self) -> &Mesh {
        &self.mesh
    }
}

impl Deref for ShishkinMesh {
    type Target = Mesh;

    fn deref(&self) -> &Mesh {
        &self.mesh
    }
}
