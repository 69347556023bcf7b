//! Numerical fluxes: the diffusive flux built from the jump, the derivative
//! average and the second-derivative jump, and the upwind-biased convective
//! flux.

use std::fmt;
use std::str::FromStr;

use crate::basis::Jet;
use crate::error::{Error, Result};
use crate::field::{node_traces, BrokenFunction};
use crate::mesh::{Mesh, ShishkinMesh};

/// Penalty coefficient `beta0_j` as a function of the node index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// `beta1^2 / (eps N)` on the coarse nodes, `beta1^2` at the transition
    /// node, `beta1^2 N` on the fine nodes.
    HalfOrder,
    /// `beta1^2` coarse, `beta1^2 / N` at the transition, `beta1^2 N^2` fine.
    /// Intended for `eps <= C N^-2` and `sigma >= k + 2`.
    FullOrder,
    /// `2` coarse, `1 / N` at the transition, `N^2` fine (used with
    /// `k = 1`, `beta1 = 0`).
    K1Experiment,
    Constant(f64),
}

impl Schedule {
    /// `beta0_j` for a mesh with `n` elements.
    pub fn beta0(&self, beta1: f64, n: usize, epsilon: f64, j: usize) -> f64 {
        let nf = n as f64;
        let half = n / 2;
        let b2 = beta1 * beta1;
        let pick = |coarse: f64, mid: f64, fine: f64| match j.cmp(&half) {
            std::cmp::Ordering::Less => coarse,
            std::cmp::Ordering::Equal => mid,
            std::cmp::Ordering::Greater => fine,
        };
        match *self {
            Schedule::HalfOrder => pick(b2 / (epsilon * nf), b2, b2 * nf),
            Schedule::FullOrder => pick(b2, b2 / nf, b2 * nf * nf),
            Schedule::K1Experiment => pick(2.0, 1.0 / nf, nf * nf),
            Schedule::Constant(c) => c,
        }
    }

    fn needs_beta1(&self) -> bool {
        matches!(self, Schedule::HalfOrder | Schedule::FullOrder)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::HalfOrder => f.write_str("half-order"),
            Schedule::FullOrder => f.write_str("full-order"),
            Schedule::K1Experiment => f.write_str("k1-experiment"),
            Schedule::Constant(c) => write!(f, "constant:{c}"),
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    /// Accepts `half-order`, `full-order`, `k1-experiment`, `constant:<c>`
    /// and `constant(<c>)`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::Unknown { kind: "schedule", name: s.to_string() };
        match s.trim() {
            "half-order" => Ok(Schedule::HalfOrder),
            "full-order" => Ok(Schedule::FullOrder),
            "k1-experiment" => Ok(Schedule::K1Experiment),
            other => {
                let value = other
                    .strip_prefix("constant:")
                    .or_else(|| other.strip_prefix("constant(").and_then(|r| r.strip_suffix(')')))
                    .ok_or_else(unknown)?;
                value.trim().parse().map(Schedule::Constant).map_err(|_| unknown())
            }
        }
    }
}

/// Everything that pins down the two numerical fluxes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParams {
    /// Upwind bias in `[1/2, 1]`; `1` is the pure upwind flux.
    pub theta: f64,
    /// Weight of the second-derivative jump in the diffusive flux.
    pub beta1: f64,
    pub schedule: Schedule,
    /// Whether the diffusive flux at `x_0` and `x_N` carries the penalty
    /// `beta0_j [v]_j / dh_j` in addition to the one-sided derivative.
    pub boundary_penalty: bool,
}

impl FluxParams {
    pub fn new(theta: f64, beta1: f64, schedule: Schedule) -> Result<Self> {
        if !(0.5..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta must lie in [1/2, 1], got {theta}")));
        }
        if !(beta1 >= 0.0) || !beta1.is_finite() {
            return Err(Error::InvalidParameter(format!("beta1 must be nonnegative, got {beta1}")));
        }
        if schedule.needs_beta1() && beta1 == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "schedule {schedule} vanishes identically when beta1 = 0"
            )));
        }
        if let Schedule::Constant(c) = schedule {
            if !(c > 0.0) {
                return Err(Error::InvalidParameter(format!("constant penalty must be positive, got {c}")));
            }
        }
        Ok(Self { theta, beta1, schedule, boundary_penalty: true })
    }

    /// Keeps the diffusive flux at the two boundary nodes equal to the bare
    /// one-sided derivative.
    pub fn without_boundary_penalty(mut self) -> Self {
        self.boundary_penalty = false;
        self
    }

    /// `1 / (2k^2 + 2k)`.
    pub fn default_beta1(k: usize) -> f64 {
        let k = k as f64;
        1.0 / (2.0 * k * k + 2.0 * k)
    }

    pub fn beta0(&self, n: usize, epsilon: f64, j: usize) -> f64 {
        self.schedule.beta0(self.beta1, n, epsilon, j)
    }
}

/// `beta0_j` on a Shishkin mesh.
pub fn beta0_schedule(params: &FluxParams, mesh: &ShishkinMesh, j: usize) -> Result<f64> {
    let n = mesh.n_elements();
    if j > n {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    let value = params.beta0(n, mesh.epsilon(), j);
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositivePenalty { node: j, value })
    }
}

/// One-sided limits at a node. `left` is absent at `x_0`, `right` at `x_N`;
/// `exterior` stands in for the missing side's value (Dirichlet data).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeTrace {
    pub left: Option<Jet>,
    pub right: Option<Jet>,
    pub exterior: f64,
}

impl NodeTrace {
    pub fn interior(left: Jet, right: Jet) -> Self {
        Self { left: Some(left), right: Some(right), exterior: 0.0 }
    }

    pub fn of(f: &(impl BrokenFunction + ?Sized), mesh: &Mesh, j: usize) -> Self {
        let (left, right) = node_traces(f, mesh, j);
        Self { left, right, exterior: 0.0 }
    }

    /// `[.]` of component `c` (0 value, 1 first, 2 second derivative):
    /// `v(x^+) - v(x^-)`, with `[v]_0 = v(x_0^+)` and `[v]_N = -v(x_N^-)`
    /// when the exterior value is zero.
    pub fn jump_of(&self, c: usize) -> f64 {
        let ext = if c == 0 { self.exterior } else { 0.0 };
        match (self.left, self.right) {
            (Some(l), Some(r)) => r[c] - l[c],
            (None, Some(r)) => r[c] - ext,
            (Some(l), None) => ext - l[c],
            (None, None) => 0.0,
        }
    }

    /// `{.}` of component `c`; the one-sided value at the boundary.
    pub fn average_of(&self, c: usize) -> f64 {
        match (self.left, self.right) {
            (Some(l), Some(r)) => 0.5 * (l[c] + r[c]),
            (None, Some(r)) => r[c],
            (Some(l), None) => l[c],
            (None, None) => 0.0,
        }
    }

    pub fn jump(&self) -> f64 {
        self.jump_of(0)
    }

    pub fn average(&self) -> f64 {
        self.average_of(0)
    }

    pub fn is_boundary(&self) -> bool {
        self.left.is_none() || self.right.is_none()
    }
}

/// Diffusive flux: `beta0/dh [v] + {v'} + beta1 dh [v'']` at interior
/// nodes, the one-sided derivative at the boundary (plus the penalty term
/// when `boundary_penalty` is set).
pub fn hat_flux(trace: &NodeTrace, beta0: f64, delta_h: f64, beta1: f64, boundary_penalty: bool) -> f64 {
    if trace.is_boundary() {
        let penalty = if boundary_penalty { beta0 / delta_h * trace.jump() } else { 0.0 };
        penalty + trace.average_of(1)
    } else {
        beta0 / delta_h * trace.jump() + trace.average_of(1) + beta1 * delta_h * trace.jump_of(2)
    }
}

/// Upwind-biased flux `theta v^- + (1 - theta) v^+`; the inflow value at
/// `x_0` and the outflow trace at `x_N`.
pub fn tilde_flux(trace: &NodeTrace, theta: f64) -> f64 {
    match (trace.left, trace.right) {
        (Some(l), Some(r)) => theta * l[0] + (1.0 - theta) * r[0],
        (None, _) => trace.exterior,
        (Some(l), None) => l[0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(v: f64, d1: f64, d2: f64) -> Jet {
        [v, d1, d2]
    }

    #[test]
    fn schedules() {
        let n = 16;
        for j in [0, 3, 7] {
            assert_eq!(Schedule::FullOrder.beta0(0.5, n, 1e-8, j), 0.25);
            assert_eq!(Schedule::K1Experiment.beta0(0.0, n, 1e-8, j), 2.0);
            assert_eq!(Schedule::HalfOrder.beta0(0.5, n, 1e-8, j), 0.25 / (1e-8 * 16.0));
        }
        assert_eq!(Schedule::FullOrder.beta0(0.5, n, 1e-8, 8), 0.25 / 16.0);
        assert_eq!(Schedule::HalfOrder.beta0(0.5, n, 1e-8, 8), 0.25);
        for j in [9, 16] {
            assert_eq!(Schedule::FullOrder.beta0(0.5, n, 1e-8, j), 0.25 * 256.0);
            assert_eq!(Schedule::K1Experiment.beta0(0.0, n, 1e-8, j), 256.0);
            assert_eq!(Schedule::HalfOrder.beta0(0.5, n, 1e-8, j), 0.25 * 16.0);
        }
        assert_eq!(Schedule::K1Experiment.beta0(0.0, n, 1e-8, 8), 1.0 / 16.0);
        assert_eq!(Schedule::Constant(2.0).beta0(0.0, n, 1.0, 5), 2.0);
    }

    #[test]
    fn schedule_parsing() {
        for s in [Schedule::HalfOrder, Schedule::FullOrder, Schedule::K1Experiment, Schedule::Constant(2.5)] {
            assert_eq!(s.to_string().parse::<Schedule>().unwrap(), s);
        }
        assert_eq!("constant(3)".parse::<Schedule>().unwrap(), Schedule::Constant(3.0));
        assert!("bogus".parse::<Schedule>().is_err());
    }

    #[test]
    fn params_validation() {
        assert!(FluxParams::new(0.4, 0.0, Schedule::K1Experiment).is_err());
        assert!(FluxParams::new(1.1, 0.0, Schedule::K1Experiment).is_err());
        assert!(FluxParams::new(2.0 / 3.0, 0.0, Schedule::FullOrder).is_err());
        assert!(FluxParams::new(2.0 / 3.0, 0.0, Schedule::HalfOrder).is_err());
        assert!(FluxParams::new(2.0 / 3.0, 0.0, Schedule::Constant(0.0)).is_err());
        assert!(FluxParams::new(0.5, 0.0, Schedule::K1Experiment).is_ok());
        assert_eq!(FluxParams::default_beta1(1), 0.25);
        assert_eq!(FluxParams::default_beta1(2), 1.0 / 12.0);
    }

    #[test]
    fn shishkin_schedule_lookup() {
        let mesh = ShishkinMesh::new(8, 1e-8, 3.0, 2.0).unwrap();
        let p = FluxParams::new(2.0 / 3.0, 0.25, Schedule::FullOrder).unwrap();
        assert_eq!(beta0_schedule(&p, &mesh, 4).unwrap(), 0.0625 / 8.0);
        assert!(beta0_schedule(&p, &mesh, 9).is_err());
    }

    #[test]
    fn hat_flux_cases() {
        // Smooth function: only the derivative survives.
        let smooth = NodeTrace::interior(jet(1.0, 0.7, 3.0), jet(1.0, 0.7, 3.0));
        assert_eq!(hat_flux(&smooth, 2.0, 0.05, 0.25, true), 0.7);
        let jumped = NodeTrace::interior(jet(0.0, 1.0, 0.0), jet(0.1, 1.0, 0.0));
        assert!((hat_flux(&jumped, 2.0, 0.05, 0.0, true) - 5.0).abs() < 1e-13);
        let curved = NodeTrace::interior(jet(0.0, 0.0, 0.0), jet(0.0, 0.0, 4.0));
        assert!((hat_flux(&curved, 2.0, 0.05, 0.25, true) - 0.05).abs() < 1e-15);
        let left_end = NodeTrace { left: None, right: Some(jet(2.0, 3.0, 0.0)), exterior: 0.0 };
        assert_eq!(hat_flux(&left_end, 2.0, 0.5, 0.0, false), 3.0);
        assert_eq!(hat_flux(&left_end, 2.0, 0.5, 0.0, true), 3.0 + 8.0);
        let right_end = NodeTrace { left: Some(jet(2.0, -1.0, 0.0)), right: None, exterior: 0.0 };
        assert_eq!(hat_flux(&right_end, 2.0, 0.5, 0.0, false), -1.0);
    }

    #[test]
    fn tilde_flux_cases() {
        let t = NodeTrace::interior(jet(3.0, 0.0, 0.0), jet(0.0, 0.0, 0.0));
        assert!((tilde_flux(&t, 2.0 / 3.0) - 2.0).abs() < 1e-15);
        assert_eq!(tilde_flux(&t, 1.0), 3.0);
        let left_end = NodeTrace { left: None, right: Some(jet(5.0, 0.0, 0.0)), exterior: 0.0 };
        assert_eq!(tilde_flux(&left_end, 0.7), 0.0);
        let right_end = NodeTrace { left: Some(jet(5.0, 0.0, 0.0)), right: None, exterior: 0.0 };
        assert_eq!(tilde_flux(&right_end, 0.7), 5.0);
    }

    #[test]
    fn jumps_and_averages() {
        let t = NodeTrace::interior(jet(1.0, 0.0, 0.0), jet(3.0, 0.0, 0.0));
        assert_eq!((t.jump(), t.average()), (2.0, 2.0));
        let end = NodeTrace { left: Some(jet(5.0, 0.0, 0.0)), right: None, exterior: 0.0 };
        assert_eq!((end.jump(), end.average()), (-5.0, 5.0));
        let start = NodeTrace { left: None, right: Some(jet(4.0, 0.0, 0.0)), exterior: 0.0 };
        assert_eq!((start.jump(), start.average()), (4.0, 4.0));
    }
}
