//! The energy norm, broken Sobolev error norms and node jump utilities.

use crate::basis::gauss_legendre;
use crate::ddg::assembly::check_points;
use crate::ddg::flux::{FluxParams, NodeTrace};
use crate::error::{Error, Result};
use crate::field::{BrokenFunction, DGFunction, Difference};
use crate::mesh::Mesh;
use crate::problem::ProblemSpec;

/// Sample points per element for the maximum norm.
pub const LINF_SAMPLES: usize = 50;

/// `([v]_j, {v}_j)` with the boundary conventions `[v]_0 = {v}_0 = v(x_0^+)`,
/// `[v]_N = -v(x_N^-)`, `{v}_N = v(x_N^-)`.
pub fn jump_and_average(v: &DGFunction<'_>, j: usize) -> Result<(f64, f64)> {
    let n = v.mesh().n_elements();
    if j > n {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    let t = NodeTrace::of(v, v.mesh(), j);
    Ok((t.jump(), t.average()))
}

/// Part of the mesh an error is measured on. `Coarse` covers elements
/// `1..=N/2` and nodes `0..=N/2`, `Fine` the remaining elements and nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Region {
    #[default]
    All,
    Coarse,
    Fine,
}

impl Region {
    fn elements(self, mesh: &Mesh) -> std::ops::Range<usize> {
        let (n, t) = (mesh.n_elements(), mesh.transition_index());
        match self {
            Region::All => 0..n,
            Region::Coarse => 0..t,
            Region::Fine => t..n,
        }
    }

    fn nodes(self, mesh: &Mesh) -> std::ops::Range<usize> {
        let (n, t) = (mesh.n_elements(), mesh.transition_index());
        match self {
            Region::All => 0..n + 1,
            Region::Coarse => 0..t + 1,
            Region::Fine => t + 1..n + 1,
        }
    }
}

/// Error measures of `v - w`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorBundle {
    pub l2: f64,
    pub linf: f64,
    pub h1_semi_broken: f64,
    pub energy: f64,
    /// `sqrt(eps sum_j beta0_j / dh_j [.]_j^2)`, the penalty part of `energy`.
    pub jump_l2: f64,
}

/// Squared pieces `(sum ||v'||^2, sum ||v||^2, sum beta0/dh [v]^2)`.
fn squared_parts(
    v: &(impl BrokenFunction + ?Sized),
    mesh: &Mesh,
    k: usize,
    spec: &ProblemSpec,
    params: &FluxParams,
    region: Region,
) -> (f64, f64, f64) {
    let rule = gauss_legendre(check_points(k));
    let (mut h1, mut l2) = (0.0, 0.0);
    for e in region.elements(mesh) {
        let h = mesh.width(e);
        for (xh, w) in rule.iter() {
            let jet = v.local(e, xh, mesh.to_physical(e, xh));
            h1 += w * 0.5 * h * jet[1] * jet[1];
            l2 += w * 0.5 * h * jet[0] * jet[0];
        }
    }
    let n = mesh.n_elements();
    let mut jumps = 0.0;
    for j in region.nodes(mesh) {
        let dh = mesh.delta_h(j).expect("node in range");
        let jump = NodeTrace::of(v, mesh, j).jump();
        jumps += params.beta0(n, spec.epsilon, j) / dh * jump * jump;
    }
    (h1, l2, jumps)
}

/// `||v||_E` with `gamma` from `spec` and the penalties of `params`.
pub fn energy_norm(v: &DGFunction<'_>, spec: &ProblemSpec, params: &FluxParams) -> f64 {
    let (h1, l2, jumps) = squared_parts(v, v.mesh(), v.degree(), spec, params, Region::All);
    (spec.epsilon * h1 + spec.gamma * l2 + spec.epsilon * jumps).sqrt()
}

/// Error bundle of `v - w` on `region`. Quadrature uses `2k + 8` points per
/// element, the maximum norm [`LINF_SAMPLES`] equispaced points.
#[allow(clippy::too_many_arguments)]
pub fn error_bundle(
    v: &(impl BrokenFunction + ?Sized),
    w: &(impl BrokenFunction + ?Sized),
    mesh: &Mesh,
    k: usize,
    spec: &ProblemSpec,
    params: &FluxParams,
    region: Region,
) -> Result<ErrorBundle> {
    if w.derivatives() < 1 || v.derivatives() < 1 {
        return Err(Error::MissingDerivative("first derivative needed for the H1 and energy norms"));
    }
    let diff = Difference::new(v, w);
    let (h1, l2, jumps) = squared_parts(&diff, mesh, k, spec, params, region);
    let mut linf = 0.0f64;
    for e in region.elements(mesh) {
        for s in 0..LINF_SAMPLES {
            let xh = -1.0 + 2.0 * s as f64 / (LINF_SAMPLES - 1) as f64;
            linf = linf.max(diff.local(e, xh, mesh.to_physical(e, xh))[0].abs());
        }
    }
    let eps = spec.epsilon;
    Ok(ErrorBundle {
        l2: l2.sqrt(),
        linf,
        h1_semi_broken: h1.sqrt(),
        energy: (eps * h1 + spec.gamma * l2 + eps * jumps).sqrt(),
        jump_l2: (eps * jumps).sqrt(),
    })
}

/// Energy norm of `v - w` over the whole mesh.
pub fn energy_error(
    v: &(impl BrokenFunction + ?Sized),
    w: &(impl BrokenFunction + ?Sized),
    mesh: &Mesh,
    k: usize,
    spec: &ProblemSpec,
    params: &FluxParams,
) -> Result<f64> {
    error_bundle(v, w, mesh, k, spec, params, Region::All).map(|b| b.energy)
}
