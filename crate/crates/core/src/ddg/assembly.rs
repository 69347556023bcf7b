//! Discrete weak form: element integrals, interface terms and the banded
//! linear system they produce.

use crate::basis::{gauss_legendre, legendre_all, legendre_endpoint, Jet, QuadratureRule};
use crate::ddg::banded::BandMatrix;
use crate::ddg::flux::{hat_flux, tilde_flux, FluxParams, NodeTrace};
use crate::error::{Error, Result};
use crate::field::{BrokenFunction, DGFunction};
use crate::mesh::Mesh;
use crate::problem::ProblemSpec;

/// Tolerance on the normwise backward error of the direct solve.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

/// Block-tridiagonal system of dimension `N (k + 1)`, stored banded.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub k: usize,
    pub n_elements: usize,
    pub matrix: BandMatrix,
    pub rhs: Vec<f64>,
}

/// Diagnostics of a direct solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    /// `||A c - rhs|| / ||rhs||` (infinity norms).
    pub relative_residual: f64,
    /// `||A c - rhs|| / (||A|| ||c|| + ||rhs||)`.
    pub backward_error: f64,
    pub pivot_ratio: f64,
}

/// Shared context for evaluating the bilinear form.
struct FormContext<'a> {
    spec: &'a ProblemSpec,
    mesh: &'a Mesh,
    params: &'a FluxParams,
}

impl FormContext<'_> {
    fn penalty(&self, j: usize) -> (f64, f64) {
        let n = self.mesh.n_elements();
        (self.params.beta0(n, self.spec.epsilon, j), self.mesh.delta_h(j).expect("node in range"))
    }

    /// Interface part of `B(u, v)` at node `j`:
    /// `eps (u_hat [v] + [u] {v'}) - a(x_j) u_tilde [v]`.
    fn node_form(&self, j: usize, u: &NodeTrace, v: &NodeTrace) -> f64 {
        let (beta0, dh) = self.penalty(j);
        let eps = self.spec.epsilon;
        let p = self.params;
        let vj = v.jump();
        eps * (hat_flux(u, beta0, dh, p.beta1, p.boundary_penalty) * vj + u.jump() * v.average_of(1))
            - self.spec.a(self.mesh.node(j)) * tilde_flux(u, p.theta) * vj
    }

    /// Integrand of the element part of `B(u, v)`.
    fn element_integrand(&self, x: f64, u: &Jet, v: &Jet) -> f64 {
        let s = self.spec;
        s.epsilon * u[1] * v[1] - s.a(x) * u[0] * v[1] - s.a_prime(x) * u[0] * v[0] + s.b(x) * u[0] * v[0]
    }

    /// Trial trace carrying only the Dirichlet data at a boundary node.
    fn data_trace(&self, j: usize) -> Option<NodeTrace> {
        let n = self.mesh.n_elements();
        let (left, right) = self.spec.boundary;
        let zero = [0.0; 3];
        if j == 0 && left != 0.0 {
            Some(NodeTrace { left: None, right: Some(zero), exterior: left })
        } else if j == n && right != 0.0 {
            Some(NodeTrace { left: Some(zero), right: None, exterior: right })
        } else {
            None
        }
    }

    fn check_penalties(&self) -> Result<()> {
        for j in 0..=self.mesh.n_elements() {
            let (beta0, _) = self.penalty(j);
            if !(beta0 > 0.0) {
                return Err(Error::NonPositivePenalty { node: j, value: beta0 });
            }
        }
        Ok(())
    }
}

/// Trace of a single basis function `P_l` living on the given side of node `j`.
fn basis_trace(n: usize, j: usize, on_left: bool, jet: Jet) -> NodeTrace {
    let zero = [0.0; 3];
    let (left, right) = if on_left { (jet, zero) } else { (zero, jet) };
    NodeTrace {
        left: (j > 0).then_some(left),
        right: (j < n).then_some(right),
        exterior: 0.0,
    }
}

fn scale_jet(p: Jet, s: f64) -> Jet {
    [p[0], p[1] * s, p[2] * s * s]
}

/// Global indices and node traces of the basis functions that touch node
/// `j`: the `k + 1` modes of the element on its left, then those on its right.
pub(crate) fn node_dofs(mesh: &Mesh, k: usize, j: usize) -> Vec<(usize, NodeTrace)> {
    let n = mesh.n_elements();
    let m = k + 1;
    let mut dofs = Vec::with_capacity(2 * m);
    if j > 0 {
        let s = 2.0 / mesh.width(j - 1);
        for l in 0..m {
            dofs.push(((j - 1) * m + l, basis_trace(n, j, true, scale_jet(legendre_endpoint(l, true), s))));
        }
    }
    if j < n {
        let s = 2.0 / mesh.width(j);
        for l in 0..m {
            dofs.push((j * m + l, basis_trace(n, j, false, scale_jet(legendre_endpoint(l, false), s))));
        }
    }
    dofs
}

/// Physical jets of the `k + 1` basis functions of an element of width `h`
/// at each point of `rule`.
pub(crate) fn element_tables(rule: &QuadratureRule, k: usize, h: f64) -> Vec<Vec<Jet>> {
    let s = 2.0 / h;
    rule.points.iter().map(|&xh| legendre_all(k, xh).into_iter().map(|p| scale_jet(p, s)).collect()).collect()
}

/// Number of Gauss points used during assembly.
pub fn assembly_points(k: usize) -> usize {
    k + 3
}

/// Number of Gauss points used by consistency and error checks.
pub fn check_points(k: usize) -> usize {
    2 * k + 8
}

/// Assembles the DDG system for `spec` on `mesh` with degree-`k` elements.
pub fn assemble(spec: &ProblemSpec, mesh: &Mesh, k: usize, params: &FluxParams) -> Result<AssembledSystem> {
    let ctx = FormContext { spec, mesh, params };
    ctx.check_penalties()?;
    Ok(assemble_unchecked(&ctx, k))
}

/// Assembly without the penalty positivity check, for diagnostics that
/// probe deliberately bad parameters.
pub(crate) fn assemble_diagnostic(spec: &ProblemSpec, mesh: &Mesh, k: usize, params: &FluxParams) -> AssembledSystem {
    assemble_unchecked(&FormContext { spec, mesh, params }, k)
}

fn assemble_unchecked(ctx: &FormContext<'_>, k: usize) -> AssembledSystem {
    let (spec, mesh) = (ctx.spec, ctx.mesh);
    let n = mesh.n_elements();
    let m = k + 1;
    let band = 2 * m - 1;
    let mut matrix = BandMatrix::zeros(n * m, band, band);
    let mut rhs = vec![0.0; n * m];

    let rule = gauss_legendre(assembly_points(k));
    for e in 0..n {
        let h = mesh.width(e);
        let tables = element_tables(&rule, k, h);
        for (q, (xh, w)) in rule.iter().enumerate() {
            let x = mesh.to_physical(e, xh);
            let jw = w * 0.5 * h;
            let fx = spec.f(x);
            let phi = &tables[q];
            for (i, pi) in phi.iter().enumerate() {
                rhs[e * m + i] += jw * fx * pi[0];
                for (l, pl) in phi.iter().enumerate() {
                    matrix.add(e * m + i, e * m + l, jw * ctx.element_integrand(x, pl, pi));
                }
            }
        }
    }

    // Interface terms couple at most the two elements adjacent to a node.
    for j in 0..=n {
        let dofs = node_dofs(mesh, k, j);
        for (row, test) in &dofs {
            for (col, trial) in &dofs {
                matrix.add(*row, *col, ctx.node_form(j, trial, test));
            }
        }
        if let Some(data) = ctx.data_trace(j) {
            for (row, test) in &dofs {
                rhs[*row] -= ctx.node_form(j, &data, test);
            }
        }
    }

    AssembledSystem { k, n_elements: n, matrix, rhs }
}

impl AssembledSystem {
    /// Direct banded solve; fails on a singular pivot or when the backward
    /// error exceeds [`SOLVE_TOLERANCE`].
    pub fn solve_with_report<'m>(&self, mesh: &'m Mesh) -> Result<(DGFunction<'m>, SolveReport)> {
        if mesh.n_elements() != self.n_elements {
            return Err(Error::Mismatch("system and mesh differ in element count".into()));
        }
        let lu = self.matrix.factor()?;
        let mut x = lu.solve(&self.rhs);
        // One step of iterative refinement.
        let r: Vec<f64> = self.matrix.matvec(&x).iter().zip(&self.rhs).map(|(ax, b)| b - ax).collect();
        for (xi, di) in x.iter_mut().zip(lu.solve(&r)) {
            *xi += di;
        }
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |acc, a| acc.max(a.abs()));
        let ax = self.matrix.matvec(&x);
        let res: Vec<f64> = ax.iter().zip(&self.rhs).map(|(a, b)| a - b).collect();
        let (rn, bn, xn) = (inf(&res), inf(&self.rhs), inf(&x));
        let report = SolveReport {
            relative_residual: if bn > 0.0 { rn / bn } else { rn },
            backward_error: rn / (self.matrix.norm_inf() * xn + bn).max(f64::MIN_POSITIVE),
            pivot_ratio: lu.pivot_ratio(),
        };
        if !(report.backward_error <= SOLVE_TOLERANCE) {
            return Err(Error::Inaccurate { residual: report.backward_error, tolerance: SOLVE_TOLERANCE });
        }
        Ok((DGFunction::from_coeffs(mesh, self.k, x)?, report))
    }

    pub fn solve<'m>(&self, mesh: &'m Mesh) -> Result<DGFunction<'m>> {
        self.solve_with_report(mesh).map(|(v, _)| v)
    }
}

/// Assembles and solves in one step.
pub fn solve_problem<'m>(
    spec: &ProblemSpec,
    mesh: &'m Mesh,
    k: usize,
    params: &FluxParams,
) -> Result<DGFunction<'m>> {
    assemble(spec, mesh, k, params)?.solve(mesh)
}

/// `B(u, v)` evaluated by `2k + 8`-point quadrature on every element.
pub fn bilinear_apply(
    spec: &ProblemSpec,
    mesh: &Mesh,
    k: usize,
    params: &FluxParams,
    u: &(impl BrokenFunction + ?Sized),
    v: &(impl BrokenFunction + ?Sized),
) -> f64 {
    bilinear_apply_with(spec, mesh, params, &gauss_legendre(check_points(k)), u, v)
}

/// `B(u, v)` with an explicit quadrature rule.
pub fn bilinear_apply_with(
    spec: &ProblemSpec,
    mesh: &Mesh,
    params: &FluxParams,
    rule: &QuadratureRule,
    u: &(impl BrokenFunction + ?Sized),
    v: &(impl BrokenFunction + ?Sized),
) -> f64 {
    let ctx = FormContext { spec, mesh, params };
    let n = mesh.n_elements();
    let mut total = 0.0;
    for e in 0..n {
        let h = mesh.width(e);
        for (xh, w) in rule.iter() {
            let x = mesh.to_physical(e, xh);
            total += w * 0.5 * h * ctx.element_integrand(x, &u.local(e, xh, x), &v.local(e, xh, x));
        }
    }
    for j in 0..=n {
        total += ctx.node_form(j, &NodeTrace::of(u, mesh, j), &NodeTrace::of(v, mesh, j));
    }
    total
}

/// `F(v)`: the source integral plus the Dirichlet data terms.
pub fn load_apply(
    spec: &ProblemSpec,
    mesh: &Mesh,
    params: &FluxParams,
    rule: &QuadratureRule,
    v: &(impl BrokenFunction + ?Sized),
) -> f64 {
    let ctx = FormContext { spec, mesh, params };
    let n = mesh.n_elements();
    let mut total = 0.0;
    for e in 0..n {
        let h = mesh.width(e);
        for (xh, w) in rule.iter() {
            let x = mesh.to_physical(e, xh);
            total += w * 0.5 * h * spec.f(x) * v.local(e, xh, x)[0];
        }
    }
    for j in [0, n] {
        if let Some(data) = ctx.data_trace(j) {
            total -= ctx.node_form(j, &data, &NodeTrace::of(v, mesh, j));
        }
    }
    total
}
