//! Local and global projections onto `V_h`: the Gauss–Radau projection,
//! the upwind-biased global projection `P^(theta)`, the Gauss–Lobatto
//! interpolant, and the composite interpolant that uses `P^(theta)` on the
//! coarse half of a layer mesh and Gauss–Lobatto interpolation on the fine
//! half.
//!
//! Moment integrals use `2k + 8` Gauss points per element. Traces of the
//! projected function are taken as one-sided limits of its restrictions.

use nalgebra::DMatrix;

use crate::basis::{gauss_legendre, gauss_lobatto_nodes, legendre, QuadratureRule};
use crate::error::{Error, Result};
use crate::field::{BrokenFunction, DGFunction};
use crate::mesh::Mesh;

fn moment_rule(k: usize) -> QuadratureRule {
    gauss_legendre(2 * k + 8)
}

/// `(w, P_l)` on the reference element, for `l = 0..k`.
fn reference_moments(w: &(impl BrokenFunction + ?Sized), mesh: &Mesh, e: usize, k: usize, rule: &QuadratureRule) -> Vec<f64> {
    let mut out = vec![0.0; k + 1];
    for (xh, wq) in rule.iter() {
        let value = w.local(e, xh, mesh.to_physical(e, xh))[0];
        for (l, o) in out.iter_mut().enumerate() {
            *o += wq * value * legendre(l, xh)[0];
        }
    }
    out
}

/// Gauss–Radau projection: moments against `P_{k-1}` and the value at the
/// right end of every element match those of `w`.
pub fn gauss_radau_project<'m>(w: &(impl BrokenFunction + ?Sized), mesh: &'m Mesh, k: usize) -> Result<DGFunction<'m>> {
    if k == 0 {
        return Err(Error::InvalidParameter("the Gauss-Radau projection needs k >= 1".into()));
    }
    let rule = moment_rule(k);
    let mut out = DGFunction::zeros(mesh, k);
    for e in 0..mesh.n_elements() {
        let moments = reference_moments(w, mesh, e, k, &rule);
        let right = w.local(e, 1.0, mesh.node(e + 1))[0];
        let c = out.element_mut(e);
        for l in 0..k {
            c[l] = (2.0 * l as f64 + 1.0) / 2.0 * moments[l];
        }
        // P_l(1) = 1 for every l.
        c[k] = right - c[..k].iter().sum::<f64>();
    }
    Ok(out)
}

/// Top-mode corrections `c_j` (one per element) solving
/// `theta c_j + (1 - theta) (-1)^k c_{j+1} = (1 - theta) eta_j` for
/// `j = N-1, ..., 1` with `c_N = 0`; `eta` holds `eta_1..eta_{N-1}`.
pub fn theta_correction(eta: &[f64], theta: f64, k: usize) -> Vec<f64> {
    let n = eta.len() + 1;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut c = vec![0.0; n];
    for j in (0..n - 1).rev() {
        c[j] = (1.0 - theta) * (eta[j] - sign * c[j + 1]) / theta;
    }
    c
}

/// The global projection `P^(theta)`: Gauss–Radau moments, the
/// upwind-biased trace `theta v^- + (1-theta) v^+` of `w` at interior
/// nodes, and `w(x_N^-)` at the right end.
pub fn global_theta_project<'m>(
    w: &(impl BrokenFunction + ?Sized),
    mesh: &'m Mesh,
    k: usize,
    theta: f64,
) -> Result<DGFunction<'m>> {
    if !(theta > 0.5 && theta <= 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (1/2, 1], got {theta}")));
    }
    let mut out = gauss_radau_project(w, mesh, k)?;
    let n = mesh.n_elements();
    let eta: Vec<f64> = (1..n)
        .map(|j| w.local(j, -1.0, mesh.node(j))[0] - out.eval_reference(j, -1.0)[0])
        .collect();
    for (e, c) in theta_correction(&eta, theta, k).into_iter().enumerate() {
        out.element_mut(e)[k] += c;
    }
    Ok(out)
}

/// Modal coefficients from values at the Gauss–Lobatto points, as a
/// reusable inverse Vandermonde matrix.
fn lobatto_inverse(k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let z = gauss_lobatto_nodes(k);
    let v = DMatrix::from_fn(k + 1, k + 1, |s, l| legendre(l, z[s])[0]);
    let inv = v.try_inverse().expect("Legendre-Vandermonde matrix at Lobatto points is invertible");
    (z, inv)
}

/// Elementwise Lagrange interpolation at the `k + 1` Gauss–Lobatto points.
pub fn gauss_lobatto_interpolate<'m>(w: &(impl BrokenFunction + ?Sized), mesh: &'m Mesh, k: usize) -> Result<DGFunction<'m>> {
    if k == 0 {
        return Err(Error::InvalidParameter("Gauss-Lobatto interpolation needs k >= 1".into()));
    }
    let (z, inv) = lobatto_inverse(k);
    let mut out = DGFunction::zeros(mesh, k);
    for e in 0..mesh.n_elements() {
        let values: Vec<f64> = z
            .iter()
            .enumerate()
            .map(|(s, &zh)| {
                let x = if s == 0 {
                    mesh.node(e)
                } else if s == k {
                    mesh.node(e + 1)
                } else {
                    mesh.to_physical(e, zh)
                };
                w.local(e, zh, x)[0]
            })
            .collect();
        let c = out.element_mut(e);
        for l in 0..=k {
            c[l] = (0..=k).map(|s| inv[(l, s)] * values[s]).sum();
        }
    }
    Ok(out)
}

/// `P^(theta) w` on elements `1..=N/2`, `G_k w` on the rest.
pub fn composite_interpolant<'m>(
    w: &(impl BrokenFunction + ?Sized),
    mesh: &'m Mesh,
    k: usize,
    theta: f64,
) -> Result<DGFunction<'m>> {
    let mut out = global_theta_project(w, mesh, k, theta)?;
    let lobatto = gauss_lobatto_interpolate(w, mesh, k)?;
    for e in mesh.transition_index()..mesh.n_elements() {
        out.element_mut(e).copy_from_slice(lobatto.element(e));
    }
    Ok(out)
}

/// Worst violations of the defining conditions of `P^(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaResiduals {
    /// `max |(P w - w, P_l)|` over elements and `l < k`, on the reference element.
    pub moment: f64,
    /// `max |theta (P w - w)(x_j^-) + (1 - theta)(P w - w)(x_j^+)|`, `0 < j < N`.
    pub flux: f64,
    /// `|(P w - w)(x_N^-)|`.
    pub endpoint: f64,
}

pub fn theta_residuals(
    w: &(impl BrokenFunction + ?Sized),
    proj: &DGFunction<'_>,
    theta: f64,
) -> ThetaResiduals {
    let mesh = proj.mesh();
    let k = proj.degree();
    let n = mesh.n_elements();
    let rule = moment_rule(k);
    let mut moment = 0.0f64;
    for e in 0..n {
        let mw = reference_moments(w, mesh, e, k, &rule);
        let mp = reference_moments(proj, mesh, e, k, &rule);
        for l in 0..k {
            moment = moment.max((mp[l] - mw[l]).abs());
        }
    }
    let mut flux = 0.0f64;
    for j in 1..n {
        let x = mesh.node(j);
        let minus = proj.eval_reference(j - 1, 1.0)[0] - w.local(j - 1, 1.0, x)[0];
        let plus = proj.eval_reference(j, -1.0)[0] - w.local(j, -1.0, x)[0];
        flux = flux.max((theta * minus + (1.0 - theta) * plus).abs());
    }
    let endpoint = (proj.eval_reference(n - 1, 1.0)[0] - w.local(n - 1, 1.0, mesh.node(n))[0]).abs();
    ThetaResiduals { moment, flux, endpoint }
}

/// `[w - pi w]` at the transition node `x_{N/2}`.
pub fn transition_jump(w: &(impl BrokenFunction + ?Sized), interpolant: &DGFunction<'_>) -> f64 {
    let mesh = interpolant.mesh();
    let j = mesh.transition_index();
    let x = mesh.node(j);
    let plus = w.local(j, -1.0, x)[0] - interpolant.eval_reference(j, -1.0)[0];
    let minus = w.local(j - 1, 1.0, x)[0] - interpolant.eval_reference(j - 1, 1.0)[0];
    plus - minus
}
