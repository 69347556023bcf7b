//! Flux admissibility: the Hilbert-matrix bound on `beta0`, the constant
//! `M(k, beta1)` on a concrete mesh, and randomized plus exact checks of the
//! admissibility inequality and of coercivity `B(v, v) >= ||v||_E^2`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::basis::gauss_legendre;
use crate::ddg::assembly::{assemble_diagnostic, check_points, element_tables, node_dofs};
use crate::ddg::flux::{hat_flux, FluxParams, NodeTrace};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::problem::ProblemSpec;

/// Largest degree accepted by [`hilbert_lambda_max`].
pub const MAX_HILBERT_DEGREE: usize = 12;

/// Slacks above `-SLACK_TOLERANCE` (relative) count as nonnegative.
pub const SLACK_TOLERANCE: f64 = 1e-10;

fn binomial(n: i128, r: i128) -> i128 {
    if r < 0 || r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Entry `(i, j)` (1-based) of the inverse of the `n x n` Hilbert matrix.
pub fn inverse_hilbert_entry(n: usize, i: usize, j: usize) -> i128 {
    let (n, i, j) = (n as i128, i as i128, j as i128);
    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
    let c = binomial(i + j - 2, i - 1);
    sign * (i + j - 1) * binomial(n + i - 1, n - j) * binomial(n + j - 1, n - i) * c * c
}

/// `lambda_max(H^{-1/2} O H^{-1/2})` for the `k x k` Hilbert matrix `H` and
/// the all-ones matrix `O = e e^T`, which equals `e^T H^{-1} e`.
pub fn hilbert_lambda_max(k: usize) -> Result<f64> {
    if k == 0 || k > MAX_HILBERT_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "Hilbert bound needs 1 <= k <= {MAX_HILBERT_DEGREE}, got {k}"
        )));
    }
    let sum: i128 = (1..=k).flat_map(|i| (1..=k).map(move |j| (i, j))).map(|(i, j)| inverse_hilbert_entry(k, i, j)).sum();
    Ok(sum as f64)
}

/// `[lambda_max / 2] + 1` where `[y]` is the smallest integer `>= y`.
pub fn beta0_integer_rule(k: usize) -> Result<u64> {
    let lambda = hilbert_lambda_max(k)?;
    Ok((lambda / 2.0).ceil() as u64 + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub k: usize,
    pub lambda_max: f64,
    /// `mu2 + lambda_max / (4 mu1)`.
    pub beta0_bound: f64,
    pub beta0_integer: u64,
    pub mu1: f64,
    pub mu2: f64,
}

impl AdmissibilityReport {
    pub fn new(k: usize, mu1: f64, mu2: f64) -> Result<Self> {
        if !(mu1 > 0.0 && mu1 < 1.0) || !(mu2 > 0.0 && mu2 <= 1.0) {
            return Err(Error::InvalidParameter(format!("need mu1 in (0, 1) and mu2 in (0, 1], got {mu1}, {mu2}")));
        }
        let lambda_max = hilbert_lambda_max(k)?;
        Ok(Self {
            k,
            lambda_max,
            beta0_bound: mu2 + lambda_max / (4.0 * mu1),
            beta0_integer: beta0_integer_rule(k)?,
            mu1,
            mu2,
        })
    }

    /// `mu1 = 1/2`, `mu2 = 1`.
    pub fn standard(k: usize) -> Result<Self> {
        Self::new(k, 0.5, 1.0)
    }
}

/// Extreme eigenvalue of the pencil `(a, d)` with `d` symmetric positive definite.
fn pencil_eigenvalue(a: &DMatrix<f64>, d: DMatrix<f64>, largest: bool) -> Result<f64> {
    let n = d.nrows();
    let chol = d
        .cholesky()
        .ok_or_else(|| Error::Degenerate("normalizing form is not positive definite".into()))?;
    let l = chol.l();
    let x = l.solve_lower_triangular(a).expect("Cholesky factor is nonsingular");
    let c = l.solve_lower_triangular(&x.transpose()).expect("Cholesky factor is nonsingular");
    let c = DMatrix::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let eig = SymmetricEigen::new(c).eigenvalues;
    let pick = if largest { f64::max } else { f64::min };
    Ok(eig.iter().copied().reduce(pick).unwrap_or(f64::NAN))
}

/// Largest value over piecewise polynomials `w` of degree `k` on `mesh` of
/// `sum_j dh_j ({w'}_j + beta1/2 dh_j [w'']_j)^2 / sum_j ||w'||^2_{I_j}`.
///
/// Only modes of degree `>= 1` enter, so the denominator is positive
/// definite on the trial space. At `x_0` and `x_N` the second-derivative
/// term is dropped, matching the boundary form of the diffusive flux.
pub fn estimate_m(mesh: &Mesh, k: usize, beta1: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Degenerate("degree 0 has no derivative-active modes".into()));
    }
    let n = mesh.n_elements();
    let dim = n * k;
    let reduced = |global: usize| {
        let (e, l) = (global / (k + 1), global % (k + 1));
        (l > 0).then(|| e * k + l - 1)
    };
    let mut num = DMatrix::zeros(dim, dim);
    for j in 0..=n {
        let dh = mesh.delta_h(j)?;
        let g: Vec<(usize, f64)> = node_dofs(mesh, k, j)
            .into_iter()
            .filter_map(|(idx, t)| {
                let second = if t.is_boundary() { 0.0 } else { 0.5 * beta1 * dh * t.jump_of(2) };
                reduced(idx).map(|r| (r, t.average_of(1) + second))
            })
            .collect();
        for &(r, gr) in &g {
            for &(c, gc) in &g {
                num[(r, c)] += dh * gr * gc;
            }
        }
    }
    let mut den = DMatrix::zeros(dim, dim);
    let rule = gauss_legendre(k + 1);
    for e in 0..n {
        let h = mesh.width(e);
        for (q, (_, w)) in element_tables(&rule, k, h).iter().zip(rule.iter()) {
            for l in 1..=k {
                for m in 1..=k {
                    den[(e * k + l - 1, e * k + m - 1)] += w * 0.5 * h * q[l][1] * q[m][1];
                }
            }
        }
    }
    let value = pencil_eigenvalue(&num, den, true)?;
    if !value.is_finite() {
        return Err(Error::Degenerate("Rayleigh quotient is not finite".into()));
    }
    Ok(value)
}

/// Minimal relative slacks found by [`check_admissibility`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibilityCheck {
    pub trials: usize,
    /// Smallest `(lhs - rhs) / (sum ||v'||^2 + sum [v]^2 / dh)` of the
    /// admissibility inequality over the random trials.
    pub definition_slack: f64,
    /// Smallest `(B(v, v) - ||v||_E^2) / ||v||_E^2` over the random trials.
    pub coercivity_slack: f64,
    /// The same two minima taken over all of `V_h` (generalized eigenvalues).
    pub definition_exact: f64,
    pub coercivity_exact: f64,
}

impl AdmissibilityCheck {
    pub fn admissible(&self) -> bool {
        self.definition_slack >= -SLACK_TOLERANCE
    }

    pub fn coercive(&self) -> bool {
        self.coercivity_slack >= -SLACK_TOLERANCE
    }
}

fn add_node_form(target: &mut DMatrix<f64>, dofs: &[(usize, NodeTrace)], form: impl Fn(&NodeTrace, &NodeTrace) -> f64) {
    for (row, test) in dofs {
        for (col, trial) in dofs {
            target[(*row, *col)] += form(trial, test);
        }
    }
}

fn symmetric_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Quadratic forms of the admissibility inequality and of coercivity, each
/// as `(form, normalizer)`.
struct Forms {
    definition: (DMatrix<f64>, DMatrix<f64>),
    coercivity: (DMatrix<f64>, DMatrix<f64>),
}

fn build_forms(spec: &ProblemSpec, mesh: &Mesh, k: usize, params: &FluxParams, mu1: f64, mu2: f64) -> Result<Forms> {
    let n = mesh.n_elements();
    let dim = n * (k + 1);
    let eps = spec.epsilon;
    let mut grad = DMatrix::zeros(dim, dim);
    let mut mass = DMatrix::zeros(dim, dim);
    let rule = gauss_legendre(check_points(k));
    for e in 0..n {
        let h = mesh.width(e);
        let base = e * (k + 1);
        for (q, (_, w)) in element_tables(&rule, k, h).iter().zip(rule.iter()) {
            for l in 0..=k {
                for m in 0..=k {
                    grad[(base + l, base + m)] += w * 0.5 * h * q[l][1] * q[m][1];
                    mass[(base + l, base + m)] += w * 0.5 * h * q[l][0] * q[m][0];
                }
            }
        }
    }
    let mut flux = DMatrix::zeros(dim, dim);
    let mut jumps = DMatrix::zeros(dim, dim);
    let mut penalty = DMatrix::zeros(dim, dim);
    for j in 0..=n {
        let dh = mesh.delta_h(j)?;
        let beta0 = params.beta0(n, eps, j);
        let dofs = node_dofs(mesh, k, j);
        add_node_form(&mut flux, &dofs, |u, v| {
            hat_flux(u, beta0, dh, params.beta1, params.boundary_penalty) * v.jump() + u.jump() * v.average_of(1)
        });
        add_node_form(&mut jumps, &dofs, |u, v| u.jump() * v.jump() / dh);
        add_node_form(&mut penalty, &dofs, |u, v| beta0 * u.jump() * v.jump() / dh);
    }
    let definition = (&grad * mu1 + symmetric_part(&flux) - &jumps * mu2, &grad + &jumps);
    let energy = (&grad + &penalty) * eps + &mass * spec.gamma;
    let b = DMatrix::from_row_slice(dim, dim, &assemble_diagnostic(spec, mesh, k, params).matrix.to_dense().concat());
    let coercivity = (symmetric_part(&b) - &energy, energy);
    Ok(Forms { definition, coercivity })
}

fn random_min(form: &(DMatrix<f64>, DMatrix<f64>), samples: &[DVector<f64>]) -> f64 {
    samples
        .iter()
        .filter_map(|c| {
            let den = c.dot(&(&form.1 * c));
            (den > 0.0).then(|| c.dot(&(&form.0 * c)) / den)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Draws `trials` random members of `V_h` (modal coefficients uniform in
/// `[-1, 1]`) and records the smallest relative slack of the admissibility
/// inequality (with `mu1`, `mu2`) and of coercivity. The exact minima over
/// `V_h` are reported alongside.
#[allow(clippy::too_many_arguments)]
pub fn check_admissibility(
    spec: &ProblemSpec,
    mesh: &Mesh,
    k: usize,
    params: &FluxParams,
    trials: usize,
    mu1: f64,
    mu2: f64,
    rng: &mut impl Rng,
) -> Result<AdmissibilityCheck> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is needed".into()));
    }
    let forms = build_forms(spec, mesh, k, params, mu1, mu2)?;
    let dim = mesh.n_elements() * (k + 1);
    let samples: Vec<DVector<f64>> =
        (0..trials).map(|_| DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0))).collect();
    Ok(AdmissibilityCheck {
        trials,
        definition_slack: random_min(&forms.definition, &samples),
        coercivity_slack: random_min(&forms.coercivity, &samples),
        definition_exact: pencil_eigenvalue(&forms.definition.0, forms.definition.1.clone(), false)?,
        coercivity_exact: pencil_eigenvalue(&forms.coercivity.0, forms.coercivity.1.clone(), false)?,
    })
}
