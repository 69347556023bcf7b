//! Piecewise functions on a mesh: the discrete space `V_h` of modal
//! Legendre expansions and sampled reference functions.

use std::fmt;
use std::sync::Arc;

use crate::basis::{legendre_all, legendre_endpoint, Jet};
use crate::error::{Error, Result};
use crate::mesh::Mesh;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Anything that can be evaluated element by element, possibly with
/// different one-sided limits at the nodes.
///
/// `local(e, xhat, x)` returns value, first and second derivative of the
/// restriction to element `e` at the point with reference coordinate `xhat`
/// and physical coordinate `x`. Callers pass both; implementors use
/// whichever they are defined on.
pub trait BrokenFunction {
    fn local(&self, e: usize, xhat: f64, x: f64) -> Jet;

    /// Number of derivatives available (0, 1 or 2); missing ones are NaN.
    fn derivatives(&self) -> usize {
        2
    }
}

/// A member of `V_h`: degree-`k` polynomials on each element, stored as
/// modal coefficients `sum_l c[e][l] P_l(xhat)`.
#[derive(Clone, PartialEq)]
pub struct DGFunction<'m> {
    k: usize,
    mesh: &'m Mesh,
    coeffs: Vec<f64>,
}

impl<'m> DGFunction<'m> {
    pub fn zeros(mesh: &'m Mesh, k: usize) -> Self {
        Self { k, mesh, coeffs: vec![0.0; mesh.n_elements() * (k + 1)] }
    }

    /// Coefficients in element-major order (`N * (k + 1)` entries).
    pub fn from_coeffs(mesh: &'m Mesh, k: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.n_elements() * (k + 1) {
            return Err(Error::Mismatch(format!(
                "expected {} coefficients, got {}",
                mesh.n_elements() * (k + 1),
                coeffs.len()
            )));
        }
        Ok(Self { k, mesh, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn element(&self, e: usize) -> &[f64] {
        let m = self.k + 1;
        &self.coeffs[e * m..(e + 1) * m]
    }

    pub fn element_mut(&mut self, e: usize) -> &mut [f64] {
        let m = self.k + 1;
        &mut self.coeffs[e * m..(e + 1) * m]
    }

    /// Jet at reference point `xhat` of element `e`, in physical derivatives.
    pub fn eval_reference(&self, e: usize, xhat: f64) -> Jet {
        let basis = if xhat == 1.0 || xhat == -1.0 {
            (0..=self.k).map(|l| legendre_endpoint(l, xhat > 0.0)).collect()
        } else {
            legendre_all(self.k, xhat)
        };
        self.combine(e, &basis)
    }

    fn combine(&self, e: usize, basis: &[Jet]) -> Jet {
        let s = 2.0 / self.mesh.width(e);
        let mut out = [0.0; 3];
        for (c, p) in self.element(e).iter().zip(basis) {
            out[0] += c * p[0];
            out[1] += c * p[1];
            out[2] += c * p[2];
        }
        [out[0], out[1] * s, out[2] * s * s]
    }

    /// Value at physical `x` (nodes take the left element's limit).
    pub fn eval(&self, x: f64) -> f64 {
        let e = self.mesh.locate(x);
        self.eval_reference(e, self.mesh.to_reference(e, x))[0]
    }

    /// `v(x_j^-)` with derivatives; `None` at `j = 0`.
    pub fn trace_left(&self, j: usize) -> Option<Jet> {
        (j >= 1 && j <= self.mesh.n_elements()).then(|| self.eval_reference(j - 1, 1.0))
    }

    /// `v(x_j^+)` with derivatives; `None` at `j = N`.
    pub fn trace_right(&self, j: usize) -> Option<Jet> {
        (j < self.mesh.n_elements()).then(|| self.eval_reference(j, -1.0))
    }

    fn check_compatible(&self, other: &Self) {
        assert!(
            self.k == other.k && (std::ptr::eq(self.mesh, other.mesh) || self.mesh == other.mesh),
            "DG functions live on different spaces"
        );
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { k: self.k, mesh: self.mesh, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        self.check_compatible(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }
}

impl<'m> std::ops::Sub for &DGFunction<'m> {
    type Output = DGFunction<'m>;

    fn sub(self, rhs: Self) -> DGFunction<'m> {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

impl fmt::Debug for DGFunction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DGFunction")
            .field("k", &self.k)
            .field("elements", &self.mesh.n_elements())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl BrokenFunction for DGFunction<'_> {
    fn local(&self, e: usize, xhat: f64, _x: f64) -> Jet {
        self.eval_reference(e, xhat)
    }
}

/// A globally defined function with optional analytic derivatives.
#[derive(Clone)]
pub struct SampledFunction {
    value: ScalarFn,
    derivative: Option<ScalarFn>,
    second: Option<ScalarFn>,
}

impl SampledFunction {
    pub fn new(value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { value: Arc::new(value), derivative: None, second: None }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_second_derivative(
        mut self,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.second = Some(Arc::new(d2));
        self
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(x))
    }

    pub fn second_derivative(&self, x: f64) -> Option<f64> {
        self.second.as_ref().map(|d| d(x))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("derivative", &self.derivative.is_some())
            .field("second", &self.second.is_some())
            .finish()
    }
}

impl BrokenFunction for SampledFunction {
    fn local(&self, _e: usize, _xhat: f64, x: f64) -> Jet {
        [
            (self.value)(x),
            self.derivative.as_ref().map_or(f64::NAN, |d| d(x)),
            self.second.as_ref().map_or(f64::NAN, |d| d(x)),
        ]
    }

    fn derivatives(&self) -> usize {
        match (&self.derivative, &self.second) {
            (None, _) => 0,
            (Some(_), None) => 1,
            (Some(_), Some(_)) => 2,
        }
    }
}

/// Pointwise difference `lhs - rhs` of two broken functions.
pub struct Difference<'a, A: ?Sized, B: ?Sized> {
    pub lhs: &'a A,
    pub rhs: &'a B,
}

impl<'a, A: ?Sized, B: ?Sized> Difference<'a, A, B> {
    pub fn new(lhs: &'a A, rhs: &'a B) -> Self {
        Self { lhs, rhs }
    }
}

impl<A: BrokenFunction + ?Sized, B: BrokenFunction + ?Sized> BrokenFunction
    for Difference<'_, A, B>
{
    fn local(&self, e: usize, xhat: f64, x: f64) -> Jet {
        let a = self.lhs.local(e, xhat, x);
        let b = self.rhs.local(e, xhat, x);
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    fn derivatives(&self) -> usize {
        self.lhs.derivatives().min(self.rhs.derivatives())
    }
}

/// One-sided limits of a broken function at node `j`; a missing side marks
/// a boundary node.
pub fn node_traces(f: &(impl BrokenFunction + ?Sized), mesh: &Mesh, j: usize) -> (Option<Jet>, Option<Jet>) {
    let n = mesh.n_elements();
    let x = mesh.node(j);
    let left = (j >= 1).then(|| f.local(j - 1, 1.0, x));
    let right = (j < n).then(|| f.local(j, -1.0, x));
    (left, right)
}
