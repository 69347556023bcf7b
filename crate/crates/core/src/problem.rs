//! Boundary value problems `-eps w'' + a w' + b w = f` on `(0, 1)` with
//! Dirichlet data, and the built-in manufactured test cases.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{SampledFunction, ScalarFn};

const GRID: usize = 1001;
const FD_STEP: f64 = 1e-6;

/// Name of the built-in boundary-layer problem with
/// `w = x (1 - exp(-2 (1 - x) / eps))`.
pub const LAYER_PROBLEM: &str = "exp-layer";
/// Name of the built-in smooth problem with `w = x (1 - x)`, `a = b = 1`.
pub const QUADRATIC_PROBLEM: &str = "quadratic";

/// A convection–diffusion problem instance.
#[derive(Clone)]
pub struct ProblemSpec {
    pub epsilon: f64,
    pub a: ScalarFn,
    pub a_prime: Option<ScalarFn>,
    pub b: ScalarFn,
    pub f: ScalarFn,
    /// Lower bound of `a` on `[0, 1]`.
    pub alpha: f64,
    /// Lower bound of `b - a'/2` on `[0, 1]`.
    pub gamma: f64,
    /// Dirichlet values `w(0)` and `w(1)`.
    pub boundary: (f64, f64),
    pub exact: Option<SampledFunction>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("epsilon", &self.epsilon)
            .field("alpha", &self.alpha)
            .field("gamma", &self.gamma)
            .field("boundary", &self.boundary)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    /// Builds a problem and derives `alpha` and `gamma` by sampling.
    pub fn new(
        epsilon: f64,
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        let mut spec = Self {
            epsilon,
            a: Arc::new(a),
            a_prime: None,
            b: Arc::new(b),
            f: Arc::new(f),
            alpha: 0.0,
            gamma: 0.0,
            boundary: (0.0, 0.0),
            exact: None,
        };
        spec.alpha = grid().map(|x| (spec.a)(x)).fold(f64::INFINITY, f64::min);
        if !(spec.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "convection coefficient must be positive, min is {}",
                spec.alpha
            )));
        }
        spec.gamma = coercivity_constant(&spec)?;
        Ok(spec)
    }

    /// Supplies `a'` analytically; `gamma` is recomputed.
    pub fn with_convection_derivative(
        mut self,
        a_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        self.a_prime = Some(Arc::new(a_prime));
        self.gamma = coercivity_constant(&self)?;
        Ok(self)
    }

    pub fn with_exact(mut self, exact: SampledFunction) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn with_boundary_values(mut self, left: f64, right: f64) -> Self {
        self.boundary = (left, right);
        self
    }

    pub fn a(&self, x: f64) -> f64 {
        (self.a)(x)
    }

    pub fn b(&self, x: f64) -> f64 {
        (self.b)(x)
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// `a'(x)`, analytic when supplied, otherwise a central difference.
    pub fn a_prime(&self, x: f64) -> f64 {
        match &self.a_prime {
            Some(d) => d(x),
            None => ((self.a)(x + FD_STEP) - (self.a)(x - FD_STEP)) / (2.0 * FD_STEP),
        }
    }
}

fn grid() -> impl Iterator<Item = f64> {
    (0..GRID).map(|i| i as f64 / (GRID - 1) as f64)
}

/// Minimum of `b - a'/2` over a 1001-point grid; fails when it is not
/// positive.
pub fn coercivity_constant(spec: &ProblemSpec) -> Result<f64> {
    let gamma = grid()
        .map(|x| spec.b(x) - 0.5 * spec.a_prime(x))
        .fold(f64::INFINITY, f64::min);
    if gamma > 0.0 {
        Ok(gamma)
    } else {
        Err(Error::NotCoercive(gamma))
    }
}

/// Exact solution `w = x (1 - exp(-2 (1 - x) / eps))` of the layer problem,
/// with analytic first and second derivatives.
pub fn layer_solution(epsilon: f64) -> SampledFunction {
    let layer = move |x: f64| (-2.0 * (1.0 - x) / epsilon).exp();
    SampledFunction::new(move |x| x * (1.0 - layer(x)))
        .with_derivative(move |x| {
            let e = layer(x);
            1.0 - e - 2.0 * x * e / epsilon
        })
        .with_second_derivative(move |x| {
            let e = layer(x);
            -4.0 * e / epsilon - 4.0 * x * e / (epsilon * epsilon)
        })
}

/// `-eps w'' + (3 - x) w' + w = f` with `w(0) = w(1) = 0`, `alpha = 2`,
/// `gamma = 3/2`, and `f` chosen so that [`layer_solution`] is exact.
pub fn make_test_problem(epsilon: f64) -> Result<ProblemSpec> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    // f = -eps w'' + (3 - x) w' + w simplifies to 3 + E (1 - 2x(1-x)/eps).
    let f = move |x: f64| {
        let e = (-2.0 * (1.0 - x) / epsilon).exp();
        3.0 + e * (1.0 - 2.0 * x * (1.0 - x) / epsilon)
    };
    Ok(ProblemSpec {
        epsilon,
        a: Arc::new(|x| 3.0 - x),
        a_prime: Some(Arc::new(|_| -1.0)),
        b: Arc::new(|_| 1.0),
        f: Arc::new(f),
        alpha: 2.0,
        gamma: 1.5,
        boundary: (0.0, 0.0),
        exact: Some(layer_solution(epsilon)),
    })
}

/// Problem with constant coefficients `a`, `b` whose exact solution is the
/// polynomial `sum_i coeffs[i] x^i`; the Dirichlet data are taken from it.
pub fn polynomial_problem(epsilon: f64, a: f64, b: f64, coeffs: &[f64]) -> Result<ProblemSpec> {
    let c: Arc<[f64]> = coeffs.into();
    let eval = |c: &[f64], x: f64, order: usize| -> f64 {
        c.iter()
            .enumerate()
            .skip(order)
            .map(|(i, ci)| {
                let fall: f64 = (0..order).map(|m| (i - m) as f64).product();
                ci * fall * x.powi((i - order) as i32)
            })
            .sum()
    };
    let (c0, c1, c2, c3, c4) = (c.clone(), c.clone(), c.clone(), c.clone(), c.clone());
    let exact = SampledFunction::new(move |x| eval(&c0, x, 0))
        .with_derivative(move |x| eval(&c1, x, 1))
        .with_second_derivative(move |x| eval(&c2, x, 2));
    let f = move |x: f64| -epsilon * eval(&c3, x, 2) + a * eval(&c3, x, 1) + b * eval(&c3, x, 0);
    let spec = ProblemSpec::new(epsilon, move |_| a, move |_| b, f)?
        .with_convection_derivative(|_| 0.0)?
        .with_boundary_values(eval(&c4, 0.0, 0), eval(&c4, 1.0, 0))
        .with_exact(exact);
    Ok(spec)
}

/// Resolves a built-in problem by name.
pub fn by_name(name: &str, epsilon: f64) -> Result<ProblemSpec> {
    match name {
        LAYER_PROBLEM => make_test_problem(epsilon),
        QUADRATIC_PROBLEM => polynomial_problem(epsilon, 1.0, 1.0, &[0.0, 1.0, -1.0]),
        _ => Err(Error::Unknown { kind: "problem", name: name.to_string() }),
    }
}
