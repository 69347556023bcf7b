//! Helpers shared by the integration tests.

use rand::Rng;
use shishkin_ddg::SampledFunction;

/// `sum_i a_i sin(f_i x + p_i) + c exp(d x)`, smooth with derivative.
pub fn random_smooth(rng: &mut impl Rng) -> SampledFunction {
    let terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..6.0), rng.gen_range(0.0..6.3)))
        .collect();
    let (c, d) = (rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0));
    let t2 = terms.clone();
    SampledFunction::new(move |x| terms.iter().map(|(a, f, p)| a * (f * x + p).sin()).sum::<f64>() + c * (d * x).exp())
        .with_derivative(move |x| t2.iter().map(|(a, f, p)| a * f * (f * x + p).cos()).sum::<f64>() + c * d * (d * x).exp())
}
