//! Composite Gauss–Legendre rules on finite intervals.

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use std::borrow::Cow;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

/// Points per panel used for real-space overlap integrals.
pub const BOX_PANEL_ORDER: usize = 64;

/// Reference nodes and weights on [-1, 1] for the given order.
pub fn reference_rule(order: usize) -> Cow<'static, [(f64, f64)]> {
    static R12: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static R64: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let build = |n: usize| {
        let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("order > 0"));
        let mut pairs = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    };
    match order {
        12 => Cow::Borrowed(R12.get_or_init(|| build(12))),
        64 => Cow::Borrowed(R64.get_or_init(|| build(64))),
        n => Cow::Owned(build(n)),
    }
}

/// Nodes and weights of `panels` equal Gauss–Legendre panels on `[a, b]`.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = reference_rule(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in rule.iter() {
            nodes.push(mid + 0.5 * h * x);
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

/// Integral of a real function with a composite rule.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = composite_rule(a, b, panels, order);
    x.iter().zip(&w).map(|(&x, &w)| w * f(x)).sum()
}

/// Integral of a complex function with a composite rule.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> Complex64 {
    let (x, w) = composite_rule(a, b, panels, order);
    x.iter().zip(&w).map(|(&x, &w)| f(x) * w).sum()
}
