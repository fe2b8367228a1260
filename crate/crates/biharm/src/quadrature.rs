//! Composite Gauss-Legendre quadrature on graded panels.
//!
//! All improper integrals in this crate are reduced to finite panel sums:
//! geometric grading resolves power-law behaviour near zero, and truncation
//! points are chosen so that the neglected tails are analytically controlled
//! by the caller (head/tail corrections where needed).

/// Nodes and weights of an `n`-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre polynomial; `n` is small
/// (8..32) so no asymptotic initial guesses beyond the Chebyshev-like one
/// are required.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss-Legendre order must be at least 2");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        // Newton iteration on P_n(x).
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// A reusable composite rule: panel edges plus a Gauss-Legendre order.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    /// Flattened (node, weight) pairs over all panels.
    points: Vec<(f64, f64)>,
}

impl CompositeRule {
    pub fn new(edges: &[f64], gl_order: usize) -> Self {
        let (xs, ws) = gauss_legendre(gl_order);
        let mut points = Vec::with_capacity((edges.len() - 1) * gl_order);
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            for (&x, &w) in xs.iter().zip(&ws) {
                points.push((c + h * x, h * w));
            }
        }
        CompositeRule { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn node_count(&self) -> usize {
        self.points.len()
    }

    /// Sequential weighted sum; node order is fixed, so results are
    /// bitwise reproducible.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = 0.0;
        for &(x, w) in &self.points {
            acc += w * f(x);
        }
        acc
    }
}

/// Uniform panel edges on [a, b].
pub fn uniform_edges(a: f64, b: f64, panels: usize) -> Vec<f64> {
    assert!(panels >= 1 && b > a);
    (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect()
}

/// Geometrically graded edges on [a, b], `per_decade` panels per decade.
pub fn geometric_edges(a: f64, b: f64, per_decade: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && per_decade >= 1);
    let decades = (b / a).log10();
    let n = (decades * per_decade as f64).ceil() as usize;
    let la = a.ln();
    let lb = b.ln();
    let mut edges: Vec<f64> = (0..=n)
        .map(|i| (la + (lb - la) * i as f64 / n as f64).exp())
        .collect();
    // Pin the endpoints exactly; exp(ln a) can be off by an ulp.
    edges[0] = a;
    edges[n] = b;
    edges
}

/// Edges graded toward `a = 0`: a geometric cascade [b*r^m, ..., b] with the
/// innermost panel closed by [0, b*r^m].
pub fn graded_to_zero_edges(b: f64, ratio: f64, panels: usize) -> Vec<f64> {
    assert!(b > 0.0 && ratio > 0.0 && ratio < 1.0 && panels >= 2);
    let mut edges = Vec::with_capacity(panels + 1);
    edges.push(0.0);
    let mut e = b * ratio.powi(panels as i32 - 1);
    for _ in 0..panels {
        edges.push(e);
        e /= ratio;
    }
    let last = edges.len() - 1;
    edges[last] = b;
    edges
}
