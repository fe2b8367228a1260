//! Direct evaluation of the biharmonic heat-kernel profile g and numeric
//! decay checks.
//!
//! The kernel of e^{-t*Delta^2} is W_t(x) = t^{-n/4} g(x / t^{1/4}) with
//! g(x) = (2 pi)^{-n} \int e^{i x.eta - |eta|^4} d eta. The profile is
//! evaluated by real quadrature of that integral; in two dimensions the
//! Bessel-J0 radial form is kept as an independent cross-check only.

use thiserror::Error;

use crate::quadrature::{graded_to_zero_edges, uniform_edges, CompositeRule};

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("bad quadrature: truncation radius {radius} < 3 or node count {nodes} < 64")]
    BadQuadrature { radius: f64, nodes: usize },
    #[error("insufficient radial range: r_max {got} < {required}")]
    InsufficientRange { got: f64, required: f64 },
}

/// Decay exponent of Lemma-type kernel estimates: c = 3 * 2^(1/3) / 16.
pub fn decay_exponent() -> f64 {
    3.0 * 2f64.powf(1.0 / 3.0) / 16.0
}

/// Quadrature description for the frequency integral defining g.
#[derive(Debug, Clone, Copy)]
pub struct QuadSpec {
    /// Truncation radius R of the eta integral; e^{-R^4} < 1e-500 at the
    /// default R = 8, so truncation error is negligible.
    pub truncation_radius: f64,
    /// Total node count along one frequency axis.
    pub nodes: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            truncation_radius: 8.0,
            nodes: 1024,
        }
    }
}

impl QuadSpec {
    fn validate(&self) -> Result<(), KernelError> {
        if self.truncation_radius < 3.0 || self.nodes < 64 {
            return Err(KernelError::BadQuadrature {
                radius: self.truncation_radius,
                nodes: self.nodes,
            });
        }
        Ok(())
    }

    /// Composite rule on [0, R], panels graded toward 0.
    fn rule(&self) -> CompositeRule {
        let panels = (self.nodes / 8).max(8);
        CompositeRule::new(
            &graded_to_zero_edges(self.truncation_radius, 0.85, panels),
            8,
        )
    }
}

fn radius(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Profile value g(x) for dim = 1, 2, together with mixed-derivative
/// profiles: `deriv = (l, k)` evaluates (d/dt)^l (d/dx_1)^k W_t at t = 1
/// along the ray x = r e_1.
pub fn eval_g_deriv(x: &[f64], dim: usize, quad: &QuadSpec, deriv: (u32, u32)) -> Result<f64, KernelError> {
    quad.validate()?;
    let (l, k) = deriv;
    let r = radius(x);
    let rule = quad.rule();
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    let phase = k as f64 * std::f64::consts::FRAC_PI_2;
    let value = match dim {
        1 => {
            // ((-1)^l / pi) int rho^{k+4l} cos(r rho + k pi/2) e^{-rho^4} drho
            let p = (k + 4 * l) as i32;
            let v = rule.integrate(|rho| rho.powi(p) * (r * rho + phase).cos() * (-rho.powi(4)).exp());
            sign * v / std::f64::consts::PI
        }
        2 => {
            // Inner integral over eta_2 first: Q_l(e1) = int (e1^2+e2^2)^{2l}
            // e^{-(e1^2+e2^2)^2} de2, then a 1-D cosine integral in eta_1.
            let inner: Vec<f64> = rule
                .points()
                .iter()
                .map(|&(e1, _)| {
                    rule.integrate(|e2| {
                        let s = e1 * e1 + e2 * e2;
                        s.powi(2 * l as i32) * (-s * s).exp()
                    })
                })
                .collect();
            let mut acc = 0.0;
            for (&(e1, w), &q) in rule.points().iter().zip(&inner) {
                acc += w * e1.powi(k as i32) * (r * e1 + phase).cos() * q;
            }
            sign * acc / (std::f64::consts::PI * std::f64::consts::PI)
        }
        _ => panic!("dim must be 1 or 2"),
    };
    Ok(value)
}

/// Profile value g(x).
pub fn eval_g(x: &[f64], dim: usize, quad: &QuadSpec) -> Result<f64, KernelError> {
    eval_g_deriv(x, dim, quad, (0, 0))
}

/// Heat kernel W_t(x) = t^{-dim/4} g(x / t^{1/4}).
pub fn eval_heat_kernel(x: &[f64], t: f64, dim: usize, quad: &QuadSpec) -> Result<f64, KernelError> {
    assert!(t > 0.0, "t must be positive");
    let s = t.powf(-0.25);
    let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
    Ok(t.powf(-(dim as f64) / 4.0) * eval_g(&xs, dim, quad)?)
}

/// Radial profile table of a (possibly differentiated) kernel at t = 1.
#[derive(Debug, Clone)]
pub struct KernelProfile {
    pub dim: usize,
    /// (radius, value) pairs, radii strictly increasing from 0.
    pub samples: Vec<(f64, f64)>,
    pub quad: QuadSpec,
    pub deriv: (u32, u32),
}

impl KernelProfile {
    /// Build a profile on a graded radial grid [0, r_max]: uniform spacing
    /// `coarse` far out, refined near the origin where g oscillates.
    pub fn build(
        dim: usize,
        quad: &QuadSpec,
        r_max: f64,
        samples: usize,
        deriv: (u32, u32),
    ) -> Result<Self, KernelError> {
        quad.validate()?;
        let mut table = Vec::with_capacity(samples);
        for i in 0..samples {
            let u = i as f64 / (samples - 1) as f64;
            // Quadratic grading: denser near r = 0.
            let r = r_max * u * (0.5 + 0.5 * u);
            let v = eval_g_deriv(&[r, 0.0][..dim], dim, quad, deriv)?;
            table.push((r, v));
        }
        Ok(KernelProfile {
            dim,
            samples: table,
            quad: *quad,
            deriv,
        })
    }

    pub fn zero(dim: usize, r_max: f64, samples: usize) -> Self {
        let table = (0..samples)
            .map(|i| (r_max * i as f64 / (samples - 1) as f64, 0.0))
            .collect();
        KernelProfile {
            dim,
            samples: table,
            quad: QuadSpec::default(),
            deriv: (0, 0),
        }
    }

    pub fn r_max(&self) -> f64 {
        self.samples.last().map(|&(r, _)| r).unwrap_or(0.0)
    }
}

/// Result of a kernel decay check against |value| <= C (1+r)^{-penalty}
/// e^{-c' r^{4/3}}.
#[derive(Debug, Clone)]
pub struct DecayCheck {
    /// Exponent c' used in the check.
    pub c_exponent: f64,
    /// Max over samples of the inverted bound; the numeric surrogate for C.
    pub observed_c: f64,
    pub r_max: f64,
    /// Radius at which the max is attained.
    pub argmax_r: f64,
    /// True when the constant is finite and attained away from r_max.
    pub pass: bool,
}

/// Check the pointwise decay estimate on a sampled profile.
///
/// For derivative order (0, 0) the bound carries no polynomial factor; for
/// higher orders the factor (1+r)^{n+k+4l} is included.
pub fn check_decay(
    profile: &KernelProfile,
    derivative_order: (u32, u32),
    c_prime: f64,
) -> Result<DecayCheck, KernelError> {
    let r_max = profile.r_max();
    if r_max < 10.0 {
        return Err(KernelError::InsufficientRange {
            got: r_max,
            required: 10.0,
        });
    }
    let (l, k) = derivative_order;
    let penalty_exp = if (l, k) == (0, 0) {
        0.0
    } else {
        (profile.dim + k as usize + 4 * l as usize) as f64
    };
    let mut observed = 0.0f64;
    let mut argmax = 0.0f64;
    for &(r, v) in &profile.samples {
        let ratio = v.abs() * (c_prime * r.powf(4.0 / 3.0)).exp() * (1.0 + r).powf(penalty_exp);
        if ratio > observed {
            observed = ratio;
            argmax = r;
        }
    }
    // Interior attainment: the max must not sit in the outermost 5% of the
    // range, where a genuinely unbounded ratio would still be climbing.
    let pass = observed.is_finite() && argmax < 0.95 * r_max;
    Ok(DecayCheck {
        c_exponent: c_prime,
        observed_c: observed,
        r_max,
        argmax_r: argmax,
        pass,
    })
}

/// Integral of g over R^dim by radial quadrature; equals 1 for the true
/// profile.
pub fn mass(dim: usize, quad: &QuadSpec, r_max: f64) -> Result<f64, KernelError> {
    radial_integral(dim, quad, r_max, |v| v)
}

/// Integral of |g| over R^dim; exceeds 1 because the kernel oscillates.
/// This is the sup-norm contraction constant of the semigroup.
pub fn abs_mass(dim: usize, quad: &QuadSpec, r_max: f64) -> Result<f64, KernelError> {
    radial_integral(dim, quad, r_max, f64::abs)
}

fn radial_integral(
    dim: usize,
    quad: &QuadSpec,
    r_max: f64,
    weight: impl Fn(f64) -> f64,
) -> Result<f64, KernelError> {
    quad.validate()?;
    // |g| has kinks at its zeros, so use many small panels.
    let rule = CompositeRule::new(&uniform_edges(0.0, r_max, 400), 8);
    let mut acc = 0.0;
    for &(r, w) in rule.points() {
        let v = weight(eval_g(&[r, 0.0][..dim], dim, quad)?);
        let surface = match dim {
            1 => 2.0,
            2 => 2.0 * std::f64::consts::PI * r,
            _ => unreachable!(),
        };
        acc += w * surface * v;
    }
    Ok(acc)
}

/// Bessel function J_0, power series for |x| <= 16 and the first terms of
/// the large-argument asymptotic expansion beyond. Used only by the dim = 2
/// cross-check of the radial profile.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 16.0 {
        let q = -(x * x) / 4.0;
        let mut term = 1.0;
        let mut total = 1.0;
        for m in 1..200 {
            term *= q / ((m * m) as f64);
            total += term;
            if term.abs() < 1e-18 * total.abs().max(1.0) {
                break;
            }
        }
        total
    } else {
        let xi = 1.0 / x;
        let xi2 = xi * xi;
        let p = 1.0 - 9.0 / 128.0 * xi2 + 3675.0 / 32768.0 * xi2 * xi2;
        let q = xi * (-0.125 + 75.0 / 1024.0 * xi2 - 59535.0 / 262144.0 * xi2 * xi2);
        let c = x - std::f64::consts::FRAC_PI_4;
        (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * c.cos() - q * c.sin())
    }
}

/// Independent dim = 2 profile via the radial Bessel representation
/// g(r) = (1/2pi) int_0^R e^{-rho^4} J_0(rho r) rho drho.
pub fn eval_g_dim2_bessel(r: f64, quad: &QuadSpec) -> Result<f64, KernelError> {
    quad.validate()?;
    let rule = quad.rule();
    let v = rule.integrate(|rho| (-rho.powi(4)).exp() * bessel_j0(rho * r) * rho);
    Ok(v / (2.0 * std::f64::consts::PI))
}
