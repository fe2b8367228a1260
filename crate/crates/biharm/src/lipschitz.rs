//! The three Lipschitz-regularity seminorms and the test-function corpus.
//!
//! S_alpha scans the weighted time derivative of the biharmonic heat
//! semigroup, the Poisson variant scans e^{-t sqrt(-Delta)}, and N_alpha
//! scans second differences over lattice shifts. All three are sups over a
//! sampled range; a boundary-attainment flag marks scans whose maximum sits
//! on the first or last node, which signals an unreliable estimate.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::calculus::CalculusError;
use crate::grid::{
    forward, inverse, shift_steps, sup_norm, GridError, GridFunction, GridSpec, SpectralFunction,
};

#[derive(Debug, Error)]
pub enum LipschitzError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Weierstrass top frequency {top:.3} exceeds half the Nyquist frequency {limit:.3}")]
    SpectrumOverflow { top: f64, limit: f64 },
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Logarithmic t-sampling for the semigroup scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub num: usize,
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid {
            t_min: 1e-6,
            t_max: 1e2,
            num: 200,
        }
    }
}

impl TGrid {
    pub fn nodes(&self) -> Vec<f64> {
        assert!(self.t_min > 0.0 && self.t_max > self.t_min && self.num >= 2);
        let la = self.t_min.ln();
        let lb = self.t_max.ln();
        (0..self.num)
            .map(|i| (la + (lb - la) * i as f64 / (self.num - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    HeatS,
    PoissonS,
    SecondDiffN,
}

impl Estimator {
    pub fn label(&self) -> &'static str {
        match self {
            Estimator::HeatS => "heat",
            Estimator::PoissonS => "poisson",
            Estimator::SecondDiffN => "diff2",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeminormEstimate {
    pub estimator: Estimator,
    pub alpha: f64,
    /// Derivative order: [alpha/4]+1 for the heat scan, [alpha]+1 for the
    /// Poisson scan, 0 for second differences.
    pub k: u32,
    pub value: f64,
    /// The t (semigroup scans) or |y| (second differences) attaining the max.
    pub argmax: f64,
    /// Max attained on the first or last scan node.
    pub boundary: bool,
}

impl SeminormEstimate {
    pub fn interior(&self) -> bool {
        !self.boundary
    }
}

/// Max over the scan nodes of `weight(x) * sup_norm(field(x))`, tracking
/// the arg-max and whether it sits on the scan boundary.
fn scan_max(nodes: &[f64], mut eval: impl FnMut(f64) -> f64) -> (f64, f64, bool) {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &x) in nodes.iter().enumerate() {
        let v = eval(x);
        if v > best.1 {
            best = (i, v);
        }
    }
    let boundary = best.0 == 0 || best.0 + 1 == nodes.len();
    (best.1, nodes[best.0], boundary)
}

/// Shared semigroup scan: per t, multiply the spectrum of f by
/// `symbol(t, xi)`, invert, and weight the sup norm by t^{weight_exp}.
fn semigroup_scan(
    f: &GridFunction,
    t_grid: &TGrid,
    weight_exp: f64,
    symbol: impl Fn(f64, &[f64]) -> Complex64,
) -> Result<(f64, f64, bool), LipschitzError> {
    let ff = forward(f);
    let gspec = *ff.spec();
    let freqs: Vec<Vec<f64>> = (0..gspec.len()).map(|i| gspec.frequency(i)).collect();
    let nodes = t_grid.nodes();
    let mut failure: Option<LipschitzError> = None;
    let result = scan_max(&nodes, |t| {
        if failure.is_some() {
            return f64::NEG_INFINITY;
        }
        let coeffs: Vec<Complex64> = ff
            .coeffs()
            .iter()
            .zip(&freqs)
            .map(|(&c, xi)| c * symbol(t, xi))
            .collect();
        let mut gg = SpectralFunction::new(gspec, coeffs).expect("length preserved");
        // High-order symbols like (i xi)^m (-lambda)^j amplify the rounding
        // asymmetry of the input spectrum; project it out before inverting.
        gg.symmetrize();
        match inverse(&gg) {
            Ok(u) => t.powf(weight_exp) * sup_norm(&u),
            Err(e) => {
                failure = Some(e.into());
                f64::NEG_INFINITY
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(result)
}

/// S_alpha[f]: sup over t of t^{k - alpha/4} * ||d_t^k W_t f||_inf with
/// k = [alpha/4] + 1.
pub fn seminorm_heat(
    f: &GridFunction,
    alpha: f64,
    t_grid: &TGrid,
) -> Result<SeminormEstimate, LipschitzError> {
    if !(alpha > 0.0) {
        return Err(LipschitzError::Domain("alpha must be positive".into()));
    }
    let k = (alpha / 4.0).floor() as u32 + 1;
    let (value, argmax, boundary) =
        semigroup_scan(f, t_grid, k as f64 - alpha / 4.0, |t, xi| {
            let w2: f64 = xi.iter().map(|v| v * v).sum();
            let lam = w2 * w2;
            Complex64::new((-lam).powi(k as i32) * (-t * lam).exp(), 0.0)
        })?;
    Ok(SeminormEstimate {
        estimator: Estimator::HeatS,
        alpha,
        k,
        value,
        argmax,
        boundary,
    })
}

/// The Poisson-semigroup analog: sup over t of t^{k - alpha} *
/// ||d_t^k e^{-t sqrt(-Delta)} f||_inf with k = [alpha] + 1.
pub fn seminorm_poisson(
    f: &GridFunction,
    alpha: f64,
    t_grid: &TGrid,
) -> Result<SeminormEstimate, LipschitzError> {
    if !(alpha > 0.0) {
        return Err(LipschitzError::Domain("alpha must be positive".into()));
    }
    let k = alpha.floor() as u32 + 1;
    let (value, argmax, boundary) = semigroup_scan(f, t_grid, k as f64 - alpha, |t, xi| {
        let w: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        Complex64::new((-w).powi(k as i32) * (-t * w).exp(), 0.0)
    })?;
    Ok(SeminormEstimate {
        estimator: Estimator::PoissonS,
        alpha,
        k,
        value,
        argmax,
        boundary,
    })
}

/// N_alpha[f]: sup over lattice shifts 0 < |y| <= y_max of
/// ||f(.+y) + f(.-y) - 2f||_inf / |y|^alpha. In dim 2 the shift set is
/// axis-aligned plus diagonal.
pub fn seminorm_second_diff(
    f: &GridFunction,
    alpha: f64,
    y_max: f64,
) -> Result<SeminormEstimate, LipschitzError> {
    let spec = *f.spec();
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(LipschitzError::Domain(
            "second-difference seminorm requires 0 < alpha < 2".into(),
        ));
    }
    if !(y_max > 0.0) || y_max > spec.side_length() / 4.0 {
        return Err(LipschitzError::Domain(format!(
            "y_max must lie in (0, L/4] = (0, {}]",
            spec.side_length() / 4.0
        )));
    }
    let h = spec.spacing();
    let mut shifts: Vec<(Vec<i64>, f64)> = Vec::new();
    let m_max = (y_max / h).floor() as i64;
    match spec.dim() {
        1 => {
            for m in 1..=m_max {
                shifts.push((vec![m], m as f64 * h));
            }
        }
        2 => {
            for m in 1..=m_max {
                shifts.push((vec![m, 0], m as f64 * h));
                shifts.push((vec![0, m], m as f64 * h));
                let diag = std::f64::consts::SQRT_2 * m as f64 * h;
                if diag <= y_max {
                    shifts.push((vec![m, m], diag));
                }
            }
        }
        _ => unreachable!(),
    }
    if shifts.is_empty() {
        return Err(LipschitzError::Domain(
            "y_max smaller than one grid spacing: empty shift set".into(),
        ));
    }
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, (steps, ylen)) in shifts.iter().enumerate() {
        let plus = shift_steps(f, steps);
        let neg: Vec<i64> = steps.iter().map(|&m| -m).collect();
        let minus = shift_steps(f, &neg);
        let second = plus.add(&minus).sub(&f.scale(2.0));
        let v = sup_norm(&second) / ylen.powf(alpha);
        if v > best.1 {
            best = (i, v);
        }
    }
    // In dim 1 the shift lengths are ordered, so the flag is meaningful as
    // stated; in dim 2 the boundary cases are |y| = h and the largest |y|.
    let lens: Vec<f64> = shifts.iter().map(|s| s.1).collect();
    let min_len = lens.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_len = lens.iter().cloned().fold(0.0f64, f64::max);
    let arg = lens[best.0];
    let boundary = arg == min_len || arg == max_len;
    Ok(SeminormEstimate {
        estimator: Estimator::SecondDiffN,
        alpha,
        k: 0,
        value: best.1,
        argmax: arg,
        boundary,
    })
}

/// Weighted mixed-derivative scan: max over t of
/// t^{m/4 + j - alpha/4} * ||d_{x_i}^m d_t^j W_t f||_inf, with the order
/// condition m/4 + j >= [alpha/4] + 1.
#[derive(Debug, Clone)]
pub struct MixedBound {
    pub alpha: f64,
    pub x_order: u32,
    pub t_order: u32,
    pub axis: usize,
    pub value: f64,
    pub argmax: f64,
    pub boundary: bool,
}

pub fn mixed_derivative_bound(
    f: &GridFunction,
    alpha: f64,
    x_order: u32,
    t_order: u32,
    axis: usize,
    t_grid: &TGrid,
) -> Result<MixedBound, LipschitzError> {
    if !(alpha > 0.0) {
        return Err(LipschitzError::Domain("alpha must be positive".into()));
    }
    if axis < 1 || axis > f.spec().dim() {
        return Err(LipschitzError::Domain(format!(
            "axis must lie in 1..={}",
            f.spec().dim()
        )));
    }
    let needed = (alpha / 4.0).floor() + 1.0;
    if x_order as f64 / 4.0 + t_order as f64 + 1e-12 < needed {
        return Err(LipschitzError::Domain(format!(
            "order condition m/4 + j >= {needed} violated (m={x_order}, j={t_order})"
        )));
    }
    let i_pow = |order: u32| -> Complex64 {
        match order % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    };
    let weight = x_order as f64 / 4.0 + t_order as f64 - alpha / 4.0;
    let (value, argmax, boundary) = semigroup_scan(f, t_grid, weight, |t, xi| {
        let w2: f64 = xi.iter().map(|v| v * v).sum();
        let lam = w2 * w2;
        i_pow(x_order)
            * xi[axis - 1].powi(x_order as i32)
            * (-lam).powi(t_order as i32)
            * (-t * lam).exp()
    })?;
    Ok(MixedBound {
        alpha,
        x_order,
        t_order,
        axis,
        value,
        argmax,
        boundary,
    })
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum Builder {
    /// cos(k0 * xi_base * x_1)
    SingleMode { k0: i64 },
    /// sum_{j=0}^{J} 2^{-j alpha} cos(2^j * xi_base * x_1)
    WeierstrassLike { alpha: f64, j_terms: u32 },
    /// exp(-|x - center|^2 / (2 sigma^2)), needs >= 6 sigma of box margin
    GaussianBump { sigma: f64, center: f64 },
    /// Seeded trigonometric sum with power-law amplitude decay; the draws
    /// do not depend on the grid, so refinements sample the same function.
    RandomTrig { seed: u64, decay: f64 },
}

#[derive(Debug, Clone)]
pub struct CorpusFunction {
    pub name: String,
    pub builder: Builder,
    /// The regularity class the function is designed to occupy (None for
    /// smooth members).
    pub nominal_alpha: Option<f64>,
}

impl CorpusFunction {
    pub fn sample(&self, spec: GridSpec) -> Result<GridFunction, LipschitzError> {
        let base = spec.base_frequency();
        match &self.builder {
            Builder::SingleMode { k0 } => {
                let xi0 = *k0 as f64 * base;
                Ok(GridFunction::from_fn(spec, |x| (xi0 * x[0]).cos())?)
            }
            Builder::WeierstrassLike { alpha, j_terms } => {
                let top = 2f64.powi(*j_terms as i32) * base;
                let limit = std::f64::consts::PI / spec.spacing() / 2.0;
                if top >= limit {
                    return Err(LipschitzError::SpectrumOverflow { top, limit });
                }
                let a = *alpha;
                let j_terms = *j_terms;
                Ok(GridFunction::from_fn(spec, |x| {
                    (0..=j_terms)
                        .map(|j| {
                            2f64.powf(-(j as f64) * a) * (2f64.powi(j as i32) * base * x[0]).cos()
                        })
                        .sum()
                })?)
            }
            Builder::GaussianBump { sigma, center } => {
                if !(*sigma > 0.0) {
                    return Err(LipschitzError::Domain("sigma must be positive".into()));
                }
                if spec.side_length() / 2.0 - center.abs() < 6.0 * sigma {
                    return Err(LipschitzError::Domain(format!(
                        "Gaussian bump needs >= 6 sigma of margin inside [-L/2, L/2); \
                         sigma {sigma}, center {center}, L {}",
                        spec.side_length()
                    )));
                }
                let (s, c) = (*sigma, *center);
                Ok(GridFunction::from_fn(spec, |x| {
                    let r2: f64 = x.iter().map(|&xi| (xi - c) * (xi - c)).sum();
                    (-r2 / (2.0 * s * s)).exp()
                })?)
            }
            Builder::RandomTrig { seed, decay } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let n_modes = 12;
                let mut modes: Vec<(Vec<i64>, f64, f64)> = Vec::with_capacity(n_modes);
                for _ in 0..n_modes {
                    let k: Vec<i64> = (0..spec.dim())
                        .map(|_| {
                            let mag = rng.gen_range(1..=12i64);
                            if rng.gen::<bool>() {
                                mag
                            } else {
                                -mag
                            }
                        })
                        .collect();
                    let klen = (k.iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt();
                    let amp = klen.powf(-decay);
                    let phase = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
                    modes.push((k, amp, phase));
                }
                Ok(GridFunction::from_fn(spec, |x| {
                    modes
                        .iter()
                        .map(|(k, amp, phase)| {
                            let arg: f64 = x
                                .iter()
                                .zip(k)
                                .map(|(&xi, &ki)| ki as f64 * base * xi)
                                .sum();
                            amp * (arg + phase).cos()
                        })
                        .sum()
                })?)
            }
        }
    }
}

/// Default 1-D box length: 4 pi, so that cos(x) is the lattice mode k = 2
/// and the shift range L/4 = pi covers the second-difference arg-maxes.
pub const DEFAULT_SIDE_LENGTH: f64 = 4.0 * std::f64::consts::PI;

/// The default five-member corpus. `seed` feeds the RandomTrig member.
pub fn default_corpus(seed: u64) -> Vec<CorpusFunction> {
    vec![
        CorpusFunction {
            name: "single_mode".into(),
            builder: Builder::SingleMode { k0: 2 },
            nominal_alpha: None,
        },
        CorpusFunction {
            name: "weierstrass_a05".into(),
            builder: Builder::WeierstrassLike {
                alpha: 0.5,
                j_terms: 5,
            },
            nominal_alpha: Some(0.5),
        },
        CorpusFunction {
            name: "weierstrass_a12".into(),
            builder: Builder::WeierstrassLike {
                alpha: 1.2,
                j_terms: 5,
            },
            nominal_alpha: Some(1.2),
        },
        CorpusFunction {
            name: "gaussian_bump".into(),
            builder: Builder::GaussianBump {
                sigma: 0.7,
                center: 0.0,
            },
            nominal_alpha: None,
        },
        CorpusFunction {
            name: "random_trig".into(),
            builder: Builder::RandomTrig { seed, decay: 1.5 },
            nominal_alpha: None,
        },
    ]
}

/// Look a corpus member up by name, or return all for `"ALL"`.
pub fn corpus(selection: &str, seed: u64) -> Result<Vec<CorpusFunction>, LipschitzError> {
    let all = default_corpus(seed);
    if selection.eq_ignore_ascii_case("all") {
        return Ok(all);
    }
    all.into_iter()
        .find(|c| c.name == selection)
        .map(|c| vec![c])
        .ok_or_else(|| LipschitzError::Domain(format!("unknown corpus member '{selection}'")))
}

/// Closed-form continuum seminorm of a single mode cos(xi0 x):
/// S_alpha = xi0^alpha (k - alpha/4)^{k - alpha/4} e^{-(k - alpha/4)}.
pub fn single_mode_heat_seminorm(xi0: f64, alpha: f64) -> f64 {
    let k = (alpha / 4.0).floor() + 1.0;
    let e = k - alpha / 4.0;
    xi0.powf(alpha) * e.powf(e) * (-e).exp()
}

/// Poisson analog with k = [alpha] + 1 and weight exponent k - alpha.
pub fn single_mode_poisson_seminorm(xi0: f64, alpha: f64) -> f64 {
    let k = alpha.floor() + 1.0;
    let e = k - alpha;
    xi0.powf(alpha) * e.powf(e) * (-e).exp()
}
