//! Periodic grid discretization of R^n (n = 1, 2) and the spectral transform.
//!
//! The ambient space is approximated by the box [-L/2, L/2)^dim with N
//! samples per axis; all operators elsewhere in the crate are Fourier
//! multipliers, which the torus realizes exactly on its modes.
//! Frequencies are xi_k = 2*pi*k/L with k in {-N/2, ..., N/2-1} per axis,
//! stored in FFT bin order (k = j for j < N/2, k = j - N otherwise).

use std::io::{BufRead, Write};
use std::sync::Mutex;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::FftPlanner;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid spec: {0}")]
    InvalidSpec(String),
    #[error("value array has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("conjugate symmetry violated at bin {index}: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    SymmetryViolation {
        index: usize,
        residual: f64,
        tol: f64,
    },
    #[error("shift {0:?} is not an integer multiple of the grid spacing")]
    NonLatticeShift(Vec<f64>),
    #[error("csv parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Relative tolerance of the conjugate-symmetry check in [`inverse`].
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    points_per_axis: usize,
    side_length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points_per_axis: usize, side_length: f64) -> Result<Self, GridError> {
        if dim != 1 && dim != 2 {
            return Err(GridError::InvalidSpec(format!("dim must be 1 or 2, got {dim}")));
        }
        if points_per_axis < 16 || !points_per_axis.is_power_of_two() {
            return Err(GridError::InvalidSpec(format!(
                "points_per_axis must be a power of two >= 16, got {points_per_axis}"
            )));
        }
        if !(side_length > 0.0) || !side_length.is_finite() {
            return Err(GridError::InvalidSpec(format!(
                "side_length must be positive and finite, got {side_length}"
            )));
        }
        Ok(GridSpec {
            dim,
            points_per_axis,
            side_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    /// Grid spacing h = L/N.
    pub fn spacing(&self) -> f64 {
        self.side_length / self.points_per_axis as f64
    }

    /// Total number of samples N^dim.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Fundamental frequency 2*pi/L.
    pub fn base_frequency(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.side_length
    }

    /// Coordinates of the sample with row-major linear index `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let n = self.points_per_axis;
        let h = self.spacing();
        let half = self.side_length / 2.0;
        match self.dim {
            1 => vec![-half + h * idx as f64],
            2 => {
                let j1 = idx / n;
                let j2 = idx % n;
                vec![-half + h * j1 as f64, -half + h * j2 as f64]
            }
            _ => unreachable!(),
        }
    }

    /// Signed frequency index per axis for the FFT bin `j`.
    pub fn freq_index(&self, j: usize) -> i64 {
        let n = self.points_per_axis as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Frequency vector xi of the mode with row-major linear index `idx`.
    pub fn frequency(&self, idx: usize) -> Vec<f64> {
        let n = self.points_per_axis;
        let base = self.base_frequency();
        match self.dim {
            1 => vec![self.freq_index(idx) as f64 * base],
            2 => {
                let j1 = idx / n;
                let j2 = idx % n;
                vec![
                    self.freq_index(j1) as f64 * base,
                    self.freq_index(j2) as f64 * base,
                ]
            }
            _ => unreachable!(),
        }
    }

    /// Linear index of the bin with conjugate frequency -xi.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.points_per_axis;
        match self.dim {
            1 => (n - idx) % n,
            2 => {
                let j1 = idx / n;
                let j2 = idx % n;
                ((n - j1) % n) * n + (n - j2) % n
            }
            _ => unreachable!(),
        }
    }

    /// Smallest nonzero |xi| on the grid.
    pub fn min_nonzero_frequency(&self) -> f64 {
        self.base_frequency()
    }
}

/// A real-valued function sampled on the grid, row-major for dim = 2.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != spec.len() {
            return Err(GridError::LengthMismatch {
                got: values.len(),
                expected: spec.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite(i));
        }
        Ok(GridFunction { spec, values })
    }

    /// Sample `f` at every grid point.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(spec: GridSpec, f: F) -> Result<Self, GridError> {
        let values = (0..spec.len()).map(|i| f(&spec.point(i))).collect();
        GridFunction::new(spec, values)
    }

    pub fn zero(spec: GridSpec) -> Self {
        GridFunction {
            spec,
            values: vec![0.0; spec.len()],
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction {
            spec: self.spec,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        assert_eq!(self.spec, other.spec);
        GridFunction {
            spec: self.spec,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.add(&other.scale(-1.0))
    }

    /// Subtract the mean, making the function orthogonal to constants.
    pub fn project_mean_zero(&self) -> GridFunction {
        let m = self.mean();
        GridFunction {
            spec: self.spec,
            values: self.values.iter().map(|v| v - m).collect(),
        }
    }

    /// Write as CSV: a `# dim,N,L` header line followed by one sample per
    /// line (row-major for dim = 2), 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<(), GridError> {
        writeln!(
            w,
            "# {},{},{:.16e}",
            self.spec.dim, self.spec.points_per_axis, self.spec.side_length
        )?;
        for v in &self.values {
            writeln!(w, "{v:.16e}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: &mut R) -> Result<Self, GridError> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let header = header.trim();
        let body = header
            .strip_prefix('#')
            .ok_or_else(|| GridError::Parse("missing '# dim,N,L' header".into()))?
            .trim();
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 3 {
            return Err(GridError::Parse(format!("bad header '{header}'")));
        }
        let dim: usize = parts[0]
            .trim()
            .parse()
            .map_err(|e| GridError::Parse(format!("dim: {e}")))?;
        let n: usize = parts[1]
            .trim()
            .parse()
            .map_err(|e| GridError::Parse(format!("N: {e}")))?;
        let l: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|e| GridError::Parse(format!("L: {e}")))?;
        let spec = GridSpec::new(dim, n, l)?;
        let mut values = Vec::with_capacity(spec.len());
        for line in r.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            values.push(
                t.parse::<f64>()
                    .map_err(|e| GridError::Parse(format!("sample: {e}")))?,
            );
        }
        GridFunction::new(spec, values)
    }
}

/// The frequency-space representation, FFT bin order, normalized so that a
/// pure mode cos(xi_k . x) has weight 1/2 at +-xi_k.
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(spec: GridSpec, coeffs: Vec<Complex64>) -> Result<Self, GridError> {
        if coeffs.len() != spec.len() {
            return Err(GridError::LengthMismatch {
                got: coeffs.len(),
                expected: spec.len(),
            });
        }
        Ok(SpectralFunction { spec, coeffs })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Discrete L2 norm computed on the spectral side (Plancherel):
    /// sqrt(L^dim * sum |c_k|^2).
    pub fn l2_norm(&self) -> f64 {
        let vol = self.spec.side_length.powi(self.spec.dim as i32);
        (vol * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Average conjugate bin pairs, projecting onto the exactly
    /// conjugate-symmetric subspace. High-order multipliers can amplify
    /// rounding-level asymmetry in otherwise real data far above the
    /// symmetry tolerance; this removes it without touching the symmetric
    /// part.
    pub fn symmetrize(&mut self) {
        for idx in 0..self.coeffs.len() {
            let partner = self.spec.conjugate_index(idx);
            if partner < idx {
                continue;
            }
            let avg = 0.5 * (self.coeffs[idx] + self.coeffs[partner].conj());
            if partner == idx {
                self.coeffs[idx] = Complex64::new(avg.re, 0.0);
            } else {
                self.coeffs[idx] = avg;
                self.coeffs[partner] = avg.conj();
            }
        }
    }

    /// Largest residual of the conjugate-symmetry relation, relative to the
    /// largest coefficient magnitude. Returns the offending index as well.
    pub fn symmetry_residual(&self) -> (usize, f64) {
        let cmax = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut worst = (0usize, 0.0f64);
        for idx in 0..self.coeffs.len() {
            let partner = self.spec.conjugate_index(idx);
            let r = (self.coeffs[idx] - self.coeffs[partner].conj()).norm() / cmax;
            if r > worst.1 {
                worst = (idx, r);
            }
        }
        worst
    }
}

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn fft_axis(buf: &mut [Complex64], n: usize, dim: usize, forward: bool) {
    let plan = {
        let mut planner = PLANNER.lock().unwrap();
        if forward {
            planner.plan_fft_forward(n)
        } else {
            planner.plan_fft_inverse(n)
        }
    };
    match dim {
        1 => plan.process(buf),
        2 => {
            // Rows (contiguous), then columns via transpose.
            plan.process(buf);
            transpose(buf, n);
            plan.process(buf);
            transpose(buf, n);
        }
        _ => unreachable!(),
    }
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Parity of the per-axis bin indices; multiplying bin j by (-1)^(j1+j2)
/// re-centers the transform on the box [-L/2, L/2).
fn center_sign(spec: &GridSpec, idx: usize) -> f64 {
    let n = spec.points_per_axis();
    let parity = match spec.dim() {
        1 => idx % 2,
        2 => (idx / n + idx % n) % 2,
        _ => unreachable!(),
    };
    if parity == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Forward spectral transform.
pub fn forward(f: &GridFunction) -> SpectralFunction {
    let spec = *f.spec();
    let n = spec.points_per_axis();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_axis(&mut buf, n, spec.dim(), true);
    let scale = 1.0 / spec.len() as f64;
    for (idx, c) in buf.iter_mut().enumerate() {
        *c *= scale * center_sign(&spec, idx);
    }
    SpectralFunction { spec, coeffs: buf }
}

/// Inverse spectral transform; checks conjugate symmetry first and discards
/// the sub-tolerance imaginary residue.
pub fn inverse(ff: &SpectralFunction) -> Result<GridFunction, GridError> {
    let (index, residual) = ff.symmetry_residual();
    if residual > SYMMETRY_TOL {
        return Err(GridError::SymmetryViolation {
            index,
            residual,
            tol: SYMMETRY_TOL,
        });
    }
    let spec = *ff.spec();
    let n = spec.points_per_axis();
    let mut buf: Vec<Complex64> = ff
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, &c)| c * center_sign(&spec, idx))
        .collect();
    fft_axis(&mut buf, n, spec.dim(), false);
    let values = buf.iter().map(|c| c.re).collect();
    GridFunction::new(spec, values)
}

/// Max over grid points of |f|; the library-wide sup norm (no interpolation
/// between samples).
pub fn sup_norm(f: &GridFunction) -> f64 {
    f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Discrete L2 norm sqrt(h^dim * sum f^2).
pub fn l2_norm(f: &GridFunction) -> f64 {
    let h = f.spec().spacing().powi(f.spec().dim() as i32);
    (h * f.values().iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// Periodic circular shift by a lattice vector: g(x) = f(x + y). Exact.
pub fn shift(f: &GridFunction, y: &[f64]) -> Result<GridFunction, GridError> {
    let spec = *f.spec();
    if y.len() != spec.dim() {
        return Err(GridError::NonLatticeShift(y.to_vec()));
    }
    let h = spec.spacing();
    let n = spec.points_per_axis() as i64;
    let mut steps = Vec::with_capacity(y.len());
    for &yi in y {
        let m = yi / h;
        if (m - m.round()).abs() > 1e-9 * (1.0 + m.abs()) {
            return Err(GridError::NonLatticeShift(y.to_vec()));
        }
        steps.push((m.round() as i64).rem_euclid(n) as usize);
    }
    let nn = spec.points_per_axis();
    let values: Vec<f64> = match spec.dim() {
        1 => (0..nn).map(|j| f.values()[(j + steps[0]) % nn]).collect(),
        2 => (0..spec.len())
            .map(|idx| {
                let j1 = (idx / nn + steps[0]) % nn;
                let j2 = (idx % nn + steps[1]) % nn;
                f.values()[j1 * nn + j2]
            })
            .collect(),
        _ => unreachable!(),
    };
    GridFunction::new(spec, values)
}

/// Shift by an integer number of grid steps per axis.
pub fn shift_steps(f: &GridFunction, steps: &[i64]) -> GridFunction {
    let h = f.spec().spacing();
    let y: Vec<f64> = steps.iter().map(|&m| m as f64 * h).collect();
    shift(f, &y).expect("integer steps are always lattice shifts")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec1(n: usize, l: f64) -> GridSpec {
        GridSpec::new(1, n, l).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(3, 64, 1.0).is_err());
        assert!(GridSpec::new(1, 48, 1.0).is_err());
        assert!(GridSpec::new(1, 8, 1.0).is_err());
        assert!(GridSpec::new(2, 64, -1.0).is_err());
        assert!(GridSpec::new(2, 64, 2.0).is_ok());
    }

    #[test]
    fn constant_maps_to_dc_mode() {
        let spec = spec1(64, 2.0 * std::f64::consts::PI);
        let f = GridFunction::from_fn(spec, |_| 1.0).unwrap();
        let ff = forward(&f);
        assert!((ff.coeffs()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        for c in &ff.coeffs()[1..] {
            assert!(c.norm() < 1e-14);
        }
    }

    #[test]
    fn single_cosine_mode_weights() {
        let l = 2.0 * std::f64::consts::PI;
        let spec = spec1(64, l);
        let f = GridFunction::from_fn(spec, |x| (2.0 * std::f64::consts::PI * x[0] / l).cos())
            .unwrap();
        let ff = forward(&f);
        for (idx, c) in ff.coeffs().iter().enumerate() {
            let k = spec.freq_index(idx);
            let expected = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!(
                (c - Complex64::new(expected, 0.0)).norm() < 1e-13,
                "bin {idx} (k={k}): {c}"
            );
        }
    }

    #[test]
    fn inverse_of_dc_is_constant() {
        let spec = spec1(32, 5.0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 32];
        coeffs[0] = Complex64::new(1.0, 0.0);
        let ff = SpectralFunction::new(spec, coeffs).unwrap();
        let f = inverse(&ff).unwrap();
        for v in f.values() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_of_mode_pair_is_cosine() {
        let spec = spec1(32, 4.0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 32];
        coeffs[1] = Complex64::new(0.5, 0.0);
        coeffs[31] = Complex64::new(0.5, 0.0);
        let ff = SpectralFunction::new(spec, coeffs).unwrap();
        let f = inverse(&ff).unwrap();
        let base = spec.base_frequency();
        for (i, v) in f.values().iter().enumerate() {
            let x = spec.point(i)[0];
            assert!((v - (base * x).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn asymmetric_coeffs_rejected() {
        let spec = spec1(32, 4.0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 32];
        coeffs[1] = Complex64::new(1.0, 0.0);
        let ff = SpectralFunction::new(spec, coeffs).unwrap();
        assert!(matches!(
            inverse(&ff),
            Err(GridError::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn sup_norm_examples() {
        let l = 8.0 * std::f64::consts::PI;
        let spec = spec1(64, l);
        let base = spec.base_frequency();
        let f = GridFunction::from_fn(spec, |x| (base * x[0]).cos()).unwrap();
        assert!((sup_norm(&f) - 1.0).abs() < 1e-15);
        assert_eq!(sup_norm(&GridFunction::zero(spec)), 0.0);
        // 0.3 cos + 0.4 -> 0.7; N=64 is a multiple of the k=1 period, so a
        // grid point hits the peak.
        let g = GridFunction::from_fn(spec, |x| 0.3 * (base * x[0]).cos() + 0.4).unwrap();
        assert!((sup_norm(&g) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn l2_norm_of_constant() {
        let spec = GridSpec::new(2, 16, 3.0).unwrap();
        let f = GridFunction::from_fn(spec, |_| 1.0).unwrap();
        assert!((l2_norm(&f) - 3.0).abs() < 1e-13);
        assert_eq!(l2_norm(&GridFunction::zero(spec)), 0.0);
    }

    #[test]
    fn shift_examples() {
        let l = 2.0 * std::f64::consts::PI;
        let spec = spec1(64, l);
        let f = GridFunction::from_fn(spec, |x| x[0].cos()).unwrap();
        let same = shift(&f, &[0.0]).unwrap();
        assert_eq!(f.values(), same.values());
        let full = shift(&f, &[l]).unwrap();
        assert_eq!(f.values(), full.values());
        // Quarter-period shift of cos is -sin, sampled.
        let q = shift(&f, &[l / 4.0]).unwrap();
        for (i, v) in q.values().iter().enumerate() {
            let x = spec.point(i)[0];
            assert!((v - (x + l / 4.0).cos()).abs() < 1e-13);
        }
        assert!(matches!(
            shift(&f, &[0.3 * spec.spacing()]),
            Err(GridError::NonLatticeShift(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let spec = spec1(16, 3.5);
        let f = GridFunction::from_fn(spec, |x| (x[0] * 1.7).sin() + 0.25).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let g = GridFunction::read_csv(&mut std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(f.spec(), g.spec());
        assert_eq!(f.values(), g.values());
    }
}
