//! Projective geometry primitives on complex projective space.
//!
//! Points are unit-norm homogeneous vectors in C^{n+1}. The separation of two
//! points is measured by the sine distance
//!
//! ```text
//! sigma(p, q) = |p ^ q| / (|p| |q|),     |p ^ q|^2 = sum_{i<j} |p_i q_j - p_j q_i|^2
//! ```
//!
//! which equals sin(d/sqrt(2)) for the Fubini-Study geodesic distance d, and
//! the logarithmic kernel is `log sigma <= 0`. The wedge norm is evaluated by
//! the expanded Gram (Lagrange) sum above rather than `1 - |<p,q>|^2`: both are
//! algebraically identical for unit vectors, but the expanded sum keeps full
//! relative accuracy near coincident points, which the chart-consistency
//! contract (1e-12 absolute agreement with the affine kernel) requires.

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use std::cmp::Ordering;

/// Below this sine distance two points are treated as coincident and the
/// kernel takes the value negative infinity.
pub const SIGMA_FLOOR: f64 = 1e-14;
/// Chart maps are undefined when the pivot coordinate modulus is below this.
pub const CHART_EPS: f64 = 1e-12;
const ZERO_NORM_FLOOR: f64 = 1e-300;

/// A point of complex projective n-space, stored as a unit-norm homogeneous
/// coordinate vector in C^{n+1}. Scale and phase are quotiented by the sine
/// distance, not by a canonical representative.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint<F: Real> {
    coords: Vec<Complex<F>>,
}

impl<F: Real> ProjectivePoint<F> {
    /// Normalize a raw homogeneous vector to unit Euclidean norm.
    pub fn normalize(raw: Vec<Complex<F>>) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "homogeneous vector needs at least 2 entries, got {}",
                raw.len()
            )));
        }
        if raw.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("homogeneous coordinates".into()));
        }
        let norm_sq: F = raw.iter().map(|c| c.norm_sqr()).sum();
        let norm = norm_sq.sqrt();
        if norm < F::of(ZERO_NORM_FLOOR) {
            return Err(Error::ZeroVector);
        }
        let coords = raw.into_iter().map(|c| c / norm).collect();
        Ok(Self { coords })
    }

    /// Build from separate real and imaginary parts (the point-set file layout).
    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch(format!(
                "re has {} entries, im has {}",
                re.len(),
                im.len()
            )));
        }
        let raw = re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex::new(F::of(r), F::of(i)))
            .collect();
        Self::normalize(raw)
    }

    /// The j-th standard basis point of P^n.
    pub fn axis(n: usize, j: usize) -> Result<Self> {
        if j > n {
            return Err(Error::IndexOutOfRange(format!("axis {j} on P^{n}")));
        }
        let mut raw = vec![Complex::new(F::zero(), F::zero()); n + 1];
        raw[j] = Complex::new(F::one(), F::zero());
        Self::normalize(raw)
    }

    pub fn coords(&self) -> &[Complex<F>] {
        &self.coords
    }

    /// Projective dimension n (one less than the coordinate count).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Phase-fixed representative: the largest-modulus coordinate is made real
    /// and nonnegative. Used for reproducible tie-breaking, never for equality.
    pub fn canonicalized(&self) -> Self {
        let pivot = self
            .coords
            .iter()
            .enumerate()
            .max_by(|a, b| cmp_f(a.1.norm_sqr(), b.1.norm_sqr()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let c = self.coords[pivot];
        let modulus = c.norm();
        if modulus < F::of(ZERO_NORM_FLOOR) {
            return self.clone();
        }
        let phase = c.conj() / modulus;
        Self {
            coords: self.coords.iter().map(|z| z * phase).collect(),
        }
    }

    /// Hermitian inner product sum_i p_i conj(q_i).
    pub(crate) fn inner(&self, other: &Self) -> Complex<F> {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(Complex::new(F::zero(), F::zero()), |acc, (a, b)| {
                acc + a * b.conj()
            })
    }
}

fn cmp_f<F: Real>(a: F, b: F) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Total lexicographic order on coordinate vectors; used to fix one evaluation
/// order for symmetric kernels so that k(p,q) and k(q,p) are bit-identical.
pub(crate) fn lex_cmp<F: Real>(p: &ProjectivePoint<F>, q: &ProjectivePoint<F>) -> Ordering {
    for (a, b) in p.coords.iter().zip(&q.coords) {
        match cmp_f(a.re, b.re).then(cmp_f(a.im, b.im)) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    p.coords.len().cmp(&q.coords.len())
}

fn ordered<'a, F: Real>(
    p: &'a ProjectivePoint<F>,
    q: &'a ProjectivePoint<F>,
) -> (&'a ProjectivePoint<F>, &'a ProjectivePoint<F>) {
    if lex_cmp(p, q) == Ordering::Greater {
        (q, p)
    } else {
        (p, q)
    }
}

fn check_dims<F: Real>(p: &ProjectivePoint<F>, q: &ProjectivePoint<F>) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(format!(
            "P^{} vs P^{}",
            p.dim(),
            q.dim()
        )));
    }
    Ok(())
}

fn wedge_sq_slices<F: Real>(a: &[Complex<F>], b: &[Complex<F>]) -> F {
    let mut acc = F::zero();
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let w = a[i] * b[j] - a[j] * b[i];
            acc += w.norm_sqr();
        }
    }
    acc
}

/// Wedge norm |p ^ q| of two unit-norm points, clamped to [0, 1].
pub fn wedge_norm<F: Real>(p: &ProjectivePoint<F>, q: &ProjectivePoint<F>) -> Result<F> {
    check_dims(p, q)?;
    let (a, b) = ordered(p, q);
    let sq = wedge_sq_slices(&a.coords, &b.coords);
    Ok(sq.max(F::zero()).sqrt().min(F::one()))
}

/// Sine distance sigma(p,q) = |p ^ q| for unit representatives; values in [0, 1].
pub fn sine_distance<F: Real>(p: &ProjectivePoint<F>, q: &ProjectivePoint<F>) -> Result<F> {
    wedge_norm(p, q)
}

/// Fubini-Study geodesic distance d = sqrt(2) arcsin sigma, in [0, pi/sqrt(2)].
pub fn geodesic_distance<F: Real>(p: &ProjectivePoint<F>, q: &ProjectivePoint<F>) -> Result<F> {
    let sigma = sine_distance(p, q)?;
    Ok(F::SQRT_2() * sigma.asin())
}

/// The projective logarithmic kernel log sigma(p, q) <= 0, with the value
/// negative infinity below the coincidence floor.
pub fn log_kernel<F: Real>(p: &ProjectivePoint<F>, q: &ProjectivePoint<F>) -> Result<F> {
    let sigma = sine_distance(p, q)?;
    if sigma < F::of(SIGMA_FLOOR) {
        Ok(F::neg_infinity())
    } else {
        Ok(sigma.ln())
    }
}

/// A point in the affine chart `chart` of P^n, i.e. the coordinates after
/// dividing by the chart's homogeneous coordinate and dropping it.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePoint<F: Real> {
    pub z: Vec<Complex<F>>,
    pub chart: usize,
}

impl<F: Real> AffinePoint<F> {
    pub fn new(z: Vec<Complex<F>>, chart: usize) -> Result<Self> {
        if chart > z.len() {
            return Err(Error::IndexOutOfRange(format!(
                "chart {chart} with {} affine coordinates",
                z.len()
            )));
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("affine coordinates".into()));
        }
        Ok(Self { z, chart })
    }
}

/// Lift an affine point back to a unit-norm projective point.
pub fn affine_lift<F: Real>(a: &AffinePoint<F>) -> Result<ProjectivePoint<F>> {
    let n = a.z.len();
    if a.chart > n {
        return Err(Error::IndexOutOfRange(format!("chart {} on P^{n}", a.chart)));
    }
    let mut raw = Vec::with_capacity(n + 1);
    raw.extend_from_slice(&a.z[..a.chart]);
    raw.push(Complex::new(F::one(), F::zero()));
    raw.extend_from_slice(&a.z[a.chart..]);
    ProjectivePoint::normalize(raw)
}

/// Chart map: divide by the chart coordinate and drop it.
pub fn chart_coords<F: Real>(p: &ProjectivePoint<F>, chart: usize) -> Result<AffinePoint<F>> {
    if chart > p.dim() {
        return Err(Error::IndexOutOfRange(format!(
            "chart {chart} on P^{}",
            p.dim()
        )));
    }
    let pivot = p.coords[chart];
    let modulus = pivot.norm();
    if modulus <= F::of(CHART_EPS) {
        return Err(Error::ChartUndefined {
            chart,
            modulus: modulus.as_f64(),
        });
    }
    let z = p
        .coords
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != chart)
        .map(|(_, c)| c / pivot)
        .collect();
    Ok(AffinePoint { z, chart })
}

/// The normalized affine kernel
/// `(1/2) log[(|z-w|^2 + |z^w|^2) / ((1+|z|^2)(1+|w|^2))]`,
/// which agrees with `log_kernel` after lifting both arguments.
pub fn affine_log_kernel<F: Real>(z: &AffinePoint<F>, w: &AffinePoint<F>) -> Result<F> {
    if z.chart != w.chart {
        return Err(Error::ChartMismatch(z.chart, w.chart));
    }
    if z.z.len() != w.z.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} affine coordinates",
            z.z.len(),
            w.z.len()
        )));
    }
    let (a, b) = if lex_cmp_slices(&z.z, &w.z) == Ordering::Greater {
        (&w.z, &z.z)
    } else {
        (&z.z, &w.z)
    };
    let diff_sq: F = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (*x - *y).norm_sqr())
        .sum();
    let num = diff_sq + wedge_sq_slices(a, b);
    let den = (F::one() + a.iter().map(|c| c.norm_sqr()).sum())
        * (F::one() + b.iter().map(|c| c.norm_sqr()).sum());
    let ratio = (num / den).max(F::zero()).min(F::one());
    if ratio < F::of(SIGMA_FLOOR * SIGMA_FLOOR) {
        Ok(F::neg_infinity())
    } else {
        Ok(F::of(0.5) * ratio.ln())
    }
}

fn lex_cmp_slices<F: Real>(a: &[Complex<F>], b: &[Complex<F>]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match cmp_f(x.re, y.re).then(cmp_f(x.im, y.im)) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

/// Exchange homogeneous coordinates j and k. An involution; it does not in
/// general preserve distances between arbitrary pairs.
pub fn chart_swap<F: Real>(
    p: &ProjectivePoint<F>,
    j: usize,
    k: usize,
) -> Result<ProjectivePoint<F>> {
    let n = p.dim();
    if j > n || k > n {
        return Err(Error::IndexOutOfRange(format!("swap({j},{k}) on P^{n}")));
    }
    if j == k {
        return Err(Error::InvalidArgument("swap indices must differ".into()));
    }
    let mut coords = p.coords.clone();
    coords.swap(j, k);
    Ok(ProjectivePoint { coords })
}

pub use crate::scalar::max_geodesic as max_geodesic_distance;
