//! Discrete measures on projective space, their potentials and energies.
//!
//! A `DiscreteMeasure` is a finite list of weighted atoms. The potential of a
//! measure at a point is the weighted sum of log-kernel values, the energy is
//! the double sum of `-log sigma` against the product measure, and the
//! off-diagonal energy is the same sum with the (infinite) diagonal excluded.
//! Monte Carlo estimation of continuous energies draws independent pairs in
//! fixed-size chunks with per-chunk derived seeds and reduces in chunk order,
//! so results are identical at any thread count.

use crate::error::{Error, Result};
use crate::geometry::{
    geodesic_distance, log_kernel, sine_distance, ProjectivePoint, SIGMA_FLOOR,
};
use crate::rng::{normal_f64, stream_rng, STREAM_FS};
use crate::scalar::{max_geodesic, Real};
use num_complex::Complex;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::sync::Arc;

/// Atoms closer than this are merged at construction time.
pub const MERGE_TOL: f64 = 1e-14;
/// Monte Carlo pair draws are generated in chunks of this size.
pub const MC_CHUNK: u64 = 4096;
const MC_MAX_ATTEMPTS: u64 = 32;

/// Finitely many weighted atoms with nonnegative weights. Zero-weight atoms
/// are dropped and near-coincident atoms merged on construction.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure<F: Real> {
    atoms: Vec<ProjectivePoint<F>>,
    weights: Vec<F>,
}

impl<F: Real> DiscreteMeasure<F> {
    pub fn new(atoms: Vec<ProjectivePoint<F>>, weights: Vec<F>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if let Some(first) = atoms.first() {
            let n = first.dim();
            if atoms.iter().any(|a| a.dim() != n) {
                return Err(Error::DimensionMismatch("mixed atom dimensions".into()));
            }
        }
        if weights.iter().any(|w| !w.is_finite() || *w < F::zero()) {
            return Err(Error::InvalidMeasure(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let merge_tol = F::of(MERGE_TOL);
        let mut kept: Vec<ProjectivePoint<F>> = Vec::with_capacity(atoms.len());
        let mut kept_w: Vec<F> = Vec::with_capacity(atoms.len());
        for (atom, w) in atoms.into_iter().zip(weights) {
            if w == F::zero() {
                continue;
            }
            let mut merged = false;
            for (i, existing) in kept.iter().enumerate() {
                if sine_distance(existing, &atom)? <= merge_tol {
                    kept_w[i] += w;
                    merged = true;
                    break;
                }
            }
            if !merged {
                kept.push(atom);
                kept_w.push(w);
            }
        }
        Ok(Self {
            atoms: kept,
            weights: kept_w,
        })
    }

    /// Unit point mass.
    pub fn dirac(atom: ProjectivePoint<F>) -> Self {
        Self {
            atoms: vec![atom],
            weights: vec![F::one()],
        }
    }

    /// Uniform probability measure on the given points.
    pub fn uniform(points: &[ProjectivePoint<F>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let w = F::one() / F::of(points.len() as f64);
        Self::new(points.to_vec(), vec![w; points.len()])
    }

    pub fn atoms(&self) -> &[ProjectivePoint<F>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.atoms.first().map(|a| a.dim())
    }

    pub fn total_mass(&self) -> F {
        self.weights.iter().copied().sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - F::one()).abs() <= F::of(1e-12)
    }

    /// Same atoms, all weights multiplied by `factor`.
    pub fn scaled(&self, factor: F) -> Result<Self> {
        if !factor.is_finite() || factor < F::zero() {
            return Err(Error::InvalidMeasure("scale must be finite and >= 0".into()));
        }
        Self::new(
            self.atoms.clone(),
            self.weights.iter().map(|w| *w * factor).collect(),
        )
    }

    /// Sum of two measures (atoms merged where coincident).
    pub fn merged_with(&self, other: &Self) -> Result<Self> {
        if let (Some(a), Some(b)) = (self.dim(), other.dim()) {
            if a != b {
                return Err(Error::DimensionMismatch(format!("P^{a} vs P^{b}")));
            }
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let mut weights = self.weights.clone();
        weights.extend(other.weights.iter().copied());
        Self::new(atoms, weights)
    }

    fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.atoms.len()).collect();
        idx.sort_by(|&a, &b| crate::geometry::lex_cmp(&self.atoms[a], &self.atoms[b]));
        idx
    }
}

fn measure_cmp<F: Real>(a: &DiscreteMeasure<F>, b: &DiscreteMeasure<F>) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.atoms.iter().zip(&b.atoms) {
            match crate::geometry::lex_cmp(x, y) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    })
}

/// Result of an exact or Monte Carlo energy evaluation. `stderr` is absent for
/// exact sums; `value` may be positive infinity.
#[derive(Clone, Debug)]
pub struct EnergyEstimate<F: Real> {
    pub value: F,
    pub stderr: Option<F>,
    pub samples_used: u64,
    pub rejections: u64,
}

/// Potential of the measure at a point: the weighted sum of log-kernel values.
/// Negative infinity exactly when the point coincides with a positive-weight atom.
pub fn potential<F: Real>(mu: &DiscreteMeasure<F>, point: &ProjectivePoint<F>) -> Result<F> {
    if mu.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let mut acc = F::zero();
    for (atom, w) in mu.atoms.iter().zip(&mu.weights) {
        let k = log_kernel(point, atom)?;
        if k == F::neg_infinity() {
            return Ok(F::neg_infinity());
        }
        acc += *w * k;
    }
    Ok(acc)
}

/// Mutual energy: the exact double sum of `-log sigma` against the product of
/// the two measures. Positive infinity when the supports share an atom.
/// Bit-symmetric in its arguments via canonical ordering.
pub fn mutual_energy<F: Real>(
    mu: &DiscreteMeasure<F>,
    nu: &DiscreteMeasure<F>,
) -> Result<EnergyEstimate<F>> {
    if mu.is_empty() || nu.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch("measure dimensions differ".into()));
    }
    let (a, b) = if measure_cmp(mu, nu) == Ordering::Greater {
        (nu, mu)
    } else {
        (mu, nu)
    };
    let mut acc = F::zero();
    for (pa, wa) in a.atoms.iter().zip(&a.weights) {
        for (pb, wb) in b.atoms.iter().zip(&b.weights) {
            let k = log_kernel(pa, pb)?;
            if k == F::neg_infinity() {
                return Ok(EnergyEstimate {
                    value: F::infinity(),
                    stderr: None,
                    samples_used: (a.len() * b.len()) as u64,
                    rejections: 0,
                });
            }
            acc += *wa * *wb * (-k);
        }
    }
    Ok(EnergyEstimate {
        value: acc,
        stderr: None,
        samples_used: (a.len() * b.len()) as u64,
        rejections: 0,
    })
}

/// Energy of a measure against itself. Always positive infinity for a
/// nonempty atomic measure, because the diagonal terms diverge.
pub fn energy<F: Real>(mu: &DiscreteMeasure<F>) -> Result<EnergyEstimate<F>> {
    mutual_energy(mu, mu)
}

fn offdiag_sum<F: Real>(mu: &DiscreteMeasure<F>) -> Result<F> {
    let order = mu.canonical_order();
    let mut acc = F::zero();
    for a in 0..order.len() {
        for b in (a + 1)..order.len() {
            let (i, j) = (order[a], order[b]);
            let k = log_kernel(&mu.atoms[i], &mu.atoms[j])?;
            acc += mu.weights[i] * mu.weights[j] * (-k);
        }
    }
    Ok(acc + acc)
}

/// Off-diagonal energy sum_{i != j} w_i w_j (-log sigma(a_i, a_j)) >= 0, the
/// discrete surrogate for the continuous energy. Finite by construction since
/// distinct atoms are at least the merge tolerance apart. Invariant under atom
/// permutation bit-for-bit (canonical summation order).
pub fn offdiag_energy<F: Real>(mu: &DiscreteMeasure<F>) -> Result<F> {
    if mu.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    if mu.len() < 2 {
        return Err(Error::SingleAtom);
    }
    offdiag_sum(mu)
}

/// Residual of the polarization identity
/// `I(mu+nu) = I(mu) + I(nu) + 2 I(mu,nu)` evaluated with off-diagonal sums
/// for the self-energies. Requires disjoint supports.
pub fn polarization_residual<F: Real>(
    mu: &DiscreteMeasure<F>,
    nu: &DiscreteMeasure<F>,
) -> Result<F> {
    if mu.is_empty() || nu.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let tol = F::of(MERGE_TOL);
    for a in &mu.atoms {
        for b in &nu.atoms {
            if sine_distance(a, b)? < tol {
                return Err(Error::SharedAtoms);
            }
        }
    }
    let combined = mu.merged_with(nu)?;
    let lhs = offdiag_sum(&combined)?;
    let self_mu = offdiag_sum(mu)?;
    let self_nu = offdiag_sum(nu)?;
    let cross = mutual_energy(mu, nu)?.value;
    Ok((lhs - self_mu - self_nu - cross - cross).abs())
}

/// Deterministic point sampler: `draw(seed, index)` always yields the same point.
#[derive(Clone)]
pub struct MeasureSampler<F: Real> {
    pub n: usize,
    pub description: String,
    draw_fn: Arc<dyn Fn(u64, u64) -> ProjectivePoint<F> + Send + Sync>,
}

impl<F: Real> MeasureSampler<F> {
    pub fn new(
        n: usize,
        description: impl Into<String>,
        draw_fn: Arc<dyn Fn(u64, u64) -> ProjectivePoint<F> + Send + Sync>,
    ) -> Self {
        Self {
            n,
            description: description.into(),
            draw_fn,
        }
    }

    pub fn draw(&self, seed: u64, index: u64) -> ProjectivePoint<F> {
        (self.draw_fn)(seed, index)
    }
}

pub(crate) fn fs_point<F: Real>(n: usize, seed: u64, index: u64) -> ProjectivePoint<F> {
    let mut rng = stream_rng(seed, STREAM_FS ^ ((n as u64) << 32), index);
    loop {
        let raw: Vec<Complex<F>> = (0..=n)
            .map(|_| Complex::new(F::of(normal_f64(&mut rng)), F::of(normal_f64(&mut rng))))
            .collect();
        if let Ok(p) = ProjectivePoint::normalize(raw) {
            return p;
        }
    }
}

/// Sampler for the Fubini-Study probability volume on P^n: normalized
/// standard complex Gaussian vectors in C^{n+1}.
pub fn fs_sampler<F: Real>(n: usize) -> MeasureSampler<F> {
    MeasureSampler::new(
        n,
        format!("fubini-study(P^{n})"),
        Arc::new(move |seed, index| fs_point(n, seed, index)),
    )
}

/// `count` Fubini-Study uniform points, deterministic per seed.
pub fn sample_fs<F: Real>(n: usize, count: usize, seed: u64) -> Vec<ProjectivePoint<F>> {
    (0..count as u64).map(|i| fs_point(n, seed, i)).collect()
}

struct ChunkStat<F> {
    sum: F,
    sum_sq: F,
    count: u64,
    rejections: u64,
    failed: u64,
}

/// Chunked, order-stable Monte Carlo mean of a pair functional. The pair
/// functional returns `None` for a singular draw, which is rejected and
/// redrawn with a fresh attempt index.
pub(crate) fn mc_mean<F, G>(pairs: u64, eval: G) -> EnergyEstimate<F>
where
    F: Real,
    G: Fn(u64, u64) -> Option<F> + Sync,
{
    let chunk_count = pairs.div_ceil(MC_CHUNK);
    let stats: Vec<ChunkStat<F>> = (0..chunk_count)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * MC_CHUNK;
            let hi = (lo + MC_CHUNK).min(pairs);
            let mut st = ChunkStat {
                sum: F::zero(),
                sum_sq: F::zero(),
                count: 0,
                rejections: 0,
                failed: 0,
            };
            for k in lo..hi {
                let mut ok = false;
                for attempt in 0..MC_MAX_ATTEMPTS {
                    if let Some(v) = eval(k, attempt) {
                        st.sum += v;
                        st.sum_sq += v * v;
                        st.count += 1;
                        ok = true;
                        break;
                    }
                    st.rejections += 1;
                }
                if !ok {
                    st.failed += 1;
                }
            }
            st
        })
        .collect();

    let mut sum = F::zero();
    let mut sum_sq = F::zero();
    let mut count = 0u64;
    let mut rejections = 0u64;
    let mut failed = 0u64;
    for st in stats {
        sum += st.sum;
        sum_sq += st.sum_sq;
        count += st.count;
        rejections += st.rejections;
        failed += st.failed;
    }

    if count == 0 || rejections > count {
        // rejection rate above one half: treat the integral as divergent
        return EnergyEstimate {
            value: F::infinity(),
            stderr: None,
            samples_used: count,
            rejections: rejections + failed * MC_MAX_ATTEMPTS,
        };
    }
    let nf = F::of(count as f64);
    let mean = sum / nf;
    let stderr = if count > 1 {
        let var = ((sum_sq - nf * mean * mean) / F::of((count - 1) as f64)).max(F::zero());
        Some((var / nf).sqrt())
    } else {
        None
    };
    EnergyEstimate {
        value: mean,
        stderr,
        samples_used: count,
        rejections,
    }
}

fn pair_index(pair: u64, attempt: u64, which: u64) -> u64 {
    pair * (2 * MC_MAX_ATTEMPTS) + attempt * 2 + which
}

/// Monte Carlo estimate of the energy of the sampled measure: the mean of
/// `-log sigma` over independently drawn pairs. Singular pairs (below the
/// coincidence floor) are rejected and redrawn; the rejection count is
/// reported, and a rejection rate above one half yields positive infinity.
pub fn mc_energy<F: Real>(
    sampler: &MeasureSampler<F>,
    pairs: u64,
    seed: u64,
) -> Result<EnergyEstimate<F>> {
    if pairs < 2 {
        return Err(Error::InvalidArgument("need at least 2 pairs".into()));
    }
    let floor = F::of(SIGMA_FLOOR);
    Ok(mc_mean(pairs, |k, attempt| {
        let eta = sampler.draw(seed, pair_index(k, attempt, 0));
        let zeta = sampler.draw(seed, pair_index(k, attempt, 1));
        let sigma = sine_distance(&eta, &zeta).expect("sampler dimension is fixed");
        if sigma < floor {
            None
        } else {
            Some(-sigma.ln())
        }
    }))
}

/// Cumulative mass of geodesic balls around `center`: entry k is the total
/// weight of atoms within geodesic distance `grid[k]`.
pub fn ball_mass_profile<F: Real>(
    mu: &DiscreteMeasure<F>,
    center: &ProjectivePoint<F>,
    grid: &[F],
) -> Result<Vec<F>> {
    if mu.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    check_grid(grid)?;
    let mut dist_w: Vec<(F, F)> = mu
        .atoms
        .iter()
        .zip(&mu.weights)
        .map(|(a, w)| Ok((geodesic_distance(center, a)?, *w)))
        .collect::<Result<_>>()?;
    dist_w.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut profile = Vec::with_capacity(grid.len());
    let mut acc = F::zero();
    let mut it = dist_w.into_iter().peekable();
    for &r in grid {
        while let Some(&(d, w)) = it.peek() {
            if d <= r {
                acc += w;
                it.next();
            } else {
                break;
            }
        }
        profile.push(acc);
    }
    Ok(profile)
}

fn check_grid<F: Real>(grid: &[F]) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::UnsortedGrid);
    }
    if grid[0] <= F::zero() {
        return Err(Error::UnsortedGrid);
    }
    Ok(())
}

/// Layer-cake evaluation of `-potential`: the trapezoid rule applied to
/// `mu(B(zeta, s)) * cot(s / sqrt 2) / sqrt 2` over the radius grid. Agrees
/// with the direct potential within about one percent on grids that resolve
/// the smallest atom distance.
pub fn potential_from_growth<F: Real>(
    mu: &DiscreteMeasure<F>,
    point: &ProjectivePoint<F>,
    grid: &[F],
) -> Result<F> {
    if mu.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    check_grid(grid)?;
    let tol = F::of(SIGMA_FLOOR);
    for atom in &mu.atoms {
        if sine_distance(point, atom)? < tol {
            return Err(Error::AtomCoincidence);
        }
    }
    let masses = ball_mass_profile(mu, point, grid)?;
    let kernel = |s: F| -> F {
        let x = s / F::SQRT_2();
        (x.cos() / x.sin()) / F::SQRT_2()
    };
    let mut integral = F::zero();
    let half = F::of(0.5);
    for k in 1..grid.len() {
        let f0 = masses[k - 1] * kernel(grid[k - 1]);
        let f1 = masses[k] * kernel(grid[k]);
        integral += half * (f0 + f1) * (grid[k] - grid[k - 1]);
    }
    Ok(integral)
}

/// Options for the ball-growth certificate check.
#[derive(Clone, Debug)]
pub struct GrowthCheckOpts<F: Real> {
    /// Radii probed; default is a geometric grid on [0.02, pi/sqrt 2].
    pub radii: Option<Vec<F>>,
    /// Cap on the number of atom centers probed (deterministic subsample).
    pub max_centers: usize,
}

impl<F: Real> Default for GrowthCheckOpts<F> {
    fn default() -> Self {
        Self {
            radii: None,
            max_centers: 2048,
        }
    }
}

/// Outcome of `finite_energy_certificate`.
#[derive(Clone, Debug)]
pub enum GrowthOutcome<F: Real> {
    /// Growth bound holds on the probe grid; carries the implied uniform
    /// potential bound `C * integral of s^m cot(s/sqrt 2)/sqrt 2`.
    Certified { potential_bound: F },
    /// Violation witnessed at (center index, radius): ball mass exceeded C s^m.
    Violated {
        center: usize,
        radius: F,
        mass: F,
        allowed: F,
    },
}

/// Default radius probe grid: geometric between 0.05 and pi/sqrt 2. The
/// floor keeps single-sample granularity (mass 1/m at the center atom) from
/// dominating the growth test at desk-scale sample counts.
pub fn default_growth_radii<F: Real>(count: usize) -> Vec<F> {
    let lo: f64 = 0.05;
    let hi: f64 = max_geodesic::<f64>();
    let ratio = (hi / lo).powf(1.0 / (count.max(2) - 1) as f64);
    (0..count)
        .map(|k| F::of((lo * ratio.powi(k as i32)).min(hi)))
        .collect()
}

/// Quadrature of `integral_0^{pi/sqrt 2} s^m cot(s/sqrt 2)/sqrt 2 ds`,
/// the kernel weight appearing in the ball-growth potential bound.
pub fn growth_kernel_integral<F: Real>(exponent: F) -> F {
    let m = exponent.as_f64();
    let hi = max_geodesic::<f64>();
    let lo = 1e-8f64;
    // integrand ~ s^{m-1} near zero; integrate the head analytically
    let head = lo.powf(m) / m;
    let steps = 20_000usize;
    let ratio = (hi / lo).powf(1.0 / steps as f64);
    let f = |s: f64| s.powf(m) * ((s / 2f64.sqrt()).cos() / (s / 2f64.sqrt()).sin()) / 2f64.sqrt();
    let mut acc = 0.0;
    let mut s0 = lo;
    let mut f0 = f(s0);
    for _ in 0..steps {
        let s1 = (s0 * ratio).min(hi);
        let f1 = f(s1);
        acc += 0.5 * (f0 + f1) * (s1 - s0);
        s0 = s1;
        f0 = f1;
    }
    F::of(head + acc)
}

/// Check `mu(B(center, s)) <= C s^m` over a grid of centers (the atoms) and
/// radii. On success, return the implied uniform bound on `-potential`; on the
/// first violation, return the witnessing center and radius.
pub fn finite_energy_certificate<F: Real>(
    mu: &DiscreteMeasure<F>,
    exponent: F,
    bound_const: F,
    opts: &GrowthCheckOpts<F>,
) -> Result<GrowthOutcome<F>> {
    if mu.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    if exponent <= F::zero() || bound_const <= F::zero() {
        return Err(Error::InvalidArgument(
            "growth exponent and constant must be positive".into(),
        ));
    }
    let radii = match &opts.radii {
        Some(r) => {
            check_grid(r)?;
            r.clone()
        }
        None => default_growth_radii(48),
    };
    let stride = (mu.len() / opts.max_centers).max(1);
    for (ci, center) in mu.atoms.iter().enumerate().step_by(stride) {
        let profile = ball_mass_profile(mu, center, &radii)?;
        for (r, m) in radii.iter().zip(&profile) {
            let allowed = bound_const * r.powf(exponent);
            if *m > allowed {
                return Ok(GrowthOutcome::Violated {
                    center: ci,
                    radius: *r,
                    mass: *m,
                    allowed,
                });
            }
        }
    }
    Ok(GrowthOutcome::Certified {
        potential_bound: bound_const * growth_kernel_integral(exponent),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ProjectivePoint;

    type P = ProjectivePoint<f64>;
    type M = DiscreteMeasure<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn e0() -> P {
        P::axis(1, 0).unwrap()
    }
    fn e1() -> P {
        P::axis(1, 1).unwrap()
    }
    fn diag() -> P {
        P::normalize(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    /// Three points pairwise at sine distance sqrt(3)/2: an equilateral
    /// triangle on a great circle of the sphere picture of P^1.
    fn equilateral() -> Vec<P> {
        (0..3)
            .map(|k| {
                let theta = std::f64::consts::PI * k as f64 / 3.0;
                P::normalize(vec![c(theta.cos(), 0.0), c(theta.sin(), 0.0)]).unwrap()
            })
            .collect()
    }

    #[test]
    fn equilateral_pairwise_distance() {
        let pts = equilateral();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let s = sine_distance(&pts[i], &pts[j]).unwrap();
                assert!((s - 3f64.sqrt() / 2.0).abs() < 1e-14, "sigma {s}");
            }
        }
    }

    #[test]
    fn construction_merges_duplicates() {
        let m = M::new(vec![e0(), e0(), e1()], vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.is_probability());
        assert!((m.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn construction_drops_zero_weights() {
        let m = M::new(vec![e0(), e1()], vec![0.0, 1.0]).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn potential_examples() {
        let delta = M::dirac(e0());
        assert_eq!(potential(&delta, &e0()).unwrap(), f64::NEG_INFINITY);
        assert_eq!(potential(&delta, &e1()).unwrap(), 0.0);
        let half = M::new(vec![e0(), e1()], vec![0.5, 0.5]).unwrap();
        let v = potential(&half, &diag()).unwrap();
        assert!((v - (-0.5 * 2.0f64.ln())).abs() < 1e-15);
        let empty = M::new(vec![], vec![]).unwrap();
        assert!(matches!(potential(&empty, &e0()), Err(Error::EmptyMeasure)));
    }

    #[test]
    fn mutual_energy_examples() {
        let a = M::dirac(e0());
        let b = M::dirac(e1());
        assert_eq!(mutual_energy(&a, &b).unwrap().value, 0.0);
        assert_eq!(mutual_energy(&a, &a).unwrap().value, f64::INFINITY);
        // bilinearity (supports kept disjoint from the equilateral triple)
        let mu = M::new(equilateral(), vec![0.2, 0.3, 0.5]).unwrap();
        let nu = M::new(sample_fs::<f64>(1, 2, 99), vec![0.4, 0.6]).unwrap();
        let double = mu.scaled(2.0).unwrap();
        let i1 = mutual_energy(&double, &nu).unwrap().value;
        let i2 = mutual_energy(&mu, &nu).unwrap().value;
        assert!((i1 - 2.0 * i2).abs() < 1e-12);
    }

    #[test]
    fn self_energy_is_infinite() {
        let m = M::new(vec![e0(), e1()], vec![0.5, 0.5]).unwrap();
        assert_eq!(energy(&m).unwrap().value, f64::INFINITY);
        assert_eq!(energy(&M::dirac(e0())).unwrap().value, f64::INFINITY);
        let empty = M::new(vec![], vec![]).unwrap();
        assert!(matches!(energy(&empty), Err(Error::EmptyMeasure)));
    }

    #[test]
    fn offdiag_examples() {
        let ortho = M::uniform(&[e0(), e1()]).unwrap();
        assert_eq!(offdiag_energy(&ortho).unwrap(), 0.0);
        let tri = M::uniform(&equilateral()).unwrap();
        let v = offdiag_energy(&tri).unwrap();
        let expect = (2.0 / 3.0) * (-(3f64.sqrt() / 2.0).ln());
        assert!((v - expect).abs() < 1e-14, "{v} vs {expect}");
        assert!(matches!(
            offdiag_energy(&M::dirac(e0())),
            Err(Error::SingleAtom)
        ));
    }

    #[test]
    fn offdiag_permutation_invariant_bitwise() {
        let pts = equilateral();
        let w = vec![0.2, 0.3, 0.5];
        let a = M::new(pts.clone(), w.clone()).unwrap();
        let b = M::new(
            vec![pts[2].clone(), pts[0].clone(), pts[1].clone()],
            vec![w[2], w[0], w[1]],
        )
        .unwrap();
        assert_eq!(
            offdiag_energy(&a).unwrap().to_bits(),
            offdiag_energy(&b).unwrap().to_bits()
        );
    }

    #[test]
    fn polarization_identity_holds() {
        let pts = sample_fs::<f64>(1, 6, 31);
        let mu = M::uniform(&pts[..3]).unwrap();
        let nu = M::uniform(&pts[3..]).unwrap();
        let r = polarization_residual(&mu, &nu).unwrap();
        assert!(r < 1e-12, "residual {r:e}");
        // invariant under mass rescaling
        let r2 = polarization_residual(&mu.scaled(3.0).unwrap(), &nu.scaled(0.5).unwrap()).unwrap();
        assert!(r2 < 1e-11, "scaled residual {r2:e}");
        assert!(matches!(
            polarization_residual(&mu, &mu),
            Err(Error::SharedAtoms)
        ));
    }

    #[test]
    fn fs_sampler_deterministic() {
        let a = sample_fs::<f64>(1, 32, 9);
        let b = sample_fs::<f64>(1, 32, 9);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x, y);
        }
        let c = sample_fs::<f64>(1, 32, 10);
        assert_ne!(a[0], c[0]);
    }

    #[test]
    fn fs_mean_sine_distance() {
        // E[sigma] = 2/3 on P^1
        let pts = sample_fs::<f64>(1, 20_000, 4);
        let fixed = e0();
        let mean: f64 = pts
            .iter()
            .map(|p| sine_distance(p, &fixed).unwrap())
            .sum::<f64>()
            / pts.len() as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn mc_energy_deterministic_and_sane() {
        let sampler = fs_sampler::<f64>(1);
        let a = mc_energy(&sampler, 20_000, 5).unwrap();
        let b = mc_energy(&sampler, 20_000, 5).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert!((a.value - 0.5).abs() < 0.02, "estimate {}", a.value);
        assert!(a.stderr.unwrap() < 0.01);
        assert_eq!(a.rejections, 0);
    }

    #[test]
    fn mc_energy_concentrated_sampler_diverges() {
        let point = e0();
        let sampler = MeasureSampler::new(
            1,
            "dirac",
            Arc::new(move |_, _| point.clone()),
        );
        let est = mc_energy(&sampler, 64, 0).unwrap();
        assert_eq!(est.value, f64::INFINITY);
        assert!(est.rejections > 0);
    }

    #[test]
    fn ball_mass_profile_examples() {
        let delta = M::dirac(e0());
        let grid = vec![0.1, 0.5, max_geodesic::<f64>()];
        let prof = ball_mass_profile(&delta, &e0(), &grid).unwrap();
        assert_eq!(prof, vec![1.0, 1.0, 1.0]);

        let pts = sample_fs::<f64>(1, 100, 17);
        let mu = M::uniform(&pts).unwrap();
        let prof2 = ball_mass_profile(&mu, &e0(), &grid).unwrap();
        assert!((prof2.last().unwrap() - 1.0).abs() < 1e-12);
        assert!(prof2.windows(2).all(|w| w[1] >= w[0]));

        assert!(matches!(
            ball_mass_profile(&mu, &e0(), &[0.5, 0.4]),
            Err(Error::UnsortedGrid)
        ));
    }

    fn dense_grid(lo: f64, n_geo: usize, n_lin: usize) -> Vec<f64> {
        let hi = max_geodesic::<f64>();
        let split = 0.3f64;
        let ratio = (split / lo).powf(1.0 / n_geo as f64);
        let mut g: Vec<f64> = (0..=n_geo).map(|k| lo * ratio.powi(k as i32)).collect();
        let step = (hi - split) / n_lin as f64;
        g.extend((1..=n_lin).map(|k| split + step * k as f64));
        g
    }

    #[test]
    fn growth_route_matches_direct_potential() {
        // single atom at sigma = 1/sqrt 2
        let mu = M::dirac(diag());
        let d0 = geodesic_distance(&e0(), &diag()).unwrap();
        let grid = dense_grid(d0 / 20.0, 400, 4000);
        let v = potential_from_growth(&mu, &e0(), &grid).unwrap();
        let expect = 0.5 * 2.0f64.ln();
        assert!((v - expect).abs() / expect < 0.01, "{v} vs {expect}");

        // atom at maximal distance: kernel zero
        let mu2 = M::dirac(e1());
        let grid2 = dense_grid(1e-3, 200, 4000);
        let v2 = potential_from_growth(&mu2, &e0(), &grid2).unwrap();
        assert!(v2.abs() < 1e-6, "{v2}");

        // 50-atom random measure against direct summation
        let atoms = sample_fs::<f64>(1, 50, 41);
        let mu3 = M::uniform(&atoms).unwrap();
        for t in 0..5 {
            let probe = fs_point::<f64>(1, 999, t);
            let min_d = atoms
                .iter()
                .map(|a| geodesic_distance(&probe, a).unwrap())
                .fold(f64::INFINITY, f64::min);
            let grid3 = dense_grid(min_d / 10.0, 600, 6000);
            let via_growth = potential_from_growth(&mu3, &probe, &grid3).unwrap();
            let direct = -potential(&mu3, &probe).unwrap();
            assert!(
                (via_growth - direct).abs() / direct.abs() < 0.01,
                "growth {via_growth} direct {direct}"
            );
        }
    }

    #[test]
    fn growth_route_rejects_atoms() {
        let mu = M::dirac(e0());
        let grid = dense_grid(1e-4, 100, 100);
        assert!(matches!(
            potential_from_growth(&mu, &e0(), &grid),
            Err(Error::AtomCoincidence)
        ));
    }

    #[test]
    fn certificate_success_and_failure() {
        let pts = sample_fs::<f64>(1, 2000, 3);
        let mu = M::uniform(&pts).unwrap();
        let opts = GrowthCheckOpts::default();
        match finite_energy_certificate(&mu, 2.0, 3.0, &opts).unwrap() {
            GrowthOutcome::Certified { potential_bound } => {
                let expect = 3.0 * growth_kernel_integral::<f64>(2.0);
                assert!((potential_bound - expect).abs() < 1e-12);
                assert!(potential_bound > 0.0);
            }
            GrowthOutcome::Violated { radius, .. } => panic!("unexpected violation at {radius}"),
        }
        // an atom always violates the growth bound at small radii
        match finite_energy_certificate(&M::dirac(e0()), 2.0, 3.0, &opts).unwrap() {
            GrowthOutcome::Violated { radius, .. } => assert!(radius < 0.6),
            GrowthOutcome::Certified { .. } => panic!("dirac must violate"),
        }
    }

    #[test]
    fn certificate_bound_monotone_in_constant() {
        let q = growth_kernel_integral::<f64>(2.0);
        assert!(2.0 * q < 3.0 * q);
        // FS ball mass on P^1 is sin^2(s/sqrt2) <= s^2/2, so the integral is finite
        assert!(q.is_finite() && q > 0.0);
    }

    #[test]
    fn lower_semicontinuity_spot_check() {
        // off-diagonal energy of FS sample clouds stays below the continuous
        // energy plus noise and approaches 1/2 on P^1
        let target = 0.5;
        let mut last = f64::NAN;
        for &n in &[100usize, 1000, 10_000] {
            let mu = M::uniform(&sample_fs::<f64>(1, n, 7)).unwrap();
            let v = offdiag_energy(&mu).unwrap();
            let slack = 3.0 * (0.5 / (n as f64).sqrt()) + 0.02;
            assert!(v <= target + slack, "n {n}: {v}");
            last = v;
        }
        assert!((last - target).abs() < 0.02, "limit {last}");
    }

    #[test]
    fn continuity_principle_spot_check() {
        // measure supported on the great circle; approach a circle point from
        // off the circle and compare against the on-circle limit
        let m = 400usize;
        let circle_pts: Vec<P> = (0..m)
            .map(|k| {
                let t = std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                P::normalize(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)]).unwrap()
            })
            .collect();
        let mu = M::uniform(&circle_pts).unwrap();
        let theta0 = std::f64::consts::PI / 4.0 + 1e-4;
        let zeta0 = P::normalize(vec![c(theta0.cos(), 0.0), c(theta0.sin(), 0.0)]).unwrap();
        let base = potential(&mu, &zeta0).unwrap();

        // modulus of continuity along the circle near zeta0
        let h = 1e-3;
        let on_circle = |t: f64| P::normalize(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)]).unwrap();
        let modulus = (potential(&mu, &on_circle(theta0 + h)).unwrap() - base)
            .abs()
            .max((potential(&mu, &on_circle(theta0 - h)).unwrap() - base).abs());

        let mut prev_gap = f64::INFINITY;
        for k in 1..=4 {
            let eps = 1e-1 / 4f64.powi(k);
            // rotate off the real circle by a complex phase
            let zeta = P::normalize(vec![
                c(theta0.cos(), 0.0),
                c(theta0.sin() * (1.0 - eps * eps).sqrt(), theta0.sin() * eps),
            ])
            .unwrap();
            let gap = (potential(&mu, &zeta).unwrap() - base).abs();
            assert!(gap <= prev_gap + 1e-9);
            prev_gap = gap;
        }
        assert!(
            prev_gap <= 10.0 * modulus + 1e-6,
            "gap {prev_gap} vs modulus {modulus}"
        );
    }
}
