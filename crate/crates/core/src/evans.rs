//! Evans-measure construction: given a finite snapshot of a small (capacity
//! zero) closed set, build a probability measure whose potential is minus
//! infinity exactly on the set, with numeric certificates.
//!
//! The construction stacks levels h = 1..H. Level h is a uniform measure on
//! s_h points chosen from the set so that the potential on the whole set is
//! at most -2^h; on a finite snapshot the max-min search reaches this through
//! coincidence atoms (the potential at a covered point is -inf), so the
//! certificate tracks the finite bound at non-atom set points separately.
//! The assembled measure is `sum_h 2^{-h} (level h)`, renormalized to unit
//! mass at truncation H. Off the set the potential stays finite: the kernel
//! sandwich `log(2 d / (pi sqrt 2)) <= log sigma <= log(d / sqrt 2)` gives a
//! lower bound `log d(., E) + C`, and the certificate reports the empirical
//! margin over a test grid.

use crate::error::{Error, Result};
use crate::geometry::{geodesic_distance, log_kernel, sine_distance, ProjectivePoint, SIGMA_FLOOR};
use crate::measures::{fs_point, potential, DiscreteMeasure};
use crate::scalar::Real;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct EvansOpts {
    /// Largest per-level configuration size searched.
    pub s_max: usize,
    pub seed: u64,
}

impl Default for EvansOpts {
    fn default() -> Self {
        Self { s_max: 64, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelRecord {
    pub level: u32,
    pub points: usize,
    /// Achieved on-set potential bound for this level: -(inner inf). Negative
    /// infinity when every set point coincides with a level atom.
    pub bound: f64,
}

/// Numeric certificate for a constructed or supplied Evans measure.
#[derive(Clone, Debug)]
pub struct EvansCertificate<F: Real> {
    pub levels: Vec<LevelRecord>,
    pub truncation: u32,
    /// Mass of the raw level stack before renormalization: 1 - 2^{-H}.
    pub raw_mass: F,
    /// Max of the renormalized potential over set points that are not atoms
    /// of the measure; `None` when every set point is an atom.
    pub on_set_max: Option<F>,
    /// Same bound for the raw (unrenormalized) stack.
    pub on_set_max_raw: Option<F>,
    /// How many set points are atoms of the measure.
    pub atom_count: usize,
    pub set_size: usize,
    /// Min over the test grid of `potential - log d(., E)`; finite by the
    /// kernel sandwich.
    pub off_set_margin: F,
    pub grid_size: usize,
}

/// Exact max-min over a finite snapshot: choose `s` points from E (repetition
/// allowed) maximizing the inf over E of the averaged kernel sum. Returns the
/// chosen indices and the achieved inf (level value), which is positive
/// infinity exactly when the configuration covers all of E.
pub fn chebyshev_configuration<F: Real>(
    points: &[ProjectivePoint<F>],
    s: usize,
) -> Result<(Vec<usize>, F)> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    if s < 1 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let e = points.len();
    // pairwise kernel table; +inf on the diagonal
    let mut k = vec![F::zero(); e * e];
    for i in 0..e {
        for j in 0..e {
            k[i * e + j] = if i == j {
                F::infinity()
            } else {
                -log_kernel(&points[i], &points[j])?
            };
        }
    }
    // per set point: finite part and infinity count of the config kernel sum
    let mut fin = vec![F::zero(); e];
    let mut inf = vec![0u32; e];
    let value = |fin: &[F], inf: &[u32]| -> (usize, F) {
        let mut best = F::infinity();
        let mut arg = 0usize;
        for i in 0..e {
            let v = if inf[i] > 0 { F::infinity() } else { fin[i] };
            if v < best {
                best = v;
                arg = i;
            }
        }
        (arg, best)
    };
    // with repetition allowed and s >= |E|, the covering configuration is
    // optimal outright: every set point coincides with an atom
    if s >= e {
        let cfg = (0..s).map(|i| i % e).collect();
        return Ok((cfg, F::infinity()));
    }
    let mut cfg: Vec<usize> = Vec::with_capacity(s);
    // greedy: each step adds the point that maximizes the resulting inf
    for _ in 0..s {
        let mut best_idx = 0usize;
        let mut best_inf = F::neg_infinity();
        for cand in 0..e {
            let mut worst = F::infinity();
            for i in 0..e {
                let extra = k[i * e + cand];
                let v = if inf[i] > 0 || extra == F::infinity() {
                    F::infinity()
                } else {
                    fin[i] + extra
                };
                if v < worst {
                    worst = v;
                }
            }
            if worst > best_inf {
                best_inf = worst;
                best_idx = cand;
            }
        }
        cfg.push(best_idx);
        for i in 0..e {
            let extra = k[i * e + best_idx];
            if extra == F::infinity() {
                inf[i] += 1;
            } else {
                fin[i] += extra;
            }
        }
    }
    // exchange improvement until a full sweep makes no progress
    loop {
        let mut improved = false;
        for slot in 0..s {
            let old = cfg[slot];
            // remove the occupant
            for i in 0..e {
                let term = k[i * e + old];
                if term == F::infinity() {
                    inf[i] -= 1;
                } else {
                    fin[i] -= term;
                }
            }
            let mut best_idx = old;
            let mut best_inf = F::neg_infinity();
            for cand in 0..e {
                let mut worst = F::infinity();
                for i in 0..e {
                    let extra = k[i * e + cand];
                    let v = if inf[i] > 0 || extra == F::infinity() {
                        F::infinity()
                    } else {
                        fin[i] + extra
                    };
                    if v < worst {
                        worst = v;
                    }
                }
                if worst > best_inf {
                    best_inf = worst;
                    best_idx = cand;
                }
            }
            if best_idx != old {
                improved = true;
            }
            cfg[slot] = best_idx;
            for i in 0..e {
                let term = k[i * e + best_idx];
                if term == F::infinity() {
                    inf[i] += 1;
                } else {
                    fin[i] += term;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let (_, total) = value(&fin, &inf);
    let level_value = if total == F::infinity() {
        F::infinity()
    } else {
        total / F::of(s as f64)
    };
    Ok((cfg, level_value))
}

/// Geodesic distance from a point to the finite snapshot.
pub fn distance_to_set<F: Real>(
    point: &ProjectivePoint<F>,
    set_points: &[ProjectivePoint<F>],
) -> Result<F> {
    if set_points.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best = F::infinity();
    for p in set_points {
        best = best.min(geodesic_distance(point, p)?);
    }
    Ok(best)
}

fn on_set_bounds<F: Real>(
    measure: &DiscreteMeasure<F>,
    set_points: &[ProjectivePoint<F>],
    raw_mass: F,
) -> Result<(Option<F>, Option<F>, usize)> {
    let floor = F::of(SIGMA_FLOOR);
    let mut max_pot: Option<F> = None;
    let mut atoms = 0usize;
    for p in set_points {
        let coincides = measure
            .atoms()
            .iter()
            .map(|a| sine_distance(p, a))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .any(|d| d < floor);
        if coincides {
            atoms += 1;
            continue;
        }
        let v = potential(measure, p)?;
        max_pot = Some(max_pot.map_or(v, |m: F| m.max(v)));
    }
    let raw = max_pot.map(|v| v * raw_mass);
    Ok((max_pot, raw, atoms))
}

fn off_set_margin<F: Real>(
    measure: &DiscreteMeasure<F>,
    set_points: &[ProjectivePoint<F>],
    grid: &[ProjectivePoint<F>],
) -> Result<F> {
    let mut margin = F::infinity();
    for g in grid {
        let d = distance_to_set(g, set_points)?;
        margin = margin.min(potential(measure, g)? - d.ln());
    }
    Ok(margin)
}

fn default_grid<F: Real>(
    n: usize,
    set_points: &[ProjectivePoint<F>],
    size: usize,
    min_dist: F,
    seed: u64,
) -> Result<Vec<ProjectivePoint<F>>> {
    let mut grid = Vec::with_capacity(size);
    let mut idx = 0u64;
    while grid.len() < size && idx < 200_000 {
        let p = fs_point::<F>(n, seed, idx);
        idx += 1;
        if distance_to_set(&p, set_points)? >= min_dist {
            grid.push(p);
        }
    }
    if grid.len() < size {
        return Err(Error::SamplerExhausted(
            "could not place test grid away from the set".into(),
        ));
    }
    Ok(grid)
}

/// Build the truncated Evans measure for a finite snapshot: for each level
/// h = 1..H search configuration sizes (doubling, up to `s_max`) until the
/// on-set potential bound -2^h is certified, then stack the levels with
/// weights 2^{-h} and renormalize.
pub fn evans_construct<F: Real>(
    set_points: &[ProjectivePoint<F>],
    truncation: u32,
    opts: &EvansOpts,
) -> Result<(DiscreteMeasure<F>, EvansCertificate<F>)> {
    if set_points.is_empty() {
        return Err(Error::EmptySet);
    }
    if truncation == 0 || truncation > 30 {
        return Err(Error::InvalidArgument(
            "truncation depth must lie in 1..=30".into(),
        ));
    }
    let n = set_points[0].dim();
    let mut levels = Vec::with_capacity(truncation as usize);
    let mut level_configs: Vec<Vec<usize>> = Vec::with_capacity(truncation as usize);
    for h in 1..=truncation {
        let target = F::of(2f64.powi(h as i32));
        let mut found: Option<(Vec<usize>, F)> = None;
        let mut best = F::neg_infinity();
        let mut s = 1usize;
        loop {
            let (cfg, value) = chebyshev_configuration(set_points, s)?;
            if value.is_finite() {
                best = best.max(value);
            } else {
                best = F::infinity();
            }
            if value >= target {
                found = Some((cfg, value));
                break;
            }
            if s >= opts.s_max {
                break;
            }
            s = (s * 2).min(opts.s_max);
        }
        let (cfg, value) = found.ok_or(Error::LevelUnreachable {
            level: h,
            best: best.as_f64(),
        })?;
        levels.push(LevelRecord {
            level: h,
            points: cfg.len(),
            bound: (-value).as_f64(),
        });
        level_configs.push(cfg);
    }

    // stack the levels: weight 2^{-h} spread uniformly over the level points
    let mut atoms: Vec<ProjectivePoint<F>> = Vec::new();
    let mut weights: Vec<F> = Vec::new();
    for (record, cfg) in levels.iter().zip(&level_configs) {
        let w = F::of(2f64.powi(-(record.level as i32))) / F::of(cfg.len() as f64);
        for &idx in cfg {
            atoms.push(set_points[idx].clone());
            weights.push(w);
        }
    }
    let raw = DiscreteMeasure::new(atoms, weights)?;
    let raw_mass = raw.total_mass();
    let expected_mass = F::one() - F::of(2f64.powi(-(truncation as i32)));
    debug_assert!((raw_mass - expected_mass).abs() < F::of(1e-12));
    let measure = raw.scaled(F::one() / raw_mass)?;

    let (on_set_max, on_set_max_raw, atom_count) = on_set_bounds(&measure, set_points, raw_mass)?;
    let grid = default_grid(n, set_points, 500, F::of(1e-2), opts.seed ^ 0xe7a)?;
    let margin = off_set_margin(&measure, set_points, &grid)?;

    Ok((
        measure,
        EvansCertificate {
            levels,
            truncation,
            raw_mass,
            on_set_max,
            on_set_max_raw,
            atom_count,
            set_size: set_points.len(),
            off_set_margin: margin,
            grid_size: grid.len(),
        },
    ))
}

/// Re-verify an Evans measure on a caller-supplied grid. Every grid point must
/// be at geodesic distance at least `min_dist` from the set.
pub fn evans_verify<F: Real>(
    measure: &DiscreteMeasure<F>,
    set_points: &[ProjectivePoint<F>],
    grid: &[ProjectivePoint<F>],
    min_dist: F,
) -> Result<EvansCertificate<F>> {
    if set_points.is_empty() {
        return Err(Error::EmptySet);
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty verification grid".into()));
    }
    for g in grid {
        if distance_to_set(g, set_points)? < min_dist {
            return Err(Error::GridTooClose(min_dist.as_f64()));
        }
    }
    let mass = measure.total_mass();
    let (on_set_max, on_set_max_raw, atom_count) = on_set_bounds(measure, set_points, mass)?;
    let margin = off_set_margin(measure, set_points, grid)?;
    Ok(EvansCertificate {
        levels: Vec::new(),
        truncation: 0,
        raw_mass: mass,
        on_set_max,
        on_set_max_raw,
        atom_count,
        set_size: set_points.len(),
        off_set_margin: margin,
        grid_size: grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::sample_fs;
    use crate::sets::SetSpec;

    type P = ProjectivePoint<f64>;

    #[test]
    fn singleton_configuration_is_infinite() {
        let a = P::axis(1, 0).unwrap();
        let (cfg, value) = chebyshev_configuration(&[a], 1).unwrap();
        assert_eq!(cfg, vec![0]);
        assert_eq!(value, f64::INFINITY);
    }

    #[test]
    fn two_point_cover_is_infinite() {
        let a = P::axis(1, 0).unwrap();
        let b = P::axis(1, 1).unwrap();
        let (cfg, value) = chebyshev_configuration(&[a, b], 2).unwrap();
        assert_eq!(value, f64::INFINITY);
        let mut sorted = cfg.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1]);
    }

    #[test]
    fn partial_cover_is_finite() {
        let spec = SetSpec::<f64>::seq_limit_snapshot(20).unwrap();
        let pts = spec.finite_points().unwrap().to_vec();
        let (_, value) = chebyshev_configuration(&pts, 8).unwrap();
        assert!(value.is_finite());
        assert!(value > 0.0);
    }

    #[test]
    fn singleton_evans_measure_is_dirac() {
        let a = P::axis(1, 0).unwrap();
        let (mu, cert) = evans_construct(&[a.clone()], 6, &EvansOpts::default()).unwrap();
        assert_eq!(mu.len(), 1);
        assert!(mu.is_probability());
        assert_eq!(potential(&mu, &a).unwrap(), f64::NEG_INFINITY);
        assert_eq!(cert.atom_count, 1);
        assert!(cert.on_set_max.is_none());
        // sandwich: potential - log d >= log(2/(pi sqrt 2)) off the set
        let floor = (2.0 / (std::f64::consts::PI * 2f64.sqrt())).ln();
        assert!(cert.off_set_margin.is_finite());
        assert!(cert.off_set_margin >= floor - 1e-9, "{}", cert.off_set_margin);
    }

    #[test]
    fn seq_limit_construction() {
        let spec = SetSpec::<f64>::seq_limit_snapshot(20).unwrap();
        let pts = spec.finite_points().unwrap().to_vec();
        let (mu, cert) = evans_construct(&pts, 4, &EvansOpts::default()).unwrap();
        assert!(mu.is_probability());
        assert!((cert.raw_mass - (1.0 - 2f64.powi(-4))).abs() < 1e-12);
        assert_eq!(cert.levels.len(), 4);
        for (h, rec) in cert.levels.iter().enumerate() {
            assert_eq!(rec.level as usize, h + 1);
            assert!(rec.bound <= -(2f64.powi(rec.level as i32)));
        }
        assert!(cert.off_set_margin.is_finite());
        // every set point should be covered somewhere in the stack or have a
        // strongly negative potential
        if let Some(bound) = cert.on_set_max {
            assert!(bound <= -(4.0 * 2f64.ln()));
        }
    }

    #[test]
    fn verify_rejects_close_grid() {
        let a = P::axis(1, 0).unwrap();
        let mu = DiscreteMeasure::dirac(a.clone());
        let near = ProjectivePoint::normalize(vec![
            num_complex::Complex::new(1.0, 0.0),
            num_complex::Complex::new(1e-7, 0.0),
        ])
        .unwrap();
        let err = evans_verify(&mu, &[a], &[near], 1e-3);
        assert!(matches!(err, Err(Error::GridTooClose(_))));
    }

    #[test]
    fn verify_margin_on_random_grid() {
        let a = P::axis(1, 0).unwrap();
        let mu = DiscreteMeasure::dirac(a.clone());
        let grid: Vec<P> = sample_fs::<f64>(1, 400, 77)
            .into_iter()
            .filter(|p| geodesic_distance(p, &a).unwrap() >= 0.1)
            .collect();
        let cert = evans_verify(&mu, &[a], &grid, 1e-3).unwrap();
        let floor = (2.0 / (std::f64::consts::PI * 2f64.sqrt())).ln();
        assert!(cert.off_set_margin >= floor - 1e-12);
        assert!(cert.off_set_margin.is_finite());
    }

    #[test]
    fn margin_stays_bounded_as_grid_approaches() {
        // the lower bound log d + C means the margin cannot run away as the
        // grid closes in on the set
        let a = P::axis(1, 0).unwrap();
        let mu = DiscreteMeasure::dirac(a.clone());
        let floor = (2.0 / (std::f64::consts::PI * 2f64.sqrt())).ln();
        for delta in [1e-1, 1e-2, 1e-3] {
            let t: f64 = delta / 2f64.sqrt();
            let p = ProjectivePoint::normalize(vec![
                num_complex::Complex::new(t.cos(), 0.0),
                num_complex::Complex::new(t.sin(), 0.0),
            ])
            .unwrap();
            let cert = evans_verify(&mu, &[a.clone()], &[p], delta / 2.0).unwrap();
            assert!(cert.off_set_margin >= floor - 1e-9);
        }
    }
}
