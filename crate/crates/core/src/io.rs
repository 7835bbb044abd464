//! File formats and report serialization.
//!
//! Point sets are JSON arrays of `{"re": [...], "im": [...]}` objects with
//! n+1 entries each; the reader normalizes on load. Measures are JSON
//! `{"n", "atoms", "weights"}` where each atom is a `[[re...], [im...]]`
//! pair. Energies are `{"value": float|"inf", "stderr": float|null,
//! "samples": int}`. CSV column orders are frozen.

use crate::capacity::{CapacityReport, EquilibriumResult};
use crate::chebyshev::ThetaChebyshevReport;
use crate::error::{Error, Result};
use crate::evans::EvansCertificate;
use crate::fekete::DiameterTable;
use crate::geometry::ProjectivePoint;
use crate::measures::{DiscreteMeasure, EnergyEstimate};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fs;
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct PointDto {
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureDto {
    n: usize,
    atoms: Vec<(Vec<f64>, Vec<f64>)>,
    weights: Vec<f64>,
}

/// Infinity-aware float encoding: JSON numbers for finite values, the strings
/// "inf" / "-inf" otherwise.
pub fn json_real(x: f64) -> Value {
    if x == f64::INFINITY {
        json!("inf")
    } else if x == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        json!(x)
    }
}

pub fn real_from_json(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Format("number out of f64 range".into())),
        Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        Value::String(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        other => Err(Error::Format(format!("expected number, got {other}"))),
    }
}

pub fn write_points<F: Real>(path: &Path, points: &[ProjectivePoint<F>]) -> Result<()> {
    let dtos: Vec<PointDto> = points
        .iter()
        .map(|p| PointDto {
            re: p.coords().iter().map(|c| c.re.as_f64()).collect(),
            im: p.coords().iter().map(|c| c.im.as_f64()).collect(),
        })
        .collect();
    fs::write(path, serde_json::to_string_pretty(&dtos)? + "\n")?;
    Ok(())
}

pub fn read_points<F: Real>(path: &Path) -> Result<Vec<ProjectivePoint<F>>> {
    let text = fs::read_to_string(path)?;
    let dtos: Vec<PointDto> = serde_json::from_str(&text)?;
    dtos.iter()
        .map(|d| ProjectivePoint::from_parts(&d.re, &d.im))
        .collect()
}

pub fn write_measure<F: Real>(path: &Path, measure: &DiscreteMeasure<F>) -> Result<()> {
    let n = measure.dim().ok_or(Error::EmptyMeasure)?;
    let dto = MeasureDto {
        n,
        atoms: measure
            .atoms()
            .iter()
            .map(|p| {
                (
                    p.coords().iter().map(|c| c.re.as_f64()).collect(),
                    p.coords().iter().map(|c| c.im.as_f64()).collect(),
                )
            })
            .collect(),
        weights: measure.weights().iter().map(|w| w.as_f64()).collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&dto)? + "\n")?;
    Ok(())
}

pub fn read_measure<F: Real>(path: &Path) -> Result<DiscreteMeasure<F>> {
    let text = fs::read_to_string(path)?;
    let dto: MeasureDto = serde_json::from_str(&text)?;
    let atoms: Vec<ProjectivePoint<F>> = dto
        .atoms
        .iter()
        .map(|(re, im)| {
            if re.len() != dto.n + 1 {
                return Err(Error::Format(format!(
                    "atom has {} coordinates, expected {}",
                    re.len(),
                    dto.n + 1
                )));
            }
            ProjectivePoint::from_parts(re, im)
        })
        .collect::<Result<_>>()?;
    let weights = dto.weights.iter().map(|&w| F::of(w)).collect();
    DiscreteMeasure::new(atoms, weights)
}

pub fn energy_json<F: Real>(est: &EnergyEstimate<F>) -> Value {
    json!({
        "value": json_real(est.value.as_f64()),
        "stderr": est.stderr.map(|s| s.as_f64()),
        "samples": est.samples_used,
        "rejections": est.rejections,
    })
}

/// Capacity report JSON with the frozen key names.
pub fn capacity_json<F: Real>(report: &CapacityReport<F>) -> Value {
    json!({
        "gamma_hat": json_real(report.robin.as_f64()),
        "kappa_hat": json_real(report.capacity.as_f64()),
        "fw_gap": report.fw_gap.as_f64(),
        "m": report.m,
        "diag_rule": report.diag_rule,
        "cross_gap": report.cross_gap.map(|g| g.as_f64()),
        "gamma_hat_2m": json_real(report.robin_refined.as_f64()),
        "diameter_estimate": report.diameter_estimate.map(|d| d.as_f64()),
        "polar_suspect": report.polar_suspect,
        "converged": report.converged,
    })
}

pub fn equilibrium_json<F: Real>(eq: &EquilibriumResult<F>) -> Value {
    json!({
        "gamma_hat": json_real(eq.robin.as_f64()),
        "kappa_hat": json_real(eq.capacity.as_f64()),
        "fw_gap": eq.fw_gap.as_f64(),
        "m": eq.m,
        "diag_rule": eq.diag_rule,
        "iters": eq.iters,
        "converged": eq.converged,
    })
}

/// Frozen column order: s, theta_s, D_s, restarts, sweeps, wall_ms.
pub fn diameter_csv<F: Real>(table: &DiameterTable<F>) -> String {
    let mut out = String::from("s,theta_s,D_s,restarts,sweeps,wall_ms\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{:.12e},{:.12e},{},{},{}\n",
            row.size,
            row.mean_energy.as_f64(),
            row.diameter.as_f64(),
            row.restarts,
            row.sweeps,
            row.wall_ms
        ));
    }
    out
}

pub fn diameter_json<F: Real>(table: &DiameterTable<F>) -> Value {
    json!({
        "rows": table.rows.iter().map(|r| json!({
            "s": r.size,
            "theta_s": json_real(r.mean_energy.as_f64()),
            "D_s": r.diameter.as_f64(),
        })).collect::<Vec<_>>(),
        "limit": table.limit.as_f64(),
        "violations": table.violations.iter()
            .map(|(s, e)| json!([s, e.as_f64()])).collect::<Vec<_>>(),
        "capacity_gap": table.capacity_gap.map(|g| g.as_f64()),
    })
}

/// Frozen column order: s, M_s, theta_s, gap, pools, wall_ms.
pub fn chebyshev_csv<F: Real>(rows: &[(ThetaChebyshevReport<F>, u64)]) -> String {
    let mut out = String::from("s,M_s,theta_s,gap,pools,wall_ms\n");
    for (r, wall) in rows {
        out.push_str(&format!(
            "{},{},{:.12e},{},{},{}\n",
            r.order,
            fmt_energy(r.chebyshev.as_f64()),
            r.mean_energy.as_f64(),
            fmt_energy(r.gap.as_f64()),
            "outer+inner",
            wall
        ));
    }
    out
}

fn fmt_energy(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Evans certificate JSON: levels as {"h", "s_h", "bound"}, plus the off-set
/// margin and the truncation depth.
pub fn evans_certificate_json<F: Real>(cert: &EvansCertificate<F>) -> Value {
    json!({
        "levels": cert.levels.iter().map(|l| json!({
            "h": l.level,
            "s_h": l.points,
            "bound": json_real(l.bound),
        })).collect::<Vec<_>>(),
        "off_set_margin": json_real(cert.off_set_margin.as_f64()),
        "H": cert.truncation,
        "raw_mass": cert.raw_mass.as_f64(),
        "on_set_max": cert.on_set_max.map(|v| json_real(v.as_f64())),
        "on_set_max_raw": cert.on_set_max_raw.map(|v| json_real(v.as_f64())),
        "atom_count": cert.atom_count,
        "set_size": cert.set_size,
        "grid_size": cert.grid_size,
    })
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::sample_fs;
    use tempdir::tempdir_path;

    mod tempdir {
        use std::path::PathBuf;
        use std::sync::atomic::{AtomicU64, Ordering};

        static COUNTER: AtomicU64 = AtomicU64::new(0);

        pub fn tempdir_path(tag: &str) -> PathBuf {
            let dir = std::env::temp_dir().join(format!(
                "projcap-io-{tag}-{}-{}",
                std::process::id(),
                COUNTER.fetch_add(1, Ordering::SeqCst)
            ));
            std::fs::create_dir_all(&dir).unwrap();
            dir
        }
    }

    #[test]
    fn points_round_trip() {
        let dir = tempdir_path("pts");
        let path = dir.join("pts.json");
        let pts = sample_fs::<f64>(2, 5, 3);
        write_points(&path, &pts).unwrap();
        let back = read_points::<f64>(&path).unwrap();
        assert_eq!(pts.len(), back.len());
        for (a, b) in pts.iter().zip(&back) {
            let d = crate::geometry::sine_distance(a, b).unwrap();
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn measure_round_trip() {
        let dir = tempdir_path("measure");
        let path = dir.join("m.json");
        let pts = sample_fs::<f64>(1, 4, 8);
        let m = DiscreteMeasure::new(pts, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        write_measure(&path, &m).unwrap();
        let back = read_measure::<f64>(&path).unwrap();
        assert_eq!(back.len(), 4);
        assert!((back.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infinity_encoding() {
        assert_eq!(json_real(f64::INFINITY), json!("inf"));
        assert_eq!(json_real(f64::NEG_INFINITY), json!("-inf"));
        assert_eq!(real_from_json(&json!("inf")).unwrap(), f64::INFINITY);
        assert_eq!(real_from_json(&json!(1.5)).unwrap(), 1.5);
        assert!(real_from_json(&json!(null)).is_err());
    }

    #[test]
    fn csv_headers_frozen() {
        let table = DiameterTable::<f64> {
            rows: vec![],
            configs: vec![],
            limit: 1.0,
            violations: vec![],
            capacity_gap: None,
        };
        assert!(diameter_csv(&table).starts_with("s,theta_s,D_s,restarts,sweeps,wall_ms\n"));
        let rows: Vec<(ThetaChebyshevReport<f64>, u64)> = vec![];
        assert!(chebyshev_csv(&rows).starts_with("s,M_s,theta_s,gap,pools,wall_ms\n"));
    }
}
