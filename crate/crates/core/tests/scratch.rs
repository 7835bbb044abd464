use projcap_core::fekete::{transfinite_table, FeketeOpts};
use projcap_core::sets::SetSpec;
use std::time::Instant;

#[test]
fn scratch_probe() {
    let set = SetSpec::<f64>::full_space(1);
    let opts = FeketeOpts {
        restarts: 6,
        pool: 1200,
        sweeps_max: 120,
        tol: 1e-10,
        seed: 5,
        refine: true,
    };
    let sizes: Vec<usize> = (2..=50).collect();
    let t0 = Instant::now();
    let table = transfinite_table(&set, &sizes, &opts, Some(0.6073)).unwrap();
    println!("table in {:?}", t0.elapsed());
    for r in &table.rows {
        if r.size <= 6 || r.size % 10 == 0 {
            println!("s={} theta={:.6} D={:.6}", r.size, r.mean_energy, r.diameter);
        }
    }
    println!("violations: {:?}", table.violations);
    println!("limit {:.5}", table.limit);
    let d50 = table.rows.last().unwrap().diameter;
    println!("D50 {:.5}, gap to 0.6073: {:.5} (allowed {:.5})", d50, (d50 - 0.6073f64).abs(), 0.05 * 0.6073);
    // strict monotone check at 1e-6 slack
    let mut ok = true;
    for w in table.rows.windows(2) {
        if w[1].diameter > w[0].diameter + 1e-6 { ok = false; }
    }
    println!("monotone(1e-6): {ok}");
}
