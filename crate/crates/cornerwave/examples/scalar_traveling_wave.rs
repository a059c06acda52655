//! Convergence study for the scalar wave on the corner domain.
//!
//! A left-going plane wave `u = sin(k(t + x¹) + φ)` enters through the wall
//! and leaves through the radiating left edge, so it has a closed-form
//! solution to measure errors against. We run it under both wall closures at
//! three resolutions and print the observed L² convergence orders — the
//! second-order stencils should land near 2.
//!
//! ```bash
//! cargo run --release --example scalar_traveling_wave
//! ```

use cornerwave::harness::{sweep, BcConfig, DataConfig, GridConfig, ScenarioConfig, SystemKind};

fn config(bc_kind: &str) -> ScenarioConfig {
    ScenarioConfig {
        schema: cornerwave::harness::SCHEMA.into(),
        system: SystemKind::Scalar,
        grid: GridConfig { n1: 32, n_a: 8, dx: 1.0 / 16.0 },
        horizon: 0.75,
        cfl: 0.4,
        bc: BcConfig { kind: Some(bc_kind.into()), alpha: None, beta: None },
        data: DataConfig {
            family: "traveling_wave".into(),
            params: [("amp".to_string(), 1.0), ("k".to_string(), 2.0)].into(),
            seed: None,
        },
        output: None,
        sobolev_order: 1,
    }
}

fn main() {
    for bc in ["sommerfeld", "dirichlet"] {
        let t0 = std::time::Instant::now();
        let art = sweep(&config(bc), &[32, 64, 128]).expect("sweep");
        let table = art.report.convergence.as_ref().expect("convergence table");
        println!("--- {bc} wall ({:.2}s) ---", t0.elapsed().as_secs_f64());
        print!("{}", table.to_csv());

        let col = table.columns.iter().position(|c| c == "l2_error").expect("error column");
        for row in &table.orders {
            let p: f64 = row[col].parse().expect("numeric order");
            assert!(
                (1.9..=2.5).contains(&p),
                "{bc}: observed order {p} strayed from second order"
            );
        }
        println!("observed orders within [1.9, 2.5]\n");
    }
}
