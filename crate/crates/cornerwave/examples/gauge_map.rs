//! The boundary gauge-map system, driven through the JSON config front end.
//!
//! Four scalar components evolve under wave equations with Dirichlet wall
//! data; their ledger is kept componentwise and without any normal-row
//! bookkeeping (the rates are data on the wall, so the flux is the only
//! boundary term). This example goes through the same path the CLI uses:
//! a JSON config in, a report plus CSV ledgers out.
//!
//! ```bash
//! cargo run --release --example gauge_map
//! ```

use cornerwave::harness::{run, RunStatus, ScenarioConfig};

const CONFIG: &str = r#"{
    "schema": "cornerwave/1",
    "system": "gaugemap",
    "grid": {"n1": 32, "n_a": 8, "dx": 0.0625},
    "horizon": 0.75,
    "cfl": 0.4,
    "data": {"family": "gauge_map_mixed", "params": {"amp": 1.0, "k": 2.0}},
    "output": "gauge_map_demo"
}"#;

fn main() {
    let cfg = ScenarioConfig::from_json(CONFIG).expect("config");
    let art = run(&cfg).expect("run");
    let rep = &art.report;
    assert_eq!(rep.status, RunStatus::Ok, "checks: {:#?}", rep.checks);

    let tensor = rep.tensor.as_ref().expect("tensor block");
    println!("component | worst ratio | identity residual | final solution error");
    for c in 0..4 {
        println!(
            "    f{c}    |   {:>7.4}   |     {:>9.3e}     |  {}",
            tensor.estimate_f[c].worst_ratio,
            tensor.f_energy_identity[c],
            if c == 0 {
                format!("{:.3e} (all components)", tensor.f_error_l2.expect("exact family"))
            } else {
                String::new()
            },
        );
    }

    // the corner-compatibility section matches wall data against initial
    // data to third order at the corner
    let compat = rep.compat.as_ref().expect("compat section");
    println!("\ncorner compatibility:");
    for cond in &compat.conditions {
        println!(
            "  {} {:<22} residual {:.3e}",
            if cond.pass { "pass" } else { "FAIL" },
            cond.name,
            cond.residual
        );
    }
    assert!(compat.pass);

    println!("\nfiles this run would write:");
    for (name, contents) in &art.files {
        println!("  {name} ({} bytes)", contents.len());
    }
    let fmap = art
        .files
        .iter()
        .find(|(n, _)| n.ends_with(".fmap.csv"))
        .map(|(_, c)| c)
        .expect("fmap csv");
    println!("\nfirst ledger lines:");
    for line in fmap.lines().take(3) {
        println!("  {line}");
    }
    println!("ok");
}
