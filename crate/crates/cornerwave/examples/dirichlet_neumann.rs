//! The Dirichlet-to-Neumann bound on the wall.
//!
//! For Dirichlet runs the ledger records the recovered normal-derivative
//! power `∫∫ u_x²` on the wall; the map bound says it is controlled by the
//! initial and current energies plus the tangential data norm. We evaluate
//! the slack of that inequality over a three-scenario suite and watch it
//! stay above `-10·dx` — and improve as the grid refines.
//!
//! ```bash
//! cargo run --release --example dirichlet_neumann
//! ```

use cornerwave::scalar::{dtn_report, evolve, families, ScalarBc, ScalarScenario};
use cornerwave::CornerGrid;

fn suite(n1: usize) -> Vec<(&'static str, ScalarScenario)> {
    let dx = 2.0 / n1 as f64;
    let grid = CornerGrid::new(n1, 8, dx).expect("grid");
    let bc = ScalarBc::Dirichlet;
    vec![
        ("traveling_wave", families::traveling_wave(grid, bc, 0.75, 0.4, 1.0, 2.0, 0.5)),
        ("wall_pulse", families::wall_pulse(grid, bc, 0.75, 0.4, 1.0, 0.5, 1)),
        ("interior_bump", families::interior_bump(grid, bc, 0.75, 0.4, 1.0, -1.0, 0.25, 1, 0.3)),
    ]
}

fn main() {
    let mut worst_by_n1 = Vec::new();
    for n1 in [32usize, 64, 128] {
        let dx = 2.0 / n1 as f64;
        let mut worst = f64::INFINITY;
        println!("--- n1 = {n1} (dx = {dx:.5}) ---");
        for (name, scen) in suite(n1) {
            let run = evolve(&scen).expect(name);
            let dtn = dtn_report(&run.ledger);
            println!(
                "  {name:<16} min slack {:>10.6} at t = {:.3}",
                dtn.min_slack, dtn.at_time
            );
            worst = worst.min(dtn.min_slack);
        }
        println!("  worst slack {worst:.6} vs floor {:.6}", -10.0 * dx);
        assert!(worst >= -10.0 * dx, "slack dipped past the O(dx) floor");
        worst_by_n1.push(worst);
    }

    // refinement should not make the slack worse
    println!("\nslack trend under refinement: {worst_by_n1:?}");
    for pair in worst_by_n1.windows(2) {
        assert!(
            pair[1] >= pair[0] - 1e-12,
            "slack deteriorated under refinement: {pair:?}"
        );
    }
    println!("ok");
}
