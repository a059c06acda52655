//! Corner decomposition algebra and the corner-data checkers.
//!
//! At the corner, the boundary vector field decomposes over the initial
//! normal image and the pushed-forward slab normal with coefficients that
//! depend only on the corner angle parameter `a`. The coefficients satisfy
//! two exact identities:
//!
//! * full-vector mode:   `lambda1^2 + lambda2^2 = 2`
//! * projected mode:     `ell = lambda1 * (lambda1 + lambda2) / 2 in (0, 2)`
//!
//! and each is invertible back to `a`. The second half of this example runs
//! the corner-data checkers on a consistent sample, then perturbs single
//! fields to show each defect is flagged by the matching named condition.
//! The serialized sample at the end is exactly the input format of the
//! `check-corner` CLI subcommand.
//!
//! ```bash
//! cargo run --release --example corner_algebra
//! ```

use cornerwave::compat::{
    angle_from_ell, angle_from_lambdas, check_corner_conditions, corner_ell, corner_lambdas,
    reference_point, CornerMode, CornerSample, ALGEBRAIC_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    // --- identities over random corner angles -------------------------------
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst_norm: f64 = 0.0;
    let mut worst_round_trip: f64 = 0.0;
    let (mut ell_min, mut ell_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..10_000 {
        let a: f64 = rng.gen_range(-20.0..20.0);
        let (l1, l2) = corner_lambdas(a);
        let ell = corner_ell(a);
        worst_norm = worst_norm.max((l1 * l1 + l2 * l2 - 2.0).abs());
        worst_round_trip = worst_round_trip
            .max((angle_from_lambdas(l1, l2) - a).abs())
            .max((angle_from_ell(ell) - a).abs());
        ell_min = ell_min.min(ell);
        ell_max = ell_max.max(ell);
        assert!(ell > 0.0 && ell < 2.0, "ell out of range at a = {a}");
        assert!((l1 * l1 + l2 * l2 - 2.0).abs() <= 1e-12);
    }
    println!("10000 random corner angles in [-20, 20]:");
    println!("  worst |lambda1^2 + lambda2^2 - 2| : {worst_norm:.3e}");
    println!("  worst angle round-trip error      : {worst_round_trip:.3e}");
    println!("  ell range observed                : ({ell_min:.6}, {ell_max:.6})");
    assert!(worst_round_trip <= 1e-10);

    // --- checkers on a consistent corner sample -----------------------------
    let sample = CornerSample {
        points: vec![reference_point(-0.7), reference_point(0.0), reference_point(1.3)],
    };
    for mode in [CornerMode::B, CornerMode::Bc] {
        let rep = check_corner_conditions(&sample, mode, ALGEBRAIC_TOL).expect("complete sample");
        println!("\nconsistent sample, mode {mode:?}:");
        for c in &rep.conditions {
            println!(
                "  {} {:<28} residual {:.3e}",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.residual
            );
        }
        assert!(rep.pass, "consistent sample must pass in mode {mode:?}");
    }

    // --- single-field perturbations are flagged by the matching condition ---
    let cases: [(&str, fn(&mut CornerSample), CornerMode); 4] = [
        ("gamma off conformal class", |s| {
            s.points[0].gamma.as_mut().unwrap()[0][1] += 1e-3;
        }, CornerMode::B),
        ("g_map displaced from e0", |s| {
            s.points[0].g_map.as_mut().unwrap()[1] += 1e-3;
        }, CornerMode::B),
        ("theta off the decomposition", |s| {
            s.points[0].theta.as_mut().unwrap()[1] += 1e-3;
        }, CornerMode::B),
        ("theta_c off ell * e1", |s| {
            s.points[0].theta_c.as_mut().unwrap()[0] += 1e-3;
        }, CornerMode::Bc),
    ];
    println!();
    for (what, tweak, mode) in cases {
        let mut bad = sample.clone();
        tweak(&mut bad);
        let rep = check_corner_conditions(&bad, mode, ALGEBRAIC_TOL).expect("complete sample");
        let flagged: Vec<&str> = rep
            .conditions
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        println!("perturb {what:<30} (mode {mode:?}) -> flags {flagged:?}");
        assert!(!rep.pass, "perturbation `{what}` must be flagged");
    }

    // --- the on-disk format accepted by `check-corner` ----------------------
    let one = CornerSample { points: vec![reference_point(0.3)] };
    println!(
        "\ncheck-corner input format:\n{}",
        serde_json::to_string_pretty(&one).expect("serialize")
    );
    println!("ok");
}
