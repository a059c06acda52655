//! Derived quantities of a tensor state: the discrete gauge residual, the
//! wall trace combinations the closures control, the two second-order wall
//! residuals, and the bootstrap identity checks.
//!
//! Everything here is evaluated with the same stencils the evolution uses
//! (centered tangentially, one-sided at the `x¹` ends), so the identities
//! that hold by cancellation of those stencils hold to rounding — the tests
//! pin several of them at `1e-12` relative.

use crate::grid::{Axis, BoundaryField, Region, ScalarField, Scheme};

use super::PerturbationState;

/// The four components of the discrete gauge residual
/// `V_μ = ∂^ν h_νμ − ½ ∂_μ tr h` (mixed signature folded in):
///
/// ```text
/// V₀ = ∂₁h₀₁ + ∂₂h₀₂ + ∂₃h₀₃ − ½(ḣ₀₀ + ḣ₁₁ + ḣ₂₂ + ḣ₃₃)
/// V_i = −ḣ₀ᵢ + ∂ⱼh_ij − ½ ∂ᵢ(−h₀₀ + h₁₁ + h₂₂ + h₃₃)
/// ```
pub fn gauge_constraint(state: &PerturbationState) -> [ScalarField; 4] {
    let g = state.h[0].grid;
    let h = &state.h;
    let hd = &state.hdot;

    let mut trh = ScalarField::zeros(g);
    trh.add_scaled(-1.0, &h[0]);
    trh.add_scaled(1.0, &h[4]);
    trh.add_scaled(1.0, &h[7]);
    trh.add_scaled(1.0, &h[9]);

    let mut v0 = h[1].diff(Axis::X1, Scheme::OneSidedAtWall);
    v0.add_scaled(1.0, &h[2].diff(Axis::X2, Scheme::Centered));
    v0.add_scaled(1.0, &h[3].diff(Axis::X3, Scheme::Centered));
    v0.add_scaled(-0.5, &hd[0]);
    v0.add_scaled(-0.5, &hd[4]);
    v0.add_scaled(-0.5, &hd[7]);
    v0.add_scaled(-0.5, &hd[9]);

    let spatial = |a: usize, x2: usize, x3: usize, dotted: usize, ax: Axis| {
        let mut v = h[a].diff(Axis::X1, Scheme::OneSidedAtWall);
        v.add_scaled(1.0, &h[x2].diff(Axis::X2, Scheme::Centered));
        v.add_scaled(1.0, &h[x3].diff(Axis::X3, Scheme::Centered));
        v.add_scaled(-1.0, &hd[dotted]);
        v.add_scaled(
            -0.5,
            &trh.diff(ax, if ax == Axis::X1 { Scheme::OneSidedAtWall } else { Scheme::Centered }),
        );
        v
    };
    let v1 = spatial(4, 5, 6, 1, Axis::X1);
    let v2 = spatial(5, 7, 8, 2, Axis::X2);
    let v3 = spatial(6, 8, 9, 3, Axis::X3);
    [v0, v1, v2, v3]
}

/// Root of the summed squared bulk L² norms of the residual components.
pub fn constraint_l2(state: &PerturbationState) -> f64 {
    gauge_constraint(state)
        .iter()
        .map(|v| {
            let n = v.l2_norm(Region::BulkSlice);
            n * n
        })
        .sum::<f64>()
        .sqrt()
}

/// The four wall trace combinations linearizing the extrinsic-curvature
/// traces, in the order `(K₁, K₂, K₃, K₄)`:
///
/// ```text
/// K₁ = ½(ḣ₁₁ + ḣ₂₂ + ḣ₃₃) − ∂₁h₀₁ − (∂₂h₀₂ + ∂₃h₀₃)
/// K₂ = ½(ḣ₂₂ + ḣ₃₃) − (∂₂h₀₂ + ∂₃h₀₃)
/// K₃ = ½∂₁(−h₀₀ + h₂₂ + h₃₃) + ḣ₀₁ − (∂₂h₁₂ + ∂₃h₁₃)
/// K₄ = ½∂₁(h₂₂ + h₃₃) − (∂₂h₁₂ + ∂₃h₁₃)
/// ```
pub fn trace_linearizations(state: &PerturbationState) -> [BoundaryField; 4] {
    let g = state.h[0].grid;
    let h = &state.h;
    let hd = &state.hdot;
    let wt = |c: usize| -> BoundaryField { hd[c].wall_trace() };
    let d1 = |c: usize| -> BoundaryField { h[c].wall_d1() };
    let tan0 = {
        // ∂₂h₀₂ + ∂₃h₀₃ on the wall
        let mut v = h[2].wall_trace().diff(Axis::X2);
        v.add_scaled(1.0, &h[3].wall_trace().diff(Axis::X3));
        v
    };
    let tan1 = {
        // ∂₂h₁₂ + ∂₃h₁₃ on the wall
        let mut v = h[5].wall_trace().diff(Axis::X2);
        v.add_scaled(1.0, &h[6].wall_trace().diff(Axis::X3));
        v
    };

    let mut k1 = BoundaryField::zeros(g);
    k1.add_scaled(0.5, &wt(4));
    k1.add_scaled(0.5, &wt(7));
    k1.add_scaled(0.5, &wt(9));
    k1.add_scaled(-1.0, &d1(1));
    k1.add_scaled(-1.0, &tan0);

    let mut k2 = BoundaryField::zeros(g);
    k2.add_scaled(0.5, &wt(7));
    k2.add_scaled(0.5, &wt(9));
    k2.add_scaled(-1.0, &tan0);

    let mut k3 = BoundaryField::zeros(g);
    k3.add_scaled(-0.5, &d1(0));
    k3.add_scaled(0.5, &d1(7));
    k3.add_scaled(0.5, &d1(9));
    k3.add_scaled(1.0, &hd[1].wall_trace());
    k3.add_scaled(-1.0, &tan1);

    let mut k4 = BoundaryField::zeros(g);
    k4.add_scaled(0.5, &d1(7));
    k4.add_scaled(0.5, &d1(9));
    k4.add_scaled(-1.0, &tan1);

    [k1, k2, k3, k4]
}

/// Periodic 3-point Laplacian of a wall field (both tangential axes).
fn tangential_laplacian(f: &BoundaryField) -> BoundaryField {
    let g = f.grid;
    let inv = 1.0 / (g.dx * g.dx);
    let mut out = BoundaryField::zeros(g);
    for i2 in 0..g.na {
        let i2p = (i2 + 1) % g.na;
        let i2m = (i2 + g.na - 1) % g.na;
        for i3 in 0..g.na {
            let i3p = (i3 + 1) % g.na;
            let i3m = (i3 + g.na - 1) % g.na;
            let c = f.at(i2, i3);
            *out.at_mut(i2, i3) = (f.at(i2p, i3) + f.at(i2m, i3) + f.at(i2, i3p)
                + f.at(i2, i3m)
                - 4.0 * c)
                * inv;
        }
    }
    out
}

/// The two second-order wall residuals, with second time derivatives
/// replaced by the interior wave operator:
///
/// ```text
/// L₁ = Δ_tan h₀₀ + Δ_tan τ + 2∂₁²τ − 2(∂₂ḣ₀₂ + ∂₃ḣ₀₃)
/// L₂ = −2∂₁²τ − Δ_tan τ − Δ_tan h₁₁ − 2∂₁(∂₂h₀₂ + ∂₃h₀₃)
/// ```
///
/// where `τ = ½(h₂₂ + h₃₃)`. On the grid they vanish to rounding for
/// tangentially constant states and for transverse-traceless planes, and
/// track the continuum combination at second order otherwise (the
/// combination itself is gauge-dependent, so it need not vanish on a
/// general wave solution).
pub fn hamiltonian_residuals(state: &PerturbationState) -> (BoundaryField, BoundaryField) {
    let g = state.h[0].grid;
    let dx = g.dx;
    let w = g.n1;
    let h = &state.h;
    let hd = &state.hdot;

    let tau_plane = |i1: usize| -> BoundaryField {
        let mut v = BoundaryField::zeros(g);
        v.add_scaled(0.5, &h[7].plane_trace(i1));
        v.add_scaled(0.5, &h[9].plane_trace(i1));
        v
    };
    let tau_w = tau_plane(w);
    let mut d11_tau = BoundaryField::zeros(g);
    d11_tau.add_scaled(2.0 / (dx * dx), &tau_w);
    d11_tau.add_scaled(-5.0 / (dx * dx), &tau_plane(w - 1));
    d11_tau.add_scaled(4.0 / (dx * dx), &tau_plane(w - 2));
    d11_tau.add_scaled(-1.0 / (dx * dx), &tau_plane(w - 3));

    let mut l1 = tangential_laplacian(&h[0].wall_trace());
    l1.add_scaled(1.0, &tangential_laplacian(&tau_w));
    l1.add_scaled(2.0, &d11_tau);
    l1.add_scaled(-2.0, &hd[2].wall_trace().diff(Axis::X2));
    l1.add_scaled(-2.0, &hd[3].wall_trace().diff(Axis::X3));

    // ∂₁(∂₂h₀₂ + ∂₃h₀₃): tangential divergence per plane, one-sided in x¹
    let q = |i1: usize| -> BoundaryField {
        let mut v = h[2].plane_trace(i1).diff(Axis::X2);
        v.add_scaled(1.0, &h[3].plane_trace(i1).diff(Axis::X3));
        v
    };
    let inv2 = 1.0 / (2.0 * dx);
    let mut d1x = BoundaryField::zeros(g);
    d1x.add_scaled(3.0 * inv2, &q(w));
    d1x.add_scaled(-4.0 * inv2, &q(w - 1));
    d1x.add_scaled(inv2, &q(w - 2));

    let mut l2 = BoundaryField::zeros(g);
    l2.add_scaled(-2.0, &d11_tau);
    l2.add_scaled(-1.0, &tangential_laplacian(&tau_w));
    l2.add_scaled(-1.0, &tangential_laplacian(&h[4].wall_trace()));
    l2.add_scaled(-2.0, &d1x);
    (l1, l2)
}

/// Residuals of the six exact consistency identities between the primitive
/// wall traces, the trace combinations, and the gauge residual. All six are
/// algebraic consequences of the definitions, term by term in the same
/// stencils, so each residual is rounding-level on any state whatsoever.
#[derive(Debug, Clone)]
pub struct BootstrapReport {
    /// Max-abs residual per identity.
    pub residuals: [f64; 6],
    /// Max-abs of the ingredient traces (for relative comparison).
    pub scale: f64,
}

impl BootstrapReport {
    pub fn worst_relative(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |m, r| m.max(*r)) / self.scale
    }
}

/// Check the bootstrap identities on the wall of a state.
///
/// With `τ = ½(h₂₂+h₃₃)`, `u = (∂₀+½∂₁)h₀₀ + ∂₀τ`, `v = (½∂₀+∂₁)h₀₀ − ∂₁τ`,
/// `w = −(√3/2)h₀₀ + τ`, `D₀ = ½h₀₀ + h₀₁`, `λ = 2+√3`:
///
/// 1. `u − λv = (∂₀ + λ∂₁) w`
/// 2. `u = [(1+√3/2)∂₀ + ½∂₁] h₀₀ + ∂₀w`
/// 3. `∂₀h₀₀ + 2K₁ + 2V₀ = 0`
/// 4. `∂₁h₀₀ − 2(K₄ − K₃ + K₁) − 2V₀ − 2∂₀D₀ = 0`
/// 5. `∂₀h₁₁ + 2K₂ + 2(K₄ − K₃) + 2V₀ − 2(∂₁ − ∂₀)D₀ = 0`
/// 6. `∂₁h₁₁ − 2K₃ − 2V₁ = 0`
pub fn bootstrap_check(state: &PerturbationState) -> BootstrapReport {
    let g = state.h[0].grid;
    let h = &state.h;
    let hd = &state.hdot;
    let sq3 = 3.0f64.sqrt();
    let lam = 2.0 + sq3;

    let dt_h00 = hd[0].wall_trace();
    let dx_h00 = h[0].wall_d1();
    let dt_h11 = hd[4].wall_trace();
    let dx_h11 = h[4].wall_d1();
    let mut dt_tau = BoundaryField::zeros(g);
    dt_tau.add_scaled(0.5, &hd[7].wall_trace());
    dt_tau.add_scaled(0.5, &hd[9].wall_trace());
    let mut dx_tau = BoundaryField::zeros(g);
    dx_tau.add_scaled(0.5, &h[7].wall_d1());
    dx_tau.add_scaled(0.5, &h[9].wall_d1());
    let mut dt_d0 = BoundaryField::zeros(g);
    dt_d0.add_scaled(0.5, &hd[0].wall_trace());
    dt_d0.add_scaled(1.0, &hd[1].wall_trace());
    let mut dx_d0 = BoundaryField::zeros(g);
    dx_d0.add_scaled(0.5, &h[0].wall_d1());
    dx_d0.add_scaled(1.0, &h[1].wall_d1());

    let mut u = BoundaryField::zeros(g);
    u.add_scaled(1.0, &dt_h00);
    u.add_scaled(0.5, &dx_h00);
    u.add_scaled(1.0, &dt_tau);
    let mut v = BoundaryField::zeros(g);
    v.add_scaled(0.5, &dt_h00);
    v.add_scaled(1.0, &dx_h00);
    v.add_scaled(-1.0, &dx_tau);
    let mut dt_w = BoundaryField::zeros(g);
    dt_w.add_scaled(-0.5 * sq3, &dt_h00);
    dt_w.add_scaled(1.0, &dt_tau);
    let mut dx_w = BoundaryField::zeros(g);
    dx_w.add_scaled(-0.5 * sq3, &dx_h00);
    dx_w.add_scaled(1.0, &dx_tau);

    let ks = trace_linearizations(state);
    let vs = gauge_constraint(state);
    let v0 = vs[0].wall_trace();
    let v1 = vs[1].wall_trace();

    let mut r = [BoundaryField::zeros(g), BoundaryField::zeros(g), BoundaryField::zeros(g),
        BoundaryField::zeros(g), BoundaryField::zeros(g), BoundaryField::zeros(g)];

    r[0].add_scaled(1.0, &u);
    r[0].add_scaled(-lam, &v);
    r[0].add_scaled(-1.0, &dt_w);
    r[0].add_scaled(-lam, &dx_w);

    r[1].add_scaled(1.0, &u);
    r[1].add_scaled(-(1.0 + 0.5 * sq3), &dt_h00);
    r[1].add_scaled(-0.5, &dx_h00);
    r[1].add_scaled(-1.0, &dt_w);

    r[2].add_scaled(1.0, &dt_h00);
    r[2].add_scaled(2.0, &ks[0]);
    r[2].add_scaled(2.0, &v0);

    r[3].add_scaled(1.0, &dx_h00);
    r[3].add_scaled(-2.0, &ks[3]);
    r[3].add_scaled(2.0, &ks[2]);
    r[3].add_scaled(-2.0, &ks[0]);
    r[3].add_scaled(-2.0, &v0);
    r[3].add_scaled(-2.0, &dt_d0);

    r[4].add_scaled(1.0, &dt_h11);
    r[4].add_scaled(2.0, &ks[1]);
    r[4].add_scaled(2.0, &ks[3]);
    r[4].add_scaled(-2.0, &ks[2]);
    r[4].add_scaled(2.0, &v0);
    r[4].add_scaled(-2.0, &dx_d0);
    r[4].add_scaled(2.0, &dt_d0);

    r[5].add_scaled(1.0, &dx_h11);
    r[5].add_scaled(-2.0, &ks[2]);
    r[5].add_scaled(-2.0, &v1);

    let scale = [
        &u, &v, &dt_w, &dx_w, &dt_h00, &dx_h00, &dt_h11, &dx_h11, &dt_d0, &dx_d0, &v0, &v1,
        &ks[0], &ks[1], &ks[2], &ks[3],
    ]
    .iter()
    .fold(0.0f64, |m, b| m.max(b.max_abs()))
        + 1e-30;

    BootstrapReport {
        residuals: std::array::from_fn(|i| r[i].max_abs()),
        scale,
    }
}
