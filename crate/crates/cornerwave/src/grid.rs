//! Uniform grid on the corner domain and the finite-difference primitives.
//!
//! The spatial domain is the slab `x¹ ∈ [-L, 0]` with periodic transverse
//! directions `x², x³` of period `P`. One spacing `dx` serves all axes:
//!
//! * `x¹` planes at `-L + i·dx` for `i = 0..=n1`, so `L = n1·dx`; plane `i = n1`
//!   is the boundary wall `x¹ = 0`, plane `i = 0` the artificial left edge;
//! * `x², x³` points at `j·dx` for `j = 0..na-1`, so `P = na·dx` (no duplicated
//!   endpoint).
//!
//! All stencils are second order: centered differences inside and along the
//! periodic axes, and the one-sided wall stencil
//! `∂₁u ≈ (3u₀ - 4u₋₁ + u₋₂)/(2dx)` (exact on quadratics) at the `x¹` ends.
//! Bulk quadrature is trapezoidal in `x¹` (half weights on both end planes,
//! which integrates constants over `[-L, 0]` exactly) and a plain periodic sum
//! in `x², x³` (exact for trigonometric polynomials below the Nyquist mode).

use crate::error::{Error, Result};

/// Grid geometry: `n1` cells along `x¹`, `na` cells along each periodic axis,
/// spacing `dx` shared by all axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerGrid {
    pub n1: usize,
    pub na: usize,
    pub dx: f64,
}

/// Differencing axis. `X1` is the bounded axis ending on the wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
    X3,
}

/// Stencil selection for `diff` along `X1`. Both schemes are centered in the
/// interior; `OneSidedAtWall` guarantees the wall plane (and the left edge)
/// use the 3-point one-sided stencil, which `Centered` also falls back to
/// since no ghost data exists beyond the ends. Periodic axes ignore this.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Centered,
    OneSidedAtWall,
}

/// Integration / norm region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// The full slab `[-L, 0] × [0,P)²`.
    BulkSlice,
    /// The wall plane `x¹ = 0`.
    Wall,
}

impl CornerGrid {
    /// A grid must leave room for the 4-point one-sided second-derivative
    /// stencils in `x¹` and for centered stencils transversally.
    pub fn new(n1: usize, na: usize, dx: f64) -> Result<Self> {
        if n1 < 4 {
            return Err(Error::InvalidConfig(format!(
                "n1 = {n1} too small for one-sided stencils (need n1 >= 4)"
            )));
        }
        if na < 4 {
            return Err(Error::InvalidConfig(format!(
                "na = {na} too small for periodic stencils (need na >= 4)"
            )));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidConfig(format!("dx = {dx} must be positive")));
        }
        Ok(CornerGrid { n1, na, dx })
    }

    /// Slab depth `L = n1·dx`.
    pub fn depth(&self) -> f64 {
        self.n1 as f64 * self.dx
    }

    /// Transverse period `P = na·dx`.
    pub fn period(&self) -> f64 {
        self.na as f64 * self.dx
    }

    /// Number of stored points: `(n1+1)·na·na`.
    pub fn len(&self) -> usize {
        (self.n1 + 1) * self.na * self.na
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Points per wall plane.
    pub fn wall_len(&self) -> usize {
        self.na * self.na
    }

    #[inline]
    pub fn idx(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.na + i2) * self.na + i3
    }

    #[inline]
    pub fn widx(&self, i2: usize, i3: usize) -> usize {
        i2 * self.na + i3
    }

    pub fn x1(&self, i1: usize) -> f64 {
        -self.depth() + i1 as f64 * self.dx
    }

    pub fn xa(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    /// `x¹` index of the wall plane.
    pub fn wall(&self) -> usize {
        self.n1
    }
}

/// Scalar grid function on the slab, stored row-major as `(i1, i2, i3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: CornerGrid,
    pub values: Vec<f64>,
}

/// Scalar function on one `x¹ = const` plane (wall data, traces, corner fields).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    pub grid: CornerGrid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: CornerGrid) -> Self {
        ScalarField { grid, values: vec![0.0; grid.len()] }
    }

    /// Sample `f(x¹, x², x³)` at the grid points.
    pub fn from_fn(grid: CornerGrid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut v = Vec::with_capacity(grid.len());
        for i1 in 0..=grid.n1 {
            for i2 in 0..grid.na {
                for i3 in 0..grid.na {
                    v.push(f(grid.x1(i1), grid.xa(i2), grid.xa(i3)));
                }
            }
        }
        ScalarField { grid, values: v }
    }

    #[inline]
    pub fn at(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        self.values[self.grid.idx(i1, i2, i3)]
    }

    #[inline]
    pub fn at_mut(&mut self, i1: usize, i2: usize, i3: usize) -> &mut f64 {
        let k = self.grid.idx(i1, i2, i3);
        &mut self.values[k]
    }

    /// `self += a * other`, used by the integrators.
    pub fn add_scaled(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for s in &mut self.values {
            *s *= a;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Second-order partial derivative along `axis`.
    ///
    /// Periodic wrap on `x², x³`. Along `x¹` the interior is centered and both
    /// end planes use the 3-point one-sided stencil, so the result is defined
    /// everywhere; `Scheme::OneSidedAtWall` makes the wall treatment explicit
    /// in the caller, `Scheme::Centered` documents that only interior values
    /// are consumed downstream.
    pub fn diff(&self, axis: Axis, _scheme: Scheme) -> ScalarField {
        let g = self.grid;
        let mut out = ScalarField::zeros(g);
        let inv2 = 1.0 / (2.0 * g.dx);
        match axis {
            Axis::X1 => {
                for i2 in 0..g.na {
                    for i3 in 0..g.na {
                        // forward one-sided at the left edge
                        *out.at_mut(0, i2, i3) = (-3.0 * self.at(0, i2, i3)
                            + 4.0 * self.at(1, i2, i3)
                            - self.at(2, i2, i3))
                            * inv2;
                        for i1 in 1..g.n1 {
                            *out.at_mut(i1, i2, i3) =
                                (self.at(i1 + 1, i2, i3) - self.at(i1 - 1, i2, i3)) * inv2;
                        }
                        // backward one-sided at the wall
                        let w = g.n1;
                        *out.at_mut(w, i2, i3) = (3.0 * self.at(w, i2, i3)
                            - 4.0 * self.at(w - 1, i2, i3)
                            + self.at(w - 2, i2, i3))
                            * inv2;
                    }
                }
            }
            Axis::X2 => {
                for i1 in 0..=g.n1 {
                    for i2 in 0..g.na {
                        let ip = (i2 + 1) % g.na;
                        let im = (i2 + g.na - 1) % g.na;
                        for i3 in 0..g.na {
                            *out.at_mut(i1, i2, i3) =
                                (self.at(i1, ip, i3) - self.at(i1, im, i3)) * inv2;
                        }
                    }
                }
            }
            Axis::X3 => {
                for i1 in 0..=g.n1 {
                    for i2 in 0..g.na {
                        for i3 in 0..g.na {
                            let ip = (i3 + 1) % g.na;
                            let im = (i3 + g.na - 1) % g.na;
                            *out.at_mut(i1, i2, i3) =
                                (self.at(i1, i2, ip) - self.at(i1, i2, im)) * inv2;
                        }
                    }
                }
            }
        }
        out
    }

    /// Full second-order Laplacian: centered inside and transversally,
    /// 4-point one-sided second derivatives on the `x¹` end planes.
    pub fn laplacian(&self) -> ScalarField {
        let g = self.grid;
        let mut out = ScalarField::zeros(g);
        let inv2 = 1.0 / (g.dx * g.dx);
        for i1 in 0..=g.n1 {
            for i2 in 0..g.na {
                let i2p = (i2 + 1) % g.na;
                let i2m = (i2 + g.na - 1) % g.na;
                for i3 in 0..g.na {
                    let i3p = (i3 + 1) % g.na;
                    let i3m = (i3 + g.na - 1) % g.na;
                    let c = self.at(i1, i2, i3);
                    let d11 = if i1 == 0 {
                        2.0 * c - 5.0 * self.at(1, i2, i3) + 4.0 * self.at(2, i2, i3)
                            - self.at(3, i2, i3)
                    } else if i1 == g.n1 {
                        2.0 * c - 5.0 * self.at(g.n1 - 1, i2, i3)
                            + 4.0 * self.at(g.n1 - 2, i2, i3)
                            - self.at(g.n1 - 3, i2, i3)
                    } else {
                        self.at(i1 + 1, i2, i3) - 2.0 * c + self.at(i1 - 1, i2, i3)
                    };
                    let d22 = self.at(i1, i2p, i3) - 2.0 * c + self.at(i1, i2m, i3);
                    let d33 = self.at(i1, i2, i3p) - 2.0 * c + self.at(i1, i2, i3m);
                    *out.at_mut(i1, i2, i3) = (d11 + d22 + d33) * inv2;
                }
            }
        }
        out
    }

    /// Trace on the wall plane `x¹ = 0`.
    pub fn wall_trace(&self) -> BoundaryField {
        self.plane_trace(self.grid.n1)
    }

    /// Trace on an arbitrary `x¹` plane.
    pub fn plane_trace(&self, i1: usize) -> BoundaryField {
        let g = self.grid;
        let mut v = Vec::with_capacity(g.wall_len());
        for i2 in 0..g.na {
            for i3 in 0..g.na {
                v.push(self.at(i1, i2, i3));
            }
        }
        BoundaryField { grid: g, values: v }
    }

    /// One-sided `∂₁` on the wall: `(3u₀ - 4u₋₁ + u₋₂)/(2dx)`.
    pub fn wall_d1(&self) -> BoundaryField {
        let g = self.grid;
        let w = g.n1;
        let inv2 = 1.0 / (2.0 * g.dx);
        let mut v = Vec::with_capacity(g.wall_len());
        for i2 in 0..g.na {
            for i3 in 0..g.na {
                v.push(
                    (3.0 * self.at(w, i2, i3) - 4.0 * self.at(w - 1, i2, i3)
                        + self.at(w - 2, i2, i3))
                        * inv2,
                );
            }
        }
        BoundaryField { grid: g, values: v }
    }

    /// One-sided `∂₁` on the left edge (pointing into the domain).
    pub fn edge_d1(&self) -> BoundaryField {
        let g = self.grid;
        let inv2 = 1.0 / (2.0 * g.dx);
        let mut v = Vec::with_capacity(g.wall_len());
        for i2 in 0..g.na {
            for i3 in 0..g.na {
                v.push(
                    (-3.0 * self.at(0, i2, i3) + 4.0 * self.at(1, i2, i3)
                        - self.at(2, i2, i3))
                        * inv2,
                );
            }
        }
        BoundaryField { grid: g, values: v }
    }

    /// L² norm over `region` with the module quadrature rules.
    pub fn l2_norm(&self, region: Region) -> f64 {
        let g = self.grid;
        match region {
            Region::BulkSlice => {
                let mut acc = 0.0;
                for i1 in 0..=g.n1 {
                    let w1 = if i1 == 0 || i1 == g.n1 { 0.5 } else { 1.0 };
                    let mut plane = 0.0;
                    for i2 in 0..g.na {
                        for i3 in 0..g.na {
                            let v = self.at(i1, i2, i3);
                            plane += v * v;
                        }
                    }
                    acc += w1 * plane;
                }
                (acc * g.dx * g.dx * g.dx).sqrt()
            }
            Region::Wall => self.wall_trace().l2_norm(),
        }
    }

    /// Discrete Sobolev norm of order `s ∈ 0..=3` over `region`: the root of
    /// the summed squared L² norms of every spatial derivative `D^γ u`,
    /// `|γ| ≤ s` (one term per multi-index, no combinatorial weights).
    pub fn sobolev_norm(&self, s: usize, region: Region) -> Result<f64> {
        if s > 3 {
            return Err(Error::InvalidConfig(format!(
                "sobolev order s = {s} out of range (supported: 0..=3)"
            )));
        }
        let mut acc = 0.0;
        for k1 in 0..=s {
            for k2 in 0..=(s - k1) {
                for k3 in 0..=(s - k1 - k2) {
                    let mut d = self.clone();
                    for _ in 0..k1 {
                        d = d.diff(Axis::X1, Scheme::OneSidedAtWall);
                    }
                    for _ in 0..k2 {
                        d = d.diff(Axis::X2, Scheme::Centered);
                    }
                    for _ in 0..k3 {
                        d = d.diff(Axis::X3, Scheme::Centered);
                    }
                    let n = d.l2_norm(region);
                    acc += n * n;
                }
            }
        }
        Ok(acc.sqrt())
    }
}

impl BoundaryField {
    pub fn zeros(grid: CornerGrid) -> Self {
        BoundaryField { grid, values: vec![0.0; grid.wall_len()] }
    }

    /// Sample `f(x², x³)` on the plane.
    pub fn from_fn(grid: CornerGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut v = Vec::with_capacity(grid.wall_len());
        for i2 in 0..grid.na {
            for i3 in 0..grid.na {
                v.push(f(grid.xa(i2), grid.xa(i3)));
            }
        }
        BoundaryField { grid, values: v }
    }

    #[inline]
    pub fn at(&self, i2: usize, i3: usize) -> f64 {
        self.values[self.grid.widx(i2, i3)]
    }

    #[inline]
    pub fn at_mut(&mut self, i2: usize, i3: usize) -> &mut f64 {
        let k = self.grid.widx(i2, i3);
        &mut self.values[k]
    }

    pub fn add_scaled(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
    }

    /// Centered periodic tangential derivative (`axis` must be `X2` or `X3`).
    pub fn diff(&self, axis: Axis) -> BoundaryField {
        let g = self.grid;
        let inv2 = 1.0 / (2.0 * g.dx);
        let mut out = BoundaryField::zeros(g);
        for i2 in 0..g.na {
            for i3 in 0..g.na {
                let v = match axis {
                    Axis::X2 => {
                        (self.at((i2 + 1) % g.na, i3) - self.at((i2 + g.na - 1) % g.na, i3))
                            * inv2
                    }
                    Axis::X3 => {
                        (self.at(i2, (i3 + 1) % g.na) - self.at(i2, (i3 + g.na - 1) % g.na))
                            * inv2
                    }
                    Axis::X1 => panic!("BoundaryField has no x1 direction"),
                };
                *out.at_mut(i2, i3) = v;
            }
        }
        out
    }

    /// Plane L² norm: `sqrt(dx² Σ v²)` (periodic sum, no end weights).
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v * v).sum();
        (s * self.grid.dx * self.grid.dx).sqrt()
    }

    /// Plane integral `dx² Σ v` (for flux accumulators).
    pub fn integral(&self) -> f64 {
        let s: f64 = self.values.iter().sum();
        s * self.grid.dx * self.grid.dx
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> CornerGrid {
        // L = 2, P = 1
        CornerGrid::new(64, 32, 1.0 / 32.0).unwrap()
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(CornerGrid::new(2, 8, 0.1).is_err());
        assert!(CornerGrid::new(8, 2, 0.1).is_err());
        assert!(CornerGrid::new(8, 8, 0.0).is_err());
        assert!(CornerGrid::new(8, 8, -1.0).is_err());
    }

    #[test]
    fn diff_of_constant_vanishes() {
        let g = grid();
        let u = ScalarField::from_fn(g, |_, _, _| 3.25);
        for axis in [Axis::X1, Axis::X2, Axis::X3] {
            let d = u.diff(axis, Scheme::OneSidedAtWall);
            assert_eq!(d.max_abs(), 0.0, "axis {axis:?}");
        }
    }

    #[test]
    fn one_sided_wall_stencil_exact_on_linear_and_quadratic() {
        let g = grid();
        let lin = ScalarField::from_fn(g, |x, _, _| x);
        let d = lin.diff(Axis::X1, Scheme::OneSidedAtWall);
        for i2 in 0..g.na {
            for i3 in 0..g.na {
                assert!((d.at(g.n1, i2, i3) - 1.0).abs() <= 1e-12);
            }
        }
        // quadratic: derivative 2x, at the wall x = 0
        let quad = ScalarField::from_fn(g, |x, _, _| x * x);
        let dq = quad.wall_d1();
        assert!(dq.max_abs() <= 1e-12);
    }

    #[test]
    fn centered_transverse_derivative_second_order() {
        // k³/6 dx² is the leading truncation error of the centered stencil on sin(kx)
        let k = 2.0 * PI; // one period across P = 1
        for halvings in 0..2 {
            let na = 32 << halvings;
            let g = CornerGrid::new(8, na, 1.0 / na as f64).unwrap();
            let u = ScalarField::from_fn(g, |_, y, _| (k * y).sin());
            let d = u.diff(Axis::X2, Scheme::Centered);
            let exact = ScalarField::from_fn(g, |_, y, _| k * (k * y).cos());
            let mut err: f64 = 0.0;
            for (a, b) in d.values.iter().zip(&exact.values) {
                err = err.max((a - b).abs());
            }
            let bound = k.powi(3) / 6.0 * g.dx * g.dx * 1.05;
            assert!(err <= bound, "na={na}: err {err} > bound {bound}");
        }
    }

    #[test]
    fn discrete_fourier_symbol_is_exact() {
        // On the periodic axes the centered stencil maps sin(kx) to
        // (sin(k dx)/dx)·cos(kx) exactly, for every resolved mode.
        let g = grid();
        for m in [1.0, 2.0, 5.0] {
            let k = 2.0 * PI * m / g.period();
            let sym = (k * g.dx).sin() / g.dx;
            let u = ScalarField::from_fn(g, |_, y, _| (k * y).sin());
            let d = u.diff(Axis::X2, Scheme::Centered);
            let expect = ScalarField::from_fn(g, |_, y, _| sym * (k * y).cos());
            let mut rel: f64 = 0.0;
            for (a, b) in d.values.iter().zip(&expect.values) {
                rel = rel.max((a - b).abs());
            }
            assert!(rel <= 1e-12 * sym.abs(), "mode {m}: {rel}");
        }
    }

    #[test]
    fn l2_norm_of_zero_and_constant() {
        let g = grid();
        assert_eq!(ScalarField::zeros(g).l2_norm(Region::BulkSlice), 0.0);
        let one = ScalarField::from_fn(g, |_, _, _| 1.0);
        let expect = (g.depth() * g.period() * g.period()).sqrt();
        assert!((one.l2_norm(Region::BulkSlice) - expect).abs() <= 1e-12 * expect);
        // wall norm of a constant: sqrt(P²)
        assert!((one.l2_norm(Region::Wall) - g.period()).abs() <= 1e-12);
    }

    #[test]
    fn wall_norm_of_transverse_mode() {
        // Σ_j sin²(2πj/na) = na/2 exactly, so the wall L² of sin(2πx²/P) is
        // sqrt(P²/2) to rounding — comfortably inside the O(dx²) allowance.
        let g = grid();
        let k = 2.0 * PI / g.period();
        let u = ScalarField::from_fn(g, |_, y, _| (k * y).sin());
        let expect = (g.period() * g.period() / 2.0).sqrt();
        assert!((u.l2_norm(Region::Wall) - expect).abs() <= 1e-12);
    }

    #[test]
    fn sobolev_norm_reduces_to_l2_and_scales_with_modes() {
        let g = grid();
        let one = ScalarField::from_fn(g, |_, _, _| 2.0);
        let h1 = one.sobolev_norm(1, Region::BulkSlice).unwrap();
        assert!((h1 - one.l2_norm(Region::BulkSlice)).abs() <= 1e-12);

        // H¹ of a pure transverse mode: discrete symbol version of
        // sqrt(1 + k²)·‖u‖, with the centered symbol s = sin(k dx)/dx.
        let k = 2.0 * PI / g.period();
        let u = ScalarField::from_fn(g, |_, y, _| (k * y).sin());
        let s = (k * g.dx).sin() / g.dx;
        let l2 = u.l2_norm(Region::BulkSlice);
        let dl2 = u.diff(Axis::X2, Scheme::Centered).l2_norm(Region::BulkSlice);
        let expect = (l2 * l2 + dl2 * dl2).sqrt();
        let got = u.sobolev_norm(1, Region::BulkSlice).unwrap();
        assert!((got - expect).abs() <= 1e-12 * expect);
        // and the symbol itself is within O(dx²) of k
        assert!((s - k).abs() <= k.powi(3) / 6.0 * g.dx * g.dx * 1.05);
        // continuum comparison at this resolution
        let cont = (1.0 + k * k).sqrt() * l2;
        assert!((got - cont).abs() <= 10.0 * g.dx * g.dx * cont);
    }

    #[test]
    fn sobolev_norm_rejects_large_order() {
        let g = grid();
        let u = ScalarField::zeros(g);
        assert!(u.sobolev_norm(4, Region::BulkSlice).is_err());
        assert_eq!(u.sobolev_norm(3, Region::BulkSlice).unwrap(), 0.0);
    }

    #[test]
    fn diff_is_linear() {
        let g = CornerGrid::new(8, 8, 0.25).unwrap();
        let u = ScalarField::from_fn(g, |x, y, z| (x + y).sin() * (1.0 + z));
        let v = ScalarField::from_fn(g, |x, y, z| x * x - y * z);
        let mut combo = u.clone();
        combo.scale(2.5);
        combo.add_scaled(-1.25, &v);
        for axis in [Axis::X1, Axis::X2, Axis::X3] {
            let mut lhs = u.diff(axis, Scheme::OneSidedAtWall);
            lhs.scale(2.5);
            lhs.add_scaled(-1.25, &v.diff(axis, Scheme::OneSidedAtWall));
            let rhs = combo.diff(axis, Scheme::OneSidedAtWall);
            let mut d: f64 = 0.0;
            for (a, b) in lhs.values.iter().zip(&rhs.values) {
                d = d.max((a - b).abs());
            }
            assert!(d <= 1e-12, "axis {axis:?}");
        }
    }

    #[test]
    fn mixed_partials_commute_on_periodic_axes() {
        let g = CornerGrid::new(8, 16, 0.125).unwrap();
        let u = ScalarField::from_fn(g, |x, y, z| {
            (2.0 * PI * y / g.period()).sin() * (2.0 * PI * z / g.period()).cos() + x * x
        });
        let a = u.diff(Axis::X2, Scheme::Centered).diff(Axis::X3, Scheme::Centered);
        let b = u.diff(Axis::X3, Scheme::Centered).diff(Axis::X2, Scheme::Centered);
        let mut d: f64 = 0.0;
        for (x, y) in a.values.iter().zip(&b.values) {
            d = d.max((x - y).abs());
        }
        assert!(d <= 1e-12);
    }

    #[test]
    fn laplacian_matches_closed_form_mode() {
        let g = CornerGrid::new(32, 32, 1.0 / 32.0).unwrap();
        let k = 2.0 * PI / g.period();
        let u = ScalarField::from_fn(g, |x, y, _| (k * y).sin() * (1.0 + x));
        let lap = u.laplacian();
        // exact Laplacian is -k² sin(k y)(1+x); compare away from the ends
        let mut err: f64 = 0.0;
        for i1 in 1..g.n1 {
            for i2 in 0..g.na {
                for i3 in 0..g.na {
                    let x = g.x1(i1);
                    let y = g.xa(i2);
                    let exact = -k * k * (k * y).sin() * (1.0 + x);
                    err = err.max((lap.at(i1, i2, i3) - exact).abs());
                }
            }
        }
        assert!(err <= k.powi(4) / 12.0 * g.dx * g.dx * 1.1, "err={err}");
    }
}
