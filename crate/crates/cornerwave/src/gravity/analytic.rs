//! Closed-form data carriers for the tensor runs.
//!
//! Run families are sums of two primitive terms — plane sinusoids and
//! compactly supported polynomial bumps — both closed under partial
//! differentiation. Representing data this way makes every derived quantity
//! (time rates of boundary rows, characteristic edge data, oracles for error
//! measurement) exact: nothing is ever differentiated numerically on the
//! data side, so convergence tests see only the scheme's own truncation.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::{BoundaryField, CornerGrid, Region, ScalarField};

use super::{comp_index, NCOMP};

/// `order`-th derivative of the C⁵ window `χ(s) = (1-s²)⁶` (zero outside
/// `|s| < 1`). Closed forms up to order 4.
pub fn window(order: usize, s: f64) -> f64 {
    if s.abs() >= 1.0 {
        return 0.0;
    }
    let p = 1.0 - s * s;
    match order {
        0 => p.powi(6),
        1 => -12.0 * s * p.powi(5),
        2 => p.powi(4) * (132.0 * s * s - 12.0),
        3 => p.powi(3) * (360.0 * s - 1320.0 * s * s * s),
        4 => {
            let s2 = s * s;
            p.powi(2) * (11880.0 * s2 * s2 - 6480.0 * s2 + 360.0)
        }
        _ => panic!("window derivative order {order} not implemented"),
    }
}

/// One primitive term of an analytic field.
#[derive(Debug, Clone, Copy)]
pub enum Term {
    /// `amp · sin(k·(t,x¹,x²,x³) + phase)`.
    Sin { amp: f64, k: [f64; 4], phase: f64 },
    /// `amp · χ⁽ᵒʳᵈᵉʳ⁾((x¹ - sigma·t - center)/width)`; `sigma = ±1` selects
    /// the propagation direction along `x¹`.
    Bump { amp: f64, sigma: f64, center: f64, width: f64, order: usize },
}

impl Term {
    fn eval(&self, t: f64, x: f64, y: f64, z: f64) -> f64 {
        match *self {
            Term::Sin { amp, k, phase } => {
                amp * (k[0] * t + k[1] * x + k[2] * y + k[3] * z + phase).sin()
            }
            Term::Bump { amp, sigma, center, width, order } => {
                amp * window(order, (x - sigma * t - center) / width)
            }
        }
    }

    /// Exact partial derivative along `axis` (0 = t, 1..3 spatial); `None`
    /// when the derivative vanishes identically.
    fn derive(&self, axis: usize) -> Option<Term> {
        match *self {
            Term::Sin { amp, k, phase } => {
                if k[axis] == 0.0 {
                    return None;
                }
                Some(Term::Sin { amp: amp * k[axis], k, phase: phase + FRAC_PI_2 })
            }
            Term::Bump { amp, sigma, center, width, order } => match axis {
                0 => Some(Term::Bump {
                    amp: amp * (-sigma / width),
                    sigma,
                    center,
                    width,
                    order: order + 1,
                }),
                1 => Some(Term::Bump {
                    amp: amp / width,
                    sigma,
                    center,
                    width,
                    order: order + 1,
                }),
                _ => None,
            },
        }
    }
}

/// A finite sum of [`Term`]s: the closed function class all run data lives in.
#[derive(Debug, Clone, Default)]
pub struct AnalyticField {
    pub terms: Vec<Term>,
}

impl AnalyticField {
    pub fn zero() -> Self {
        AnalyticField { terms: Vec::new() }
    }

    pub fn sinusoid(amp: f64, k: [f64; 4], phase: f64) -> Self {
        AnalyticField { terms: vec![Term::Sin { amp, k, phase }] }
    }

    /// `amp · χ((x¹ - sigma·t - center)/width)`.
    pub fn traveling_bump(amp: f64, sigma: f64, center: f64, width: f64) -> Self {
        AnalyticField { terms: vec![Term::Bump { amp, sigma, center, width, order: 0 }] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, t: f64, x: f64, y: f64, z: f64) -> f64 {
        self.terms.iter().map(|term| term.eval(t, x, y, z)).sum()
    }

    pub fn derive(&self, axis: usize) -> AnalyticField {
        debug_assert!(axis < 4);
        AnalyticField {
            terms: self.terms.iter().filter_map(|term| term.derive(axis)).collect(),
        }
    }

    pub fn plus(mut self, other: &AnalyticField) -> AnalyticField {
        self.terms.extend_from_slice(&other.terms);
        self
    }

    pub fn scaled(mut self, c: f64) -> AnalyticField {
        for term in &mut self.terms {
            match term {
                Term::Sin { amp, .. } => *amp *= c,
                Term::Bump { amp, .. } => *amp *= c,
            }
        }
        self
    }

    /// Sample on the slab at time `t`.
    pub fn sample(&self, grid: CornerGrid, t: f64) -> ScalarField {
        ScalarField::from_fn(grid, |x, y, z| self.eval(t, x, y, z))
    }

    /// Sample on the plane `x¹ = x` at time `t`.
    pub fn sample_plane(&self, grid: CornerGrid, t: f64, x: f64) -> BoundaryField {
        BoundaryField::from_fn(grid, |y, z| self.eval(t, x, y, z))
    }
}

/// Symmetric tensor perturbation as ten analytic components in the order
/// `[00, 01, 02, 03, 11, 12, 13, 22, 23, 33]`.
#[derive(Debug, Clone)]
pub struct AnalyticPerturbation {
    pub comps: [AnalyticField; 10],
}

impl AnalyticPerturbation {
    pub fn zero() -> Self {
        AnalyticPerturbation { comps: std::array::from_fn(|_| AnalyticField::zero()) }
    }

    pub fn comp(&self, a: usize, b: usize) -> &AnalyticField {
        &self.comps[comp_index(a, b)]
    }

    /// Symmetrized gradient of a vector field: `h_ab = ∂_a w_b + ∂_b w_a`.
    /// Solves the evolution system exactly whenever each `w` component does.
    pub fn from_gauge_vector(w: &[AnalyticField; 4]) -> Self {
        let mut comps: [AnalyticField; 10] = std::array::from_fn(|_| AnalyticField::zero());
        for (idx, &(a, b)) in super::COMP_PAIRS.iter().enumerate() {
            comps[idx] = w[b].derive(a).plus(&w[a].derive(b));
        }
        AnalyticPerturbation { comps }
    }

    pub fn superpose(parts: &[AnalyticPerturbation]) -> Self {
        let mut out = AnalyticPerturbation::zero();
        for p in parts {
            for c in 0..NCOMP {
                out.comps[c] = std::mem::take(&mut out.comps[c]).plus(&p.comps[c]);
            }
        }
        out
    }

    pub fn sample_h(&self, grid: CornerGrid, t: f64) -> Vec<ScalarField> {
        self.comps.iter().map(|f| f.sample(grid, t)).collect()
    }

    pub fn sample_hdot(&self, grid: CornerGrid, t: f64) -> Vec<ScalarField> {
        self.comps.iter().map(|f| f.derive(0).sample(grid, t)).collect()
    }

    /// Root of the summed squared bulk L² errors of the given components
    /// against this field at time `t`.
    pub fn error_l2(&self, h: &[ScalarField], t: f64) -> f64 {
        let mut acc = 0.0;
        for (c, field) in h.iter().enumerate() {
            let mut d = field.clone();
            d.add_scaled(-1.0, &self.comps[c].sample(field.grid, t));
            let e = d.l2_norm(Region::BulkSlice);
            acc += e * e;
        }
        acc.sqrt()
    }
}

/// Four analytic components for the gauge-map system.
#[derive(Debug, Clone)]
pub struct AnalyticGaugeMap {
    pub comps: [AnalyticField; 4],
}

impl AnalyticGaugeMap {
    pub fn zero() -> Self {
        AnalyticGaugeMap { comps: std::array::from_fn(|_| AnalyticField::zero()) }
    }

    pub fn sample_f(&self, grid: CornerGrid, t: f64) -> Vec<ScalarField> {
        self.comps.iter().map(|f| f.sample(grid, t)).collect()
    }

    pub fn sample_fdot(&self, grid: CornerGrid, t: f64) -> Vec<ScalarField> {
        self.comps.iter().map(|f| f.derive(0).sample(grid, t)).collect()
    }

    pub fn error_l2(&self, f: &[ScalarField], t: f64) -> f64 {
        let mut acc = 0.0;
        for (c, field) in f.iter().enumerate() {
            let mut d = field.clone();
            d.add_scaled(-1.0, &self.comps[c].sample(field.grid, t));
            let e = d.l2_norm(Region::BulkSlice);
            acc += e * e;
        }
        acc.sqrt()
    }
}

// ---------------------------------------------------------------------------
// run families

/// Gauge-vector family with no transverse structure: each `w_mu` is a
/// left-moving profile `amp·sin(k(t + x¹) + phase)`. The generated tensor is
/// an exact solution, is constant transversally (so transverse stencils are
/// exact), and carries zero data on the left edge (purely outgoing there).
pub fn pure_gauge_profile(k: f64, amps: [f64; 4]) -> AnalyticPerturbation {
    let phases = [0.0, 0.7, 1.3, 2.1];
    let w: [AnalyticField; 4] = std::array::from_fn(|mu| {
        if amps[mu] == 0.0 {
            AnalyticField::zero()
        } else {
            AnalyticField::sinusoid(amps[mu], [k, k, 0.0, 0.0], phases[mu])
        }
    });
    AnalyticPerturbation::from_gauge_vector(&w)
}

/// Oblique gauge-vector family: `w₂ = amp·sin(ωt - kx·x¹ - ky·x²)` with
/// `ω² = kx² + ky²` and `ky` a period-compatible transverse mode. Exercises
/// the tangential couplings of the wall solve.
pub fn pure_gauge_oblique(kx: f64, mode: i32, period: f64, amp: f64) -> AnalyticPerturbation {
    let ky = 2.0 * PI * mode as f64 / period;
    let om = (kx * kx + ky * ky).sqrt();
    let mut w: [AnalyticField; 4] = std::array::from_fn(|_| AnalyticField::zero());
    w[2] = AnalyticField::sinusoid(amp, [om, -kx, -ky, 0.0], 0.4);
    AnalyticPerturbation::from_gauge_vector(&w)
}

/// Transverse-traceless plane wave running into the wall:
/// `h₂₂ = -h₃₃ = amp·sin(k(t - x¹))`, everything else zero.
pub fn tt_plane(amp: f64, k: f64) -> AnalyticPerturbation {
    let mut p = AnalyticPerturbation::zero();
    p.comps[7] = AnalyticField::sinusoid(amp, [k, -k, 0.0, 0.0], 0.0);
    p.comps[9] = AnalyticField::sinusoid(-amp, [k, -k, 0.0, 0.0], 0.0);
    p
}

/// Compact transverse-traceless pulse released toward the wall:
/// `h₂₂ = -h₃₃ = amp·χ((x¹ - t - center)/width)`.
pub fn tt_bump(amp: f64, center: f64, width: f64) -> AnalyticPerturbation {
    let mut p = AnalyticPerturbation::zero();
    p.comps[7] = AnalyticField::traveling_bump(amp, 1.0, center, width);
    p.comps[9] = AnalyticField::traveling_bump(-amp, 1.0, center, width);
    p
}

/// Transverse-traceless wave running along the wall:
/// `h₁₁ = -h₃₃ = amp·sin(k(t - x²))` with `k` period-compatible. Drives the
/// wall rows with genuinely tangential data.
pub fn tt_transverse(amp: f64, mode: i32, period: f64) -> AnalyticPerturbation {
    let k = 2.0 * PI * mode as f64 / period;
    let mut p = AnalyticPerturbation::zero();
    p.comps[4] = AnalyticField::sinusoid(amp, [k, 0.0, -k, 0.0], 0.0);
    p.comps[9] = AnalyticField::sinusoid(-amp, [k, 0.0, -k, 0.0], 0.0);
    p
}

/// Gauge-map family touching all four components: left-movers on the
/// Dirichlet-driven components and a standing wave on component 1 (whose
/// wall trace vanishes identically, as that row requires).
pub fn gauge_map_mixed(amp: f64, k: f64) -> AnalyticGaugeMap {
    let mut m = AnalyticGaugeMap::zero();
    m.comps[0] = AnalyticField::sinusoid(amp, [k, k, 0.0, 0.0], 0.0);
    // 2·amp·cos(kt)·sin(kx) = amp·sin(k(t+x)) - amp·sin(k(t-x))
    m.comps[1] = AnalyticField::sinusoid(amp, [k, k, 0.0, 0.0], 0.0)
        .plus(&AnalyticField::sinusoid(-amp, [k, -k, 0.0, 0.0], 0.0));
    m.comps[2] = AnalyticField::sinusoid(0.8 * amp, [k, k, 0.0, 0.0], 0.9);
    m.comps[3] = AnalyticField::sinusoid(0.6 * amp, [k, k, 0.0, 0.0], 1.7);
    m
}

/// Seeded random smooth tensor data: every component (and so every rate) is
/// a small sum of sinusoids with period-compatible transverse wavenumbers.
/// Not a solution of anything — raw smooth data for stencil-identity checks
/// and unvalidated runs.
pub fn random_perturbation(seed: u64, period: f64, amp: f64) -> AnalyticPerturbation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = AnalyticPerturbation::zero();
    let kt = 2.0 * PI / period;
    for c in 0..NCOMP {
        let mut f = AnalyticField::zero();
        for _ in 0..3 {
            let k = [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                kt * rng.gen_range(-2i32..=2) as f64,
                kt * rng.gen_range(-2i32..=2) as f64,
            ];
            let a = amp * rng.gen_range(0.3..1.0);
            let phase = rng.gen_range(0.0..2.0 * PI);
            f = f.plus(&AnalyticField::sinusoid(a, k, phase));
        }
        p.comps[c] = f;
    }
    p
}
