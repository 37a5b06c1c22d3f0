//! Image measures under piecewise-monotone maps.
//!
//! The pushforward of an absolutely continuous target has no closed form in
//! general, so it is represented by its distribution function sampled on a
//! fine value grid. Construction inverts the map piece by piece: on each
//! declared monotone piece the set `{t : g(t) <= v}` is a single interval
//! whose endpoint comes from a sampled inverse table, and its mass from a
//! cumulative quadrature table over the same sample points. Atoms map
//! exactly. A map that is constant over the whole support collapses the
//! continuous part to a single atom.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measures::{Atom, MeasureKind, TargetMeasure, ATOM_EPS};
use crate::quad::{integrate_with_breakpoints, QUAD_ABS_TOL};

/// Number of sample points per monotone piece for the inverse tables.
const PIECE_SAMPLES: usize = 1 << 14;

/// Number of value-grid points carrying the sampled distribution function,
/// well above the required floor of `2^12`. The grid linearizes the
/// distribution function between nodes, and for an image with a square-root
/// singularity (e.g. a quadratic map of a uniform measure) that costs about
/// `(1/N)^{3/2}/6` in the Stieltjes integral of the identity; `2^19` keeps it
/// near `5e-10`, an order below the commutation tolerance.
pub const VALUE_GRID: usize = 1 << 19;

/// A real map together with the interior points where its monotonicity may
/// change. Pieces between consecutive breakpoints must be monotone (either
/// direction) and the map continuous.
#[derive(Clone)]
pub struct PiecewiseMonotone {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Vec<f64>,
}

impl PiecewiseMonotone {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, mut breakpoints: Vec<f64>) -> Self {
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        PiecewiseMonotone { f: Arc::new(f), breakpoints }
    }

    /// A map already monotone on the whole domain.
    pub fn monotone(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(f, vec![])
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

impl std::fmt::Debug for PiecewiseMonotone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PiecewiseMonotone")
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

/// A measure on the value axis, represented by a sampled distribution
/// function for its continuous part plus exact atoms.
#[derive(Debug, Clone)]
pub struct SampledMeasure {
    /// Ascending value grid; empty when the measure is purely atomic.
    grid: Vec<f64>,
    /// Cumulative continuous mass at each grid value.
    cdf: Vec<f64>,
    atoms: Vec<Atom>,
}

impl SampledMeasure {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn grid_len(&self) -> usize {
        self.grid.len()
    }

    pub fn total_mass(&self) -> f64 {
        let ac = self.cdf.last().copied().unwrap_or(0.0);
        ac + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    /// Mass of `{value <= v}`.
    pub fn mass_leq(&self, v: f64) -> f64 {
        let ac = if self.grid.is_empty() {
            0.0
        } else if v < self.grid[0] {
            0.0
        } else if v >= *self.grid.last().unwrap() {
            *self.cdf.last().unwrap()
        } else {
            let i = self.grid.partition_point(|x| *x <= v) - 1;
            let (g0, g1) = (self.grid[i], self.grid[i + 1]);
            let frac = if g1 > g0 { (v - g0) / (g1 - g0) } else { 1.0 };
            self.cdf[i] + frac * (self.cdf[i + 1] - self.cdf[i])
        };
        ac + self.atoms.iter().filter(|a| a.location <= v).map(|a| a.mass).sum::<f64>()
    }

    /// `∫ v dF(v)`: midpoint Stieltjes sum over the grid plus atom terms.
    pub fn integral_identity(&self) -> f64 {
        let mut total = 0.0;
        for j in 1..self.grid.len() {
            let dm = self.cdf[j] - self.cdf[j - 1];
            total += 0.5 * (self.grid[j] + self.grid[j - 1]) * dm;
        }
        total + self.atoms.iter().map(|a| a.mass * a.location).sum::<f64>()
    }
}

struct MonotonePiece {
    /// Map values sorted ascending.
    g: Vec<f64>,
    /// Continuous mass of `{t in piece : g(t) <= g[i]}`.
    mass: Vec<f64>,
}

impl MonotonePiece {
    fn mass_leq(&self, v: f64) -> f64 {
        if v < self.g[0] {
            return 0.0;
        }
        if v >= *self.g.last().unwrap() {
            return *self.mass.last().unwrap();
        }
        let i = self.g.partition_point(|x| *x <= v) - 1;
        let (g0, g1) = (self.g[i], self.g[i + 1]);
        let frac = if g1 > g0 { (v - g0) / (g1 - g0) } else { 1.0 };
        self.mass[i] + frac * (self.mass[i + 1] - self.mass[i])
    }
}

impl TargetMeasure {
    /// Pushforward of this measure under `g`, sampled on [`VALUE_GRID`]
    /// points. Atoms move exactly; each absolutely continuous component is
    /// inverted piecewise.
    pub fn pushforward(&self, g: &PiecewiseMonotone) -> Result<SampledMeasure> {
        let domain = *self.domain();
        for b in g.breakpoints() {
            if !b.is_finite() {
                return Err(Error::InvalidMeasure("non-finite monotonicity breakpoint".into()));
            }
        }

        let mut atoms: Vec<Atom> =
            self.atoms().iter().map(|a| Atom { location: g.eval(a.location), mass: a.mass }).collect();

        let densities = collect_densities(self.kind(), 1.0);
        let ac_weight: f64 = densities.iter().map(|(w, _, _)| w).sum();
        if densities.is_empty() {
            atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
            merge_atoms(&mut atoms);
            return Ok(SampledMeasure { grid: vec![], cdf: vec![], atoms });
        }

        let mut cuts: Vec<f64> = g
            .breakpoints()
            .iter()
            .copied()
            .filter(|b| *b > domain.lo() && *b < domain.hi())
            .collect();
        cuts.push(domain.lo());
        cuts.push(domain.hi());
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut pieces = Vec::new();
        let mut vmin = f64::INFINITY;
        let mut vmax = f64::NEG_INFINITY;
        for w in cuts.windows(2) {
            let piece = build_piece(g, w[0], w[1], &densities);
            vmin = vmin.min(piece.g[0]);
            vmax = vmax.max(*piece.g.last().unwrap());
            pieces.push(piece);
        }

        if vmax - vmin <= ATOM_EPS {
            // constant map: all continuous mass collapses to one point
            atoms.push(Atom { location: vmin, mass: ac_weight });
            atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
            merge_atoms(&mut atoms);
            return Ok(SampledMeasure { grid: vec![], cdf: vec![], atoms });
        }

        let k = VALUE_GRID;
        let mut grid = Vec::with_capacity(k + 1);
        let mut cdf = Vec::with_capacity(k + 1);
        for j in 0..=k {
            let v = vmin + (vmax - vmin) * j as f64 / k as f64;
            grid.push(v);
            cdf.push(pieces.iter().map(|p| p.mass_leq(v)).sum());
        }

        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        merge_atoms(&mut atoms);
        Ok(SampledMeasure { grid, cdf, atoms })
    }
}

type WeightedDensity<'a> = (f64, &'a crate::measures::Density, Vec<f64>);

fn collect_densities(kind: &MeasureKind, weight: f64) -> Vec<WeightedDensity<'_>> {
    match kind {
        MeasureKind::AbsolutelyContinuous(d) => vec![(weight, d, d.breakpoints().to_vec())],
        MeasureKind::Atomic(_) => vec![],
        MeasureKind::Mixture(parts) => parts
            .iter()
            .flat_map(|(w, part)| collect_densities(part, weight * w))
            .collect(),
    }
}

fn build_piece(g: &PiecewiseMonotone, a: f64, b: f64, densities: &[WeightedDensity]) -> MonotonePiece {
    let n = PIECE_SAMPLES;
    let mut s = Vec::with_capacity(n + 1);
    let mut gv = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = a + (b - a) * i as f64 / n as f64;
        s.push(t);
        gv.push(g.eval(t));
    }
    // cumulative continuous mass at the sample points
    let seg_tol = QUAD_ABS_TOL / n as f64;
    let mut mass = Vec::with_capacity(n + 1);
    mass.push(0.0);
    let mut acc = 0.0;
    for i in 1..=n {
        for (w, d, bps) in densities {
            acc += w * integrate_with_breakpoints(|t| d.eval(t), s[i - 1], s[i], bps, seg_tol);
        }
        mass.push(acc);
    }

    let ascending = gv[n] >= gv[0];
    if !ascending {
        gv.reverse();
        let total = *mass.last().unwrap();
        let mut rev: Vec<f64> = mass.iter().map(|m| total - m).collect();
        rev.reverse();
        mass = rev;
    }
    // guard against sub-tolerance sampling wiggle on flat stretches
    for i in 1..gv.len() {
        if gv[i] < gv[i - 1] {
            gv[i] = gv[i - 1];
        }
    }
    MonotonePiece { g: gv, mass }
}

fn merge_atoms(atoms: &mut Vec<Atom>) {
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms.drain(..) {
        match merged.last_mut() {
            Some(prev) if (prev.location - a.location).abs() <= ATOM_EPS => prev.mass += a.mass,
            _ => merged.push(a),
        }
    }
    *atoms = merged;
}
