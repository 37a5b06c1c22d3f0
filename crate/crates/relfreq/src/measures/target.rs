//! Target probability measures on a half-open domain.
//!
//! A [`TargetMeasure`] is what a planner steers a pseudo-empirical measure
//! towards. Three shapes cover everything the estimators need: an absolutely
//! continuous part given by a density, a purely atomic part, and a one-level
//! mixture of the two. Masses of intervals are computed by adaptive Simpson
//! quadrature for densities (splitting at declared density breakpoints) and
//! by direct summation for atoms.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measures::IntervalRC;
use crate::quad::{integrate_with_breakpoints, QUAD_ABS_TOL};

/// Total mass must equal one to within this tolerance at construction.
pub const MASS_TOL: f64 = 1e-9;

/// Two locations closer than this are treated as the same point when testing
/// continuity of an interval endpoint against an atom, and when steering
/// partition split points away from atoms.
pub const ATOM_EPS: f64 = 1e-12;

/// Grid resolution used to check density nonnegativity at construction.
const SIGN_CHECK_GRID: usize = 1 << 12;

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// A density on the domain: an evaluable function plus the interior points
/// where it may jump. Quadrature always splits at the breakpoints, so pieces
/// between them must be smooth.
#[derive(Clone)]
pub struct Density {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Vec<f64>,
}

impl Density {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, breakpoints: Vec<f64>) -> Self {
        Density { f: Arc::new(f), breakpoints }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn integral_against<G: Fn(f64) -> f64>(&self, iv: &IntervalRC, g: G) -> f64 {
        integrate_with_breakpoints(
            |t| g(t) * self.eval(t),
            iv.lo(),
            iv.hi(),
            &self.breakpoints,
            QUAD_ABS_TOL,
        )
    }
}

impl std::fmt::Debug for Density {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Density").field("breakpoints", &self.breakpoints).finish_non_exhaustive()
    }
}

/// The shape of a target measure.
#[derive(Debug, Clone)]
pub enum MeasureKind {
    AbsolutelyContinuous(Density),
    Atomic(Vec<Atom>),
    /// Weighted components; each component must itself be non-mixture.
    Mixture(Vec<(f64, MeasureKind)>),
}

/// A probability measure on a domain `(lo, hi]`.
#[derive(Debug, Clone)]
pub struct TargetMeasure {
    domain: IntervalRC,
    kind: MeasureKind,
}

impl TargetMeasure {
    /// Validates shape and total mass. Atoms must carry positive mass and sit
    /// strictly inside the domain; densities must be nonnegative on a scan
    /// grid; the total mass must be one to within [`MASS_TOL`].
    pub fn new(domain: IntervalRC, kind: MeasureKind) -> Result<Self> {
        validate_kind(&domain, &kind, true)?;
        let m = TargetMeasure { domain, kind };
        let total = m.mass_on(&domain);
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!(
                "total mass is {total}, expected 1 within {MASS_TOL}"
            )));
        }
        Ok(m)
    }

    /// Uniform probability on the domain.
    pub fn uniform(domain: IntervalRC) -> Result<Self> {
        let len = domain.length();
        Self::new(domain, MeasureKind::AbsolutelyContinuous(Density::new(move |_| 1.0 / len, vec![])))
    }

    /// A single unit atom.
    pub fn dirac(domain: IntervalRC, location: f64) -> Result<Self> {
        Self::new(domain, MeasureKind::Atomic(vec![Atom { location, mass: 1.0 }]))
    }

    pub fn domain(&self) -> &IntervalRC {
        &self.domain
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Mass of `iv`, which must be contained in the domain. Atoms count when
    /// `lo < location <= hi`, matching interval membership.
    pub fn measure_of(&self, iv: &IntervalRC) -> Result<f64> {
        if !iv.subset_of(&self.domain) {
            return Err(Error::IntervalOutsideDomain {
                lo: iv.lo(),
                hi: iv.hi(),
                dlo: self.domain.lo(),
                dhi: self.domain.hi(),
            });
        }
        Ok(self.mass_on(iv))
    }

    fn mass_on(&self, iv: &IntervalRC) -> f64 {
        kind_integral(&self.kind, iv, |_| 1.0).max(0.0)
    }

    /// `∫ t dP(t)`, the mean of the identity against this measure.
    pub fn integral_identity(&self) -> f64 {
        kind_integral(&self.kind, &self.domain, |t| t)
    }

    /// `∫ f dP` for an integrand with declared discontinuity points.
    /// Quadrature splits at both the density's and the integrand's
    /// breakpoints.
    pub fn integral_of<F: Fn(f64) -> f64>(&self, f: F, f_breakpoints: &[f64]) -> f64 {
        kind_integral_bp(&self.kind, &self.domain, &f, f_breakpoints)
    }

    /// True when neither endpoint of `iv` carries an atom (within
    /// [`ATOM_EPS`]), so `iv` is a continuity interval of this measure.
    pub fn is_continuity_interval(&self, iv: &IntervalRC) -> bool {
        !self.atoms().iter().any(|a| {
            (a.location - iv.lo()).abs() <= ATOM_EPS || (a.location - iv.hi()).abs() <= ATOM_EPS
        })
    }

    /// All atoms of the measure with their effective masses (mixture weights
    /// applied).
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        collect_atoms(&self.kind, 1.0, &mut out);
        out
    }

    /// Locations a partition builder must avoid as split points.
    pub fn atom_locations(&self) -> Vec<f64> {
        self.atoms().iter().map(|a| a.location).collect()
    }
}

fn collect_atoms(kind: &MeasureKind, weight: f64, out: &mut Vec<Atom>) {
    match kind {
        MeasureKind::AbsolutelyContinuous(_) => {}
        MeasureKind::Atomic(atoms) => {
            out.extend(atoms.iter().map(|a| Atom { location: a.location, mass: weight * a.mass }));
        }
        MeasureKind::Mixture(parts) => {
            for (w, part) in parts {
                collect_atoms(part, weight * w, out);
            }
        }
    }
}

fn kind_integral<F: Fn(f64) -> f64>(kind: &MeasureKind, iv: &IntervalRC, f: F) -> f64 {
    kind_integral_bp(kind, iv, &f, &[])
}

fn kind_integral_bp<F: Fn(f64) -> f64>(
    kind: &MeasureKind,
    iv: &IntervalRC,
    f: &F,
    f_breakpoints: &[f64],
) -> f64 {
    match kind {
        MeasureKind::AbsolutelyContinuous(d) => {
            if f_breakpoints.is_empty() {
                d.integral_against(iv, f)
            } else {
                let mut cuts = d.breakpoints().to_vec();
                cuts.extend_from_slice(f_breakpoints);
                integrate_with_breakpoints(
                    |t| f(t) * d.eval(t),
                    iv.lo(),
                    iv.hi(),
                    &cuts,
                    QUAD_ABS_TOL,
                )
            }
        }
        MeasureKind::Atomic(atoms) => {
            atoms.iter().filter(|a| iv.contains(a.location)).map(|a| a.mass * f(a.location)).sum()
        }
        MeasureKind::Mixture(parts) => {
            parts.iter().map(|(w, part)| w * kind_integral_bp(part, iv, f, f_breakpoints)).sum()
        }
    }
}

fn validate_kind(domain: &IntervalRC, kind: &MeasureKind, allow_mixture: bool) -> Result<()> {
    match kind {
        MeasureKind::AbsolutelyContinuous(d) => {
            let n = SIGN_CHECK_GRID;
            for k in 0..=n {
                let t = domain.lo() + domain.length() * k as f64 / n as f64;
                let v = d.eval(t);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMeasure(format!(
                        "density is {v} at t = {t}, must be finite and nonnegative"
                    )));
                }
            }
            Ok(())
        }
        MeasureKind::Atomic(atoms) => {
            if atoms.is_empty() {
                return Err(Error::InvalidMeasure("atomic measure needs at least one atom".into()));
            }
            for a in atoms {
                if !a.mass.is_finite() || a.mass <= 0.0 {
                    return Err(Error::InvalidMeasure(format!(
                        "atom at {} has mass {}, must be positive",
                        a.location, a.mass
                    )));
                }
                if !(domain.lo() < a.location && a.location < domain.hi()) {
                    return Err(Error::InvalidMeasure(format!(
                        "atom at {} is not strictly inside the domain {}",
                        a.location, domain
                    )));
                }
            }
            Ok(())
        }
        MeasureKind::Mixture(parts) => {
            if !allow_mixture {
                return Err(Error::InvalidMeasure("mixtures cannot nest".into()));
            }
            if parts.is_empty() {
                return Err(Error::InvalidMeasure("mixture needs at least one component".into()));
            }
            for (w, part) in parts {
                if !w.is_finite() || *w <= 0.0 {
                    return Err(Error::InvalidMeasure(format!(
                        "mixture weight {w} must be positive"
                    )));
                }
                validate_kind(domain, part, false)?;
            }
            Ok(())
        }
    }
}
