//! Correlation topology over the `(η, κ)` parameter plane.
//!
//! A [`ConcurrenceField`] samples the analytic concurrence and the initial
//! potential expectation on a grid. The zero-expectation loci are straight
//! lines; along each one the concurrence oscillates between separable
//! (`C = 0`) and maximally entangled (`C = 1`) lattice sites, and
//! [`alternation_check`] verifies that the two kinds never repeat back to
//! back.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::vbar_contour;
use crate::entangle::closed_form_concurrence;
use crate::error::{Error, Result};
use crate::model::Family;

/// Scan-stage tolerance for lattice sites.
pub const SITE_TOL: f64 = 1e-6;

/// Parameter accuracy of refined lattice sites.
pub const SITE_PARAM_TOL: f64 = 1e-9;

/// Minimum locus samples per 2π of arc.
pub const MIN_RESOLUTION: usize = 1000;

const DERIVATIVE_STEP: f64 = 1e-6;

/// Rectangular sampling window in `(η, κ)` with inclusive endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub eta_min: f64,
    pub eta_max: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub n_eta: usize,
    pub n_kappa: usize,
}

impl Default for Grid {
    /// `[-π, π]²` at 201 × 201; the odd count puts 0 and ±π/2 on nodes.
    fn default() -> Self {
        Grid {
            eta_min: -PI,
            eta_max: PI,
            kappa_min: -PI,
            kappa_max: PI,
            n_eta: 201,
            n_kappa: 201,
        }
    }
}

/// Node `i` of `n` evenly spaced points; exact at both ends and, for
/// symmetric ranges, exactly antisymmetric about the midpoint.
fn lerp(min: f64, max: f64, i: usize, n: usize) -> f64 {
    let last = (n - 1) as f64;
    (min * (last - i as f64) + max * i as f64) / last
}

impl Grid {
    pub fn new(
        eta_min: f64,
        eta_max: f64,
        kappa_min: f64,
        kappa_max: f64,
        n_eta: usize,
        n_kappa: usize,
    ) -> Result<Self> {
        let g = Grid {
            eta_min,
            eta_max,
            kappa_min,
            kappa_max,
            n_eta,
            n_kappa,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bounds = [self.eta_min, self.eta_max, self.kappa_min, self.kappa_max];
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::DegenerateGrid("non-finite bounds".into()));
        }
        if self.eta_min >= self.eta_max || self.kappa_min >= self.kappa_max {
            return Err(Error::DegenerateGrid(
                "bounds must be strictly ordered".into(),
            ));
        }
        if self.n_eta < 2 || self.n_kappa < 2 {
            return Err(Error::DegenerateGrid(
                "need at least 2 nodes per axis".into(),
            ));
        }
        Ok(())
    }

    pub fn d_eta(&self) -> f64 {
        (self.eta_max - self.eta_min) / (self.n_eta - 1) as f64
    }

    pub fn d_kappa(&self) -> f64 {
        (self.kappa_max - self.kappa_min) / (self.n_kappa - 1) as f64
    }

    pub fn eta(&self, i: usize) -> f64 {
        lerp(self.eta_min, self.eta_max, i, self.n_eta)
    }

    pub fn kappa(&self, j: usize) -> f64 {
        lerp(self.kappa_min, self.kappa_max, j, self.n_kappa)
    }
}

/// Parses `emin,emax,kmin,kmax,ne,nk`.
impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(Error::DegenerateGrid(format!(
                "expected 6 comma-separated values, got `{s}`"
            )));
        }
        let real = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| Error::DegenerateGrid(format!("bad bound `{p}`")))
        };
        let count = |p: &str| {
            p.parse::<usize>()
                .map_err(|_| Error::DegenerateGrid(format!("bad count `{p}`")))
        };
        Grid::new(
            real(parts[0])?,
            real(parts[1])?,
            real(parts[2])?,
            real(parts[3])?,
            count(parts[4])?,
            count(parts[5])?,
        )
    }
}

/// Concurrence and initial expectation sampled over a [`Grid`], stored
/// row-major with `η` as the row index.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcurrenceField {
    pub family: Family,
    pub x: f64,
    pub v0: f64,
    pub grid: Grid,
    pub values: Vec<f64>,
    pub vbar: Vec<f64>,
}

impl ConcurrenceField {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_kappa + j]
    }

    pub fn vbar_at(&self, i: usize, j: usize) -> f64 {
        self.vbar[i * self.grid.n_kappa + j]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Evaluates the closed-form concurrence and `Tr(V ρ(0))` at every node.
/// Rows are computed in parallel and merged in index order.
pub fn sweep(family: Family, x: f64, v0: f64, grid: &Grid) -> Result<ConcurrenceField> {
    grid.validate()?;
    if !x.is_finite() {
        return Err(Error::NonFinite("x"));
    }
    if !v0.is_finite() {
        return Err(Error::NonFinite("v0"));
    }
    closed_form_concurrence(family, 0.0, 0.0, 0.0)?;

    let rows: Vec<Vec<(f64, f64)>> = (0..grid.n_eta)
        .into_par_iter()
        .map(|i| {
            let eta = grid.eta(i);
            (0..grid.n_kappa)
                .map(|j| {
                    let kappa = grid.kappa(j);
                    let value =
                        closed_form_concurrence(family, eta, kappa, x).expect("family checked");
                    let vbar = vbar_contour(family, eta, kappa, v0).expect("family checked");
                    (value, vbar)
                })
                .collect()
        })
        .collect();

    let (values, vbar) = rows.into_iter().flatten().unzip();
    Ok(ConcurrenceField {
        family,
        x,
        v0,
        grid: *grid,
        values,
        vbar,
    })
}

/// Coordinate held constant along a straight locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Eta,
    Kappa,
}

/// Straight zero-expectation line, parameterized by the free coordinate
/// `s ∈ [start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Locus {
    pub fixed: Axis,
    pub value: f64,
    pub start: f64,
    pub end: f64,
}

impl Locus {
    /// `(η, κ)` at parameter `s`.
    pub fn point(&self, s: f64) -> (f64, f64) {
        match self.fixed {
            Axis::Eta => (self.value, s),
            Axis::Kappa => (s, self.value),
        }
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn label(&self) -> String {
        match self.fixed {
            Axis::Eta => format!("eta={}", self.value),
            Axis::Kappa => format!("kappa={}", self.value),
        }
    }
}

/// Analytic zero-expectation lines clipped to the grid window.
///
/// Basis-preserving: `η = -1` and `κ = -1`. Basis-flipping: `η = π/2 + nπ`
/// and `κ = π/2 + nπ`.
pub fn zero_loci(family: Family, window: &Grid) -> Result<Vec<Locus>> {
    window.validate()?;
    let values_in = |lo: f64, hi: f64| -> Vec<f64> {
        match family {
            Family::GeneralDiag => {
                if (lo..=hi).contains(&-1.0) {
                    vec![-1.0]
                } else {
                    vec![]
                }
            }
            _ => {
                let first = ((lo - FRAC_PI_2) / PI - 1e-12).ceil() as i64;
                let last = ((hi - FRAC_PI_2) / PI + 1e-12).floor() as i64;
                (first..=last).map(|n| FRAC_PI_2 + n as f64 * PI).collect()
            }
        }
    };
    match family {
        Family::GeneralDiag | Family::GeneralFlip => {}
        other => return Err(Error::UnsupportedFamily(other)),
    }
    let mut loci: Vec<Locus> = values_in(window.eta_min, window.eta_max)
        .into_iter()
        .map(|value| Locus {
            fixed: Axis::Eta,
            value,
            start: window.kappa_min,
            end: window.kappa_max,
        })
        .collect();
    loci.extend(
        values_in(window.kappa_min, window.kappa_max)
            .into_iter()
            .map(|value| Locus {
                fixed: Axis::Kappa,
                value,
                start: window.eta_min,
                end: window.eta_max,
            }),
    );
    Ok(loci)
}

pub type Polyline = Vec<(f64, f64)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum EdgeId {
    /// Between nodes `(i, j)` and `(i + 1, j)`.
    AlongEta(usize, usize),
    /// Between nodes `(i, j)` and `(i, j + 1)`.
    AlongKappa(usize, usize),
}

/// Marching-squares iso-lines of the field's expectation surface at
/// `level`. Cell edges are interpolated linearly; saddle cells are resolved
/// by the mean of their four corners. Returns an empty list when the level
/// is never crossed.
pub fn contour_numeric(field: &ConcurrenceField, level: f64) -> Vec<Polyline> {
    let g = &field.grid;
    let above = |i: usize, j: usize| field.vbar_at(i, j) > level;

    let edge_point = |e: EdgeId| -> (f64, f64) {
        let ((i0, j0), (i1, j1)) = match e {
            EdgeId::AlongEta(i, j) => ((i, j), (i + 1, j)),
            EdgeId::AlongKappa(i, j) => ((i, j), (i, j + 1)),
        };
        let (a, b) = (field.vbar_at(i0, j0), field.vbar_at(i1, j1));
        let t = if b == a {
            0.5
        } else {
            ((level - a) / (b - a)).clamp(0.0, 1.0)
        };
        let (e0, k0) = (g.eta(i0), g.kappa(j0));
        let (e1, k1) = (g.eta(i1), g.kappa(j1));
        (e0 + t * (e1 - e0), k0 + t * (k1 - k0))
    };

    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
    for i in 0..g.n_eta - 1 {
        for j in 0..g.n_kappa - 1 {
            // corners counter-clockwise from (i, j)
            let corners = [
                above(i, j),
                above(i + 1, j),
                above(i + 1, j + 1),
                above(i, j + 1),
            ];
            let edges = [
                EdgeId::AlongEta(i, j),
                EdgeId::AlongKappa(i + 1, j),
                EdgeId::AlongEta(i, j + 1),
                EdgeId::AlongKappa(i, j),
            ];
            let crossed: Vec<usize> = (0..4)
                .filter(|&k| corners[k] != corners[(k + 1) % 4])
                .collect();
            match crossed.len() {
                2 => segments.push((edges[crossed[0]], edges[crossed[1]])),
                4 => {
                    let mean = (field.vbar_at(i, j)
                        + field.vbar_at(i + 1, j)
                        + field.vbar_at(i + 1, j + 1)
                        + field.vbar_at(i, j + 1))
                        / 4.0;
                    if (mean > level) == corners[0] {
                        // corners 0 and 2 joined through the center: cut off 1 and 3
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }
    chain_segments(&segments)
        .into_iter()
        .map(|chain| chain.into_iter().map(edge_point).collect())
        .collect()
}

/// Joins segments sharing an edge into polylines, open chains first, in a
/// deterministic order.
fn chain_segments(segments: &[(EdgeId, EdgeId)]) -> Vec<Vec<EdgeId>> {
    let mut incident: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(k);
        incident.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();

    let walk = |start_edge: EdgeId, first_seg: usize, used: &mut Vec<bool>| -> Vec<EdgeId> {
        let mut chain = vec![start_edge];
        let mut current_edge = start_edge;
        let mut seg = Some(first_seg);
        while let Some(k) = seg {
            used[k] = true;
            let (a, b) = segments[k];
            let next = if a == current_edge { b } else { a };
            chain.push(next);
            current_edge = next;
            seg = incident[&next].iter().copied().find(|&s| !used[s]);
        }
        chain
    };

    let open_ends: Vec<EdgeId> = incident
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(e, _)| *e)
        .collect();
    for e in open_ends {
        let k = incident[&e][0];
        if !used[k] {
            chains.push(walk(e, k, &mut used));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            chains.push(walk(segments[k].0, k, &mut used));
        }
    }
    chains
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SiteKind {
    Separable,
    MaxEntangled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSite {
    pub eta: f64,
    pub kappa: f64,
    /// Locus parameter.
    pub s: f64,
    pub kind: SiteKind,
    pub concurrence: f64,
}

/// Separable and maximally entangled points along a zero-expectation locus.
///
/// The locus is scanned at `resolution` samples per 2π (at least
/// [`MIN_RESOLUTION`]); every discrete local extremum is refined by
/// bisection on the sign of a central-difference derivative down to a
/// bracket of [`SITE_PARAM_TOL`], then kept if its concurrence is within
/// `tol` of 0 or 1.
pub fn lattice_sites(
    family: Family,
    x: f64,
    locus: &Locus,
    resolution: usize,
    tol: f64,
) -> Result<Vec<LatticeSite>> {
    closed_form_concurrence(family, 0.0, 0.0, 0.0)?;
    if !x.is_finite() {
        return Err(Error::NonFinite("x"));
    }
    let conc = |s: f64| {
        let (eta, kappa) = locus.point(s);
        closed_form_concurrence(family, eta, kappa, x).expect("family checked")
    };
    let resolution = resolution.max(MIN_RESOLUTION);
    let len = locus.length();
    let n = ((resolution as f64 * len / TAU).ceil() as usize).max(2) + 1;
    let ds = len / (n - 1) as f64;
    let s_at = |k: usize| {
        if k + 1 == n {
            locus.end
        } else {
            locus.start + k as f64 * ds
        }
    };
    let samples: Vec<f64> = (0..n).map(|k| conc(s_at(k))).collect();

    let derivative =
        |s: f64| (conc(s + DERIVATIVE_STEP) - conc(s - DERIVATIVE_STEP)) / (2.0 * DERIVATIVE_STEP);
    let refine = |lo: f64, hi: f64, minimum: bool| -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > SITE_PARAM_TOL {
            let mid = 0.5 * (lo + hi);
            let d = derivative(mid);
            let descending = if minimum { d < 0.0 } else { d > 0.0 };
            if descending {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).clamp(locus.start, locus.end)
    };

    let mut sites: Vec<LatticeSite> = Vec::new();
    for k in 0..n {
        let v = samples[k];
        let left = (k > 0).then(|| samples[k - 1]);
        let right = (k + 1 < n).then(|| samples[k + 1]);
        let neighbours = [left, right];
        let is_min = neighbours.iter().flatten().all(|&u| v <= u)
            && neighbours.iter().flatten().any(|&u| v < u);
        let is_max = neighbours.iter().flatten().all(|&u| v >= u)
            && neighbours.iter().flatten().any(|&u| v > u);
        if !is_min && !is_max {
            continue;
        }
        let lo = s_at(k.saturating_sub(1));
        let hi = s_at((k + 1).min(n - 1));
        let s = refine(lo, hi, is_min);
        let value = conc(s);
        let kind = if is_min && value <= tol {
            SiteKind::Separable
        } else if is_max && value >= 1.0 - tol {
            SiteKind::MaxEntangled
        } else {
            continue;
        };
        if let Some(prev) = sites.last() {
            if prev.kind == kind && (prev.s - s).abs() <= ds {
                continue;
            }
        }
        let (eta, kappa) = locus.point(s);
        sites.push(LatticeSite {
            eta,
            kappa,
            s,
            kind,
            concurrence: value,
        });
    }
    Ok(sites)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlternationReport {
    pub pass: bool,
    /// No maximally entangled site exists, so there is nothing to alternate.
    pub vacuous: bool,
    pub n_separable: usize,
    pub n_maximal: usize,
    /// Indices (in locus order) of the first consecutive pair of equal kind.
    pub violation: Option<(usize, usize)>,
}

/// Checks that consecutive sites along one locus differ in kind.
pub fn alternation_check(sites: &[LatticeSite]) -> AlternationReport {
    let mut ordered: Vec<&LatticeSite> = sites.iter().collect();
    ordered.sort_by(|a, b| a.s.total_cmp(&b.s));
    let n_maximal = ordered
        .iter()
        .filter(|s| s.kind == SiteKind::MaxEntangled)
        .count();
    let n_separable = ordered.len() - n_maximal;
    if n_maximal == 0 {
        return AlternationReport {
            pass: true,
            vacuous: true,
            n_separable,
            n_maximal,
            violation: None,
        };
    }
    let violation = ordered
        .windows(2)
        .position(|w| w[0].kind == w[1].kind)
        .map(|k| (k, k + 1));
    AlternationReport {
        pass: violation.is_none(),
        vacuous: false,
        n_separable,
        n_maximal,
        violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn small_grid(n: usize) -> Grid {
        Grid {
            n_eta: n,
            n_kappa: n,
            ..Grid::default()
        }
    }

    #[test]
    fn grid_parsing_and_validation() {
        let g: Grid = "-1,1,-2,2,3,5".parse().unwrap();
        assert_eq!(g.n_eta, 3);
        assert_eq!(g.kappa(4), 2.0);
        assert_eq!(g.eta(1), 0.0);
        assert!("-1,1,-2,2,1,5".parse::<Grid>().is_err());
        assert!("1,1,-2,2,3,5".parse::<Grid>().is_err());
        assert!("1,1,-2,2,3".parse::<Grid>().is_err());
        let d = Grid::default();
        assert_eq!(d.eta(100), 0.0);
        assert!((d.eta(150) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn flip_sweep_maximum() {
        let field = sweep(Family::GeneralFlip, FRAC_PI_4, 1.0, &Grid::default()).unwrap();
        assert!((field.max_value() - 1.0).abs() < 1e-12);
        for (i, j) in [(50, 50), (50, 150), (150, 50), (150, 150)] {
            assert!((field.value(i, j) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diag_sweep_at_zero_phase() {
        let field = sweep(Family::GeneralDiag, 0.0, 1.0, &small_grid(21)).unwrap();
        assert!(field.values.iter().all(|&v| v == 0.0));
        assert!(sweep(Family::Case1Diag, 0.0, 1.0, &small_grid(21)).is_err());
        let bad = Grid {
            n_eta: 1,
            ..Grid::default()
        };
        assert!(matches!(
            sweep(Family::GeneralDiag, 0.0, 1.0, &bad),
            Err(Error::DegenerateGrid(_))
        ));
    }

    #[test]
    fn flip_field_symmetries() {
        let field = sweep(Family::GeneralFlip, 0.6, 1.0, &Grid::default()).unwrap();
        let n = field.grid.n_eta;
        for i in 0..n {
            for j in 0..n {
                assert!((field.value(i, j) - field.value(j, i)).abs() <= 1e-12);
                assert!((field.value(i, j) - field.value(n - 1 - i, j)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn loci_counts() {
        let w = Grid::default();
        let d = zero_loci(Family::GeneralDiag, &w).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].point(0.3), (-1.0, 0.3));
        assert_eq!(d[1].point(0.3), (0.3, -1.0));
        let f = zero_loci(Family::GeneralFlip, &w).unwrap();
        assert_eq!(f.len(), 4);
        for locus in f.iter().chain(&d) {
            let family = if f.contains(locus) {
                Family::GeneralFlip
            } else {
                Family::GeneralDiag
            };
            for k in 0..=20 {
                let s = locus.start + locus.length() * k as f64 / 20.0;
                let (eta, kappa) = locus.point(s);
                assert!(vbar_contour(family, eta, kappa, 1.0).unwrap().abs() <= 1e-12);
            }
        }
        assert!(zero_loci(Family::MixedPulse, &w).is_err());
        let wide = Grid::new(-7.0, 7.0, -1.0, 1.0, 3, 3).unwrap();
        assert_eq!(zero_loci(Family::GeneralFlip, &wide).unwrap().len(), 4);
    }

    #[test]
    fn constant_field_has_no_contours() {
        let field = sweep(Family::GeneralFlip, 0.5, 0.0, &small_grid(11)).unwrap();
        assert!(contour_numeric(&field, 0.3).is_empty());
        assert!(contour_numeric(&field, -0.3).is_empty());
    }

    #[test]
    fn diag_zero_contour_near_analytic_lines() {
        let field = sweep(Family::GeneralDiag, FRAC_PI_4, 1.0, &Grid::default()).unwrap();
        let lines = contour_numeric(&field, 0.0);
        assert!(!lines.is_empty());
        let cell = field.grid.d_eta().max(field.grid.d_kappa());
        let mut near_eta = false;
        let mut near_kappa = false;
        for line in &lines {
            for &(eta, kappa) in line {
                let de = (eta + 1.0).abs();
                let dk = (kappa + 1.0).abs();
                assert!(de.min(dk) <= cell, "({eta}, {kappa}) off both loci");
                near_eta |= de <= cell;
                near_kappa |= dk <= cell;
            }
        }
        assert!(near_eta && near_kappa);
    }

    #[test]
    fn flip_contour_closed_around_origin() {
        let v0 = 1.0;
        let field = sweep(Family::GeneralFlip, FRAC_PI_4, v0, &Grid::default()).unwrap();
        let lines = contour_numeric(&field, -0.5 * v0);
        let around_origin: Vec<&Polyline> = lines
            .iter()
            .filter(|l| l.iter().all(|&(e, k)| e.abs() < 2.0 && k.abs() < 2.0))
            .collect();
        assert_eq!(around_origin.len(), 1);
        let ring = around_origin[0];
        assert_eq!(ring.first(), ring.last(), "curve must close");
        for &(eta, kappa) in ring {
            assert!((eta.cos() * kappa.cos() - 0.5).abs() < 2e-3);
        }
        // winding: points on every side of the origin
        assert!(ring.iter().any(|p| p.0 > 0.9) && ring.iter().any(|p| p.0 < -0.9));
        assert!(ring.iter().any(|p| p.1 > 0.9) && ring.iter().any(|p| p.1 < -0.9));
    }

    #[test]
    fn diag_sites_on_eta_locus() {
        let x = FRAC_PI_4;
        let locus = zero_loci(Family::GeneralDiag, &Grid::default()).unwrap()[0];
        let sites = lattice_sites(Family::GeneralDiag, x, &locus, 1000, SITE_TOL).unwrap();
        assert!(!sites.is_empty());
        for site in &sites {
            // C = |sin(x (1 - κ))|
            let phase = x * (1.0 - site.kappa);
            let n = phase / FRAC_PI_2;
            match site.kind {
                SiteKind::Separable => assert!((n - (n / 2.0).round() * 2.0).abs() < 1e-8),
                SiteKind::MaxEntangled => {
                    assert!(((n - 1.0) / 2.0 - ((n - 1.0) / 2.0).round()).abs() < 1e-8)
                }
            }
        }
        assert!(alternation_check(&sites).pass);
    }

    #[test]
    fn flip_sites_on_eta_locus() {
        let locus = Locus {
            fixed: Axis::Eta,
            value: FRAC_PI_2,
            start: -PI,
            end: PI,
        };
        let sites = lattice_sites(Family::GeneralFlip, FRAC_PI_4, &locus, 1000, SITE_TOL).unwrap();
        let expect = [
            (-PI, SiteKind::Separable),
            (-FRAC_PI_2, SiteKind::MaxEntangled),
            (0.0, SiteKind::Separable),
            (FRAC_PI_2, SiteKind::MaxEntangled),
            (PI, SiteKind::Separable),
        ];
        assert_eq!(sites.len(), expect.len(), "{sites:?}");
        for (site, (s, kind)) in sites.iter().zip(expect) {
            assert_eq!(site.kind, kind);
            assert!((site.s - s).abs() < 1e-8, "{} vs {s}", site.s);
        }
        let report = alternation_check(&sites);
        assert!(report.pass && !report.vacuous);
        assert_eq!((report.n_separable, report.n_maximal), (3, 2));
    }

    #[test]
    fn zero_phase_has_no_maximal_sites() {
        for family in [Family::GeneralDiag, Family::GeneralFlip] {
            for locus in zero_loci(family, &Grid::default()).unwrap() {
                let sites = lattice_sites(family, 0.0, &locus, 1000, SITE_TOL).unwrap();
                assert!(sites.iter().all(|s| s.kind != SiteKind::MaxEntangled));
                assert!(alternation_check(&sites).vacuous);
            }
        }
    }

    #[test]
    fn alternation_edge_cases() {
        let site = |s: f64, kind| LatticeSite {
            eta: 0.0,
            kappa: s,
            s,
            kind,
            concurrence: 0.0,
        };
        let single = [site(0.0, SiteKind::MaxEntangled)];
        let r = alternation_check(&single);
        assert!(r.pass && !r.vacuous);
        assert!(alternation_check(&[]).pass);

        let bad = [
            site(0.0, SiteKind::Separable),
            site(1.0, SiteKind::MaxEntangled),
            site(2.0, SiteKind::MaxEntangled),
        ];
        let r = alternation_check(&bad);
        assert!(!r.pass);
        assert_eq!(r.violation, Some((1, 2)));
    }
}
