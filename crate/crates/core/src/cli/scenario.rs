//! JSON scenario files and their conversion into typed, validated objects.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::certify::Numerics;
use crate::classical::{CompactSet, PhaseBox, Region};
use crate::error::{Error, Result};
use crate::phasespace::{atomize_uniform, Atom, Axis, PhaseGrid, ToeplitzState};
use crate::potential::{Aabb, Potential, PotentialKind};
use crate::quantum::{Grid, Packet, WaveFunction};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub dim: usize,
    pub potential: PotentialKind<f64>,
    /// Box on which `Lip(∇V)` is evaluated.
    pub working_box: BoxSpec,
    /// Overrides the computed Lipschitz constant of `∇V`.
    #[serde(default)]
    pub lip_grad: Option<f64>,
    pub k: KSpec,
    pub omega: RegionSpec,
    pub horizon: f64,
    pub deltas: Vec<f64>,
    pub hbars: Vec<f64>,
    pub numerics: NumericsSpec,
    pub state: StateSpec,
    /// Observation constant used by the `constants` subcommand.
    #[serde(default)]
    pub c_obs: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseBoxSpec {
    pub x: BoxSpec,
    pub xi: BoxSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KSpec {
    pub boxes: Vec<PhaseBoxSpec>,
    pub spacing: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Box(BoxSpec),
    Ball { center: Vec<f64>, radius: f64 },
    Union(Vec<RegionSpec>),
}

fn default_dt() -> f64 {
    5e-3
}

fn default_snapshots() -> usize {
    5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSpec {
    /// Points per axis; chosen from ħ and the momenta in `K` when absent.
    #[serde(default)]
    pub n: Option<usize>,
    pub box_length: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Defaults to `dt`.
    #[serde(default)]
    pub dt_classical: Option<f64>,
    #[serde(default)]
    pub phase_grid: Option<PhaseGridSpec>,
    /// Atoms per phase axis per box for `toeplitz_uniform`.
    #[serde(default)]
    pub atom_lattice: Option<usize>,
    /// Number of density slices written by `propagate` (endpoints included).
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
}

/// Isotropic phase grid: the same axis for every position coordinate and
/// every momentum coordinate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseGridSpec {
    pub x: [f64; 2],
    pub xi: [f64; 2],
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    #[serde(default = "one")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub sigma: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Coherent { q: Vec<f64>, p: Vec<f64> },
    Gaussian { q: Vec<f64>, p: Vec<f64>, sigma: f64 },
    Superposition { packets: Vec<PacketSpec> },
    Toeplitz { atoms: Vec<AtomSpec> },
    ToeplitzUniform,
}

impl StateSpec {
    pub fn is_pure(&self) -> bool {
        matches!(
            self,
            StateSpec::Coherent { .. } | StateSpec::Gaussian { .. } | StateSpec::Superposition { .. }
        )
    }
}

/// Parses a scenario and reports serde errors with their line and column.
pub fn parse(text: &str) -> Result<Scenario> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
}

fn arr<const D: usize>(v: &[f64], field: &str) -> Result<[f64; D]> {
    if v.len() != D {
        return Err(Error::Config(format!("{field}: expected {D} coordinates, found {}", v.len())));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{field}: non-finite coordinate {x}")));
    }
    Ok(std::array::from_fn(|i| v[i]))
}

fn aabb<const D: usize>(b: &BoxSpec, field: &str) -> Result<Aabb<f64, D>> {
    let lo = arr::<D>(&b.lo, &format!("{field}.lo"))?;
    let hi = arr::<D>(&b.hi, &format!("{field}.hi"))?;
    Aabb::new(lo, hi).map_err(|e| Error::Config(format!("{field}: {e}")))
}

fn region<const D: usize>(r: &RegionSpec, field: &str) -> Result<Region<f64, D>> {
    Ok(match r {
        RegionSpec::Box(b) => Region::Box(aabb(b, field)?),
        RegionSpec::Ball { center, radius } => {
            if !(*radius > 0.0) {
                return Err(Error::Config(format!("{field}.radius must be positive")));
            }
            Region::Ball {
                center: arr(center, &format!("{field}.center"))?,
                radius: *radius,
            }
        }
        RegionSpec::Union(parts) => {
            if parts.is_empty() {
                return Err(Error::Config(format!("{field}: empty union")));
            }
            Region::Union(
                parts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| region(p, &format!("{field}.union[{i}]")))
                    .collect::<Result<_>>()?,
            )
        }
    })
}

fn positive(x: f64, field: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{field} must be positive and finite, got {x}")))
    }
}

/// A scenario after validation, with fixed dimension.
#[derive(Debug, Clone)]
pub struct Resolved<const D: usize> {
    pub id: String,
    pub potential: Potential<f64, D>,
    pub k: CompactSet<f64, D>,
    pub omega: Region<f64, D>,
    pub horizon: f64,
    pub deltas: Vec<f64>,
    pub hbars: Vec<f64>,
    pub numerics: Numerics<f64>,
    pub scenario: Scenario,
}

impl<const D: usize> Resolved<D> {
    pub fn new(s: &Scenario) -> Result<Self> {
        if s.dim != D {
            return Err(Error::DimensionMismatch {
                expected: D,
                found: s.dim,
            });
        }
        if s.id.is_empty() {
            return Err(Error::Config("id must not be empty".into()));
        }
        positive(s.horizon, "horizon")?;
        if s.deltas.is_empty() || s.hbars.is_empty() {
            return Err(Error::Config("deltas and hbars must be nonempty".into()));
        }
        for (i, d) in s.deltas.iter().enumerate() {
            positive(*d, &format!("deltas[{i}]"))?;
        }
        for (i, h) in s.hbars.iter().enumerate() {
            positive(*h, &format!("hbars[{i}]"))?;
        }
        match s.potential {
            PotentialKind::Free => {}
            PotentialKind::Harmonic { stiffness: c } | PotentialKind::DoubleWell { scale: c } => {
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::Config(format!("potential coefficient must be nonnegative, got {c}")));
                }
            }
        }
        let mut potential = Potential::new(s.potential, aabb(&s.working_box, "working_box")?);
        if let Some(l) = s.lip_grad {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::Config(format!("lip_grad must be nonnegative, got {l}")));
            }
            potential.lip_grad = l;
        }
        positive(s.k.spacing, "k.spacing")?;
        let boxes = s
            .k
            .boxes
            .iter()
            .enumerate()
            .map(|(i, b)| {
                Ok(PhaseBox::new(
                    aabb(&b.x, &format!("k.boxes[{i}].x"))?,
                    aabb(&b.xi, &format!("k.boxes[{i}].xi"))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let k = CompactSet::new(boxes, s.k.spacing).map_err(|e| Error::Config(format!("k: {e}")))?;
        let omega = region(&s.omega, "omega")?;
        let nm = &s.numerics;
        positive(nm.box_length, "numerics.box_length")?;
        positive(nm.dt, "numerics.dt")?;
        if let Some(n) = nm.n {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::Config(format!("numerics.n must be a power of two, got {n}")));
            }
        }
        let dt_classical = nm.dt_classical.unwrap_or(nm.dt);
        positive(dt_classical, "numerics.dt_classical")?;
        if let Some(pg) = &nm.phase_grid {
            if pg.count < 2 || !(pg.x[1] > pg.x[0]) || !(pg.xi[1] > pg.xi[0]) {
                return Err(Error::Config("numerics.phase_grid needs count ≥ 2 and increasing ranges".into()));
            }
        }
        if nm.snapshots < 2 {
            return Err(Error::Config("numerics.snapshots must be at least 2".into()));
        }
        if let Some(c) = s.c_obs {
            positive(c, "c_obs")?;
        }
        let r = Self {
            id: s.id.clone(),
            potential,
            k,
            omega,
            horizon: s.horizon,
            deltas: s.deltas.clone(),
            hbars: s.hbars.clone(),
            numerics: Numerics::new(nm.dt, dt_classical),
            scenario: s.clone(),
        };
        r.validate_state()?;
        Ok(r)
    }

    fn validate_state(&self) -> Result<()> {
        match &self.scenario.state {
            StateSpec::Coherent { q, p } => {
                arr::<D>(q, "state.q")?;
                arr::<D>(p, "state.p")?;
            }
            StateSpec::Gaussian { q, p, sigma } => {
                arr::<D>(q, "state.q")?;
                arr::<D>(p, "state.p")?;
                positive(*sigma, "state.sigma")?;
            }
            StateSpec::Superposition { packets } => {
                if packets.is_empty() {
                    return Err(Error::Config("state.packets must be nonempty".into()));
                }
                for (i, pk) in packets.iter().enumerate() {
                    arr::<D>(&pk.q, &format!("state.packets[{i}].q"))?;
                    arr::<D>(&pk.p, &format!("state.packets[{i}].p"))?;
                    positive(pk.sigma, &format!("state.packets[{i}].sigma"))?;
                }
            }
            StateSpec::Toeplitz { atoms } => {
                // weights are checked here with the first ħ; the state itself
                // is rebuilt per ħ
                self.toeplitz(self.hbars[0]).map_err(|e| Error::Config(format!("state.atoms: {e}")))?;
                if atoms.is_empty() {
                    return Err(Error::Config("state.atoms must be nonempty".into()));
                }
            }
            StateSpec::ToeplitzUniform => {
                if self.scenario.numerics.atom_lattice.unwrap_or(0) == 0 {
                    return Err(Error::Config("toeplitz_uniform needs numerics.atom_lattice ≥ 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Largest momentum coordinate the state or `K` carries.
    fn p_max(&self) -> f64 {
        let mut m = 0.0_f64;
        for b in self.k.boxes() {
            for i in 0..D {
                m = m.max(b.xi.lo[i].abs()).max(b.xi.hi[i].abs());
            }
        }
        let mut see = |p: &[f64]| p.iter().for_each(|v| m = m.max(v.abs()));
        match &self.scenario.state {
            StateSpec::Coherent { p, .. } | StateSpec::Gaussian { p, .. } => see(p),
            StateSpec::Superposition { packets } => packets.iter().for_each(|pk| see(&pk.p)),
            StateSpec::Toeplitz { atoms } => atoms.iter().for_each(|a| see(&a.p)),
            StateSpec::ToeplitzUniform => {}
        }
        m
    }

    /// Spatial grid for one ħ. Without an explicit `n` the momentum band
    /// covers `p_max + 10√ħ` with eight points per wavelength.
    pub fn grid(&self, hbar: f64) -> Result<Grid<f64, D>> {
        let len = self.scenario.numerics.box_length;
        let n = match self.scenario.numerics.n {
            Some(n) => n,
            None => Grid::<f64, D>::points_for(len, hbar, self.p_max() + 10.0 * hbar.sqrt()),
        };
        Grid::new(n, len)
    }

    pub fn pure_state(&self, hbar: f64) -> Result<WaveFunction<f64, D>> {
        let grid = self.grid(hbar)?;
        match &self.scenario.state {
            StateSpec::Coherent { q, p } => WaveFunction::coherent(grid, hbar, arr(q, "q")?, arr(p, "p")?),
            StateSpec::Gaussian { q, p, sigma } => {
                WaveFunction::gaussian(grid, hbar, arr(q, "q")?, arr(p, "p")?, *sigma)
            }
            StateSpec::Superposition { packets } => {
                let pk = packets
                    .iter()
                    .map(|s| {
                        Ok(Packet {
                            amplitude: Complex::new(s.re, s.im),
                            q: arr(&s.q, "q")?,
                            p: arr(&s.p, "p")?,
                            sigma: s.sigma,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                WaveFunction::superposition(grid, hbar, &pk)
            }
            _ => Err(Error::Config("state is not a pure state".into())),
        }
    }

    pub fn toeplitz(&self, hbar: f64) -> Result<ToeplitzState<f64, D>> {
        match &self.scenario.state {
            StateSpec::Toeplitz { atoms } => {
                let a = atoms
                    .iter()
                    .map(|s| {
                        Ok(Atom {
                            q: arr(&s.q, "q")?,
                            p: arr(&s.p, "p")?,
                            weight: s.weight,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ToeplitzState::from_density(a, hbar)
            }
            StateSpec::ToeplitzUniform => atomize_uniform(&self.k, self.scenario.numerics.atom_lattice.unwrap_or(1), hbar),
            _ => Err(Error::Config("state is not a Töplitz state".into())),
        }
    }

    /// Phase grid for Husimi output: the configured one, or the bounding box
    /// of `K` padded by `4√ħ` with 64 nodes per axis.
    pub fn phase_grid(&self, hbar: f64) -> Result<PhaseGrid<f64, D>> {
        if let Some(pg) = &self.scenario.numerics.phase_grid {
            return Ok(PhaseGrid::isotropic(
                Axis::span(pg.x[0], pg.x[1], pg.count)?,
                Axis::span(pg.xi[0], pg.xi[1], pg.count)?,
            ));
        }
        let pad = 4.0 * hbar.sqrt();
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for b in self.k.boxes() {
            for i in 0..D {
                lo[0] = lo[0].min(b.x.lo[i]);
                hi[0] = hi[0].max(b.x.hi[i]);
                lo[1] = lo[1].min(b.xi.lo[i]);
                hi[1] = hi[1].max(b.xi.hi[i]);
            }
        }
        Ok(PhaseGrid::isotropic(
            Axis::span(lo[0] - pad, hi[0] + pad, 64)?,
            Axis::span(lo[1] - pad, hi[1] + pad, 64)?,
        ))
    }
}
