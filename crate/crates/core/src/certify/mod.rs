//! Observability certificates: a certified lower bound from the classical
//! geometry and the transport estimates, compared with the mass actually
//! observed in a simulation.

mod constants;

pub use constants::{
    constant_c_tl, constant_d, ctl_bound_at_l, ctl_bound_at_l_alt, ctl_objective, delta_min, delta_min_for_state,
    l0_root, ln_ctl_objective, CtlConstant, DeltaMin,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{trace_trajectory, CompactSet, Cutoff, Region};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::phasespace::{husimi_mass, husimi_mass_with, toeplitz_observe, ToeplitzState};
use crate::potential::Potential;
use crate::quantum::{observe, Observation, Tolerances, WaveFunction};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Vacuous,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Pure,
    Toeplitz,
}

/// Components of the numerical tolerance `ε_num`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorBudget {
    /// `|m(dt) − m(2dt)|/3`, the dt² extrapolation of the time-stepping error.
    pub propagation: f64,
    /// Cell-fraction vs nodal quadrature of the observed mass.
    pub spatial: f64,
    /// `C_geo × |mass(h) − mass(2h)|` for the Husimi quadrature of `K`.
    pub husimi_quadrature: f64,
    /// Change of the geometric constant under refinement of the `K` lattice,
    /// times the Husimi mass.
    pub k_refinement: f64,
}

impl ErrorBudget {
    pub fn total(&self) -> f64 {
        self.propagation + self.spatial + self.husimi_quadrature + self.k_refinement
    }
}

/// The three printed sizes of the pure-state correction `c·D·Δ/δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureLowerBounds {
    /// Coefficient `8D` (corollary display); this one is certified.
    pub eight_d: f64,
    /// Coefficient `4D` (composition of the transport estimates).
    pub four_d: f64,
    /// Coefficient `D` (introductory theorem).
    pub one_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub schema_version: u32,
    pub scenario_id: String,
    pub state_kind: StateKind,
    pub dim: usize,
    pub hbar: f64,
    pub horizon: f64,
    pub delta: f64,
    pub lambda: f64,
    pub lip_grad: f64,
    /// `C[T,K,Ω]` as a minimum over the `K` lattice.
    pub c_geo: f64,
    pub c_geo_refined: f64,
    /// `inf_K ∫₀ᵀ χ_δ(X(t)) dt`.
    pub chi_geo: f64,
    pub gc_satisfied: bool,
    pub husimi_mass_k: Option<f64>,
    pub spread: Option<f64>,
    pub d_const: f64,
    pub c_tl: f64,
    pub lower_bound: f64,
    pub pure_lower_bounds: Option<PureLowerBounds>,
    pub measured: f64,
    pub margin: f64,
    pub epsilon_num: f64,
    pub error_budget: ErrorBudget,
    pub verdict: Verdict,
    /// Set when the margin is negative but within `ε_num`.
    pub within_tolerance: bool,
    /// `1/lower_bound` when positive.
    pub c_obs: Option<f64>,
    pub c_obs_t_above_one: Option<bool>,
    /// `ħ/δ² < C_geo²/(2d C_TL²)` (Töplitz case).
    pub admissible: Option<bool>,
    pub left_working_box: bool,
}

impl CertificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One fixed-width summary line.
    pub fn summary_line(&self) -> String {
        format!(
            "{:<16} {:<8} hbar={:<8.4} delta={:<8.4} lower={:>11.4e} measured={:>11.4e} margin={:>11.4e} eps={:>9.2e} {:?}",
            truncate(&self.scenario_id, 16),
            match self.state_kind {
                StateKind::Pure => "pure",
                StateKind::Toeplitz => "toeplitz",
            },
            self.hbar,
            self.delta,
            self.lower_bound,
            self.measured,
            self.margin,
            self.epsilon_num,
            self.verdict
        )
    }
}

fn truncate(s: &str, n: usize) -> String {
    s.chars().take(n).collect()
}

fn verdict(lower: f64, measured: f64, eps: f64) -> (Verdict, bool) {
    let margin = measured - lower;
    if !(lower > 0.0) {
        (Verdict::Vacuous, false)
    } else if margin >= 0.0 {
        (Verdict::Certified, false)
    } else if margin >= -eps {
        (Verdict::Certified, true)
    } else {
        (Verdict::Violated, false)
    }
}

/// Discretisation settings shared by the certificate computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics<T> {
    /// Split-step time step.
    pub dt: T,
    /// Verlet step for the classical flow.
    pub dt_classical: T,
    /// Lattice refinement factor used to estimate the `K` discretisation error.
    pub k_refinement: usize,
    pub tolerances: Tolerances<T>,
}

impl<T: Real> Numerics<T> {
    pub fn new(dt: T, dt_classical: T) -> Self {
        Self {
            dt,
            dt_classical,
            k_refinement: 2,
            tolerances: Tolerances::default(),
        }
    }
}

/// Classical side of a certificate, independent of ħ and of the state.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry<T> {
    pub c_geo: T,
    pub c_geo_refined: T,
    /// One entry per δ: `inf_K ∫ χ_δ(X(t)) dt`.
    pub chi_geo: Vec<T>,
    pub deltas: Vec<T>,
    pub gc_satisfied: bool,
    pub left_working_box: bool,
}

impl<T: Real> Geometry<T> {
    pub fn compute<const D: usize>(
        potential: &Potential<T, D>,
        k: &CompactSet<T, D>,
        omega: &Region<T, D>,
        horizon: T,
        deltas: &[T],
        numerics: &Numerics<T>,
    ) -> Result<Self> {
        for &d in deltas {
            if !(d > T::zero()) {
                return Err(Error::InvalidParameter(format!("δ must be positive, got {d}")));
            }
        }
        let ind = Cutoff::Indicator(omega.clone());
        let tents: Vec<Cutoff<T, D>> = deltas
            .iter()
            .map(|&delta| Cutoff::Tent {
                region: omega.clone(),
                delta,
            })
            .collect();
        let mut cuts: Vec<&Cutoff<T, D>> = vec![&ind];
        cuts.extend(tents.iter());
        let run = |set: &CompactSet<T, D>, cuts: &[&Cutoff<T, D>], hits: bool| {
            set.sample_grid()
                .par_iter()
                .map(|p| {
                    trace_trajectory(
                        potential,
                        *p,
                        horizon,
                        numerics.dt_classical,
                        cuts,
                        if hits { Some(omega) } else { None },
                    )
                })
                .collect::<Result<Vec<_>>>()
        };
        let stats = run(k, &cuts, true)?;
        let min_of = |i: usize, s: &[crate::classical::TrajectoryStats<T>]| {
            s.iter().map(|t| t.occupations[i]).fold(T::infinity(), T::min)
        };
        let c_geo = min_of(0, &stats);
        let chi_geo = (0..deltas.len()).map(|i| min_of(i + 1, &stats)).collect();
        let gc_satisfied = stats.iter().all(|s| matches!(s.first_hit, Some(t) if t < horizon));
        let fine = run(&k.refined(numerics.k_refinement), &[&ind], false)?;
        let c_geo_refined = min_of(0, &fine);
        Ok(Self {
            c_geo,
            c_geo_refined,
            chi_geo,
            deltas: deltas.to_vec(),
            gc_satisfied,
            left_working_box: stats.iter().chain(&fine).any(|s| s.left_working_box),
        })
    }
}

fn observe_twice<F>(run: F, dt: f64) -> Result<(Observation<f64>, Observation<f64>)>
where
    F: Fn(f64) -> Result<Observation<f64>>,
{
    Ok((run(dt)?, run(2.0 * dt)?))
}

fn neighborhoods<T: Real, const D: usize>(omega: &Region<T, D>, deltas: &[T]) -> Vec<Cutoff<T, D>> {
    deltas
        .iter()
        .map(|&delta| Cutoff::Neighborhood {
            region: omega.clone(),
            delta,
        })
        .collect()
}

/// Pure-state certificates for every δ of `geometry`.
///
/// The certified lower bound is `C_geo·mass_K(ψ) − 8D·Δ(ψ)/δ`; the `4D` and
/// `D` variants are reported alongside. The measured side is the mass on
/// `Ω_δ` over `[0, T]`.
#[allow(clippy::too_many_arguments)]
pub fn certify_pure<const D: usize>(
    scenario_id: &str,
    potential: &Potential<f64, D>,
    k: &CompactSet<f64, D>,
    omega: &Region<f64, D>,
    horizon: f64,
    geometry: &Geometry<f64>,
    psi_in: &WaveFunction<f64, D>,
    numerics: &Numerics<f64>,
) -> Result<Vec<CertificationReport>> {
    let hbar = psi_in.hbar();
    let lip = potential.lip_grad;
    let d_const = constant_d(horizon, lip);
    let c_tl = constant_c_tl(horizon, lip)?.value;
    let spread = psi_in.spread();
    let panel = hbar.sqrt() * 0.5;
    let mass = husimi_mass_with(psi_in, k, panel);
    let mass_coarse = husimi_mass_with(psi_in, k, 2.0 * panel);

    let cuts = neighborhoods(omega, &geometry.deltas);
    let refs: Vec<&Cutoff<f64, D>> = cuts.iter().collect();
    let (fine, coarse) = observe_twice(
        |dt| observe(potential, psi_in, horizon, dt, &refs, numerics.tolerances),
        numerics.dt,
    )?;

    let reports = geometry
        .deltas
        .iter()
        .enumerate()
        .map(|(i, &delta)| {
            let bounds = PureLowerBounds {
                eight_d: geometry.c_geo * mass - 8.0 * d_const * spread / delta,
                four_d: geometry.c_geo * mass - 4.0 * d_const * spread / delta,
                one_d: geometry.c_geo * mass - d_const * spread / delta,
            };
            let measured = fine.masses[i];
            let budget = ErrorBudget {
                propagation: (fine.masses[i] - coarse.masses[i]).abs() / 3.0,
                spatial: (fine.masses[i] - fine.nodal[i]).abs(),
                husimi_quadrature: geometry.c_geo * (mass - mass_coarse).abs(),
                k_refinement: (geometry.c_geo - geometry.c_geo_refined).abs() * mass,
            };
            let lower = bounds.eight_d;
            let eps = budget.total();
            let (v, within) = verdict(lower, measured, eps);
            CertificationReport {
                schema_version: SCHEMA_VERSION,
                scenario_id: scenario_id.to_string(),
                state_kind: StateKind::Pure,
                dim: D,
                hbar,
                horizon,
                delta,
                lambda: 1.0,
                lip_grad: lip,
                c_geo: geometry.c_geo,
                c_geo_refined: geometry.c_geo_refined,
                chi_geo: geometry.chi_geo[i],
                gc_satisfied: geometry.gc_satisfied,
                husimi_mass_k: Some(mass),
                spread: Some(spread),
                d_const,
                c_tl,
                lower_bound: lower,
                pure_lower_bounds: Some(bounds),
                measured,
                margin: measured - lower,
                epsilon_num: eps,
                error_budget: budget,
                verdict: v,
                within_tolerance: within,
                c_obs: (lower > 0.0).then(|| 1.0 / lower),
                c_obs_t_above_one: (lower > 0.0).then(|| horizon / lower > 1.0),
                admissible: None,
                left_working_box: geometry.left_working_box,
            }
        })
        .collect();
    Ok(reports)
}

/// Töplitz-state certificates for every δ of `geometry`:
/// lower bound `C_geo − C(T, L)·√(2dħ)/δ`, measured `∫₀ᵀ trace(1_{Ω_δ} R(t)) dt`.
#[allow(clippy::too_many_arguments)]
pub fn certify_toeplitz<const D: usize>(
    scenario_id: &str,
    potential: &Potential<f64, D>,
    k: &CompactSet<f64, D>,
    omega: &Region<f64, D>,
    horizon: f64,
    geometry: &Geometry<f64>,
    state: &ToeplitzState<f64, D>,
    grid: crate::quantum::Grid<f64, D>,
    numerics: &Numerics<f64>,
) -> Result<Vec<CertificationReport>> {
    state.check_inside(k)?;
    let hbar = state.hbar();
    let lip = potential.lip_grad;
    let d_const = constant_d(horizon, lip);
    let ctl = constant_c_tl(horizon, lip)?;
    let dimf = D as f64;
    let cuts = neighborhoods(omega, &geometry.deltas);
    let refs: Vec<&Cutoff<f64, D>> = cuts.iter().collect();
    let (fine, coarse) = observe_twice(
        |dt| toeplitz_observe(potential, state, grid, horizon, dt, &refs, numerics.tolerances),
        numerics.dt,
    )?;
    let reports = geometry
        .deltas
        .iter()
        .enumerate()
        .map(|(i, &delta)| {
            let lower = geometry.c_geo - ctl.value * (2.0 * dimf * hbar).sqrt() / delta;
            let measured = fine.masses[i];
            let budget = ErrorBudget {
                propagation: (fine.masses[i] - coarse.masses[i]).abs() / 3.0,
                spatial: (fine.masses[i] - fine.nodal[i]).abs(),
                husimi_quadrature: 0.0,
                k_refinement: (geometry.c_geo - geometry.c_geo_refined).abs(),
            };
            let eps = budget.total();
            let (v, within) = verdict(lower, measured, eps);
            let admissible = hbar / (delta * delta) < geometry.c_geo.powi(2) / (2.0 * dimf * ctl.value.powi(2));
            CertificationReport {
                schema_version: SCHEMA_VERSION,
                scenario_id: scenario_id.to_string(),
                state_kind: StateKind::Toeplitz,
                dim: D,
                hbar,
                horizon,
                delta,
                lambda: ctl.argmin,
                lip_grad: lip,
                c_geo: geometry.c_geo,
                c_geo_refined: geometry.c_geo_refined,
                chi_geo: geometry.chi_geo[i],
                gc_satisfied: geometry.gc_satisfied,
                husimi_mass_k: None,
                spread: None,
                d_const,
                c_tl: ctl.value,
                lower_bound: lower,
                pure_lower_bounds: None,
                measured,
                margin: measured - lower,
                epsilon_num: eps,
                error_budget: budget,
                verdict: v,
                within_tolerance: within,
                c_obs: (lower > 0.0).then(|| 1.0 / lower),
                c_obs_t_above_one: (lower > 0.0).then(|| horizon / lower > 1.0),
                admissible: Some(admissible),
                left_working_box: geometry.left_working_box,
            }
        })
        .collect();
    Ok(reports)
}

/// `E[ψ, δ] = C[T,K,Ω]·mass_K(ψ) − D·Δ(ψ)/δ` and whether it reaches `1/C_obs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservabilityFunctional {
    pub value: f64,
    pub c_geo: f64,
    pub husimi_mass_k: f64,
    pub spread: f64,
    pub d_const: f64,
    pub reaches_inverse_c_obs: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn observability_functional<const D: usize>(
    potential: &Potential<f64, D>,
    k: &CompactSet<f64, D>,
    omega: &Region<f64, D>,
    horizon: f64,
    delta: f64,
    c_obs: f64,
    psi_in: &WaveFunction<f64, D>,
    dt_classical: f64,
) -> Result<ObservabilityFunctional> {
    if !(delta > 0.0) || !(c_obs > 0.0) {
        return Err(Error::InvalidParameter("δ and C_obs must be positive".into()));
    }
    let c_geo = crate::classical::geometric_constant(
        potential,
        k,
        &Cutoff::Indicator(omega.clone()),
        horizon,
        dt_classical,
    )?
    .value;
    let mass = husimi_mass(psi_in, k);
    let spread = psi_in.spread();
    let d_const = constant_d(horizon, potential.lip_grad);
    let value = c_geo * mass - d_const * spread / delta;
    Ok(ObservabilityFunctional {
        value,
        c_geo,
        husimi_mass_k: mass,
        spread,
        d_const,
        reaches_inverse_c_obs: value >= 1.0 / c_obs,
    })
}

/// Rows of the `(ħ, δ)` sweep table, sorted by `(ħ, δ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scenario_id: String,
    pub hbar: f64,
    pub delta: f64,
    pub lower_bound: f64,
    pub measured: f64,
    pub margin: f64,
    pub epsilon_num: f64,
    pub verdict: Verdict,
}

pub fn sweep_table(reports: &[CertificationReport]) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = reports
        .iter()
        .map(|r| SweepRow {
            scenario_id: r.scenario_id.clone(),
            hbar: r.hbar,
            delta: r.delta,
            lower_bound: r.lower_bound,
            measured: r.measured,
            margin: r.margin,
            epsilon_num: r.epsilon_num,
            verdict: r.verdict,
        })
        .collect();
    rows.sort_by(|a, b| {
        a.hbar
            .total_cmp(&b.hbar)
            .then(a.delta.total_cmp(&b.delta))
            .then(a.scenario_id.cmp(&b.scenario_id))
    });
    rows
}

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{PhaseBox, PhasePoint};
    use crate::potential::Aabb;
    use crate::quantum::Grid;

    fn free_setup() -> (Potential<f64, 1>, CompactSet<f64, 1>, Region<f64, 1>) {
        let v = Potential::free(Aabb::centered(6.0));
        let k = CompactSet::single(PhaseBox::around(&PhasePoint::new([0.0], [1.0]), 0.5, 0.25), 0.05).unwrap();
        let omega = Region::open_box([1.0], [4.0]);
        (v, k, omega)
    }

    #[test]
    fn free_coherent_state_is_certified() {
        let (v, k, omega) = free_setup();
        let num = Numerics::new(0.01, 0.005);
        let deltas = [0.5, 1.0, 2.0, 4.0];
        let geo = Geometry::compute(&v, &k, &omega, 3.0, &deltas, &num).unwrap();
        assert!(geo.gc_satisfied && geo.c_geo > 0.5);
        let grid = Grid::new(2048, 16.0).unwrap();
        let psi = WaveFunction::coherent(grid, 0.01, [0.0], [1.0]).unwrap();
        let reps = certify_pure("free", &v, &k, &omega, 3.0, &geo, &psi, &num).unwrap();
        assert!(reps.iter().all(|r| r.verdict != Verdict::Violated));
        let last = reps.last().unwrap();
        assert_eq!(last.verdict, Verdict::Certified, "{last:?}");
        assert!(last.margin > 0.0);
        for w in reps.windows(2) {
            assert!(w[1].lower_bound >= w[0].lower_bound);
            assert!(w[1].measured >= w[0].measured - 1e-12);
        }
        let b = last.pure_lower_bounds.unwrap();
        assert!(b.eight_d <= b.four_d && b.four_d <= b.one_d);
        let json = last.to_json().unwrap();
        assert!(json.contains("\"schema_version\": 1"));
    }

    #[test]
    fn state_outside_k_is_vacuous() {
        let (v, k, omega) = free_setup();
        let num = Numerics::new(0.01, 0.005);
        let geo = Geometry::compute(&v, &k, &omega, 3.0, &[1.0], &num).unwrap();
        let grid = Grid::new(2048, 16.0).unwrap();
        let psi = WaveFunction::coherent(grid, 0.01, [-2.0], [-1.0]).unwrap();
        let r = &certify_pure("out", &v, &k, &omega, 3.0, &geo, &psi, &num).unwrap()[0];
        assert!(r.husimi_mass_k.unwrap() < 1e-12);
        assert_eq!(r.verdict, Verdict::Vacuous);
        assert!(r.c_obs.is_none());
    }

    #[test]
    fn toeplitz_single_atom_is_certified() {
        let (v, k, omega) = free_setup();
        let num = Numerics::new(0.01, 0.005);
        let deltas = [1.0, 1e9];
        let geo = Geometry::compute(&v, &k, &omega, 3.0, &deltas, &num).unwrap();
        let state = ToeplitzState::from_density(
            vec![crate::phasespace::Atom { q: [0.0], p: [1.0], weight: 1.0 }],
            0.005,
        )
        .unwrap();
        let grid = Grid::new(4096, 16.0).unwrap();
        let reps = certify_toeplitz("tz", &v, &k, &omega, 3.0, &geo, &state, grid, &num).unwrap();
        assert_eq!(reps[0].verdict, Verdict::Certified, "{:?}", reps[0]);
        assert_eq!(reps[0].admissible, Some(true));
        assert!((reps[1].lower_bound - geo.c_geo).abs() < 1e-6);
        let outside = ToeplitzState::from_density(
            vec![crate::phasespace::Atom { q: [3.0], p: [1.0], weight: 1.0 }],
            0.01,
        )
        .unwrap();
        assert!(matches!(
            certify_toeplitz("tz", &v, &k, &omega, 3.0, &geo, &outside, grid, &num),
            Err(Error::AtomOutsideSet(_))
        ));
    }

    #[test]
    fn observability_functional_limits() {
        let (v, k, omega) = free_setup();
        let grid = Grid::new(2048, 16.0).unwrap();
        let psi = WaveFunction::coherent(grid, 0.01, [0.0], [1.0]).unwrap();
        let e = observability_functional(&v, &k, &omega, 3.0, 1e12, 3.0, &psi, 0.005).unwrap();
        assert!((e.value - e.c_geo * e.husimi_mass_k).abs() < 1e-9);
        assert!(e.value > 0.0);
        let away = WaveFunction::coherent(grid, 0.01, [-3.0], [-1.0]).unwrap();
        let e = observability_functional(&v, &k, &omega, 3.0, 1e6, 3.0, &away, 0.005).unwrap();
        assert!(e.value < 0.0);
    }

    #[test]
    fn sweep_rows_are_sorted() {
        let mk = |h: f64, d: f64| CertificationReport {
            schema_version: 1,
            scenario_id: "s".into(),
            state_kind: StateKind::Pure,
            dim: 1,
            hbar: h,
            horizon: 1.0,
            delta: d,
            lambda: 1.0,
            lip_grad: 0.0,
            c_geo: 1.0,
            c_geo_refined: 1.0,
            chi_geo: 1.0,
            gc_satisfied: true,
            husimi_mass_k: None,
            spread: None,
            d_const: 0.0,
            c_tl: 0.0,
            lower_bound: 0.0,
            pure_lower_bounds: None,
            measured: 0.0,
            margin: 0.0,
            epsilon_num: 0.0,
            error_budget: ErrorBudget::default(),
            verdict: Verdict::Vacuous,
            within_tolerance: false,
            c_obs: None,
            c_obs_t_above_one: None,
            admissible: None,
            left_working_box: false,
        };
        let rows = sweep_table(&[mk(0.2, 1.0), mk(0.05, 2.0), mk(0.05, 0.5)]);
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.hbar, r.delta)).collect();
        assert_eq!(keys, vec![(0.05, 0.5), (0.05, 2.0), (0.2, 1.0)]);
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("scenario_id,hbar,delta,"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn verdict_classes(lower in -2.0..2.0f64, measured in 0.0..2.0f64, eps in 0.0..0.1f64) {
                let (v, tol) = verdict(lower, measured, eps);
                let margin = measured - lower;
                prop_assert_eq!(v == Verdict::Vacuous, lower <= 0.0);
                match v {
                    Verdict::Certified => {
                        prop_assert!(lower > 0.0 && margin >= -eps);
                        prop_assert_eq!(tol, margin < 0.0);
                    }
                    Verdict::Violated => prop_assert!(margin < -eps),
                    Verdict::Vacuous => prop_assert!(!tol),
                }
            }

            #[test]
            fn ctl_never_above_lambda_l(t in 0.05..4.0f64, lip in 0.05..3.0f64) {
                let c = constant_c_tl(t, lip).unwrap();
                prop_assert!(c.value <= ctl_bound_at_l(t, lip) * (1.0 + 1e-12));
                let (a, b) = (ctl_bound_at_l(t, lip), ctl_bound_at_l_alt(t, lip));
                prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            }
        }
    }
}
