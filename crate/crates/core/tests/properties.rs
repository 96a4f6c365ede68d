use proptest::prelude::*;
use qobs::classical::{flow, trace_trajectory, Cutoff, PhasePoint, Region};
use qobs::phasespace::{husimi, Axis, PhaseGrid};
use qobs::potential::{Aabb, Potential};
use qobs::quantum::{propagate, Grid, WaveFunction};

fn potentials() -> impl Strategy<Value = Potential<f64, 1>> {
    prop_oneof![
        Just(Potential::free(Aabb::centered(50.0))),
        (0.2..3.0f64).prop_map(|k| Potential::harmonic(k, Aabb::centered(50.0))),
        (0.005..0.05f64).prop_map(|s| Potential::double_well(s, Aabb::centered(50.0))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gradient_matches_central_difference(v in potentials(), x in -3.0..3.0f64) {
        let h = 1e-4;
        let fd = (v.value(&[x + h]) - v.value(&[x - h])) / (2.0 * h);
        let g = v.gradient(&[x])[0];
        prop_assert!((fd - g).abs() <= 1e-6 * g.abs().max(1.0), "{fd} vs {g}");
    }

    #[test]
    fn verlet_energy_drift_is_small(v in potentials(), x in -2.0..2.0f64, xi in -2.0..2.0f64) {
        let p0 = PhasePoint::new([x], [xi]);
        let e0 = v.energy(&p0.x, &p0.xi);
        let p1 = flow(&v, p0, 5.0, 1e-3).unwrap();
        let e1 = v.energy(&p1.x, &p1.xi);
        prop_assert!((e1 - e0).abs() <= 1e-4 * e0.abs().max(1.0));
    }

    #[test]
    fn occupation_is_bounded_and_ordered(v in potentials(), x in -2.0..2.0f64, xi in -2.0..2.0f64,
                                         lo in -3.0..1.0f64, w in 0.2..2.0f64, delta in 0.05..1.0f64) {
        let omega = Region::open_box([lo], [lo + w]);
        let ind = Cutoff::Indicator(omega.clone());
        let tent = Cutoff::Tent { region: omega.clone(), delta };
        let nb = Cutoff::Neighborhood { region: omega, delta };
        let t = 2.0;
        let s = trace_trajectory(&v, PhasePoint::new([x], [xi]), t, 1e-3, &[&ind, &tent, &nb], None).unwrap();
        let o = &s.occupations;
        for &a in o {
            prop_assert!((-1e-12..=t + 1e-9).contains(&a));
        }
        prop_assert!(o[0] <= o[1] + 1e-6);
        prop_assert!(o[1] <= o[2] + 1e-6);
    }

    #[test]
    fn gaussian_states_respect_uncertainty(q in -1.0..1.0f64, p in -1.0..1.0f64,
                                           sigma_scale in 0.5..2.0f64, hbar in 0.01..0.1f64) {
        let grid = Grid::new(1024, 16.0).unwrap();
        let psi = WaveFunction::gaussian(grid, hbar, [q], [p], sigma_scale * hbar.sqrt()).unwrap();
        let s = psi.spread();
        prop_assert!(s * s >= hbar - 1e-9, "{} < {}", s * s, hbar);
    }

    #[test]
    fn propagation_is_unitary(v in potentials(), q in -1.0..1.0f64, p in -1.0..1.0f64, t in 0.0..1.0f64) {
        let grid = Grid::new(1024, 20.0).unwrap();
        let psi = WaveFunction::coherent(grid, 0.05, [q], [p]).unwrap();
        let out = propagate(&v, &psi, t, 0.01).unwrap();
        prop_assert!((out.norm() - psi.norm()).abs() <= 1e-12);
    }

    #[test]
    fn husimi_is_nonnegative(q1 in -1.0..1.0f64, q2 in -1.0..1.0f64, p in -1.0..1.0f64,
                             re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let hbar: f64 = 0.05;
        let grid = Grid::new(512, 12.0).unwrap();
        let packets = [
            qobs::quantum::Packet { amplitude: num_complex::Complex::new(1.0, 0.0), q: [q1], p: [p], sigma: hbar.sqrt() },
            qobs::quantum::Packet { amplitude: num_complex::Complex::new(re, im), q: [q2], p: [-p], sigma: hbar.sqrt() },
        ];
        prop_assume!(re * re + im * im > 1e-3 || (q1 - q2).abs() > 1e-3);
        let psi = WaveFunction::superposition(grid, hbar, &packets).unwrap();
        let pg = PhaseGrid::isotropic(Axis::span(-2.0, 2.0, 24).unwrap(), Axis::span(-2.0, 2.0, 24).unwrap());
        let h = husimi(&psi, &pg);
        prop_assert!(h.min_value() >= 0.0);
    }
}
