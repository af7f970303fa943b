use neuroquant::constants::{constants, ELEMENTARY_CHARGE as EV, HBAR};
use neuroquant::dicke::*;
use neuroquant::tunneling::*;
use neuroquant::units::{AngularFrequency, Energy, Length, Mass, Temperature};
use proptest::prelude::*;

fn system(n: usize, n_modes: usize, cutoff: usize, g_mev: f64, detune: f64) -> HamiltonianMatrix {
    let eps = Energy::mev(24.8);
    let ens = TwoLevelEnsemble::new(n, eps, 0.0).unwrap();
    let modes = (0..n_modes)
        .map(|k| CavityMode {
            omega: AngularFrequency::from_si(eps.si() * (1.0 + detune * (k as f64 + 1.0)) / HBAR),
            kappa: [0.0, 0.0, k as f64],
            coupling: Energy::mev(g_mev / (k as f64 + 1.0)),
        })
        .collect();
    let modes = CavityModeSet::new(modes, cutoff).unwrap();
    let basis = CollectiveBasis::new(n, n_modes, cutoff).unwrap();
    build_total(&ens, &modes, &basis).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonian_is_hermitian_and_conserves_excitations(
        n in 1usize..6, n_modes in 1usize..3, cutoff in 1usize..5,
        g in 0.0f64..5.0, detune in -0.2f64..0.2,
    ) {
        let h = system(n, n_modes, cutoff, g, detune);
        prop_assert!(h.hermitian_deviation() <= 1e-12 * h.max_norm());
        let n_exc = excitation_operator(h.basis());
        prop_assert!(h.commutator_with_diagonal(&n_exc) < 1e-10);
    }

    #[test]
    fn basis_index_round_trips(n in 1usize..8, n_modes in 1usize..4, cutoff in 1usize..4) {
        let basis = CollectiveBasis::new(n, n_modes, cutoff).unwrap();
        for (i, s) in basis.states().enumerate() {
            prop_assert_eq!(basis.index(&s), i);
            prop_assert_eq!(basis.state(i), s);
        }
    }

    #[test]
    fn rates_are_positive_and_bounded(
        height in 0.05f64..1.0, width_nm in 0.01f64..0.2, e_frac in 0.0f64..0.95, omega in 1e10f64..1e15,
        v_c in 1e6f64..1e15, e_a in 0.0f64..1.0, t in 200.0f64..400.0,
    ) {
        let p = TunnelingProblem::new(
            Particle::Protium.mass(),
            Energy::ev(e_frac * height),
            BarrierPotential::rectangular(height * EV, width_nm * 1e-9).unwrap(),
            Some(omega),
            None,
        ).unwrap();
        let k = wkb_rate(&p).unwrap().si();
        prop_assert!(k > 0.0 && k <= omega);
        let m = ThermalModel::new(v_c, Energy::ev(e_a), Temperature::from_si(t)).unwrap();
        let k = arrhenius_rate(&m).si();
        prop_assert!(k > 0.0 && k <= v_c);
    }

    #[test]
    fn quadrature_matches_rectangular_closed_form(
        height in 0.05f64..1.0, width_nm in 0.01f64..0.3, e_frac in 0.0f64..0.99,
    ) {
        let (h, w, e) = (height * EV, width_nm * 1e-9, e_frac * height * EV);
        let m = Particle::Deuterium.mass();
        let p = TunnelingProblem::new(m, Energy::from_si(e), BarrierPotential::rectangular(h, w).unwrap(), Some(1e13), None)
            .unwrap();
        let exact = rectangular_action(m.si(), h, w, e);
        prop_assert!((wkb_action(&p).unwrap() - exact).abs() <= 1e-8 * exact);
    }

    #[test]
    fn action_grows_with_width_height_and_mass(
        v in 0.1f64..1.0, sigma in 0.01f64..0.1, e_frac in 0.05f64..0.9, grow in 1.01f64..2.0,
    ) {
        let build = |v_ev: f64, s_nm: f64, mass: Mass| {
            let p = TunnelingProblem::new(
                mass,
                Energy::ev(e_frac * 0.1),
                BarrierPotential::gaussian(v_ev * EV, s_nm * 1e-9).unwrap(),
                Some(1e13),
                None,
            ).unwrap();
            wkb_action(&p).unwrap()
        };
        let m = Particle::Protium.mass();
        let base = build(v, sigma, m);
        prop_assert!(build(v, sigma * grow, m) > base);
        prop_assert!(build(v * grow, sigma, m) > base);
        prop_assert!(build(v, sigma, Mass::from_si(m.si() * grow)) > base);
    }

    #[test]
    fn isotope_law_composes(d_nm in 0.01f64..5.0, a in 0usize..4, b in 0usize..4, c in 0usize..4) {
        let ps = [Particle::Electron, Particle::Protium, Particle::Deuterium, Particle::Tritium];
        let (m1, m2, m3) = (ps[a].mass(), ps[b].mass(), ps[c].mass());
        let d = Length::nm(d_nm);
        let via = equal_probability_distance(m2, equal_probability_distance(m1, d, m2).unwrap(), m3).unwrap();
        let direct = equal_probability_distance(m1, d, m3).unwrap();
        prop_assert!((via.si() - direct.si()).abs() <= 4.0 * f64::EPSILON * direct.si());
    }
}

#[test]
fn norm_drift_over_a_thousand_steps() {
    let h = system(3, 1, 4, 2.0, 0.05);
    let psi = QuantumState::fully_excited(h.basis().clone());
    let dt = 1e-15;
    for method in [PropagatorMethod::Eigen, PropagatorMethod::Expm] {
        let tr = evolve_with(&psi, &h, 1000.0 * dt, dt, method).unwrap();
        assert_eq!(tr.times.len(), 1001);
        assert!(tr.max_norm_drift < 1e-9, "{method:?}: {}", tr.max_norm_drift);
    }
}

#[test]
fn single_spin_matches_closed_form_rabi() {
    let g = Energy::mev(1.0);
    let h = system(1, 1, 2, 1.0, 0.0);
    let basis = h.basis().clone();
    let psi = QuantumState::basis_state(basis.clone(), &BasisState { spin_index: 1, photons: vec![0] });
    let period = std::f64::consts::PI * HBAR / g.si();
    let dt = period / 400.0;
    let tr = evolve(&psi, &h, 2.0 * period, dt).unwrap();
    let mut worst = 0.0f64;
    for (t, s) in tr.times.iter().zip(&tr.states) {
        let p = measure(s).fully_excited_population;
        worst = worst.max((p - (g.si() * t / HBAR).cos().powi(2)).abs());
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn constants_are_stable() {
    assert_eq!(constants(), constants());
}
