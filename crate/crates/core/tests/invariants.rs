use std::time::Instant;

use csqpt::bounds::{self, epsilon_from_gamma, gamma_from_epsilon, required_cutoff, scaling_table};
use csqpt::fock::{
    self, coherent_density, coherent_ket, truncation_weight, CoherentAmplitude, DensityMatrix, FockCutoff,
};
use csqpt::io::{generate_synthetic, NoiseSpec};
use csqpt::linalg::hermitian_eigenvalues;
use csqpt::processes::{analytic_tensor, ProcessParams};
use csqpt::tomography::{estimate_phase_invariant, EstimateOptions};
use csqpt::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn hermitian(dim: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        let a = DMatrix::from_fn(dim, dim, |r, c| Complex64::new(v[r * dim + c].0, v[r * dim + c].1));
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    })
}

/// Random mixed state `A A† / Tr`.
fn state(cutoff: FockCutoff) -> impl Strategy<Value = DensityMatrix> {
    let dim = cutoff.dim();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        let a = DMatrix::from_fn(dim, dim, |r, c| Complex64::new(v[r * dim + c].0, v[r * dim + c].1));
        let rho = &a * a.adjoint();
        let tr: f64 = rho.diagonal().iter().map(|z| z.re).sum();
        DensityMatrix::from_hermitian_part(cutoff, &(rho / Complex64::new(tr.max(1e-12), 0.0))).unwrap()
    })
}

fn any_single_mode_process() -> impl Strategy<Value = ProcessParams> {
    prop_oneof![
        Just(ProcessParams::Identity),
        (0.0f64..0.99).prop_map(|eta| ProcessParams::Attenuation { eta }),
        Just(ProcessParams::PhotonAdd),
        Just(ProcessParams::PhotonSub),
        Just(ProcessParams::Cat),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn trace_distance_is_a_metric(a in hermitian(4), b in hermitian(4), c in hermitian(4)) {
        let cut = FockCutoff::single(3);
        let [a, b, c] = [a, b, c].map(|m| DensityMatrix::new(cut, m).unwrap());
        let ab = fock::trace_distance(&a, &b).unwrap();
        let ba = fock::trace_distance(&b, &a).unwrap();
        let bc = fock::trace_distance(&b, &c).unwrap();
        let ac = fock::trace_distance(&a, &c).unwrap();
        prop_assert_eq!(fock::trace_distance(&a, &a).unwrap(), 0.0);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!(ac <= ab + bc + 1e-10);
    }
}

proptest! {
    #[test]
    fn truncation_weight_is_monotone_in_cutoff(re in -3.0f64..3.0, im in -3.0f64..3.0, n in 0usize..30) {
        let alpha = CoherentAmplitude::single(Complex64::new(re, im)).unwrap();
        let lo = truncation_weight(&alpha, FockCutoff::single(n));
        let hi = truncation_weight(&alpha, FockCutoff::single(n + 1));
        prop_assert!(lo <= hi);
        prop_assert!(hi <= 1.0 + 1e-15);
    }

    #[test]
    fn coherent_density_is_ket_outer_product(re in -2.0f64..2.0, im in -2.0f64..2.0, n in 0usize..12) {
        let cut = FockCutoff::single(n);
        let alpha = CoherentAmplitude::single(Complex64::new(re, im)).unwrap();
        let ket = coherent_ket(&alpha, cut).unwrap();
        let rho = coherent_density(&alpha, cut).unwrap();
        let outer = &ket * ket.adjoint();
        prop_assert!((rho.entries() - outer).camax() <= 1e-14);
        prop_assert!(rho.hermiticity_deviation() <= 1e-12);
    }

    #[test]
    fn required_cutoff_is_minimal(energy in 0.1f64..10.0, log_gamma in -6.0f64..-0.5) {
        let gamma = 10f64.powf(log_gamma);
        let n = required_cutoff(energy, 1.0, gamma).unwrap();
        let holds = |n: u64| energy / (n as f64 + 1.5) <= gamma;
        prop_assert!(holds(n));
        prop_assert!(n == 0 || !holds(n - 1));
    }

    #[test]
    fn gamma_round_trips(log_eps in -6.0f64..0.5) {
        let eps = 10f64.powf(log_eps);
        let back = epsilon_from_gamma(gamma_from_epsilon(eps).unwrap()).unwrap();
        prop_assert!((back - eps).abs() <= 1e-12);
    }

    #[test]
    fn epsilon_is_increasing(a in 1e-9f64..0.99, b in 1e-9f64..0.99) {
        prop_assume!(a < b);
        prop_assert!(epsilon_from_gamma(a).unwrap() < epsilon_from_gamma(b).unwrap());
    }

    #[test]
    fn scaled_epsilon_settles(n1 in 10_000u64..1_000_000_000, n2 in 10_000u64..1_000_000_000) {
        let t = scaling_table(1.5, 1.0, &[n1, n2]);
        let s: Vec<f64> = t.iter().map(|r| r.epsilon * (r.n as f64).sqrt()).collect();
        prop_assert!((s[0] - s[1]).abs() / s[0].min(s[1]) <= 0.01);
    }

    #[test]
    fn apply_is_linear(
        p in any_single_mode_process(),
        rho in state(FockCutoff::single(4)),
        sigma in state(FockCutoff::single(4)),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let t = analytic_tensor(p, FockCutoff::single(4)).unwrap();
        let lhs = t.apply(&rho.combine(a, &sigma, b).unwrap()).unwrap();
        let rhs = t.apply(&rho).unwrap().combine(a, &t.apply(&sigma).unwrap(), b).unwrap();
        prop_assert!((lhs.entries() - rhs.entries()).camax() <= 1e-12);
        prop_assert!(lhs.hermiticity_deviation() <= 1e-12);
    }

    #[test]
    fn outputs_stay_within_the_error_bound(
        rho in state(FockCutoff::single(6)),
        eta in 0.1f64..0.95,
    ) {
        // projecting the input moves a trace-nonincreasing process's output by at most the input distance
        let big = FockCutoff::single(6);
        let small = FockCutoff::single(3);
        let projected = fock::project_cutoff(&rho, small).unwrap();
        let input_gap = bounds::output_error_bound(&rho, &projected).unwrap();
        let p = ProcessParams::Attenuation { eta };
        let out_big = analytic_tensor(p, big).unwrap().apply(&rho).unwrap();
        let out_small = analytic_tensor(p, small).unwrap().apply(&projected).unwrap();
        let output_gap = bounds::output_error_bound(&out_big, &out_small).unwrap();
        prop_assert!(output_gap <= input_gap + 1e-10, "{} > {}", output_gap, input_gap);
    }
}

#[test]
fn identity_choi_at_one_photon() {
    let t = analytic_tensor(ProcessParams::Identity, FockCutoff::single(1)).unwrap();
    let eig = hermitian_eigenvalues(&t.choi_matrix());
    let want = [0.0, 0.0, 0.0, 2.0];
    for (e, w) in eig.iter().zip(want) {
        assert!((e - w).abs() < 1e-14, "{eig:?}");
    }
}

#[test]
fn projection_examples() {
    let cut = FockCutoff::single(1);
    let vac = FockCutoff::single(0);
    let mixed = DensityMatrix::fock(cut, &[0])
        .unwrap()
        .combine(0.5, &DensityMatrix::fock(cut, &[1]).unwrap(), 0.5)
        .unwrap();
    assert_eq!(
        fock::project_cutoff(&mixed, vac).unwrap(),
        DensityMatrix::fock(vac, &[0]).unwrap()
    );
    let one = DensityMatrix::fock(cut, &[1]).unwrap();
    assert!(matches!(
        fock::project_cutoff(&one, vac),
        Err(Error::DegenerateInput(_))
    ));
}

#[test]
fn phase_invariant_estimation_is_fast_at_ten_photons() {
    let cut = FockCutoff::single(10);
    let amps: Vec<_> = (0..50)
        .map(|i| CoherentAmplitude::real(10f64.sqrt() * i as f64 / 49.0).unwrap())
        .collect();
    let p = ProcessParams::Attenuation { eta: 0.9 };
    let ds = generate_synthetic(p, cut, &amps, NoiseSpec::noiseless()).unwrap();
    let start = Instant::now();
    let (est, _) = estimate_phase_invariant(ds.records(), cut, EstimateOptions::default()).unwrap();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "{elapsed:?}");
    assert_eq!(est.tensor.parity_rule_deviation(), 0.0);
}
