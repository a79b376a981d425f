mod common;

use std::f64::consts::PI;

use csqpt::fock::{self, CoherentAmplitude, DensityMatrix, FockCutoff};
use csqpt::processes::{analytic_tensor, ProcessParams};
use num_complex::Complex64;

#[test]
fn beam_splitter_matches_exponential() {
    let cut = FockCutoff::two_mode(3);
    for theta in [PI / 6.0, PI / 2.0, 1.1] {
        let t = analytic_tensor(ProcessParams::BeamSplitter { theta }, cut).unwrap();
        let oracle = common::beam_splitter_oracle(theta, cut, 8);
        let err = t.max_abs_diff(&oracle).unwrap();
        assert!(err <= 1e-8, "theta={theta} err={err}");
    }
}

#[test]
fn pdc_matches_exponential() {
    let cut = FockCutoff::two_mode(3);
    let t = analytic_tensor(ProcessParams::Pdc { r: 0.2 }, cut).unwrap();
    let oracle = common::pdc_oracle(0.2, cut, 12);
    let err = t.max_abs_diff(&oracle).unwrap();
    assert!(err <= 1e-6, "err={err}");
}

#[test]
fn beam_splitter_moves_coherent_amplitudes() {
    // |a1, a2> -> |T a1 - R a2, R a1 + T a2>
    let theta = 0.9;
    let cut = FockCutoff::two_mode(5);
    let (t, r) = ProcessParams::beam_splitter_amplitudes(theta);
    let (a1, a2) = (Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.25));
    let tensor = analytic_tensor(ProcessParams::BeamSplitter { theta }, cut).unwrap();
    let input = CoherentAmplitude::pair(a1, a2).unwrap();
    let out = tensor.synthesize_probe_output(&input).unwrap();
    let moved = CoherentAmplitude::pair(a1 * t - a2 * r, a1 * r + a2 * t).unwrap();
    let want = fock::coherent_density(&moved, cut).unwrap();
    // photon number is conserved, so only the total-photon truncation differs
    let d = fock::trace_distance(&out, &want).unwrap();
    assert!(d < 1e-3, "{d}");
}

#[test]
fn cp_for_all_processes() {
    let cases = [
        (ProcessParams::Identity, FockCutoff::single(5)),
        (ProcessParams::Attenuation { eta: 0.8 }, FockCutoff::single(5)),
        (ProcessParams::PhotonAdd, FockCutoff::single(5)),
        (ProcessParams::PhotonSub, FockCutoff::single(5)),
        (ProcessParams::Cat, FockCutoff::single(5)),
        (ProcessParams::BeamSplitter { theta: 0.7 }, FockCutoff::two_mode(3)),
        (ProcessParams::Pdc { r: 0.2 }, FockCutoff::two_mode(3)),
    ];
    for (p, cut) in cases {
        let t = analytic_tensor(p, cut).unwrap();
        let min = t.choi_min_eigenvalue();
        assert!(min >= -1e-10, "{p}: {min}");
    }
}

#[test]
fn linearity_of_apply() {
    let cut = FockCutoff::single(4);
    let t = analytic_tensor(ProcessParams::Attenuation { eta: 0.6 }, cut).unwrap();
    let r1 = fock::coherent_density(&CoherentAmplitude::single(Complex64::new(0.4, 0.2)).unwrap(), cut).unwrap();
    let r2 = DensityMatrix::fock(cut, &[3]).unwrap();
    let lhs = t.apply(&r1.combine(0.3, &r2, 0.7).unwrap()).unwrap();
    let rhs = t.apply(&r1).unwrap().combine(0.3, &t.apply(&r2).unwrap(), 0.7).unwrap();
    assert!((lhs.entries() - rhs.entries()).camax() < 1e-12);
}

#[test]
fn trace_rule_for_trace_preserving_single_mode() {
    let cut = FockCutoff::single(6);
    for p in [
        ProcessParams::Identity,
        ProcessParams::Attenuation { eta: 0.7 },
        ProcessParams::Cat,
    ] {
        let t = analytic_tensor(p, cut).unwrap();
        assert!(t.trace_rule_deviation(cut.n_max()) <= 1e-10, "{p}");
    }
}

#[test]
fn trace_rule_for_beam_splitter() {
    let cut = FockCutoff::two_mode(4);
    let t = analytic_tensor(ProcessParams::BeamSplitter { theta: 1.2 }, cut).unwrap();
    // photon-number conserving, so every input with total <= nmax stays inside
    assert!(t.trace_rule_deviation(cut.n_max()) <= 1e-10);
}

#[test]
fn pdc_trace_rule_only_far_from_cutoff() {
    let cut = FockCutoff::two_mode(5);
    let t = analytic_tensor(ProcessParams::Pdc { r: 0.2 }, cut).unwrap();
    assert!(t.trace_rule_deviation(1) <= 1e-5);
    assert!(t.trace_rule_deviation(cut.n_max()) > 1e-3);
}

#[test]
fn selection_rules_hold_exactly() {
    let cut = FockCutoff::single(5);
    for p in [
        ProcessParams::Attenuation { eta: 0.4 },
        ProcessParams::PhotonAdd,
        ProcessParams::PhotonSub,
        ProcessParams::Cat,
    ] {
        assert_eq!(analytic_tensor(p, cut).unwrap().parity_rule_deviation(), 0.0, "{p}");
    }
    let cut = FockCutoff::two_mode(3);
    let bs = analytic_tensor(ProcessParams::BeamSplitter { theta: 0.5 }, cut).unwrap();
    for ([m, n, j, k], _) in bs.nonzero() {
        assert_eq!(cut.total_photons(m), cut.total_photons(j));
        assert_eq!(cut.total_photons(n), cut.total_photons(k));
    }
    let cat = analytic_tensor(ProcessParams::Cat, FockCutoff::single(5)).unwrap();
    for ([m, n, j, k], _) in cat.nonzero() {
        assert!(m == j && n == k);
    }
}
