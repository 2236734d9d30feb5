use semilab_core::estimates::{
    classical_stability_check, exchange_energy, gaussian_decomposition, gaussian_decomposition_check, integrate,
    omega, BoundPoint, LadderAxis, StabilityOptions,
};
use semilab_core::phasespace::{PhaseSpaceField, PhaseSpaceGrid};
use semilab_core::quantize::{psd_repair, weyl_quantize, MidpointSource};
use semilab_core::{BoundCheck, KernelSpec, LabError};

fn bump(x0: f64, var: f64) -> impl Fn(f64, f64) -> f64 {
    move |x, k| (-((x - x0).powi(2) + k * k) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var)
}

#[test]
fn gaussian_decomposition_reproduces_coulomb() {
    let k = KernelSpec::power(3, 1.0, 1.0).with_delta(0.0);
    for r in [0.5f64, 1.0, 3.0] {
        assert!((gaussian_decomposition(&k, r * r).unwrap() - 1.0 / r).abs() < 1e-8);
    }
    let check = gaussian_decomposition_check(&k, &[0.25, 1.0, 4.0]).unwrap();
    assert!(check.verdict.bounded);
    assert_eq!(check.axis, LadderAxis::Radius);
    assert!((omega(2.0) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn gaussian_decomposition_refuses_flat_kernels() {
    assert!(matches!(gaussian_decomposition_check(&KernelSpec::zero(1), &[1.0]), Err(LabError::Exponent(_))));
}

#[test]
fn quadrature_of_smooth_integrand() {
    let q = integrate(|x: f64| x.cos(), 0.0, std::f64::consts::FRAC_PI_2, 4, 1e-12, 0.0).unwrap();
    assert!((q.value - 1.0).abs() < 1e-12);
}

#[test]
fn identical_data_stays_together() {
    let g = PhaseSpaceGrid::one_d(64, 8.0, 64, 8.0).unwrap();
    let f = PhaseSpaceField::from_fn_1d(g, bump(0.0, 0.25));
    let opts = StabilityOptions { dt: 0.02, t_final: 0.2, record_every: 2, lp: None };
    let r = classical_stability_check(&f, &f, &KernelSpec::power(1, -0.5, 1.0), &opts).unwrap();
    assert!(r.l1.points.iter().all(|p| p.lhs == 0.0));
    assert!(r.l1.verdict.bounded);
}

#[test]
fn perturbed_data_stays_below_envelope() {
    let g = PhaseSpaceGrid::one_d(64, 8.0, 64, 8.0).unwrap();
    let f1 = PhaseSpaceField::from_fn_1d(g, bump(0.05, 0.25));
    let f2 = PhaseSpaceField::from_fn_1d(g, bump(0.0, 0.25));
    let opts = StabilityOptions { dt: 0.02, t_final: 0.4, record_every: 5, lp: Some(1.5) };
    let r = classical_stability_check(&f1, &f2, &KernelSpec::power(1, -0.5, 1.0), &opts).unwrap();
    assert!(r.l1.verdict.bounded, "{:?}", r.l1.verdict);
    assert!(r.lp.is_some());
}

#[test]
fn exchange_energy_is_positive_for_repulsive_kernels() {
    let g = PhaseSpaceGrid::one_d(64, 8.0, 64, 8.0).unwrap();
    let f = PhaseSpaceField::from_fn_1d(g, bump(0.0, 0.25));
    let rho = psd_repair(&weyl_quantize(&f, 0.2, MidpointSource::SpectralInterpolated).unwrap()).unwrap().0;
    let k = KernelSpec::power(1, 0.5, 1.0).resolved(&g.x).unwrap();
    assert!(exchange_energy(&rho, &k).unwrap() > 0.0);
}

#[test]
fn graded_check_detects_growth() {
    let pts = (1..=4).map(|i| BoundPoint::new(1.0 / i as f64, 10f64.powi(i), 1.0)).collect();
    let c = BoundCheck::graded("growth", LadderAxis::Hbar, pts, 10.0);
    assert!(!c.verdict.bounded);
    assert_eq!(c.fitted_c, 10.0);
}
