use qha_core::cohen::{cohen_distribution, phase_retrieval};
use qha_core::convolution::{conv_fn_op, conv_op_op, conv_op_op_spectral};
use qha_core::fourier_wigner::{fourier_wigner, inverse_fourier_wigner, weyl_symbol, weyl_transform};
use qha_core::localization::{localization_eigenproblem, mixed_state_loc, reconstruct_domain};
use qha_core::tf::{spectrogram, wigner};
use qha_core::{io, CohenKernel, Fixtures, MixedState, QhaContext, QhaError, Window};

#[test]
fn transforms_invert_across_parities() {
    for n in [6, 7] {
        let ctx = QhaContext::new(n).unwrap();
        let mut fx = Fixtures::new(&ctx, 1);
        let s = fx.operator();
        assert!(inverse_fourier_wigner(&fourier_wigner(&s)).max_abs_diff(&s) < 1e-12);
        assert!(weyl_transform(&weyl_symbol(&s)).max_abs_diff(&s) < 1e-12);
        let t = fx.operator();
        let a = conv_op_op(&s, &t).unwrap();
        assert!(a.max_abs_diff(&conv_op_op_spectral(&s, &t).unwrap()) < 1e-11);
    }
}

#[test]
fn spectrogram_is_a_cohen_distribution() {
    let ctx = QhaContext::new(9).unwrap();
    let psi = Fixtures::new(&ctx, 2).signal();
    let g = Window::Gaussian.signal(&ctx);
    let k = CohenKernel::spectrogram(&g).unwrap();
    let q = cohen_distribution(&k, &psi).unwrap();
    assert!(q.max_abs_diff(&spectrogram(&psi, &g).unwrap()) < 1e-11);
    let w = cohen_distribution(&CohenKernel::wigner(&ctx), &psi).unwrap();
    assert!(w.max_abs_diff(&wigner(&psi, &psi).unwrap()) < 1e-11);
}

#[test]
fn localization_pipeline_through_files() {
    let ctx = QhaContext::new(8).unwrap();
    let mut fx = Fixtures::new(&ctx, 4);
    let d = fx.domain();
    let state = MixedState::pure(&Window::ChirpGaussian.signal(&ctx)).unwrap();
    let h = mixed_state_loc(&d, &state).unwrap();
    let h2 = io::read_operator(&io::write_operator(&h), &ctx).unwrap();
    assert_eq!(h, h2);
    assert_eq!(reconstruct_domain(&h2, state.op()).unwrap(), d);
    let r = localization_eigenproblem(&d, &state).unwrap();
    assert_eq!(r.domain_measure, d.measure());
    assert!((r.eigen_sum - d.measure_f64()).abs() < 1e-12);
    assert!(h.max_abs_diff(&conv_fn_op(&d.indicator(), state.op()).unwrap()) == 0.0);
}

#[test]
fn phase_retrieval_recovers_up_to_phase() {
    let ctx = QhaContext::new(16).unwrap();
    let g = Window::ChirpGaussian.signal(&ctx);
    let psi = Fixtures::new(&ctx, 8).signal();
    let out = phase_retrieval(&spectrogram(&psi, &g).unwrap(), &g).unwrap();
    assert!(1.0 - out.fidelity(&psi) < 1e-10);
    let e0 = Window::Impulse.signal(&ctx);
    let err = phase_retrieval(&spectrogram(&psi, &e0).unwrap(), &e0).unwrap_err();
    assert!(matches!(err, QhaError::ZeroAmbiguity { .. }));
}

#[test]
fn grid_mismatch_is_reported() {
    let a = Fixtures::new(&QhaContext::new(4).unwrap(), 0).operator();
    let b = Fixtures::new(&QhaContext::new(5).unwrap(), 0).operator();
    assert!(matches!(conv_op_op(&a, &b), Err(QhaError::ContextMismatch { .. })));
}
