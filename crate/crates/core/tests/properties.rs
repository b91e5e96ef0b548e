use calogero::dynamics::{exact_flow, integrate_with, IntegratorOptions};
use calogero::lax::half_trace_l2;
use calogero::lift::{
    bracket0_lift, bracket1_lift, bracket_pencil, FnMatrixObservable, LiftedPoint, MatrixBuiltin,
    MatrixObservable,
};
use calogero::poisson::{
    bracket0, bracket1, verify_involution, Builtin, CheckConfig, FdStep, FnObservable, Observable,
};
use calogero::spectral::{conjecture_residual, default_probes, faddeev_leverrier};
use calogero::{
    build_lax, commutation_residual, eigenvector_coords, hamiltonian, recover_state,
    spectral_coords, CMatrix, Complex64, Coupling, PhaseState,
};
use proptest::prelude::*;

fn coupling() -> impl Strategy<Value = Coupling> {
    prop_oneof![Just(Coupling::Real), Just(Coupling::Imaginary)]
}

/// Ordered positions with spacing in `[0.3, 2]`, momenta in `[-1, 1]`.
fn state_with(
    ns: std::ops::RangeInclusive<usize>,
    coupling: impl Strategy<Value = Coupling>,
) -> impl Strategy<Value = PhaseState> {
    (ns, coupling).prop_flat_map(|(n, c)| {
        (
            -3.0..3.0f64,
            prop::collection::vec(0.3..2.0f64, n),
            prop::collection::vec(-1.0..1.0f64, n),
        )
            .prop_map(move |(start, gaps, p)| {
                let x = gaps
                    .iter()
                    .scan(start, |acc, g| {
                        *acc += g;
                        Some(*acc)
                    })
                    .collect();
                PhaseState::new(x, p, c).unwrap()
            })
    })
}

fn lifted(n: usize) -> impl Strategy<Value = LiftedPoint> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * n * n).prop_map(move |v| {
        let z: Vec<Complex64> = v
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        let a = CMatrix::from_fn(n, n, |i, j| z[i * n + j]);
        let b = CMatrix::from_fn(n, n, |i, j| z[n * n + i * n + j]);
        LiftedPoint::new(a, b).unwrap()
    })
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_is_half_trace(s in state_with(1..=8, coupling())) {
        let h = hamiltonian(&s).unwrap();
        let t = half_trace_l2(&build_lax(&s).unwrap());
        prop_assert!(close(Complex64::new(h, 0.0), t, 1e-12));
    }

    #[test]
    fn commutation_identity(s in state_with(1..=8, coupling())) {
        prop_assert!(commutation_residual(&build_lax(&s).unwrap()) <= 1e-12);
    }

    #[test]
    fn imaginary_coupling_gives_hermitian_lax(s in state_with(1..=8, Just(Coupling::Imaginary))) {
        let l = build_lax(&s).unwrap().l;
        prop_assert!((&l - l.adjoint()).iter().all(|z| z.norm() <= 1e-15));
    }

    #[test]
    fn lax_round_trip(s in state_with(1..=8, coupling())) {
        let back = recover_state(&build_lax(&s).unwrap()).unwrap();
        // A single particle has no off-diagonal entry to read the coupling from.
        if s.n() > 1 {
            prop_assert_eq!(back.coupling(), s.coupling());
        }
        for (a, b) in back.coords().iter().zip(s.coords()) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn adjugate_identity(s in state_with(1..=8, coupling())) {
        let pair = build_lax(&s).unwrap();
        let char = faddeev_leverrier(&pair.l);
        for lam in default_probes(s.n()) {
            prop_assert!(char.identity_residual(&pair.l, lam) <= 1e-9);
        }
    }

    #[test]
    fn trace_of_lax_is_total_momentum(s in state_with(1..=8, coupling())) {
        let char = faddeev_leverrier(&build_lax(&s).unwrap().l);
        let total: f64 = s.p().iter().sum();
        prop_assert!(close(-char.delta[s.n() - 1], Complex64::new(total, 0.0), 1e-12));
    }

    #[test]
    fn routes_agree(s in state_with(1..=6, Just(Coupling::Imaginary))) {
        let pair = build_lax(&s).unwrap();
        let sc = spectral_coords(&pair).unwrap();
        prop_assume!(!sc.degenerate);
        let ev = eigenvector_coords(&pair).unwrap();
        for (a, b) in sc.mu_tilde.iter().zip(&ev) {
            prop_assert!(close(*a, *b, 1e-9), "{} vs {}", a, b);
        }
    }

    #[test]
    fn conjecture_holds_for_real_coupling(s in state_with(1..=8, Just(Coupling::Real))) {
        let pair = build_lax(&s).unwrap();
        prop_assert!(conjecture_residual(&pair, &default_probes(s.n())) <= 1e-8);
    }

    #[test]
    fn invariants_commute(s in state_with(1..=6, coupling())) {
        let r = verify_involution(&s, &CheckConfig::default()).unwrap();
        prop_assert!(r.pass, "{}", r.summary());
    }

    #[test]
    fn bracket0_is_antisymmetric_and_leibniz(s in state_with(2..=5, Just(Coupling::Imaginary)), k in 1usize..=2, l in 1usize..=2) {
        let step = FdStep::default();
        let (f, g, h) = (Builtin::J(k), Builtin::I(l), Builtin::Position(0));
        let fg = bracket0(&f, &g, &s, step).unwrap();
        let gf = bracket0(&g, &f, &s, step).unwrap();
        prop_assert!(close(fg, -gf, 1e-12));

        let product = FnObservable::new("J I", move |st: &PhaseState| Ok(f.eval(st)? * g.eval(st)?));
        let lhs = bracket0(&product, &h, &s, step).unwrap();
        let rhs = f.eval(&s).unwrap() * bracket0(&g, &h, &s, step).unwrap()
            + g.eval(&s).unwrap() * bracket0(&f, &h, &s, step).unwrap();
        prop_assert!(close(lhs, rhs, 1e-6), "{} vs {}", lhs, rhs);

        let sum = FnObservable::new("2J + 3I", move |st: &PhaseState| Ok(f.eval(st)? * 2.0 + g.eval(st)? * 3.0));
        let lin = bracket0(&sum, &h, &s, step).unwrap();
        let parts = bracket0(&f, &h, &s, step).unwrap() * 2.0 + bracket0(&g, &h, &s, step).unwrap() * 3.0;
        prop_assert!(close(lin, parts, 1e-6));
    }

    #[test]
    fn bracket1_is_antisymmetric(s in state_with(2..=4, Just(Coupling::Imaginary)), i in 0usize..2, j in 0usize..2) {
        let step = FdStep::default();
        let (f, g) = (Builtin::Position(i), Builtin::Momentum(j));
        let fg = bracket1(&f, &g, &s, step).unwrap();
        let gf = bracket1(&g, &f, &s, step).unwrap();
        prop_assert!(close(fg, -gf, 1e-9));
        prop_assert!(bracket1(&f, &f, &s, step).unwrap().norm() <= 1e-9);
    }

    #[test]
    fn exact_flow_is_reversible_and_isospectral(s in state_with(1..=6, Just(Coupling::Imaginary)), t in -3.0..3.0f64) {
        let forward = exact_flow(&s, t).unwrap();
        let back = exact_flow(&forward, -t).unwrap();
        for (a, b) in back.coords().iter().zip(s.coords()) {
            prop_assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0));
        }
        let l0 = spectral_coords(&build_lax(&s).unwrap()).unwrap().lambdas;
        let l1 = spectral_coords(&build_lax(&forward).unwrap()).unwrap().lambdas;
        for (a, b) in l0.iter().zip(&l1) {
            prop_assert!(close(*a, *b, 1e-9));
        }
        prop_assert!((hamiltonian(&s).unwrap() - hamiltonian(&forward).unwrap()).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integrator_matches_exact_flow(s in state_with(2..=4, Just(Coupling::Imaginary)), t in 0.5..2.0f64) {
        let opts = IntegratorOptions { tol: 1e-12, record_steps: false, ..IntegratorOptions::default() };
        let rk = integrate_with(&s, t, &opts).unwrap();
        let exact = exact_flow(&s, t).unwrap();
        let last = rk.states.last().unwrap();
        for (a, b) in last.x().iter().zip(exact.x()) {
            prop_assert!((a - b).abs() <= 1e-7);
        }
    }

    #[test]
    fn lifted_brackets_antisymmetric_and_leibniz(pt in lifted(2), lambda in -2.0..2.0f64, a in 0usize..8, b in 0usize..8, c in 0usize..8) {
        let coords = MatrixBuiltin::coordinates(2);
        let (f, g, h) = (coords[a], coords[b], coords[c]);
        let fg = bracket_pencil(lambda, &f, &g, &pt).unwrap();
        let gf = bracket_pencil(lambda, &g, &f, &pt).unwrap();
        prop_assert!(close(fg, -gf, 1e-12));

        let product = FnMatrixObservable::new("f g", move |p: &LiftedPoint| Ok(f.eval(p)? * g.eval(p)?));
        let lhs = bracket_pencil(lambda, &product, &h, &pt).unwrap();
        let rhs = f.eval(&pt).unwrap() * bracket_pencil(lambda, &g, &h, &pt).unwrap()
            + g.eval(&pt).unwrap() * bracket_pencil(lambda, &f, &h, &pt).unwrap();
        prop_assert!(close(lhs, rhs, 1e-6), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn frozen_bracket_is_bracket1_at_identity(pt in lifted(2), a in 0usize..8, b in 0usize..8) {
        let coords = MatrixBuiltin::coordinates(2);
        let frozen = LiftedPoint::new(CMatrix::identity(2, 2), CMatrix::zeros(2, 2)).unwrap();
        let (f, g) = (coords[a], coords[b]);
        // Coordinate gradients are constant, so the frozen bracket does not
        // depend on the point at which it is evaluated.
        let b0 = bracket0_lift(&f, &g, &pt).unwrap();
        let b1 = bracket1_lift(&f, &g, &frozen).unwrap();
        prop_assert!(close(b0, b1, 1e-14));
    }

    #[test]
    fn lifted_hamiltonians_commute(pt in lifted(3), j in 1usize..=3, k in 1usize..=3) {
        let (hj, hk) = (MatrixBuiltin::H(j), MatrixBuiltin::H(k));
        prop_assert!(bracket0_lift(&hj, &hk, &pt).unwrap().norm() <= 1e-12);
        prop_assert!(bracket1_lift(&hj, &hk, &pt).unwrap().norm() <= 1e-12);
    }
}
