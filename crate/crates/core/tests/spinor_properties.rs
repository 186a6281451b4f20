use degenerate_core::catalog::{spin_eigenvectors, DirectionSpec, EquationKind, SolutionSpec, SpinWeights};
use degenerate_core::spinor::{
    bilinear, gamma_set, kappa_from_dirac, kappa_from_weyl, kappa_of, null_contraction, pauli_set, probability_current,
    weyl_null_contraction, CMatrix, CScalar, Helicity, Mat4, Spinor, Spinor4,
};
use degenerate_core::{parse, Params, Point4};
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> CScalar {
    CScalar::new(re, im)
}

fn weights() -> impl Strategy<Value = SpinWeights> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("nonzero weights", |w| w.iter().map(|v| v * v).sum::<f64>() > 1e-3)
        .prop_map(|w| SpinWeights::new(c(w[0], w[1]), c(w[2], w[3])))
}

fn direction() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..PI, 0.0f64..2.0 * PI)
}

fn dirac_combo(theta: f64, phi: f64, e: f64, w: SpinWeights, anti: bool) -> Spinor4 {
    let ev = spin_eigenvectors(theta, phi, e).unwrap();
    let (a, b) = if anti { (ev.v_up, ev.v_dn) } else { (ev.u_up, ev.u_dn) };
    a.scale(w.c1) + b.scale(w.c2)
}

#[test]
fn clifford_algebra_is_exact() {
    let g = &gamma_set().gamma;
    let eta = [1.0, -1.0, -1.0, -1.0];
    for mu in 0..4 {
        for nu in 0..4 {
            let anti = g[mu] * g[nu] + g[nu] * g[mu];
            let expected = if mu == nu {
                Mat4::identity().scale(c(2.0 * eta[mu], 0.0))
            } else {
                Mat4::zero()
            };
            assert_eq!(anti, expected, "mu={mu} nu={nu}");
        }
    }
}

#[test]
fn pauli_products_are_exact() {
    let s = &pauli_set().sigma;
    let eps = |i: usize, j: usize, k: usize| -> f64 {
        match (i, j, k) {
            (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
            (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
            _ => 0.0,
        }
    };
    for i in 1..4 {
        for j in 1..4 {
            let mut expected = if i == j { CMatrix::identity() } else { CMatrix::zero() };
            for k in 1..4 {
                expected = expected + s[k].scale(c(0.0, eps(i, j, k)));
            }
            assert_eq!(s[i] * s[j], expected, "i={i} j={j}");
        }
    }
}

#[test]
fn kernel_identity_on_a_direction_grid() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let ws: Vec<SpinWeights> = (0..50)
        .map(|_| SpinWeights::new(c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    for i in 0..20 {
        for j in 0..20 {
            let theta = PI * i as f64 / 19.0;
            let phi = 2.0 * PI * j as f64 / 20.0;
            let k = kappa_of(theta, phi);
            for w in &ws {
                for anti in [false, true] {
                    let psi = dirac_combo(theta, phi, 0.0, *w, anti);
                    assert!(null_contraction(&k, &psi).norm() <= 1e-12 * psi.norm());
                }
            }
        }
    }
}

#[test]
fn massive_eigenvector_examples() {
    let ev = spin_eigenvectors(0.0, 0.0, 0.5).unwrap();
    let r = (0.5f64 / 1.5).sqrt();
    assert!((ev.u_up - Spinor4::from_real([1.0, 0.0, r, 0.0])).max_abs() < 1e-15);
    assert!(spin_eigenvectors(0.0, 0.0, 1.0).is_err());
    assert!(spin_eigenvectors(0.0, 0.0, -0.1).is_err());
}

#[test]
fn weyl_kernel_identity() {
    for (theta, phi) in [(0.0, 0.0), (1.0, 2.0), (2.5, -0.7)] {
        let k = kappa_of(theta, phi);
        for hel in [Helicity::Positive, Helicity::Negative] {
            let chi = degenerate_core::catalog::helicity_spinor(theta, phi, hel);
            assert!(weyl_null_contraction(&k, &chi, hel).norm() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_identity_random((theta, phi) in direction(), w in weights(), anti in any::<bool>()) {
        let psi = dirac_combo(theta, phi, 0.0, w, anti);
        prop_assert!(null_contraction(&kappa_of(theta, phi), &psi).norm() <= 1e-12 * psi.norm());
    }

    #[test]
    fn current_points_along_motion((theta, phi) in direction(), w in weights()) {
        let psi = dirac_combo(theta, phi, 0.0, w, false);
        let j = probability_current(&psi);
        let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        for i in 0..3 {
            prop_assert!((j[i + 1] - n[i] * j[0]).abs() <= 1e-12 * j[0].max(1.0));
        }
    }

    #[test]
    fn bilinear_is_conjugate_symmetric(
        entries in prop::array::uniform32(-2.0f64..2.0),
        s in prop::array::uniform8(-1.0f64..1.0),
    ) {
        let m = CMatrix::<4>(std::array::from_fn(|i| std::array::from_fn(|j| c(entries[2 * (4 * i + j) % 32], entries[(2 * (4 * i + j) + 1) % 32]))));
        let psi = Spinor(std::array::from_fn(|i| c(s[2 * i], s[2 * i + 1])));
        let lhs = bilinear(&psi, &m.adjoint());
        let rhs = bilinear(&psi, &m).conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn bilinear_kappa_matches_closed_form((theta, phi) in direction(), w in weights()) {
        prop_assume!(w.c1.norm() > 0.05 && w.c2.norm() > 0.05);
        let psi = dirac_combo(theta, phi, 0.0, w, false);
        let k = kappa_from_dirac(&psi).unwrap();
        prop_assert!(k.max_abs_diff(&kappa_of(theta, phi)) <= 1e-12);
    }

    #[test]
    fn weyl_kappa_matches_closed_form((theta, phi) in direction(), pos in any::<bool>()) {
        let hel = if pos { Helicity::Positive } else { Helicity::Negative };
        let chi = degenerate_core::catalog::helicity_spinor(theta, phi, hel);
        let k = kappa_from_weyl(&chi, hel).unwrap();
        prop_assert!(k.max_abs_diff(&kappa_of(theta, phi)) <= 1e-12);
    }

    #[test]
    fn eigenvectors_are_orthogonal((theta, phi) in direction(), e in 0.0f64..0.99) {
        let ev = spin_eigenvectors(theta, phi, e).unwrap();
        prop_assert!(ev.u_up.inner(&ev.u_dn).norm() <= 1e-12);
        prop_assert!(ev.v_up.inner(&ev.v_dn).norm() <= 1e-12);
        let expected = 1.0 + (1.0 - e) / (1.0 + e);
        for v in [ev.u_up, ev.u_dn, ev.v_up, ev.v_dn] {
            prop_assert!((v.norm_sqr() - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn dirac_splits_into_weyl_blocks(
        (theta, phi) in direction(),
        re in -1.0f64..1.0,
        im in -1.0f64..1.0,
        t in -1.0f64..1.0,
        z in -1.0f64..1.0,
    ) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let cw = c(re, im);
        let dir = DirectionSpec::constant(theta, phi);
        let h = parse("2 * (z - t) + x * y").unwrap();
        let p = Point4::new(t, 0.3, -0.4, z);
        let dirac = |w: SpinWeights| {
            SolutionSpec {
                equation: EquationKind::DiracParticle,
                weights: Some(w),
                direction: dir.clone(),
                h: h.clone(),
                envelope: None,
                mass_ratio_e: 0.0,
                energy_e: 1.0,
                params: Params::new(),
            }
            .dirac_solution()
            .unwrap()
            .evaluate(p)
            .unwrap()
        };
        let weyl = |hel| SolutionSpec::weyl(hel, dir.clone(), h.clone(), Params::new()).weyl_solution().unwrap().evaluate(p).unwrap();

        let up = *dirac(SpinWeights::new(cw, c(0.0, 0.0))).as_dirac().unwrap();
        let psi = weyl(Helicity::Positive).as_weyl().unwrap().scale(cw);
        prop_assert!((up.upper() - psi).max_abs() <= 1e-12);
        prop_assert!((up.lower() - psi).max_abs() <= 1e-12);

        let dn = *dirac(SpinWeights::new(c(0.0, 0.0), cw)).as_dirac().unwrap();
        let psi = weyl(Helicity::Negative).as_weyl().unwrap().scale(cw);
        prop_assert!((dn.upper() - psi).max_abs() <= 1e-12);
        prop_assert!((dn.lower() + psi).max_abs() <= 1e-12);
    }

    #[test]
    fn unit_envelope_is_neutral(
        (theta, phi) in direction(),
        w in weights(),
        p in prop::array::uniform4(-1.0f64..1.0),
    ) {
        let base = SolutionSpec::free_dirac(EquationKind::DiracParticle, w, 1.5);
        let mut spec = base.clone();
        spec.direction = DirectionSpec::constant(theta, phi);
        let plain = spec.clone().dirac_solution().unwrap();
        let enveloped = spec.with_envelope(parse("1").unwrap()).dirac_solution().unwrap();
        let p = Point4::from_array(p);
        prop_assert_eq!(plain.evaluate(p).unwrap(), enveloped.evaluate(p).unwrap());
    }
}
