use equifact_core::factor_check::{
    check_ssa, run_full_check, witness_order, CheckOptions, CheckSet, OrbitSpaceModel, Verdict,
};
use equifact_core::graded_core::{
    graded_tensor, inverse_sqrt_spd, spinor_rep, CliffordElement, GradedMatrix, Parity,
};
use equifact_core::models::{
    apply_monomial, build_nc_torus, build_sphere, build_torus, build_warped_torus, deform, EquivariantModel, Profile,
    SphereConfig, ThetaMatrix, Turn, WarpedTorusConfig,
};
use equifact_core::sectors::{sector_projection, Character, SectorSpace, SectorVector, TruncationWindow};
use equifact_core::sparse::SparseMatrix;
use equifact_core::Complex64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn clifford(n: usize) -> impl Strategy<Value = CliffordElement> {
    prop::collection::vec(complex(), 1 << n).prop_map(move |coeffs| {
        coeffs
            .into_iter()
            .enumerate()
            .fold(CliffordElement::zero(n), |acc, (mask, c)| {
                let idx: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).map(|j| j + 1).collect();
                acc.add(&CliffordElement::monomial(n, &idx).unwrap().scale(c)).unwrap()
            })
    })
}

fn homogeneous(dims: (usize, usize), parity: Parity) -> impl Strategy<Value = GradedMatrix> {
    let n = dims.0 + dims.1;
    prop::collection::vec(complex(), n * n).prop_map(move |vals| {
        let triplets: Vec<_> = vals.iter().enumerate().map(|(i, v)| (i / n, i % n, *v)).collect();
        let (even, odd) = GradedMatrix::split(dims, dims, &SparseMatrix::from_triplets(n, n, triplets));
        if parity == Parity::Even {
            even
        } else {
            odd
        }
    })
}

fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Even), Just(Parity::Odd)]
}

fn dense_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn clifford_generators_anticommute(n in 1usize..=6) {
        let rep = spinor_rep(n);
        let g = rep.dense();
        let id = DMatrix::<Complex64>::identity(rep.dim(), rep.dim());
        for j in 0..n {
            prop_assert!(dense_diff(&g[j].adjoint(), &g[j]) < 1e-14);
            for k in 0..n {
                let want = if j == k { &id * Complex64::new(2.0, 0.0) } else { id.clone() * Complex64::new(0.0, 0.0) };
                prop_assert!(dense_diff(&(&g[j] * &g[k] + &g[k] * &g[j]), &want) < 1e-12);
            }
        }
    }

    #[test]
    fn clifford_product_is_associative((n, a, b, c) in (1usize..=4).prop_flat_map(|n| (Just(n), clifford(n), clifford(n), clifford(n)))) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-12, "n = {}", n);
    }

    #[test]
    fn spinor_rep_is_a_homomorphism((n, a, b) in (1usize..=4).prop_flat_map(|n| (Just(n), clifford(n), clifford(n)))) {
        let rep = spinor_rep(n);
        let lhs = a.mul(&b).unwrap().represent(&rep).unwrap();
        let rhs = a.represent(&rep).unwrap() * b.represent(&rep).unwrap();
        prop_assert!(dense_diff(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn koszul_functoriality(
        (a, a2) in (parity(), parity()).prop_flat_map(|(p, q)| (homogeneous((1, 1), p), homogeneous((1, 1), q))),
        (b, b2) in (parity(), parity()).prop_flat_map(|(p, q)| (homogeneous((2, 1), p), homogeneous((2, 1), q))),
    ) {
        let lhs = graded_tensor(&a, &b).mul(&graded_tensor(&a2, &b2)).unwrap();
        let rhs = graded_tensor(&a.mul(&a2).unwrap(), &b.mul(&b2).unwrap()).scale_real(Parity::koszul(b.parity(), a2.parity()));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn inverse_sqrt_of_spd(vals in prop::collection::vec(complex(), 16)) {
        let x = DMatrix::from_iterator(4, 4, vals);
        let h = &x * x.adjoint() + DMatrix::<Complex64>::identity(4, 4);
        let w = inverse_sqrt_spd(&h).unwrap();
        prop_assert!(dense_diff(&(&w * &h * &w), &DMatrix::identity(4, 4)) < 1e-10);
        prop_assert!(dense_diff(&w.adjoint(), &w) < 1e-12);
    }

    #[test]
    fn projections_partition_identity(n in 1usize..=3, k in 1i64..=3, even in 0usize..3, odd in 0usize..3) {
        prop_assume!(even + odd > 0);
        let window = TruncationWindow::new(n, k).unwrap();
        let space = SectorSpace::uniform(window, (even, odd));
        let v = SectorVector::from_fn(&space, |c, i| Complex64::new(c.0.iter().sum::<i64>() as f64, i as f64 + 0.5));
        let mut total = SectorVector::zeros(&space);
        for chi in window.characters() {
            let p = sector_projection(&v, &chi).unwrap();
            prop_assert_eq!(sector_projection(&p, &chi).unwrap().max_abs_diff(&p), 0.0);
            total = total.add(&p).unwrap();
        }
        prop_assert_eq!(total.max_abs_diff(&v), 0.0);
    }

    #[test]
    fn torus_dirac_is_self_adjoint(n in 1usize..=3, k in 1i64..=3) {
        prop_assert!(build_torus(n, k).unwrap().triple().dirac.self_adjoint_defect().unwrap() < 1e-12);
    }

    #[test]
    fn warped_dirac_is_self_adjoint_with_constant_generators(base in 1.5..3.0f64, amplitude in 0.0..1.0f64, frequency in 1i64..=2) {
        let model = build_warped_torus(WarpedTorusConfig {
            profiles: vec![Profile::SinBump { base, amplitude, frequency }],
            n_grid: 16,
            window: 2,
        }).unwrap();
        prop_assert!(model.triple().dirac.self_adjoint_defect().unwrap() < 1e-12);
        let norms = model.infinitesimal_generator_defect(0).unwrap().per_sector_norms();
        let first = *norms.values().next().unwrap();
        for v in norms.values() {
            prop_assert!((v - first).abs() <= 1e-10 * first.max(1.0));
        }
    }

    #[test]
    fn sphere_dirac_is_self_adjoint(k in -3i64..=3, margin in 0.05..0.35f64) {
        let model = build_sphere(SphereConfig { k_lift: k, n_grid: 64, window: 3, margin, poles: false }).unwrap();
        prop_assert!(model.triple().dirac.self_adjoint_defect().unwrap() < 1e-12);
    }

    #[test]
    fn monomials_commute_up_to_phase(p in 1i64..8, q in 2i64..9, k in prop::collection::vec(-3i64..=3, 2), m in prop::collection::vec(-3i64..=3, 2)) {
        prop_assume!(p < q);
        let theta = ThetaMatrix::two(Turn::exact(p, q).unwrap()).unwrap();
        let (phase, target) = apply_monomial(&theta, &Character::new(&k), &Character::new(&m)).unwrap();
        prop_assert_eq!(target, Character::new(&[k[0] + m[0], k[1] + m[1]]));
        prop_assert!(phase.is_exact());
        let gens = build_nc_torus(2, &theta, 3).unwrap();
        let rel = gens.relation(0, 1).unwrap();
        prop_assert!(rel.exact && rel.holds);
    }

    #[test]
    fn ssa_witness_is_first_non_clopen(masks in prop::collection::vec(prop::collection::vec(any::<bool>(), 3), 1..6)) {
        let mut orbit = OrbitSpaceModel::closed_interval("a", "(a,b)", "b");
        let chars: Vec<Character> = (0..masks.len() as i64).map(|j| Character::new(&[if j % 2 == 0 { j / 2 } else { -(j + 1) / 2 }])).collect();
        for (chi, mask) in chars.iter().zip(&masks) {
            orbit.set_support(chi.clone(), mask.clone()).unwrap();
        }
        let out = check_ssa(&orbit).unwrap();
        let mut bad: Vec<&Character> = chars.iter().zip(&masks).filter(|(_, m)| !(m.iter().all(|b| *b) || m.iter().all(|b| !*b))).map(|(c, _)| c).collect();
        bad.sort_by(|a, b| witness_order(a, b));
        match bad.first() {
            None => prop_assert_eq!(out.verdict, Verdict::Pass),
            Some(w) => {
                prop_assert_eq!(out.verdict, Verdict::Fail);
                prop_assert_eq!(out.witness.as_ref(), Some(*w));
            }
        }
        // enlarging a failing support to everything never introduces a new failure
        if let Some(w) = out.witness.clone() {
            orbit.set_full_support(w.clone());
            let again = check_ssa(&orbit).unwrap();
            prop_assert!(again.witness.is_none_or(|x| witness_order(&x, &w) == std::cmp::Ordering::Greater));
        }
        for chi in &chars {
            orbit.set_full_support(chi.clone());
        }
        prop_assert_eq!(check_ssa(&orbit).unwrap().verdict, Verdict::Pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn deformation_preserves_diagnostics(p in 0i64..6, q in 1i64..7) {
        prop_assume!(p < q);
        let base = build_warped_torus(WarpedTorusConfig {
            profiles: vec![Profile::two_plus_sin(), Profile::constant(1.0)],
            n_grid: 16,
            window: 3,
        }).unwrap();
        let ell = Character::new(&[0, 0]);
        let options = CheckOptions::default();
        let reference = run_full_check(&base, &ell, &options).unwrap();
        let theta = ThetaMatrix::two(Turn::exact(p, q).unwrap()).unwrap();
        let report = run_full_check(&deform(base, &theta).unwrap(), &ell, &options).unwrap();
        prop_assert_eq!(&report.verdicts, &reference.verdicts);
        for ((_, a), (_, b)) in report.scalar_diagnostics().iter().zip(&reference.scalar_diagnostics()) {
            prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn certificate_bounds_every_scanned_sector(l0 in -2i64..=2, l1 in -2i64..=2, amplitude in 0.0..0.9f64) {
        let model = build_warped_torus(WarpedTorusConfig {
            profiles: vec![Profile::SinBump { base: 2.0, amplitude, frequency: 1 }, Profile::constant(1.0)],
            n_grid: 16,
            window: 3,
        }).unwrap();
        let ell = Character::new(&[l0, l1]);
        let options = CheckOptions { checks: CheckSet { certificate: true, positivity: true, ..CheckSet::none() }, ..CheckOptions::default() };
        let report = run_full_check(&model, &ell, &options).unwrap();
        let check = report.certificate_check.unwrap();
        prop_assert!(check.valid, "worst margin {}", check.worst_margin);
    }

    #[test]
    fn sphere_factorises_exactly_at_k_and_k_minus_one(k in -3i64..=3, offset in -2i64..=2) {
        let ell = k + offset;
        let model = build_sphere(SphereConfig { k_lift: k, n_grid: 64, window: k.abs() + 5, margin: 0.1, poles: false }).unwrap();
        let report = run_full_check(&model, &Character::new(&[ell]), &CheckOptions::default()).unwrap();
        let expected = if ell == k || ell == k - 1 { Verdict::Pass } else { Verdict::Fail };
        prop_assert_eq!(report.factorises, expected, "k = {}, ℓ = {}", k, ell);
    }
}
