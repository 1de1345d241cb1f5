use std::collections::BTreeMap;

use super::*;
use crate::hermite::hermite_eval;
use crate::seed;

fn quad() -> QuadSpec {
    QuadSpec::default()
}

/// Composite Simpson of a smooth integrand on [a, b].
fn simpson(a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = 20_000usize; // even
    let h = (b - a) / n as f64;
    let mut acc = g(a) + g(b);
    for i in 1..n {
        let u = a + i as f64 * h;
        acc += g(u) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// E[1{u<=c} g(u)] under the normal weight, with the integration stopped
/// exactly at the jump so Simpson keeps its full order. Independent of the
/// closed forms under test.
fn simpson_half_line(c: f64, g: impl Fn(f64) -> f64) -> f64 {
    simpson(-12.0, c.min(12.0), |u| g(u) * u.norm_pdf())
}

/// E[g(U)] over the effective support of the normal weight.
fn simpson_full_line(g: impl Fn(f64) -> f64) -> f64 {
    simpson(-12.0, 12.0, |u| g(u) * u.norm_pdf())
}

fn half_space(v: &[f64], c: f64) -> ClassMember<f64> {
    ClassMember::HalfSpace {
        direction: v.to_vec(),
        offset: c,
    }
}

fn poly(terms: &[(&[u32], f64)]) -> ClassMember<f64> {
    let coefficients: BTreeMap<_, _> = terms
        .iter()
        .map(|(e, c)| (MultiIndex::new(e.to_vec()), *c))
        .collect();
    ClassMember::Polynomial { coefficients }
}

#[test]
fn mean_examples() {
    let m = half_space(&[1.0, 0.0], 0.0);
    assert_eq!(class_mean(&m, 2, &quad()).unwrap().value, 0.5);

    let ball: ClassMember<f64> = ClassMember::Ball { radius: 50.0 };
    let v = class_mean(&ball, 2, &quad()).unwrap().value;
    assert!((v - 1.0).abs() < 1e-12);

    // x_1^2 = H_(2,0) + 1: mean is the order-zero coefficient.
    let f = poly(&[(&[0, 0], 1.0), (&[2, 0], 1.0)]);
    assert_eq!(class_mean(&f, 2, &quad()).unwrap().value, 1.0);
}

#[test]
fn polynomial_mean_agrees_with_quadrature() {
    // Same integrand via the custom route (tensor Gauss-Hermite): smooth,
    // so the rule is exact.
    let f = ClassMember::Custom {
        f: std::sync::Arc::new(|x: &[f64]| x[0] * x[0]),
        bound: f64::INFINITY,
        label: "x1^2".into(),
    };
    let got = class_mean(&f, 2, &quad()).unwrap();
    assert_eq!(got.route, Route::TensorGaussHermite);
    assert!((got.value - 1.0).abs() < 1e-10, "{}", got.value);
}

#[test]
fn coefficient_examples() {
    // E[x_1 H_(1,0,0)] = 1.
    let f = poly(&[(&[1, 0, 0], 1.0)]);
    let l = MultiIndex::new(vec![1, 0, 0]);
    assert_eq!(hermite_coefficient(&f, 3, &l, &quad()).unwrap().value, 1.0);

    // f = x_1^2: J_(2,0) = E[x^4 - x^2] = 2.
    let f = poly(&[(&[0, 0], 1.0), (&[2, 0], 1.0)]);
    let l = MultiIndex::new(vec![2, 0]);
    assert_eq!(hermite_coefficient(&f, 2, &l, &quad()).unwrap().value, 2.0);
}

#[test]
fn half_line_coefficient_matches_density_formula_and_quadrature() {
    for &c in &[-1.2, 0.0, 0.7, 1.5] {
        let member = half_space(&[1.0], c);
        let l = MultiIndex::new(vec![1]);
        let got = hermite_coefficient(&member, 1, &l, &quad()).unwrap();
        assert_eq!(got.route, Route::ClosedForm);
        // Gaussian density formula.
        assert!((got.value + c.norm_pdf()).abs() < 1e-15, "c={c}");
        // Independent high-order quadrature oracle.
        let oracle = simpson_half_line(c, |u| u);
        assert!((got.value - oracle).abs() < 1e-9, "c={c}: {} vs {oracle}", got.value);
    }
}

#[test]
fn half_space_coefficients_factor_through_direction() {
    // J_l = u_m(c/|v|) prod (v_i/|v|)^{l_i}; oracle by Simpson for the
    // univariate factor at several orders.
    let v = [3.0, -4.0]; // norm 5
    let c = 1.0;
    let member = half_space(&v, c);
    for (exps, m) in [(vec![1u32, 0], 1usize), (vec![1, 1], 2), (vec![2, 1], 3)] {
        let l = MultiIndex::new(exps.clone());
        let got = hermite_coefficient(&member, 2, &l, &quad()).unwrap().value;
        let univ = simpson_half_line(c / 5.0, |u| hermite_eval(m, u));
        let expect = univ
            * (v[0] / 5.0).powi(exps[0] as i32)
            * (v[1] / 5.0).powi(exps[1] as i32);
        assert!((got - expect).abs() < 1e-9, "l={l}: {got} vs {expect}");
    }
}

#[test]
fn rectangle_coefficients_factor_per_axis() {
    let member = ClassMember::Hyperrectangle {
        corner: vec![0.5, -0.3],
    };
    let l = MultiIndex::new(vec![2, 1]);
    let got = hermite_coefficient(&member, 2, &l, &quad()).unwrap().value;
    let expect =
        simpson_half_line(0.5, |u| hermite_eval(2, u)) * simpson_half_line(-0.3, |u| u);
    assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
}

#[test]
fn ball_order_two_closed_form_matches_qmc() {
    // p = 4 exercises the QMC fallback as the oracle.
    let member = ClassMember::Ball { radius: 1.8 };
    let l = MultiIndex::new(vec![2, 0, 0, 0]);
    let closed = hermite_coefficient(&member, 4, &l, &quad()).unwrap();
    assert_eq!(closed.route, Route::ClosedForm);
    let qspec = QuadSpec {
        tensor_order: 64,
        ..QuadSpec::default()
    };
    let (mc, se) = crate::quadrature::qmc_gaussian(4, &qspec, |x: &[f64]| {
        member.eval(x) * (x[0] * x[0] - 1.0)
    });
    assert!(
        (closed.value - mc).abs() < 4.0 * se.max(1e-4),
        "closed {} vs qmc {mc} (se {se})",
        closed.value
    );
}

#[test]
fn rank_examples() {
    let q = quad();
    let cls = FunctionClass::new(2, vec![poly(&[(&[1, 0], 1.0)])], q).unwrap();
    assert_eq!(hermite_rank(&cls, 4, 1e-8).unwrap(), 1);

    // x_1^2 - 1 = H_(2,0): rank 2.
    let cls = FunctionClass::new(2, vec![poly(&[(&[2, 0], 1.0)])], q).unwrap();
    assert_eq!(hermite_rank(&cls, 4, 1e-8).unwrap(), 2);

    // Half-space grid: J_(1) = -phi(c) != 0.
    let members: Vec<_> = [-1.0, 0.0, 1.0]
        .iter()
        .map(|&c| half_space(&[1.0, 0.0], c))
        .collect();
    let cls = FunctionClass::new(2, members, q).unwrap();
    assert_eq!(hermite_rank(&cls, 4, 1e-8).unwrap(), 1);

    // Ball class: order-1 coefficients vanish by symmetry, rank 2.
    let cls = FunctionClass::new(
        2,
        vec![ClassMember::Ball { radius: 1.5 }],
        q,
    )
    .unwrap();
    assert_eq!(hermite_rank(&cls, 4, 1e-8).unwrap(), 2);

    // Degenerate: zero function has no rank below the cap.
    let cls = FunctionClass::new(2, vec![poly(&[(&[0, 0], 3.0)])], q).unwrap();
    assert!(matches!(
        hermite_rank(&cls, 4, 1e-8),
        Err(Error::RankUndetermined { .. })
    ));
}

#[test]
fn project_leading_examples() {
    let q = quad();
    // f = x_1 + x_2 at m = 1.
    let f = poly(&[(&[1, 0], 1.0), (&[0, 1], 1.0)]);
    let proj = project_leading(&f, 2, 1, &q).unwrap();
    assert_eq!(proj.coefficient(&MultiIndex::new(vec![1, 0])), 1.0);
    assert_eq!(proj.coefficient(&MultiIndex::new(vec![0, 1])), 1.0);

    // Ball indicator: order-1 projection vanishes identically.
    let ball = ClassMember::Ball { radius: 1.5 };
    let proj = project_leading(&ball, 2, 1, &q).unwrap();
    assert_eq!(proj.max_abs(), 0.0);

    // Order-2 projection: equal diagonal entries, zero cross term.
    let proj = project_leading(&ball, 2, 2, &q).unwrap();
    let d1 = proj.coefficient(&MultiIndex::new(vec![2, 0]));
    let d2 = proj.coefficient(&MultiIndex::new(vec![0, 2]));
    let cross = proj.coefficient(&MultiIndex::new(vec![1, 1]));
    assert!(d1 < 0.0, "conditioning on the ball shrinks X^2: {d1}");
    assert_eq!(d1, d2);
    assert_eq!(cross, 0.0);
    // Chi-square CDF oracle.
    let r2 = 1.5f64 * 1.5;
    let expect = f64::chi2_cdf(4, r2) - f64::chi2_cdf(2, r2);
    assert!((d1 - expect).abs() < 1e-14);
}

#[test]
fn remainder_has_rank_m_plus_one() {
    // 1{u <= c} - Phi(c) + phi(c) u has vanishing coefficients at orders
    // <= 1 and a nonzero order-2 coefficient for c != 0 (the fact behind
    // the moment bound for bracket differences).
    for &c in &[-0.7, 0.4, 1.1] {
        let mean = c.norm_cdf();
        let j1 = -c.norm_pdf();
        // E[rem * g] = E[1{u<=c} g] - mean E[g] - j1 E[u g], each piece smooth.
        let coef = |g: &dyn Fn(f64) -> f64| {
            simpson_half_line(c, g) - mean * simpson_full_line(g)
                - j1 * simpson_full_line(|u| u * g(u))
        };
        let c0 = coef(&|_u| 1.0);
        let c1 = coef(&|u| u);
        let c2 = coef(&|u| hermite_eval(2, u));
        assert!(c0.abs() < 1e-8, "c={c}: order-0 {c0}");
        assert!(c1.abs() < 1e-8, "c={c}: order-1 {c1}");
        assert!((c2 + c * c.norm_pdf()).abs() < 1e-8, "c={c}: order-2 {c2}");
        assert!(c2.abs() > 1e-3, "c={c}: remainder rank must be exactly 2");
    }

    // Same for a difference h - g of two class members (the bracket case).
    let (ca, cb) = (-0.2, 0.9);
    let mean = cb.norm_cdf() - ca.norm_cdf();
    let j1 = -cb.norm_pdf() + ca.norm_pdf();
    let coef = |g: &dyn Fn(f64) -> f64| {
        simpson_half_line(cb, g) - simpson_half_line(ca, g) - mean * simpson_full_line(g)
            - j1 * simpson_full_line(|u| u * g(u))
    };
    let c0 = coef(&|_u| 1.0);
    let c1 = coef(&|u| u);
    assert!(c0.abs() < 1e-8 && c1.abs() < 1e-8, "difference remainder: {c0}, {c1}");
}

#[test]
fn bracket_cover_counts() {
    let q = quad();
    let members: Vec<_> = [-1.0, 0.0, 1.5]
        .iter()
        .map(|&c| half_space(&[1.0], c))
        .collect();
    let cls = FunctionClass::new(1, members, q).unwrap();

    let cover = build_bracket_cover(&cls, 1.0).unwrap();
    assert_eq!(cover.count(), 1);
    assert!(matches!(cover.brackets()[0].lower, BracketFn::Zero));
    assert!(matches!(cover.brackets()[0].upper, BracketFn::One));

    let cover = build_bracket_cover(&cls, 0.1).unwrap();
    assert_eq!(cover.count(), 100);

    let cls = FunctionClass::new(2, vec![ClassMember::Ball { radius: 1.0 }], q).unwrap();
    let cover = build_bracket_cover(&cls, 0.1).unwrap();
    assert_eq!(cover.count(), 100);
}

#[test]
fn bracket_cover_rejects_unsupported() {
    let q = quad();
    let cls = FunctionClass::new(2, vec![poly(&[(&[1, 0], 1.0)])], q).unwrap();
    assert!(matches!(
        build_bracket_cover(&cls, 0.5),
        Err(Error::UnsupportedClassKind { .. })
    ));

    // Mixed directions are not a monotone one-parameter family.
    let cls = FunctionClass::new(
        2,
        vec![half_space(&[1.0, 0.0], 0.0), half_space(&[0.0, 1.0], 0.0)],
        q,
    )
    .unwrap();
    assert!(build_bracket_cover(&cls, 0.5).is_err());
}

#[test]
fn bracket_validity_monte_carlo() {
    let q = quad();
    let mut rng = seed::stream(555, &[]);
    let eps = 0.35f64;

    // Three family shapes, each checked on 10^4 Gaussian probes.
    let classes: Vec<FunctionClass<f64>> = vec![
        FunctionClass::new(
            2,
            [-1.2, -0.3, 0.0, 0.8, 2.0]
                .iter()
                .map(|&c| half_space(&[0.6, 0.8], c))
                .collect(),
            q,
        )
        .unwrap(),
        FunctionClass::new(
            2,
            [0.5, 1.0, 1.7]
                .iter()
                .map(|&r| ClassMember::Ball { radius: r })
                .collect(),
            q,
        )
        .unwrap(),
        FunctionClass::new(
            2,
            vec![
                ClassMember::Hyperrectangle { corner: vec![0.0, 0.5] },
                ClassMember::Hyperrectangle { corner: vec![-1.0, 1.0] },
            ],
            q,
        )
        .unwrap(),
    ];

    for cls in &classes {
        let probes: Vec<Vec<f64>> = (0..10_000)
            .map(|_| (0..2).map(|_| f64::standard_normal(&mut rng)).collect())
            .collect();
        let cover = build_bracket_cover(cls, eps).unwrap();
        for member in cls.members() {
            let idx = cover
                .assign(member, &probes)
                .expect("every member lies in some bracket");
            let b = &cover.brackets()[idx];
            for x in &probes {
                let f = member.eval(x);
                assert!(b.lower.eval(x) <= f && f <= b.upper.eval(x));
            }
        }
        for b in cover.brackets() {
            let sq: Vec<f64> = probes
                .iter()
                .map(|x| {
                    let d = b.upper.eval(x) - b.lower.eval(x);
                    d * d
                })
                .collect();
            let n = sq.len() as f64;
            let mean = sq.iter().sum::<f64>() / n;
            let var = sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let se_mean = (var / n).sqrt();
            let gap = mean.sqrt();
            let se_gap = if gap > 0.0 { se_mean / (2.0 * gap) } else { se_mean.sqrt() };
            assert!(
                gap <= eps * (1.0 + 3.0 * (se_gap / eps.max(1e-12))) + 3.0 * se_gap,
                "gap {gap} exceeds eps {eps} beyond MC error {se_gap}"
            );
        }
    }
}

#[test]
fn descriptor_builds_grids() {
    let d = ClassDescriptor::HalfSpace {
        directions: vec![],
        fan: Some(25),
        offsets: vec![0.0],
    };
    let cls: FunctionClass<f64> = d.build(2, quad()).unwrap();
    assert_eq!(cls.len(), 25);
    assert_eq!(cls.uniform_bound(), Some(1.0));
    assert_eq!(hermite_rank(&cls, 3, 1e-8).unwrap(), 1);

    let d = ClassDescriptor::Ball {
        radii: vec![0.5, 1.0, 1.5],
    };
    let cls: FunctionClass<f64> = d.build(3, quad()).unwrap();
    assert_eq!(cls.len(), 3);

    let json = serde_json::to_string(&d).unwrap();
    let back: ClassDescriptor = serde_json::from_str(&json).unwrap();
    assert_eq!(back, d);
}

#[test]
fn descriptor_rejects_unknown_fields() {
    let err = serde_json::from_str::<ClassDescriptor>(
        r#"{"kind":"ball","radii":[1.0],"typo_field":3}"#,
    );
    assert!(err.is_err());
}
