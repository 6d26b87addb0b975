//! Randomized invariants over the public surface: payoff shape, ladder
//! coherence, capital identities, and replay determinism.

use approx::assert_relative_eq;
use gtpsim_core::*;
use proptest::collection::vec;
use proptest::prelude::*;

fn arb_table() -> impl Strategy<Value = HedgeKind> {
    vec((0.01..5.0f64, 0.0..10.0f64), 2..6).prop_map(|pairs| {
        let mut t = 0.0;
        let knots = pairs
            .into_iter()
            .map(|(gap, v)| {
                t += gap;
                (t, v)
            })
            .collect();
        HedgeKind::Symmetric(SymmetricFn::Table(knots))
    })
}

fn arb_hedge() -> impl Strategy<Value = HedgeKind> {
    prop_oneof![
        (0.01..7.0f64).prop_map(|d| HedgeKind::power(1.0 + d)),
        (0.0..50.0f64).prop_map(HedgeKind::call),
        (1.05..1.95f64, 0u64..40).prop_map(|(r, l)| HedgeKind::powered_call(r, l)),
        Just(HedgeKind::Symmetric(SymmetricFn::Abs)),
        Just(HedgeKind::Symmetric(SymmetricFn::AbsLogSq)),
        Just(HedgeKind::Symmetric(SymmetricFn::AbsLog1p)),
        (0.0..5.0f64).prop_map(|v| HedgeKind::Symmetric(SymmetricFn::Constant(v))),
        arb_table(),
    ]
}

// Mirrored atoms keep the mean at exactly zero, which the constructor
// demands.
fn arb_symmetric_measure() -> impl Strategy<Value = PricingMeasure> {
    vec((0.05..4.0f64, 0.05..1.0f64), 1..5).prop_map(|atoms| {
        let total: f64 = 2.0 * atoms.iter().map(|&(_, w)| w).sum::<f64>();
        let support: Vec<(f64, f64)> = atoms
            .iter()
            .flat_map(|&(x, w)| [(x, w / total), (-x, w / total)])
            .collect();
        PricingMeasure::discrete(support).unwrap()
    })
}

fn arb_family() -> impl Strategy<Value = LadderFamily> {
    prop_oneof![
        Just(LadderFamily::Call),
        (1.05..1.95f64).prop_map(|r| LadderFamily::PoweredCall { r }),
        (1.05..1.95f64).prop_map(|r| LadderFamily::CallAtPoweredStrikes { r }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hedge_payoffs_are_even_nonnegative_and_finite(h in arb_hedge(), x in -1e6..1e6f64) {
        h.validate().unwrap();
        let p = h.eval(x);
        prop_assert!(p.is_finite(), "{h:?} at {x} gave {p}");
        prop_assert!(p >= 0.0, "{h:?} at {x} gave {p}");
        prop_assert_eq!(p.to_bits(), h.eval(-x).to_bits());
    }

    #[test]
    fn spreads_sit_between_their_indicators(y in 0.0..100.0f64, k in 0u64..60) {
        let s = spread_payoff_level(y, k);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
        if y >= (k + 1) as f64 {
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
        if y <= k as f64 {
            prop_assert_eq!(s, 0.0);
        }
    }

    #[test]
    fn trapezoids_dominate_their_interval_indicator(y in 0.0..100.0f64, k in 0u64..60) {
        let t = trapezoid_payoff_level(y, k);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&t));
        let kf = k as f64;
        if (kf..=kf + 1.0).contains(&y) {
            prop_assert!((t - 1.0).abs() < 1e-12, "flat top at {y}, k={k}: {t}");
        }
        if k == 0 && y <= 1.0 {
            prop_assert!((t - 1.0).abs() < 1e-12);
        }
        if (k >= 1 && y <= kf - 1.0) || y >= kf + 2.0 {
            prop_assert!(t.abs() < 1e-12, "support leak at {y}, k={k}: {t}");
        }
    }

    #[test]
    fn hedged_moves_clip_from_below_and_never_shrink(
        x in -50.0..50.0f64,
        s in 0.0..40.0f64,
        mirror in any::<bool>(),
    ) {
        let m = hedged_move_value(x, s, mirror);
        let raw = if mirror { -x } else { x };
        prop_assert!(m >= -s - 1e-9, "clip failed: {m} < -{s}");
        prop_assert!(m >= raw);
        if x.abs() <= s {
            prop_assert_eq!(m.to_bits(), raw.to_bits());
        } else {
            prop_assert_eq!(m.to_bits(), (raw + (x.abs() - s)).to_bits());
        }
    }

    #[test]
    fn random_symmetric_ladders_are_coherent(
        m in arb_symmetric_measure(),
        fam in arb_family(),
    ) {
        // depth 24 clears every family's level coordinate for |x| <= 4
        let ladder = PriceLadder::from_measure(&m, fam, 24).unwrap();
        let report = check_coherence(&ladder, 1e-9);
        prop_assert!(report.pass(), "{report:?}");
        for k in 0..ladder.depth() {
            prop_assert!(ladder.price(k).unwrap() >= ladder.price(k + 1).unwrap() - 1e-12);
        }
    }

    #[test]
    fn upcrossing_counts_ignore_affine_maps(
        steps in vec(-10i32..=10, 0..60),
        a_idx in -10i32..8,
        gap in 1u32..6,
        alpha in 0.25..8.0f64,
        beta in -16.0..16.0f64,
    ) {
        // quarter-offset thresholds never collide with the half-integer
        // series values, so the comparisons survive the affine map
        let series: Vec<f64> = steps.iter().map(|&v| v as f64 / 2.0).collect();
        let a = a_idx as f64 / 2.0 + 0.25;
        let b = a + gap as f64 / 2.0;
        let direct = upcrossing_count(&series, a, b).unwrap();
        let mapped: Vec<f64> = series.iter().map(|&v| alpha * v + beta).collect();
        let mapped_count = upcrossing_count(&mapped, alpha * a + beta, alpha * b + beta).unwrap();
        prop_assert_eq!(direct, mapped_count);
    }

    #[test]
    fn epsilon_hedged_terms_stay_above_the_floor(
        x in -100.0..100.0f64,
        n in 1u64..80,
        mirror in any::<bool>(),
    ) {
        let m = PricingMeasure::two_sided_exponential(1.0).unwrap();
        let mut ladder = PriceLadder::from_measure(&m, LadderFamily::Call, 8).unwrap();
        let floor = -(1.0 + ladder.nu0());
        let t = epsilon_hedged_term(&mut ladder, false, mirror, n, x).unwrap();
        prop_assert!(t >= floor - 1e-12, "term {t} broke the floor {floor}");
    }
}

type FloorFn = Box<dyn FnMut(u64, f64) -> f64>;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_lower_bounds_track_capital(
        moves in vec(-3.0..3.0f64, 1..160),
        nu in 0.1..3.0f64,
        weight_exp in 1.1..3.0f64,
    ) {
        let ctx = SingleHedgeContext::new(HedgeKind::power(2.0), nu, 1.0, None).unwrap();
        let measure = PricingMeasure::uniform_on(&[-2.0, 0.0, 2.0]).unwrap();
        let ladder = PriceLadder::from_measure(&measure, LadderFamily::Call, 8).unwrap();

        let mut count_bound = threshold_count_bound(&ladder);
        let variance = variance_forcer(ladder.clone()).unwrap();
        let mut var_bound = truncated_variance_bound(&variance);

        let mut players: Vec<(Box<dyn SkepticStrategy>, FloorFn)> = vec![
            (
                Box::new(inverse_payoff_buyer(ctx.clone()).unwrap()),
                {
                    let mut b = inverse_hedge_bound(&ctx).unwrap();
                    Box::new(move |n, x| {
                        b.update(n, x);
                        b.value()
                    })
                },
            ),
            (
                Box::new(weighted_inverse_buyer(ctx.clone(), weight_exp).unwrap()),
                {
                    let mut b = weighted_hedge_bound(&ctx, weight_exp).unwrap();
                    Box::new(move |n, x| {
                        b.update(n, x);
                        b.value()
                    })
                },
            ),
            (
                Box::new(spread_count_forcer(ladder.clone()).unwrap()),
                Box::new(move |n, x| {
                    count_bound.update(n, x);
                    count_bound.value()
                }),
            ),
            (
                Box::new(variance),
                Box::new(move |n, x| {
                    var_bound.update(n, x);
                    var_bound.value()
                }),
            ),
        ];

        for (skeptic, bound) in &mut players {
            let id = skeptic.id().to_string();
            let variant = skeptic.variant();
            let mut reality = ReplayReality::new(moves.clone());
            let cfg = RunConfig::new(moves.len() as u64, variant);
            run_game_observed(skeptic.as_mut(), &mut reality, &cfg, |n, x, _, capital| {
                let floor = bound(n, x);
                assert!(
                    capital >= floor - 1e-7 * floor.abs().max(1.0),
                    "{id}: capital {capital} under its floor {floor} at round {n}"
                );
            })
            .unwrap();
        }
    }

    #[test]
    fn mixture_capital_is_the_weighted_component_sum(
        moves in vec(-2.0..2.0f64, 1..100),
        w in 0.1..0.9f64,
        nu in 0.2..1.0f64,
    ) {
        let ctx_a = SingleHedgeContext::new(HedgeKind::power(2.0), nu, 1.0, None).unwrap();
        let ctx_b =
            SingleHedgeContext::new(HedgeKind::power(2.0), nu, 1.0, Some(0.05)).unwrap();

        let run = |skeptic: &mut dyn SkepticStrategy| -> f64 {
            let mut reality = ReplayReality::new(moves.clone());
            let cfg = RunConfig::new(moves.len() as u64, skeptic.variant());
            run_game(skeptic, &mut reality, &cfg).unwrap().final_capital
        };

        let k_a = run(&mut inverse_payoff_buyer(ctx_a.clone()).unwrap());
        let k_b = run(&mut epsilon_single(ctx_b.clone(), false).unwrap());

        let mut mixed = combine_strategies(
            "mix",
            vec![
                (Box::new(inverse_payoff_buyer(ctx_a).unwrap()) as Box<dyn SkepticStrategy>, w),
                (Box::new(epsilon_single(ctx_b, false).unwrap()) as Box<dyn SkepticStrategy>, 1.0 - w),
            ],
        )
        .unwrap();
        let k_mix = run(&mut mixed);

        assert_relative_eq!(k_mix, w * k_a + (1.0 - w) * k_b, max_relative = 1e-9, epsilon = 1e-12);
    }

    #[test]
    fn recorded_runs_replay_bit_for_bit(seed in any::<u64>(), rounds in 1u64..250) {
        let ctx =
            SingleHedgeContext::new(HedgeKind::power(2.0), 2.0 / 3.0, 1.0, Some(0.1)).unwrap();
        let mut skeptic = slln_single_mixture(ctx).unwrap();
        let measure = PricingMeasure::uniform_on(&[-1.0, 0.0, 1.0]).unwrap();
        let mut reality = IidReality::new(measure, seed, 7);
        let mut cfg = RunConfig::new(rounds, skeptic.variant());
        cfg.record_bets = true;
        let history = run_game(&mut skeptic, &mut reality, &cfg).unwrap();
        let replayed = history.replay_capital().unwrap();
        prop_assert_eq!(replayed.len(), history.rounds.len());
        for (r, k) in history.rounds.iter().zip(&replayed) {
            prop_assert_eq!(r.capital.to_bits(), k.to_bits());
        }
    }

    #[test]
    fn counting_detectors_count_and_nonnegative_series_never_fall(
        moves in vec(-6.0..6.0f64, 1..120),
    ) {
        let m = PricingMeasure::two_sided_exponential(1.0).unwrap();
        let ladder = PriceLadder::from_measure(&m, LadderFamily::Call, 8).unwrap();
        let detectors = plain_detector_set(HedgeKind::power(2.0), ladder).unwrap();
        let mut tracked: Vec<(EventDetector, f64)> =
            detectors.into_iter().map(|d| (d, 0.0)).collect();
        for (i, &x) in moves.iter().enumerate() {
            let n = (i + 1) as u64;
            for (d, prev) in &mut tracked {
                let v = d.update(n, x).unwrap();
                if d.has_nonnegative_terms() {
                    prop_assert!(
                        v >= *prev - 1e-12 * prev.abs().max(1.0),
                        "{} fell from {prev} to {v} at round {n}",
                        d.id()
                    );
                }
                if d.id() == "E2" {
                    prop_assert_eq!(v, v.round());
                }
                *prev = v;
            }
        }
    }

    #[test]
    fn log_capital_sandwich_brackets_every_round(
        moves in vec(-1.0..1.0f64, 1..200),
        eps in 0.01..0.15f64,
        nu in 0.05..0.4f64,
        mirror in any::<bool>(),
    ) {
        let hedge = HedgeKind::power(2.0);
        let ctx = SingleHedgeContext::new(hedge.clone(), nu, 1.0, Some(eps)).unwrap();
        let first = ctx.first_active_round();
        let mut skeptic = epsilon_single(ctx, mirror).unwrap();
        let mut reality = ReplayReality::new(moves.clone());
        let cfg = RunConfig::new(moves.len() as u64, skeptic.variant());
        let mut sandwich = LogCapitalSandwich::new(eps, 1.0);
        run_game_observed(&mut skeptic, &mut reality, &cfg, |n, x, _, capital| {
            if n < first {
                return;
            }
            let t = epsilon_single_term(&hedge, nu, mirror, n, x).unwrap();
            sandwich.add_term(t);
            let (lower, upper) = sandwich.bounds();
            let log_k = capital.ln();
            let tol = 1e-9 * n as f64;
            assert!(
                lower - tol <= log_k && log_k <= upper + tol,
                "round {n}: log capital {log_k} outside [{lower}, {upper}]"
            );
        })
        .unwrap();
    }
}
