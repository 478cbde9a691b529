use gravdg::fluxes::{ec_flux, es_flux_lf, physical_flux};
use gravdg::limiter::{cell_average, limit_cell, total_cell_entropy, LimiterParams};
use gravdg::physics::{entropy_vars, gravity_source, potential_flux};
use gravdg::{cons_to_prim, prim_to_cons, rrf_wave_speed, Gas, Prim1, Prim2, State1, State2};
use proptest::prelude::*;

fn gas_strategy() -> impl Strategy<Value = Gas> {
    prop_oneof![Just(1.4), Just(5.0 / 3.0), 1.05f64..1.66].prop_map(|g| Gas::new(g).unwrap())
}

fn prim2() -> impl Strategy<Value = Prim2> {
    (-3f64..3.0, -3f64..3.0, -3f64..3.0, -3f64..3.0)
        .prop_map(|(lr, lp, u, v)| Prim2::new(10f64.powf(lr / 2.0), [u, v], 10f64.powf(lp / 2.0)))
}

fn prim1() -> impl Strategy<Value = Prim1> {
    (-3f64..3.0, -3f64..3.0, -4f64..4.0).prop_map(|(lr, lp, u)| Prim1::new(10f64.powf(lr), [u], 10f64.powf(lp)))
}

/// Largest wave speed of the exact Riemann fan, by bisection on the pressure
/// function.
fn exact_fan_speed(l: &Prim1, r: &Prim1, g: f64) -> f64 {
    let (cl, cr) = ((g * l.p / l.rho).sqrt(), (g * r.p / r.rho).sqrt());
    let f = |p: f64, w: &Prim1, c: f64| {
        if p > w.p {
            let a = 2.0 / ((g + 1.0) * w.rho);
            let b = (g - 1.0) / (g + 1.0) * w.p;
            (p - w.p) * (a / (p + b)).sqrt()
        } else {
            2.0 * c / (g - 1.0) * ((p / w.p).powf((g - 1.0) / (2.0 * g)) - 1.0)
        }
    };
    let du = r.vel[0] - l.vel[0];
    let total = |p: f64| f(p, l, cl) + f(p, r, cr) + du;
    let p_star = if total(0.0) >= 0.0 {
        0.0
    } else {
        let mut hi = l.p.max(r.p);
        while total(hi) < 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let speed = |w: &Prim1, c: f64, sign: f64| {
        let q = if p_star > w.p {
            (1.0 + (g + 1.0) / (2.0 * g) * (p_star / w.p - 1.0)).sqrt()
        } else {
            1.0
        };
        w.vel[0] + sign * c * q
    };
    speed(l, cl, -1.0).abs().max(speed(r, cr, 1.0).abs())
}

fn random_cell(states: Vec<(f64, f64, f64)>, gas: &Gas) -> Vec<State1> {
    states
        .into_iter()
        .map(|(rho, u, e)| {
            let mut s = prim_to_cons(&Prim1::new(rho.abs() + 1e-3, [u], 1.0), gas);
            s.rho = rho;
            s.energy = e;
            s
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn primitive_round_trip(w in prim2(), gas in gas_strategy()) {
        let back = cons_to_prim(&prim_to_cons(&w, &gas), &gas);
        prop_assert!((back.rho - w.rho).abs() <= 1e-14 * w.rho);
        prop_assert!((back.p - w.p).abs() <= 1e-10 * (w.p + w.rho * (w.vel[0].powi(2) + w.vel[1].powi(2))));
        for d in 0..2 {
            prop_assert!((back.vel[d] - w.vel[d]).abs() <= 1e-13 * (1.0 + w.vel[d].abs()));
        }
    }

    #[test]
    fn entropy_variables_annihilate_gravity(w in prim2(), gx in -10f64..10.0, gy in -10f64..10.0, gas in gas_strategy()) {
        let u = prim_to_cons(&w, &gas);
        let v = entropy_vars(&u, &gas).unwrap();
        let s = gravity_source(&u, &[gx, gy]);
        let scale = v.max_abs() * s.max_abs();
        prop_assert!(v.dot(&s).abs() <= 1e-13 * scale.max(1.0));
    }

    #[test]
    fn ec_flux_conserves_entropy(l in prim2(), r in prim2(), gas in gas_strategy(), dir in 0usize..2) {
        let (ul, ur) = (prim_to_cons(&l, &gas), prim_to_cons(&r, &gas));
        let f = ec_flux(&ul, &ur, &gas, dir).unwrap();
        let dv = entropy_vars(&ur, &gas).unwrap() - entropy_vars(&ul, &gas).unwrap();
        let res = dv.dot(&f) - (potential_flux(&ur, dir) - potential_flux(&ul, dir));
        prop_assert!(res.abs() <= 1e-11 * f.max_abs().max(1.0) * dv.max_abs().max(1.0), "{res:e}");
    }

    #[test]
    fn ec_flux_symmetric_and_consistent(l in prim2(), r in prim2(), gas in gas_strategy(), dir in 0usize..2) {
        let (ul, ur) = (prim_to_cons(&l, &gas), prim_to_cons(&r, &gas));
        prop_assert_eq!(ec_flux(&ul, &ur, &gas, dir).unwrap(), ec_flux(&ur, &ul, &gas, dir).unwrap());
        let f = ec_flux(&ul, &ul, &gas, dir).unwrap();
        let pf = physical_flux(&ul, &gas, dir).unwrap();
        prop_assert!((f - pf).max_abs() <= 1e-13 * pf.max_abs().max(1.0));
    }

    #[test]
    fn lf_flux_is_entropy_stable(l in prim2(), r in prim2(), dir in 0usize..2, g in prop_oneof![Just(1.4), Just(5.0 / 3.0)]) {
        let gas = Gas::new(g).unwrap();
        let (ul, ur) = (prim_to_cons(&l, &gas), prim_to_cons(&r, &gas));
        let f = es_flux_lf(&ul, &ur, &gas, dir).unwrap();
        let dv = entropy_vars(&ur, &gas).unwrap() - entropy_vars(&ul, &gas).unwrap();
        let prod = dv.dot(&f) - (potential_flux(&ur, dir) - potential_flux(&ul, dir));
        prop_assert!(prod <= 1e-12 * f.max_abs().max(1.0) * dv.max_abs().max(1.0), "{prod:e}");
    }

    #[test]
    fn rrf_bounds_exact_fan(l in prim1(), r in prim1(), g in prop_oneof![Just(1.4), Just(5.0 / 3.0), 1.05f64..1.66]) {
        let gas = Gas::new(g).unwrap();
        let est = rrf_wave_speed(&prim_to_cons(&l, &gas), &prim_to_cons(&r, &gas), &gas, 0).unwrap();
        let exact = exact_fan_speed(&l, &r, g);
        prop_assert!(est >= exact * (1.0 - 1e-10), "rrf {est} < exact {exact}");
    }

    #[test]
    fn limiter_keeps_average_and_is_idempotent(
        nodes in prop::collection::vec((-0.5f64..3.0, -2f64..2.0, -0.5f64..6.0), 2..6),
    ) {
        let gas = Gas::default();
        let cell = random_cell(nodes, &gas);
        let basis = gravdg::Basis::new(cell.len() - 1).unwrap();
        let w = basis.weights();
        let avg = cell_average(&cell, w);
        prop_assume!(avg.rho > 1e-3 && avg.pressure(&gas) > 1e-3);
        let params = LimiterParams::default();
        let mut once = cell.clone();
        limit_cell(&mut once, w, &params, &gas).unwrap();
        prop_assert!((cell_average(&once, w) - avg).max_abs() <= 1e-14 * avg.max_abs().max(1.0));
        for u in &once {
            prop_assert!(u.rho >= params.eps * (1.0 - 1e-12));
            prop_assert!(u.pressure(&gas) >= params.eps * (1.0 - 1e-12));
        }
        let mut twice = once.clone();
        limit_cell(&mut twice, w, &params, &gas).unwrap();
        for (a, b) in twice.iter().zip(&once) {
            prop_assert!((*a - *b).max_abs() <= 1e-14 * b.max_abs().max(1.0));
        }
    }

    #[test]
    fn limiter_does_not_raise_entropy(
        nodes in prop::collection::vec((0.1f64..5.0, -2f64..2.0, 0.1f64..5.0), 3..6),
        bad in 0usize..6,
        tiny_rho in -15.5f64..-13.0,
        tiny_p in -15.5f64..-13.0,
    ) {
        let gas = Gas::default();
        let n = nodes.len();
        let mut cell: Vec<State1> = nodes
            .into_iter()
            .map(|(rho, u, p)| prim_to_cons(&Prim1::new(rho, [u], p), &gas))
            .collect();
        cell[bad % n] = prim_to_cons(&Prim1::new(10f64.powf(tiny_rho), [0.0], 10f64.powf(tiny_p)), &gas);
        let basis = gravdg::Basis::new(n - 1).unwrap();
        let w = basis.weights();
        let before = total_cell_entropy(&cell, w, &gas).unwrap();
        limit_cell(&mut cell, w, &LimiterParams::default(), &gas).unwrap();
        let after = total_cell_entropy(&cell, w, &gas).unwrap();
        prop_assert!(after <= before + 1e-12 * before.abs().max(1.0), "{before} -> {after}");
    }
}

#[test]
fn two_dimensional_state_alias_round_trip() {
    let gas = Gas::default();
    let u = State2::new(1.0, [0.5, -0.25], 3.0);
    let back = prim_to_cons(&cons_to_prim(&u, &gas), &gas);
    assert!((back - u).max_abs() < 1e-15);
}
