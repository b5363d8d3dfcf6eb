use heatlab::convlab::{l1_distance, Profile};
use heatlab::solvlab;
use heatlab::{ConcentrationSpec, HeatEngine, SpaceSpec};

fn engine(tag: &str) -> HeatEngine {
    HeatEngine::new(&SpaceSpec::from_tag(tag).unwrap()).unwrap()
}

#[test]
fn heat_profile_flow_is_a_delayed_kernel() {
    // u(t) = h_{t+s} and M̃ = e^{−sρ²}, so the deviation is h_{t+s} − e^{−sρ²}h_t.
    let e = engine("Hr:3");
    let s = 0.5;
    let rho2 = e.space.rho_sq();
    let m = solvlab::radial_mass(&e, Profile::Heat { s }).unwrap();
    assert!((m - (-s * rho2).exp()).abs() < 1e-7);
    for t in [5.0, 20.0] {
        let row = solvlab::distinguished_radial(&e, Profile::Heat { s }, t).unwrap();
        let nodes = solvlab::tilde_nodes(&e, t, 0.0);
        let mut want = 0.0;
        for n in &nodes {
            let a = e.ln_heat_kernel(t + s, &n.h).unwrap();
            let b = e.ln_heat_kernel(t, &n.h).unwrap() - s * rho2;
            let diff = (a.exp() - b.exp()).abs();
            want += (n.ln_w + e.phi0.ln_eval(&n.h).unwrap() + rho2 * t).exp() * diff;
        }
        assert!((row.l1 / want - 1.0).abs() < 1e-4, "t={t}: {} vs {want}", row.l1);
    }
}

#[test]
fn distinguished_deviations_decrease() {
    let e = engine("Hr:3");
    let rows: Vec<_> = [5.0, 20.0, 80.0]
        .iter()
        .map(|&t| solvlab::distinguished_radial(&e, Profile::bump(1.0), t).unwrap())
        .collect();
    assert!(rows.windows(2).all(|w| w[1].l1 < w[0].l1 && w[1].linf_norm < w[0].linf_norm));
}

#[test]
fn outside_sup_vanishes_in_rank_one() {
    let e = engine("Hr:2");
    let spec = ConcentrationSpec::default();
    let rows: Vec<[f64; 3]> = [10.0, 40.0, 160.0]
        .iter()
        .map(|&t| solvlab::outside_sup_tilde(&e, &spec, t).unwrap())
        .collect();
    for k in 0..2 {
        assert!(rows.windows(2).all(|w| w[1][k] < w[0][k]), "regime {k}: {rows:?}");
    }
    // μ(H) = |H| in rank one, so the wall regime is empty.
    assert!(rows.iter().all(|r| r[2] == 0.0));
}

#[test]
fn sup_norm_probe_is_comparable() {
    for tag in ["Hr:2", "Hr:3"] {
        let e = engine(tag);
        for t in [5.0, 40.0] {
            let s = solvlab::sup_norm_htilde(&e, t).unwrap();
            assert!(s.probe <= s.normalized * (1.0 + 1e-12));
            assert!(s.probe > 0.5 * s.normalized, "{tag} t={t}: {s:?}");
        }
    }
}

#[test]
fn widening_omega_tilde_lowers_outside_mass() {
    let e = engine("Hr:2");
    let narrow = ConcentrationSpec::default();
    let wide = ConcentrationSpec { scale: 0.5, ..narrow };
    for t in [10.0, 40.0] {
        assert!(solvlab::mass_outside_tilde(&e, &wide, t).unwrap() < solvlab::mass_outside_tilde(&e, &narrow, t).unwrap());
    }
}

#[test]
fn abel_transform_is_self_similar() {
    let e = engine("Hr:3");
    let base = solvlab::abel_check(&e, 1.0, 1.0).unwrap().0;
    for t in [4.0, 9.0] {
        let v = solvlab::abel_check(&e, t, t.sqrt()).unwrap().0 * t.sqrt();
        assert!((v / base - 1.0).abs() < 1e-3);
    }
}

#[test]
fn refined_residuals_bounded_and_offdomain_rejected() {
    let e = engine("Hr:3");
    let spec = ConcentrationSpec::default();
    let mut last = f64::INFINITY;
    for t in [10.0, 40.0, 160.0] {
        let r = solvlab::refined_asymptotics(&e, &spec, t, &[t.sqrt()]).unwrap();
        assert!(r.h_residual.abs() < last);
        last = r.h_residual.abs();
    }
    assert!(solvlab::refined_asymptotics(&e, &spec, 10.0, &[0.1]).is_err());
}

#[test]
fn ratio_gap_scaled_bounded() {
    let e = engine("Hr:2");
    let spec = ConcentrationSpec::default();
    let (zero, _) = solvlab::ratio_gap(&e, &spec, 20.0, 20f64.sqrt(), 0.0, 1.0).unwrap();
    assert!(zero.abs() < 1e-12);
    let scaled: Vec<f64> = [10.0f64, 40.0, 160.0]
        .iter()
        .map(|&t| solvlab::ratio_gap(&e, &spec, t, t.sqrt(), 1.0, 0.7).unwrap().1)
        .collect();
    assert!(scaled.iter().all(|v| v.is_finite() && v.abs() < 1.0));
}

#[test]
fn small_time_recovers_the_datum() {
    // The deviation from u₀ shrinks as t → 0; the bump edge limits how fast.
    let e = engine("Hr:3");
    let p = Profile::bump(1.0);
    let nodes = e.interval_nodes(0.0, 3.0, 0.05);
    let rs: Vec<f64> = nodes.iter().map(|n| n.h[0]).collect();
    let mut last = f64::INFINITY;
    for t in [0.4, 0.2, 0.1, 0.05] {
        let u = heatlab::convlab::evolve(&e, p, t, &rs).unwrap();
        let dev: f64 = nodes
            .iter()
            .zip(&u)
            .map(|(n, v)| n.ln_w.exp() * (v - p.value(&e, n.h[0]).unwrap()).abs())
            .sum();
        assert!(dev < last, "t={t}: {dev}");
        last = dev;
    }
    assert!(l1_distance(&e, p, p).unwrap() == 0.0);
}
