use std::sync::OnceLock;

use heatlab::convlab::offcenter::{busemann, polar_distance};
use heatlab::convlab::{l1_distance, Profile};
use heatlab::gamma::gamma;
use heatlab::harish::plancherel_density;
use heatlab::solvlab::{self, HalfSpacePoint};
use heatlab::spherical::rank1::{iwasawa_a_rank1, phi_rank1};
use heatlab::{HeatEngine, SpaceSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn h2() -> &'static HeatEngine {
    static E: OnceLock<HeatEngine> = OnceLock::new();
    E.get_or_init(|| HeatEngine::new(&SpaceSpec::from_tag("Hr:2").unwrap()).unwrap())
}

fn h3() -> &'static HeatEngine {
    static E: OnceLock<HeatEngine> = OnceLock::new();
    E.get_or_init(|| HeatEngine::new(&SpaceSpec::from_tag("Hr:3").unwrap()).unwrap())
}

proptest! {
    #[test]
    fn gamma_recurrence(x in -6.0f64..12.0, y in -8.0f64..8.0) {
        let z = Complex64::new(x, y);
        prop_assume!((z - z.re.round()).norm() > 1e-3 || z.re > 0.5);
        let lhs = gamma(z + 1.0).unwrap();
        let rhs = z * gamma(z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm());
    }

    #[test]
    fn plancherel_even_and_nonnegative(l in 0.0f64..60.0, tag in prop::sample::select(vec!["Hr:2", "Hr:5", "Hc:3", "Hq:2"])) {
        let sp = SpaceSpec::from_tag(tag).unwrap();
        let a = plancherel_density(&sp, &[l]);
        let b = plancherel_density(&sp, &[-l]);
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn phi_dominated_by_ground_state(l in 0.0f64..8.0, r in 0.0f64..25.0, tag in prop::sample::select(vec!["Hr:2", "Hr:3", "Hc:2"])) {
        let sp = SpaceSpec::from_tag(tag).unwrap();
        let jac = sp.jacobi().unwrap();
        let v = phi_rank1(&jac, Complex64::new(l, 0.0), r).unwrap();
        let p0 = heatlab::spherical::phi0(&sp, &[r]).unwrap();
        prop_assert!(v.norm() <= p0 * (1.0 + 1e-7));
    }

    #[test]
    fn busemann_is_one_lipschitz(th in 0.0f64..std::f64::consts::PI, s in 0.0f64..4.0, r in 0.0f64..40.0) {
        let b = busemann(th, s, r);
        prop_assert!(b.abs() <= s + 1e-12);
        // |B(r) − limit| shrinks with r.
        let lim = -iwasawa_a_rank1(th, s);
        prop_assert!((busemann(th, s, r + 5.0) - lim).abs() <= (b - lim).abs() + 1e-12);
    }

    #[test]
    fn polar_distance_triangle(r in 0.0f64..20.0, th in 0.0f64..std::f64::consts::PI, s in 0.0f64..5.0) {
        let d = polar_distance(r, th, s);
        prop_assert!(d <= r + s + 1e-9);
        prop_assert!(d >= (r - s).abs() - 1e-9);
    }

    #[test]
    fn kostant_inequality(x in prop::collection::vec(-20.0f64..20.0, 2), ln_h in -12.0f64..12.0) {
        let p = HalfSpacePoint::new(x, ln_h.exp()).unwrap();
        prop_assert!(solvlab::kostant_check(1.0, &p));
    }

    #[test]
    fn kernel_positive_and_radially_decreasing(t in 0.1f64..60.0, r in 0.0f64..30.0) {
        let e = h3();
        let a = e.ln_heat_kernel(t, &[r]).unwrap();
        let b = e.ln_heat_kernel(t, &[r + 0.5]).unwrap();
        prop_assert!(a.is_finite() && b < a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn l1_triangle_on_bumps(xa in 0.2f64..3.0, xb in 0.2f64..3.0, xc in 0.2f64..3.0, amp in 0.1f64..4.0) {
        let e = h2();
        let a = Profile::Bump { xi: xa, amp };
        let b = Profile::bump(xb);
        let c = Profile::bump(xc);
        let ab = l1_distance(e, a, b).unwrap();
        let bc = l1_distance(e, b, c).unwrap();
        let ac = l1_distance(e, a, c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9 * (ab + bc));
        prop_assert!((l1_distance(e, b, a).unwrap() - ab).abs() <= 1e-12 * ab.max(1e-300));
    }

    #[test]
    fn distinguished_kernel_is_probability(t in 1.0f64..10.0) {
        let m = solvlab::htilde_total_mass(h2(), t).unwrap();
        prop_assert!((m - 1.0).abs() < 1e-6);
    }

    #[test]
    fn mass_function_positive_and_harnack_bounded(g in 0.0f64..8.0, th in 0.0f64..std::f64::consts::PI, xi in 0.3f64..1.5) {
        let e = h2();
        let p = Profile::bump(xi);
        let dc = polar_distance(g, th, 1.0);
        let m = solvlab::mass_function(e, p, dc, g).unwrap();
        let mass = heatlab::convlab::PreparedDatum::new(e, p).unwrap().mass;
        let bound = mass * solvlab::harnack_ratio(e, 1.0 + xi, &[g]).unwrap();
        prop_assert!(m > 0.0);
        prop_assert!(m <= bound * (1.0 + 1e-9));
    }
}
