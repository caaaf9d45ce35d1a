use nalgebra::Complex;
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use proptest::prelude::*;

use obraid::braid::{verify_ybe, ModelParams};
use obraid::cayley_rtt::{cayley_exclusion, closed_form_x, inverse_cayley};
use obraid::eigen::C64;
use obraid::exact::{KPoly, SLaurent};
use obraid::matrix::max_abs;
use obraid::spectra::{diagonalize_all, sum_rule_residual};
use obraid::symmetry::{burnside_orbit_count, enumerate_orbits, subspace_dim, Omega, StateWord};
use obraid::transfer::{build_t, DEFAULT_CAP};

type L = SLaurent<BigRational>;
type P = KPoly<BigRational>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn laurent() -> impl Strategy<Value = L> {
    prop::collection::vec((-5i32..=5, -12i64..=12, 1i64..=5), 0..4).prop_map(|terms| {
        let mut acc = L::zero();
        for (e, n, d) in terms {
            acc += &L::monomial(rat(n, d), e);
        }
        acc
    })
}

fn kpoly() -> impl Strategy<Value = P> {
    prop::collection::vec(laurent(), 0..4).prop_map(P::from_coeffs)
}

fn close(a: Complex<f64>, b: Complex<f64>) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn laurent_ring_axioms(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a + &(-&a)).is_zero());
        prop_assert_eq!(&a * &L::one(), a.clone());
        prop_assert_eq!(a.q_invert().q_invert(), a.clone());
        prop_assert_eq!((&a * &b).q_invert(), &a.q_invert() * &b.q_invert());
    }

    #[test]
    fn kpoly_ring_axioms(a in kpoly(), b in kpoly(), c in kpoly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
            prop_assert_eq!((&a * &b).degree(), Some(da + db));
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in kpoly(), b in kpoly(), q in 0.3f64..3.0, k in -2.0f64..2.0) {
        let z = Complex::new(k, 0.0);
        let ea = a.eval(q, z).unwrap();
        let eb = b.eval(q, z).unwrap();
        prop_assert!(close((&a * &b).eval(q, z).unwrap(), ea * eb));
        prop_assert!(close((&a + &b).eval(q, z).unwrap(), ea + eb));
        prop_assert!(close(a.q_invert().eval(1.0 / q, z).unwrap(), ea));
    }

    #[test]
    fn text_round_trip(a in kpoly(), l in laurent()) {
        let back: P = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
        let back: L = l.to_string().parse().unwrap();
        prop_assert_eq!(back, l);
    }

    #[test]
    fn small_coefficients_agree_with_big_ones(
        terms in prop::collection::vec((-4i32..=4, -9i64..=9, 1i64..=4), 0..4),
        q in 0.4f64..2.5,
    ) {
        let mut big = L::zero();
        let mut small = SLaurent::<Rational64>::zero();
        for &(e, n, d) in &terms {
            big += &L::monomial(rat(n, d), e);
            small += &SLaurent::monomial(Rational64::new(n, d), e);
        }
        let (x, y): (f64, f64) = (big.eval(q).unwrap(), small.eval(q).unwrap());
        prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
    }

    #[test]
    fn words_and_shifts(n in 3usize..=5, r in 1usize..=6, seed in any::<u64>()) {
        let dim = n.pow(r as u32);
        let idx = (seed % dim as u64) as usize;
        let w = StateWord::from_index(n, r, idx);
        prop_assert_eq!(w.index(n), idx);
        prop_assert_eq!(w.shift_left(1).shift_right(1), w.clone());
        prop_assert_eq!(w.shift_right(r), w.clone());
        prop_assert_eq!(w.flip(n).flip(n), w.clone());
        prop_assert_eq!(w.flip(n).weight(), (n + 1) * r - w.weight());
        let d = w.period();
        prop_assert!(r % d == 0 && w.shift_right(d) == w);
    }

    #[test]
    fn roots_of_unity(r in 1usize..=8) {
        let all = Omega::all(r);
        prop_assert_eq!(all.len(), r);
        for w in all {
            prop_assert_eq!(w.pow(r as i64), Omega::one());
            prop_assert!((w.to_complex().powu(r as u32) - C64::new(1.0, 0.0)).norm() < 1e-12);
            prop_assert_eq!(w.conj().conj(), w);
        }
    }

    #[test]
    fn ybe_on_random_spectral_parameters(
        n in 3usize..=5,
        q in 0.5f64..2.0,
        th in -0.6f64..0.6,
        thp in -0.6f64..0.6,
    ) {
        let p = ModelParams::new(n, q).unwrap();
        prop_assert!(verify_ybe(&p, th, thp).unwrap() < 1e-10);
    }

    #[test]
    fn cayley_solver_against_closed_form(
        q in 0.5f64..2.0,
        th in -0.5f64..1.0,
        re in -3.0f64..3.0,
        im in -1.0f64..1.0,
    ) {
        let p = ModelParams::new(3, q).unwrap();
        let k = p.k_of_theta(th).unwrap();
        let lambda = C64::new(re, im);
        prop_assume!(cayley_exclusion(lambda, k, q).is_none());
        if let Ok(res) = inverse_cayley(&p, th, lambda) {
            prop_assert!(res.residual < 1e-9);
            let cf = closed_form_x(k, lambda, q);
            let scale = max_abs(&cf).max(1.0);
            prop_assert!(max_abs(&(&res.x - &cf)) < 1e-10 * scale * res.condition.max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn spectra_at_random_q(q in 0.4f64..2.5) {
        for (n, r) in [(3, 2), (3, 3), (4, 2)] {
            let t = build_t::<BigRational>(n, r, DEFAULT_CAP).unwrap();
            let recs = diagonalize_all(&t, q).unwrap();
            prop_assert!(sum_rule_residual(&recs, n, r) < 1e-8);
            for rec in &recs {
                prop_assert!(rec.f0_defect() < 1e-9);
            }
        }
    }
}

#[test]
fn dimension_census() {
    for (n, r) in [(3, 1), (3, 4), (3, 5), (4, 3), (5, 3)] {
        let total: u128 = (r..=n * r).map(|w| subspace_dim(n, r, w)).sum();
        assert_eq!(total, (n as u128).pow(r as u32));
        for w in r..=n * r {
            assert_eq!(
                burnside_orbit_count(n, r, w),
                enumerate_orbits(n, r, w).len() as u128
            );
        }
    }
}
