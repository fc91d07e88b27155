use std::f64::consts::PI;

use bcs_core::potentials::{
    fourier_radial, make_radial_potential, potential_stats, scale_potential, PotentialSpec, RadialPotential,
};
use proptest::prelude::*;

fn shapes() -> Vec<RadialPotential> {
    vec![
        RadialPotential::square_well(1.0, 1.0).unwrap(),
        RadialPotential::gaussian(2.0, 0.7).unwrap(),
        RadialPotential::tabulated(vec![0.1, 0.4, 0.8, 1.2, 1.6], vec![-2.0, -1.5, -0.8, -0.3, 0.0]).unwrap(),
    ]
}

#[test]
fn square_well_stats_and_fourier_origin() {
    let v = make_radial_potential(&"well:1,1".parse::<PotentialSpec>().unwrap()).unwrap();
    let s = potential_stats(&v);
    assert!((s.l1 - 4.0 * PI / 3.0).abs() < 1e-12);
    assert!((s.weighted_l1 - PI).abs() < 1e-12);
    let v0 = fourier_radial(&v, 0.0).unwrap();
    assert!((v0 + (2.0 * PI).powf(-1.5) * 4.0 * PI / 3.0).abs() < 1e-14);
}

#[test]
fn half_scale_square_well() {
    let v = RadialPotential::square_well(1.5, 2.0).unwrap();
    let h = scale_potential(&v, 0.5, 1.0).unwrap();
    for r in [0.1, 0.5, 0.99, 1.01, 3.0] {
        let expected = if r <= 1.0 { -6.0 } else { 0.0 };
        assert_eq!(h.eval(r), expected);
    }
    assert_eq!(h.support_radius(), 1.0);
    let same = scale_potential(&v, 1.0, 1.0).unwrap();
    assert_eq!(same.eval(1.3), v.eval(1.3));
}

#[test]
fn fourier_is_even_and_continuous_at_origin() {
    for v in shapes() {
        let v0 = fourier_radial(&v, 0.0).unwrap();
        let weighted = potential_stats(&v).weighted_l1 * (2.0 * PI).powf(-1.5);
        for p in [1e-1, 1e-2, 1e-3, 1e-5] {
            let vp = fourier_radial(&v, p).unwrap();
            assert_eq!(vp, fourier_radial(&v, -p).unwrap());
            assert!((vp - v0).abs() <= p * weighted);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norm_scaling_law(ell in 0.02f64..3.0, lambda in 0.05f64..1.0, which in 0usize..3) {
        let v = &shapes()[which];
        let s = scale_potential(v, ell, lambda).unwrap();
        for p in [1.0, 1.5, 2.0] {
            let expected = lambda * ell.powf(3.0 / p - 2.0) * v.norm(p).unwrap();
            prop_assert!((s.norm(p).unwrap() - expected).abs() <= 1e-8 * expected);
        }
        let stats = potential_stats(&s);
        prop_assert!((stats.l1 - lambda * ell * potential_stats(v).l1).abs() <= 1e-8 * stats.l1);
        prop_assert!((stats.l3_2 - lambda * potential_stats(v).l3_2).abs() <= 1e-8 * stats.l3_2);
        prop_assert!((s.support_radius() - ell * v.support_radius()).abs() <= 1e-14 * s.support_radius());
    }

    #[test]
    fn fourier_dilation_identity(ell in 0.05f64..2.0, lambda in 0.1f64..1.0, p in 0.0f64..20.0, which in 0usize..3) {
        let v = &shapes()[which];
        let s = scale_potential(v, ell, lambda).unwrap();
        let lhs = fourier_radial(&s, p).unwrap();
        let rhs = lambda * ell * fourier_radial(v, ell * p).unwrap();
        let scale = lambda * ell * fourier_radial(v, 0.0).unwrap().abs();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * scale);
    }
}
