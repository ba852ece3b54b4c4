use mfxwl::analysis::{
    direct_spectrum, legendre_spectrum, moment_weights, partition_table, scaling_exponents,
    scale_moments, FdScheme, FitRange, MomentGrid,
};
use mfxwl::dwt::haar_pyramid;
use mfxwl::leaders::{wavelet_leaders, BoundaryPolicy, LeaderOptions, LeaderPyramid};
use mfxwl::signal_io::Signal;
use mfxwl::synth::{binomial_measure, CascadeSpec};
use proptest::prelude::*;

fn leaders(x: &[f64], boundary: BoundaryPolicy) -> LeaderPyramid {
    let p = haar_pyramid(&Signal::raw("x", x.to_vec()).unwrap()).unwrap();
    wavelet_leaders(&p, &LeaderOptions::with_boundary(boundary)).unwrap()
}

fn gaussian_walk(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len).prop_map(|steps| {
        steps
            .iter()
            .scan(0.0, |acc, s| {
                *acc += s;
                Some(*acc)
            })
            .collect()
    })
}

fn positive_leaders() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..64).prop_flat_map(|n| {
        (
            prop::collection::vec(1e-6f64..1e3, n),
            prop::collection::vec(1e-6f64..1e3, n),
        )
    })
}

/// Neumaier-compensated sum.
fn accurate_sum(values: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

fn small_grid() -> MomentGrid {
    MomentGrid::uniform((-3.0, 3.0), (-3.0, 3.0), 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_are_a_probability_vector(
        (lx, ly) in positive_leaders(),
        p in -8.0f64..8.0,
        q in -8.0f64..8.0,
    ) {
        let mu = moment_weights(&lx, &ly, p, q).unwrap();
        prop_assert!(mu.iter().all(|&m| m >= 0.0));
        prop_assert!((mu.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        let m = scale_moments(&lx, &ly, p, q).unwrap();
        prop_assert!(m.a_mu <= 1e-12);
    }

    #[test]
    fn zero_orders_give_unit_partition((lx, ly) in positive_leaders()) {
        let m = scale_moments(&lx, &ly, 0.0, 0.0).unwrap();
        prop_assert_eq!(m.log_s, 0.0);
    }

    #[test]
    fn swapping_signals_and_orders_is_exact(x in gaussian_walk(256), y in gaussian_walk(256)) {
        let (lx, ly) = (leaders(&x, BoundaryPolicy::Periodic), leaders(&y, BoundaryPolicy::Periodic));
        let grid = small_grid();
        let scales: Vec<usize> = lx.scales().collect();
        let xy = partition_table(&lx, &ly, &grid, &scales).unwrap();
        let yx = partition_table(&ly, &lx, &grid, &scales).unwrap();
        let n = grid.n_p();
        for ip in 0..n {
            for iq in 0..n {
                for &j in &scales {
                    prop_assert_eq!(xy.s(ip, iq, j), yx.s(iq, ip, j));
                }
            }
        }
        let fr = FitRange::new(1, 6).unwrap();
        let (zx, zy) = (scaling_exponents(&xy, fr).unwrap(), scaling_exponents(&yx, fr).unwrap());
        for ip in 0..n {
            for iq in 0..n {
                prop_assert_eq!(zx.zeta.get(ip, iq).to_bits(), zy.zeta.get(iq, ip).to_bits());
            }
        }
    }

    #[test]
    fn positive_scaling_leaves_exponents_unchanged(
        x in gaussian_walk(256),
        y in gaussian_walk(256),
        c in 1e-3f64..1e3,
    ) {
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        let ly = leaders(&y, BoundaryPolicy::Periodic);
        let grid = small_grid();
        let fr = FitRange::new(1, 6).unwrap();
        let run = |lx: &LeaderPyramid| {
            let scales: Vec<usize> = lx.scales().collect();
            let t = partition_table(lx, &ly, &grid, &scales).unwrap();
            let z = scaling_exponents(&t, fr).unwrap();
            let leg = legendre_spectrum(&z, FdScheme::Central).unwrap();
            let dir = direct_spectrum(&t, fr).unwrap();
            (z, leg, dir)
        };
        let (z0, l0, d0) = run(&leaders(&x, BoundaryPolicy::Periodic));
        let (z1, l1, d1) = run(&leaders(&scaled, BoundaryPolicy::Periodic));
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(u, v)| (u - v).abs() <= 1e-8);
        prop_assert!(close(z0.zeta.values(), z1.zeta.values()));
        prop_assert!(close(l0.h_x.values(), l1.h_x.values()));
        prop_assert!(close(l0.h_y.values(), l1.h_y.values()));
        prop_assert!(close(l0.d.values(), l1.d.values()));
        prop_assert!(close(d0.h_x.values(), d1.h_x.values()));
        prop_assert!(close(d0.h_y.values(), d1.h_y.values()));
        prop_assert!(close(d0.d.values(), d1.d.values()));
    }

    #[test]
    fn leaders_nest_across_scales(x in gaussian_walk(512)) {
        for boundary in [BoundaryPolicy::Periodic, BoundaryPolicy::Clamp] {
            let l = leaders(&x, boundary);
            for j in l.j_min() + 1..=l.j_max() {
                let (coarse, fine) = (l.scale(j).unwrap(), l.scale(j - 1).unwrap());
                for (k, &v) in coarse.iter().enumerate() {
                    prop_assert!(v >= fine[2 * k] && v >= fine[2 * k + 1]);
                }
            }
        }
    }

    #[test]
    fn cascade_mass_is_conserved(p in 0.01f64..0.99, i in 1u32..20) {
        let z = binomial_measure(&CascadeSpec::new(p, i).unwrap());
        prop_assert!((accurate_sum(z.values()) - 1.0).abs() <= 1e-12);
    }
}
