use std::f64::consts::PI;

use proptest::prelude::*;

use vpmcf::flow::{FlowMode, FlowState};
use vpmcf::profile::{averaged_mean_curvature, curvature_fields, enclosed_volume, surface_area};
use vpmcf::singularity::rescale;
use vpmcf::sturm::{sign_change_count, zero_census, DEFAULT_CENSUS_TOL};
use vpmcf::{GridSpec, RadialProfile};

/// Positive smooth profile from a base radius and up to three cosine modes.
fn profile_strategy() -> impl Strategy<Value = RadialProfile> {
    (
        4usize..40,
        -2.0f64..2.0,
        0.3f64..4.0,
        2usize..6,
        0.2f64..3.0,
        prop::collection::vec((-0.25f64..0.25, 1u32..5), 1..4),
    )
        .prop_map(|(half, a, len, dim, base, modes)| {
            let grid = GridSpec::new(a, a + len, 2 * half, dim).unwrap();
            RadialProfile::from_fn(grid, |x| {
                base + modes.iter().map(|(c, m)| c * base * (PI * *m as f64 * (x - a) / len).cos()).sum::<f64>()
            })
            .unwrap()
        })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, rng_seed: proptest::test_runner::RngSeed::Fixed(7), ..ProptestConfig::default() })]

    #[test]
    fn geometric_identities(p in profile_strategy()) {
        let f = curvature_fields(&p).unwrap();
        let n1 = (p.grid().dim() - 1) as f64;
        for i in 0..f.len() {
            prop_assert!(close(f.p[i] * f.v[i] * f.y[i], 1.0, 1e-12));
            prop_assert!(close(f.p[i] * f.p[i] + f.q[i] * f.q[i], 1.0 / (f.y[i] * f.y[i]), 1e-12));
            prop_assert!((f.h[i] - f.k[i] - n1 * f.p[i]).abs() <= 1e-12 * (f.k[i].abs() + n1 * f.p[i]));
            prop_assert!(close(f.c3[i], f.k[i].powi(3) + n1 * f.p[i].powi(3), 1e-12) || f.c3[i].abs() < 1e-12);
            prop_assert!(f.a2[i] >= 0.0);
        }
    }

    #[test]
    fn scaling_covariance(p in profile_strategy(), lambda in 0.1f64..10.0) {
        let g = p.grid();
        let n = g.dim() as i32;
        let scaled_grid = GridSpec::new(lambda * g.a(), lambda * g.b(), g.intervals(), g.dim()).unwrap();
        let q = RadialProfile::new(scaled_grid, p.rho().iter().map(|r| lambda * r).collect(), 0.0).unwrap();
        let (fp, fq) = (curvature_fields(&p).unwrap(), curvature_fields(&q).unwrap());
        for i in 0..fp.len() {
            prop_assert!((fq.h[i] * lambda - fp.h[i]).abs() <= 1e-9 * fp.a2[i].sqrt().max(1.0));
            prop_assert!(close(fq.a2[i] * lambda * lambda, fp.a2[i], 1e-9));
        }
        prop_assert!(close(enclosed_volume(&q).unwrap(), lambda.powi(n + 1) * enclosed_volume(&p).unwrap(), 1e-11));
        prop_assert!(close(surface_area(&q).unwrap(), lambda.powi(n) * surface_area(&p).unwrap(), 1e-11));
        let hq = averaged_mean_curvature(&fq, &q).unwrap();
        prop_assert!(close(hq * lambda, averaged_mean_curvature(&fp, &p).unwrap(), 1e-10));
    }

    #[test]
    fn rescale_scaling_relations(p in profile_strategy(), alpha in 0.2f64..8.0, frac in 0.0f64..1.0) {
        let g = *p.grid();
        let center = g.a() + frac * g.length();
        let s = rescale(&p, center, alpha, None).unwrap();
        let (fp, fs) = (curvature_fields(&p).unwrap(), curvature_fields(&s).unwrap());
        for i in 0..fp.len() {
            prop_assert!((fs.h[i] * alpha - fp.h[i]).abs() <= 1e-9 * fp.a2[i].sqrt().max(1.0));
            prop_assert!(close(fs.a2[i] * alpha * alpha, fp.a2[i], 1e-9));
        }
    }

    #[test]
    fn sign_changes_ignore_positive_weights(
        values in prop::collection::vec(-1.0f64..1.0, 1..60),
        weights in prop::collection::vec(0.01f64..100.0, 60),
    ) {
        let weighted: Vec<f64> = values.iter().zip(&weights).map(|(v, w)| v * w).collect();
        prop_assert_eq!(sign_change_count(&values, 0.0), sign_change_count(&weighted, 0.0));
    }

    #[test]
    fn sign_changes_nonincreasing_in_tol(values in prop::collection::vec(-1.0f64..1.0, 1..60), t1 in 0.0f64..0.5, dt in 0.0f64..0.5) {
        prop_assert!(sign_change_count(&values, t1 + dt) <= sign_change_count(&values, t1));
    }

    #[test]
    fn reflection_symmetry(p in profile_strategy()) {
        let g = *p.grid();
        let mirrored: Vec<f64> = p.rho().iter().rev().copied().collect();
        let r = RadialProfile::new(g, mirrored, 0.0).unwrap();
        let (fp, fr) = (curvature_fields(&p).unwrap(), curvature_fields(&r).unwrap());
        let m = fp.len();
        for i in 0..m {
            let j = m - 1 - i;
            prop_assert!((fp.d1[i] + fr.d1[j]).abs() <= 1e-12 * fp.d1[i].abs().max(1.0) / g.dx());
            prop_assert!(close(fp.h[i], fr.h[j], 1e-9) || (fp.h[i] - fr.h[j]).abs() < 1e-9);
        }
        prop_assert!(close(enclosed_volume(&p).unwrap(), enclosed_volume(&r).unwrap(), 1e-12));
        let sp = FlowState::new(p, FlowMode::VolumePreserving, 1e-12).unwrap();
        let sr = FlowState::new(r, FlowMode::VolumePreserving, 1e-12).unwrap();
        let (cp, cr) = (zero_census(&sp, DEFAULT_CENSUS_TOL), zero_census(&sr, DEFAULT_CENSUS_TOL));
        prop_assert_eq!((cp.zeros_d1, cp.zeros_d2, cp.zeros_h), (cr.zeros_d1, cr.zeros_d2, cr.zeros_h));
        prop_assert_eq!(cp.necks.len(), cr.necks.len());
    }
}
