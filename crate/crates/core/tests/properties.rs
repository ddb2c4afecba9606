use proptest::prelude::*;
use rayon::prelude::*;
use stland::landscape::{compute_landscape, mean, Landscape};
use stland::pipeline::{noisy, run_grid, PipelineConfig, SelkovParams};
use stland::signal::{add_awgn, delay_embed, kmeans_downsample, PointCloud, TimeSeries};

fn arb_series() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..60)
}

fn arb_landscape() -> impl Strategy<Value = Landscape> {
    (1usize..4, 1usize..4, 1usize..3).prop_flat_map(|(t, rows, k)| {
        let cols = 2 * t - 1;
        prop::collection::vec(prop::collection::vec(prop::collection::vec(0u32..5, cols), rows), k).prop_map(
            move |values| Landscape {
                t_windows: t,
                cols,
                rows,
                k_max: k,
                hom_dim: 1,
                epsilons: (0..rows).map(|r| r as f64).collect(),
                values,
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn delay_embedding_shape(x in arb_series(), d in 1usize..5, tau in 1usize..5) {
        let ts = TimeSeries::univariate(0.0, 1.0, x.clone()).unwrap();
        let span = (d - 1) * tau;
        match delay_embed(&ts, d, tau) {
            Ok(pc) => {
                prop_assert_eq!(pc.len(), x.len() - span);
                prop_assert_eq!(pc.dim(), d);
                for i in 0..pc.len() {
                    for j in 0..d {
                        prop_assert_eq!(pc.point(i)[j], x[i + j * tau]);
                    }
                }
            }
            Err(_) => prop_assert!(x.len() <= span),
        }
    }

    #[test]
    fn noise_keeps_shape(x in prop::collection::vec(-5.0f64..5.0, 4..40), channels in 1usize..3, seed in any::<u64>()) {
        let n = x.len() / channels * channels;
        prop_assume!(x[..n].iter().any(|v| v.abs() > 1e-3));
        let ts = TimeSeries::new(0.0, 0.5, channels, x[..n].to_vec()).unwrap();
        let a = add_awgn(&ts, 20.0, seed).unwrap();
        prop_assert_eq!(a.len(), ts.len());
        prop_assert_eq!(a.channels(), ts.channels());
        prop_assert_ne!(a, add_awgn(&ts, 20.0, seed.wrapping_add(1)).unwrap());
    }

    #[test]
    fn kmeans_size_and_bounds(coords in prop::collection::vec(-3.0f64..3.0, 2..80), m in 1usize..20, seed in any::<u64>()) {
        let n = coords.len() / 2 * 2;
        let pc = PointCloud::from_flat(2, coords[..n].to_vec()).unwrap();
        let out = kmeans_downsample(&pc, m, seed).unwrap();
        prop_assert_eq!(out.len(), m.min(pc.len()));
        for j in 0..2 {
            let lo = pc.points().map(|p| p[j]).fold(f64::INFINITY, f64::min);
            let hi = pc.points().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
            for p in out.points() {
                prop_assert!(p[j] >= lo - 1e-12 && p[j] <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn mean_of_copies_is_exact(l in arb_landscape(), n in 1usize..8) {
        let copies = vec![l.clone(); n];
        prop_assert_eq!(mean(&copies).unwrap(), l.to_mean());
    }
}

/// Summed over cells, the sample variance of the first `n` runs divided by `n`:
/// the estimated variance of the mean.
fn variance_of_mean(runs: &[Landscape], n: usize) -> f64 {
    let first = &runs[..n];
    let l = &first[0];
    let mut total = 0.0;
    for k in 0..l.k_max {
        for r in 0..l.rows {
            for c in 0..l.cols {
                let xs: Vec<f64> = first.iter().map(|l| l.values[k][r][c] as f64).collect();
                let mu = xs.iter().sum::<f64>() / n as f64;
                let s2 = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1) as f64;
                total += s2 / n as f64;
            }
        }
    }
    total
}

#[test]
fn mean_variance_shrinks_with_more_runs() {
    let base = SelkovParams::default().series().unwrap();
    let runs: Vec<Landscape> = (1..=30u64)
        .into_par_iter()
        .map(|seed| {
            let cfg = PipelineConfig { seed, ..PipelineConfig::selkov() };
            let ts = noisy(&base, 30.0, seed).unwrap();
            compute_landscape(&run_grid(&ts, &cfg).unwrap(), cfg.k_max).unwrap()
        })
        .collect();
    let (half, full) = (variance_of_mean(&runs, 15), variance_of_mean(&runs, 30));
    println!("variance of the mean: 15 runs {half:.4}, 30 runs {full:.4}");
    assert!(half > 0.0, "noisy runs were all identical");
    assert!(full < half);
}
