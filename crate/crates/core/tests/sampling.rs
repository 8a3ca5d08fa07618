use manhattan_cox::sampler::{empirical_line_density, palm_condition, sample_cox, sample_mplp};
use manhattan_cox::{ModelParams, Palm, Window};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

const SEEDS: u64 = 10_000;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Pearson statistic of observed counts against a Poisson law, with the
/// upper tail pooled into the last bin.
fn poisson_chi_square(counts: &[usize], rate: f64) -> (f64, usize) {
    let law = Poisson::new(rate).unwrap();
    let n = counts.len() as f64;
    let top = (rate + 4.0 * rate.sqrt()).ceil() as usize;
    let lo = (rate - 4.0 * rate.sqrt()).floor().max(0.0) as usize;
    let mut observed = vec![0usize; top - lo + 1];
    for &k in counts {
        observed[k.clamp(lo, top) - lo] += 1;
    }
    let mut stat = 0.0;
    for (i, &o) in observed.iter().enumerate() {
        let k = (lo + i) as u64;
        let p = if i == 0 {
            law.cdf(k)
        } else if i + 1 == observed.len() {
            1.0 - law.cdf(k - 1)
        } else {
            law.pmf(k)
        };
        let e = n * p;
        stat += (o as f64 - e).powi(2) / e;
    }
    (stat, observed.len() - 1)
}

#[test]
fn line_counts_have_the_poisson_mean() {
    let params = ModelParams::new(2.0, 1.0).unwrap();
    let window = Window::new(2.5).unwrap();
    let counts: Vec<f64> = (0..SEEDS)
        .map(|s| sample_mplp(&params, window, s).vertical_offsets().len() as f64)
        .collect();
    // lambda_l * 2W = 10
    assert!((mean(&counts) - 10.0).abs() < 0.1, "mean {}", mean(&counts));
}

#[test]
fn line_counts_pass_chi_square() {
    let params = ModelParams::new(2.0, 1.0).unwrap();
    let window = Window::new(2.5).unwrap();
    let counts: Vec<usize> = (0..SEEDS)
        .map(|s| sample_mplp(&params, window, s).horizontal_offsets().len())
        .collect();
    let (stat, dof) = poisson_chi_square(&counts, 10.0);
    let crit = ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.999);
    assert!(stat < crit, "chi-square {stat} over {crit}");
}

#[test]
fn offsets_are_uniform() {
    let params = ModelParams::new(1.0, 1.0).unwrap();
    let window = Window::new(4.0).unwrap();
    let mut bins = [0usize; 16];
    for s in 0..2_000 {
        for &o in sample_mplp(&params, window, s).vertical_offsets() {
            bins[(((o + 4.0) / 8.0 * 16.0) as usize).min(15)] += 1;
        }
    }
    let n: usize = bins.iter().sum();
    let e = n as f64 / 16.0;
    let stat: f64 = bins.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
    let crit = ChiSquared::new(15.0).unwrap().inverse_cdf(0.999);
    assert!(stat < crit, "chi-square {stat} over {crit}");
}

#[test]
fn point_counts_per_line_have_the_poisson_mean() {
    let params = ModelParams::new(1.0, 4.0).unwrap();
    let window = Window::new(2.5).unwrap();
    let counts: Vec<f64> = (0..SEEDS)
        .map(|s| {
            let lines = palm_condition(sample_mplp(&params, window, s), Palm::TypicalPoint).unwrap();
            let pts = sample_cox(&lines, &params, s);
            pts.on_horizontal(lines.palm_horizontal_index().unwrap()).len() as f64
        })
        .collect();
    // lambda_c * 2W = 20
    assert!((mean(&counts) - 20.0).abs() < 0.2, "mean {}", mean(&counts));
}

#[test]
fn point_counts_pass_chi_square() {
    let params = ModelParams::new(1.0, 4.0).unwrap();
    let window = Window::new(2.5).unwrap();
    let counts: Vec<usize> = (0..SEEDS)
        .map(|s| {
            let lines = palm_condition(sample_mplp(&params, window, s), Palm::TypicalIntersection).unwrap();
            sample_cox(&lines, &params, s)
                .on_vertical(lines.palm_vertical_index().unwrap())
                .len()
        })
        .collect();
    let (stat, dof) = poisson_chi_square(&counts, 20.0);
    let crit = ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.999);
    assert!(stat < crit, "chi-square {stat} over {crit}");
}

#[test]
fn vertical_and_horizontal_counts_are_uncorrelated() {
    let params = ModelParams::new(2.0, 1.0).unwrap();
    let window = Window::new(2.5).unwrap();
    let (v, h): (Vec<f64>, Vec<f64>) = (0..SEEDS)
        .map(|s| {
            let l = sample_mplp(&params, window, s);
            (l.vertical_offsets().len() as f64, l.horizontal_offsets().len() as f64)
        })
        .unzip();
    let (mv, mh) = (mean(&v), mean(&h));
    let cov = v.iter().zip(&h).map(|(a, b)| (a - mv) * (b - mh)).sum::<f64>() / SEEDS as f64;
    let corr = cov / (10.0f64.sqrt() * 10.0f64.sqrt());
    assert!(corr.abs() < 4.0 / (SEEDS as f64).sqrt(), "correlation {corr}");
}

#[test]
fn neighbouring_line_counts_are_uncorrelated() {
    let params = ModelParams::new(1.0, 2.0).unwrap();
    let window = Window::new(2.5).unwrap();
    let (a, b): (Vec<f64>, Vec<f64>) = (0..SEEDS)
        .map(|s| {
            let lines = palm_condition(sample_mplp(&params, window, s), Palm::TypicalIntersection).unwrap();
            let pts = sample_cox(&lines, &params, s);
            let v = pts.on_vertical(lines.palm_vertical_index().unwrap()).len() as f64;
            let h = pts.on_horizontal(lines.palm_horizontal_index().unwrap()).len() as f64;
            (v, h)
        })
        .unzip();
    let (ma, mb) = (mean(&a), mean(&b));
    let cov = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / SEEDS as f64;
    let corr = cov / 10.0;
    assert!(corr.abs() < 4.0 / (SEEDS as f64).sqrt(), "correlation {corr}");
}

#[test]
fn line_length_per_unit_area() {
    for lambda_l in [1.0, 10.0] {
        let params = ModelParams::new(lambda_l, 1.0).unwrap();
        let d = empirical_line_density(&params, Window::new(3.0).unwrap(), 2_000, 11).unwrap();
        let want = params.mu_l();
        assert!((d / want - 1.0).abs() < 0.03, "lambda_l {lambda_l}: {d} vs {want}");
    }
}

#[test]
fn sampling_is_reproducible() {
    let params = ModelParams::new(3.0, 2.0).unwrap();
    let window = Window::new(2.0).unwrap();
    let a = sample_mplp(&params, window, 99);
    let b = sample_mplp(&params, window, 99);
    assert_eq!(a, b);
    assert_eq!(sample_cox(&a, &params, 5), sample_cox(&b, &params, 5));
    assert_ne!(a, sample_mplp(&params, window, 100));
}
