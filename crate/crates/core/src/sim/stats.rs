/// Mean and 95% confidence half-width of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub ci95: f64,
    pub count: usize,
}

/// Normal-approximation interval: `1.96 * sd / sqrt(count)` with the
/// unbiased sample deviation. A single sample has zero width; an empty one
/// has a NaN mean.
pub fn mean_ci95(samples: &[f64]) -> Summary {
    let count = samples.len();
    if count == 0 {
        return Summary {
            mean: f64::NAN,
            ci95: 0.0,
            count,
        };
    }
    let mean = samples.iter().sum::<f64>() / count as f64;
    let ci95 = if count > 1 {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        1.96 * (var / count as f64).sqrt()
    } else {
        0.0
    };
    Summary { mean, ci95, count }
}
