//! Downsampling and standardization of raw images.

use serde::{Deserialize, Serialize};

use super::idx::RawImageSet;
use super::{Dataset, Provenance};

/// Side length of the downsampled images.
pub const TARGET_SIDE: usize = 16;
/// Floor applied to per-feature variances before standardizing.
pub const VARIANCE_FLOOR: f64 = 1e-8;

/// 1D area weights: `w[d][s]` is the fraction of destination cell `d`
/// covered by source cell `s`, each destination cell spanning `src/dst`
/// source cells. Rows sum to one.
fn area_weights(src: usize, dst: usize) -> Vec<Vec<f64>> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|d| {
            let lo = d as f64 * scale;
            let hi = lo + scale;
            (0..src)
                .map(|s| {
                    let overlap = (hi.min(s as f64 + 1.0) - lo.max(s as f64)).max(0.0);
                    overlap / scale
                })
                .collect()
        })
        .collect()
}

/// Area-weighted (box filter with fractional overlap) resampler.
#[derive(Debug, Clone)]
pub struct AreaResampler {
    src_rows: usize,
    src_cols: usize,
    row_w: Vec<Vec<f64>>,
    col_w: Vec<Vec<f64>>,
}

impl AreaResampler {
    pub fn new(src_rows: usize, src_cols: usize, dst_rows: usize, dst_cols: usize) -> Self {
        Self {
            src_rows,
            src_cols,
            row_w: area_weights(src_rows, dst_rows),
            col_w: area_weights(src_cols, dst_cols),
        }
    }

    pub fn dst_len(&self) -> usize {
        self.row_w.len() * self.col_w.len()
    }

    /// Resamples one row-major image into `out`.
    pub fn resample(&self, src: &[f64], out: &mut [f64]) {
        assert_eq!(src.len(), self.src_rows * self.src_cols);
        let dst_cols = self.col_w.len();
        // columns first: tmp is src_rows x dst_cols
        let mut tmp = vec![0.0; self.src_rows * dst_cols];
        for r in 0..self.src_rows {
            let row = &src[r * self.src_cols..(r + 1) * self.src_cols];
            for (c, w) in self.col_w.iter().enumerate() {
                tmp[r * dst_cols + c] = w.iter().zip(row).map(|(a, b)| a * b).sum();
            }
        }
        for (r, w) in self.row_w.iter().enumerate() {
            for c in 0..dst_cols {
                out[r * dst_cols + c] = w
                    .iter()
                    .enumerate()
                    .map(|(s, a)| a * tmp[s * dst_cols + c])
                    .sum();
            }
        }
    }
}

/// Maps bytes to [0,1] and area-resamples every image to 16x16, without
/// standardization. Returns a row-major `n x 256` matrix.
pub fn downsample(raw: &RawImageSet) -> Vec<f64> {
    let resampler = AreaResampler::new(raw.rows, raw.cols, TARGET_SIDE, TARGET_SIDE);
    let dst = resampler.dst_len();
    let mut out = vec![0.0; raw.len() * dst];
    let mut scaled = vec![0.0; raw.rows * raw.cols];
    for i in 0..raw.len() {
        for (s, &b) in scaled.iter_mut().zip(raw.image(i)) {
            *s = f64::from(b) / 255.0;
        }
        resampler.resample(&scaled, &mut out[i * dst..(i + 1) * dst]);
    }
    out
}

/// Per-feature standardization statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureStats {
    /// Fits mean and (population) standard deviation over the rows of all
    /// given matrices; variances are floored at [`VARIANCE_FLOOR`].
    pub fn fit(matrices: &[&[f64]], dim: usize) -> Self {
        let mut n = 0usize;
        let mut sum = vec![0.0; dim];
        for m in matrices {
            for row in m.chunks_exact(dim) {
                for (s, x) in sum.iter_mut().zip(row) {
                    *s += x;
                }
                n += 1;
            }
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / n as f64).collect();
        let mut sq = vec![0.0; dim];
        for m in matrices {
            for row in m.chunks_exact(dim) {
                for ((s, x), mu) in sq.iter_mut().zip(row).zip(&mean) {
                    *s += (x - mu) * (x - mu);
                }
            }
        }
        let std = sq
            .iter()
            .map(|s| (s / n as f64).max(VARIANCE_FLOOR).sqrt())
            .collect();
        Self { mean, std }
    }

    pub fn apply(&self, matrix: &mut [f64]) {
        let dim = self.mean.len();
        for row in matrix.chunks_exact_mut(dim) {
            for ((x, mu), sd) in row.iter_mut().zip(&self.mean).zip(&self.std) {
                *x = (*x - mu) / sd;
            }
        }
    }
}

/// Downsamples and standardizes one image set using its own statistics.
pub fn transform(raw: &RawImageSet) -> Dataset {
    let dim = TARGET_SIDE * TARGET_SIDE;
    let mut inputs = downsample(raw);
    FeatureStats::fit(&[&inputs], dim).apply(&mut inputs);
    Dataset::new(
        dim,
        inputs,
        raw.labels.clone(),
        (0..raw.len() as u32).collect(),
        Provenance::new("raw", None, format!("n{}", raw.len())),
    )
    .expect("transform preserves shapes")
}

/// Standardized train and test splits sharing statistics fitted on both.
#[derive(Debug, Clone)]
pub struct PreparedMnist {
    pub train: Dataset,
    pub test: Dataset,
    pub stats: FeatureStats,
}

/// Downsamples both official splits and standardizes them with statistics
/// computed over the combined 70000 images. Origins number training images
/// `0..n_train` and test images after them.
pub fn transform_combined(train: &RawImageSet, test: &RawImageSet) -> PreparedMnist {
    let dim = TARGET_SIDE * TARGET_SIDE;
    let mut tr = downsample(train);
    let mut te = downsample(test);
    let stats = FeatureStats::fit(&[&tr, &te], dim);
    stats.apply(&mut tr);
    stats.apply(&mut te);
    let n_train = train.len() as u32;
    let mut prov = Provenance::new("mnist-train", None, format!("n{}", train.len()));
    prov.normalization = "per-feature, train+test combined".into();
    let train_ds = Dataset::new(dim, tr, train.labels.clone(), (0..n_train).collect(), prov)
        .expect("shapes");
    let mut prov = Provenance::new("mnist-test", None, format!("n{}", test.len()));
    prov.normalization = "per-feature, train+test combined".into();
    let test_ds = Dataset::new(
        dim,
        te,
        test.labels.clone(),
        (n_train..n_train + test.len() as u32).collect(),
        prov,
    )
    .expect("shapes");
    PreparedMnist { train: train_ds, test: test_ds, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent brute-force area resampler: integrates each destination
    /// cell against the piecewise-constant source with explicit 2D
    /// rectangle intersections.
    fn brute_force_resample(src: &[f64], n: usize, m: usize) -> Vec<f64> {
        let s = n as f64 / m as f64;
        let mut out = vec![0.0; m * m];
        for di in 0..m {
            for dj in 0..m {
                let (y0, y1) = (di as f64 * s, (di + 1) as f64 * s);
                let (x0, x1) = (dj as f64 * s, (dj + 1) as f64 * s);
                let mut acc = 0.0;
                for si in 0..n {
                    for sj in 0..n {
                        let oy = (y1.min(si as f64 + 1.0) - y0.max(si as f64)).max(0.0);
                        let ox = (x1.min(sj as f64 + 1.0) - x0.max(sj as f64)).max(0.0);
                        acc += oy * ox * src[si * n + sj];
                    }
                }
                out[di * m + dj] = acc / (s * s);
            }
        }
        out
    }

    #[test]
    fn constant_image_stays_constant() {
        let r = AreaResampler::new(28, 28, 16, 16);
        let src = vec![0.37; 28 * 28];
        let mut out = vec![0.0; 256];
        r.resample(&src, &mut out);
        for v in out {
            assert!((v - 0.37).abs() < 1e-14);
        }
    }

    #[test]
    fn single_pixel_mass_is_conserved() {
        let r = AreaResampler::new(28, 28, 16, 16);
        for (i, j) in [(0, 0), (13, 7), (27, 27), (5, 22)] {
            let mut src = vec![0.0; 28 * 28];
            src[i * 28 + j] = 1.0;
            let mut out = vec![0.0; 256];
            r.resample(&src, &mut out);
            let total: f64 = out.iter().sum();
            assert!((total - (16.0f64 / 28.0).powi(2)).abs() < 1e-14);
            let oracle = brute_force_resample(&src, 28, 16);
            for (a, b) in out.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn standardized_features_have_zero_mean_unit_variance() {
        let raw = RawImageSet {
            rows: 28,
            cols: 28,
            pixels: (0..20 * 784).map(|i| ((i * 7919) % 256) as u8).collect(),
            labels: (0..20).map(|i| (i % 10) as u8).collect(),
        };
        let ds = transform(&raw);
        for f in 0..256 {
            let col: Vec<f64> = (0..20).map(|i| ds.row(i)[f]).collect();
            let m = col.iter().sum::<f64>() / 20.0;
            let v = col.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 20.0;
            assert!(m.abs() < 1e-12);
            assert!((v - 1.0).abs() < 1e-9, "feature {f} variance {v}");
        }
    }

    #[test]
    fn constant_feature_hits_variance_floor() {
        let stats = FeatureStats::fit(&[&[1.0, 2.0, 1.0, 4.0]], 2);
        assert_eq!(stats.std[0], VARIANCE_FLOOR.sqrt());
        let mut m = vec![1.0, 2.0];
        stats.apply(&mut m);
        assert_eq!(m[0], 0.0);
    }

    proptest! {
        #[test]
        fn resampling_is_linear(
            a in proptest::collection::vec(0.0f64..1.0, 784),
            b in proptest::collection::vec(0.0f64..1.0, 784),
            alpha in -2.0f64..2.0,
            beta in -2.0f64..2.0,
        ) {
            let r = AreaResampler::new(28, 28, 16, 16);
            let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
            let (mut ra, mut rb, mut rm) = (vec![0.0; 256], vec![0.0; 256], vec![0.0; 256]);
            r.resample(&a, &mut ra);
            r.resample(&b, &mut rb);
            r.resample(&mix, &mut rm);
            for i in 0..256 {
                prop_assert!((rm[i] - (alpha * ra[i] + beta * rb[i])).abs() < 1e-12);
            }
        }
    }
}
