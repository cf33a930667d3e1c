//! Per-frame criterion scores, adaptive weighting, score fusion and
//! key-frame selection.
//!
//! Per-frame feature extraction is pure and embarrassingly parallel;
//! normalization, weighting, fusion and selection are single-pass
//! sequential stages run in frame order.

use std::io::Write;

use crate::error::{Error, Result};
use crate::features::{
    edge_score, hu_moments, moment_distance, orb_count, HuVector, OrbParams,
};
use crate::imgproc::{rgb_to_coc_with, to_grayscale, Frame, Plane, COC_BASIS};

/// Which single channel feeds the moment, edge and keypoint criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelSelect {
    CocO1,
    CocO2,
    /// Intensity-like opponent channel; the default.
    CocO3,
    Luminance,
}

/// Whether moment distances use raw Hu values or the signed-log rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HuTransform {
    #[default]
    Raw,
    SignedLog,
}

/// Tunables for per-frame scoring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameScoreConfig {
    pub channel: ChannelSelect,
    /// Gaussian sigma for the edge-density criterion.
    pub sigma: f64,
    pub hu_transform: HuTransform,
    pub orb: OrbParams,
}

impl Default for FrameScoreConfig {
    fn default() -> Self {
        FrameScoreConfig {
            channel: ChannelSelect::CocO3,
            sigma: 1.0,
            hu_transform: HuTransform::Raw,
            orb: OrbParams::default(),
        }
    }
}

/// Extracts the configured scoring channel from a frame.
pub fn select_channel(frame: &Frame, channel: ChannelSelect) -> Plane {
    match channel {
        ChannelSelect::Luminance => to_grayscale(frame),
        coc => {
            let img = rgb_to_coc_with(frame, &COC_BASIS);
            match coc {
                ChannelSelect::CocO1 => img.o1,
                ChannelSelect::CocO2 => img.o2,
                _ => img.o3,
            }
        }
    }
}

/// The three per-frame criteria before any cross-frame processing.
#[derive(Debug, Clone)]
pub struct FrameFeatures {
    /// Hu signature with the configured transform already applied.
    pub hu: HuVector,
    pub edge: f64,
    pub keypoints: usize,
}

/// Computes the per-frame features on the configured channel. Errors carry
/// the frame's sequence index.
pub fn frame_features(frame: &Frame, cfg: &FrameScoreConfig) -> Result<FrameFeatures> {
    let tag = |e: Error| match e {
        Error::DegenerateInput(m) => {
            Error::DegenerateInput(format!("frame {}: {m}", frame.index()))
        }
        Error::InvalidInput(m) => Error::InvalidInput(format!("frame {}: {m}", frame.index())),
        other => other,
    };
    let plane = select_channel(frame, cfg.channel);
    let hu = hu_moments(&plane).map_err(tag)?;
    let hu = match cfg.hu_transform {
        HuTransform::Raw => hu,
        HuTransform::SignedLog => hu.signed_log(),
    };
    let edge = edge_score(&plane, cfg.sigma).map_err(tag)?;
    let keypoints = orb_count(&plane, &cfg.orb).map_err(tag)?;
    Ok(FrameFeatures {
        hu,
        edge,
        keypoints,
    })
}

/// Raw and normalized criterion scores for a frame sequence, plus the
/// fused score once weights have been applied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreSeries {
    /// Moment distance to the previous frame; the first frame scores 0.
    pub d_raw: Vec<f64>,
    /// Edge-density score.
    pub s_raw: Vec<f64>,
    /// Keypoint count.
    pub p_raw: Vec<f64>,
    pub d_norm: Vec<f64>,
    pub s_norm: Vec<f64>,
    pub p_norm: Vec<f64>,
    /// Filled by [`fuse_scores`]; empty until then.
    pub fused: Vec<f64>,
}

impl ScoreSeries {
    pub fn len(&self) -> usize {
        self.d_raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_raw.is_empty()
    }
}

/// Min-max normalization onto `[0, 1]`; a constant series maps to all
/// zeros.
pub fn min_max_normalize(xs: &[f64]) -> Vec<f64> {
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in xs {
        min = min.min(x);
        max = max.max(x);
    }
    if max == min {
        return vec![0.0; xs.len()];
    }
    let range = max - min;
    xs.iter().map(|&x| (x - min) / range).collect()
}

/// Builds raw and normalized series from per-frame features. Moment
/// distances compare consecutive frames; the first frame has no
/// predecessor and scores 0.
pub fn assemble_series(features: &[FrameFeatures]) -> ScoreSeries {
    let n = features.len();
    let mut d_raw = Vec::with_capacity(n);
    for (i, f) in features.iter().enumerate() {
        if i == 0 {
            d_raw.push(0.0);
        } else {
            d_raw.push(moment_distance(&f.hu, &features[i - 1].hu));
        }
    }
    let s_raw: Vec<f64> = features.iter().map(|f| f.edge).collect();
    let p_raw: Vec<f64> = features.iter().map(|f| f.keypoints as f64).collect();
    let d_norm = min_max_normalize(&d_raw);
    let s_norm = min_max_normalize(&s_raw);
    let p_norm = min_max_normalize(&p_raw);
    ScoreSeries {
        d_raw,
        s_raw,
        p_raw,
        d_norm,
        s_norm,
        p_norm,
        fused: Vec::new(),
    }
}

/// Scores every frame of a sequence on the configured channel.
pub fn compute_frame_scores(frames: &[Frame], cfg: &FrameScoreConfig) -> Result<ScoreSeries> {
    if frames.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "scoring needs at least 2 frames, got {}",
            frames.len()
        )));
    }
    let features: Vec<FrameFeatures> = frames
        .iter()
        .map(|f| frame_features(f, cfg))
        .collect::<Result<_>>()?;
    Ok(assemble_series(&features))
}

/// Criterion weights on the probability simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

/// Total variation of a series: the sum of absolute consecutive
/// differences.
fn total_variation(xs: &[f64]) -> f64 {
    xs.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Weights each criterion by the total variation of its normalized series,
/// normalized onto the simplex. All-constant series carry no signal and
/// are rejected.
pub fn adaptive_weights(series: &ScoreSeries) -> Result<AdaptiveWeights> {
    if series.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "weights need at least 2 frames, got {}",
            series.len()
        )));
    }
    let d1 = total_variation(&series.d_norm);
    let s1 = total_variation(&series.s_norm);
    let p1 = total_variation(&series.p_norm);
    let sum = d1 + s1 + p1;
    if sum == 0.0 {
        return Err(Error::DegenerateInput(
            "no criterion varies across the sequence; weights are undefined".into(),
        ));
    }
    Ok(AdaptiveWeights {
        w1: d1 / sum,
        w2: s1 / sum,
        w3: p1 / sum,
    })
}

/// Per-frame fused score `w1 d + w2 s + w3 p` on the normalized series,
/// clamped onto `[0, 1]` against floating-point drift.
pub fn fuse_scores(series: &ScoreSeries, w: &AdaptiveWeights) -> Vec<f64> {
    (0..series.len())
        .map(|i| {
            let f = w.w1 * series.d_norm[i] + w.w2 * series.s_norm[i] + w.w3 * series.p_norm[i];
            f.clamp(0.0, 1.0)
        })
        .collect()
}

/// How key frames are picked from the fused scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionPolicy {
    /// Frames at or above the nearest-rank q-quantile of the fused scores.
    Quantile(f64),
    /// The k highest-scoring frames, ties broken toward the lower index.
    TopK(usize),
    /// Frames with fused score at or above the threshold.
    Absolute(f64),
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        SelectionPolicy::Quantile(0.8)
    }
}

/// Selects key frames; the result is sorted ascending by frame index.
pub fn select_keyframes(fused: &[f64], policy: SelectionPolicy) -> Result<Vec<usize>> {
    let n = fused.len();
    if n == 0 {
        return Err(Error::InvalidInput("selection needs at least one frame".into()));
    }
    match policy {
        SelectionPolicy::Quantile(q) => {
            if !(0.0 < q && q < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "quantile must lie in (0, 1), got {q}"
                )));
            }
            let mut sorted = fused.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
            // nearest rank ceil(q n); the slack keeps exactly-representable
            // products like 0.8 * 5 from rounding up a rank
            let rank = ((q * n as f64) - 1e-9).ceil().max(1.0) as usize;
            let threshold = sorted[rank - 1];
            Ok((0..n).filter(|&i| fused[i] >= threshold).collect())
        }
        SelectionPolicy::TopK(k) => {
            if k == 0 || k > n {
                return Err(Error::InvalidParameter(format!(
                    "top-k must satisfy 1 <= k <= {n}, got {k}"
                )));
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                fused[b]
                    .partial_cmp(&fused[a])
                    .expect("finite scores")
                    .then(a.cmp(&b))
            });
            let mut picked: Vec<usize> = order[..k].to_vec();
            picked.sort_unstable();
            Ok(picked)
        }
        SelectionPolicy::Absolute(threshold) => {
            Ok((0..n).filter(|&i| fused[i] >= threshold).collect())
        }
    }
}

/// Writes the series as CSV with the fixed column order
/// `index,d_raw,s_raw,p_raw,d_norm,s_norm,p_norm,fused,selected`.
pub fn write_scores_csv(
    series: &ScoreSeries,
    selected: &[usize],
    mut w: impl Write,
) -> Result<()> {
    if series.fused.len() != series.len() {
        return Err(Error::InvalidInput(
            "series has no fused scores; fuse before writing".into(),
        ));
    }
    writeln!(w, "index,d_raw,s_raw,p_raw,d_norm,s_norm,p_norm,fused,selected")?;
    for i in 0..series.len() {
        let sel = selected.binary_search(&i).is_ok() as u8;
        writeln!(
            w,
            "{i},{},{},{},{},{},{},{},{sel}",
            series.d_raw[i],
            series.s_raw[i],
            series.p_raw[i],
            series.d_norm[i],
            series.s_norm[i],
            series.p_norm[i],
            series.fused[i],
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn series_from_norms(d: &[f64], s: &[f64], p: &[f64]) -> ScoreSeries {
        ScoreSeries {
            d_raw: d.to_vec(),
            s_raw: s.to_vec(),
            p_raw: p.to_vec(),
            d_norm: d.to_vec(),
            s_norm: s.to_vec(),
            p_norm: p.to_vec(),
            fused: Vec::new(),
        }
    }

    fn textured_frame(index: usize, phase: usize) -> Frame {
        Frame::from_fn(index, 24, 24, |x, y| {
            let v = if (x / 3 + y / 3 + phase) % 2 == 0 { 0.9 } else { 0.2 };
            [v, v * 0.8, v * 0.6]
        })
        .unwrap()
    }

    #[test]
    fn minmax_stretches_and_handles_constants() {
        assert_eq!(min_max_normalize(&[2.0, 4.0, 6.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(min_max_normalize(&[3.0, 3.0, 3.0]), vec![0.0, 0.0, 0.0]);
        let xs = [0.2, -1.0, 5.5, 2.0];
        let n = min_max_normalize(&xs);
        assert_eq!(n[1], 0.0);
        assert_eq!(n[2], 1.0);
    }

    #[test]
    fn identical_frames_zero_distance_constant_scores() {
        let frames: Vec<Frame> = (0..4).map(|i| textured_frame(i, 0)).collect();
        let series = compute_frame_scores(&frames, &FrameScoreConfig::default()).unwrap();
        assert!(series.d_raw.iter().all(|&d| d == 0.0));
        assert!(series.s_raw.windows(2).all(|w| w[0] == w[1]));
        assert!(series.p_raw.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn rotated_frame_has_negligible_moment_distance() {
        let base = textured_frame(0, 0);
        let rotated = Frame::from_fn(1, 24, 24, |x, y| base.pixel(24 - 1 - y, x)).unwrap();
        let frames = vec![base, rotated];
        let series = compute_frame_scores(&frames, &FrameScoreConfig::default()).unwrap();
        assert!(series.d_raw[1] <= 1e-12, "got {}", series.d_raw[1]);
    }

    #[test]
    fn series_matches_manual_composition() {
        let frames: Vec<Frame> = (0..3).map(|i| textured_frame(i, i % 2)).collect();
        let cfg = FrameScoreConfig::default();
        let series = compute_frame_scores(&frames, &cfg).unwrap();

        let feats: Vec<FrameFeatures> =
            frames.iter().map(|f| frame_features(f, &cfg).unwrap()).collect();
        assert_eq!(series.d_raw[0], 0.0);
        assert_eq!(series.d_raw[1], moment_distance(&feats[1].hu, &feats[0].hu));
        assert_eq!(series.d_raw[2], moment_distance(&feats[2].hu, &feats[1].hu));
        for i in 0..3 {
            assert_eq!(series.s_raw[i], feats[i].edge);
            assert_eq!(series.p_raw[i], feats[i].keypoints as f64);
        }
    }

    #[test]
    fn scoring_rejects_single_frame() {
        let frames = vec![textured_frame(0, 0)];
        assert!(matches!(
            compute_frame_scores(&frames, &FrameScoreConfig::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn black_frame_reports_its_index() {
        let black = Frame::from_fn(7, 24, 24, |_, _| [0.0, 0.0, 0.0]).unwrap();
        let err = frame_features(&black, &FrameScoreConfig::default()).unwrap_err();
        match err {
            Error::DegenerateInput(msg) => assert!(msg.contains("frame 7"), "{msg}"),
            other => panic!("expected degenerate input, got {other:?}"),
        }
    }

    #[test]
    fn worked_weight_example() {
        // total variations 3, 2 and 5 split the simplex as 0.3 / 0.2 / 0.5
        let series = series_from_norms(
            &[0.0, 1.0, 0.0, 1.0, 1.0, 1.0],
            &[0.0, 1.0, 1.0, 1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
        );
        let w = adaptive_weights(&series).unwrap();
        assert_eq!(w.w1, 0.3);
        assert_eq!(w.w2, 0.2);
        assert_eq!(w.w3, 0.5);
    }

    #[test]
    fn single_varying_criterion_takes_all_weight() {
        let series = series_from_norms(
            &[0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.5],
            &[0.0, 0.0, 0.0],
        );
        let w = adaptive_weights(&series).unwrap();
        assert_eq!((w.w1, w.w2, w.w3), (0.0, 1.0, 0.0));
    }

    #[test]
    fn all_constant_series_is_degenerate() {
        let series = series_from_norms(&[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]);
        assert!(matches!(
            adaptive_weights(&series),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn weights_match_scalar_loop_oracle() {
        let d = [0.1, 0.7, 0.3, 0.9, 0.2];
        let s = [0.5, 0.5, 0.8, 0.1, 0.4];
        let p = [0.0, 0.2, 0.9, 0.6, 1.0];
        let series = series_from_norms(&d, &s, &p);
        let w = adaptive_weights(&series).unwrap();
        let tv = |xs: &[f64]| {
            let mut acc = 0.0;
            for i in 0..xs.len() - 1 {
                acc += (xs[i + 1] - xs[i]).abs();
            }
            acc
        };
        let (d1, s1, p1) = (tv(&d), tv(&s), tv(&p));
        assert_abs_diff_eq!(w.w1, d1 / (d1 + s1 + p1), epsilon = 1e-15);
        assert_abs_diff_eq!(w.w2, s1 / (d1 + s1 + p1), epsilon = 1e-15);
        assert_abs_diff_eq!(w.w3, p1 / (d1 + s1 + p1), epsilon = 1e-15);
        assert_abs_diff_eq!(w.w1 + w.w2 + w.w3, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fusion_is_the_weighted_dot_product() {
        let series = series_from_norms(&[1.0, 0.2], &[0.0, 0.4], &[0.5, 0.6]);
        let w = AdaptiveWeights {
            w1: 0.2,
            w2: 0.3,
            w3: 0.5,
        };
        let fused = fuse_scores(&series, &w);
        assert_abs_diff_eq!(fused[0], 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(
            fused[1],
            0.2 * 0.2 + 0.3 * 0.4 + 0.5 * 0.6,
            epsilon = 1e-15
        );
    }

    #[test]
    fn fusion_of_all_ones_is_one() {
        let series = series_from_norms(&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]);
        let w = AdaptiveWeights {
            w1: 0.3,
            w2: 0.3,
            w3: 0.4,
        };
        for f in fuse_scores(&series, &w) {
            assert_eq!(f, 1.0);
        }
    }

    #[test]
    fn top_k_picks_highest_in_index_order() {
        let fused = [0.1, 0.9, 0.5, 0.95];
        assert_eq!(
            select_keyframes(&fused, SelectionPolicy::TopK(2)).unwrap(),
            vec![1, 3]
        );
    }

    #[test]
    fn top_k_breaks_ties_toward_lower_index() {
        let fused = [0.5, 0.9, 0.9, 0.1];
        assert_eq!(
            select_keyframes(&fused, SelectionPolicy::TopK(1)).unwrap(),
            vec![1]
        );
    }

    #[test]
    fn top_k_rejects_oversized_k() {
        assert!(matches!(
            select_keyframes(&[0.1, 0.2], SelectionPolicy::TopK(3)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn quantile_all_equal_selects_everything() {
        let fused = [0.4, 0.4, 0.4, 0.4];
        assert_eq!(
            select_keyframes(&fused, SelectionPolicy::Quantile(0.8)).unwrap(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn quantile_matches_sort_oracle() {
        let fused = [0.13, 0.87, 0.4, 0.71, 0.05, 0.66, 0.91, 0.2, 0.33, 0.5];
        let q = 0.7;
        let got = select_keyframes(&fused, SelectionPolicy::Quantile(q)).unwrap();
        // independent sort-based nearest-rank oracle
        let mut sorted = fused.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let rank = (q * fused.len() as f64).ceil() as usize;
        let threshold = sorted[rank - 1];
        let want: Vec<usize> = (0..fused.len()).filter(|&i| fused[i] >= threshold).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn quantile_rejects_out_of_range_q() {
        for q in [0.0, 1.0, -0.5, 2.0] {
            assert!(select_keyframes(&[0.5], SelectionPolicy::Quantile(q)).is_err());
        }
    }

    #[test]
    fn absolute_threshold_filters() {
        let fused = [0.1, 0.8, 0.5, 0.8];
        assert_eq!(
            select_keyframes(&fused, SelectionPolicy::Absolute(0.5)).unwrap(),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn csv_has_fixed_schema() {
        let mut series = series_from_norms(&[0.0, 1.0], &[0.5, 0.25], &[0.0, 1.0]);
        series.fused = vec![0.125, 0.75];
        let mut buf = Vec::new();
        write_scores_csv(&series, &[1], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "index,d_raw,s_raw,p_raw,d_norm,s_norm,p_norm,fused,selected"
        );
        assert_eq!(lines.next().unwrap(), "0,0,0.5,0,0,0.5,0,0.125,0");
        assert_eq!(lines.next().unwrap(), "1,1,0.25,1,1,0.25,1,0.75,1");
    }

    #[test]
    fn csv_requires_fused_scores() {
        let series = series_from_norms(&[0.0, 1.0], &[0.0, 1.0], &[0.0, 1.0]);
        let mut buf = Vec::new();
        assert!(write_scores_csv(&series, &[], &mut buf).is_err());
    }
}
