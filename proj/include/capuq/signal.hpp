#pragma once

#include <Eigen/Dense>

#include "capuq/waveform.hpp"

namespace capuq {
namespace signal {

using Series = Eigen::VectorXd;

/// Boot / stable / ring-down boundaries and the analysis window taken from
/// the tail of the stable region.
struct RegionSpec {
    Eigen::Index boot_end = 860;
    Eigen::Index stable_end = 3260;
    Eigen::Index window_len = 1000;

    void validate(Eigen::Index trace_len) const;
};

/// Per-feature and per-label standardization statistics, fitted on the
/// training partition only.
struct ScalerStats {
    Eigen::VectorXd feature_mean, feature_std;
    Eigen::VectorXd label_mean, label_std;

    Eigen::MatrixXd apply_features(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd invert_features(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd apply_labels(const Eigen::MatrixXd& y) const;
    Eigen::MatrixXd invert_labels(const Eigen::MatrixXd& y) const;
};

/// LULU lower operator: (L_n x)_i = max_{j in [i-n, i]} min_{k in [j, j+n]} x_k,
/// windows clipped to the valid range. Removes upward impulses of width <= n.
Series lulu_lower(const Series& x, int n);

/// Dual of lulu_lower (min of maxes). Removes downward impulses of width <= n.
Series lulu_upper(const Series& x, int n);

/// upper(lower(x)): idempotent impulsive-noise smoother.
Series lulu_smooth(const Series& x, int n);

/// Smooth the six current channels; V_out (channel 0) is left untouched.
WaveformSample clean_sample(const WaveformSample& s, int n);

/// Concatenate the 7 channels' slices [stable_end - window_len, stable_end).
Eigen::VectorXd extract_window(const WaveformSample& s, const RegionSpec& r);

/// Fit z-score statistics; stds are floored at 1e-8 so degenerate columns map
/// to zero instead of dividing by zero.
ScalerStats fit_scaler(const Eigen::MatrixXd& train_features,
                       const Eigen::MatrixXd& train_labels);

}  // namespace signal
}  // namespace capuq
