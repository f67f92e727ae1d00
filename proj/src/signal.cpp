#include "capuq/signal.hpp"

#include <algorithm>
#include <deque>

#include "capuq/errors.hpp"

namespace capuq {
namespace signal {

namespace {

constexpr double kStdFloor = 1e-8;

enum class Extreme { Min, Max };

// Sliding window order statistic with the window for output i being
// [i + lo_off, i + hi_off] clipped to [0, len). Monotone-deque, O(len).
Series sliding_extreme(const Series& x, Eigen::Index lo_off, Eigen::Index hi_off, Extreme kind) {
    const Eigen::Index len = x.size();
    Series out(len);
    std::deque<Eigen::Index> dq;
    auto better = [&](double a, double b) { return kind == Extreme::Min ? a <= b : a >= b; };
    Eigen::Index next = std::max<Eigen::Index>(0, lo_off);
    for (Eigen::Index i = 0; i < len; ++i) {
        const Eigen::Index hi = std::min(len - 1, i + hi_off);
        const Eigen::Index lo = std::max<Eigen::Index>(0, i + lo_off);
        for (; next <= hi; ++next) {
            while (!dq.empty() && better(x[next], x[dq.back()])) dq.pop_back();
            dq.push_back(next);
        }
        while (!dq.empty() && dq.front() < lo) dq.pop_front();
        out[i] = x[dq.front()];
    }
    return out;
}

void check_series(const Series& x, int n) {
    if (n < 1) throw ValidationError("lulu: window must be >= 1");
    if (x.size() <= 2 * static_cast<Eigen::Index>(n)) {
        throw ValidationError("lulu: series too short for window " + std::to_string(n));
    }
}

}  // namespace

Series lulu_lower(const Series& x, int n) {
    check_series(x, n);
    Series mins = sliding_extreme(x, 0, n, Extreme::Min);
    return sliding_extreme(mins, -n, 0, Extreme::Max);
}

Series lulu_upper(const Series& x, int n) {
    check_series(x, n);
    Series maxs = sliding_extreme(x, 0, n, Extreme::Max);
    return sliding_extreme(maxs, -n, 0, Extreme::Min);
}

Series lulu_smooth(const Series& x, int n) { return lulu_upper(lulu_lower(x, n), n); }

WaveformSample clean_sample(const WaveformSample& s, int n) {
    if (s.channels.rows() != kNumChannels) {
        throw ValidationError("clean_sample: expected 7 channels, got " +
                              std::to_string(s.channels.rows()));
    }
    WaveformSample out = s;
    for (int c = 1; c < kNumChannels; ++c) {
        out.channels.row(c) = lulu_smooth(s.channels.row(c).transpose(), n).transpose();
    }
    return out;
}

void RegionSpec::validate(Eigen::Index trace_len) const {
    if (!(0 < boot_end && boot_end < stable_end)) {
        throw ValidationError("RegionSpec: need 0 < boot_end < stable_end");
    }
    if (stable_end > trace_len) {
        throw ValidationError("RegionSpec: trace shorter than stable_end (" +
                              std::to_string(trace_len) + " < " + std::to_string(stable_end) + ")");
    }
    if (window_len < 1 || window_len > stable_end - boot_end) {
        throw ValidationError("RegionSpec: window_len must be in [1, stable_end - boot_end]");
    }
}

Eigen::VectorXd extract_window(const WaveformSample& s, const RegionSpec& r) {
    r.validate(s.trace_len());
    const Eigen::Index start = r.stable_end - r.window_len;
    Eigen::VectorXd out(kNumChannels * r.window_len);
    for (int c = 0; c < kNumChannels; ++c) {
        out.segment(c * r.window_len, r.window_len) =
            s.channels.row(c).segment(start, r.window_len).transpose();
    }
    return out;
}

ScalerStats fit_scaler(const Eigen::MatrixXd& train_features, const Eigen::MatrixXd& train_labels) {
    if (train_features.rows() == 0 || train_labels.rows() == 0) {
        throw ValidationError("fit_scaler: empty training partition");
    }
    if (train_features.rows() != train_labels.rows()) {
        throw ValidationError("fit_scaler: feature/label row counts differ");
    }
    auto fit = [](const Eigen::MatrixXd& m, Eigen::VectorXd& mean, Eigen::VectorXd& std) {
        const double n = static_cast<double>(m.rows());
        mean = m.colwise().mean();
        Eigen::MatrixXd centered = m.rowwise() - mean.transpose();
        std = (centered.array().square().colwise().sum() / n).sqrt().matrix();
        std = std.cwiseMax(kStdFloor);
    };
    ScalerStats stats;
    fit(train_features, stats.feature_mean, stats.feature_std);
    fit(train_labels, stats.label_mean, stats.label_std);
    return stats;
}

namespace {

Eigen::MatrixXd standardize(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean,
                            const Eigen::VectorXd& std, bool forward, const char* what) {
    if (x.cols() != mean.size()) {
        throw ValidationError(std::string(what) + ": width " + std::to_string(x.cols()) +
                              " does not match fitted width " + std::to_string(mean.size()));
    }
    if (forward) {
        return (x.rowwise() - mean.transpose()).array().rowwise() /
               std.transpose().array();
    }
    return (x.array().rowwise() * std.transpose().array()).matrix().rowwise() + mean.transpose();
}

}  // namespace

Eigen::MatrixXd ScalerStats::apply_features(const Eigen::MatrixXd& x) const {
    return standardize(x, feature_mean, feature_std, true, "apply_features");
}
Eigen::MatrixXd ScalerStats::invert_features(const Eigen::MatrixXd& x) const {
    return standardize(x, feature_mean, feature_std, false, "invert_features");
}
Eigen::MatrixXd ScalerStats::apply_labels(const Eigen::MatrixXd& y) const {
    return standardize(y, label_mean, label_std, true, "apply_labels");
}
Eigen::MatrixXd ScalerStats::invert_labels(const Eigen::MatrixXd& y) const {
    return standardize(y, label_mean, label_std, false, "invert_labels");
}

}  // namespace signal
}  // namespace capuq
