#pragma once

#include <Eigen/Dense>

namespace capuq {

/// One simulated pulse: 7 channels by T timesteps plus its capacitance labels.
/// Channel 0 is V_out; channels 1-6 are the six phase currents
/// (IAPS, IAP, IBPS, IBP, ICPS, ICP analogs).
struct WaveformSample {
    Eigen::MatrixXd channels;  // 7 x T
    Eigen::Vector3d labels_pf;

    Eigen::Index trace_len() const { return channels.cols(); }
};

inline constexpr int kNumChannels = 7;
inline constexpr int kNumLabels = 3;

}  // namespace capuq
