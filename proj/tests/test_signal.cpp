#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capuq/errors.hpp"
#include "capuq/rng.hpp"
#include "capuq/signal.hpp"

using capuq::Rng;
using capuq::WaveformSample;
namespace sg = capuq::signal;
using sg::Series;

namespace {

// Direct evaluation of the LULU definitions with explicit clipped loops.
// Independent of the deque implementation.
Series brute_lower(const Series& x, int n) {
    const Eigen::Index len = x.size();
    Series out(len);
    for (Eigen::Index i = 0; i < len; ++i) {
        double best = -INFINITY;
        for (Eigen::Index j = std::max<Eigen::Index>(0, i - n); j <= i; ++j) {
            double m = INFINITY;
            for (Eigen::Index k = j; k <= std::min(len - 1, j + n); ++k) m = std::min(m, x[k]);
            best = std::max(best, m);
        }
        out[i] = best;
    }
    return out;
}

Series brute_upper(const Series& x, int n) {
    const Eigen::Index len = x.size();
    Series out(len);
    for (Eigen::Index i = 0; i < len; ++i) {
        double best = INFINITY;
        for (Eigen::Index j = std::max<Eigen::Index>(0, i - n); j <= i; ++j) {
            double m = -INFINITY;
            for (Eigen::Index k = j; k <= std::min(len - 1, j + n); ++k) m = std::max(m, x[k]);
            best = std::min(best, m);
        }
        out[i] = best;
    }
    return out;
}

Series spiked_series(Rng& rng, Eigen::Index len) {
    Series x(len);
    for (Eigen::Index i = 0; i < len; ++i) {
        x[i] = std::sin(0.05 * double(i)) + 0.1 * rng.normal();
    }
    int spikes = 1 + int(rng.uniform_index(5));
    for (int s = 0; s < spikes; ++s) {
        Eigen::Index pos = Eigen::Index(rng.uniform_index(std::uint64_t(len)));
        x[pos] += (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(5.0, 20.0);
    }
    return x;
}

}  // namespace

TEST_CASE("lulu matches direct-definition oracle on random series") {
    Rng rng(10);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::Index len = 11 + Eigen::Index(rng.uniform_index(40));
        int n = 1 + int(rng.uniform_index(4));
        if (len <= 2 * n) continue;
        Series x = spiked_series(rng, len);
        CHECK((sg::lulu_lower(x, n) - brute_lower(x, n)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((sg::lulu_upper(x, n) - brute_upper(x, n)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("lulu hand examples") {
    Series spike(5);
    spike << 0, 0, 10, 0, 0;
    CHECK(sg::lulu_lower(spike, 1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sg::lulu_smooth(spike, 1).cwiseAbs().maxCoeff() == 0.0);

    Series dip(5);
    dip << 5, 5, -9, 5, 5;
    Series smoothed = sg::lulu_smooth(dip, 1);
    CHECK((smoothed.array() == 5.0).all());
}

TEST_CASE("lulu leaves monotone and constant series unchanged") {
    for (int n = 1; n <= 3; ++n) {
        Series inc(12);
        for (int i = 0; i < 12; ++i) inc[i] = i * 0.7 - 2;
        CHECK((sg::lulu_lower(inc, n) - inc).cwiseAbs().maxCoeff() == 0.0);
        CHECK((sg::lulu_upper(inc, n) - inc).cwiseAbs().maxCoeff() == 0.0);
        CHECK((sg::lulu_smooth(inc, n) - inc).cwiseAbs().maxCoeff() == 0.0);

        Series dec = -inc;
        CHECK((sg::lulu_smooth(dec, n) - dec).cwiseAbs().maxCoeff() == 0.0);

        Series flat = Series::Constant(9, 3.5);
        CHECK((sg::lulu_smooth(flat, n) - flat).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("lulu smooth is idempotent and order-bounded") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::Index len = 15 + Eigen::Index(rng.uniform_index(60));
        int n = 1 + int(rng.uniform_index(3));
        if (len <= 2 * n) continue;
        Series x = spiked_series(rng, len);
        Series once = sg::lulu_smooth(x, n);
        Series twice = sg::lulu_smooth(once, n);
        CHECK((twice - once).cwiseAbs().maxCoeff() == 0.0);  // exact

        Series lo = sg::lulu_lower(x, n);
        Series hi = sg::lulu_upper(x, n);
        CHECK((lo.array() <= x.array()).all());
        CHECK((x.array() <= hi.array()).all());
    }
}

TEST_CASE("lulu smooth on a sine bounded by adjacent-sample gap") {
    Series x(100);
    double max_gap = 0;
    for (int i = 0; i < 100; ++i) x[i] = std::sin(2 * M_PI * i / 25.0);
    for (int i = 1; i < 100; ++i) max_gap = std::max(max_gap, std::abs(x[i] - x[i - 1]));
    Series sm = sg::lulu_smooth(x, 1);
    CHECK((sm - x).cwiseAbs().maxCoeff() <= max_gap);
}

TEST_CASE("lulu rejects too-short series") {
    Series x(4);
    x << 1, 2, 3, 4;
    CHECK_THROWS_AS(sg::lulu_lower(x, 2), capuq::ValidationError);
    CHECK_THROWS_AS(sg::lulu_smooth(x, 0), capuq::ValidationError);
}

namespace {

WaveformSample make_sample(Eigen::Index t) {
    WaveformSample s;
    s.channels = Eigen::MatrixXd::Zero(7, t);
    for (int c = 0; c < 7; ++c)
        for (Eigen::Index i = 0; i < t; ++i) s.channels(c, i) = std::sin(0.01 * double(i) + c);
    s.labels_pf << 3000, 3100, 3200;
    return s;
}

}  // namespace

TEST_CASE("clean_sample touches only current channels") {
    WaveformSample s = make_sample(50);
    s.channels(0, 20) += 40.0;  // spike in V_out only
    WaveformSample cleaned = sg::clean_sample(s, 1);
    CHECK((cleaned.channels.row(0) - s.channels.row(0)).cwiseAbs().maxCoeff() == 0.0);

    WaveformSample s2 = make_sample(50);
    s2.channels(3, 25) += 40.0;
    WaveformSample c2 = sg::clean_sample(s2, 1);
    // Spiked channel matches the per-channel oracle; others bit-identical.
    Series want = sg::lulu_smooth(s2.channels.row(3).transpose(), 1);
    CHECK((c2.channels.row(3).transpose() - want).cwiseAbs().maxCoeff() == 0.0);
    for (int ch : {1, 2, 4, 5, 6}) {
        Series self = sg::lulu_smooth(s2.channels.row(ch).transpose(), 1);
        CHECK((c2.channels.row(ch).transpose() - self).cwiseAbs().maxCoeff() == 0.0);
    }

    // Second pass identical (idempotence).
    WaveformSample c3 = sg::clean_sample(c2, 1);
    CHECK((c3.channels - c2.channels).cwiseAbs().maxCoeff() == 0.0);

    WaveformSample bad;
    bad.channels = Eigen::MatrixXd::Zero(6, 50);
    CHECK_THROWS_AS(sg::clean_sample(bad, 1), capuq::ValidationError);
}

TEST_CASE("extract_window slices the stable tail") {
    sg::RegionSpec r;  // defaults 860 / 3260 / 1000
    WaveformSample s = make_sample(5261);
    Eigen::VectorXd f = sg::extract_window(s, r);
    REQUIRE(f.size() == 7000);
    // Channel c occupies [c*1000, (c+1)*1000) and starts at trace index 2260.
    for (int c = 0; c < 7; ++c) {
        CHECK(f[c * 1000] == s.channels(c, 2260));
        CHECK(f[c * 1000 + 999] == s.channels(c, 3259));
    }

    sg::RegionSpec whole = r;
    whole.window_len = r.stable_end - r.boot_end;
    CHECK(sg::extract_window(s, whole).size() == 7 * 2400);

    sg::RegionSpec one = r;
    one.window_len = 1;
    Eigen::VectorXd f1 = sg::extract_window(s, one);
    REQUIRE(f1.size() == 7);
    for (int c = 0; c < 7; ++c) CHECK(f1[c] == s.channels(c, 3259));

    WaveformSample shorty = make_sample(3000);
    CHECK_THROWS_AS(sg::extract_window(shorty, r), capuq::ValidationError);
}

TEST_CASE("scaler round trip and degenerate columns") {
    Rng rng(5);
    Eigen::MatrixXd feats = rng.normal_matrix(40, 6);
    feats.col(2).setConstant(7.5);  // degenerate feature
    Eigen::MatrixXd labels = rng.normal_matrix(40, 3) * 300.0;
    labels.array() += 3450.0;

    sg::ScalerStats stats = sg::fit_scaler(feats, labels);
    CHECK(stats.feature_std.minCoeff() > 0.0);

    Eigen::MatrixXd z = stats.apply_features(feats);
    CHECK(z.col(2).cwiseAbs().maxCoeff() == 0.0);  // constant column maps to 0

    Eigen::MatrixXd back = stats.invert_features(z);
    CHECK((back - feats).cwiseAbs().maxCoeff() < 1e-10);

    Eigen::MatrixXd zl = stats.apply_labels(labels);
    CHECK((stats.invert_labels(zl) - labels).cwiseAbs().maxCoeff() < 1e-9);

    CHECK_THROWS_AS(sg::fit_scaler(Eigen::MatrixXd(), Eigen::MatrixXd()),
                    capuq::ValidationError);
}

TEST_CASE("scaler grid labels center at 3450") {
    // Full 2900..4000 grid in one label column.
    Eigen::MatrixXd labels(12, 3);
    for (int i = 0; i < 12; ++i)
        labels.row(i) << 2900 + 100 * i, 2900 + 100 * i, 2900 + 100 * i;
    Eigen::MatrixXd feats = Eigen::MatrixXd::Random(12, 4);
    sg::ScalerStats stats = sg::fit_scaler(feats, labels);
    CHECK(stats.label_mean[0] == doctest::Approx(3450.0).epsilon(1e-12));
    // Inverted predictions land back in pF.
    Eigen::MatrixXd z = stats.apply_labels(labels);
    Eigen::MatrixXd pf = stats.invert_labels(z);
    CHECK(pf(0, 0) == doctest::Approx(2900.0).epsilon(1e-10));
    CHECK(pf(11, 2) == doctest::Approx(4000.0).epsilon(1e-10));
}
