#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "aqc/gradient.hpp"

namespace aqc {

/// Monte-Carlo scan of Var[dC/dtheta_j] over uniform angles for the
/// single-rotation product ansatz against the |0...0> target.
struct VarianceScan {
    enum class Cost { Global, LocalFull, Truncated };
    enum class WeightRule { Telescoping, UniformLocality };

    std::vector<std::size_t> qubit_counts;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    Cost cost = Cost::Global;
    std::size_t truncation = 1;  // k for Truncated
    WeightRule weight_rule = WeightRule::Telescoping;
    std::size_t component = 0;  // j in dC/dtheta_j
    std::size_t jackknife_blocks = 100;

    void validate() const;
    const char* cost_name() const;
};

struct VariancePoint {
    std::size_t n = 0;
    std::size_t samples = 0;
    double variance = 0.0;
    double variance_stderr = 0.0;  // jackknife over blocks
    double mean = 0.0;
    double mean_stderr = 0.0;
};

/// Each sample draws its angles from an independent substream of the scan
/// seed, so the table is identical for any worker count.
std::vector<VariancePoint> estimate_gradient_variance(const VarianceScan& scan);

/// Least-squares fit of log(variance) against n.
struct LogFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LogFit fit_log_variance(const std::vector<VariancePoint>& points);

/// CSV columns: n, cost_kind, k, samples, variance, stderr, seed.
void write_variance_csv(std::ostream& os, const VarianceScan& scan,
                        const std::vector<VariancePoint>& points);

}  // namespace aqc
