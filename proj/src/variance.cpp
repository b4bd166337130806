#include "aqc/variance.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "aqc/parallel.hpp"
#include "aqc/rng.hpp"

namespace aqc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

CostSpec scan_spec(const VarianceScan& scan, std::size_t n) {
    CostSpec spec;
    switch (scan.cost) {
    case VarianceScan::Cost::Global:
        spec.kind = CostKind::StateGlobal;
        break;
    case VarianceScan::Cost::LocalFull:
        spec.kind = CostKind::StateLocal;
        spec.weights = FlipWeights::uniform_locality(n, n - 1);
        break;
    case VarianceScan::Cost::Truncated:
        spec.kind = CostKind::StateLocal;
        spec.weights = scan.weight_rule == VarianceScan::WeightRule::Telescoping
                           ? FlipWeights::telescoping(n, scan.truncation)
                           : FlipWeights::uniform_locality(n, scan.truncation);
        break;
    }
    return spec;
}

}  // namespace

void VarianceScan::validate() const {
    if (qubit_counts.empty())
        throw std::invalid_argument("variance scan needs at least one qubit count");
    if (samples < 2) throw std::invalid_argument("variance scan needs samples >= 2");
    if (jackknife_blocks < 2 || jackknife_blocks > samples)
        throw std::invalid_argument("jackknife blocks must lie in [2, samples]");
    for (std::size_t n : qubit_counts) {
        if (n < 1) throw std::invalid_argument("qubit count must be positive");
        if (component >= n)
            throw std::invalid_argument("gradient component exceeds qubit count");
        if (cost == Cost::LocalFull && n < 2)
            throw std::invalid_argument("full local cost needs at least 2 qubits");
        if (cost == Cost::Truncated && (truncation < 1 || truncation > n - 1))
            throw std::invalid_argument("truncation order must satisfy k <= n - 1");
    }
}

const char* VarianceScan::cost_name() const {
    switch (cost) {
    case Cost::Global: return "global";
    case Cost::LocalFull: return "local-full";
    default: return "truncated-local";
    }
}

std::vector<VariancePoint> estimate_gradient_variance(const VarianceScan& scan) {
    scan.validate();
    std::vector<VariancePoint> points;
    points.reserve(scan.qubit_counts.size());

    for (std::size_t n : scan.qubit_counts) {
        CostSpec spec = scan_spec(scan, n);

        const std::size_t block_count = scan.jackknife_blocks;
        const std::size_t samples = scan.samples;

        // One gradient sample per substream; fixed-size blocks keep the merge
        // order independent of threading.
        std::vector<double> block_sum(block_count, 0.0);
        std::vector<double> block_sum_sq(block_count, 0.0);
        std::vector<std::size_t> block_size(block_count, 0);

        std::vector<double> values(samples, 0.0);
        parallel_for(samples, 2048, [&](std::size_t lo, std::size_t hi) {
            CostFunction fn(product_ansatz(n), StateVector::zero_state(n), spec);
            std::vector<double> angles(n);
            for (std::size_t s = lo; s < hi; ++s) {
                Rng rng(substream_seed(scan.seed ^ (0x5851f42d4c957f2dull * n), s));
                for (double& a : angles) a = rng.uniform(0.0, kTwoPi);
                GradientReport rep = fn.value_and_gradient(angles);
                values[s] = rep.gradient[scan.component];
            }
        });
        for (std::size_t s = 0; s < samples; ++s) {
            std::size_t b = s * block_count / samples;
            block_sum[b] += values[s];
            block_sum_sq[b] += values[s] * values[s];
            block_size[b] += 1;
        }

        double total_sum = 0.0, total_sum_sq = 0.0;
        for (std::size_t b = 0; b < block_count; ++b) {
            total_sum += block_sum[b];
            total_sum_sq += block_sum_sq[b];
        }
        const double n_samples = static_cast<double>(samples);
        const double mean = total_sum / n_samples;
        const double variance =
            (total_sum_sq - total_sum * total_sum / n_samples) / (n_samples - 1.0);

        // Jackknife over leave-one-block-out estimates.
        std::vector<double> jack_var(block_count, 0.0);
        std::vector<double> jack_mean(block_count, 0.0);
        for (std::size_t b = 0; b < block_count; ++b) {
            double s1 = total_sum - block_sum[b];
            double s2 = total_sum_sq - block_sum_sq[b];
            double m = n_samples - static_cast<double>(block_size[b]);
            jack_mean[b] = s1 / m;
            jack_var[b] = (s2 - s1 * s1 / m) / (m - 1.0);
        }
        auto jackknife_stderr = [&](const std::vector<double>& reps) {
            double avg = 0.0;
            for (double r : reps) avg += r;
            avg /= static_cast<double>(block_count);
            double acc = 0.0;
            for (double r : reps) acc += (r - avg) * (r - avg);
            double bc = static_cast<double>(block_count);
            return std::sqrt((bc - 1.0) / bc * acc);
        };

        VariancePoint point;
        point.n = n;
        point.samples = samples;
        point.mean = mean;
        point.variance = variance;
        point.variance_stderr = jackknife_stderr(jack_var);
        point.mean_stderr = jackknife_stderr(jack_mean);
        points.push_back(point);
    }
    return points;
}

LogFit fit_log_variance(const std::vector<VariancePoint>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("log fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(points.size());
    for (const auto& p : points) {
        if (!(p.variance > 0))
            throw std::domain_error("log fit requires positive variances");
        double x = static_cast<double>(p.n);
        double y = std::log(p.variance);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    LogFit fit;
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

void write_variance_csv(std::ostream& os, const VarianceScan& scan,
                        const std::vector<VariancePoint>& points) {
    os << "n,cost_kind,k,samples,variance,stderr,seed\n";
    char buf[64];
    for (const auto& p : points) {
        std::size_t k = scan.cost == VarianceScan::Cost::Truncated ? scan.truncation
                        : scan.cost == VarianceScan::Cost::LocalFull ? p.n - 1
                                                                     : 0;
        os << p.n << ',' << scan.cost_name() << ',' << k << ',' << p.samples << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", p.variance);
        os << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", p.variance_stderr);
        os << buf << ',' << scan.seed << '\n';
    }
}

}  // namespace aqc
