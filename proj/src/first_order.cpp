#include <algorithm>
#include <cmath>
#include <vector>

#include "radmort/features.hpp"

namespace radmort {

namespace {

// Linear-interpolation percentile on a sorted sample (the numpy default):
// h = (n-1) * q / 100, interpolate between the straddling order statistics.
double percentile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = (static_cast<double>(n) - 1.0) * q / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<double> first_order_features(const VolumeGrid& v, const MaskGrid& m, const DiscretizedVolume& d) {
    validate(v, "first_order volume");
    validate(m, "first_order mask");
    require_same_geometry(v, m, "first_order_features");

    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(mask_voxel_count(m)));
    for (std::int64_t i = 0; i < v.size(); ++i)
        if (m.voxels[i]) x.push_back(v.voxels[i]);
    if (x.empty()) throw ValidationError("first_order_features: empty mask");
    const double n = static_cast<double>(x.size());

    double sum = 0.0, sum_sq = 0.0;
    for (double xi : x) {
        sum += xi;
        sum_sq += xi * xi;
    }
    const double mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0, abs_dev = 0.0;
    for (double xi : x) {
        const double c = xi - mean;
        const double c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
        abs_dev += std::abs(c);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double variance = m2;  // population, divisor N
    const double sd = std::sqrt(variance);
    // Standardized moments are 0 by convention for constant regions.
    const double skewness = sd > 0.0 ? m3 / (sd * sd * sd) : 0.0;
    const double kurtosis = variance > 0.0 ? m4 / (variance * variance) : 0.0;

    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const double minimum = sorted.front();
    const double maximum = sorted.back();
    const double p10 = percentile_sorted(sorted, 10.0);
    const double p25 = percentile_sorted(sorted, 25.0);
    const double median = percentile_sorted(sorted, 50.0);
    const double p75 = percentile_sorted(sorted, 75.0);
    const double p90 = percentile_sorted(sorted, 90.0);

    // Robust MAD: absolute deviation around the mean of the 10..90 percentile
    // subset (inclusive bounds).
    double robust_sum = 0.0, robust_count = 0.0;
    for (double xi : sorted)
        if (xi >= p10 && xi <= p90) {
            robust_sum += xi;
            robust_count += 1.0;
        }
    double robust_mad = 0.0;
    if (robust_count > 0.0) {
        const double robust_mean = robust_sum / robust_count;
        double acc = 0.0;
        for (double xi : sorted)
            if (xi >= p10 && xi <= p90) acc += std::abs(xi - robust_mean);
        robust_mad = acc / robust_count;
    }

    // Histogram features over the discretized levels.
    std::vector<double> hist(static_cast<std::size_t>(d.num_levels), 0.0);
    double level_count = 0.0;
    for (Eigen::Index i = 0; i < d.levels.size(); ++i)
        if (d.levels[i] > 0) {
            hist[static_cast<std::size_t>(d.levels[i] - 1)] += 1.0;
            level_count += 1.0;
        }
    double entropy = 0.0, uniformity = 0.0;
    for (double c : hist) {
        if (c <= 0.0) continue;
        const double p = c / level_count;
        entropy -= p * std::log2(p);
        uniformity += p * p;
    }
    entropy = std::max(entropy, 0.0);

    const double energy = sum_sq;
    const double total_energy = energy * v.voxel_volume_mm3();
    const double rms = std::sqrt(sum_sq / n);

    // Alphabetical order; keep in sync with first_order_feature_names().
    return {
        energy,
        entropy,
        p75 - p25,        // interquartile_range
        kurtosis,
        maximum,
        mean,
        abs_dev / n,      // mean_absolute_deviation
        median,
        minimum,
        p10,
        p90,
        maximum - minimum,  // range
        robust_mad,
        rms,
        skewness,
        total_energy,
        uniformity,
        variance,
    };
}

}  // namespace radmort
