#include "radmort/glcm.hpp"

#include <cmath>

#include "radmort/features.hpp"

namespace radmort {

const std::array<std::array<int, 3>, 13>& glcm_directions() {
    static const std::array<std::array<int, 3>, 13> dirs = {{
        {1, 0, 0},
        {0, 1, 0},
        {0, 0, 1},
        {1, 1, 0},
        {1, -1, 0},
        {1, 0, 1},
        {1, 0, -1},
        {0, 1, 1},
        {0, 1, -1},
        {1, 1, 1},
        {1, 1, -1},
        {1, -1, 1},
        {1, -1, -1},
    }};
    return dirs;
}

Eigen::MatrixXd GlcmMatrix::normalized(std::size_t direction) const {
    const double total = pair_count(direction);
    if (total <= 0.0) return Eigen::MatrixXd::Zero(num_levels, num_levels);
    return counts[direction] / total;
}

GlcmMatrix build_glcm(const DiscretizedVolume& d) {
    GlcmMatrix g;
    g.num_levels = d.num_levels;
    g.counts.assign(glcm_directions().size(), Eigen::MatrixXd::Zero(d.num_levels, d.num_levels));

    const int nx = d.dims[0], ny = d.dims[1], nz = d.dims[2];
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                const int li = d.level_at(x, y, z);
                if (li == 0) continue;
                for (std::size_t k = 0; k < glcm_directions().size(); ++k) {
                    const auto& dir = glcm_directions()[k];
                    const int xx = x + dir[0], yy = y + dir[1], zz = z + dir[2];
                    if (xx < 0 || xx >= nx || yy < 0 || yy >= ny || zz < 0 || zz >= nz) continue;
                    const int lj = d.level_at(xx, yy, zz);
                    if (lj == 0) continue;
                    g.counts[k](li - 1, lj - 1) += 1.0;
                    g.counts[k](lj - 1, li - 1) += 1.0;
                }
            }
    return g;
}

namespace {

// Features of one normalized symmetric matrix P (levels are 1-based values
// i = row + 1). Entropies use log base 2. Degenerate conventions: with a
// single occupied level, correlation and both information measures are 0.
struct GlcmAccum {
    double autocorrelation = 0, joint_average = 0, cluster_prominence = 0, cluster_shade = 0,
           cluster_tendency = 0, contrast = 0, correlation = 0, difference_average = 0,
           difference_entropy = 0, difference_variance = 0, imc1 = 0, imc2 = 0, inverse_difference = 0,
           idm = 0, idmn = 0, idn = 0, inverse_variance = 0, joint_energy = 0, joint_entropy = 0,
           joint_maximum = 0, maximum_probability = 0, sum_average = 0, sum_entropy = 0, sum_squares = 0;
};

GlcmAccum features_of(const Eigen::MatrixXd& P) {
    const int ng = static_cast<int>(P.rows());
    GlcmAccum f;

    Eigen::VectorXd px = P.rowwise().sum();
    double mu = 0.0;
    for (int i = 0; i < ng; ++i) mu += (i + 1.0) * px[i];
    double sigma2 = 0.0;
    for (int i = 0; i < ng; ++i) sigma2 += (i + 1.0 - mu) * (i + 1.0 - mu) * px[i];

    Eigen::VectorXd p_sum = Eigen::VectorXd::Zero(2 * ng - 1);   // k = i + j in [2, 2*ng]
    Eigen::VectorXd p_diff = Eigen::VectorXd::Zero(ng);          // k = |i - j| in [0, ng-1]

    for (int i = 0; i < ng; ++i)
        for (int j = 0; j < ng; ++j) {
            const double p = P(i, j);
            if (p == 0.0) continue;
            const double vi = i + 1.0, vj = j + 1.0;
            f.autocorrelation += vi * vj * p;
            const double s = vi + vj - 2.0 * mu;
            f.cluster_tendency += s * s * p;
            f.cluster_shade += s * s * s * p;
            f.cluster_prominence += s * s * s * s * p;
            f.contrast += (vi - vj) * (vi - vj) * p;
            f.joint_energy += p * p;
            f.joint_entropy -= p * std::log2(p);
            f.maximum_probability = std::max(f.maximum_probability, p);
            f.sum_squares += (vi - mu) * (vi - mu) * p;
            p_sum[i + j] += p;
            p_diff[std::abs(i - j)] += p;
        }
    f.joint_average = mu;
    f.joint_maximum = f.maximum_probability;

    for (int k = 0; k < ng; ++k) {
        const double p = p_diff[k];
        if (p == 0.0) continue;
        f.difference_average += k * p;
        f.difference_entropy -= p * std::log2(p);
        f.inverse_difference += p / (1.0 + k);
        f.idn += p / (1.0 + static_cast<double>(k) / ng);
        f.idm += p / (1.0 + static_cast<double>(k) * k);
        f.idmn += p / (1.0 + static_cast<double>(k) * k / (static_cast<double>(ng) * ng));
        if (k > 0) f.inverse_variance += p / (static_cast<double>(k) * k);
    }
    for (int k = 0; k < ng; ++k) {
        const double p = p_diff[k];
        if (p == 0.0) continue;
        f.difference_variance += (k - f.difference_average) * (k - f.difference_average) * p;
    }
    for (int k = 0; k < 2 * ng - 1; ++k) {
        const double p = p_sum[k];
        if (p == 0.0) continue;
        f.sum_average += (k + 2.0) * p;
        f.sum_entropy -= p * std::log2(p);
    }

    if (sigma2 > 0.0) {
        double cov = 0.0;
        for (int i = 0; i < ng; ++i)
            for (int j = 0; j < ng; ++j) cov += (i + 1.0 - mu) * (j + 1.0 - mu) * P(i, j);
        f.correlation = cov / sigma2;  // symmetric P: sigma_x == sigma_y
    }

    // Information measures of correlation over the marginals.
    double hx = 0.0, hxy1 = 0.0, hxy2 = 0.0;
    for (int i = 0; i < ng; ++i) {
        if (px[i] > 0.0) hx -= px[i] * std::log2(px[i]);
        for (int j = 0; j < ng; ++j) {
            const double q = px[i] * px[j];
            if (q <= 0.0) continue;
            hxy2 -= q * std::log2(q);
            if (P(i, j) > 0.0) hxy1 -= P(i, j) * std::log2(q);
        }
    }
    if (hx > 0.0) f.imc1 = (f.joint_entropy - hxy1) / hx;
    const double imc2_arg = 1.0 - std::exp(-2.0 * (hxy2 - f.joint_entropy));
    f.imc2 = imc2_arg > 0.0 ? std::sqrt(imc2_arg) : 0.0;

    return f;
}

}  // namespace

std::vector<double> glcm_features(const DiscretizedVolume& d) {
    const GlcmMatrix g = build_glcm(d);

    // Average feature values over the directions that contain pairs.
    Eigen::Array<double, 24, 1> acc = Eigen::Array<double, 24, 1>::Zero();
    int live_directions = 0;
    for (std::size_t k = 0; k < g.counts.size(); ++k) {
        if (g.pair_count(k) <= 0.0) continue;
        ++live_directions;
        const GlcmAccum f = features_of(g.normalized(k));
        // Alphabetical order; keep in sync with glcm_feature_names().
        const double row[24] = {
            f.autocorrelation, f.cluster_prominence, f.cluster_shade, f.cluster_tendency,
            f.contrast,        f.correlation,        f.difference_average, f.difference_entropy,
            f.difference_variance, f.imc1,           f.imc2,            f.inverse_difference,
            f.idm,             f.idmn,               f.idn,             f.inverse_variance,
            f.joint_average,   f.joint_energy,       f.joint_entropy,   f.joint_maximum,
            f.maximum_probability, f.sum_average,    f.sum_entropy,     f.sum_squares,
        };
        for (int i = 0; i < 24; ++i) acc[i] += row[i];
    }
    if (live_directions == 0)
        throw ValidationError("glcm_features: no co-occurring pair in any direction");
    acc /= live_directions;
    return std::vector<double>(acc.data(), acc.data() + 24);
}

}  // namespace radmort
