#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

#include "radmort/discretize.hpp"
#include "radmort/grid.hpp"

namespace radmort {

// Named, ordered radiomics features for one scan. Canonical order is
// family-major (shape, first-order, GLCM, GLSZM), alphabetical within each
// family; names carry a family prefix. The full vector has 72 entries and
// never contains NaN (degenerate cases resolve to documented conventions).
struct FeatureVector {
    std::string scan_id;
    Eigen::VectorXd values;
};

// Canonical name lists. Stable across runs and releases of this codebase.
const std::vector<std::string>& shape_feature_names();        // 14, "shape_" prefix
const std::vector<std::string>& first_order_feature_names();  // 18, "firstorder_" prefix
const std::vector<std::string>& glcm_feature_names();         // 24, "glcm_" prefix
const std::vector<std::string>& glszm_feature_names();        // 16, "glszm_" prefix
const std::vector<std::string>& all_feature_names();          // 72, canonical order

struct ExtractionConfig {
    // Bin width for gray-level discretization, expressed in HU. For volumes
    // already normalized to [0, 1] the width is rescaled by the HU window
    // span so that binning is equivalent in both domains.
    double bin_width_hu = 25.0;
    double hu_window_lo = -1200.0;
    double hu_window_hi = 600.0;

    double bin_width_for(IntensityUnit unit) const {
        if (unit == IntensityUnit::Normalized) return bin_width_hu / (hu_window_hi - hu_window_lo);
        return bin_width_hu;
    }
};

// Family extractors. Values align index-for-index with the corresponding
// name list.
std::vector<double> first_order_features(const VolumeGrid& v, const MaskGrid& m, const DiscretizedVolume& d);
std::vector<double> shape_features(const MaskGrid& m);
std::vector<double> glcm_features(const DiscretizedVolume& d);
std::vector<double> glszm_features(const DiscretizedVolume& d);

// Full 72-feature extraction in canonical order.
FeatureVector extract_features(const VolumeGrid& v, const MaskGrid& m, const ExtractionConfig& config,
                               const std::string& scan_id);

// Feature table CSV: header `scan_id,patient_id,<canonical names>`, doubles
// serialized with 17 significant digits.
struct FeatureTable {
    std::vector<std::string> scan_ids;
    std::vector<std::string> patient_ids;
    Eigen::MatrixXd values;  // one row per scan, columns in canonical order

    Eigen::Index rows() const { return values.rows(); }
};

void write_feature_table(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_table(const std::filesystem::path& path);

}  // namespace radmort
