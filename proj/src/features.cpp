#include "radmort/features.hpp"

#include <cmath>

#include "radmort/csv.hpp"

namespace radmort {

namespace {

std::vector<std::string> prefixed(const char* prefix, std::initializer_list<const char*> names) {
    std::vector<std::string> out;
    out.reserve(names.size());
    for (const char* n : names) out.push_back(std::string(prefix) + n);
    return out;
}

}  // namespace

const std::vector<std::string>& shape_feature_names() {
    static const std::vector<std::string> names = prefixed("shape_", {
        "elongation",
        "flatness",
        "least_axis_length",
        "major_axis_length",
        "maximum_2d_diameter_axial",
        "maximum_2d_diameter_coronal",
        "maximum_2d_diameter_sagittal",
        "maximum_3d_diameter",
        "mesh_volume",
        "minor_axis_length",
        "sphericity",
        "surface_area",
        "surface_to_volume_ratio",
        "voxel_volume",
    });
    return names;
}

const std::vector<std::string>& first_order_feature_names() {
    static const std::vector<std::string> names = prefixed("firstorder_", {
        "energy",
        "entropy",
        "interquartile_range",
        "kurtosis",
        "maximum",
        "mean",
        "mean_absolute_deviation",
        "median",
        "minimum",
        "percentile_10",
        "percentile_90",
        "range",
        "robust_mean_absolute_deviation",
        "root_mean_squared",
        "skewness",
        "total_energy",
        "uniformity",
        "variance",
    });
    return names;
}

const std::vector<std::string>& glcm_feature_names() {
    static const std::vector<std::string> names = prefixed("glcm_", {
        "autocorrelation",
        "cluster_prominence",
        "cluster_shade",
        "cluster_tendency",
        "contrast",
        "correlation",
        "difference_average",
        "difference_entropy",
        "difference_variance",
        "informational_measure_correlation_1",
        "informational_measure_correlation_2",
        "inverse_difference",
        "inverse_difference_moment",
        "inverse_difference_moment_normalized",
        "inverse_difference_normalized",
        "inverse_variance",
        "joint_average",
        "joint_energy",
        "joint_entropy",
        "joint_maximum",
        "maximum_probability",
        "sum_average",
        "sum_entropy",
        "sum_of_squares",
    });
    return names;
}

const std::vector<std::string>& glszm_feature_names() {
    static const std::vector<std::string> names = prefixed("glszm_", {
        "gray_level_non_uniformity",
        "gray_level_non_uniformity_normalized",
        "gray_level_variance",
        "high_gray_level_zone_emphasis",
        "large_area_emphasis",
        "large_area_high_gray_level_emphasis",
        "large_area_low_gray_level_emphasis",
        "low_gray_level_zone_emphasis",
        "size_zone_non_uniformity",
        "size_zone_non_uniformity_normalized",
        "small_area_emphasis",
        "small_area_high_gray_level_emphasis",
        "small_area_low_gray_level_emphasis",
        "zone_entropy",
        "zone_percentage",
        "zone_variance",
    });
    return names;
}

const std::vector<std::string>& all_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto* family :
             {&shape_feature_names(), &first_order_feature_names(), &glcm_feature_names(), &glszm_feature_names()})
            out.insert(out.end(), family->begin(), family->end());
        return out;
    }();
    return names;
}

FeatureVector extract_features(const VolumeGrid& v, const MaskGrid& m, const ExtractionConfig& config,
                               const std::string& scan_id) {
    validate(v, "extract_features volume");
    validate(m, "extract_features mask");
    require_same_geometry(v, m, "extract_features");
    if (mask_voxel_count(m) == 0) throw ValidationError("extract_features: empty mask");

    const DiscretizedVolume d = discretize(v, m, config.bin_width_for(v.unit));

    const auto shape = shape_features(m);
    const auto first = first_order_features(v, m, d);
    const auto glcm = glcm_features(d);
    const auto glszm = glszm_features(d);

    FeatureVector fv;
    fv.scan_id = scan_id;
    fv.values.resize(static_cast<Eigen::Index>(all_feature_names().size()));
    Eigen::Index k = 0;
    for (const auto* family : {&shape, &first, &glcm, &glszm})
        for (double x : *family) fv.values[k++] = x;

    for (Eigen::Index i = 0; i < fv.values.size(); ++i)
        if (!std::isfinite(fv.values[i]))
            throw RuntimeFailure("extract_features: non-finite value for feature " +
                                 all_feature_names()[static_cast<std::size_t>(i)] + " on scan " + scan_id);
    return fv;
}

void write_feature_table(const std::filesystem::path& path, const FeatureTable& table) {
    CsvTable csv;
    csv.header = {"scan_id", "patient_id"};
    for (const auto& name : all_feature_names()) csv.header.push_back(name);
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        std::vector<std::string> row;
        row.reserve(csv.header.size());
        row.push_back(table.scan_ids[static_cast<std::size_t>(r)]);
        row.push_back(table.patient_ids[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < table.values.cols(); ++c)
            row.push_back(format_double(table.values(r, c)));
        csv.rows.push_back(std::move(row));
    }
    write_csv(path, csv);
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    const auto& names = all_feature_names();
    if (csv.header.size() != names.size() + 2)
        throw ValidationError(path.string() + ": expected " + std::to_string(names.size() + 2) +
                              " columns, found " + std::to_string(csv.header.size()));
    for (std::size_t i = 0; i < names.size(); ++i)
        if (csv.header[i + 2] != names[i])
            throw ValidationError(path.string() + ": column " + std::to_string(i + 2) + " is '" +
                                  csv.header[i + 2] + "', expected '" + names[i] + "'");
    FeatureTable table;
    table.values.resize(static_cast<Eigen::Index>(csv.rows.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        table.scan_ids.push_back(csv.rows[r][0]);
        table.patient_ids.push_back(csv.rows[r][1]);
        for (std::size_t c = 0; c < names.size(); ++c) {
            const double x = parse_double(csv.rows[r][c + 2]);
            if (!std::isfinite(x))
                throw ValidationError(path.string() + ": non-finite feature value in row " + std::to_string(r));
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = x;
        }
    }
    return table;
}

}  // namespace radmort
