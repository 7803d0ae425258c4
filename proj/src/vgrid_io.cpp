#include "radmort/vgrid_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "json.hpp"

#include "radmort/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "raw payloads are little-endian; big-endian hosts are not supported");

namespace radmort {

namespace {

using nlohmann::json;

struct Header {
    std::array<int, 3> dims;
    std::array<double, 3> spacing;
    VgridDtype dtype;
    IntensityUnit unit;
};

VgridDtype dtype_from_string(const std::string& s) {
    if (s == "i16") return VgridDtype::I16;
    if (s == "f32") return VgridDtype::F32;
    if (s == "u8") return VgridDtype::U8;
    throw ValidationError("unknown dtype '" + s + "' in vgrid header");
}

std::string dtype_to_string(VgridDtype d) {
    switch (d) {
        case VgridDtype::I16: return "i16";
        case VgridDtype::F32: return "f32";
        case VgridDtype::U8: return "u8";
    }
    return "f32";
}

std::size_t dtype_size(VgridDtype d) {
    switch (d) {
        case VgridDtype::I16: return 2;
        case VgridDtype::F32: return 4;
        case VgridDtype::U8: return 1;
    }
    return 4;
}

std::filesystem::path raw_path_for(const std::filesystem::path& header_path) {
    auto p = header_path;
    p.replace_extension(".raw");
    return p;
}

Header read_header(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeFailure("cannot open volume header " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed vgrid header " + path.string() + ": " + e.what());
    }
    Header h{};
    try {
        auto dims = j.at("dims");
        auto spacing = j.at("spacing_mm");
        if (dims.size() != 3 || spacing.size() != 3)
            throw ValidationError("vgrid header " + path.string() + ": dims and spacing_mm must have 3 entries");
        for (int i = 0; i < 3; ++i) {
            h.dims[i] = dims[i].get<int>();
            h.spacing[i] = spacing[i].get<double>();
        }
        h.dtype = dtype_from_string(j.at("dtype").get<std::string>());
        h.unit = intensity_unit_from_string(j.at("unit").get<std::string>());
    } catch (const json::exception& e) {
        throw ValidationError("malformed vgrid header " + path.string() + ": " + e.what());
    }
    for (int i = 0; i < 3; ++i) {
        if (h.dims[i] <= 0) throw ValidationError("vgrid header " + path.string() + ": non-positive dims");
        if (!(h.spacing[i] > 0.0) || !std::isfinite(h.spacing[i]))
            throw ValidationError("vgrid header " + path.string() + ": spacing must be positive and finite");
    }
    return h;
}

std::vector<char> read_payload(const std::filesystem::path& header_path, std::size_t expected_bytes) {
    const auto raw = raw_path_for(header_path);
    std::ifstream in(raw, std::ios::binary);
    if (!in) throw RuntimeFailure("cannot open raw payload " + raw.string());
    in.seekg(0, std::ios::end);
    const auto actual = static_cast<std::size_t>(in.tellg());
    if (actual != expected_bytes)
        throw ValidationError("payload size mismatch for " + raw.string() + ": header implies " +
                              std::to_string(expected_bytes) + " bytes, file has " + std::to_string(actual));
    in.seekg(0, std::ios::beg);
    std::vector<char> buf(expected_bytes);
    in.read(buf.data(), static_cast<std::streamsize>(expected_bytes));
    if (!in) throw RuntimeFailure("short read from " + raw.string());
    return buf;
}

void write_header(const std::filesystem::path& path, const Header& h) {
    json j;
    j["dims"] = h.dims;
    j["spacing_mm"] = h.spacing;
    j["dtype"] = dtype_to_string(h.dtype);
    j["unit"] = to_string(h.unit);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write volume header " + path.string());
    out << j.dump(2) << '\n';
}

void write_payload(const std::filesystem::path& header_path, const char* data, std::size_t bytes) {
    const auto raw = raw_path_for(header_path);
    std::ofstream out(raw, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write raw payload " + raw.string());
    out.write(data, static_cast<std::streamsize>(bytes));
    if (!out) throw RuntimeFailure("write failed for " + raw.string());
}

}  // namespace

VolumeGrid load_volume(const std::filesystem::path& header_path) {
    const Header h = read_header(header_path);
    if (h.dtype == VgridDtype::U8)
        throw ValidationError(header_path.string() + ": u8 payload is a mask, not a volume");
    VolumeGrid v(h.dims, h.spacing, h.unit);
    const auto n = static_cast<std::size_t>(v.size());
    const auto buf = read_payload(header_path, n * dtype_size(h.dtype));
    if (h.dtype == VgridDtype::I16) {
        const auto* p = reinterpret_cast<const std::int16_t*>(buf.data());
        for (std::size_t i = 0; i < n; ++i) v.voxels[static_cast<Eigen::Index>(i)] = static_cast<float>(p[i]);
    } else {
        const auto* p = reinterpret_cast<const float*>(buf.data());
        for (std::size_t i = 0; i < n; ++i) v.voxels[static_cast<Eigen::Index>(i)] = p[i];
    }
    validate(v, "load_volume(" + header_path.string() + ")");
    return v;
}

MaskGrid load_mask(const std::filesystem::path& header_path) {
    const Header h = read_header(header_path);
    if (h.dtype != VgridDtype::U8)
        throw ValidationError(header_path.string() + ": mask payload must be u8");
    MaskGrid m(h.dims, h.spacing);
    const auto n = static_cast<std::size_t>(m.size());
    const auto buf = read_payload(header_path, n);
    const auto* p = reinterpret_cast<const std::uint8_t*>(buf.data());
    for (std::size_t i = 0; i < n; ++i) m.voxels[static_cast<Eigen::Index>(i)] = p[i];
    validate(m, "load_mask(" + header_path.string() + ")");
    return m;
}

void save_volume(const std::filesystem::path& header_path, const VolumeGrid& v, VgridDtype dtype) {
    validate(v, "save_volume(" + header_path.string() + ")");
    if (dtype == VgridDtype::U8) throw ValidationError("volumes cannot be saved as u8");
    write_header(header_path, Header{v.dims, v.spacing_mm, dtype, v.unit});
    const auto n = static_cast<std::size_t>(v.size());
    if (dtype == VgridDtype::I16) {
        std::vector<std::int16_t> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const float x = std::nearbyint(v.voxels[static_cast<Eigen::Index>(i)]);
            const float clamped = std::min(32767.0f, std::max(-32768.0f, x));
            out[i] = static_cast<std::int16_t>(clamped);
        }
        write_payload(header_path, reinterpret_cast<const char*>(out.data()), n * 2);
    } else {
        write_payload(header_path, reinterpret_cast<const char*>(v.voxels.data()), n * 4);
    }
}

void save_mask(const std::filesystem::path& header_path, const MaskGrid& m) {
    validate(m, "save_mask(" + header_path.string() + ")");
    write_header(header_path, Header{m.dims, m.spacing_mm, VgridDtype::U8, IntensityUnit::Arbitrary});
    write_payload(header_path, reinterpret_cast<const char*>(m.voxels.data()), static_cast<std::size_t>(m.size()));
}

}  // namespace radmort
