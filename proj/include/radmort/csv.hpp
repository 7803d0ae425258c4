#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace radmort {

// Minimal CSV support for the project's own table formats. Fields never
// contain commas, quotes, or newlines, so no quoting layer is needed.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // throws ValidationError if absent
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Shortest-exact decimal formatting (17 significant digits suffice for a
// round trip; trailing zeros trimmed by %g).
std::string format_double(double v);
double parse_double(const std::string& s);
std::int64_t parse_int(const std::string& s);

}  // namespace radmort
