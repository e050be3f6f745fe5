#pragma once

#include <string>
#include <vector>

namespace krdoa {

/// Shortest round-trip decimal rendering used for all CSV numbers.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Parse a numeric CSV with a header line. Throws std::runtime_error on a
/// missing file, missing header, ragged rows, or non-numeric fields.
CsvTable read_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace krdoa
