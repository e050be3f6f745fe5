#include "krdoa/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace krdoa {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (size_t c = 0; c < header.size(); ++c) {
        if (c) out << ',';
        out << header[c];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::runtime_error("write_csv: row width does not match header");
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << format_double(row[c]);
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);

    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string field;
    while (std::getline(hs, field, ',')) table.header.push_back(field);
    if (table.header.empty()) throw std::runtime_error(path + ": missing header");

    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, field, ',')) {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(field, &used);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": non-numeric field '" + field + "' on line " +
                                         std::to_string(line_no));
            }
            if (used != field.size())
                throw std::runtime_error(path + ": trailing characters in field '" + field +
                                         "' on line " + std::to_string(line_no));
            row.push_back(v);
        }
        if (row.size() != table.header.size())
            throw std::runtime_error(path + ": line " + std::to_string(line_no) + " has " +
                                     std::to_string(row.size()) + " fields, header has " +
                                     std::to_string(table.header.size()));
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw std::runtime_error(path + ": no data rows");
    return table;
}

}  // namespace krdoa
