#include "vref/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "vref/errors.hpp"

namespace vref {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void CsvTable::add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size())
        throw DomainError("CsvTable: row width does not match header");
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    rows_.push_back(std::move(cells));
}

void CsvTable::add_row_mixed(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
        throw DomainError("CsvTable: row width does not match header");
    rows_.push_back(cells);
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << str();
}

}  // namespace vref
