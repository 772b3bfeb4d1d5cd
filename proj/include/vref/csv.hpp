#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace vref {

/// Shortest round-trip decimal form, locale-independent.
std::string format_double(double v);

/// Deterministic CSV assembly: fixed column order, comma separators, LF
/// line endings, values formatted with format_double.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(const std::vector<double>& values);
    void add_row_mixed(const std::vector<std::string>& cells);
    std::string str() const;
    void write(const std::filesystem::path& path) const;
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& columns() const { return columns_; }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace vref
