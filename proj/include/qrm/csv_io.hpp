#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qrm {

// Column-oriented CSV with a '#' comment line carrying the resolved config,
// then a header row. Numeric formatting is fixed so identical inputs produce
// byte-identical files.
struct CsvTable {
    std::string comment;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    // Optional leading text column (used by long-format multi-series tables).
    std::string label_column;
    std::vector<std::string> labels;

    void add_row(std::initializer_list<double> values);
    std::string to_string() const;
    void write(const std::filesystem::path& path) const;
};

std::string format_double(double v);

// Minimal CSV reader for the `fit` subcommand: header row plus numeric rows;
// '#' comment lines are skipped.
struct CsvFile {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    static CsvFile read(const std::filesystem::path& path);
    std::vector<double> column(const std::string& name) const;
};

} // namespace qrm
