#include "qrm/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qrm/errors.hpp"

namespace qrm {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void CsvTable::add_row(std::initializer_list<double> values) {
    rows.emplace_back(values);
}

std::string CsvTable::to_string() const {
    std::ostringstream out;
    if (!comment.empty()) {
        out << "# " << comment << "\n";
    }
    const bool labeled = !label_column.empty();
    if (labeled) {
        out << label_column;
        if (!columns.empty()) {
            out << ",";
        }
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) {
            out << ",";
        }
        out << columns[c];
    }
    out << "\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (labeled) {
            out << (r < labels.size() ? labels[r] : "");
            if (!rows[r].empty()) {
                out << ",";
            }
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c) {
                out << ",";
            }
            out << format_double(rows[r][c]);
        }
        out << "\n";
    }
    return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write CSV file '" + path.string() + "'");
    }
    out << to_string();
}

CsvFile CsvFile::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open CSV file '" + path.string() + "'");
    }
    CsvFile file;
    std::string line;
    bool header_done = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!header_done) {
            while (std::getline(ss, cell, ',')) {
                file.columns.push_back(cell);
            }
            header_done = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw Error("CSV '" + path.string() + "' line " + std::to_string(line_no) +
                            ": non-numeric cell '" + cell + "'");
            }
        }
        if (row.size() != file.columns.size()) {
            throw Error("CSV '" + path.string() + "' line " + std::to_string(line_no) +
                        ": expected " + std::to_string(file.columns.size()) + " cells, got " +
                        std::to_string(row.size()));
        }
        file.rows.push_back(std::move(row));
    }
    if (!header_done) {
        throw Error("CSV '" + path.string() + "' has no header row");
    }
    return file;
}

std::vector<double> CsvFile::column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] == name) {
            std::vector<double> out(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                out[r] = rows[r][c];
            }
            return out;
        }
    }
    throw Error("CSV has no column named '" + name + "'");
}

} // namespace qrm
