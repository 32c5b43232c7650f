#include "sasc/table.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sasc {

void SpectrumTable::add_column(std::string name, std::vector<double> values) {
    if (values.size() != omega.size()) {
        throw std::invalid_argument("SpectrumTable: column '" + name + "' has " + std::to_string(values.size()) +
                                    " rows, grid has " + std::to_string(omega.size()));
    }
    if (has_column(name)) throw std::invalid_argument("SpectrumTable: duplicate column '" + name + "'");
    names.push_back(std::move(name));
    columns.push_back(std::move(values));
}

bool SpectrumTable::has_column(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& SpectrumTable::column(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("SpectrumTable: no column '" + name + "'");
    return columns[static_cast<std::size_t>(it - names.begin())];
}

void SpectrumTable::validate() const {
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!std::isfinite(omega[i])) throw std::invalid_argument("SpectrumTable: non-finite grid value");
        if (i > 0 && !(omega[i] > omega[i - 1])) {
            throw std::invalid_argument("SpectrumTable: grid is not strictly increasing");
        }
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != omega.size()) {
            throw std::invalid_argument("SpectrumTable: column '" + names[c] + "' length mismatch");
        }
        for (double v : columns[c]) {
            if (!std::isfinite(v)) throw std::invalid_argument("SpectrumTable: non-finite value in '" + names[c] + "'");
        }
    }
}

void write_csv(std::ostream& os, const SpectrumTable& table, const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) os << "# " << line << '\n';
    os << table.axis;
    for (const auto& n : table.names) os << ',' << n;
    os << '\n';
    const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < table.rows(); ++i) {
        os << table.omega[i];
        for (const auto& col : table.columns) os << ',' << col[i];
        os << '\n';
    }
    os.precision(old_precision);
}

nlohmann::json to_json(const SpectrumTable& table) {
    nlohmann::json cols = nlohmann::json::object();
    for (std::size_t c = 0; c < table.names.size(); ++c) cols[table.names[c]] = table.columns[c];
    return {{"axis", table.axis}, {table.axis, table.omega}, {"columns", cols}};
}

void RowTable::add_row(std::vector<double> row) {
    if (row.size() != header.size()) {
        throw std::invalid_argument("RowTable: row has " + std::to_string(row.size()) + " values, header has " +
                                    std::to_string(header.size()));
    }
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& os, const RowTable& table, const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) os << "# " << line << '\n';
    for (std::size_t c = 0; c < table.header.size(); ++c) os << (c ? "," : "") << table.header[c];
    os << '\n';
    const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            os << row[c];
        }
        os << '\n';
    }
    os.precision(old_precision);
}

nlohmann::json to_json(const RowTable& table) { return {{"columns", table.header}, {"rows", table.rows}}; }

}  // namespace sasc
