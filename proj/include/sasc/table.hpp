// table.hpp: column-oriented frequency tables and their CSV/JSON forms.
#pragma once

#include <json.hpp>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace sasc {

struct SpectrumTable {
    std::string axis = "omega";
    std::vector<double> omega;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const noexcept { return omega.size(); }

    // Throws std::invalid_argument on a length mismatch or duplicate name.
    void add_column(std::string name, std::vector<double> values);
    bool has_column(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;

    // Strictly increasing grid and finite values, else std::invalid_argument.
    void validate() const;
};

// Each metadata line is written as "# <line>". Values use round-trip precision.
void write_csv(std::ostream& os, const SpectrumTable& table, const std::vector<std::string>& metadata = {});
nlohmann::json to_json(const SpectrumTable& table);

// Long-format table without a monotone axis (maps, phase grids).
struct RowTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
};

void write_csv(std::ostream& os, const RowTable& table, const std::vector<std::string>& metadata = {});
nlohmann::json to_json(const RowTable& table);

}  // namespace sasc
