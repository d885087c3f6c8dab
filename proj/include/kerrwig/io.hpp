#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "kerrwig/grid.hpp"
#include "kerrwig/kerr.hpp"

namespace kerrwig::io {

using Json = nlohmann::json;

inline constexpr const char* kCodeVersion = "0.1.0";

/// 17 significant digits, '.' decimal separator.
std::string format_double(double v);

/// FNV-1a 64-bit hash of the compact JSON dump, as 16 hex digits.
std::string config_hash(const Json& config);

Json to_json(const PhaseGrid& grid);
Json to_json(const KerrParams& params);

struct NamedColumn {
  std::string name;
  const std::vector<double>* values;  // one entry per grid node
};

/// Fields on a grid, optionally keeping only every stride-th node per axis.
/// Layout: "# <metadata json>" line, header "x,p,<names...>", then one row per
/// kept node in x-major order. LF line endings.
void write_fields_csv(std::ostream& out, const PhaseGrid& grid, const std::vector<NamedColumn>& columns,
                      const Json& metadata, int stride = 1);

/// Same content as one JSON header line followed by the raw payload: each
/// column as a row-major (x-major) block of little-endian float64.
void write_fields_binary(std::ostream& out, const PhaseGrid& grid, const std::vector<NamedColumn>& columns,
                         const Json& metadata, int stride = 1);

/// Plain table: "# <metadata json>", header row, rows of equal-length columns.
void write_table_csv(std::ostream& out, const std::vector<std::string>& names,
                     const std::vector<std::vector<double>>& columns, const Json& metadata);

struct Table {
  Json metadata;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};

/// Reads files written by write_fields_csv or write_table_csv. Throws
/// std::runtime_error on malformed input.
Table read_csv(std::istream& in);
/// Reads files written by write_fields_binary; x and p columns are rebuilt
/// from the header so the result matches read_csv.
Table read_fields_binary(std::istream& in);

}  // namespace kerrwig::io
