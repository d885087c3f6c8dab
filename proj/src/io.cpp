#include "kerrwig/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace kerrwig::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const PhaseGrid& g) {
  return Json{{"x_min", g.x_min}, {"x_max", g.x_max}, {"p_min", g.p_min},
              {"p_max", g.p_max}, {"nx", g.nx},       {"np", g.np}};
}

Json to_json(const KerrParams& p) {
  return Json{{"mass", p.mass},
              {"spring", p.spring},
              {"hbar", p.hbar},
              {"lambda2", p.lambda2_p},
              {"lambda2_x", p.lambda2_x}};
}

namespace {

void check_columns(const PhaseGrid& grid, const std::vector<NamedColumn>& columns, int stride) {
  if (stride < 1) throw std::invalid_argument("write_fields: stride must be positive");
  for (const auto& c : columns)
    if (c.values == nullptr || c.values->size() != grid.size())
      throw std::invalid_argument("write_fields: column '" + c.name + "' does not match the grid");
}

int kept(int n, int stride) { return (n - 1) / stride + 1; }

void write_header_line(std::ostream& out, const Json& metadata) { out << "# " << metadata.dump() << '\n'; }

std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t swapped = 0;
    for (int k = 0; k < 8; ++k) swapped |= ((bits >> (8 * k)) & 0xffu) << (8 * (7 - k));
    return swapped;
  }
  return bits;
}

void write_le_double(std::ostream& out, double v) {
  const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
  char bytes[8];
  std::memcpy(bytes, &bits, 8);
  out.write(bytes, 8);
}

double read_le_double(std::istream& in) {
  char bytes[8];
  if (!in.read(bytes, 8)) throw std::runtime_error("read_fields_binary: truncated payload");
  std::uint64_t bits;
  std::memcpy(&bits, bytes, 8);
  return std::bit_cast<double>(to_little_endian(bits));
}

double parse_double(const std::string& cell) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  // subnormals report result_out_of_range but still parse exactly
  if ((ec != std::errc() && ec != std::errc::result_out_of_range) || ptr != end)
    throw std::runtime_error("read_csv: not a number: '" + cell + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream ss(line);
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

}  // namespace

void write_fields_csv(std::ostream& out, const PhaseGrid& grid, const std::vector<NamedColumn>& columns,
                      const Json& metadata, int stride) {
  check_columns(grid, columns, stride);
  write_header_line(out, metadata);
  out << "x,p";
  for (const auto& c : columns) out << ',' << c.name;
  out << '\n';
  for (int i = 0; i < grid.nx; i += stride)
    for (int j = 0; j < grid.np; j += stride) {
      out << format_double(grid.x(i)) << ',' << format_double(grid.p(j));
      for (const auto& c : columns) out << ',' << format_double((*c.values)[grid.index(i, j)]);
      out << '\n';
    }
}

void write_fields_binary(std::ostream& out, const PhaseGrid& grid, const std::vector<NamedColumn>& columns,
                         const Json& metadata, int stride) {
  check_columns(grid, columns, stride);
  const int nx = kept(grid.nx, stride), np = kept(grid.np, stride);
  Json header{{"metadata", metadata},
              {"dtype", "float64-le"},
              {"layout", "column blocks, x-major"},
              {"shape", {nx, np}},
              {"x", {grid.x_min, grid.hx() * stride}},
              {"p", {grid.p_min, grid.hp() * stride}},
              {"columns", Json::array()}};
  for (const auto& c : columns) header["columns"].push_back(c.name);
  out << header.dump() << '\n';
  for (const auto& c : columns)
    for (int i = 0; i < grid.nx; i += stride)
      for (int j = 0; j < grid.np; j += stride) write_le_double(out, (*c.values)[grid.index(i, j)]);
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& names,
                     const std::vector<std::vector<double>>& columns, const Json& metadata) {
  if (names.size() != columns.size()) throw std::invalid_argument("write_table_csv: names and columns differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw std::invalid_argument("write_table_csv: ragged columns");
  write_header_line(out, metadata);
  for (std::size_t k = 0; k < names.size(); ++k) out << (k ? "," : "") << names[k];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << format_double(columns[k][r]);
    out << '\n';
  }
}

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("read_csv: missing metadata line");
  t.metadata = Json::parse(line.substr(2));
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: missing header row");
  t.names = split(line, ',');
  t.columns.assign(t.names.size(), {});
  while (std::getline(in, line)) {
    const auto cells = split(line, ',');
    if (cells.size() != t.names.size()) throw std::runtime_error("read_csv: row width differs from header");
    for (std::size_t k = 0; k < cells.size(); ++k) t.columns[k].push_back(parse_double(cells[k]));
  }
  return t;
}

Table read_fields_binary(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_fields_binary: missing header");
  const Json header = Json::parse(line);
  if (header.at("dtype") != "float64-le") throw std::runtime_error("read_fields_binary: unsupported dtype");
  const int nx = header.at("shape")[0], np = header.at("shape")[1];
  const double x0 = header.at("x")[0], hx = header.at("x")[1];
  const double p0 = header.at("p")[0], hp = header.at("p")[1];
  Table t;
  t.metadata = header.at("metadata");
  t.names = {"x", "p"};
  t.columns.assign(2, {});
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < np; ++j) {
      t.columns[0].push_back(x0 + i * hx);
      t.columns[1].push_back(p0 + j * hp);
    }
  for (const auto& name : header.at("columns")) {
    t.names.push_back(name.get<std::string>());
    std::vector<double> values(static_cast<std::size_t>(nx) * np);
    for (double& v : values) v = read_le_double(in);
    t.columns.push_back(std::move(values));
  }
  return t;
}

}  // namespace kerrwig::io
