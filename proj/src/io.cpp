#include "hypolib/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hypolib/error.hpp"

namespace hypolib {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return std::nullopt;
  return v;
}

struct Row {
  std::vector<double> x;
  ExtReal value;
  std::size_t line = 0;
};

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line) + ": "; }

// Reads header and data rows; every row has the same arity.
std::vector<Row> read_rows(std::istream& in, const std::string& source, std::size_t& dim) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split_csv(t);
    if (!have_header) {
      if (cells.size() < 2) throw ValidationError(where(source, lineno) + "header needs x1,...,xn,value");
      dim = cells.size() - 1;
      for (std::size_t i = 0; i < dim; ++i) {
        if (cells[i] != "x" + std::to_string(i + 1)) {
          throw ValidationError(where(source, lineno) + "header column " + std::to_string(i + 1) + " must be 'x" +
                                std::to_string(i + 1) + "', got '" + cells[i] + "'");
        }
      }
      if (cells[dim] != "value") throw ValidationError(where(source, lineno) + "last header column must be 'value'");
      have_header = true;
      continue;
    }
    if (cells.size() != dim + 1) {
      throw ValidationError(where(source, lineno) + "expected " + std::to_string(dim + 1) + " fields, got " +
                            std::to_string(cells.size()));
    }
    Row r;
    r.line = lineno;
    r.x.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const auto v = parse_real(cells[i]);
      if (!v || !std::isfinite(*v)) {
        throw ValidationError(where(source, lineno) + "field x" + std::to_string(i + 1) + ": bad coordinate '" +
                              cells[i] + "'");
      }
      r.x[i] = *v;
    }
    const auto v = parse_real(cells[dim]);
    if (!v || std::isnan(*v) || *v == kInf) {
      throw ValidationError(where(source, lineno) + "field value: expected a real or -inf, got '" + cells[dim] + "'");
    }
    r.value = ExtReal(*v);
    rows.push_back(std::move(r));
  }
  if (!have_header) throw ValidationError(source + ": missing header");
  if (rows.empty()) throw ValidationError(source + ": no data rows");
  return rows;
}

GridFn assemble(const std::vector<Row>& rows, DomainPtr domain, const std::string& source) {
  std::vector<ExtReal> values(domain->size());
  std::vector<bool> seen(domain->size(), false);
  for (const Row& r : rows) {
    const auto m = domain->find(r.x);
    if (!m) throw ValidationError(where(source, r.line) + "point is not a node of the grid");
    if (seen[*m]) throw ValidationError(where(source, r.line) + "duplicate point");
    seen[*m] = true;
    values[*m] = r.value;
  }
  for (std::size_t m = 0; m < seen.size(); ++m) {
    if (!seen[m]) {
      std::ostringstream os;
      os << source << ": missing value for node (";
      const auto p = domain->point(m);
      for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
      os << ")";
      throw ValidationError(os.str());
    }
  }
  try {
    return GridFn(std::move(domain), std::move(values));
  } catch (const EmptyHypographError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

GridFn read_gridfn_csv(std::istream& in, const std::string& source) {
  std::size_t dim = 0;
  const auto rows = read_rows(in, source, dim);
  std::vector<AxisSpec> axes(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> c;
    c.reserve(rows.size());
    for (const Row& r : rows) c.push_back(r.x[i]);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end(), [](double a, double b) { return std::abs(a - b) <= kGeomTol; }), c.end());
    double h = kInf;
    for (std::size_t k = 1; k < c.size(); ++k) h = std::min(h, c[k] - c[k - 1]);
    if (!std::isfinite(h)) h = 1.0;
    axes[i] = AxisSpec{std::min(c.front(), 0.0), std::max(c.back(), 0.0), h};
  }
  DomainPtr full;
  try {
    full = std::make_shared<const GridDomain>(axes);
  } catch (const DomainError& e) {
    throw ValidationError(source + ": cannot infer a grid containing the origin: " + e.what());
  }
  std::vector<bool> mask(full->node_count(), false);
  std::size_t present = 0;
  for (const Row& r : rows) {
    const auto m = full->find(r.x);
    if (!m) throw ValidationError(where(source, r.line) + "point is not on the inferred uniform grid");
    if (mask[*m]) throw ValidationError(where(source, r.line) + "duplicate point");
    mask[*m] = true;
    ++present;
  }
  if (present == full->node_count()) return assemble(rows, full, source);
  DomainPtr masked;
  try {
    masked = std::make_shared<const GridDomain>(axes, mask);
  } catch (const DomainError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return assemble(rows, masked, source);
}

GridFn read_gridfn_csv(std::istream& in, DomainPtr domain, const std::string& source) {
  std::size_t dim = 0;
  const auto rows = read_rows(in, source, dim);
  if (dim != domain->dim()) throw ValidationError(source + ": dimension does not match the domain");
  return assemble(rows, std::move(domain), source);
}

GridFn read_gridfn_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return read_gridfn_csv(in, path);
}

void write_gridfn_csv(std::ostream& out, const GridFn& f) {
  const GridDomain& d = f.domain();
  for (std::size_t i = 0; i < d.dim(); ++i) out << 'x' << (i + 1) << ',';
  out << "value\n";
  for (std::size_t m = 0; m < d.size(); ++m) {
    for (double xi : d.point(m)) out << format_real(xi) << ',';
    out << format_real(f[m].value()) << '\n';
  }
}

void write_gridfn_csv_file(const std::string& path, const GridFn& f) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  write_gridfn_csv(out, f);
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json pieces_json(const MaxAffine& m) {
  auto arr = nlohmann::json::array();
  for (const auto& p : m.pieces()) arr.push_back({{"slope", p.slope}, {"offset", p.offset}});
  return arr;
}

void check_header(const nlohmann::json& j, const std::string& type) {
  if (!j.is_object()) throw ValidationError(type + ": expected a JSON object");
  if (!j.contains("schema") || j["schema"] != kSchema) {
    throw ValidationError(type + ": field 'schema' must be \"" + std::string(kSchema) + "\"");
  }
  if (!j.contains("type") || j["type"] != type) throw ValidationError(type + ": field 'type' must be \"" + type + "\"");
}

template <class T>
T field(const nlohmann::json& j, const std::string& name, const std::string& ctx) {
  if (!j.contains(name)) throw ValidationError(ctx + ": missing field '" + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(ctx + ": field '" + name + "': " + e.what());
  }
}

MaxAffine pieces_from_json(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_array()) throw ValidationError(ctx + ": expected an array of pieces");
  std::vector<AffinePiece> pieces;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string c = ctx + "[" + std::to_string(k) + "]";
    pieces.push_back(AffinePiece{field<std::vector<double>>(j[k], "slope", c), field<double>(j[k], "offset", c)});
  }
  try {
    return MaxAffine(std::move(pieces));
  } catch (const DomainError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
}

}  // namespace

nlohmann::json to_json(const PaDiff& f) {
  return {{"schema", kSchema},
          {"type", "PaDiff"},
          {"radius", f.radius},
          {"plus", pieces_json(f.plus)},
          {"minus", pieces_json(f.minus)}};
}

nlohmann::json to_json(const EpiSpline0& s) {
  const auto& p = s.partition();
  return {{"schema", kSchema},
          {"type", "EpiSpline0"},
          {"partition", {{"dim", p.dim()}, {"halfWidth", p.half_width()}, {"cellsPerAxis", p.cells_per_axis()}}},
          {"cellValues", std::vector<double>(s.cell_values().begin(), s.cell_values().end())}};
}

PaDiff padiff_from_json(const nlohmann::json& j) {
  check_header(j, "PaDiff");
  if (!j.contains("plus") || !j.contains("minus")) throw ValidationError("PaDiff: missing field 'plus' or 'minus'");
  PaDiff f{pieces_from_json(j["plus"], "PaDiff.plus"), pieces_from_json(j["minus"], "PaDiff.minus"),
           field<double>(j, "radius", "PaDiff")};
  try {
    validate(f);
  } catch (const DomainError& e) {
    throw ValidationError(std::string("PaDiff: ") + e.what());
  }
  return f;
}

EpiSpline0 epispline_from_json(const nlohmann::json& j) {
  check_header(j, "EpiSpline0");
  if (!j.contains("partition")) throw ValidationError("EpiSpline0: missing field 'partition'");
  const auto& p = j["partition"];
  try {
    return EpiSpline0(BoxPartition(field<std::size_t>(p, "dim", "EpiSpline0.partition"),
                                   field<double>(p, "halfWidth", "EpiSpline0.partition"),
                                   field<std::size_t>(p, "cellsPerAxis", "EpiSpline0.partition")),
                      field<std::vector<double>>(j, "cellValues", "EpiSpline0"));
  } catch (const DomainError& e) {
    throw ValidationError(std::string("EpiSpline0: ") + e.what());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace hypolib
