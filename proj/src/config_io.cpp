#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "hypolib/error.hpp"
#include "hypolib/io.hpp"

namespace hypolib {

using nlohmann::json;

namespace {

// Number, or one of the strings "inf", "+inf", "-inf".
double real_value(const json& v, const std::string& ctx) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ValidationError(ctx + ": expected a number or \"inf\"/\"-inf\"");
}

// Scalar broadcast to count entries, or an array of exactly count entries.
std::vector<double> real_list(const json& v, std::size_t count, const std::string& ctx) {
  if (!v.is_array()) return std::vector<double>(count, real_value(v, ctx));
  if (v.size() != count) {
    throw ValidationError(ctx + ": expected " + std::to_string(count) + " entries, got " + std::to_string(v.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(real_value(v[i], ctx + "[" + std::to_string(i) + "]"));
  return out;
}

const json& require(const json& j, const std::string& name, const std::string& ctx) {
  if (!j.is_object()) throw ValidationError(ctx + ": expected a JSON object");
  if (!j.contains(name)) throw ValidationError(ctx + ": missing field '" + name + "'");
  return j[name];
}

DomainPtr domain_for(const json& j, const std::string& source, DomainPtr domain) {
  if (j.contains("grid")) {
    DomainPtr own = grid_from_json(j["grid"], source + ": grid");
    if (domain && !(*domain == *own)) throw ValidationError(source + ": grid does not match the data grid");
    return own;
  }
  if (!domain) throw ValidationError(source + ": missing field 'grid'");
  return domain;
}

}  // namespace

json read_json_arg(const std::string& path_or_json) {
  const auto first = path_or_json.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (path_or_json[first] == '{' || path_or_json[first] == '[')) {
    try {
      return json::parse(path_or_json);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("inline JSON: ") + e.what());
    }
  }
  return read_json_file(path_or_json);
}

DomainPtr grid_from_json(const json& j, const std::string& source) {
  const json& dim_j = require(j, "dim", source);
  if (!dim_j.is_number_unsigned() || dim_j.get<std::size_t>() == 0) {
    throw ValidationError(source + ": field 'dim' must be a positive integer");
  }
  const auto n = dim_j.get<std::size_t>();
  const auto lo = real_list(require(j, "lower", source), n, source + ": field 'lower'");
  const auto hi = real_list(require(j, "upper", source), n, source + ": field 'upper'");
  const auto h = real_list(require(j, "spacing", source), n, source + ": field 'spacing'");
  std::vector<AxisSpec> axes;
  for (std::size_t i = 0; i < n; ++i) axes.push_back(AxisSpec{lo[i], hi[i], h[i]});
  try {
    return std::make_shared<const GridDomain>(std::move(axes));
  } catch (const Error& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

FunctionClass class_from_json(const json& j, const std::string& source, DomainPtr domain) {
  if (!j.is_object()) throw ValidationError(source + ": expected a JSON object");
  FunctionClass c;
  c.domain = domain_for(j, source, std::move(domain));
  const std::size_t n = c.domain->size();
  c.lower = j.contains("lower") ? real_list(j["lower"], n, source + ": field 'lower'") : std::vector<double>(n, -kInf);
  c.upper = j.contains("upper") ? real_list(j["upper"], n, source + ": field 'upper'") : std::vector<double>(n, kInf);
  if (j.contains("kappa") && !j["kappa"].is_null()) c.kappa = real_value(j["kappa"], source + ": field 'kappa'");
  if (j.contains("unitIntegral")) {
    if (!j["unitIntegral"].is_boolean()) throw ValidationError(source + ": field 'unitIntegral' must be a boolean");
    c.unit_integral = j["unitIntegral"].get<bool>();
  }
  if (j.contains("anchor") && !j["anchor"].is_null()) c.anchor = real_value(j["anchor"], source + ": field 'anchor'");
  try {
    c.validate();
  } catch (const InfeasibleError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return c;
}

Truth truth_from_json(const json& j, const std::string& source, DomainPtr domain) {
  if (!j.is_object()) throw ValidationError(source + ": expected a JSON object");
  Truth t;
  t.domain = domain_for(j, source, std::move(domain));
  const std::size_t n = t.domain->size();
  const json& w = require(j, "weights", source);
  if (w.is_string() && w.get<std::string>() == "uniform") {
    t.weights.assign(n, 1.0 / static_cast<double>(n));
  } else {
    t.weights = real_list(w, n, source + ": field 'weights'");
    double total = 0.0;
    for (double x : t.weights) total += x;
    if (!(total > 0.0)) throw ValidationError(source + ": field 'weights' must have positive total");
    for (double& x : t.weights) x /= total;
  }
  if (j.contains("f0")) t.f0 = real_list(j["f0"], n, source + ": field 'f0'");
  if (j.contains("noise")) {
    const json& nz = j["noise"];
    const std::string ctx = source + ": field 'noise'";
    const std::string type = require(nz, "type", ctx).is_string() ? nz["type"].get<std::string>() : "";
    if (type == "none") {
      t.noise = Truth::Noise::None;
    } else if (type == "gaussian") {
      t.noise = Truth::Noise::Gaussian;
      t.sigma = real_value(require(nz, "sigma", ctx), ctx + ".sigma");
    } else if (type == "discrete") {
      t.noise = Truth::Noise::Discrete;
      const json& vals = require(nz, "values", ctx);
      if (!vals.is_array()) throw ValidationError(ctx + ".values: expected an array");
      t.noise_values = real_list(vals, vals.size(), ctx + ".values");
      t.noise_probs = real_list(require(nz, "probs", ctx), vals.size(), ctx + ".probs");
    } else {
      throw ValidationError(ctx + ".type: expected \"none\", \"gaussian\" or \"discrete\"");
    }
  }
  try {
    t.validate();
  } catch (const Error& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return t;
}

Sample read_sample_csv(std::istream& in, const GridDomain& d, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  bool with_y = false;
  std::vector<std::vector<double>> points;
  std::vector<double> y;
  const std::size_t n = d.dim();
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    const std::string at = source + ":" + std::to_string(lineno) + ": ";
    if (!have_header) {
      if (cells.size() != n && cells.size() != n + 1) {
        throw ValidationError(at + "header must be x1,...,x" + std::to_string(n) + " optionally followed by y");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (cells[i] != "x" + std::to_string(i + 1)) {
          throw ValidationError(at + "header column " + std::to_string(i + 1) + " must be 'x" + std::to_string(i + 1) +
                                "'");
        }
      }
      with_y = cells.size() == n + 1;
      if (with_y && cells[n] != "y") throw ValidationError(at + "last header column must be 'y'");
      have_header = true;
      continue;
    }
    const std::size_t width = with_y ? n + 1 : n;
    if (cells.size() != width) {
      throw ValidationError(at + "expected " + std::to_string(width) + " fields, got " + std::to_string(cells.size()));
    }
    std::vector<double> vals;
    for (std::size_t i = 0; i < width; ++i) {
      char* end = nullptr;
      const double v = std::strtod(cells[i].c_str(), &end);
      if (cells[i].empty() || end != cells[i].c_str() + cells[i].size() || !std::isfinite(v)) {
        const std::string name = i < n ? "x" + std::to_string(i + 1) : "y";
        throw ValidationError(at + "field " + name + ": expected a finite real, got '" + cells[i] + "'");
      }
      vals.push_back(v);
    }
    if (with_y) {
      y.push_back(vals.back());
      vals.pop_back();
    }
    points.push_back(std::move(vals));
  }
  if (!have_header) throw ValidationError(source + ": missing header");
  if (points.empty()) throw ValidationError(source + ": no data rows");
  return Sample::from_points(d, points, std::move(y));
}

Sample read_sample_csv_file(const std::string& path, const GridDomain& d) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return read_sample_csv(in, d, path);
}

}  // namespace hypolib
