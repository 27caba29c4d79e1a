#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "hypolib/epispline.hpp"
#include "hypolib/estimation.hpp"
#include "hypolib/grid.hpp"
#include "hypolib/piecewise.hpp"

namespace hypolib {

inline constexpr const char* kSchema = "hypolib-v1";

// Shortest text that round-trips a double; "-inf"/"inf"/"nan" for
// non-finite values.
std::string format_real(double v);

// CSV with header x1,...,xn,value. The grid is inferred from the points:
// per-axis spacing is the smallest gap between distinct coordinates, the
// box spans the extreme coordinates, and nodes absent from the file are
// masked out. Errors carry "<source>:<line>" diagnostics.
GridFn read_gridfn_csv(std::istream& in, const std::string& source = "<input>");
GridFn read_gridfn_csv_file(const std::string& path);
// Reads values for an already known domain; every member must appear once.
GridFn read_gridfn_csv(std::istream& in, DomainPtr domain, const std::string& source = "<input>");

void write_gridfn_csv(std::ostream& out, const GridFn& f);
void write_gridfn_csv_file(const std::string& path, const GridFn& f);

nlohmann::json to_json(const PaDiff& f);
nlohmann::json to_json(const EpiSpline0& s);
PaDiff padiff_from_json(const nlohmann::json& j);
EpiSpline0 epispline_from_json(const nlohmann::json& j);

// Parses a JSON document, turning syntax errors into ValidationError.
nlohmann::json read_json_file(const std::string& path);
// A path to a JSON file, or the document itself when it starts with '{' or '['.
nlohmann::json read_json_arg(const std::string& path_or_json);

// {"dim", "lower", "upper", "spacing"}; the last three are numbers or
// per-axis arrays.
DomainPtr grid_from_json(const nlohmann::json& j, const std::string& source = "<input>");

// {"grid", "lower", "upper", "kappa", "unitIntegral", "anchor"}; bounds are
// numbers, per-node arrays or "inf"/"-inf". The class owns its grid unless
// one is supplied.
FunctionClass class_from_json(const nlohmann::json& j, const std::string& source = "<input>",
                              DomainPtr domain = nullptr);

// {"grid", "weights" (array or "uniform"), "f0" (number or array, regression
// only), "noise": {"type": "none"|"gaussian"|"discrete", "sigma", "values",
// "probs"}}.
Truth truth_from_json(const nlohmann::json& j, const std::string& source = "<input>", DomainPtr domain = nullptr);

// CSV with header x1,...,xn or x1,...,xn,y; points are snapped to d.
Sample read_sample_csv(std::istream& in, const GridDomain& d, const std::string& source = "<input>");
Sample read_sample_csv_file(const std::string& path, const GridDomain& d);

}  // namespace hypolib
