#pragma once

#include <string>
#include <vector>

#include "cmrel/elliptic/analytic.hpp"
#include "cmrel/numerics/ball.hpp"
#include "cmrel/numerics/intmat.hpp"
#include "json.hpp"

namespace cmrel::cli {

enum class Format { Json, Csv };

Format parse_format(const std::string& s);

/// Output of a command: the JSON report and a flat table for CSV.
struct Report {
  nlohmann::json body = nlohmann::json::object();
  nlohmann::json provenance = nlohmann::json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// JSON: {"command", "provenance", "result"} with sorted keys. CSV: the
/// provenance as "# key=value" lines, the column header, then the rows.
std::string render(const std::string& command, const Report& r, Format f);

/// Midpoint digits that the error radius leaves meaningful, at least one.
std::string format_real(const Real& mid, const Mag& err, Prec prec);
nlohmann::json ball_json(const PrecComplex& z);
nlohmann::json point_json(const Point& P);
nlohmann::json complex_point_json(const ComplexPoint& P);
nlohmann::json matrix_json(const IntMatrix& m);
std::string csv_escape(const std::string& s);

}  // namespace cmrel::cli
