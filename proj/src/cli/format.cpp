#include "cmrel/cli/format.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmrel/error.hpp"

namespace cmrel::cli {

Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw InvalidInput("unknown format " + s);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

std::string scalar_text(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void flatten(const nlohmann::json& v, const std::string& prefix, std::vector<std::string>& out) {
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten(x, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  out.push_back("# " + prefix + "=" + scalar_text(v));
}

}  // namespace

std::string render(const std::string& command, const Report& r, Format f) {
  if (f == Format::Json) {
    nlohmann::json j;
    j["command"] = command;
    j["provenance"] = r.provenance;
    j["result"] = r.body;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  std::vector<std::string> lines{"# command=" + command};
  flatten(r.provenance, "provenance", lines);
  for (const auto& l : lines) os << l << "\n";
  for (size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << csv_escape(r.columns[i]);
  os << "\n";
  for (const auto& row : r.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string format_real(const Real& mid, const Mag& err, Prec prec) {
  const int full = std::max(1, static_cast<int>(std::floor(static_cast<double>(prec) * 0.30103)));
  if (mid.is_zero()) return "0";
  int digits = full;
  if (!err.is_zero()) {
    const long gap = mid.exponent() - err.exponent();
    digits = std::clamp(static_cast<int>(std::floor(static_cast<double>(gap) * 0.30103)) + 1, 1, full);
  }
  return mid.to_string(digits);
}

namespace {

std::string format_mag(const Mag& m) {
  if (m.is_zero()) return "0";
  char buf[64];
  mpfr_snprintf(buf, sizeof buf, "%.2RUe", m.get());
  return buf;
}

}  // namespace

nlohmann::json ball_json(const PrecComplex& z) {
  nlohmann::json j;
  j["re"] = format_real(z.re(), z.err(), z.prec());
  j["im"] = format_real(z.im(), z.err(), z.prec());
  j["err"] = format_mag(z.err());
  return j;
}

nlohmann::json point_json(const Point& P) {
  if (P.inf) return "O";
  return nlohmann::json::array({P.x.get_str(), P.y.get_str()});
}

nlohmann::json complex_point_json(const ComplexPoint& P) {
  if (P.inf) return "O";
  nlohmann::json j;
  j["x"] = ball_json(P.x);
  j["y"] = ball_json(P.y);
  return j;
}

nlohmann::json matrix_json(const IntMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (size_t k = 0; k < m.cols(); ++k) {
      const mpz_class& v = m.at(i, k);
      row.push_back(v.fits_slong_p() ? nlohmann::json(v.get_si()) : nlohmann::json(v.get_str()));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cmrel::cli
