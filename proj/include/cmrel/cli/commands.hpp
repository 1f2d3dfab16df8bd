#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "cmrel/census/census.hpp"
#include "cmrel/cli/format.hpp"

namespace cmrel::cli {

enum ExitCode { kOk = 0, kInvalidInput = 2, kIndeterminate = 3, kInternalError = 4 };

struct RunConfig {
  Prec prec = 256;
  std::string cache_dir;  // empty: no disk cache
  Format format = Format::Json;
  ScanConfig scan;        // n, bounds, samples, depth
  int hecke = 1;          // degree M of the Hecke correspondence
  long box = 10;          // coefficient box for cmd_gamma
  void validate() const;
};

struct CommandResult {
  int code = kOk;
  Report report;
  std::string error;
};

/// Semicolon-separated "(x,y)" with rational entries, or "O".
std::vector<Point> parse_points(const std::string& s);
/// "a,b,c" for the CM point of the form (a, b, c), or "re,im" decimals.
std::variant<TauPoint, PrecComplex> parse_tau(const std::string& s, Prec prec);
/// Semicolon-separated "re,im" decimals.
std::vector<PrecComplex> parse_complex_list(const std::string& s, Prec prec);

CommandResult cmd_classpoly(long disc, const RunConfig& cfg);
CommandResult cmd_modpoly(long N, const RunConfig& cfg);
CommandResult cmd_heegner(const std::string& curve, long disc, const RunConfig& cfg);
CommandResult cmd_param_eval(const std::string& curve, const std::string& tau, const RunConfig& cfg);
CommandResult cmd_relations(const std::string& curve, const std::string& points, const RunConfig& cfg);
CommandResult cmd_scan(const std::string& curve, const RunConfig& cfg);
CommandResult cmd_census_u(const std::string& curve, const std::string& U, const RunConfig& cfg);
CommandResult cmd_gamma(const std::string& curve, const std::string& generators, const RunConfig& cfg);

/// Report serialization for census results, shared with the acceptance runner.
Report census_report(const CensusReport& r);

/// Parses the command line, runs one command, writes the report to out and
/// diagnostics to err; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cmrel::cli
