#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace geosob::harness {

struct InequalityReport {
  std::string case_id;
  std::string theorem;
  int n = 0;
  int m = 0;
  double theta = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::string status = "pass";  // pass | fail | inconclusive
  double h = 0.0;               // 0 on radial/analytic paths
  double ode_tol = 0.0;
  double mc_stderr = 0.0;
  std::uint64_t seed = 0;

  // carried in the JSON report and logs, not in the fixed CSV schema
  std::string note;              // violated invariant + margin on fail rows
  double hessian_residual = -1.0;
  double grad_f_residual = -1.0;
  double ii_residual = -1.0;
  double tolerance = 0.0;        // ratio gate used
};

struct TransportRow {
  double r = 0.0;
  double sigma = 0.0;
  double lhs = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double verified_fraction = 0.0;
  std::uint64_t seed = 0;
  std::string status = "pass";
};

/// Byte-deterministic emission: fixed CSV column order, sorted JSON keys,
/// floats printed with 17 significant digits.
std::string to_csv(const std::vector<InequalityReport>& rows);
std::string to_json(const std::vector<InequalityReport>& rows);
std::string to_csv(const std::vector<TransportRow>& rows);
std::string to_json(const std::vector<TransportRow>& rows);

std::vector<InequalityReport> inequality_rows_from_json(const std::string& text);
std::vector<InequalityReport> inequality_rows_from_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);

/// One pass/fail line per row, for terminal output.
std::string summary_lines(const std::vector<InequalityReport>& rows);

}  // namespace geosob::harness
