#include "geosob/harness/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "geosob/errors.hpp"

namespace geosob::harness {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<InequalityReport>& rows) {
  if (rows.empty()) throw Error("emit_report: empty row list");
  std::ostringstream out;
  out << "case_id,theorem,n,m,theta,lhs,rhs,ratio,status,h,ode_tol,"
         "mc_stderr,seed\n";
  for (const auto& r : rows) {
    out << r.case_id << ',' << r.theorem << ',' << r.n << ',' << r.m << ','
        << fmt(r.theta) << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ','
        << fmt(r.ratio) << ',' << r.status << ',' << fmt(r.h) << ','
        << fmt(r.ode_tol) << ',' << fmt(r.mc_stderr) << ',' << r.seed << '\n';
  }
  return out.str();
}

std::string to_json(const std::vector<InequalityReport>& rows) {
  if (rows.empty()) throw Error("emit_report: empty row list");
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["case_id"] = r.case_id;
    j["theorem"] = r.theorem;
    j["n"] = r.n;
    j["m"] = r.m;
    j["theta"] = r.theta;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["ratio"] = r.ratio;
    j["status"] = r.status;
    j["h"] = r.h;
    j["ode_tol"] = r.ode_tol;
    j["mc_stderr"] = r.mc_stderr;
    j["seed"] = r.seed;
    if (!r.note.empty()) j["note"] = r.note;
    if (r.hessian_residual >= 0.0) {
      j["diagnostics"]["hessian_identity_residual"] = r.hessian_residual;
      j["diagnostics"]["grad_f_max"] = r.grad_f_residual;
      j["diagnostics"]["ii_norm"] = r.ii_residual;
    }
    j["tolerance"] = r.tolerance;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::string to_csv(const std::vector<TransportRow>& rows) {
  if (rows.empty()) throw Error("emit_report: empty row list");
  std::ostringstream out;
  out << "r,sigma,lhs,lhs_stderr,rhs,slack,verified_fraction,seed\n";
  for (const auto& r : rows) {
    out << fmt(r.r) << ',' << fmt(r.sigma) << ',' << fmt(r.lhs) << ','
        << fmt(r.lhs_stderr) << ',' << fmt(r.rhs) << ',' << fmt(r.slack) << ','
        << fmt(r.verified_fraction) << ',' << r.seed << '\n';
  }
  return out.str();
}

std::string to_json(const std::vector<TransportRow>& rows) {
  if (rows.empty()) throw Error("emit_report: empty row list");
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["r"] = r.r;
    j["sigma"] = r.sigma;
    j["lhs"] = r.lhs;
    j["lhs_stderr"] = r.lhs_stderr;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["verified_fraction"] = r.verified_fraction;
    j["seed"] = r.seed;
    j["status"] = r.status;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::vector<InequalityReport> inequality_rows_from_json(const std::string& text) {
  const nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<InequalityReport> rows;
  for (const auto& j : arr) {
    InequalityReport r;
    r.case_id = j.at("case_id").get<std::string>();
    r.theorem = j.at("theorem").get<std::string>();
    r.n = j.at("n").get<int>();
    r.m = j.at("m").get<int>();
    r.theta = j.at("theta").get<double>();
    r.lhs = j.at("lhs").get<double>();
    r.rhs = j.at("rhs").get<double>();
    r.ratio = j.at("ratio").get<double>();
    r.status = j.at("status").get<std::string>();
    r.h = j.at("h").get<double>();
    r.ode_tol = j.at("ode_tol").get<double>();
    r.mc_stderr = j.at("mc_stderr").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<InequalityReport> inequality_rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<InequalityReport> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    InequalityReport r;
    std::getline(ls, r.case_id, ',');
    std::getline(ls, r.theorem, ',');
    std::getline(ls, tok, ',');
    r.n = std::stoi(tok);
    std::getline(ls, tok, ',');
    r.m = std::stoi(tok);
    std::getline(ls, tok, ',');
    r.theta = std::stod(tok);
    std::getline(ls, tok, ',');
    r.lhs = std::stod(tok);
    std::getline(ls, tok, ',');
    r.rhs = std::stod(tok);
    std::getline(ls, tok, ',');
    r.ratio = std::stod(tok);
    std::getline(ls, r.status, ',');
    std::getline(ls, tok, ',');
    r.h = std::stod(tok);
    std::getline(ls, tok, ',');
    r.ode_tol = std::stod(tok);
    std::getline(ls, tok, ',');
    r.mc_stderr = std::stod(tok);
    std::getline(ls, tok, ',');
    r.seed = std::stoull(tok);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

std::string summary_lines(const std::vector<InequalityReport>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) {
    out << '[' << (r.status == "pass" ? "PASS" : r.status == "fail" ? "FAIL" : "INCONCLUSIVE")
        << "] " << r.case_id << " (" << r.theorem << "): ratio = " << fmt(r.ratio);
    if (!r.note.empty()) out << "  -- " << r.note;
    out << '\n';
  }
  return out.str();
}

}  // namespace geosob::harness
