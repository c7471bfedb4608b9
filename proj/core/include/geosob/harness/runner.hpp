#pragma once

#include <memory>

#include "geosob/harness/config.hpp"
#include "geosob/harness/report.hpp"
#include "geosob/models/model.hpp"
#include "geosob/potential/solution.hpp"
#include "geosob/submanifold/patch.hpp"

namespace geosob::harness {

/// Central tolerance table; every report row echoes the gate it was held to.
struct TolerancePolicy {
  double radial_gate = 1e-6;            // ratio gate, radial/analytic paths
  double mesh_gate(double h) const { return std::max(1e-4, 5.0 * h); }
  double mesh_tol(double h) const { return std::max(1e-8, 5.0 * h); }
  double near_equality = 1e-3;          // diagnostics trigger
  double rigidity_factor = 10.0;        // residuals <= factor * path tolerance
  double laplacian_margin_radial = -1e-8;
  double mc_sigmas = 3.0;
  double minimal_H = 1e-8;
};

models::WarpedModel model_from_config(const CaseConfig& c);
potential::RadialDensity density_from_config(const CaseConfig& c);
submanifold::ImmersedPatch patch_from_config(const CaseConfig& c);

/// Runs one configured case through normalize -> solve -> checks ->
/// inequality sides. Module failures become fail/inconclusive rows.
std::vector<InequalityReport> run_case(const CaseConfig& c);

/// Parallel batch over cases; the row order follows the case order and the
/// numeric content is independent of the thread count.
std::vector<InequalityReport> run_batch(const ExperimentConfig& cfg,
                                        int threads = 1);

std::vector<TransportRow> run_transport(const CaseConfig& c);

struct ConvergenceRow {
  double h = 0.0;
  double err_u = 0.0;
  double err_grad = 0.0;
  double order_u = 0.0;     // vs previous level, 0 on the first
  double order_grad = 0.0;
  double ratio_dev = 0.0;   // |ratio_mesh - ratio_radial|
};

std::vector<ConvergenceRow> convergence_study(const CaseConfig& c, int levels);
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace geosob::harness
