#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "geosob/models/model.hpp"

namespace geosob::potential {

/// 2x2 metric field on a planar chart, with optional analytic derivatives
/// (needed for Christoffel symbols / covariant Hessians).
struct ChartMetric {
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> G;
  // dG[c] = derivative of G with respect to coordinate c
  std::function<std::array<Eigen::Matrix2d, 2>(const Eigen::Vector2d&)> dG;
  bool flat = true;

  Eigen::Matrix2d at(const Eigen::Vector2d& x) const {
    return flat ? Eigen::Matrix2d::Identity() : G(x);
  }
  /// Gamma[c](a,b) = Christoffel symbol Gamma^c_{ab}.
  std::array<Eigen::Matrix2d, 2> christoffel(const Eigen::Vector2d& x) const;
};

ChartMetric euclidean_chart();

/// Metric of the warped model in its normal-coordinate chart about the pole.
ChartMetric warped_chart(const models::WarpedModel& model);

struct Mesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;       // CCW in the chart
  std::vector<std::array<int, 2>> boundary_edges;  // outward on the right

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  double chart_mesh_size() const;  // max chart edge length

  /// Minimum interior angle measured in the given metric (degrees).
  double min_metric_angle_deg(const ChartMetric& metric) const;

  /// Index of a triangle containing x (barycentric test with tolerance),
  /// or -1.
  int locate(const Eigen::Vector2d& x) const;
  Eigen::Vector3d barycentric(int tri, const Eigen::Vector2d& x) const;

  void build_locator();  // uniform-bin acceleration for locate()

 private:
  struct Locator {
    double x0, y0, cell;
    int nx, ny;
    std::vector<std::vector<int>> bins;
  };
  std::shared_ptr<Locator> locator_;
};

/// Concentric-ring triangulation of the disk of chart radius R; ring node
/// counts follow the metric circumference so triangles stay near-isotropic
/// in the metric.
Mesh disk_mesh(double R, double h, const ChartMetric& metric);

void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

}  // namespace geosob::potential
