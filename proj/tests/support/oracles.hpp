#pragma once

// Test-only oracles, independent of the library integration paths.

#include <Eigen/Core>

#include <cmath>
#include <numeric>
#include <queue>
#include <vector>

#include "geosob/models/model.hpp"

namespace oracles {

/// Fixed-step classical RK4 on the reduced slice geodesic system
/// (rho, v_rho, psi) with conserved angular momentum L.
inline Eigen::Vector3d rk4_slice_geodesic(const geosob::models::WarpedModel& m,
                                          double rho0, double vrho0, double L,
                                          double t, int steps) {
  Eigen::Vector3d y(rho0, vrho0, 0.0);
  const auto f = [&](const Eigen::Vector3d& s) {
    const double phi = m.profile.phi(s[0]);
    const double dphi = m.profile.dphi(s[0]);
    return Eigen::Vector3d(s[1],
                           L == 0.0 ? 0.0 : dphi * L * L / (phi * phi * phi),
                           L == 0.0 ? 0.0 : L / (phi * phi));
  };
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Eigen::Vector3d k1 = f(y);
    const Eigen::Vector3d k2 = f(y + 0.5 * h * k1);
    const Eigen::Vector3d k3 = f(y + 0.5 * h * k2);
    const Eigen::Vector3d k4 = f(y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

/// Graph shortest path on a fine (r, psi) slice grid with a radius-7
/// neighborhood; edge weights are metric chord lengths (2-point Gauss).
/// r_hi must be chosen so r0 and r1 land on grid nodes.
inline double dijkstra_slice_distance(const geosob::models::WarpedModel& m,
                                      double r0, double r1, double dpsi,
                                      double r_hi, int nr = 951,
                                      int npsi = 651) {
  const double dr = r_hi / (nr - 1);
  const double dp = dpsi / (npsi - 1);

  const auto node = [&](int ir, int ip) { return ir * npsi + ip; };
  const auto metric_len = [&](double ra, double pa, double rb, double pb) {
    // 2-point Gauss along the straight chart segment
    const double g1 = 0.5 - 0.5 / std::sqrt(3.0), g2 = 0.5 + 0.5 / std::sqrt(3.0);
    double len = 0.0;
    for (double s : {g1, g2}) {
      const double r = ra + s * (rb - ra);
      const double phi = m.profile.phi(std::abs(r));
      const double drds = rb - ra;
      const double dpds = pb - pa;
      len += 0.5 * std::sqrt(drds * drds + phi * phi * dpds * dpds);
    }
    return len;
  };

  // coprime offsets within radius 7
  std::vector<std::pair<int, int>> offs;
  for (int a = -7; a <= 7; ++a) {
    for (int b = -7; b <= 7; ++b) {
      if (a == 0 && b == 0) continue;
      if (a * a + b * b > 49) continue;
      if (std::abs(std::gcd(a, b)) != 1) continue;
      offs.emplace_back(a, b);
    }
  }

  std::vector<double> dist(static_cast<std::size_t>(nr) * npsi,
                           std::numeric_limits<double>::infinity());
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  const int src_ir = static_cast<int>(std::lround(r0 / dr));
  const int dst_ir = static_cast<int>(std::lround(r1 / dr));
  const int src = node(src_ir, 0);
  const int dst = node(dst_ir, npsi - 1);
  dist[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (v == dst) break;
    const int ir = v / npsi, ip = v % npsi;
    for (const auto& [da, db] : offs) {
      const int jr = ir + da, jp = ip + db;
      if (jr < 0 || jr >= nr || jp < 0 || jp >= npsi) continue;
      const double w =
          metric_len(ir * dr, ip * dp, jr * dr, jp * dp);
      const int u = node(jr, jp);
      if (dist[v] + w < dist[u]) {
        dist[u] = dist[v] + w;
        pq.push({dist[u], u});
      }
    }
  }
  return dist[dst];
}

}  // namespace oracles
