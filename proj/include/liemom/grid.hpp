#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace liemom {

// Uniform time grid shared by the sampler and the moment propagators.
// Checkpoints fall on every `checkpoint_stride`-th node plus the final one.
struct SimulationGrid {
  double t0 = 0.0;
  double dt = 1e-3;
  int n_steps = 1000;
  int checkpoint_stride = 10;

  double time(int k) const { return t0 + k * dt; }
  double t_final() const { return time(n_steps); }

  bool is_checkpoint(int k) const { return k == n_steps || k % checkpoint_stride == 0; }

  std::vector<int> checkpoint_indices() const {
    std::vector<int> idx;
    for (int k = 0; k <= n_steps; ++k) {
      if (is_checkpoint(k)) idx.push_back(k);
    }
    return idx;
  }

  std::vector<double> checkpoint_times() const {
    std::vector<double> out;
    for (int k : checkpoint_indices()) out.push_back(time(k));
    return out;
  }
};

inline SimulationGrid make_grid(double t0, double t_final, double dt, int checkpoint_stride) {
  if (!(dt > 0.0)) throw std::invalid_argument("make_grid: dt must be positive");
  if (!(t_final > t0)) throw std::invalid_argument("make_grid: t_final must exceed t0");
  if (checkpoint_stride <= 0) throw std::invalid_argument("make_grid: stride must be positive");
  const double steps = (t_final - t0) / dt;
  const long long n = std::llround(steps);
  if (n < 1 || std::abs(t0 + double(n) * dt - t_final) > 1e-9 * std::max(1.0, std::abs(t_final))) {
    throw std::invalid_argument("make_grid: horizon is not an integer number of steps");
  }
  return SimulationGrid{t0, dt, int(n), checkpoint_stride};
}

}  // namespace liemom
