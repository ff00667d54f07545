#pragma once

#include <array>
#include <optional>
#include <vector>

namespace gaitrm {

/// Physical outcome of one environment step, the only input rewards read.
///
/// Energy usage comes either from raw per-joint torque/velocity vectors or
/// from a precomputed mechanical power scalar. When both are present the
/// vectors win.
struct StepInfo {
  double delta_x = 0.0;  // m, base_x - prev_base_x
  std::optional<double> power;
  std::vector<double> torques;
  std::vector<double> joint_velocities;
  std::array<double, 4> foot_heights{};  // m, indexed by Prop
  bool terminated = false;
  bool truncated = false;

  bool has_joint_vectors() const { return !torques.empty() || !joint_velocities.empty(); }
};

}  // namespace gaitrm
