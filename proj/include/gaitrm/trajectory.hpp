#pragma once

// Per-step trajectory logs as comma-separated text with a header row:
//
//   step,action,h_FL,h_FR,h_BL,h_BR,FL,FR,BL,BR,delta_x,power,reward,rm_state,terminated,truncated
//
// FL..BR are the label bits (1 = foot in the air). rm_state is empty when the
// run has no automaton.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gaitrm/env.hpp"

namespace gaitrm {

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

struct TrajectoryRow {
  std::int64_t step = 0;
  Action action;
  std::array<double, 4> foot_heights{};
  LabelSet label;
  double delta_x = 0.0;
  double power = 0.0;
  double reward = 0.0;
  std::optional<std::string> rm_state;
  bool terminated = false;
  bool truncated = false;
};

class TrajectoryLog {
 public:
  static const char* header();

  void add(TrajectoryRow row) { rows_.push_back(std::move(row)); }
  const std::vector<TrajectoryRow>& rows() const { return rows_; }

  void write_csv(std::ostream& out) const;

 private:
  std::vector<TrajectoryRow> rows_;
};

}  // namespace gaitrm
