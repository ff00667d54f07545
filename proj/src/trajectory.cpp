#include "gaitrm/trajectory.hpp"

#include <charconv>

namespace gaitrm {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

const char* TrajectoryLog::header() {
  return "step,action,h_FL,h_FR,h_BL,h_BR,FL,FR,BL,BR,delta_x,power,reward,rm_state,terminated,"
         "truncated";
}

void TrajectoryLog::write_csv(std::ostream& out) const {
  out << header() << "\n";
  for (const TrajectoryRow& r : rows_) {
    out << r.step << ',' << r.action.code();
    for (double h : r.foot_heights) out << ',' << format_number(h);
    for (Prop p : kAllProps) out << ',' << (r.label.contains(p) ? 1 : 0);
    out << ',' << format_number(r.delta_x) << ',' << format_number(r.power) << ','
        << format_number(r.reward) << ',' << r.rm_state.value_or("") << ',' << (r.terminated ? 1 : 0)
        << ',' << (r.truncated ? 1 : 0) << "\n";
  }
}

}  // namespace gaitrm
