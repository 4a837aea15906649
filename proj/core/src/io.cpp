#include "bsym/io.hpp"

#include <cstdio>

namespace bsym::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const CsvOptions& options) {
  const std::size_t n = traj.empty() ? 1 : traj.front().n();
  const bool extended = !traj.empty() && traj.front().extended();

  out << 't';
  for (std::size_t i = 1; i <= n; ++i) out << ",q" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",p" << i;
  if (extended) out << ',' << options.ext_position_name << ',' << options.ext_momentum_name;
  if (options.clock) out << ",clock";
  out << '\n';

  for (std::size_t k = 0; k < traj.size(); ++k) {
    const PhaseState& s = traj.states[k];
    out << format_double(traj.times[k]);
    for (double v : s.q()) out << ',' << format_double(v);
    for (double v : s.p()) out << ',' << format_double(v);
    if (extended) out << ',' << format_double(s.ext_position()) << ',' << format_double(s.ext_momentum());
    if (options.clock) out << ',' << *options.clock;
    out << '\n';
  }
  if (!traj.events.empty()) {
    const Event& e = traj.terminal();
    out << "# event: " << to_string(e.kind) << " at t=" << format_double(e.time) << '\n';
  }
}

}  // namespace bsym::io
