#pragma once

// Plain-text serialization of trajectories.
//
// CSV layout: header `t,q1..qn,p1..pn` followed, for extended states, by the
// extra pair (`t_ext,E` or `s,E_s`) and optionally a `clock` column. Numbers
// use 17 significant digits. The terminal event closes the file as
// `# event: <kind> at t=<value>`.

#include <optional>
#include <ostream>
#include <string>

#include "bsym/integrate.hpp"

namespace bsym::io {

/// Round-trip safe "%.17g" formatting.
std::string format_double(double v);

struct CsvOptions {
  /// Names of the extra conjugate pair for extended states.
  std::string ext_position_name = "t_ext";
  std::string ext_momentum_name = "E";
  /// When set, a `clock` column carrying this value is appended.
  std::optional<std::string> clock;
};

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const CsvOptions& options = {});

}  // namespace bsym::io
