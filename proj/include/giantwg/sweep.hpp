#pragma once
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "giantwg/model.hpp"

namespace giantwg {

enum class SweepTarget {
  SinglePhoton,       // r, t, sigma, green over the axes
  G2Map,              // transmitted pair correlation at fixed delay
  FluorescenceSlice,  // inelastic pair density along p1
  SteadyCurve,        // cavity n, g2, <b>
  ReflectedCurve,     // counterpropagating output density
  GapCurve            // Liouvillian spectral gap
};

std::string to_string(SweepTarget target);

struct AxisSpec {
  std::string name;  // parameter the axis assigns per point
  double min = 0.0;
  double max = 0.0;
  int points = 1;
  bool log_scale = false;
  std::vector<double> values() const;
};

struct ConfigBundle {
  SystemParams params;
  DriveConfig drive;
  NumericalControls controls;
  SweepTarget target = SweepTarget::SinglePhoton;
  bool target_set = false;
  std::vector<AxisSpec> axes;           // one or two
  std::string phi_rule = "fixed";       // "fixed" or "chiral"
  std::string theta_rule = "fixed";     // "fixed" or "chiral"
  double tau = 0.0;                     // delay for the pair correlation map
  std::optional<double> k1, k2;         // pair energies; default drive.k_i
  std::vector<std::pair<std::string, std::string>> raw;  // echoed into JSON
};

// Flat key-value configuration; '#' starts a comment, keys are single
// assignments and axes are "axis = name min max points linear|log".
// Unknown or duplicate keys are rejected with the offending line number.
ConfigBundle parse_config(std::istream& in);
ConfigBundle parse_config_file(const std::string& path);

struct SweepRow {
  std::vector<double> axis_values;
  std::string observable;
  complexd value;
  std::string flag;  // empty on success, error code otherwise
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<SweepRow> rows;
};

// Evaluates every grid point, in parallel when GIANTWG_THREADS allows, with
// per-point failures recorded as flagged rows. Row order is the grid order
// regardless of the worker count.
SweepResult run_sweep(const ConfigBundle& bundle);

std::string emit_csv(const SweepResult& result);
std::string emit_json(const ConfigBundle& bundle, const SweepResult& result);

}  // namespace giantwg
