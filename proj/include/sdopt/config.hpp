#ifndef SDOPT_CONFIG_HPP
#define SDOPT_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "sdopt/mesh.hpp"
#include "sdopt/types.hpp"
#include "sdopt/verify.hpp"

namespace sdopt {

/// Pass/fail thresholds of the batch front-end, overridable from the run
/// configuration so experiment manifests carry their own gates.
struct ToleranceSet {
  double eoc_low = 0.85;           // observed-order window, lower edge
  double eoc_high = 1.3;           // observed-order window, upper edge
  double robust_spread = 1e-6;     // relative error spread across scales
  double classical_growth = 10.0;  // min error ratio largest/smallest scale
  double check_op = 1e-10;         // reconstruction divergence/jump bound
  double fd_optimality = 1e-6;     // directional-derivative magnitude bound
};

/// One batch run: which command to execute, on which geometry and meshes,
/// with which physical parameters, manufactured solution, and outputs.
/// Physical parameters left unset fall back to the values the selected
/// solution octet ships with.
struct RunConfig {
  std::string command = "solve";  // solve | converge | robust | check-op
  Rect stokes_box{0.0, 1.0, 1.0, 2.0};
  Rect darcy_box{0.0, 1.0, 0.0, 1.0};
  int n0 = 1;
  int levels = 4;
  std::string scheme = "both";  // classical | robust | both
  std::optional<double> mu, alpha, alpha1;
  std::optional<Mat2> K;
  std::string octet = "trig";  // trig | polynomial
  std::optional<double> octet_scale;
  std::vector<double> scales{1.0, 1e2, 1e4};
  std::string out_dir = "out";
  bool vtk = false;
  ToleranceSet tol;
};

/// Parse a JSON run configuration. Unknown keys, malformed values, and
/// type mismatches are argument errors (strict schema: typos never pass
/// silently). Absent keys keep their defaults.
RunConfig parse_config(const std::string& json_text);

/// Validate semantic constraints: known command/scheme/octet selectors,
/// positive mesh and physical parameters, SPD permeability (eigenvalue
/// sign check), aligned boxes sharing the full interface edge, and
/// positive tolerances. Throws ArgumentError naming the offending field.
void validate_config(const RunConfig& config);

/// Amplitude factor the run actually uses: the explicit override when
/// given, otherwise 1 except for the robustness command, which defaults
/// to a gentle 0.05 so the perturbation response stands out above the
/// baseline discretization error.
double resolved_octet_scale(const RunConfig& config);

/// Build the manufactured solution the config selects: octet choice,
/// amplitude scaling, and physical-parameter overrides applied.
ExactFields select_octet(const RunConfig& config);

}  // namespace sdopt

#endif  // SDOPT_CONFIG_HPP
