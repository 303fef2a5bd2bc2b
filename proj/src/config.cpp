#include "sdopt/config.hpp"

#include <cmath>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"

namespace sdopt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw ArgumentError("config: " + message);
}

double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) fail("'" + key + "' must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) fail("'" + key + "' must be an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& key) {
  if (!j.is_string()) fail("'" + key + "' must be a string");
  return j.get<std::string>();
}

Rect as_rect(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 4) {
    fail("'" + key + "' must be an array [x0, x1, y0, y1]");
  }
  Rect r;
  r.x0 = as_number(j[0], key);
  r.x1 = as_number(j[1], key);
  r.y0 = as_number(j[2], key);
  r.y1 = as_number(j[3], key);
  return r;
}

Mat2 as_matrix(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() ||
      !j[1].is_array() || j[0].size() != 2 || j[1].size() != 2) {
    fail("'" + key + "' must be a 2x2 array of numbers");
  }
  Mat2 m;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) m(i, k) = as_number(j[i][k], key);
  }
  return m;
}

void parse_tolerances(const json& j, ToleranceSet& tol) {
  if (!j.is_object()) fail("'tolerances' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "eoc_window") {
      if (!value.is_array() || value.size() != 2) {
        fail("'tolerances.eoc_window' must be [low, high]");
      }
      tol.eoc_low = as_number(value[0], key);
      tol.eoc_high = as_number(value[1], key);
    } else if (key == "robust_spread") {
      tol.robust_spread = as_number(value, key);
    } else if (key == "classical_growth") {
      tol.classical_growth = as_number(value, key);
    } else if (key == "check_op") {
      tol.check_op = as_number(value, key);
    } else if (key == "fd_optimality") {
      tol.fd_optimality = as_number(value, key);
    } else {
      fail("unknown key 'tolerances." + key + "'");
    }
  }
}

void check_rect(const Rect& r, const std::string& name) {
  if (!(r.width() > 0.0) || !(r.height() > 0.0)) {
    fail("'" + name + "' must have positive width and height");
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& err) {
    fail(std::string("not valid JSON: ") + err.what());
  }
  if (!j.is_object()) fail("top level must be a JSON object");

  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      cfg.command = as_string(value, key);
    } else if (key == "geometry") {
      if (!value.is_object()) fail("'geometry' must be an object");
      for (const auto& [gkey, gval] : value.items()) {
        if (gkey == "stokes") {
          cfg.stokes_box = as_rect(gval, "geometry.stokes");
        } else if (gkey == "darcy") {
          cfg.darcy_box = as_rect(gval, "geometry.darcy");
        } else {
          fail("unknown key 'geometry." + gkey + "'");
        }
      }
    } else if (key == "n0") {
      cfg.n0 = as_int(value, key);
    } else if (key == "levels") {
      cfg.levels = as_int(value, key);
    } else if (key == "scheme") {
      cfg.scheme = as_string(value, key);
    } else if (key == "mu") {
      cfg.mu = as_number(value, key);
    } else if (key == "alpha") {
      cfg.alpha = as_number(value, key);
    } else if (key == "alpha1") {
      cfg.alpha1 = as_number(value, key);
    } else if (key == "K") {
      cfg.K = as_matrix(value, key);
    } else if (key == "octet") {
      cfg.octet = as_string(value, key);
    } else if (key == "octet_scale") {
      cfg.octet_scale = as_number(value, key);
    } else if (key == "scales") {
      if (!value.is_array()) fail("'scales' must be an array of numbers");
      cfg.scales.clear();
      for (const auto& s : value) cfg.scales.push_back(as_number(s, key));
    } else if (key == "out") {
      cfg.out_dir = as_string(value, key);
    } else if (key == "vtk") {
      if (!value.is_boolean()) fail("'vtk' must be a boolean");
      cfg.vtk = value.get<bool>();
    } else if (key == "tolerances") {
      parse_tolerances(value, cfg.tol);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  return cfg;
}

void validate_config(const RunConfig& config) {
  static const std::set<std::string> kCommands{"solve", "converge", "robust",
                                              "check-op"};
  static const std::set<std::string> kSchemes{"classical", "robust", "both"};
  static const std::set<std::string> kOctets{"trig", "polynomial"};
  if (!kCommands.count(config.command)) {
    fail("unknown command '" + config.command + "'");
  }
  if (!kSchemes.count(config.scheme)) {
    fail("unknown scheme '" + config.scheme + "'");
  }
  if (!kOctets.count(config.octet)) {
    fail("unknown manufactured solution '" + config.octet + "'");
  }
  check_rect(config.stokes_box, "geometry.stokes");
  check_rect(config.darcy_box, "geometry.darcy");
  const double tol = 1e-12;
  if (std::abs(config.stokes_box.x0 - config.darcy_box.x0) > tol ||
      std::abs(config.stokes_box.x1 - config.darcy_box.x1) > tol ||
      std::abs(config.stokes_box.y0 - config.darcy_box.y1) > tol) {
    fail(
        "the free-flow box must sit directly on the porous box, sharing "
        "the full horizontal edge");
  }
  if (config.n0 < 1) fail("'n0' must be at least 1");
  if (config.levels < 1) fail("'levels' must be at least 1");
  if (config.command == "converge" && config.levels < 3) {
    fail("'levels' must be at least 3 for a convergence run");
  }
  if (config.mu && !(*config.mu > 0.0)) fail("'mu' must be positive");
  if (config.alpha && !(*config.alpha > 0.0)) fail("'alpha' must be positive");
  if (config.alpha1 && !(*config.alpha1 > 0.0)) {
    fail("'alpha1' must be positive");
  }
  if (config.K) {
    const Mat2& K = *config.K;
    if (std::abs(K(0, 1) - K(1, 0)) > 1e-12 * (1.0 + K.cwiseAbs().maxCoeff())) {
      fail("'K' must be symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Mat2> eig(K);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      fail("'K' must be positive definite (eigenvalue check)");
    }
  }
  if (config.octet_scale && !(*config.octet_scale > 0.0)) {
    fail("'octet_scale' must be positive");
  }
  for (const double s : config.scales) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      fail("'scales' entries must be finite and nonnegative");
    }
  }
  if (config.command == "robust" && config.scales.empty()) {
    fail("'scales' must be nonempty for a robustness run");
  }
  if (config.out_dir.empty()) fail("'out' must be a nonempty path");
  const ToleranceSet& t = config.tol;
  if (!(t.eoc_low < t.eoc_high)) {
    fail("'tolerances.eoc_window' must satisfy low < high");
  }
  if (!(t.robust_spread > 0.0) || !(t.classical_growth > 0.0) ||
      !(t.check_op > 0.0) || !(t.fd_optimality > 0.0)) {
    fail("tolerances must be positive");
  }
}

double resolved_octet_scale(const RunConfig& config) {
  if (config.octet_scale) return *config.octet_scale;
  return config.command == "robust" ? 0.05 : 1.0;
}

ExactFields select_octet(const RunConfig& config) {
  ExactFields ex =
      config.octet == "polynomial" ? polynomial_octet() : trig_octet();
  const double scale = resolved_octet_scale(config);
  if (scale != 1.0) ex = scale_octet(ex, scale);
  if (config.mu) ex.mu = *config.mu;
  if (config.alpha) ex.alpha = *config.alpha;
  if (config.alpha1) ex.alpha1 = *config.alpha1;
  if (config.K) {
    const Mat2 K = *config.K;
    ex.K = [K](const Vec2&) { return K; };
  }
  return ex;
}

}  // namespace sdopt
