// Batch front-end for the coupled free-flow/porous optimal-control solver:
// parse a JSON run configuration plus flag overrides, execute one command
// (solve | converge | robust | check-op), write report.json and CSV tables,
// and exit nonzero when a pass/fail gate fails or an error occurs.
#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdopt/config.hpp"
#include "sdopt/reconstruction.hpp"
#include "sdopt/system.hpp"
#include "sdopt/verify.hpp"
#include "sdopt/vtk.hpp"

namespace {

using nlohmann::json;
using namespace sdopt;

constexpr unsigned kSampleSeed = 42u;

const char* scheme_name(SchemeTag tag) {
  return tag == SchemeTag::Classical ? "classical" : "robust";
}

std::vector<SchemeTag> resolve_schemes(const std::string& scheme) {
  if (scheme == "classical") return {SchemeTag::Classical};
  if (scheme == "robust") return {SchemeTag::Robust};
  return {SchemeTag::Classical, SchemeTag::Robust};
}

// Whether the manufactured free-flow velocity carries a mass source
// (div u^s != 0): unusual for physical data, so reports call it out.
bool stokes_mass_source_active(const ExactFields& ex) {
  if (!ex.u_s.x || !ex.u_s.y) return false;
  for (const double x : {0.17, 0.52, 0.83}) {
    for (const double y : {1.21, 1.58, 1.92}) {
      const Jet u1 = eval_jet(ex.u_s.x, Vec2{x, y});
      const Jet u2 = eval_jet(ex.u_s.y, Vec2{x, y});
      if (std::abs(u1.dx + u2.dy) > 1e-12) return true;
    }
  }
  return false;
}

// Mesh plus spaces for one run; members hold stable addresses for the
// velocity pair and the reconstruction operator.
struct Setup {
  Mesh mesh;
  Space stokes, darcy, pressure, trace;
  VelocityPair vel;
  ReconstructionOperator recon;
  bool has_recon = false;

  Setup(const RunConfig& cfg, int refinements, bool need_recon) {
    mesh = build_two_domain_mesh(cfg.stokes_box, cfg.darcy_box, cfg.n0);
    for (int i = 0; i < refinements; ++i) mesh = refine_uniform(mesh);
    stokes = make_space(mesh, SpaceKind::StokesVelocity);
    darcy = make_space(mesh, SpaceKind::DarcyVelocity);
    pressure = make_space(mesh, SpaceKind::Pressure);
    trace = make_space(mesh, SpaceKind::InterfaceTrace);
    vel = VelocityPair{&stokes, &darcy};
    if (need_recon) {
      recon = build_reconstruction(mesh, vel);
      has_recon = true;
    }
  }
  Setup(const Setup&) = delete;
  Setup& operator=(const Setup&) = delete;

  const ReconstructionOperator* recon_for(SchemeTag scheme) const {
    return scheme == SchemeTag::Robust ? &recon : nullptr;
  }
};

json error_row_json(const ErrorRow& row) {
  return json{{"h", row.h},
              {"u_grad_s", row.u_grad_s},
              {"u_l2_d", row.u_l2_d},
              {"u_div_d", row.u_div_d},
              {"u_x", row.u_x},
              {"z_grad_s", row.z_grad_s},
              {"z_l2_d", row.z_l2_d},
              {"z_div_d", row.z_div_d},
              {"z_x", row.z_x},
              {"p_l2", row.p_l2},
              {"r_l2", row.r_l2},
              {"cost", row.cost}};
}

json run_solve(const RunConfig& cfg, std::map<std::string, bool>& flags) {
  const ExactFields ex = select_octet(cfg);
  const ProblemData data = derive_data(ex);
  const std::vector<SchemeTag> schemes = resolve_schemes(cfg.scheme);
  const bool need_recon =
      std::any_of(schemes.begin(), schemes.end(),
                  [](SchemeTag s) { return s == SchemeTag::Robust; });
  const Setup s(cfg, cfg.levels - 1, need_recon);

  json per = json::object();
  for (const SchemeTag scheme : schemes) {
    const ReconstructionOperator* rp = s.recon_for(scheme);
    const BlockSystem sys =
        build_system(s.mesh, s.vel, s.pressure, s.trace, data, scheme, rp);
    const Solution sol = solve(sys);
    const ErrorRow row =
        error_norms(s.mesh, s.vel, s.pressure, sol, ex, scheme, rp);
    json r = error_row_json(row);
    r["dofs"] = sys.size();
    r["solve_residual"] = sol.residual;
    flags[std::string("solve_residual_") + scheme_name(scheme)] =
        sol.residual < 1e-10;
    per[scheme_name(scheme)] = r;

    std::cout << "[" << scheme_name(scheme) << "] h " << row.h << ", dofs "
              << sys.size() << ", |u err|_X " << row.u_x << ", |z err|_X "
              << row.z_x << ", |p err| " << row.p_l2 << ", |r err| "
              << row.r_l2 << ", cost " << row.cost << ", residual "
              << sol.residual << '\n';

    if (cfg.vtk) {
      const std::filesystem::path path =
          std::filesystem::path(cfg.out_dir) /
          (std::string("solution_") + scheme_name(scheme) + ".vtk");
      std::ofstream out(path);
      if (!out) throw SolverError("cannot write " + path.string());
      write_vtk(s.mesh, s.vel, s.pressure, sol, out);
      std::cout << "wrote " << path.string() << '\n';
    }
  }
  return per;
}

json convergence_json(const ConvergenceReport& rep) {
  json rows = json::array();
  for (const ErrorRow& row : rep.rows) rows.push_back(error_row_json(row));
  return json{{"rows", rows},
              {"eoc_u", rep.eoc_u},
              {"eoc_z", rep.eoc_z},
              {"eoc_p", rep.eoc_p},
              {"eoc_r", rep.eoc_r}};
}

void write_combined_convergence_csv(
    const std::vector<std::pair<std::string, ConvergenceReport>>& reports,
    std::ostream& out) {
  out << "scheme,level,h,u_grad_s,u_l2_d,u_div_d,u_x,z_grad_s,z_l2_d,"
         "z_div_d,z_x,p_l2,r_l2,cost,eoc_u,eoc_z,eoc_p,eoc_r\n";
  out << std::setprecision(17);
  for (const auto& [name, rep] : reports) {
    for (std::size_t l = 0; l < rep.rows.size(); ++l) {
      const ErrorRow& r = rep.rows[l];
      out << name << ',' << l << ',' << r.h << ',' << r.u_grad_s << ','
          << r.u_l2_d << ',' << r.u_div_d << ',' << r.u_x << ','
          << r.z_grad_s << ',' << r.z_l2_d << ',' << r.z_div_d << ','
          << r.z_x << ',' << r.p_l2 << ',' << r.r_l2 << ',' << r.cost;
      if (l == 0) {
        out << ",,,,\n";
      } else {
        out << ',' << rep.eoc_u[l - 1] << ',' << rep.eoc_z[l - 1] << ','
            << rep.eoc_p[l - 1] << ',' << rep.eoc_r[l - 1] << '\n';
      }
    }
  }
}

json run_converge(const RunConfig& cfg, std::map<std::string, bool>& flags) {
  const ExactFields ex = select_octet(cfg);
  std::vector<std::pair<std::string, ConvergenceReport>> reports;
  json per = json::object();
  for (const SchemeTag scheme : resolve_schemes(cfg.scheme)) {
    const ConvergenceReport rep = convergence_study(
        cfg.stokes_box, cfg.darcy_box, cfg.n0, cfg.levels, ex, scheme);
    per[scheme_name(scheme)] = convergence_json(rep);

    std::cout << "[" << scheme_name(scheme) << "]\n";
    for (std::size_t l = 0; l < rep.rows.size(); ++l) {
      const ErrorRow& row = rep.rows[l];
      std::cout << "  level " << l << ": h " << row.h << ", |u err|_X "
                << row.u_x << ", |z err|_X " << row.z_x;
      if (l > 0) {
        std::cout << ", eoc_u " << rep.eoc_u[l - 1] << ", eoc_z "
                  << rep.eoc_z[l - 1];
      }
      std::cout << '\n';
    }
    const bool in_window =
        !rep.eoc_u.empty() && std::isfinite(rep.eoc_u.back()) &&
        std::isfinite(rep.eoc_z.back()) &&
        rep.eoc_u.back() >= cfg.tol.eoc_low &&
        rep.eoc_u.back() <= cfg.tol.eoc_high &&
        rep.eoc_z.back() >= cfg.tol.eoc_low &&
        rep.eoc_z.back() <= cfg.tol.eoc_high;
    flags[std::string("eoc_window_") + scheme_name(scheme)] = in_window;
    reports.emplace_back(scheme_name(scheme), rep);
  }

  const std::filesystem::path path =
      std::filesystem::path(cfg.out_dir) / "convergence.csv";
  std::ofstream out(path);
  if (!out) throw SolverError("cannot write " + path.string());
  write_combined_convergence_csv(reports, out);
  std::cout << "wrote " << path.string() << '\n';
  return per;
}

json run_robust(const RunConfig& cfg, std::map<std::string, bool>& flags) {
  const ExactFields ex = select_octet(cfg);
  const RobustnessReport rep =
      robustness_experiment(cfg.stokes_box, cfg.darcy_box, cfg.n0,
                            cfg.levels - 1, ex, pressure_bump(), cfg.scales);

  json rows = json::array();
  double max_rel = 0.0;
  for (const RobustnessRow& row : rep.rows) {
    const double rel =
        std::abs(row.robust_u_x - rep.baseline_robust) / rep.baseline_robust;
    max_rel = std::max(max_rel, rel);
    rows.push_back(json{{"lambda", row.lambda},
                        {"classical_u_x", row.classical_u_x},
                        {"robust_u_x", row.robust_u_x},
                        {"robust_rel_change", rel},
                        {"robust_drift", row.robust_drift}});
    std::cout << "lambda " << row.lambda << ": classical |u err|_X "
              << row.classical_u_x << ", robust |u err|_X " << row.robust_u_x
              << ", robust rel change " << rel << '\n';
  }
  flags["robust_spread"] = max_rel < cfg.tol.robust_spread;

  // Growth gate between the smallest and largest positive scales, when the
  // run has at least two of them.
  std::vector<const RobustnessRow*> positive;
  for (const RobustnessRow& row : rep.rows) {
    if (row.lambda > 0.0) positive.push_back(&row);
  }
  if (positive.size() >= 2) {
    const auto less = [](const RobustnessRow* a, const RobustnessRow* b) {
      return a->lambda < b->lambda;
    };
    const RobustnessRow* lo =
        *std::min_element(positive.begin(), positive.end(), less);
    const RobustnessRow* hi =
        *std::max_element(positive.begin(), positive.end(), less);
    const double growth = hi->classical_u_x / lo->classical_u_x;
    flags["classical_growth"] = growth >= cfg.tol.classical_growth;
    std::cout << "classical growth factor (lambda " << hi->lambda << " vs "
              << lo->lambda << "): " << growth << '\n';
  }

  const std::filesystem::path path =
      std::filesystem::path(cfg.out_dir) / "robustness.csv";
  std::ofstream out(path);
  if (!out) throw SolverError("cannot write " + path.string());
  write_robustness_csv(rep, out);
  std::cout << "wrote " << path.string() << '\n';

  return json{{"baseline_classical", rep.baseline_classical},
              {"baseline_robust", rep.baseline_robust},
              {"rows", rows}};
}

json run_checkop(const RunConfig& cfg, std::map<std::string, bool>& flags) {
  const Setup s(cfg, cfg.levels - 1, true);
  const std::vector<VecX> fields = sample_admissible_fields(
      s.mesh, s.vel, s.pressure, s.trace, 100, kSampleSeed);
  double max_div = 0.0, max_jump = 0.0;
  for (const VecX& v : fields) {
    const VecX y = s.recon.Pi * v;
    max_div = std::max(max_div, max_cell_divergence(s.recon, y));
    max_jump = std::max(max_jump, max_interface_normal_jump(s.recon, y));
  }
  std::cout << "reconstruction of " << fields.size()
            << " admissible fields: max |div| " << max_div
            << ", max interface normal jump " << max_jump << " (tolerance "
            << cfg.tol.check_op << ")\n";
  flags["reconstruction_divergence"] = max_div < cfg.tol.check_op;
  flags["reconstruction_normal_jump"] = max_jump < cfg.tol.check_op;
  return json{{"samples", fields.size()},
              {"max_divergence", max_div},
              {"max_normal_jump", max_jump}};
}

json config_echo(const RunConfig& cfg) {
  const ExactFields ex = select_octet(cfg);
  const Mat2 K = ex.K ? ex.K(Vec2{0.5, 0.5}) : Mat2::Identity();
  return json{
      {"command", cfg.command},
      {"geometry",
       {{"stokes",
         {cfg.stokes_box.x0, cfg.stokes_box.x1, cfg.stokes_box.y0,
          cfg.stokes_box.y1}},
        {"darcy",
         {cfg.darcy_box.x0, cfg.darcy_box.x1, cfg.darcy_box.y0,
          cfg.darcy_box.y1}}}},
      {"n0", cfg.n0},
      {"levels", cfg.levels},
      {"scheme", cfg.scheme},
      {"octet", cfg.octet},
      {"octet_scale", resolved_octet_scale(cfg)},
      {"parameters",
       {{"mu", ex.mu},
        {"alpha", ex.alpha},
        {"alpha1", ex.alpha1},
        {"K", {{K(0, 0), K(0, 1)}, {K(1, 0), K(1, 1)}}}}},
      {"scales", cfg.scales},
      {"out", cfg.out_dir},
      {"vtk", cfg.vtk},
      {"stokes_mass_source_active", stokes_mass_source_active(ex)},
      {"tolerances",
       {{"eoc_window", {cfg.tol.eoc_low, cfg.tol.eoc_high}},
        {"robust_spread", cfg.tol.robust_spread},
        {"classical_growth", cfg.tol.classical_growth},
        {"check_op", cfg.tol.check_op},
        {"fd_optimality", cfg.tol.fd_optimality}}}};
}

std::vector<double> parse_scales_list(const std::string& text) {
  std::vector<double> scales;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ArgumentError("config: cannot parse scale '" + item + "'");
    }
    while (used < item.size() &&
           std::isspace(static_cast<unsigned char>(item[used])) != 0) {
      ++used;
    }
    if (used != item.size()) {
      throw ArgumentError("config: cannot parse scale '" + item + "'");
    }
    scales.push_back(value);
  }
  if (scales.empty()) {
    throw ArgumentError("config: '--scales' must list at least one value");
  }
  return scales;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Mixed finite-element solver and verification harness for optimal "
      "control of a coupled free-flow/porous-medium system"};
  app.name("sdopt");

  std::string command;
  app.add_option("command", command,
                 "Command to run: solve | converge | robust | check-op");
  std::string config_path, scheme, scales_text, out_dir, octet;
  int levels = 0, n0 = 0;
  double octet_scale = 0.0;
  bool vtk = false;
  app.add_option("--config", config_path, "JSON run configuration file");
  app.add_option("--levels", levels, "Refinement level count");
  app.add_option("--n0", n0, "Subdivisions per unit length on the base mesh");
  app.add_option("--scheme", scheme, "classical | robust | both");
  app.add_option("--scales", scales_text,
                 "Comma-separated perturbation scales, e.g. 1,100,10000");
  app.add_option("--octet", octet, "Manufactured solution: trig | polynomial");
  app.add_option("--octet-scale", octet_scale,
                 "Amplitude factor for the manufactured solution");
  app.add_option("--out", out_dir, "Output directory for reports");
  app.add_flag("--vtk", vtk, "Also write VTK solution files (solve command)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ArgumentError("config: cannot read " + config_path);
      std::stringstream buffer;
      buffer << in.rdbuf();
      cfg = parse_config(buffer.str());
    }
    if (!command.empty()) cfg.command = command;
    if (app.count("--levels") > 0) cfg.levels = levels;
    if (app.count("--n0") > 0) cfg.n0 = n0;
    if (app.count("--scheme") > 0) cfg.scheme = scheme;
    if (app.count("--scales") > 0) cfg.scales = parse_scales_list(scales_text);
    if (app.count("--octet") > 0) cfg.octet = octet;
    if (app.count("--octet-scale") > 0) cfg.octet_scale = octet_scale;
    if (app.count("--out") > 0) cfg.out_dir = out_dir;
    if (vtk) cfg.vtk = true;
    validate_config(cfg);
  } catch (const ArgumentError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return 2;
  }

  try {
    std::filesystem::create_directories(cfg.out_dir);

    std::cout << "command: " << cfg.command << " (scheme " << cfg.scheme
              << ", octet " << cfg.octet << " x" << resolved_octet_scale(cfg)
              << ", n0 " << cfg.n0 << ", levels " << cfg.levels << ")\n";

    std::map<std::string, bool> flags;
    json results;
    if (cfg.command == "solve") {
      results = run_solve(cfg, flags);
    } else if (cfg.command == "converge") {
      results = run_converge(cfg, flags);
    } else if (cfg.command == "robust") {
      results = run_robust(cfg, flags);
    } else {
      results = run_checkop(cfg, flags);
    }

    bool pass = true;
    json jflags = json::object();
    for (const auto& [name, ok] : flags) {
      jflags[name] = ok;
      pass = pass && ok;
      std::cout << "flag " << name << ": " << (ok ? "PASS" : "FAIL") << '\n';
    }

    json report{{"config", config_echo(cfg)},
                {"results", results},
                {"flags", jflags},
                {"pass", pass}};
    const std::filesystem::path path =
        std::filesystem::path(cfg.out_dir) / "report.json";
    std::ofstream out(path);
    if (!out) throw SolverError("cannot write " + path.string());
    out << report.dump(2) << '\n';
    std::cout << "wrote " << path.string() << '\n';
    std::cout << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? 0 : 1;
  } catch (const ArgumentError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
