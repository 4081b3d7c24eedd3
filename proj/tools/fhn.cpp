// Command-line front end: simulate, sweep, equilibria, regions, manifold,
// estimate, contours.
//
// Every subcommand accepts --config FILE with `key = value` lines naming long
// flags; explicit flags win over the file. Flag errors exit with 2,
// computation errors with 1 and an error JSON on stderr.

#include "fhn/burst.hpp"
#include "fhn/contour.hpp"
#include "fhn/geometry.hpp"
#include "fhn/kernels.hpp"
#include "fhn/manifold.hpp"
#include "fhn/serialize.hpp"
#include "fhn/svg.hpp"
#include "fhn/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct ModelFlags {
  fhn::ModelParams params;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;

  void add(CLI::App* cmd) {
    cmd->add_option("--a", params.a, "Model parameter a")->capture_default_str();
    cmd->add_option("--b", params.b, "Model parameter b")->capture_default_str();
    cmd->add_option("--eps", params.eps, "Timescale ratio eps")->capture_default_str();
    cmd->add_option("--rel-tol", rel_tol, "Integrator relative tolerance")->capture_default_str();
    cmd->add_option("--abs-tol", abs_tol, "Integrator absolute tolerance")->capture_default_str();
  }

  fhn::ode::IntegratorConfig integrator() const {
    fhn::ode::IntegratorConfig c;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    return c;
  }
};

struct ForcingFlags {
  double E = 0.0;
  double omega = 0.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--E", E, "Forcing amplitude")->required();
    cmd->add_option("--omega", omega, "Forcing frequency")->required();
  }
  fhn::Forcing forcing() const { return {E, omega}; }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw fhn::Error(fhn::ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw fhn::Error(fhn::ErrorKind::IoError, "write to '" + path + "' failed");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Replaces `--config FILE` by one `--key value` pair per line of FILE,
// inserted directly after the subcommand name.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw CLI::ValidationError("--config", "cannot read '" + *path + "'");
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--config", *path + ":" + std::to_string(lineno) + ": expected key = value");
    injected.push_back("--" + trim(line.substr(0, eq)));
    injected.push_back(trim(line.substr(eq + 1)));
  }
  auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind('-', 0) != 0; });
  if (sub != args.end()) ++sub;
  args.insert(sub, injected.begin(), injected.end());
  return args;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

void validated(const fhn::ModelParams& p, const fhn::Forcing& f) {
  p.validate();
  f.validate(p);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodically forced FitzHugh-Nagumo burst toolkit", "fhn"};
  app.set_version_flag("--version", std::string(FHN_VERSION));
  app.require_subcommand(1);

  // Later occurrences win, so flags placed after the expanded config override it.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  ModelFlags model;
  ForcingFlags forcing;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Integrate the standard protocol and report burst metrics");
  int periods = 2;
  int burn_in = 2;
  std::string sim_out;
  std::string sim_svg;
  forcing.add(sim);
  model.add(sim);
  sim->add_option("--periods", periods, "Measurement periods")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--burn-in", burn_in, "Burn-in periods")->capture_default_str()->check(CLI::NonNegativeNumber);
  sim->add_option("--out", sim_out, "Write the time series (t,x,y,theta) as CSV");
  sim->add_option("--svg", sim_svg, "Render x against theta as SVG");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run an (omega, E) parameter sweep");
  std::string spec_path;
  std::string sweep_out;
  std::string checkpoint;
  std::string sweep_svg;
  std::optional<int> workers;
  std::vector<std::string> overrides;
  sweep->add_option("--spec", spec_path, "Sweep spec file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "Grid CSV output")->required();
  sweep->add_option("--checkpoint", checkpoint, "Checkpoint log (resumes if present)");
  sweep->add_option("--workers", workers, "Worker threads (overrides the spec)")->check(CLI::PositiveNumber);
  sweep->add_option("--set", overrides, "Override a spec key, as key=value")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sweep->add_option("--svg", sweep_svg, "Render the spike-count diagram as SVG");

  // equilibria
  auto* eq = app.add_subcommand("equilibria", "Folded equilibria of the reduced flow as JSON");
  forcing.add(eq);
  model.add(eq);

  // regions
  auto* reg = app.add_subcommand("regions", "Region label and amplitude thresholds");
  forcing.add(reg);
  model.add(reg);

  // manifold
  auto* man = app.add_subcommand("manifold", "Series expansion of a folded-saddle invariant manifold");
  std::string branch = "stable";
  std::string man_out;
  int samples = 201;
  double half_width = 1.0;
  forcing.add(man);
  model.add(man);
  man->add_option("--branch", branch, "stable or unstable")
      ->capture_default_str()
      ->check(CLI::IsMember({"stable", "unstable"}));
  man->add_option("--out", man_out, "Write a sampled (theta,u,x) polyline as CSV");
  man->add_option("--samples", samples, "Polyline samples")->capture_default_str()->check(CLI::Range(2, 1000000));
  man->add_option("--half-width", half_width, "Sample |theta - theta_base| up to this")
      ->capture_default_str()
      ->check(CLI::Range(1e-6, 1.5707963267948966));

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimated against simulated spike count");
  double f_burst = fhn::kDefaultBurstFrequency;
  forcing.add(est);
  model.add(est);
  est->add_option("--f-burst", f_burst, "Intra-burst spike frequency (Hz)")->capture_default_str()->check(CLI::PositiveNumber);

  // contours
  auto* con = app.add_subcommand("contours", "Spike-count boundaries and L2 level sets of a grid");
  std::string grid_path;
  std::string con_out;
  std::string con_svg;
  int levels = 24;
  con->add_option("--grid", grid_path, "Grid CSV from sweep")->required()->check(CLI::ExistingFile);
  con->add_option("--levels", levels, "Number of L2 levels")->capture_default_str()->check(CLI::NonNegativeNumber);
  con->add_option("--out", con_out, "Write the JSON here instead of stdout");
  con->add_option("--svg", con_svg, "Render the diagram as SVG");

  for (auto* cmd : {sim, sweep, eq, reg, man, est, con})
    cmd->add_option("--config", "File of `key = value` lines naming long flags");

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const fhn::ModelParams& p = model.params;
    const fhn::Forcing f = forcing.forcing();

    if (*sim) {
      validated(p, f);
      fhn::Protocol proto;
      proto.burn_in_periods = burn_in;
      proto.measure_periods = periods;
      const auto run = fhn::simulate_standard(p, f, model.integrator(), proto);
      const auto metrics = fhn::measure(run, f);
      json j = fhn::to_json(metrics);
      j["E"] = f.E;
      j["omega"] = f.omega;
      j["periods"] = periods;
      j["region"] = std::string(fhn::to_string(fhn::classify_region(p, f)));
      if (!sim_out.empty()) write_file(sim_out, fhn::trajectory_csv(run.trajectory, f));
      if (!sim_svg.empty()) {
        std::vector<fhn::FoldedEquilibrium> eqs;
        try {
          eqs = fhn::folded_equilibria(p, f);
        } catch (const fhn::Error&) {
          // On a saddle-node boundary the plot simply has no markers.
        }
        write_file(sim_svg, fhn::trajectory_svg(run.trajectory, f, eqs));
      }
      print_json(j);
    } else if (*sweep) {
      auto spec = fhn::load_sweep_spec(spec_path);
      for (const auto& kv : overrides) {
        const auto pos = kv.find('=');
        if (pos == std::string::npos)
          throw fhn::Error(fhn::ErrorKind::ConfigError, "--set expects key=value, got '" + kv + "'");
        fhn::apply_spec_key(spec, kv.substr(0, pos), kv.substr(pos + 1));
      }
      if (workers) spec.workers = *workers;
      spec.validate();
      fhn::SweepOptions opts;
      opts.output = sweep_out;
      if (!checkpoint.empty()) opts.checkpoint = checkpoint;
      const auto grid = fhn::run_sweep(spec, opts);
      std::size_t failed = 0;
      for (const auto& c : grid.cells) failed += c.ok() ? 0 : 1;
      if (!sweep_svg.empty()) {
        const auto b = fhn::extract_boundaries(grid);
        const auto l = spec.wants(fhn::Metric::L2) ? fhn::l2_levelsets(grid) : std::vector<fhn::Polyline>{};
        write_file(sweep_svg, fhn::diagram_svg(grid, b, l));
      }
      print_json({{"cells", grid.cells.size()},
                  {"failed_cells", failed},
                  {"output", sweep_out},
                  {"spec_hash", hex16(grid.spec_hash)},
                  {"isa", std::string(fhn::kernels::isa_name(fhn::kernels::active_isa()))}});
    } else if (*eq) {
      validated(p, f);
      const auto eqs = fhn::folded_equilibria(p, f);
      print_json({{"E", f.E},
                  {"omega", f.omega},
                  {"delta", f.delta(p)},
                  {"region", std::string(fhn::to_string(fhn::classify_region(p, f)))},
                  {"thresholds", fhn::to_json(fhn::fold_thresholds(p, f.delta(p)))},
                  {"equilibria", fhn::to_json(eqs)}});
    } else if (*reg) {
      validated(p, f);
      const auto r = fhn::classify_region(p, f);
      const auto t = fhn::fold_thresholds(p, f.delta(p));
      std::cout << fhn::to_string(r) << '\n'
                << "delta " << fhn::format_double(f.delta(p)) << '\n'
                << "E_star_left " << fhn::format_double(t.e_star_left) << '\n'
                << "E_2star_left " << fhn::format_double(t.e_2star_left) << '\n'
                << "E_star_right " << fhn::format_double(t.e_star_right) << '\n'
                << "E_2star_right " << fhn::format_double(t.e_2star_right) << '\n';
    } else if (*man) {
      validated(p, f);
      const auto kind = branch == "stable" ? fhn::ManifoldKind::Stable : fhn::ManifoldKind::Unstable;
      const auto m = fhn::solve_expansion(kind, p, f);
      json j = fhn::to_json(m);
      if (kind == fhn::ManifoldKind::Stable) {
        try {
          const auto c = fhn::theta_at_lower_bound(m);
          j["theta_lower_bound"] = c.theta;
          j["theta_hat_lower_bound"] = c.theta_hat;
        } catch (const fhn::Error& e) {
          if (e.kind() != fhn::ErrorKind::NoIntersection) throw;
          j["theta_lower_bound"] = nullptr;
        }
      }
      if (!man_out.empty()) {
        std::vector<double> th(static_cast<std::size_t>(samples));
        std::vector<double> u(th.size());
        for (int k = 0; k < samples; ++k)
          th[static_cast<std::size_t>(k)] = -half_width + 2.0 * half_width * k / (samples - 1);
        fhn::eval_manifold_offsets(m, th, u);
        std::string csv = "theta,u,x\n";
        for (std::size_t k = 0; k < th.size(); ++k)
          csv += fhn::format_double(fhn::wrap_angle(m.theta_base + th[k])) + ',' +
                 fhn::format_double(u[k]) + ',' + fhn::format_double(u[k] + fhn::kKneeX) + '\n';
        write_file(man_out, csv);
      }
      print_json(j);
    } else if (*est) {
      validated(p, f);
      const auto run = fhn::simulate_standard(p, f, model.integrator());
      const int simulated = fhn::count_spikes(run.trajectory, run.n_periods);
      json j{{"E", f.E},
             {"omega", f.omega},
             {"region", std::string(fhn::to_string(fhn::classify_region(p, f)))},
             {"simulated", simulated}};
      const auto e = fhn::estimate_spike_count(run, p, f, f_burst);
      j["estimated"] = e.estimate;
      j["detail"] = fhn::to_json(e);
      print_json(j);
    } else if (*con) {
      const auto grid = fhn::read_grid_csv(grid_path);
      const auto b = fhn::extract_boundaries(grid);
      const auto l = fhn::l2_levelsets(grid, levels);
      json cusps = json::array();
      for (const auto& c : fhn::find_cusps(b)) cusps.push_back(fhn::to_json(c));
      json levels_json = json::array();
      for (const auto& pl : l) levels_json.push_back(pl.level);
      json boundary_levels = json::array();
      for (const auto& pl : b) boundary_levels.push_back(pl.level);
      const json j{{"boundaries", fhn::polylines_json(b)},
                   {"boundary_levels", boundary_levels},
                   {"levelsets", fhn::polylines_json(l)},
                   {"levelset_levels", levels_json},
                   {"cusps", cusps}};
      if (!con_out.empty()) {
        write_file(con_out, j.dump(2) + '\n');
      } else {
        print_json(j);
      }
      if (!con_svg.empty()) write_file(con_svg, fhn::diagram_svg(grid, b, l));
    }
  } catch (const fhn::Error& e) {
    std::cerr << fhn::error_json(e).dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
