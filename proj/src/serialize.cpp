#include "fhn/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace fhn {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const FoldThresholds& th) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"e_star_left", th.e_star_left},
          {"e_star_right", th.e_star_right},
          {"e_2star_left", finite_or_null(th.e_2star_left)},
          {"e_2star_right", finite_or_null(th.e_2star_right)}};
}

json to_json(const FoldedEquilibrium& eq) {
  json eig = json::array();
  for (const auto& ep : eq.eigenpairs) {
    eig.push_back({{"lambda", {ep.lambda.real(), ep.lambda.imag()}},
                   {"vector",
                    {{ep.vector[0].real(), ep.vector[0].imag()},
                     {ep.vector[1].real(), ep.vector[1].imag()}}}});
  }
  return {{"side", to_string(eq.side)},
          {"kind", to_string(eq.kind)},
          {"u", eq.u},
          {"v", eq.v},
          {"theta", eq.theta},
          {"eigenvalues",
           {{eq.eigenpairs[0].lambda.real(), eq.eigenpairs[0].lambda.imag()},
            {eq.eigenpairs[1].lambda.real(), eq.eigenpairs[1].lambda.imag()}}},
          {"eigenpairs", eig}};
}

json to_json(const std::vector<FoldedEquilibrium>& eqs) {
  json arr = json::array();
  for (const auto& eq : eqs) arr.push_back(to_json(eq));
  return arr;
}

json to_json(const ManifoldExpansion& m) {
  return {{"branch", to_string(m.branch)},
          {"theta_base", m.theta_base},
          {"coeffs", m.coeffs},
          {"c_const", m.c_const},
          {"residual", m.residual},
          {"iterations", m.iterations}};
}

json to_json(const BurstMetrics& m) {
  return {{"spike_count", m.spike_count},
          {"l2", m.l2},
          {"n_theta", m.theta_seq.wrapped.size()},
          {"theta_seq", m.theta_seq.wrapped},
          {"theta_seq_unwrapped", m.theta_seq.unwrapped}};
}

json to_json(const CanardClass& c) {
  return {{"site", to_string(c.site)},
          {"outcome", to_string(c.outcome)},
          {"t_site", c.t_site},
          {"t_entry", c.t_entry},
          {"t_exit", c.t_exit},
          {"dwell", c.dwell}};
}

json to_json(const SpikeEstimate& e) {
  return {{"estimate", e.estimate},
          {"theta_first", e.theta_first},
          {"theta_stable", e.theta_stable},
          {"dtheta", e.dtheta}};
}

json to_json(const Cusp& c) {
  return {{"polyline", c.polyline},
          {"vertex", c.vertex},
          {"point", c.point},
          {"turn_deg", c.turn_deg}};
}

json polylines_json(const std::vector<Polyline>& lines) {
  json arr = json::array();
  for (const auto& pl : lines) {
    json pts = json::array();
    for (const auto& p : pl.points) pts.push_back({p[0], p[1]});
    arr.push_back(std::move(pts));
  }
  return arr;
}

json error_json(const Error& e) {
  return {{"error", e.kind_name()}, {"message", e.what()}};
}

std::string trajectory_csv(const ode::Trajectory<2>& tr, const Forcing& f) {
  std::string out = "t,x,y,theta\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    out += format_double(tr.times[k]);
    out += ',';
    out += format_double(tr.states[k][0]);
    out += ',';
    out += format_double(tr.states[k][1]);
    out += ',';
    out += format_double(wrap_angle(f.omega * tr.times[k]));
    out += '\n';
  }
  return out;
}

std::string metrics_csv_row(const Forcing& f, const BurstMetrics& m, int est_count) {
  std::string out = format_double(f.omega) + ',' + format_double(f.E) + ',' +
                    std::to_string(m.spike_count) + ',' + format_double(m.l2) + ',' +
                    std::to_string(m.theta_seq.wrapped.size()) + ',';
  if (est_count >= 0) out += std::to_string(est_count);
  return out;
}

}  // namespace fhn
