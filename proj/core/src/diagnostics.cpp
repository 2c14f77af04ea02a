#include "hypflux/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

namespace hypflux {

namespace {

bool counted(const std::vector<char>& mask, std::size_t k) { return mask.empty() || mask[k]; }

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// max/min over positive values; 1 when everything is zero
double spread(const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  bool any = false;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    if (x != 0.0) any = true;
  }
  if (!any) return 1.0;
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

double last_over_first(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  if (v.front() == 0.0) return v.back() == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return v.back() / v.front();
}

}  // namespace

std::vector<char> cells_in_ball(const Mesh& mesh, const Vec2& center, double radius) {
  std::vector<char> in(mesh.num_cells(), 0);
  for (const Cell& c : mesh.cells())
    in[static_cast<std::size_t>(c.id)] = mesh.periodic_distance(c.centroid, center) <= radius;
  return in;
}

bool DiagnosticsLedger::cauchy_schwarz_holds() const {
  return wbv_l1 <= std::sqrt(wbv_sq * interface_measure) * (1.0 + 1e-12) + 1e-300;
}

void accumulate_step(DiagnosticsLedger& L, const Mesh& mesh, const FluxScheme& scheme,
                     const StateField& un, const StateField& unp1,
                     const std::vector<InterfaceFluxRecord>& records, double dt,
                     const std::vector<char>& ball) {
  const std::size_t nc = mesh.num_cells();
  if (un.values.size() != nc || unp1.values.size() != nc)
    throw StructuralError("accumulate_step: field size does not match the mesh");
  if (records.size() != mesh.num_interfaces())
    throw StructuralError("accumulate_step: one record per interface is required");
  if (!ball.empty() && ball.size() != nc) throw StructuralError("accumulate_step: bad ball mask");
  const SystemModel& sys = scheme.system();
  std::vector<double> xi_sum(nc, 0.0);
  for (std::size_t s = 0; s < records.size(); ++s) {
    const InterfaceFluxRecord& r = records[s];
    const Interface& f = mesh.interface(static_cast<int>(s));
    if (r.id != f.id) throw StructuralError("accumulate_step: records out of interface order");
    const State& u = un.values[static_cast<std::size_t>(f.left)];
    const State& v = un.values[static_cast<std::size_t>(f.right)];
    L.wbv_sq += dt * f.area * (r.defect_kl * r.defect_kl + r.defect_lk * r.defect_lk);
    L.wbv_l1 += dt * f.area * (r.defect_kl + r.defect_lk);
    L.interface_measure += 2.0 * dt * f.area;
    L.entropy_flux_bv += dt * f.area *
                         (std::abs(r.xi - sys.entropy_flux_n(u, f.normal)) +
                          std::abs(r.xi - sys.entropy_flux_n(v, f.normal)));
    xi_sum[static_cast<std::size_t>(f.left)] += f.area * r.xi;
    xi_sum[static_cast<std::size_t>(f.right)] -= f.area * r.xi;
    ++L.interfaces_checked;
    if (!r.gap_pass) ++L.gap_failures;
    const double margin = std::min(r.gap_kl - r.bound_kl, r.gap_lk - r.bound_lk);
    if (L.interfaces_checked == 1 || margin < L.min_gap_margin) L.min_gap_margin = margin;
  }
  for (std::size_t k = 0; k < nc; ++k) {
    const double vol = mesh.cells()[k].volume;
    const State& a = un.values[k];
    const State& b = unp1.values[k];
    const double deta = sys.entropy(b) - sys.entropy(a);
    const double du = (b - a).norm();
    L.time_bv_u += vol * du;
    L.time_bv_eta += vol * std::abs(deta);
    const double res = vol / dt * deta + xi_sum[k];
    if (res > 0.0) {
      L.entropy_residual_max = std::max(L.entropy_residual_max, res);
      L.entropy_residual_normalized_max =
          std::max(L.entropy_residual_normalized_max, res / (vol / dt));
    }
    if (counted(ball, k)) {
      L.mu_t_mass += dt * vol * std::abs(deta);
      L.mu_bar_t_mass += dt * vol * du;
    }
  }
  ++L.steps;
}

std::pair<double, double> initial_measure_masses(const Mesh& mesh, const SystemModel& sys,
                                                 const InitialFunction& u0,
                                                 const StateField& field0,
                                                 const std::vector<char>& ball) {
  double mu0 = 0.0, mub0 = 0.0;
  const int subdiv = mesh.dim() == 1 ? 16 : 6;
  for (const Cell& c : mesh.cells()) {
    const auto k = static_cast<std::size_t>(c.id);
    if (!counted(ball, k)) continue;
    const State& uk = field0.values[k];
    const double ek = sys.entropy(uk);
    for (const QuadraturePoint& q : cell_quadrature(mesh, c.id, QuadratureRule::Gauss3, subdiv)) {
      const State v = u0(q.x);
      mu0 += q.w * std::abs(sys.entropy(v) - ek);
      mub0 += q.w * (v - uk).norm();
    }
  }
  return {mu0, mub0};
}

MeasureMasses measure_masses(const Mesh& mesh, const SystemModel& sys, const InitialFunction& u0,
                             const Trajectory& tr, const Vec2& center, double r) {
  if (tr.snapshots.empty() || static_cast<int>(tr.snapshots.size()) != tr.n_steps + 1)
    throw ValidationError("measure_masses: trajectory must hold every step (record_every = 1)");
  const auto ball = cells_in_ball(mesh, center, r);
  MeasureMasses m;
  std::tie(m.mu0, m.mu_bar0) = initial_measure_masses(mesh, sys, u0, tr.snapshots[0], ball);
  for (int n = 0; n < tr.n_steps; ++n) {
    const auto& a = tr.snapshots[static_cast<std::size_t>(n)].values;
    const auto& b = tr.snapshots[static_cast<std::size_t>(n + 1)].values;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!ball[k]) continue;
      const double vol = mesh.cells()[k].volume;
      m.mu_t += tr.dt * vol * std::abs(sys.entropy(b[k]) - sys.entropy(a[k]));
      m.mu_bar_t += tr.dt * vol * (b[k] - a[k]).norm();
    }
  }
  return m;
}

double relative_entropy_norm(const Mesh& mesh, const SystemModel& sys, const StateField& field,
                             const std::vector<State>& ref, const std::vector<char>& mask) {
  if (field.values.size() != mesh.num_cells() || ref.size() != mesh.num_cells())
    throw StructuralError("relative_entropy_norm: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k)
    if (counted(mask, k))
      s += mesh.cells()[k].volume * relative_entropy(sys, field.values[k], ref[k]);
  return s;
}

double cell_l2_error_sq(const Mesh& mesh, const StateField& field, const std::vector<State>& ref,
                        const std::vector<char>& mask) {
  if (field.values.size() != mesh.num_cells() || ref.size() != mesh.num_cells())
    throw StructuralError("cell_l2_error_sq: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k)
    if (counted(mask, k)) s += mesh.cells()[k].volume * (field.values[k] - ref[k]).squaredNorm();
  return s;
}

std::vector<State> reference_cell_means(const Mesh& mesh, const ReferenceSolution& ref, double t,
                                        QuadratureRule rule) {
  if (t > ref.valid_until())
    throw HorizonError("reference is not defined at t = " + std::to_string(t));
  std::vector<State> out;
  out.reserve(mesh.num_cells());
  for (const Cell& c : mesh.cells()) out.push_back(ref.cell_mean(mesh, c.id, t, rule));
  return out;
}

ConeErrorAccumulator::ConeErrorAccumulator(const Mesh& mesh, const SystemModel& sys,
                                           ReferencePtr ref, QuadratureRule rule, ConeSpec cone)
    : mesh_(mesh), sys_(sys), ref_(std::move(ref)), rule_(rule), cone_(cone) {}

void ConeErrorAccumulator::observe(const StateField& field, double dt, bool integrate) {
  const double t = field.time;
  const auto means = reference_cell_means(mesh_, *ref_, t, rule_);
  const auto cone = cells_in_ball(mesh_, cone_.center, cone_.radius_at(t));
  const double e2 = cell_l2_error_sq(mesh_, field, means, cone);
  if (integrate) err_ += dt * e2;
  const double H = relative_entropy_norm(mesh_, sys_, field, means, cone);
  series_.emplace_back(t, H);
  double scale = 0.0;
  for (std::size_t k = 0; k < means.size(); ++k)
    if (cone[k]) scale += mesh_.cells()[k].volume * std::abs(sys_.entropy(field.values[k]));
  const double tol = 1e-12 * std::max(e2, scale);
  ++checks_;
  if (H < 0.5 * sys_.beta0() * e2 - tol || H > 0.5 * sys_.beta1() * e2 + tol) ++failures_;
  if (sys_.beta0() == sys_.beta1()) {
    const double dev = std::abs(H - 0.5 * sys_.beta0() * e2) / std::max(1.0, std::max(e2, scale));
    max_dev_ = std::max(max_dev_, dev);
  }
}

double cone_l2_error(const Mesh& mesh, const Trajectory& tr, const ReferenceSolution& ref,
                     QuadratureRule rule, const ConeSpec& cone) {
  if (static_cast<int>(tr.snapshots.size()) != tr.n_steps + 1)
    throw ValidationError("cone_l2_error: trajectory must hold every step (record_every = 1)");
  double err = 0.0;
  for (int n = 0; n < tr.n_steps; ++n) {
    const StateField& f = tr.snapshots[static_cast<std::size_t>(n)];
    const auto means = reference_cell_means(mesh, ref, f.time, rule);
    const auto in = cells_in_ball(mesh, cone.center, cone.radius_at(f.time));
    err += tr.dt * cell_l2_error_sq(mesh, f, means, in);
  }
  return err;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("rate fit: h values must be distinct");
  return sxy / sxx;
}

double fit_rate(const ConvergenceTable& table) {
  if (table.rows.size() < 3) throw ValidationError("rate fit: need at least 3 rows");
  std::vector<double> x, y;
  for (const ConvergenceRow& r : table.rows) {
    if (!(r.h > 0.0) || !(r.err_l2 > 0.0))
      throw ValidationError("rate fit: h and err_l2 must be positive");
    x.push_back(std::log(r.h));
    y.push_back(std::log(r.err_l2));
  }
  return least_squares_slope(x, y);
}

WbvScaling wbv_scaling_report(const ConvergenceTable& table) {
  WbvScaling w;
  std::vector<double> l1, sq;
  for (const ConvergenceRow& r : table.rows) {
    l1.push_back(r.wbv_l1 * std::sqrt(r.h));
    sq.push_back(r.wbv_sq);
  }
  for (double x : l1) w.sup_wbv_l1_sqrt_h = std::max(w.sup_wbv_l1_sqrt_h, x);
  for (double x : sq) w.sup_wbv_sq = std::max(w.sup_wbv_sq, x);
  w.wbv_sq_max_over_min = spread(sq);
  w.wbv_l1_sqrt_h_last_over_first = last_over_first(l1);
  w.wbv_sq_last_over_first = last_over_first(sq);
  w.l1_bounded = w.wbv_l1_sqrt_h_last_over_first <= 1.5;
  w.sq_bounded = w.wbv_sq_last_over_first <= 1.5;
  return w;
}

MeasureScaling measure_scaling_report(const ConvergenceTable& table) {
  MeasureScaling s;
  std::vector<double> a, b, c, d;
  for (const ConvergenceRow& r : table.rows) {
    a.push_back(r.mu0 / r.h);
    b.push_back(r.mu_bar0 / r.h);
    c.push_back(r.mu_t / std::sqrt(r.h));
    d.push_back(r.mu_bar_t / std::sqrt(r.h));
  }
  s.mu0_over_h_ratio = spread(a);
  s.mu_bar0_over_h_ratio = spread(b);
  s.mu_t_last_over_first = last_over_first(c);
  s.mu_bar_t_last_over_first = last_over_first(d);
  s.pass = s.mu0_over_h_ratio < 2.0 && s.mu_bar0_over_h_ratio < 2.0 &&
           s.mu_t_last_over_first <= 1.5 && s.mu_bar_t_last_over_first <= 1.5;
  return s;
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::string out = "h,dt,err_l2,wbv_l1,wbv_sq,mu0,mu_t\n";
  for (const ConvergenceRow& r : table.rows)
    out += g17(r.h) + "," + g17(r.dt) + "," + g17(r.err_l2) + "," + g17(r.wbv_l1) + "," +
           g17(r.wbv_sq) + "," + g17(r.mu0) + "," + g17(r.mu_t) + "\n";
  out += "# rate_fit=" + g17(table.fitted_rate) + "\n";
  return out;
}

}  // namespace hypflux
