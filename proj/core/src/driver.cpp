#include "hypflux/driver.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>
#include <tuple>

namespace hypflux {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Vec2 to_vec2(const std::vector<double>& v) {
  Vec2 p = Vec2::Zero();
  for (std::size_t i = 0; i < v.size() && i < 2; ++i) p[static_cast<Eigen::Index>(i)] = v[i];
  return p;
}

State to_state(const std::vector<double>& v) {
  State s(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) s[static_cast<Eigen::Index>(i)] = v[i];
  return s;
}

std::vector<double> to_vector(const State& s) { return {s.data(), s.data() + s.size()}; }

StateMatrix friedrichs_matrix(const Config& c) {
  const int m = c.components();
  StateMatrix A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = c.matrix[static_cast<std::size_t>(i * m + j)];
  return A;
}

json num(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed for " + p.string());
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

AdmissibleSet derive_omega(const Config& c, const InitialData& u0) {
  if (!c.omega_lower.empty()) return AdmissibleSet::box(to_state(c.omega_lower), to_state(c.omega_upper));
  if (c.problem == "shallow_water1d") {
    State lo(2), hi(2);
    lo << c.h_min, -c.q_max;
    hi << c.h_max, c.q_max;
    AdmissibleSet s = AdmissibleSet::box(lo, hi);
    s.kind = AdmissibleSet::Kind::PositivityConstrained;
    return s;
  }
  if (c.problem == "friedrichs1d") {
    Eigen::SelfAdjointEigenSolver<StateMatrix> es(friedrichs_matrix(c));
    const StateMatrix R = es.eigenvectors();
    const int m = c.components();
    State wlo = State::Constant(m, std::numeric_limits<double>::infinity());
    State whi = State::Constant(m, -std::numeric_limits<double>::infinity());
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const State w = R.transpose() * u0.value(Vec2(c.length[0] * i / n, 0.0));
      wlo = wlo.cwiseMin(w);
      whi = whi.cwiseMax(w);
    }
    const AdmissibleSet cb = AdmissibleSet::box_from_range(wlo, whi, c.omega_inflation);
    State lo = State::Constant(m, std::numeric_limits<double>::infinity());
    State hi = State::Constant(m, -std::numeric_limits<double>::infinity());
    for (const State& corner : cb.corners()) {
      const State u = R * corner;
      lo = lo.cwiseMin(u);
      hi = hi.cwiseMax(u);
    }
    return AdmissibleSet::box(lo, hi);
  }
  const auto [lo, hi] = u0.range();
  return AdmissibleSet::box_from_range(lo, hi, c.omega_inflation);
}

Problem build_problem(const Config& cfg, int cells, int workers) {
  Problem p;
  p.config = cfg;
  if (cells > 0) {
    p.config.cells = cells;
    if (p.config.cells_y != 0) p.config.cells_y = cells;
  }
  const Config& c = p.config;
  const int d = c.dim();
  const int nx = c.cells;
  const int ny = c.cells_y ? c.cells_y : c.cells;
  if (d == 1) {
    p.mesh = build_uniform_1d(nx, c.length[0]);
  } else if (c.mesh_kind == "perturbed") {
    p.mesh = build_perturbed_quad_2d(nx, ny, c.length[0], c.length[1], c.jitter, c.seed);
  } else {
    p.mesh = build_uniform_quad_2d(nx, ny, c.length[0], c.length[1]);
  }
  p.u0 = make_initial_data(c.initial_kind, c.initial_params, c.length);
  if (p.u0->m() != c.components())
    throw ValidationError("[initial] data has " + std::to_string(p.u0->m()) +
                          " components, the system needs " + std::to_string(c.components()));
  AdmissibleSet om = derive_omega(c, *p.u0);
  if (c.problem == "advection1d" || c.problem == "advection2d") {
    p.sys = make_advection(d, c.speed, om);
  } else if (c.problem == "burgers1d") {
    p.sys = make_burgers(om);
  } else if (c.problem == "friedrichs1d") {
    p.sys = make_friedrichs({friedrichs_matrix(c)}, om);
  } else {
    p.sys = make_shallow_water_1d(c.gravity, om.lower[0], om.upper[0],
                                  std::max(std::abs(om.lower[1]), std::abs(om.upper[1])));
  }
  p.scheme = make_scheme(c.flux, p.sys, c.flux_speed);

  p.run.final_time = c.final_time;
  p.run.cfl_mode = cfl_mode_from_string(c.cfl);
  p.run.zeta = c.zeta;
  p.run.record_every = c.record_every;
  p.run.check_admissibility = c.check_admissibility;
  p.run.quadrature = quadrature_from_string(c.quadrature);
  p.run.workers = std::max(1, workers);
  validate(p.run);

  std::string ref = c.reference;
  if (ref == "auto") ref = c.problem == "shallow_water1d" && c.initial_kind != "constant" ? "fine" : "exact";
  if (ref == "exact") {
    if (c.initial_kind == "constant") {
      p.ref = exact_advection(Vec2::Zero(), p.u0, c.length);
    } else if (c.problem == "advection1d" || c.problem == "advection2d") {
      p.ref = exact_advection(to_vec2(c.speed), p.u0, c.length);
    } else if (c.problem == "friedrichs1d") {
      p.ref = exact_friedrichs(friedrichs_matrix(c), p.u0, c.length);
    } else if (c.problem == "burgers1d") {
      p.ref = exact_burgers(p.u0, c.length);
    } else {
      throw ValidationError("[run] reference: no closed-form solution for " + c.problem);
    }
  } else if (ref == "fine") {
    if (c.mesh_kind == "perturbed") throw ValidationError("[run] reference: fine grids need a uniform mesh");
    const int f = c.fine_factor;
    Mesh fine = d == 1 ? build_uniform_1d(nx * f, c.length[0])
                       : build_uniform_quad_2d(nx * f, ny * f, c.length[0], c.length[1]);
    auto u0 = p.u0;
    RunConfig rc = p.run;
    p.ref = fine_grid_reference(fine, *p.scheme, [u0](const Vec2& x) { return u0->value(x); }, rc, f);
  }
  if (p.ref && c.final_time > p.ref->valid_until())
    throw ValidationError("[time] final_time " + g17(c.final_time) +
                          " exceeds the reference horizon " + g17(p.ref->valid_until()));
  p.cone.center = to_vec2(c.center);
  p.cone.r = c.radius;
  p.cone.final_time = c.final_time;
  p.cone.lf = p.sys->lf();
  return p;
}

bool RunOutcome::pass() const {
  for (const auto& [k, v] : flags)
    if (!v) return false;
  return !flags.empty();
}

RunOutcome execute(const Problem& p) {
  RunOutcome r;
  const SystemModel& sys = *p.sys;
  const auto u0 = p.u0;
  InitialFunction f0 = [u0](const Vec2& x) { return u0->value(x); };
  r.time_step = compute_dt(p.mesh, *p.scheme, p.run);
  const double dt = r.time_step.dt;
  const int N = r.time_step.n_steps;
  const auto ball = cells_in_ball(p.mesh, p.cone.center, p.cone.r);
  std::unique_ptr<ConeErrorAccumulator> acc;
  if (p.ref) acc = std::make_unique<ConeErrorAccumulator>(p.mesh, sys, p.ref, p.run.quadrature, p.cone);
  bool admissible = true;
  State mass0;
  double mass_scale = 0.0;
  double min_first = std::numeric_limits<double>::infinity();
  auto scan = [&](const StateField& f) {
    for (const State& u : f.values) {
      if (!sys.omega_contains(u)) admissible = false;
      min_first = std::min(min_first, u[0]);
    }
  };

  RunHooks hooks;
  hooks.on_initial = [&](const StateField& f) {
    std::tie(r.ledger.mu0_mass, r.ledger.mu_bar0_mass) =
        initial_measure_masses(p.mesh, sys, f0, f, ball);
    mass0 = total_mass(p.mesh, f);
    for (std::size_t k = 0; k < f.values.size(); ++k)
      mass_scale += p.mesh.cells()[k].volume * f.values[k].norm();
    scan(f);
    if (acc) acc->observe(f, dt, N > 0);
  };
  hooks.on_step = [&](int n, const StateField& a, const StateField& b,
                      const std::vector<InterfaceFluxRecord>& rec) {
    accumulate_step(r.ledger, p.mesh, *p.scheme, a, b, rec, dt, ball);
    scan(b);
    if (acc) acc->observe(b, dt, n + 1 < N);
    const double drift = (total_mass(p.mesh, b) - mass0).norm() / std::max(mass_scale, 1e-300);
    r.mass_drift = std::max(r.mass_drift, drift);
  };
  Trajectory tr = run(p.mesh, *p.scheme, f0, p.run, hooks);
  r.snapshots = std::move(tr.snapshots);
  r.snapshot_steps = std::move(tr.snapshot_steps);
  r.min_first_component = min_first;

  const DiagnosticsLedger& L = r.ledger;
  r.flags["admissible"] = admissible;
  r.flags["entropy_inequality"] = L.entropy_residual_normalized_max <= 1e-10;
  r.flags["dissipation_gap"] = L.gap_failures == 0;
  r.flags["conservation"] = r.mass_drift <= 1e-12;
  r.flags["cauchy_schwarz"] = L.cauchy_schwarz_holds();
  if (acc) {
    r.cone_error = acc->cone_error();
    r.bracket_checks = acc->bracket_checks();
    r.bracket_failures = acc->bracket_failures();
    r.equality_deviation = acc->max_equality_deviation();
    r.ledger.rel_entropy_series = acc->series();
    r.flags["relative_entropy_bracket"] = r.bracket_failures == 0;
    if (sys.beta0() == sys.beta1())
      r.flags["relative_entropy_equality"] = r.equality_deviation <= 1e-12;
  }
  return r;
}

std::string metadata_json(const Problem& p, const RunOutcome& r) {
  const SystemModel& sys = *p.sys;
  json j;
  j["system"] = sys.name();
  j["problem"] = p.config.problem;
  j["scheme"] = p.scheme->name();
  j["lambda_star"] = p.scheme->lambda_star();
  if (auto rs = std::dynamic_pointer_cast<const RusanovFlux>(p.scheme)) j["rusanov_speed"] = rs->speed();
  j["dim"] = p.mesh.dim();
  j["m"] = sys.m();
  j["cells"] = p.mesh.num_cells();
  j["mesh_id"] = p.mesh.id_hex();
  j["h"] = p.mesh.h();
  j["a"] = p.mesh.a();
  j["dt"] = r.time_step.dt;
  j["dt_cfl"] = r.time_step.dt_cfl;
  j["n_steps"] = r.time_step.n_steps;
  j["final_time"] = p.run.final_time;
  j["cfl_mode"] = to_string(p.run.cfl_mode);
  j["zeta"] = p.run.zeta;
  j["quadrature"] = to_string(p.run.quadrature);
  j["beta0"] = sys.beta0();
  j["beta1"] = sys.beta1();
  j["lf"] = sys.lf();
  j["seed"] = p.config.seed;
  j["omega"] = {{"kind", to_string(sys.omega().kind)},
                {"lower", to_vector(sys.omega().lower)},
                {"upper", to_vector(sys.omega().upper)}};
  j["cone"] = {{"center", p.config.center}, {"radius", p.cone.r}};
  if (p.ref)
    j["reference"] = {{"kind", p.ref->kind()},
                      {"numerical", p.ref->numerical()},
                      {"valid_until", num(p.ref->valid_until())},
                      {"lipschitz_bound", num(p.ref->lipschitz_bound())}};
  else
    j["reference"] = nullptr;
  return j.dump(2) + "\n";
}

namespace {

json ledger_object(const RunOutcome& r, bool with_series) {
  const DiagnosticsLedger& L = r.ledger;
  json j;
  j["wbv_sq"] = L.wbv_sq;
  j["wbv_l1"] = L.wbv_l1;
  j["entropy_flux_bv"] = L.entropy_flux_bv;
  j["interface_measure"] = L.interface_measure;
  j["time_bv_u"] = L.time_bv_u;
  j["time_bv_eta"] = L.time_bv_eta;
  j["entropy_residual_max"] = L.entropy_residual_max;
  j["entropy_residual_normalized_max"] = L.entropy_residual_normalized_max;
  j["mu0_mass"] = L.mu0_mass;
  j["mu_t_mass"] = L.mu_t_mass;
  j["mu_bar0_mass"] = L.mu_bar0_mass;
  j["mu_bar_t_mass"] = L.mu_bar_t_mass;
  j["interfaces_checked"] = L.interfaces_checked;
  j["gap_failures"] = L.gap_failures;
  j["min_gap_margin"] = L.min_gap_margin;
  j["steps"] = L.steps;
  if (with_series) {
    json s = json::array();
    for (const auto& [t, h] : L.rel_entropy_series) s.push_back({t, h});
    j["rel_entropy_series"] = std::move(s);
  }
  return j;
}

}  // namespace

std::string ledger_json(const RunOutcome& r) { return ledger_object(r, true).dump(2) + "\n"; }

std::string report_json(const Problem& p, const RunOutcome& r) {
  json j;
  j["metadata"] = json::parse(metadata_json(p, r));
  j["ledger"] = ledger_object(r, false);
  j["errors"] = {{"cone_l2_error", r.cone_error},
                 {"err_l2", std::sqrt(r.cone_error)},
                 {"bracket_checks", r.bracket_checks},
                 {"bracket_failures", r.bracket_failures},
                 {"equality_deviation", r.equality_deviation},
                 {"mass_drift", r.mass_drift},
                 {"min_first_component", r.min_first_component}};
  j["flags"] = r.flags;
  j["pass"] = r.pass();
  return j.dump(2) + "\n";
}

std::string snapshot_csv(const Mesh& mesh, const StateField& f) {
  std::string out = "cell_id,x";
  if (mesh.dim() == 2) out += ",y";
  const Eigen::Index m = f.values.empty() ? 0 : f.values[0].size();
  for (Eigen::Index i = 0; i < m; ++i) out += ",u" + std::to_string(i);
  out += "\n";
  for (const Cell& c : mesh.cells()) {
    out += std::to_string(c.id) + "," + g17(c.centroid.x());
    if (mesh.dim() == 2) out += "," + g17(c.centroid.y());
    const State& u = f.values[static_cast<std::size_t>(c.id)];
    for (Eigen::Index i = 0; i < m; ++i) out += "," + g17(u[i]);
    out += "\n";
  }
  return out;
}

void write_run_outputs(const Problem& p, const RunOutcome& r, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  write_file(root / "metadata.json", metadata_json(p, r));
  write_file(root / "ledger.json", ledger_json(r));
  write_file(root / "report.json", report_json(p, r));
  if (p.config.write_snapshots) {
    const fs::path sd = root / "snapshots";
    fs::create_directories(sd);
    for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
      char name[48];
      std::snprintf(name, sizeof name, "snapshot_%08d.csv", r.snapshot_steps[i]);
      write_file(sd / name, snapshot_csv(p.mesh, r.snapshots[i]));
    }
  }
}

StudyOutcome execute_study(const Config& cfg, int jobs) {
  std::vector<int> levels = cfg.levels;
  std::sort(levels.begin(), levels.end());
  const std::size_t nl = levels.size();
  std::vector<RunOutcome> outs(nl);
  std::vector<Problem> probs(nl);
  std::vector<std::exception_ptr> errs(nl);
  const int parallel = std::max(1, std::min<int>(jobs, static_cast<int>(nl)));
  const int inner = parallel > 1 ? 1 : std::max(1, jobs);
  auto work = [&](std::size_t i) {
    try {
      probs[i] = build_problem(cfg, levels[i], inner);
      outs[i] = execute(probs[i]);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  };
  if (parallel <= 1) {
    for (std::size_t i = 0; i < nl; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < parallel; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < nl; i = next++) work(i);
      });
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < nl; ++i)
    if (errs[i]) std::rethrow_exception(errs[i]);

  StudyOutcome s;
  for (std::size_t i = 0; i < nl; ++i) {
    ConvergenceRow row;
    row.h = probs[i].mesh.h();
    row.dt = outs[i].time_step.dt;
    row.err_l2 = std::sqrt(outs[i].cone_error);
    row.wbv_l1 = outs[i].ledger.wbv_l1;
    row.wbv_sq = outs[i].ledger.wbv_sq;
    row.mu0 = outs[i].ledger.mu0_mass;
    row.mu_t = outs[i].ledger.mu_t_mass;
    row.mu_bar0 = outs[i].ledger.mu_bar0_mass;
    row.mu_bar_t = outs[i].ledger.mu_bar_t_mass;
    s.table.rows.push_back(row);
  }
  bool rate_ok = true;
  try {
    s.table.fitted_rate = fit_rate(s.table);
  } catch (const ValidationError&) {
    s.table.fitted_rate = std::numeric_limits<double>::quiet_NaN();
    rate_ok = false;
  }
  s.wbv = wbv_scaling_report(s.table);
  s.measures = measure_scaling_report(s.table);
  bool runs_ok = true;
  for (const RunOutcome& o : outs) runs_ok = runs_ok && o.pass();
  s.pass = rate_ok && s.table.fitted_rate >= 0.25 && s.wbv.l1_bounded && s.wbv.sq_bounded &&
           s.measures.pass && runs_ok;
  s.runs = std::move(outs);
  s.problems = std::move(probs);
  return s;
}

std::string study_report_json(const Config& cfg, const StudyOutcome& s) {
  json j;
  j["problem"] = cfg.problem;
  j["flux"] = cfg.flux;
  std::vector<int> levels = cfg.levels;
  std::sort(levels.begin(), levels.end());
  j["levels"] = levels;
  json rows = json::array();
  for (std::size_t i = 0; i < s.table.rows.size(); ++i) {
    const ConvergenceRow& r = s.table.rows[i];
    rows.push_back({{"cells", levels[i]},
                    {"h", r.h},
                    {"dt", r.dt},
                    {"err_l2", r.err_l2},
                    {"wbv_l1", r.wbv_l1},
                    {"wbv_sq", r.wbv_sq},
                    {"mu0", r.mu0},
                    {"mu_t", r.mu_t},
                    {"mu_bar0", r.mu_bar0},
                    {"mu_bar_t", r.mu_bar_t},
                    {"pass", s.runs[i].pass()}});
  }
  j["rows"] = std::move(rows);
  j["fitted_rate"] = num(s.table.fitted_rate);
  j["wbv_scaling"] = {{"sup_wbv_l1_sqrt_h", s.wbv.sup_wbv_l1_sqrt_h},
                      {"sup_wbv_sq", s.wbv.sup_wbv_sq},
                      {"wbv_sq_max_over_min", num(s.wbv.wbv_sq_max_over_min)},
                      {"wbv_l1_sqrt_h_last_over_first", num(s.wbv.wbv_l1_sqrt_h_last_over_first)},
                      {"wbv_sq_last_over_first", num(s.wbv.wbv_sq_last_over_first)},
                      {"l1_bounded", s.wbv.l1_bounded},
                      {"sq_bounded", s.wbv.sq_bounded}};
  j["measure_scaling"] = {{"mu0_over_h_ratio", num(s.measures.mu0_over_h_ratio)},
                          {"mu_bar0_over_h_ratio", num(s.measures.mu_bar0_over_h_ratio)},
                          {"mu_t_over_sqrt_h_last_over_first", num(s.measures.mu_t_last_over_first)},
                          {"mu_bar_t_over_sqrt_h_last_over_first",
                           num(s.measures.mu_bar_t_last_over_first)},
                          {"pass", s.measures.pass}};
  j["pass"] = s.pass;
  return j.dump(2) + "\n";
}

namespace {

int classify(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return kExitParse;
  if (dynamic_cast<const ValidationError*>(&e)) return kExitValidation;
  return kExitRuntime;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    const int code = classify(e);
    const char* label = code == kExitParse ? "parse error" : code == kExitValidation ? "invalid config" : "runtime error";
    std::cerr << "hypflux: " << label << ": " << e.what() << "\n";
    return code;
  }
}

}  // namespace

int validate_only(const std::string& path) {
  return guarded([&] {
    const Config c = load_config(path);
    validate_config(c, !c.levels.empty());
    std::cout << "ok: " << path << "\n";
    return static_cast<int>(kExitOk);
  });
}

int run_single(const std::string& path, const std::string& output_dir, int jobs) {
  return guarded([&] {
    Config c = load_config(path);
    validate_config(c, false);
    if (!output_dir.empty()) c.output_dir = output_dir;
    const Problem p = build_problem(c, 0, jobs);
    const RunOutcome r = execute(p);
    write_run_outputs(p, r, c.output_dir);
    for (const auto& [k, v] : r.flags) std::cout << (v ? "pass " : "FAIL ") << k << "\n";
    std::cout << "steps " << r.time_step.n_steps << "  dt " << g17(r.time_step.dt) << "  err_l2 "
              << g17(std::sqrt(r.cone_error)) << "\n";
    return static_cast<int>(r.pass() ? kExitOk : kExitInvariant);
  });
}

int run_study(const std::string& path, const std::string& output_dir, int jobs) {
  return guarded([&] {
    Config c = load_config(path);
    validate_config(c, true);
    if (!output_dir.empty()) c.output_dir = output_dir;
    const StudyOutcome s = execute_study(c, jobs);
    const fs::path root(c.output_dir);
    fs::create_directories(root);
    std::vector<int> levels = c.levels;
    std::sort(levels.begin(), levels.end());
    for (std::size_t i = 0; i < levels.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "level_%05d", levels[i]);
      write_run_outputs(s.problems[i], s.runs[i], (root / name).string());
    }
    write_file(root / "convergence.csv", convergence_csv(s.table));
    write_file(root / "study_report.json", study_report_json(c, s));
    std::cout << convergence_csv(s.table);
    std::cout << (s.pass ? "study pass" : "study FAIL") << "\n";
    return static_cast<int>(s.pass ? kExitOk : kExitInvariant);
  });
}

}  // namespace hypflux
