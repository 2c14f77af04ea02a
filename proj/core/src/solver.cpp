#include "hypflux/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace hypflux {

std::string to_string(CflMode mode) {
  return mode == CflMode::Standard ? "standard" : "strengthened";
}

CflMode cfl_mode_from_string(const std::string& name) {
  if (name == "standard") return CflMode::Standard;
  if (name == "strengthened") return CflMode::Strengthened;
  throw ValidationError("unknown cfl mode '" + name + "'");
}

void validate(const RunConfig& cfg) {
  if (!(cfg.final_time > 0.0) || !std::isfinite(cfg.final_time))
    throw ValidationError("final_time must be positive");
  if (!(cfg.zeta > 0.0 && cfg.zeta < 1.0)) throw ValidationError("zeta must lie in (0, 1)");
  if (cfg.record_every < 1) throw ValidationError("record_every must be at least 1");
  if (cfg.workers < 1) throw ValidationError("workers must be at least 1");
}

StateField project_initial(const Mesh& mesh, const SystemModel& sys, const InitialFunction& u0,
                           QuadratureRule rule) {
  StateField f;
  f.mesh_id = mesh.id();
  f.values.reserve(mesh.num_cells());
  for (const Cell& c : mesh.cells()) {
    State acc = State::Zero(sys.m());
    for (const QuadraturePoint& q : cell_quadrature(mesh, c.id, rule)) {
      const State v = u0(q.x);
      if (v.size() != sys.m())
        throw StructuralError("initial data has " + std::to_string(v.size()) +
                              " components, system expects " + std::to_string(sys.m()));
      acc += q.w * v;
    }
    acc /= c.volume;
    if (!sys.omega_contains(acc))
      throw AdmissibilityError("initial projection leaves the admissible set in cell " +
                               std::to_string(c.id));
    f.values.push_back(acc);
  }
  return f;
}

double cfl_time_step(const Mesh& mesh, const FluxScheme& scheme, CflMode mode, double zeta) {
  const double lam = scheme.lambda_star();
  const double a = mesh.a();
  const double h = mesh.h();
  if (!std::isfinite(lam) || !(lam > 0.0) || !(a > 0.0) || !(h > 0.0))
    throw ValidationError("time step: non-finite or nonpositive lambda*, a or h");
  double per_cell = std::numeric_limits<double>::infinity();
  for (const Cell& c : mesh.cells())
    per_cell = std::min(per_cell, c.volume / (lam * mesh.perimeter(c.id)));
  double dt = 0.0;
  if (mode == CflMode::Standard) {
    dt = a * a * h / lam;
  } else {
    const SystemModel& sys = scheme.system();
    dt = (sys.beta0() / sys.beta1()) * (a * a / lam) * (1.0 - zeta) * h;
  }
  dt = std::min(dt, per_cell);
  if (!std::isfinite(dt) || !(dt > 0.0)) throw ValidationError("time step: degenerate value");
  return dt;
}

TimeStep compute_dt(const Mesh& mesh, const FluxScheme& scheme, const RunConfig& cfg) {
  TimeStep t;
  t.dt_cfl = cfl_time_step(mesh, scheme, cfg.cfl_mode, cfg.zeta);
  const double n = std::ceil(cfg.final_time / t.dt_cfl * (1.0 - 1e-14));
  if (!(n < 1e9)) throw ValidationError("time step: too many steps");
  t.n_steps = std::max(1, static_cast<int>(n));
  t.dt = cfg.final_time / t.n_steps;
  // guard against the division landing one ulp above the CFL step
  while (t.dt > t.dt_cfl) {
    ++t.n_steps;
    t.dt = cfg.final_time / t.n_steps;
  }
  return t;
}

StateField step(const Mesh& mesh, const FluxScheme& scheme, const StateField& field, double dt,
                bool check_admissibility, int step_index,
                std::vector<InterfaceFluxRecord>* records, int workers) {
  if (field.values.size() != mesh.num_cells())
    throw StructuralError("step: field size does not match the mesh");
  const auto& ifs = mesh.interfaces();
  const std::size_t ni = ifs.size();
  std::vector<FluxPair> fluxes(ni);
  if (records) records->resize(ni);

  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      const Interface& f = ifs[s];
      const State& u = field.values[static_cast<std::size_t>(f.left)];
      const State& v = field.values[static_cast<std::size_t>(f.right)];
      fluxes[s] = scheme.evaluate(u, v, f.normal);
      if (records)
        (*records)[s] = make_interface_record(scheme, f.id, u, v, f.normal, fluxes[s]);
    }
  };
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), ni);
  if (nw <= 1) {
    work(0, ni);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (ni + nw - 1) / nw;
    for (std::size_t w = 0; w < nw; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(ni, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  const int m = scheme.system().m();
  std::vector<State> acc(mesh.num_cells(), State::Zero(m));
  for (std::size_t s = 0; s < ni; ++s) {
    const Interface& f = ifs[s];
    const State contrib = f.area * fluxes[s].g;
    acc[static_cast<std::size_t>(f.left)] += contrib;
    acc[static_cast<std::size_t>(f.right)] -= contrib;
  }
  StateField out;
  out.mesh_id = field.mesh_id;
  out.time = field.time + dt;
  out.values.resize(mesh.num_cells());
  const SystemModel& sys = scheme.system();
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    out.values[k] = field.values[k] - (dt / mesh.cells()[k].volume) * acc[k];
    if (check_admissibility && !sys.omega_contains(out.values[k])) {
      std::ostringstream os;
      os << "state left the admissible set in cell " << k << " at step " << step_index + 1;
      throw AdmissibilityError(os.str());
    }
  }
  return out;
}

Trajectory run(const Mesh& mesh, const FluxScheme& scheme, const InitialFunction& u0,
               const RunConfig& cfg, const RunHooks& hooks) {
  validate(cfg);
  const TimeStep ts = compute_dt(mesh, scheme, cfg);
  Trajectory tr;
  tr.dt = ts.dt;
  tr.n_steps = ts.n_steps;
  StateField cur = project_initial(mesh, scheme.system(), u0, cfg.quadrature);
  if (hooks.on_initial) hooks.on_initial(cur);
  tr.snapshots.push_back(cur);
  tr.snapshot_steps.push_back(0);
  std::vector<InterfaceFluxRecord> records;
  for (int n = 0; n < ts.n_steps; ++n) {
    StateField next = step(mesh, scheme, cur, ts.dt, cfg.check_admissibility, n,
                           hooks.on_step ? &records : nullptr, cfg.workers);
    next.time = (n + 1) * ts.dt;
    if (hooks.on_step) hooks.on_step(n, cur, next, records);
    cur = std::move(next);
    if ((n + 1) % cfg.record_every == 0 || n + 1 == ts.n_steps) {
      tr.snapshots.push_back(cur);
      tr.snapshot_steps.push_back(n + 1);
    }
  }
  return tr;
}

State total_mass(const Mesh& mesh, const StateField& field) {
  State s = State::Zero(field.values.empty() ? 1 : field.values[0].size());
  for (std::size_t k = 0; k < field.values.size(); ++k)
    s += mesh.cells()[k].volume * field.values[k];
  return s;
}

}  // namespace hypflux
