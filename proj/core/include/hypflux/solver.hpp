#pragma once

#include "hypflux/mesh.hpp"
#include "hypflux/numflux.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hypflux {

struct StateField {
  std::vector<State> values;
  double time = 0.0;
  std::uint64_t mesh_id = 0;
};

enum class CflMode { Standard, Strengthened };

std::string to_string(CflMode mode);
CflMode cfl_mode_from_string(const std::string& name);

struct RunConfig {
  double final_time = 1.0;
  CflMode cfl_mode = CflMode::Strengthened;
  double zeta = 0.1;
  int record_every = 1;
  bool check_admissibility = true;
  QuadratureRule quadrature = QuadratureRule::Midpoint;
  int workers = 1;
};

/// Throws ValidationError when a field is out of range.
void validate(const RunConfig& cfg);

struct TimeStep {
  double dt_cfl = 0.0;  // before fitting to the final time
  double dt = 0.0;      // T / n_steps
  int n_steps = 0;
};

using InitialFunction = std::function<State(const Vec2&)>;

StateField project_initial(const Mesh& mesh, const SystemModel& sys, const InitialFunction& u0,
                           QuadratureRule rule);

/// CFL step only, no fitting to T.
double cfl_time_step(const Mesh& mesh, const FluxScheme& scheme, CflMode mode, double zeta);
TimeStep compute_dt(const Mesh& mesh, const FluxScheme& scheme, const RunConfig& cfg);

/// One explicit update. Fills records (indexed by interface id) when non-null.
StateField step(const Mesh& mesh, const FluxScheme& scheme, const StateField& field, double dt,
                bool check_admissibility, int step_index,
                std::vector<InterfaceFluxRecord>* records = nullptr, int workers = 1);

struct Trajectory {
  std::vector<StateField> snapshots;
  std::vector<int> snapshot_steps;
  double dt = 0.0;
  int n_steps = 0;
};

struct RunHooks {
  std::function<void(const StateField&)> on_initial;
  /// (n, u^n, u^{n+1}, records of step n)
  std::function<void(int, const StateField&, const StateField&,
                     const std::vector<InterfaceFluxRecord>&)>
      on_step;
};

Trajectory run(const Mesh& mesh, const FluxScheme& scheme, const InitialFunction& u0,
               const RunConfig& cfg, const RunHooks& hooks = {});

/// sum_K |K| u_K
State total_mass(const Mesh& mesh, const StateField& field);

}  // namespace hypflux
