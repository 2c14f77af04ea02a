#pragma once

#include "hypflux/initial_data.hpp"
#include "hypflux/solver.hpp"

#include <limits>
#include <memory>
#include <string>

namespace hypflux {

class ReferenceSolution {
 public:
  virtual ~ReferenceSolution() = default;
  virtual std::string kind() const = 0;
  virtual State eval(const Vec2& x, double t) const = 0;
  virtual double valid_until() const { return std::numeric_limits<double>::infinity(); }
  /// Over-estimate of |grad u| + |du/dt| on [0, valid_until].
  virtual double lipschitz_bound() const = 0;
  virtual bool numerical() const { return false; }
  /// Mean over cell k at time t with the given rule.
  virtual State cell_mean(const Mesh& mesh, int k, double t, QuadratureRule rule) const;
};

using ReferencePtr = std::shared_ptr<const ReferenceSolution>;

ReferencePtr exact_advection(const Vec2& speed, InitialDataPtr u0, std::vector<double> domain);
/// One space dimension; A symmetric.
ReferencePtr exact_friedrichs(const StateMatrix& A, InitialDataPtr u0, std::vector<double> domain);
ReferencePtr exact_burgers(InitialDataPtr u0, std::vector<double> domain);

/// Runs the scheme on fine_mesh and serves piecewise-constant lookups of that run.
/// factor is the per-axis refinement relative to the meshes it will be compared with.
ReferencePtr fine_grid_reference(const Mesh& fine_mesh, const FluxScheme& scheme,
                                 const InitialFunction& u0, const RunConfig& cfg, int factor,
                                 bool enforce_min_factor = true);

}  // namespace hypflux
