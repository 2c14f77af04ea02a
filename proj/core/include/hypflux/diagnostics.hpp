#pragma once

#include "hypflux/initial_data.hpp"
#include "hypflux/reference.hpp"
#include "hypflux/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hypflux {

/// Cells whose centroid lies within `radius` of `center` (periodic distance).
std::vector<char> cells_in_ball(const Mesh& mesh, const Vec2& center, double radius);

struct DiagnosticsLedger {
  // Interface sums run over both orientations (K,L) and (L,K).
  double wbv_sq = 0.0;
  double wbv_l1 = 0.0;
  double entropy_flux_bv = 0.0;
  double interface_measure = 0.0;  // sum_n dt sum |sigma|, for the Cauchy-Schwarz check
  double time_bv_u = 0.0;
  double time_bv_eta = 0.0;
  double entropy_residual_max = 0.0;             // positive part, raw
  double entropy_residual_normalized_max = 0.0;  // positive part over |K|/dt
  double mu0_mass = 0.0;
  double mu_t_mass = 0.0;
  double mu_bar0_mass = 0.0;
  double mu_bar_t_mass = 0.0;
  long long interfaces_checked = 0;
  long long gap_failures = 0;
  double min_gap_margin = 0.0;  // min over interfaces of gap - bound
  int steps = 0;
  std::vector<std::pair<double, double>> rel_entropy_series;

  bool cauchy_schwarz_holds() const;
};

/// Adds one step. ball marks the cells counted in the measure masses (empty: all).
void accumulate_step(DiagnosticsLedger& ledger, const Mesh& mesh, const FluxScheme& scheme,
                     const StateField& field_n, const StateField& field_np1,
                     const std::vector<InterfaceFluxRecord>& records, double dt,
                     const std::vector<char>& ball = {});

struct MeasureMasses {
  double mu0 = 0.0;
  double mu_t = 0.0;
  double mu_bar0 = 0.0;
  double mu_bar_t = 0.0;
};

/// mu0 and mu_bar0 from a composite Gauss rule on each cell in the ball.
std::pair<double, double> initial_measure_masses(const Mesh& mesh, const SystemModel& sys,
                                                 const InitialFunction& u0,
                                                 const StateField& field0,
                                                 const std::vector<char>& ball);

/// Needs every step in the trajectory (record_every = 1).
MeasureMasses measure_masses(const Mesh& mesh, const SystemModel& sys, const InitialFunction& u0,
                             const Trajectory& tr, const Vec2& center, double r);

/// sum_K |K| H(u_K, ref_K)
double relative_entropy_norm(const Mesh& mesh, const SystemModel& sys, const StateField& field,
                             const std::vector<State>& reference_means,
                             const std::vector<char>& mask = {});

/// sum_K |K| |u_K - ref_K|^2
double cell_l2_error_sq(const Mesh& mesh, const StateField& field,
                        const std::vector<State>& reference_means,
                        const std::vector<char>& mask = {});

std::vector<State> reference_cell_means(const Mesh& mesh, const ReferenceSolution& ref, double t,
                                        QuadratureRule rule);

struct ConeSpec {
  Vec2 center = Vec2::Zero();
  double r = 1.0;
  double final_time = 1.0;
  double lf = 0.0;
  double radius_at(double t) const { return r + lf * (final_time - t); }
};

/// Online version of the cone error: feed u^n for n = 0..N_T-1.
class ConeErrorAccumulator {
 public:
  ConeErrorAccumulator(const Mesh& mesh, const SystemModel& sys, ReferencePtr ref,
                       QuadratureRule rule, ConeSpec cone);

  /// Adds dt * sum_{cone} |K| |u^n - ref^n|^2 and checks the relative-entropy bracket.
  void observe(const StateField& field, double dt, bool integrate);

  double cone_error() const { return err_; }
  const std::vector<std::pair<double, double>>& series() const { return series_; }
  long long bracket_checks() const { return checks_; }
  long long bracket_failures() const { return failures_; }
  /// max |H - beta E^2/2| / scale when beta0 == beta1 (zero otherwise)
  double max_equality_deviation() const { return max_dev_; }

 private:
  const Mesh& mesh_;
  const SystemModel& sys_;
  ReferencePtr ref_;
  QuadratureRule rule_;
  ConeSpec cone_;
  double err_ = 0.0;
  std::vector<std::pair<double, double>> series_;
  long long checks_ = 0;
  long long failures_ = 0;
  double max_dev_ = 0.0;
};

/// sum_{n<N_T} dt sum_{K in cone(t^n)} |K| |u_K^n - ref_K(t^n)|^2; needs every step.
double cone_l2_error(const Mesh& mesh, const Trajectory& tr, const ReferenceSolution& ref,
                     QuadratureRule rule, const ConeSpec& cone);

struct ConvergenceRow {
  double h = 0.0;
  double dt = 0.0;
  double err_l2 = 0.0;  // square root of the cone error
  double wbv_l1 = 0.0;
  double wbv_sq = 0.0;
  double mu0 = 0.0;
  double mu_t = 0.0;
  double mu_bar0 = 0.0;
  double mu_bar_t = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // decreasing h
  double fitted_rate = 0.0;
};

/// Least-squares slope of log(err_l2) against log(h).
double fit_rate(const ConvergenceTable& table);
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

struct WbvScaling {
  double sup_wbv_l1_sqrt_h = 0.0;
  double sup_wbv_sq = 0.0;
  double wbv_sq_max_over_min = 0.0;
  double wbv_l1_sqrt_h_last_over_first = 0.0;
  double wbv_sq_last_over_first = 0.0;
  bool l1_bounded = false;  // last <= 1.5 first or decreasing
  bool sq_bounded = false;
};

WbvScaling wbv_scaling_report(const ConvergenceTable& table);

struct MeasureScaling {
  double mu0_over_h_ratio = 0.0;       // max/min across levels
  double mu_bar0_over_h_ratio = 0.0;
  double mu_t_last_over_first = 0.0;   // of mu_t / sqrt(h)
  double mu_bar_t_last_over_first = 0.0;
  bool pass = false;
};

MeasureScaling measure_scaling_report(const ConvergenceTable& table);

std::string convergence_csv(const ConvergenceTable& table);

}  // namespace hypflux
