#pragma once

#include "hypflux/random.hpp"
#include "hypflux/types.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace hypflux {

struct AdmissibleSet {
  enum class Kind { Box, PositivityConstrained };

  Kind kind = Kind::Box;
  State lower;
  State upper;
  double rtol = 1e-12;

  static AdmissibleSet box(State lo, State hi);
  /// Box [lo, hi] widened by `inflate` times its width on each side.
  static AdmissibleSet box_from_range(const State& lo, const State& hi, double inflate);

  int m() const { return static_cast<int>(lower.size()); }
  bool contains(const State& u) const;
  /// All 2^m extreme points, in binary counting order.
  std::vector<State> corners() const;
  State sample(std::mt19937_64& rng) const;
};

std::string to_string(AdmissibleSet::Kind kind);

class SystemModel {
 public:
  virtual ~SystemModel() = default;

  virtual std::string name() const = 0;
  virtual int m() const = 0;
  virtual int d() const = 0;

  virtual State flux(const State& u, int alpha) const = 0;
  virtual StateMatrix flux_jacobian(const State& u, int alpha) const = 0;
  virtual double entropy(const State& u) const = 0;
  virtual State entropy_gradient(const State& u) const = 0;
  virtual StateMatrix entropy_hessian(const State& u) const = 0;
  virtual double entropy_flux(const State& u, int alpha) const = 0;
  /// Spectral radius of the directional Jacobian sum_alpha n_alpha Df_alpha(u).
  virtual double max_wave_speed(const State& u, const Vec2& n) const;
  /// Zeros of w -> d/dw (f(w).n) for scalar systems; empty when none are known.
  virtual std::vector<double> flux_critical_points(const Vec2& n) const;

  /// Whether eta, f and xi are defined at u (wider than Omega).
  virtual bool in_domain(const State& u) const { return u.allFinite(); }

  State flux_n(const State& u, const Vec2& n) const;
  double entropy_flux_n(const State& u, const Vec2& n) const;

  const AdmissibleSet& omega() const { return omega_; }
  bool omega_contains(const State& u) const { return omega_.contains(u); }
  double beta0() const { return beta0_; }
  double beta1() const { return beta1_; }
  double lf() const { return lf_; }
  void set_lf(double lf) { lf_ = lf; }

  /// Sample eigenvalues of the entropy Hessian over Omega and store the bounds.
  void estimate_betas(int samples, std::uint64_t seed);

 protected:
  explicit SystemModel(AdmissibleSet omega) : omega_(std::move(omega)) {}

  AdmissibleSet omega_;
  double beta0_ = 0.0;
  double beta1_ = 0.0;
  double lf_ = 0.0;
};

using SystemPtr = std::shared_ptr<SystemModel>;

/// eta(v) - eta(u) - Deta(u)(v - u)
double relative_entropy(const SystemModel& sys, const State& v, const State& u);
/// xi_a(v) - xi_a(u) - Deta(u)(f_a(v) - f_a(u))
double relative_entropy_flux(const SystemModel& sys, const State& v, const State& u, int alpha);
/// D2eta(u)(f_a(v) - f_a(u) - Df_a(u)(v - u))
State relative_z(const SystemModel& sys, const State& v, const State& u, int alpha);

/// Sampled sup of the entropy-weighted Rayleigh quotient; stored on sys.
double compute_lf(SystemModel& sys, int samples, std::uint64_t seed);

/// Sampled 1/2 sup|D2eta| sup|D2f_a| (second flux derivatives by finite differences).
double estimate_cz(const SystemModel& sys, int samples, std::uint64_t seed);

/// Sampled sup of max_wave_speed over Omega and unit directions.
double sampled_wave_speed(const SystemModel& sys, int samples, std::uint64_t seed);

SystemPtr make_advection(int d, const std::vector<double>& speed, AdmissibleSet omega);
SystemPtr make_burgers(AdmissibleSet omega);
SystemPtr make_friedrichs(const std::vector<StateMatrix>& a_list, AdmissibleSet omega);
SystemPtr make_shallow_water_1d(double g, double h_min, double h_max, double q_max);

inline constexpr int kDefaultSamples = 4096;
inline constexpr std::uint64_t kDefaultSeed = 20240611ULL;

}  // namespace hypflux
