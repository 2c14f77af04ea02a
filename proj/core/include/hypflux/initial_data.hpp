#pragma once

#include "hypflux/types.hpp"

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace hypflux {

/// Catalog initial datum u0: periodic, Lipschitz, evaluated pointwise.
class InitialData {
 public:
  virtual ~InitialData() = default;
  virtual std::string kind() const = 0;
  virtual int m() const = 0;
  virtual State value(const Vec2& x) const = 0;
  /// d u0 / d x_alpha
  virtual State derivative(const Vec2& x, int alpha) const = 0;
  /// Componentwise range [lo, hi] over the domain.
  virtual std::pair<State, State> range() const = 0;
  /// Bound on |grad u0| (Frobenius over components and directions).
  virtual double lipschitz() const = 0;
};

using InitialDataPtr = std::shared_ptr<const InitialData>;

/// Named parameters as parsed from the [initial] config section.
using ParamMap = std::map<std::string, std::vector<double>>;

/// kind: constant | sine | gaussian-bump | shallow-water-smooth-wave
InitialDataPtr make_initial_data(const std::string& kind, const ParamMap& params,
                                 const std::vector<double>& domain);

}  // namespace hypflux
