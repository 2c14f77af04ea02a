#include "hypflux/initial_data.hpp"

#include <algorithm>
#include <cmath>

namespace hypflux {

namespace {

const double kTwoPi = 2.0 * std::acos(-1.0);

std::vector<double> get(const ParamMap& p, const std::string& key, std::vector<double> dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

State to_state(const std::vector<double>& v) {
  State s(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) s[static_cast<Eigen::Index>(i)] = v[i];
  return s;
}

void check_m(std::size_t m, const char* what) {
  if (m < 1 || m > static_cast<std::size_t>(kMaxComponents))
    throw ValidationError(std::string(what) + ": need 1..4 components");
}

class Constant final : public InitialData {
 public:
  explicit Constant(State v) : v_(std::move(v)) {}
  std::string kind() const override { return "constant"; }
  int m() const override { return static_cast<int>(v_.size()); }
  State value(const Vec2&) const override { return v_; }
  State derivative(const Vec2&, int) const override { return State::Zero(v_.size()); }
  std::pair<State, State> range() const override { return {v_, v_}; }
  double lipschitz() const override { return 0.0; }

 private:
  State v_;
};

// u_i = offset_i + amplitude_i sin(k.x + phase_i), k_alpha = 2 pi wavenumber_alpha / L_alpha
class Sine final : public InitialData {
 public:
  Sine(State offset, State amp, State phase, Vec2 k)
      : off_(std::move(offset)), amp_(std::move(amp)), ph_(std::move(phase)), k_(k) {}
  std::string kind() const override { return "sine"; }
  int m() const override { return static_cast<int>(off_.size()); }
  State value(const Vec2& x) const override {
    State r(off_.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = off_[i] + amp_[i] * std::sin(k_.dot(x) + ph_[i]);
    return r;
  }
  State derivative(const Vec2& x, int a) const override {
    State r(off_.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = amp_[i] * k_[a] * std::cos(k_.dot(x) + ph_[i]);
    return r;
  }
  std::pair<State, State> range() const override {
    return {off_ - amp_.cwiseAbs(), off_ + amp_.cwiseAbs()};
  }
  double lipschitz() const override { return amp_.norm() * k_.norm(); }

 private:
  State off_, amp_, ph_;
  Vec2 k_;
};

class GaussianBump final : public InitialData {
 public:
  GaussianBump(State offset, State amp, Vec2 center, double width, std::vector<double> domain)
      : off_(std::move(offset)), amp_(std::move(amp)), c_(center), w_(width), dom_(std::move(domain)) {}
  std::string kind() const override { return "gaussian-bump"; }
  int m() const override { return static_cast<int>(off_.size()); }
  State value(const Vec2& x) const override {
    const Vec2 r = offset_vec(x);
    return off_ + amp_ * std::exp(-r.squaredNorm() / (2 * w_ * w_));
  }
  State derivative(const Vec2& x, int a) const override {
    const Vec2 r = offset_vec(x);
    const double e = std::exp(-r.squaredNorm() / (2 * w_ * w_));
    return amp_ * (-r[a] / (w_ * w_) * e);
  }
  std::pair<State, State> range() const override {
    return {off_ + amp_.cwiseMin(0.0), off_ + amp_.cwiseMax(0.0)};
  }
  // max of |r| exp(-r^2/2w^2)/w^2 is exp(-1/2)/w
  double lipschitz() const override { return amp_.norm() * std::exp(-0.5) / w_; }

 private:
  Vec2 offset_vec(const Vec2& x) const {
    Vec2 r = Vec2::Zero();
    for (std::size_t a = 0; a < dom_.size(); ++a) {
      const double L = dom_[a];
      double d = x[static_cast<Eigen::Index>(a)] - c_[static_cast<Eigen::Index>(a)];
      d -= L * std::round(d / L);
      r[static_cast<Eigen::Index>(a)] = d;
    }
    return r;
  }
  State off_, amp_;
  Vec2 c_;
  double w_;
  std::vector<double> dom_;
};

// h = h0 + a sin(2 pi x / L), q = h u
class SmoothWave final : public InitialData {
 public:
  SmoothWave(double h0, double a, double u, double L) : h0_(h0), a_(a), u_(u), k_(kTwoPi / L) {}
  std::string kind() const override { return "shallow-water-smooth-wave"; }
  int m() const override { return 2; }
  State value(const Vec2& x) const override {
    const double h = h0_ + a_ * std::sin(k_ * x[0]);
    State r(2);
    r << h, h * u_;
    return r;
  }
  State derivative(const Vec2& x, int a) const override {
    State r = State::Zero(2);
    if (a != 0) return r;
    const double dh = a_ * k_ * std::cos(k_ * x[0]);
    r << dh, dh * u_;
    return r;
  }
  std::pair<State, State> range() const override {
    const double hl = h0_ - std::abs(a_), hh = h0_ + std::abs(a_);
    State lo(2), hi(2);
    lo << hl, std::min(hl * u_, hh * u_);
    hi << hh, std::max(hl * u_, hh * u_);
    return {lo, hi};
  }
  double lipschitz() const override { return std::abs(a_) * k_ * std::sqrt(1 + u_ * u_); }

 private:
  double h0_, a_, u_, k_;
};

}  // namespace

InitialDataPtr make_initial_data(const std::string& kind, const ParamMap& p,
                                 const std::vector<double>& domain) {
  if (kind == "constant") {
    const auto v = get(p, "value", {0.0});
    check_m(v.size(), "constant");
    return std::make_shared<Constant>(to_state(v));
  }
  if (kind == "sine") {
    const auto off = get(p, "offset", {0.0});
    check_m(off.size(), "sine");
    const auto amp = get(p, "amplitude", std::vector<double>(off.size(), 1.0));
    const auto ph = get(p, "phase", std::vector<double>(off.size(), 0.0));
    if (amp.size() != off.size() || ph.size() != off.size())
      throw ValidationError("sine: offset, amplitude and phase need equal lengths");
    const auto wn = get(p, "wavenumber", std::vector<double>(domain.size(), 1.0));
    if (wn.size() != domain.size()) throw ValidationError("sine: wavenumber needs one entry per axis");
    Vec2 k = Vec2::Zero();
    for (std::size_t a = 0; a < domain.size(); ++a)
      k[static_cast<Eigen::Index>(a)] = kTwoPi * wn[a] / domain[a];
    return std::make_shared<Sine>(to_state(off), to_state(amp), to_state(ph), k);
  }
  if (kind == "gaussian-bump") {
    const auto off = get(p, "offset", {0.0});
    check_m(off.size(), "gaussian-bump");
    const auto amp = get(p, "amplitude", std::vector<double>(off.size(), 1.0));
    if (amp.size() != off.size()) throw ValidationError("gaussian-bump: amplitude length mismatch");
    std::vector<double> mid;
    for (double L : domain) mid.push_back(0.5 * L);
    const auto c = get(p, "center", mid);
    if (c.size() != domain.size()) throw ValidationError("gaussian-bump: center needs one entry per axis");
    const double w = get(p, "width", {0.1}).at(0);
    if (!(w > 0.0)) throw ValidationError("gaussian-bump: width must be positive");
    Vec2 cv = Vec2::Zero();
    for (std::size_t a = 0; a < c.size(); ++a) cv[static_cast<Eigen::Index>(a)] = c[a];
    return std::make_shared<GaussianBump>(to_state(off), to_state(amp), cv, w, domain);
  }
  if (kind == "shallow-water-smooth-wave") {
    if (domain.size() != 1) throw ValidationError("shallow-water-smooth-wave is one-dimensional");
    const double h0 = get(p, "h0", {1.0}).at(0);
    const double a = get(p, "amplitude", {0.2}).at(0);
    const double u = get(p, "velocity", {0.0}).at(0);
    if (!(h0 - std::abs(a) > 0.0)) throw ValidationError("shallow-water-smooth-wave: height must stay positive");
    return std::make_shared<SmoothWave>(h0, a, u, domain[0]);
  }
  throw ValidationError("unknown initial data '" + kind + "'");
}

}  // namespace hypflux
