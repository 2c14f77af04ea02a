// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "hypflux/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace hypflux;
namespace fs = std::filesystem;

namespace {

const std::string kConfigDir = std::string(HYPFLUX_SOURCE_DIR) + "/configs/";
constexpr int kSamples = 10000;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

void report(int id, const std::string& title, const Verdict& v, int& failures) {
  std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.str().c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

Vec2 random_normal(std::mt19937_64& rng, int d) {
  if (d == 1) return Vec2(unit_draw(rng) < 0.5 ? -1.0 : 1.0, 0.0);
  const double th = uniform_in(rng, 0.0, 2.0 * std::acos(-1.0));
  return Vec2(std::cos(th), std::sin(th));
}

struct NamedRun {
  std::string label;
  const Problem* problem;
  const RunOutcome* outcome;
};

struct Pair {
  std::string label;
  SchemePtr scheme;
};

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).generic_string()] = ss.str();
  }
  return out;
}

int invoke(const std::string& sub, const std::string& config, const fs::path& out, int jobs) {
  const std::string cmd = std::string("\"") + HYPFLUX_BINARY + "\" " + sub + " \"" + config +
                          "\" --output-dir \"" + out.string() + "\" --jobs " +
                          std::to_string(jobs) + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

int main() {
  const int jobs = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  int failures = 0;

  const Config rus_cfg = load_config(kConfigDir + "burgers1d_study.ini");
  const Config god_cfg = load_config(kConfigDir + "burgers1d_godunov_study.ini");
  const Config adv_cfg = load_config(kConfigDir + "advection1d_study.ini");
  const StudyOutcome rus = execute_study(rus_cfg, jobs);
  const StudyOutcome god = execute_study(god_cfg, jobs);
  const StudyOutcome adv = execute_study(adv_cfg, jobs);

  std::vector<Problem> singles;
  for (const char* name : {"burgers1d.ini", "shallow_water1d.ini", "friedrichs1d.ini",
                           "advection2d_perturbed.ini", "constant.ini"}) {
    const Config c = load_config(kConfigDir + name);
    validate_config(c, false);
    singles.push_back(build_problem(c, 0, jobs));
  }
  std::vector<RunOutcome> single_out;
  for (const Problem& p : singles) single_out.push_back(execute(p));
  const Problem& sw = singles[1];
  const RunOutcome& sw_out = single_out[1];
  const RunOutcome& fr_out = single_out[2];

  std::vector<NamedRun> runs;
  auto add_study = [&](const std::string& tag, const StudyOutcome& s) {
    for (std::size_t i = 0; i < s.runs.size(); ++i)
      runs.push_back({tag + "/" + std::to_string(s.problems[i].mesh.num_cells()), &s.problems[i], &s.runs[i]});
  };
  add_study("burgers-rusanov", rus);
  add_study("burgers-godunov", god);
  add_study("advection-godunov", adv);
  for (std::size_t i = 0; i < singles.size(); ++i)
    runs.push_back({singles[i].config.problem + "/" + std::to_string(singles[i].mesh.num_cells()),
                    &singles[i], &single_out[i]});

  // (system, flux) pairs drawn from the acceptance problems
  const std::vector<const Problem*> sampled = {&rus.problems.back(), &adv.problems.back(), &singles[1], &singles[2], &singles[3]};
  std::vector<Pair> pairs;
  for (const Problem* p : sampled) {
    pairs.push_back({p->sys->name() + "/rusanov", p->scheme->name() == "rusanov" ? p->scheme : make_rusanov(p->sys, 0.0)});
    if (p->sys->m() == 1) pairs.push_back({p->sys->name() + "/godunov", make_godunov_scalar(p->sys)});
  }

  {
    Verdict v;
    v.pass = rus.table.fitted_rate >= 0.25;
    v.detail << "burgers rusanov rate " << fmt(rus.table.fitted_rate) << " (need >= 0.25), levels";
    for (const auto& r : rus.table.rows) v.detail << " " << fmt(r.h);
    report(1, "convergence rate", v, failures);
  }
  {
    Verdict v;
    bool below = god.table.rows.size() == rus.table.rows.size();
    v.detail << "godunov rate " << fmt(god.table.fitted_rate) << "; err godunov/rusanov";
    for (std::size_t i = 0; below && i < god.table.rows.size(); ++i) {
      below = below && god.table.rows[i].err_l2 <= rus.table.rows[i].err_l2;
      v.detail << " " << fmt(god.table.rows[i].err_l2 / rus.table.rows[i].err_l2);
    }
    v.pass = god.table.fitted_rate >= 0.25 && below;
    report(2, "godunov rate and error below rusanov", v, failures);
  }
  {
    Verdict v;
    const bool sq = rus.wbv.wbv_sq_max_over_min <= 2.0;
    const bool l1 = rus.wbv.wbv_l1_sqrt_h_last_over_first <= 1.5;
    v.pass = sq && l1;
    v.detail << "wbv_sq max/min " << fmt(rus.wbv.wbv_sq_max_over_min) << " (need <= 2)"
             << (sq ? "" : " FAILED") << "; wbv_l1*sqrt(h) last/first "
             << fmt(rus.wbv.wbv_l1_sqrt_h_last_over_first) << " (need <= 1.5)"
             << (l1 ? "" : " FAILED");
    report(3, "weak-BV bounds", v, failures);
  }
  {
    Verdict v;
    double worst = 0.0;
    std::string where;
    for (const NamedRun& r : runs) {
      const double x = r.outcome->ledger.entropy_residual_normalized_max;
      if (x >= worst) {
        worst = x;
        where = r.label;
      }
    }
    v.pass = worst <= 1e-10;
    v.detail << runs.size() << " runs, max residual/(|K|/dt) " << fmt(worst) << " (" << where
             << ", need <= 1e-10)";
    report(4, "discrete entropy inequality", v, failures);
  }
  {
    Verdict v;
    long long sample_fail = 0, run_fail = 0, run_checked = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const FluxScheme& s = *pairs[k].scheme;
      std::mt19937_64 rng(1000 + k);
      for (int i = 0; i < kSamples; ++i) {
        const State u = s.system().omega().sample(rng);
        const State w = s.system().omega().sample(rng);
        if (!dissipation_gap_check(s, u, w, random_normal(rng, s.system().d())).pass) ++sample_fail;
      }
    }
    for (const NamedRun& r : runs) {
      run_fail += r.outcome->ledger.gap_failures;
      run_checked += r.outcome->ledger.interfaces_checked;
    }
    v.pass = sample_fail == 0 && run_fail == 0;
    v.detail << pairs.size() << " pairs x " << kSamples << " samples, " << sample_fail
             << " failures; " << run_checked << " run interfaces, " << run_fail << " failures";
    report(5, "dissipation gap", v, failures);
  }
  {
    Verdict v;
    std::map<std::string, long long> bad;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const FluxScheme& s = *pairs[k].scheme;
      const SystemModel& sys = s.system();
      std::mt19937_64 rng(2000 + k);
      for (int i = 0; i < kSamples; ++i) {
        const State u = sys.omega().sample(rng);
        const State w = sys.omega().sample(rng);
        const Vec2 n = random_normal(rng, sys.d());
        const FluxPair a = s.evaluate(u, w, n);
        const FluxPair b = s.evaluate(w, u, -n);
        const FluxPair c = s.evaluate(u, u, n);
        if ((a.g + b.g).cwiseAbs().maxCoeff() > 1e-14) ++bad["conservation"];
        if ((c.g - sys.flux_n(u, n)).cwiseAbs().maxCoeff() > 1e-14) ++bad["consistency"];
        if (std::abs(a.xi + b.xi) > 1e-14) ++bad["entropy-conservation"];
        if (std::abs(c.xi - sys.entropy_flux_n(u, n)) > 1e-12) ++bad["entropy-consistency"];
        for (int f : {1, 2, 10})
          if (!interfacial_entropy_check(s, u, w, n, f * s.lambda_star()).pass)
            ++bad["entropy-ineq@" + std::to_string(f) + "l*"];
      }
    }
    long long total = 0;
    for (const auto& [k, n] : bad) total += n;
    v.pass = total == 0;
    v.detail << pairs.size() << " pairs x " << kSamples << " samples, " << total << " failures";
    for (const auto& [k, n] : bad) v.detail << " " << k << "=" << n;
    report(6, "flux axioms", v, failures);
  }
  {
    Verdict v;
    const double h_min = sw.config.h_min;
    const bool run_ok = sw_out.min_first_component >= h_min && sw_out.flags.at("admissible");
    long long fails = 0, nonpositive = 0;
    std::mt19937_64 rng(3000);
    const FluxScheme& s = *sw.scheme;
    for (int i = 0; i < kSamples; ++i) {
      const State u = s.system().omega().sample(rng);
      const State w = s.system().omega().sample(rng);
      const Vec2 n = random_normal(rng, 1);
      if (!omega_stability_check(s, u, w, n, s.lambda_star())) ++fails;
      const State shifted = u - (s.flux(u, w, n) - s.system().flux_n(u, n)) / s.lambda_star();
      if (!(shifted[0] > 0.0)) ++nonpositive;
    }
    v.pass = run_ok && fails == 0;
    v.detail << "run min h " << fmt(sw_out.min_first_component) << " (h_min " << fmt(h_min) << ")"
             << (run_ok ? "" : " FAILED") << "; sampled shifted states outside Omega " << fails
             << "/" << kSamples << (fails ? " FAILED" : "") << "; with h <= 0 " << nonpositive
             << "/" << kSamples;
    report(7, "invariant domain", v, failures);
  }
  {
    Verdict v;
    long long checks = 0, fails = 0;
    for (const NamedRun& r : runs) {
      checks += r.outcome->bracket_checks;
      fails += r.outcome->bracket_failures;
    }
    const double dev = fr_out.equality_deviation;
    const bool eq = fr_out.flags.count("relative_entropy_equality") && dev <= 1e-12;
    v.pass = fails == 0 && eq && checks > 0;
    v.detail << checks << " snapshot checks, " << fails << " outside the bracket; friedrichs equality deviation "
             << fmt(dev) << " (need <= 1e-12)";
    report(8, "relative entropy bracket", v, failures);
  }
  {
    Verdict v;
    const MeasureScaling& m = rus.measures;
    v.pass = m.pass;
    v.detail << "mu0/h spread " << fmt(m.mu0_over_h_ratio) << ", mu_bar0/h spread "
             << fmt(m.mu_bar0_over_h_ratio) << " (need < 2); mu_t/sqrt(h) last/first "
             << fmt(m.mu_t_last_over_first) << ", mu_bar_t/sqrt(h) last/first "
             << fmt(m.mu_bar_t_last_over_first) << " (need <= 1.5)";
    report(9, "measure mass scalings", v, failures);
  }
  {
    Verdict v;
    long long fails = 0;
    int systems = 0;
    for (const Problem* p : sampled) {
      const SystemModel& sys = *p->sys;
      ++systems;
      std::mt19937_64 rng(4000 + systems);
      for (int i = 0; i < kSamples; ++i) {
        const State u = sys.omega().sample(rng);
        const State w = sys.omega().sample(rng);
        const double H = relative_entropy(sys, w, u);
        for (int a = 0; a < sys.d(); ++a)
          if (std::abs(relative_entropy_flux(sys, w, u, a)) > 1.01 * sys.lf() * H + 1e-12) ++fails;
      }
    }
    v.pass = fails == 0;
    v.detail << systems << " systems x " << kSamples << " samples, " << fails << " failures";
    report(10, "finite speed bound", v, failures);
  }
  {
    Verdict v;
    const fs::path root = fs::temp_directory_path() / ("hypflux_acceptance_" + std::to_string(std::random_device{}()));
    int compared = 0, mismatched = 0, errors = 0;
    struct Job {
      std::string sub, config;
    };
    const std::vector<Job> jobs_list = {{"run", kConfigDir + "burgers1d.ini"},
                                        {"run", kConfigDir + "advection2d_perturbed.ini"},
                                        {"study", kConfigDir + "burgers1d_study.ini"}};
    for (std::size_t k = 0; k < jobs_list.size(); ++k) {
      std::map<std::string, std::string> first;
      int variant = 0;
      for (int j : {1, 4, 4}) {
        const fs::path out = root / (std::to_string(k) + "_" + std::to_string(variant++));
        if (invoke(jobs_list[k].sub, jobs_list[k].config, out, j) != 0) ++errors;
        auto tree = read_tree(out);
        if (tree.empty()) ++errors;
        if (first.empty()) {
          first = std::move(tree);
          continue;
        }
        ++compared;
        if (tree != first) ++mismatched;
      }
    }
    fs::remove_all(root);
    v.pass = errors == 0 && mismatched == 0;
    v.detail << compared << " repeated outputs (jobs 1, 4, 4) across " << jobs_list.size()
             << " runs/studies, " << mismatched << " differ, " << errors << " invocation errors";
    report(11, "determinism", v, failures);
  }

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
