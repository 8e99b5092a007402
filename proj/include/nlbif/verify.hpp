#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlbif/continuation.hpp"
#include "nlbif/hypotheses.hpp"
#include "nlbif/nonlocal.hpp"
#include "nlbif/potential.hpp"
#include "nlbif/spectral.hpp"
#include "nlbif/tolerances.hpp"

namespace nlbif {

using ordered_json = nlohmann::ordered_json;

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::fail;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  double runtime = 0.0;
  ordered_json details = ordered_json::object();

  bool passed() const { return status == CheckStatus::pass; }
};

struct VerificationReport {
  Level level = Level::full;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return !checks.empty();
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  ordered_json to_json(bool with_runtime = true) const {
    ordered_json j;
    j["tolerances_version"] = std::string(Tolerances::version);
    j["level"] = to_string(level);
    j["all_pass"] = all_pass();
    j["checks"] = ordered_json::array();
    for (const auto& c : checks) {
      ordered_json e;
      e["name"] = c.name;
      e["status"] = to_string(c.status);
      e["measured"] = c.measured;
      e["expected"] = c.expected;
      e["tolerance"] = c.tolerance;
      if (with_runtime) e["runtime"] = c.runtime;
      e["details"] = c.details;
      j["checks"].push_back(std::move(e));
    }
    return j;
  }
};

/// Names of the eight acceptance checks, in report order.
inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"eigenvalue_oracle", "decay_constant", "branch_oracle",
                                              "dichotomy",         "lambda_identity", "phi_properties",
                                              "decay_laws",        "numerics_hygiene"};
  return names;
}

namespace verify_detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline ProblemSpec on_level_grid(ProblemSpec spec, int cells) {
  spec.grid.cells = cells;
  return spec;
}

/// Discretization, eigenpair and (lazily) a branch to 2 lambda_1 for one instance.
struct Instance {
  Discretization d;
  EigenPair eig;
  double setup_seconds = 0.0;
  std::optional<Branch> branch;
  double branch_seconds = 0.0;

  explicit Instance(const ProblemSpec& spec) : d(spec) {
    const auto t0 = Clock::now();
    eig = principal_eigenpair(d);
    setup_seconds = seconds_since(t0);
  }

  const Branch& continued(const Tolerances& tol) {
    if (!branch) {
      const auto t0 = Clock::now();
      ContinuationOptions opt;
      opt.lambda_max = 2.0 * eig.lambda1;
      opt.ds = tol.branch_ds;
      branch = branch_continue(d, eig, opt);
      branch_seconds = seconds_since(t0);
    }
    return *branch;
  }

  /// m_gamma = sum w P phi1^gamma; the rank-one amplitude is ((lambda - lambda1) / m_gamma)^{1/gamma}.
  double rank_one_mass() const {
    return d.grid().weights.dot(d.P().cwiseProduct(eig.phi1.values.array().pow(d.gamma()).matrix()));
  }
};

inline CheckResult make_check(const std::string& name, double measured, double expected, double tolerance, bool ok) {
  CheckResult c;
  c.name = name;
  c.measured = measured;
  c.expected = expected;
  c.tolerance = tolerance;
  c.status = ok ? CheckStatus::pass : CheckStatus::fail;
  return c;
}

/// Positive seeds: profiles phi1, e^{-r/L}, (1 + (r/L)^2)^{-1} and (1 + r/L)^{-1} with random amplitude and length.
inline std::vector<Field> positive_seeds(const Discretization& d, const EigenPair& eig, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> log_amp(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> length(0.5, 5.0);
  std::vector<Field> out;
  const Vector& r = d.grid().nodes;
  for (int k = 0; k < count; ++k) {
    const double a = std::exp(log_amp(rng));
    const double L = length(rng);
    Vector v(r.size());
    switch (k % 4) {
      case 0: v = eig.phi1.values; break;
      case 1: v = (-r.array() / L).exp().matrix(); break;
      case 2: v = (1.0 + (r.array() / L).square()).inverse().matrix(); break;
      default: v = (1.0 + r.array() / L).inverse().matrix(); break;
    }
    out.push_back(d.field(a * v));
  }
  return out;
}

inline double sup_rel(const Vector& a, const Vector& b) {
  const double s = b.cwiseAbs().maxCoeff();
  return (a - b).cwiseAbs().maxCoeff() / (s > 0.0 ? s : 1.0);
}

/// Least-squares slope of log y against log x.
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace verify_detail

/// Runs the eight acceptance checks. `configs` must contain the analytic instance and the gamma = 1 rank-one
/// instance; every other instance joins the identity, phi-property, decay and Jacobian checks.
inline VerificationReport run_suite(const std::vector<ProblemSpec>& configs, Level level,
                                    const Tolerances& tol_in = Tolerances{}, bool override_level_grid = true) {
  using namespace verify_detail;
  Tolerances tol = tol_in;
  if (override_level_grid) tol.cells = default_tolerances(level).cells;

  const ProblemSpec* analytic = nullptr;
  const ProblemSpec* rank1 = nullptr;
  const ProblemSpec* rank1_slope = nullptr;
  std::vector<const ProblemSpec*> others;
  for (const auto& c : configs) {
    if (c.oracle == OracleKind::analytic_eigen && !analytic) analytic = &c;
    else if (c.oracle == OracleKind::rank_one && c.gamma == 1.0 && !rank1) rank1 = &c;
    else if (c.oracle == OracleKind::rank_one && c.gamma == tol.slope_gammas[1] && !rank1_slope) rank1_slope = &c;
    else others.push_back(&c);
  }
  if (!analytic) throw MissingFixture("verification needs the analytic eigenvalue instance");
  if (!rank1) throw MissingFixture("verification needs the gamma = 1 rank-one instance");

  VerificationReport rep;
  rep.level = level;
  const int M = tol.cells;

  // 1. principal eigenvalue against N(N-2)
  auto t0 = Clock::now();
  Instance an(on_level_grid(*analytic, M));
  const double an_seconds = seconds_since(t0);
  {
    const double exact = analytic_lambda1(an.d.dim());
    const double err = std::abs(an.eig.lambda1 - exact) / exact;
    const Vector phi_exact = an.d.grid().sample(analytic_eigenfunction(an.d.dim()));
    auto c = make_check("eigenvalue_oracle", an.eig.lambda1, exact, tol.eigen_rel * exact,
                        err <= tol.eigen_rel && an_seconds < tol.eigen_seconds);
    c.runtime = an_seconds;
    c.details = {{"relative_error", err},
                 {"eigenfunction_sup_error", sup_rel(an.eig.phi1.values, phi_exact)},
                 {"residual", an.eig.residual},
                 {"iterations", an.eig.iterations},
                 {"lambda2", an.eig.lambda2},
                 {"decay_floor", an.eig.decay_floor},
                 {"cells", M},
                 {"runtime_limit", tol.eigen_seconds}};
    rep.checks.push_back(std::move(c));
  }

  // 2. decay constant of the Newtonian potential of P = e^{-r}, N = 3
  {
    t0 = Clock::now();
    const auto grid = std::make_shared<const RadialGrid>(build_grid(3, tol.r_max, M, tol.stretch));
    const Field F = Field::sample(grid, RadialFunction::builtin("exp"));
    const PotentialResult pot = radial_potential(F);
    const double err = std::abs(pot.decay_constant - tol.decay_expected) / tol.decay_expected;
    const Vector fv = DiscreteLaplacian(grid).solve(F.values);
    auto c = make_check("decay_constant", pot.decay_constant, tol.decay_expected, tol.decay_rel * tol.decay_expected,
                        err <= tol.decay_rel && !pot.tail_warning);
    c.runtime = seconds_since(t0);
    c.details = {{"relative_error", err},
                 {"plateau_window_start", tol.plateau_window * tol.r_max},
                 {"tail_mass_ratio", pot.tail_mass_ratio},
                 {"finite_volume_agreement", sup_rel(fv, pot.u.values)}};
    rep.checks.push_back(std::move(c));
  }

  // 3. rank-one branch against t(lambda) = (lambda - lambda1) / m
  Instance r1(on_level_grid(*rank1, M));
  std::vector<std::pair<std::string, const Branch*>> branches;
  {
    const Branch& br = r1.continued(tol);
    branches.emplace_back(r1.d.spec().name, &br);
    const double lam1 = r1.eig.lambda1;
    const double m = r1.rank_one_mass();
    const double m_exact = r1.d.dim() == 3 ? 4.0 * std::numbers::pi / 3.0 : std::numeric_limits<double>::quiet_NaN();
    const double lam1_exact = analytic_lambda1(r1.d.dim());
    double worst = 0.0, worst_exact = 0.0;
    int compared = 0;
    bool all_positive = true;
    for (const auto& p : br.points) {
      if (!(p.lambda > lam1) || p.lambda > 2.0 * lam1 * (1.0 + 1e-12)) continue;
      const double t = (p.lambda - lam1) / m;
      worst = std::max(worst, std::abs(p.sup_norm - t) / t);
      if (p.lambda >= 1.1 * lam1_exact) {
        const double te = (p.lambda - lam1_exact) / m_exact;
        worst_exact = std::max(worst_exact, std::abs(p.sup_norm - te) / te);
      }
      all_positive = all_positive && p.positive;
      ++compared;
    }
    const bool reached = br.termination == Termination::max_lambda;
    auto c = make_check("branch_oracle", worst, 0.0, tol.branch_rel,
                        compared > 0 && reached && all_positive && worst <= tol.branch_rel &&
                            r1.branch_seconds < tol.branch_seconds);
    c.runtime = r1.branch_seconds;
    c.details = {{"points", compared},
                 {"termination", to_string(br.termination)},
                 {"last_lambda", br.points.empty() ? 0.0 : br.points.back().lambda},
                 {"lambda1", lam1},
                 {"m", m},
                 {"all_positive", all_positive},
                 {"error_vs_exact_constants_beyond_1.1_lambda1", worst_exact},
                 {"runtime_limit", tol.branch_seconds}};
    rep.checks.push_back(std::move(c));
  }

  // 4. no positive solution below lambda1, a positive one above
  {
    t0 = Clock::now();
    const auto seeds = positive_seeds(r1.d, r1.eig, tol.dichotomy_seeds, tol.seed);
    const NewtonOptions nopt;
    double worst_below = 0.0;
    bool below_ok = true, above_ok = true;
    ordered_json rows = ordered_json::array();
    for (double fac : tol.below) {
      int trivial = 0;
      for (const auto& s : seeds) {
        const NewtonResult res = newton_solve(fac * r1.eig.lambda1, s, r1.d, nopt);
        worst_below = std::max(worst_below, res.point.sup_norm);
        if (res.status == NewtonStatus::trivial && res.point.sup_norm < tol.trivial_sup) ++trivial;
      }
      below_ok = below_ok && trivial == static_cast<int>(seeds.size());
      rows.push_back({{"factor", fac}, {"trivial", trivial}, {"seeds", seeds.size()}});
    }
    for (double fac : tol.above) {
      int positive = 0;
      double amp = 0.0;
      for (const auto& s : seeds) {
        const NewtonResult res = newton_solve(fac * r1.eig.lambda1, s, r1.d, nopt);
        if (res.status == NewtonStatus::positive && res.point.positive) {
          ++positive;
          amp = res.point.sup_norm;
        }
      }
      above_ok = above_ok && positive > 0;
      rows.push_back({{"factor", fac}, {"positive", positive}, {"seeds", seeds.size()}, {"amplitude", amp}});
    }
    auto c = make_check("dichotomy", worst_below, 0.0, tol.trivial_sup, below_ok && above_ok);
    c.runtime = seconds_since(t0);
    c.details = {{"sweeps", rows}};
    rep.checks.push_back(std::move(c));
  }

  // Branches for the slope instance and every extra instance.
  std::optional<Instance> slope_inst;
  {
    ProblemSpec s = rank1_slope ? *rank1_slope : make_rank_one_instance(rank1->dim, tol.slope_gammas[1]);
    s.grid.r_max = rank1->grid.r_max;
    s.grid.stretch = rank1->grid.stretch;
    slope_inst.emplace(on_level_grid(s, M));
    branches.emplace_back(slope_inst->d.spec().name, &slope_inst->continued(tol));
  }
  std::vector<std::unique_ptr<Instance>> extra;
  for (const ProblemSpec* s : others) {
    extra.push_back(std::make_unique<Instance>(on_level_grid(*s, M)));
    branches.emplace_back(s->name, &extra.back()->continued(tol));
  }

  // 5. lambda - lambda1 = <phi_u u, phi1> / <f u, phi1> on every accepted point
  {
    t0 = Clock::now();
    double worst = 0.0;
    std::size_t count = 0;
    ordered_json per = ordered_json::object();
    for (const auto& [name, br] : branches) {
      double w = 0.0;
      for (const auto& p : br->points) {
        w = std::max(w, std::isfinite(p.identity_residual) ? p.identity_residual : INFINITY);
        ++count;
      }
      per[name] = {{"points", br->points.size()}, {"max_residual", w}};
      worst = std::max(worst, w);
    }
    auto c = make_check("lambda_identity", worst, 0.0, tol.identity_rel, count > 0 && worst <= tol.identity_rel);
    c.runtime = seconds_since(t0);
    c.details = per;
    rep.checks.push_back(std::move(c));
  }

  std::vector<Instance*> all{&an, &r1, &*slope_inst};
  for (auto& e : extra) all.push_back(e.get());

  // 6. phi-property suite
  {
    t0 = Clock::now();
    int failures = 0;
    ordered_json per = ordered_json::object();
    for (Instance* in : all) {
      const Discretization& d = in->d;
      std::vector<Field> samples{in->eig.phi1, d.sample(RadialFunction::builtin("exp")),
                                 d.sample(RadialFunction::builtin("gaussian", 3.0))};
      const Vector& r = d.grid().nodes;
      samples.push_back(d.field((r.array().cos() / (1.0 + r.array())).matrix()));
      if (in->branch && !in->branch->points.empty()) samples.push_back(in->branch->points.back().u);
      const PropertyReport pr = check_phi_properties(d, samples);
      ordered_json list = ordered_json::array();
      for (const auto& pc : pr.checks) {
        if (pc.status == CheckStatus::fail) ++failures;
        list.push_back({{"name", pc.name}, {"status", to_string(pc.status)}, {"measured", pc.measured},
                        {"limit", pc.limit}});
      }
      const HypothesisReport hr = validate_hypotheses(d);
      ordered_json hyp = ordered_json::object();
      for (const auto& h : hr.results) hyp[h.name] = to_string(h.status);
      per[d.spec().name] = {{"properties", list}, {"hypotheses", hyp}, {"M", hr.bound_M}};
    }
    auto c = make_check("phi_properties", failures, 0.0, 0.0, failures == 0);
    c.runtime = seconds_since(t0);
    c.details = per;
    rep.checks.push_back(std::move(c));
  }

  // 7. r^{N-2} u plateau and the pointwise potential decay bound
  {
    t0 = Clock::now();
    double worst_var = 0.0, worst_ratio = 0.0;
    std::size_t fields = 0;
    ordered_json per = ordered_json::object();
    for (Instance* in : all) {
      const Discretization& d = in->d;
      double var = plateau_variation(in->eig.phi1, tol.plateau_window), ratio = 0.0;
      ++fields;
      if (in->branch) {
        for (const auto& p : in->branch->points) {
          if (!p.positive) continue;
          var = std::max(var, plateau_variation(p.u, tol.plateau_window));
          const Field F = d.laplacian().apply(p.u);
          ratio = std::max(ratio, decay_bound_ratio(p.u, certify_bound(F, d.P()), d.p_mass()));
          ++fields;
        }
      }
      per[d.spec().name] = {{"plateau_variation", var}, {"decay_bound_ratio", ratio}};
      worst_var = std::max(worst_var, var);
      worst_ratio = std::max(worst_ratio, ratio);
    }
    const auto grid = std::make_shared<const RadialGrid>(build_grid(3, tol.r_max, M, tol.stretch));
    const Field F = Field::sample(grid, RadialFunction::builtin("exp"));
    const double exp_ratio = decay_bound_ratio(radial_potential(F).u, certify_bound(F, F.values), radial_mass(F));
    worst_ratio = std::max(worst_ratio, exp_ratio);
    per["exp_potential"] = {{"decay_bound_ratio", exp_ratio}};
    auto c = make_check("decay_laws", worst_var, 0.0, tol.plateau_rel,
                        worst_var < tol.plateau_rel && worst_ratio <= 1.0 + tol.decay_bound_slack);
    c.runtime = seconds_since(t0);
    c.details = {{"fields", fields}, {"max_decay_bound_ratio", worst_ratio}, {"instances", per}};
    rep.checks.push_back(std::move(c));
  }

  // 8. Jacobian, grid convergence, self-adjointness of S, amplitude exponent
  {
    t0 = Clock::now();
    std::mt19937 rng(tol.seed + 1);
    std::normal_distribution<double> normal;
    ordered_json det = ordered_json::object();
    double score = 0.0;
    auto record = [&](const std::string& key, double value, double limit, ordered_json extra_info = {}) {
      ordered_json e = {{"measured", value}, {"limit", limit}};
      if (!extra_info.is_null()) e["info"] = std::move(extra_info);
      det[key] = std::move(e);
      score = std::max(score, std::isfinite(value) ? value / limit : INFINITY);
    };

    double jac = 0.0, jac_solve = 0.0;
    for (Instance* in : all) {
      if (!in->branch || in->branch->points.empty()) continue;
      const Discretization& d = in->d;
      const BranchPoint& p = in->branch->points[in->branch->points.size() / 2];
      const Vector& u = p.u.values;
      Vector v = Vector::NullaryExpr(u.size(), [&] { return normal(rng); }).cwiseProduct(u);
      v /= v.cwiseAbs().maxCoeff();
      const double h = tol.jacobian_h;
      const Vector Jv = jacobian_apply(p.lambda, u, v, d);
      const Vector fd = (residual(p.lambda, d.field(u + h * v), d).values -
                         residual(p.lambda, d.field(u - h * v), d).values) / (2.0 * h);
      jac = std::max(jac, sup_rel(fd, Jv));
      const JacobianSolver js(p.lambda, u, d);
      jac_solve = std::max(jac_solve, sup_rel(jacobian_apply(p.lambda, u, js.solve(v), d), v));
    }
    record("jacobian_fd", jac, tol.jacobian_rel);
    record("jacobian_solve", jac_solve, tol.jacobian_rel);

    {
      const double exact = analytic_lambda1(an.d.dim());
      double errs[3];
      const int cells[3] = {M / 4, M / 2, M};
      for (int k = 0; k < 3; ++k) {
        if (cells[k] == M) {
          errs[k] = an.eig.lambda1 - exact;
        } else {
          ProblemSpec s = an.d.spec();
          s.grid.cells = cells[k];
          errs[k] = principal_eigenpair(Discretization(s)).lambda1 - exact;
        }
      }
      const double coarse = errs[0] / errs[1], fine = errs[1] / errs[2];
      const double dev = std::max(std::abs(coarse - tol.richardson_ratio), std::abs(fine - tol.richardson_ratio));
      record("richardson_ratio_deviation", dev, tol.richardson_spread,
             {{"ratio_coarse", coarse}, {"ratio_fine", fine}, {"cells", {cells[0], cells[1], cells[2]}}});
    }

    {
      double worst = 0.0;
      for (Instance* in : all) {
        const Discretization& d = in->d;
        for (int k = 0; k < tol.self_adjoint_pairs; ++k) {
          const Field a = d.field(Vector::NullaryExpr(d.grid().size(), [&] { return normal(rng); }));
          const Field b = d.field(Vector::NullaryExpr(d.grid().size(), [&] { return normal(rng); }));
          const Vector Sa = apply_S(a, d).values, Sb = apply_S(b, d).values;
          const double lhs = d.f_inner(Sa, b.values), rhs = d.f_inner(a.values, Sb);
          const double scale = std::sqrt(d.f_inner(Sa, Sa) * d.f_inner(b.values, b.values));
          worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
      }
      record("self_adjoint", worst, tol.self_adjoint);
    }

    {
      ordered_json info = ordered_json::object();
      double worst = 0.0;
      for (Instance* in : {&r1, &*slope_inst}) {
        const Branch& br = *in->branch;
        const double lam1 = in->eig.lambda1;
        double gmin = INFINITY;
        for (const auto& p : br.points)
          if (p.lambda > lam1) gmin = std::min(gmin, p.lambda - lam1);
        std::vector<double> gaps, amps;
        for (const auto& p : br.points)
          if (p.lambda > lam1 && p.lambda - lam1 <= 10.0 * gmin * (1.0 + 1e-12)) {
            gaps.push_back(p.lambda - lam1);
            amps.push_back(p.sup_norm);
          }
        const double expected = 1.0 / in->d.gamma();
        const double slope = gaps.size() >= 3 ? log_slope(gaps, amps) : std::numeric_limits<double>::quiet_NaN();
        const double rel = std::abs(slope - expected) / expected;
        worst = std::max(worst, std::isfinite(rel) ? rel : INFINITY);
        info[in->d.spec().name] = {{"gamma", in->d.gamma()}, {"slope", slope}, {"expected", expected},
                                   {"points", gaps.size()}};
      }
      record("amplitude_exponent", worst, tol.slope_rel, info);
    }

    auto c = make_check("numerics_hygiene", score, 0.0, 1.0, score <= 1.0);
    c.runtime = seconds_since(t0);
    c.details = det;
    rep.checks.push_back(std::move(c));
  }

  return rep;
}

}  // namespace nlbif
