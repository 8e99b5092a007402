#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlbif/config.hpp"
#include "nlbif/continuation.hpp"
#include "nlbif/csv.hpp"
#include "nlbif/nonlocal.hpp"
#include "nlbif/potential.hpp"
#include "nlbif/spectral.hpp"
#include "nlbif/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace nlbif;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kUsage = 2;

struct Common {
  std::string config;
  int cells = 0;
  std::string out_dir;
};

fs::path output_dir(const Common& c) {
  fs::path dir = ".";
  if (const char* env = std::getenv("NLBIF_OUT_DIR"); env && *env) dir = env;
  if (!c.out_dir.empty()) dir = c.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  return dir;
}

fs::path in_dir(const fs::path& dir, const std::string& name) {
  const fs::path p = name;
  return p.is_absolute() ? p : dir / p;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

RunConfig load(const Common& c) {
  RunConfig cfg = load_config(c.config);
  if (c.cells > 0) cfg.problem.grid.cells = c.cells;
  return cfg;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "problem configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--cells", c.cells, "override the number of grid cells M");
  sub->add_option("--out-dir", c.out_dir, "output directory (default: $NLBIF_OUT_DIR or .)");
}

void write_field(const fs::path& p, const Field& u) {
  auto os = open_out(p);
  write_field_csv(os, u);
}

ordered_json point_json(const BranchPoint& p) {
  return {{"lambda", p.lambda},         {"supNorm", p.sup_norm}, {"D12norm", p.d12_norm},
          {"identityResidual", p.identity_residual}, {"positive", p.positive}, {"residual", p.residual}};
}

int run_eig(const Common& c, const std::string& phi1_file) {
  const RunConfig cfg = load(c);
  const Discretization d(cfg.problem);
  const EigenPair e = principal_eigenpair(d, cfg.solver.eigen);
  const fs::path dir = output_dir(c);
  write_field(in_dir(dir, phi1_file), e.phi1);
  ordered_json j = {{"instance", cfg.problem.name},  {"cells", d.grid().cells()},  {"lambda1", e.lambda1},
                    {"residual", e.residual},        {"lambda2", e.lambda2},       {"decayFloor", e.decay_floor},
                    {"iterations", e.iterations},    {"phi1", in_dir(dir, phi1_file).string()}};
  if (cfg.problem.oracle == OracleKind::analytic_eigen) j["lambda1Exact"] = analytic_lambda1(cfg.problem.dim);
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int run_phi(const Common& c, const std::string& u_file, const std::string& phi_file, const std::string& kernel_file) {
  const RunConfig cfg = load(c);
  const Discretization d(cfg.problem);
  const Field u = field_on_grid(read_field_csv(u_file), d.grid_ptr());
  const NonlocalField nf = phi_eval(u, d);
  const fs::path dir = output_dir(c);
  write_field(in_dir(dir, phi_file), nf.phi);
  if (!kernel_file.empty()) {
    auto os = open_out(in_dir(dir, kernel_file));
    write_matrix_csv(os, d.kernel().values());
  }
  const PropertyReport rep = check_phi_properties(d, {u});
  ordered_json checks = ordered_json::array();
  for (const auto& pc : rep.checks)
    checks.push_back({{"name", pc.name}, {"status", to_string(pc.status)}, {"measured", pc.measured}, {"limit", pc.limit}});
  const ordered_json j = {{"instance", cfg.problem.name}, {"M", d.kernel().bound()}, {"sourceNormGamma", nf.source_norm_gamma},
                          {"phiSup", nf.phi.values.cwiseAbs().maxCoeff()}, {"properties", checks},
                          {"allPass", rep.all_pass()}};
  std::cout << j.dump(2) << '\n';
  return rep.all_pass() ? kOk : kCheckFailure;
}

int run_potential(const Common& c, const std::string& F_file, const std::string& out_file) {
  const RunConfig cfg = load(c);
  const Discretization d(cfg.problem);
  const Field F = field_on_grid(read_field_csv(F_file), d.grid_ptr());
  const PotentialResult res = radial_potential(F);
  const fs::path dir = output_dir(c);
  write_field(in_dir(dir, out_file), res.u);
  const double c0 = certify_bound(F, d.P());
  const double ratio = decay_bound_ratio(res.u, c0, radial_mass(F.with_values(d.P())));
  const auto mono = check_monotone_positive(res, F);
  ordered_json j = {{"instance", cfg.problem.name}, {"decayConstant", res.decay_constant}, {"boundConstant", c0},
                    {"decayBoundRatio", ratio}, {"tailWarning", res.tail_warning}, {"tailMassRatio", res.tail_mass_ratio}};
  j["monotone"] = mono ? ordered_json(*mono) : ordered_json(nullptr);
  std::cout << j.dump(2) << '\n';
  return ratio <= 1.0 + 1e-9 && mono.value_or(true) ? kOk : kCheckFailure;
}

int run_solve(const Common& c, double lambda, const std::string& out_file) {
  const RunConfig cfg = load(c);
  const Discretization d(cfg.problem);
  const EigenPair e = principal_eigenpair(d, cfg.solver.eigen);
  const NewtonResult res = lambda_sweep(d, e, {lambda}, cfg.solver.newton).front();
  const fs::path dir = output_dir(c);
  write_field(in_dir(dir, out_file), res.point.u);
  ordered_json j = point_json(res.point);
  j["status"] = to_string(res.status);
  j["iterations"] = res.iterations;
  j["lambda1"] = e.lambda1;
  std::cout << j.dump(2) << '\n';
  const bool ok = res.status == NewtonStatus::positive || res.status == NewtonStatus::trivial;
  return ok ? kOk : kCheckFailure;
}

int run_branch(const Common& c, ContinuationOptions opt, const std::string& out_file, int snapshot_every) {
  const RunConfig cfg = load(c);
  const Discretization d(cfg.problem);
  const EigenPair e = principal_eigenpair(d, cfg.solver.eigen);
  opt.newton = cfg.solver.newton;
  const fs::path dir = output_dir(c);
  Branch br;
  try {
    br = branch_continue(d, e, opt);
  } catch (const SeedFailure& err) {
    std::cerr << "seed failure: " << err.what() << '\n';
    return kCheckFailure;
  }
  auto os = open_out(in_dir(dir, out_file));
  os << "lambda,supNorm,D12norm,identityResidual,positive\n";
  for (std::size_t k = 0; k < br.points.size(); ++k) {
    const auto& p = br.points[k];
    os << format_real(p.lambda) << ',' << format_real(p.sup_norm) << ',' << format_real(p.d12_norm) << ','
       << format_real(p.identity_residual) << ',' << (p.positive ? 1 : 0) << '\n';
    if (snapshot_every > 0 && k % static_cast<std::size_t>(snapshot_every) == 0) {
      char name[48];
      std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
      write_field(dir / name, p.u);
    }
  }
  const ordered_json j = {{"instance", cfg.problem.name},
                          {"lambda1", e.lambda1},
                          {"points", br.points.size()},
                          {"termination", to_string(br.termination)},
                          {"last", br.points.empty() ? ordered_json(nullptr) : point_json(br.points.back())},
                          {"csv", in_dir(dir, out_file).string()}};
  std::cout << j.dump(2) << '\n';
  return br.termination == Termination::step_failure ? kCheckFailure : kOk;
}

int run_verify(const std::vector<std::string>& configs, const std::string& level_name, const std::string& out,
               const std::string& out_dir) {
  std::vector<ProblemSpec> specs;
  if (configs.empty()) {
    specs = {make_analytic_instance(), make_rank_one_instance(), make_rank_one_instance(3, 1.5)};
  } else {
    for (const auto& path : configs) specs.push_back(load_config(path).problem);
  }
  const Level level = level_name == "full" ? Level::full : Level::fast;
  const VerificationReport rep = run_suite(specs, level);
  for (const auto& ck : rep.checks)
    std::cout << (ck.passed() ? "PASS " : "FAIL ") << ck.name << " measured=" << format_real(ck.measured)
              << " tolerance=" << format_real(ck.tolerance) << '\n';
  if (!out.empty()) {
    Common c;
    c.out_dir = out_dir;
    auto os = open_out(in_dir(output_dir(c), out));
    os << rep.to_json().dump(2) << '\n';
  }
  return rep.all_pass() ? kOk : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal logistic equation: eigenpairs, potentials, branches and verification"};
  app.require_subcommand(1);

  Common common;
  std::string phi1_file = "phi1.csv";
  auto* eig = app.add_subcommand("eig", "principal eigenpair of the linearized problem");
  add_common(eig, common);
  eig->add_option("--phi1", phi1_file, "CSV file for phi1");

  std::string u_file, phi_file = "phi_u.csv", kernel_file;
  auto* phi = app.add_subcommand("phi", "evaluate phi_u for a field and check its properties");
  add_common(phi, common);
  phi->add_option("--u", u_file, "field CSV (r,value)")->required()->check(CLI::ExistingFile);
  phi->add_option("--out", phi_file, "CSV file for phi_u");
  phi->add_option("--export-kernel", kernel_file, "write the kernel table as a CSV matrix");

  std::string F_file, potential_file = "potential.csv";
  auto* pot = app.add_subcommand("potential", "Newtonian potential of a radial source");
  add_common(pot, common);
  pot->add_option("--F", F_file, "source CSV (r,value)")->required()->check(CLI::ExistingFile);
  pot->add_option("--out", potential_file, "CSV file for the potential");

  double lambda = 0.0;
  std::string solution_file = "solution.csv";
  auto* solve = app.add_subcommand("solve", "Newton solve at one lambda");
  add_common(solve, common);
  solve->add_option("--lambda", lambda, "bifurcation parameter")->required();
  solve->add_option("--out", solution_file, "CSV file for the solution");

  ContinuationOptions copt;
  std::string branch_file = "branch.csv";
  int snapshot_every = 0;
  auto* branch = app.add_subcommand("branch", "pseudo-arclength continuation from lambda1");
  add_common(branch, common);
  branch->add_option("--lambda-max", copt.lambda_max, "stop once lambda reaches this value");
  branch->add_option("--amp-max", copt.amp_max, "stop once |u|_inf reaches this value");
  branch->add_option("--ds", copt.ds, "maximum arclength step")->check(CLI::PositiveNumber);
  branch->add_option("--out", branch_file, "branch CSV file");
  branch->add_option("--snapshots", snapshot_every, "write every k-th solution as snapshot_NNNNN.csv")
      ->check(CLI::NonNegativeNumber);

  std::vector<std::string> verify_configs;
  std::string level = "fast", report_file, verify_out_dir;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--config", verify_configs, "problem configurations (default: built-in fixtures)")
      ->check(CLI::ExistingFile);
  verify->add_option("--level", level, "fast (M=500) or full (M=2000)")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--out", report_file, "JSON report file");
  verify->add_option("--out-dir", verify_out_dir, "output directory (default: $NLBIF_OUT_DIR or .)");

  if (argc <= 1) {
    std::cerr << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*eig) return run_eig(common, phi1_file);
    if (*phi) return run_phi(common, u_file, phi_file, kernel_file);
    if (*pot) return run_potential(common, F_file, potential_file);
    if (*solve) return run_solve(common, lambda, solution_file);
    if (*branch) return run_branch(common, copt, branch_file, snapshot_every);
    if (*verify) return run_verify(verify_configs, level, report_file, verify_out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const MissingFixture& e) {
    std::cerr << "missing fixture: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidInstance& e) {
    std::cerr << "invalid instance: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidGrid& e) {
    std::cerr << "invalid grid: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidKernel& e) {
    std::cerr << "invalid kernel: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
  return kUsage;
}
