#include "prodtest/cli.hpp"

#include "prodtest/acceptance.hpp"
#include "prodtest/depolarising.hpp"
#include "prodtest/grid_search.hpp"
#include "prodtest/io.hpp"
#include "prodtest/product_approx.hpp"
#include "prodtest/product_test.hpp"
#include "prodtest/qma.hpp"
#include "prodtest/unitary_test.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace prodtest::cli {

namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::string path;
  std::uint64_t seed = 0;
  int restarts = 20;
  std::optional<std::size_t> max_dim;
  std::optional<double> max_work;

  // ptest
  bool exact = false;
  std::optional<std::uint64_t> shots;
  std::optional<std::string> partition;
  std::optional<int> kcopies;

  std::optional<int> oracle;
  double delta = 1.0;
  bool minimize = false;

  // qma-sim
  std::optional<int> k;
  int ell = 1;
  std::optional<int> threshold;
  std::optional<std::string> channel;

  // curves
  std::optional<std::string> eps_grid;
  std::optional<std::string> delta_grid;
  int d = 2;
  int n = 1;
  double eps = 0.0;
  std::string out;

  std::string suite = "quick";
};

// Restores the global budget when a command finishes.
class BudgetScope {
 public:
  BudgetScope() : dim_(Budget::max_dim()), work_(Budget::max_work()) {}
  ~BudgetScope() {
    Budget::set_max_dim(dim_);
    Budget::set_max_work(work_);
  }

 private:
  std::size_t dim_;
  double work_;
};

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v(i)));
  return a;
}

json locals_json(const std::vector<Vector>& locals) {
  json a = json::array();
  for (const auto& v : locals) a.push_back(vector_json(v));
  return a;
}

json bounds_json(const BoundsWindow& w) {
  return {{"eps", w.eps}, {"lower", w.lower}, {"upper", w.upper}, {"cap_applies", w.high_eps_cap_applies}};
}

struct Input {
  std::string bytes;
  std::string digest;
  std::string kind;
};

Input load(const std::string& path) {
  Input in;
  in.bytes = io::read_file(path);
  in.digest = io::digest(in.bytes);
  in.kind = io::peek_kind(in.bytes);
  return in;
}

Partition parse_partition(const std::string& spec, int n) {
  std::vector<std::vector<int>> blocks;
  std::stringstream outer(spec);
  std::string block;
  while (std::getline(outer, block, ';')) {
    std::vector<int> members;
    std::stringstream inner(block);
    std::string item;
    while (std::getline(inner, item, ',')) {
      char* end = nullptr;
      const long v = std::strtol(item.c_str(), &end, 10);
      if (item.empty() || *end != '\0' || v < 1 || v > n)
        throw Error(Errc::invalid_partition, "partition entry '" + item + "' is not a subsystem label in 1.." +
                                                 std::to_string(n));
      members.push_back(static_cast<int>(v) - 1);
    }
    blocks.push_back(std::move(members));
  }
  Partition p(std::move(blocks));
  p.validate(n);
  return p;
}

struct Grid {
  double a, b, step;
  std::vector<double> values() const {
    std::vector<double> v;
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) v.push_back(a + static_cast<double>(i) * step);
    return v;
  }
};

Grid parse_grid(const std::string& spec, double lo, double hi) {
  Grid g{};
  char tail = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &g.a, &g.b, &g.step, &tail) != 3)
    throw Error(Errc::parse_error, "grid '" + spec + "' is not of the form start:stop:step");
  if (!(g.step > 0) || !(g.a <= g.b) || g.a < lo || g.b > hi || (g.b - g.a) / g.step > 1e6)
    throw Error(Errc::invalid_argument, "grid '" + spec + "' must satisfy " + std::to_string(lo) +
                                            " <= start <= stop <= " + std::to_string(hi) + " with step > 0");
  return g;
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

OptimizerOptions optimizer(const Options& o) {
  OptimizerOptions opts;
  opts.restarts = o.restarts;
  opts.seed = o.seed;
  return opts;
}

// ---------------------------------------------------------------- commands

int cmd_ptest(const Options& o, json& r, std::ostream& err) {
  const Input in = load(o.path);
  r["input"] = {{"path", o.path}, {"digest", in.digest}, {"kind", in.kind}};
  const int modes = int(o.exact) + int(o.shots.has_value()) + int(o.partition.has_value()) + int(o.kcopies.has_value());
  if (modes > 1) throw Error(Errc::invalid_argument, "choose one of --exact, --shots, --partition, --kcopies");

  json res;
  if (in.kind == "density") {
    const DensityOperator rho = io::to_density(io::parse_operator(in.bytes));
    if (o.shots || o.kcopies) throw Error(Errc::invalid_argument, "--shots and --kcopies need a pure state file");
    const TestReport t =
        o.partition ? ptest_partition(rho, parse_partition(*o.partition, rho.sites())) : ptest_exact(rho);
    res["ptest_value"] = t.value;
    res["method"] = to_string(t.method);
  } else {
    const io::StateFile sf = io::parse_state(in.bytes);
    for (const auto& w : sf.warnings) err << "warning: " << w << '\n';
    r["warnings"] = sf.warnings;
    const PureState& psi = sf.state;
    if (o.kcopies) {
      res["ptest_value"] = kcopy_test_value(psi, *o.kcopies);
      res["method"] = to_string(TestMethod::k_copy);
      res["k"] = *o.kcopies;
    } else {
      TestReport t;
      if (o.shots)
        t = ptest_sampled(psi, *o.shots, o.seed);
      else if (o.partition)
        t = ptest_partition(psi, parse_partition(*o.partition, psi.sites()));
      else
        t = ptest_exact(psi);
      res["ptest_value"] = t.value;
      res["method"] = to_string(t.method);
      if (t.shots) res["shots"] = *t.shots;
      if (t.std_error) res["std_error"] = *t.std_error;
      if (o.partition) res["partition"] = *o.partition;
    }
  }
  r["results"] = res;
  return kOk;
}

int cmd_eps(const Options& o, json& r, std::ostream& err) {
  const Input in = load(o.path);
  r["input"] = {{"path", o.path}, {"digest", in.digest}, {"kind", in.kind}};
  const io::StateFile sf = io::parse_state(in.bytes);
  for (const auto& w : sf.warnings) err << "warning: " << w << '\n';
  r["warnings"] = sf.warnings;
  const PureState& psi = sf.state;

  const ProductAnsatz a = closest_product(psi, optimizer(o));
  const double p = ptest_exact(psi).value;
  const BoundsWindow w = theorem_bounds(a.eps);
  const bool contained = p >= w.lower - 1e-9 && p <= w.upper + 1e-9;
  r["results"] = {{"eps", a.eps},
                  {"overlap_sq", a.overlap_sq},
                  {"restart", a.restart},
                  {"iterations", a.iterations},
                  {"converged", a.converged},
                  {"locals", locals_json(a.locals)},
                  {"ptest_value", p},
                  {"bounds", bounds_json(w)},
                  {"contained", contained}};
  if (o.oracle) {
    const BruteForceEps b = brute_force_eps(psi, *o.oracle);
    r["oracle"] = {{"resolution", *o.oracle},       {"eps", b.eps},
                   {"grid_eps", b.grid_eps},        {"error_bound", b.error_bound},
                   {"evaluations", b.evaluations},  {"optimizer_minus_oracle", a.eps - b.eps}};
  }
  return contained ? kOk : kVerifyFailed;
}

int cmd_depolarise(const Options& o, json& r, std::ostream& err) {
  const Input in = load(o.path);
  r["input"] = {{"path", o.path}, {"digest", in.digest}, {"kind", in.kind}};
  std::optional<PureState> psi;
  std::optional<DensityOperator> rho;
  if (in.kind == "density") {
    rho = io::to_density(io::parse_operator(in.bytes));
  } else {
    io::StateFile sf = io::parse_state(in.bytes);
    for (const auto& w : sf.warnings) err << "warning: " << w << '\n';
    r["warnings"] = sf.warnings;
    rho = DensityOperator::from_pure(sf.state);
    psi = std::move(sf.state);
  }
  if (!rho->dims().is_uniform())
    throw Error(Errc::unsupported_profile, "depolarise needs equal local dimensions");
  const DepolarisingParams params(o.delta, rho->dims()[0], rho->sites());
  const double closed = output_purity_closed(*rho, params);
  const double direct = purity(apply_depolarising(*rho, params));
  json res = {{"delta", o.delta},
              {"d", params.d()},
              {"n", params.n()},
              {"output_purity_closed", closed},
              {"output_purity_direct", direct},
              {"pprod", pprod(params)}};
  if (params.gamma()) res["gamma"] = *params.gamma();
  int code = kOk;
  if (psi) {
    const double e = closest_product(*psi, optimizer(o)).eps;
    const double bound = stability_upper_bound(e, params);
    res["eps"] = e;
    res["stability_bound"] = bound;
    res["bound_holds"] = direct <= bound + 1e-8;
    if (!(direct <= bound + 1e-8)) code = kVerifyFailed;
  }
  r["results"] = res;
  return code;
}

int cmd_unitary(const Options& o, json& r, std::ostream&) {
  const Input in = load(o.path);
  r["input"] = {{"path", o.path}, {"digest", in.digest}, {"kind", in.kind}};
  const UnitaryOperator u = io::to_unitary(io::parse_operator(in.bytes));
  const double p = unitary_ptest(u).value;
  const ProductUnitary pu = closest_product_unitary(u, optimizer(o));
  const BoundsWindow w = unitary_bounds(pu.report.eps_unitary);
  const bool contained = p <= w.upper + 1e-9;
  json factors = json::array();
  for (const auto& f : pu.factors) {
    json m = json::array();
    for (Eigen::Index i = 0; i < f.rows(); ++i) m.push_back(vector_json(f.row(i).transpose()));
    factors.push_back(m);
  }
  r["results"] = {{"ptest_value", p},
                  {"eps_operator", pu.report.eps_operator},
                  {"eps_unitary", pu.report.eps_unitary},
                  {"hs_value", complex_json(pu.report.hs_value)},
                  {"singular_factor", pu.report.singular_factor},
                  {"factors", factors},
                  {"bounds", bounds_json(w)},
                  {"contained", contained}};
  return contained ? kOk : kVerifyFailed;
}

int cmd_sep_opt(const Options& o, json& r, std::ostream&) {
  const Input in = load(o.path);
  r["input"] = {{"path", o.path}, {"digest", in.digest}, {"kind", in.kind}};
  const Measurement m = io::to_measurement(io::parse_operator(in.bytes));
  const SepOptResult s = o.minimize ? sep_minimize(m, optimizer(o)) : sep_maximize(m, optimizer(o));
  json res = {{"objective", o.minimize ? "minimize" : "maximize"},
              {"value", s.value},
              {"witness", locals_json(s.witness)},
              {"iterations", s.iterations},
              {"restarts_used", s.restarts_used},
              {"converged", s.converged}};
  if (!o.minimize && s.value > 0) res["min_entropy"] = s.min_entropy();
  r["results"] = res;
  if (o.oracle) {
    const auto g = grid::extremize_expectation(m.matrix(), m.party_dims(), *o.oracle, o.minimize ? -1.0 : 1.0);
    r["oracle"] = {{"resolution", *o.oracle},
                   {"value", g.value},
                   {"mesh_value", g.mesh_value},
                   {"mesh_loss", g.mesh_loss},
                   {"seesaw_minus_oracle", s.value - g.value}};
  }
  return kOk;
}

int cmd_qma_sim(const Options& o, json& r, std::ostream&) {
  if (o.path.empty() && !o.channel) throw Error(Errc::invalid_argument, "qma-sim needs a measurement file or --channel");
  json res;
  bool ok = true;
  if (!o.path.empty()) {
    const Input in = load(o.path);
    r["input"] = {{"path", o.path}, {"digest", in.digest}, {"kind", in.kind}};
    const Measurement m = io::to_measurement(io::parse_operator(in.bytes));
    const int k = o.k.value_or(m.parties());
    const int d = m.party_dims().front();
    for (int pd : m.party_dims())
      if (pd != d) throw Error(Errc::unsupported_profile, "qma-sim needs equal party dimensions");
    if (k != m.parties())
      throw Error(Errc::dimension_mismatch, "--k " + std::to_string(k) + " does not match the " +
                                                std::to_string(m.parties()) + " parties of the measurement");
    const SoundnessReport s = soundness_bound_check(m, k, d, optimizer(o));
    json sj = {{"k", k},       {"d", d},          {"s", s.s},         {"s_prime", s.s_prime},
               {"bound_27", s.bound_27}, {"holds_27", s.holds_27}, {"holds_k2", s.holds_k2}};
    if (s.bound_k2) sj["bound_k2"] = *s.bound_k2;
    res["soundness"] = sj;
    ok = ok && s.holds();

    const RepetitionSpec spec{o.ell, o.threshold.value_or(o.ell)};
    spec.validate();
    if (o.ell > 1 || o.threshold) {
      const Measurement rep = threshold_repeat(m, spec);
      const double v = sep_maximize(rep, optimizer(o)).value;
      json rj = {{"ell", spec.ell}, {"threshold", spec.threshold}, {"value", v}};
      if (spec.threshold == spec.ell) rj["s_power"] = std::pow(s.s, spec.ell);
      res["repetition"] = rj;
    }
  }
  if (o.channel) {
    const std::string bytes = io::read_file(*o.channel);
    r["channel_input"] = {{"path", *o.channel}, {"digest", io::digest(bytes)}};
    const KrausChannel n = io::to_channel(io::parse_operator(bytes));
    const double sep = sep_maximize(channel_to_measurement(n), optimizer(o)).value;
    const SepOptResult mo = min_output_infinity(n, optimizer(o));
    const double diag = sep_maximize(channel_to_measurement_diagonal(n), optimizer(o)).value;
    res["channel"] = {{"sep_value", sep},
                      {"min_output_infinity", mo.value},
                      {"min_entropy", mo.min_entropy()},
                      {"difference", sep - mo.value},
                      {"cross_term_free_value", diag}};
    ok = ok && std::abs(sep - mo.value) <= 1e-6;
  }
  r["results"] = res;
  return ok ? kOk : kVerifyFailed;
}

int cmd_curves(const Options& o, json& r, std::ostream&) {
  if (o.eps_grid.has_value() == o.delta_grid.has_value())
    throw Error(Errc::invalid_argument, "choose exactly one of --eps-grid and --delta-grid");
  std::ostringstream csv;
  std::size_t rows = 0;
  if (o.eps_grid) {
    csv << "eps,lower,upper,cap\n";
    for (double e : parse_grid(*o.eps_grid, 0.0, 1.0).values()) {
      const BoundsWindow w = theorem_bounds(std::min(e, 1.0));
      csv << csv_coord(e) << ',' << csv_num(w.lower) << ',' << csv_num(w.upper) << ','
          << (w.high_eps_cap_applies ? 1 : 0) << '\n';
      ++rows;
    }
  } else {
    if (o.d < 2 || o.n < 1) throw Error(Errc::invalid_argument, "--d must be >= 2 and --n >= 1");
    if (!(o.eps >= 0 && o.eps <= 1)) throw Error(Errc::invalid_argument, "--eps must lie in [0, 1]");
    auto deltas = parse_grid(*o.delta_grid, 0.0, 1.0).values();
    // Always include the point where the output purity reproduces the product test.
    const double special = 1.0 / std::sqrt(o.d + 1.0);
    if (std::none_of(deltas.begin(), deltas.end(), [&](double x) { return std::abs(x - special) < 1e-12; })) {
      deltas.push_back(special);
      std::sort(deltas.begin(), deltas.end());
    }
    csv << "delta,pprod,stability_bound\n";
    for (double dl : deltas) {
      const DepolarisingParams p(std::min(dl, 1.0), o.d, o.n);
      csv << csv_coord(dl) << ',' << csv_num(pprod(p)) << ',' << csv_num(stability_upper_bound(o.eps, p)) << '\n';
      ++rows;
    }
  }
  io::write_file(o.out, csv.str());
  r["results"] = {{"out", o.out}, {"rows", rows}, {"digest", io::digest(csv.str())}};
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const auto suite = o.suite == "full" ? acceptance::Suite::full : acceptance::Suite::quick;
  out << "suite " << o.suite << ", seed " << o.seed << '\n';
  const auto results = acceptance::run(suite, o.seed, &out);
  std::vector<int> failing;
  for (const auto& c : results)
    if (!c.pass) failing.push_back(c.index);
  if (failing.empty()) {
    out << "all " << results.size() << " criteria passed\n";
    return kOk;
  }
  out << "failing criteria:";
  for (int i : failing) out << ' ' << i;
  out << '\n';
  return kVerifyFailed;
}

int exit_for(Errc code) {
  switch (code) {
    case Errc::resource_budget: return kBudget;
    case Errc::io_error: return kIoError;
    default: return kInputError;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Product-test toolkit for multipartite pure states, unitaries and separable measurements", "prodtest"};
  app.require_subcommand(1);
  app.add_option("--max-dim", o.max_dim, "Largest Hilbert-space dimension for exact operations (default 4096)");
  app.add_option("--max-work", o.max_work, "Largest work estimate for one operation (default 1e11)");

  auto seed_flags = [&](CLI::App* s) {
    s->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    s->add_option("--restarts", o.restarts, "Optimizer restarts")->capture_default_str()->check(CLI::PositiveNumber);
  };

  auto* ptest = app.add_subcommand("ptest", "Acceptance probability of the product test");
  ptest->add_option("state", o.path, "State file (or density operator file)")->required();
  ptest->add_flag("--exact", o.exact, "Exact subset sum (default)");
  ptest->add_option("--shots", o.shots, "Simulate this many runs of the test");
  ptest->add_option("--partition", o.partition, "Blocks of 1-based subsystem labels, e.g. \"1,2;3\"");
  ptest->add_option("--kcopies", o.kcopies, "k-copy symmetric projector value");
  ptest->add_option("--seed", o.seed, "Random seed")->capture_default_str();

  auto* eps = app.add_subcommand("eps", "Distance to the closest product state");
  eps->add_option("state", o.path, "State file")->required();
  eps->add_option("--oracle", o.oracle, "Also run the mesh oracle at this resolution");
  seed_flags(eps);

  auto* dep = app.add_subcommand("depolarise", "Output purity under the qudit depolarising channel");
  dep->add_option("state", o.path, "State file (or density operator file)")->required();
  dep->add_option("--delta", o.delta, "Retention amplitude in [0, 1]")->required();
  seed_flags(dep);

  auto* uni = app.add_subcommand("unitary", "Product test for a unitary via its Choi vector");
  uni->add_option("operator", o.path, "Unitary operator file")->required();
  seed_flags(uni);

  auto* sep = app.add_subcommand("sep-opt", "Optimize a measurement over product inputs");
  sep->add_option("operator", o.path, "Measurement operator file")->required();
  sep->add_flag("--minimize", o.minimize, "Minimize instead of maximize");
  sep->add_option("--oracle", o.oracle, "Also run the grid oracle at this resolution");
  seed_flags(sep);

  auto* qma = app.add_subcommand("qma-sim", "Two-prover soundness, repetition and channel correspondence");
  qma->add_option("operator", o.path, "Measurement operator file");
  qma->add_option("--k", o.k, "Number of provers (parties of the measurement)");
  qma->add_option("--ell", o.ell, "Repetitions")->capture_default_str()->check(CLI::PositiveNumber);
  qma->add_option("--threshold", o.threshold, "Accept if at least this many repetitions accept");
  qma->add_option("--channel", o.channel, "Kraus-list file for the channel correspondence");
  seed_flags(qma);

  auto* curves = app.add_subcommand("curves", "Write bound curves as CSV");
  curves->add_option("--eps-grid", o.eps_grid, "start:stop:step over eps");
  curves->add_option("--delta-grid", o.delta_grid, "start:stop:step over delta");
  curves->add_option("--d", o.d, "Local dimension for --delta-grid")->capture_default_str();
  curves->add_option("--n", o.n, "Number of subsystems for --delta-grid")->capture_default_str();
  curves->add_option("--eps", o.eps, "eps for the stability bound column")->capture_default_str();
  curves->add_option("--out", o.out, "CSV output path")->required();
  curves->add_option("--seed", o.seed, "Random seed (unused; accepted for uniformity)");

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--suite", o.suite, "quick or full")
      ->capture_default_str()
      ->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--seed", o.seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_out, o_err;
    const int code = app.exit(e, o_out, o_err);
    out << o_out.str();
    err << o_err.str();
    return code == 0 ? kOk : kInputError;
  }

  BudgetScope scope;
  if (o.max_dim) Budget::set_max_dim(*o.max_dim);
  if (o.max_work) Budget::set_max_work(*o.max_work);

  json report;
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto start = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    if (verify->parsed()) return cmd_verify(o, out);
    CLI::App* sub = app.get_subcommands().front();
    report["command"] = sub->get_name();
    report["argv"] = args;
    report["seed"] = o.seed;
    if (sub == ptest) code = cmd_ptest(o, report, err);
    else if (sub == eps) code = cmd_eps(o, report, err);
    else if (sub == dep) code = cmd_depolarise(o, report, err);
    else if (sub == uni) code = cmd_unitary(o, report, err);
    else if (sub == sep) code = cmd_sep_opt(o, report, err);
    else if (sub == qma) code = cmd_qma_sim(o, report, err);
    else if (sub == curves) code = cmd_curves(o, report, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report["exit_code"] = code;
  out << report.dump(2) << '\n';
  return code;
}

}  // namespace prodtest::cli
