#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "gapcert/certify.hpp"
#include "gapcert/delta.hpp"
#include "gapcert/dl.hpp"

using namespace gapcert;
using nlohmann::json;

namespace {

struct Cli {
  std::string out;
  std::string model = "heisenberg_fm";
  std::string region_a, region_b, sizes = "2..8";
  std::string schedule = "k2", delta_model = "zero", kind = "1d";
  std::string lambdas = "0.5";
  std::string order;
  std::uint64_t seed = 12345;
  int n = 6;
  int q = 1;
  int samples = 200;
  int kmax = 8;
  int k0 = -1;
  int dim = 1;
  double lambda0 = 1.0;
  double tol = 1e-9;
  double c_param = 1.0, eps_param = 1.0;
  std::string bound_tuple;
  bool table = false;
  bool certify_flag = false;
  SolverOptions opts;
};

void emit(const Cli& cli, const std::string& payload) {
  if (cli.out.empty()) {
    std::cout << payload << "\n";
    return;
  }
  std::ofstream f(cli.out);
  if (!f) throw ConfigError("cannot open output file " + cli.out);
  f << payload << "\n";
}

LocalHamiltonian resolve_model(const Cli& cli) {
  if (cli.model == "product" || cli.model == "heisenberg_fm" ||
      cli.model == "aklt")
    return builtin_model(cli.model, cli.dim);
  std::ifstream f(cli.model);
  if (!f) throw ConfigError("model '" + cli.model +
                            "' is neither builtin nor a readable file");
  json doc = json::parse(f, nullptr, true);
  return load_model(doc);
}

Region chain_region(int n) {
  if (n < 1) throw ConfigError("need a positive chain length");
  return Region::interval(0, n - 1);
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto pos = text.find("..");
  try {
    if (pos != std::string::npos)
      return {std::stoi(text.substr(0, pos)), std::stoi(text.substr(pos + 2))};
  } catch (const std::exception&) {
  }
  throw ConfigError("expected a range like 2..8, got '" + text + "'");
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string piece = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!piece.empty()) {
      try {
        out.push_back(std::stod(piece));
      } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + piece + "'");
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("expected a comma-separated list");
  return out;
}

std::optional<std::vector<int>> parse_order(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::vector<int> out;
  for (double v : parse_doubles(text)) out.push_back(static_cast<int>(v));
  return out;
}

json meta(const Cli& cli) {
  return {{"format", "gapcert-report/1"},
          {"seed", cli.seed},
          {"tol", cli.tol},
          {"dense_threshold", cli.opts.dense_threshold},
          {"budget", cli.opts.max_dim}};
}

int run_model_validate(Cli& cli) {
  LocalHamiltonian h = resolve_model(cli);
  Region region = chain_region(cli.n);
  auto terms = h.restrict(region);
  double worst = 0.0;
  for (const auto& t : terms)
    worst = std::max(worst, projector_deviation(t.matrix));
  const bool ff = check_frustration_free(h, region, cli.tol, cli.opts);
  json doc = {{"model", h.name()},
              {"dim", h.dim()},
              {"local_dim", h.local_dim()},
              {"range", h.range()},
              {"region", region_to_json(region)},
              {"terms", terms.size()},
              {"max_projector_deviation", worst},
              {"frustration_free", ff},
              {"meta", meta(cli)}};
  emit(cli, doc.dump(2));
  return (ff && worst <= 1e-12) ? 0 : 3;
}

int run_gap(Cli& cli) {
  LocalHamiltonian h = resolve_model(cli);
  auto [lo, hi] = parse_range(cli.sizes);
  std::string csv = spectral_csv_header() + "\n";
  for (int n = lo; n <= hi; ++n) {
    Region region = chain_region(n);
    SpectralReport rep = spectral_gap(assemble(h, region, cli.opts), cli.opts);
    csv += spectral_csv_row(region, rep) + "\n";
  }
  csv.pop_back();
  emit(cli, csv);
  return 0;
}

int run_delta(Cli& cli) {
  LocalHamiltonian h = resolve_model(cli);
  if (cli.table) {
    SSchedule sched = parse_schedule(cli.schedule, h.dim());
    DeltaTable table = delta_k_table(
        h, cli.kmax, [&](int k) { return sched.s(k); }, cli.opts);
    emit(cli, delta_table_csv(table));
    return 0;
  }
  if (cli.region_a.empty() || cli.region_b.empty())
    throw ConfigError("delta needs --A and --B (or --table)");
  DeltaEstimate est = delta_exact(h, parse_region(cli.region_a),
                                  parse_region(cli.region_b), cli.opts);
  json doc = est.to_json();
  doc["meta"] = meta(cli);
  emit(cli, doc.dump(2));
  return 0;
}

int run_verify(Cli& cli, const std::string& what) {
  LocalHamiltonian h = resolve_model(cli);
  if (what == "projineq") {
    Rng rng(cli.seed);
    bool ok = true;
    double worst_lower = 1e300, worst_upper = 1e300;
    for (int i = 0; i < cli.samples; ++i) {
      const int dim = 64;
      const int r1 = 1 + static_cast<int>(rng.integer() % 63);
      const int r2 = 1 + static_cast<int>(rng.integer() % 63);
      Mat g1(dim, r1), g2(dim, r2);
      for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < r1; ++c) g1(r, c) = rng.cgaussian();
        for (int c = 0; c < r2; ++c) g2(r, c) = rng.cgaussian();
      }
      Eigen::HouseholderQR<Mat> q1(g1), q2(g2);
      Mat p = q1.householderQ() * Mat::Identity(dim, r1);
      Mat qm = q2.householderQ() * Mat::Identity(dim, r2);
      ProjIneqReport rep = verify_projector_inequality(
          p * p.adjoint(), qm * qm.adjoint(), cli.tol);
      ok = ok && rep.pass();
      worst_lower = std::min(worst_lower, rep.min_eig_lower);
      worst_upper = std::min(worst_upper, rep.min_eig_upper);
    }
    json doc = {{"check", "projector_inequality"},
                {"samples", cli.samples},
                {"worst_min_eig_lower", worst_lower},
                {"worst_min_eig_upper", worst_upper},
                {"pass", ok},
                {"meta", meta(cli)}};
    emit(cli, doc.dump(2));
    return ok ? 0 : 3;
  }

  if (what == "qf") {
    QfReport rep = verify_quasi_factorization(
        h, parse_region(cli.region_a), parse_region(cli.region_b), cli.tol,
        50, cli.seed, cli.opts);
    json doc = rep.to_json();
    doc["meta"] = meta(cli);
    emit(cli, doc.dump(2));
    return rep.pass() ? 0 : 3;
  }
  if (what == "gapdelta") {
    GapDeltaReport rep =
        verify_gap_to_delta(h, parse_region(cli.region_a),
                            parse_region(cli.region_b), cli.tol, cli.opts);
    json doc = rep.to_json();
    doc["meta"] = meta(cli);
    emit(cli, doc.dump(2));
    return rep.pass() ? 0 : 3;
  }
  if (what == "split") {
    Region lambda = chain_region(cli.n);
    auto [split, rep] =
        split_ma_mb(h, lambda, parse_region(cli.region_a),
                    parse_region(cli.region_b), cli.q, cli.opts,
                    parse_order(cli.order));
    json doc = rep.to_json();
    doc["trace_factors"] = split.trace.size();
    doc["meta"] = meta(cli);
    emit(cli, doc.dump(2));
    return rep.pass() ? 0 : 3;
  }

  // dl | converse | sandwich | gamma run on a chain of length n
  Region region = chain_region(cli.n);
  auto op = std::make_shared<AssembledOperator>(assemble(h, region, cli.opts));
  DLOperator l = build_dl(op, parse_order(cli.order));
  if (what == "gamma") {
    GammaReport rep = gamma_contraction(*op, l, cli.opts, cli.tol);
    json doc = rep.to_json();
    doc["meta"] = meta(cli);
    emit(cli, doc.dump(2));
    return (rep.has_certificate && rep.pass_crosscheck) ? 0 : 3;
  }
  auto [p, spec] = ground_and_gap(*op, cli.opts);
  if (what == "dl") {
    DlReport rep =
        verify_dl(l, p, spec, cli.samples, cli.seed, cli.tol, cli.opts);
    json doc = rep.to_json();
    doc["meta"] = meta(cli);
    emit(cli, doc.dump(2));
    return rep.pass() ? 0 : 3;
  }
  if (what == "converse") {
    ConverseDlReport rep =
        verify_converse_dl(l, cli.samples, cli.seed, cli.tol);
    json doc = rep.to_json();
    doc["meta"] = meta(cli);
    emit(cli, doc.dump(2));
    return rep.pass() ? 0 : 3;
  }
  if (what == "sandwich") {
    SandwichReport rep = verify_sandwich(l, p, spec, cli.samples, cli.seed,
                                         cli.tol, 1e-6, cli.opts);
    json doc = rep.to_json();
    doc["meta"] = meta(cli);
    emit(cli, doc.dump(2));
    return rep.pass() ? 0 : 3;
  }
  throw ConfigError("unknown verify target '" + what + "'");
}

int run_certify(Cli& cli) {
  SSchedule sched = parse_schedule(cli.schedule, cli.dim);
  DeltaModel model = parse_delta_model(cli.delta_model);
  std::optional<int> k0;
  if (cli.k0 >= 0) k0 = cli.k0;
  CertificationResult res = recursion_bound(cli.lambda0, k0, sched, model);
  json doc = res.to_json();
  doc["meta"] = meta(cli);
  emit(cli, doc.dump(2));
  return res.valid ? 0 : 3;
}

int run_pvbs(Cli& cli) {
  std::vector<double> lambdas = parse_doubles(cli.lambdas);
  if (cli.certify_flag) {
    SSchedule sched = parse_schedule(cli.schedule,
                                     static_cast<int>(lambdas.size()));
    CertificationResult res = pvbs_certify(lambdas, sched, cli.lambda0);
    json doc = res.to_json();
    doc["meta"] = meta(cli);
    emit(cli, doc.dump(2));
    return res.valid ? 0 : 3;
  }
  if (!cli.bound_tuple.empty()) {
    std::vector<double> t = parse_doubles(cli.bound_tuple);
    if (t.size() != 3) throw ConfigError("--bound needs l,lA,lB");
    if (lambdas.size() != 1) throw ConfigError("--bound is one-dimensional");
    const double value =
        pvbs_bound(static_cast<int>(t[0]), static_cast<int>(t[1]),
                   static_cast<int>(t[2]), lambdas[0]);
    json doc = {{"bound", value},
                {"l", t[0]},
                {"l_A", t[1]},
                {"l_B", t[2]},
                {"lambda", lambdas[0]},
                {"meta", meta(cli)}};
    emit(cli, doc.dump(2));
    return 0;
  }
  if (cli.region_a.empty() || cli.region_b.empty())
    throw ConfigError("pvbs needs --A/--B, --bound or --certify");
  DeltaEstimate est = pvbs_delta(parse_region(cli.region_a),
                                 parse_region(cli.region_b), lambdas);
  json doc = est.to_json();
  doc["meta"] = meta(cli);
  emit(cli, doc.dump(2));
  return 0;
}

int run_threshold(Cli& cli) {
  LocalHamiltonian h = resolve_model(cli);
  auto [lo, hi] = parse_range(cli.sizes);
  std::vector<std::pair<int, double>> gaps;
  for (int n = lo; n <= hi; ++n)
    gaps.push_back(
        {n,
         spectral_gap(assemble(h, chain_region(n), cli.opts), cli.opts).gap});
  ThresholdReport rep = threshold_check(gaps, parse_lattice_kind(cli.kind),
                                        cli.c_param, cli.eps_param);
  emit(cli, rep.to_csv());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  if (const char* env = std::getenv("GAPCERT_BUDGET"))
    cli.opts.max_dim = std::strtoull(env, nullptr, 10);

  CLI::App app{"frustration-free spectral gap toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out", cli.out, "output file (default stdout)");
  app.add_option("--seed", cli.seed, "random seed (recorded in outputs)");
  app.add_option("--tol", cli.tol, "verification tolerance");
  app.add_option("--budget", cli.opts.max_dim, "Hilbert dimension budget");
  app.add_option("--dense-threshold", cli.opts.dense_threshold,
                 "dense linear algebra up to this dimension");

  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model", cli.model, "builtin name or model file");
    cmd->add_option("--dim", cli.dim, "lattice dimension for builtins");
  };

  CLI::App* model_cmd = app.add_subcommand("model", "model checks");
  CLI::App* validate = model_cmd->add_subcommand(
      "validate", "projector and frustration-freeness checks");
  add_model(validate);
  validate->add_option("--n", cli.n, "chain length");

  CLI::App* gap = app.add_subcommand("gap", "spectral gap sweep (CSV)");
  add_model(gap);
  gap->add_option("--sizes", cli.sizes, "chain sizes a..b");

  CLI::App* delta = app.add_subcommand("delta", "overlap delta(A,B) or table");
  add_model(delta);
  delta->add_option("--A", cli.region_a, "region A (range or JSON)");
  delta->add_option("--B", cli.region_b, "region B");
  delta->add_flag("--table", cli.table, "tabulate delta_k over levels");
  delta->add_option("--kmax", cli.kmax, "largest level for --table");
  delta->add_option("--schedule", cli.schedule, "s_k schedule for --table");

  CLI::App* verify = app.add_subcommand("verify", "operator inequality checks");
  std::string what;
  verify
      ->add_option("what", what,
                   "dl|converse|sandwich|qf|projineq|gapdelta|split|gamma")
      ->required();
  add_model(verify);
  verify->add_option("--n", cli.n, "chain length");
  verify->add_option("--A", cli.region_a, "region A");
  verify->add_option("--B", cli.region_b, "region B");
  verify->add_option("--q", cli.q, "power of L for split");
  verify->add_option("--samples", cli.samples, "random states per check");
  verify->add_option("--order", cli.order, "layer order, e.g. 1,0");

  CLI::App* certify = app.add_subcommand("certify", "recursion certificate");
  certify->add_option("--delta", cli.delta_model,
                      "zero|exponential:c=..,alpha=..|polynomial:c=..,alpha=..");
  certify->add_option("--schedule", cli.schedule, "k2|k1eps:eps=..|cesi");
  certify->add_option("--lambda0", cli.lambda0, "base gap at level k0");
  certify->add_option("--k0", cli.k0, "base level (default: smallest valid)");
  certify->add_option("--dim", cli.dim, "lattice dimension");

  CLI::App* pvbs = app.add_subcommand("pvbs", "PVBS closed forms");
  pvbs->add_option("--lambdas", cli.lambdas, "comma-separated lambda_j");
  pvbs->add_option("--A", cli.region_a, "box region A");
  pvbs->add_option("--B", cli.region_b, "box region B");
  pvbs->add_option("--bound", cli.bound_tuple, "l,lA,lB for the case bound");
  pvbs->add_flag("--certify", cli.certify_flag, "run the recursion");
  pvbs->add_option("--schedule", cli.schedule, "schedule for --certify");
  pvbs->add_option("--lambda0", cli.lambda0, "base gap for --certify");

  CLI::App* threshold = app.add_subcommand("threshold", "local gap thresholds");
  add_model(threshold);
  threshold->add_option("--sizes", cli.sizes, "chain sizes a..b");
  threshold->add_option("--kind", cli.kind, "1d|square|hex");
  threshold->add_option("--C", cli.c_param, "log-threshold constant");
  threshold->add_option("--eps", cli.eps_param, "log-threshold exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cli.opts.seed = cli.seed;
    if (validate->parsed()) return run_model_validate(cli);
    if (gap->parsed()) return run_gap(cli);
    if (delta->parsed()) return run_delta(cli);
    if (verify->parsed()) return run_verify(cli, what);
    if (certify->parsed()) return run_certify(cli);
    if (pvbs->parsed()) return run_pvbs(cli);
    if (threshold->parsed()) return run_threshold(cli);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 4;
  } catch (const NumericsError& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
