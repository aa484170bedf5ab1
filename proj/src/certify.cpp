#include "gapcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gapcert {

std::string SSchedule::certificate() const {
  std::ostringstream os;
  os.precision(12);
  if (!summable) return "no summability certificate";
  os << "sum_{j>J} 1/s_j <= tail(J); growth: w_{j+1}+2 >= " << rho_star
     << " * (w_j+2) for j >= " << j_star;
  return os.str();
}

// Scan a schedule's width growth ratio lower bound for its first crossing
// above 1; the families used here are monotone increasing in j, which is
// asserted over a wide window.
static void growth_certificate(SSchedule& sched,
                               const std::function<double(int)>& rho_lb) {
  const int scan_cap = 20000;
  int j_star = -1;
  for (int j = 1; j < scan_cap; ++j)
    if (rho_lb(j) > 1.0 + 1e-6) {
      j_star = j;
      break;
    }
  if (j_star < 0)
    throw ConfigError("schedule '" + sched.name +
                      "': width growth never exceeds 1");
  double prev = rho_lb(j_star);
  for (int j = j_star + 1; j < j_star + 5000; ++j) {
    const double cur = rho_lb(j);
    // l_j overflow upstream shows up as inf, nan or a zero ratio
    if (!std::isfinite(cur) || cur <= 0.0) break;
    if (cur < prev - 1e-12)
      throw ConfigError("schedule '" + sched.name +
                        "': growth ratio is not monotone");
    prev = cur;
  }
  sched.j_star = j_star;
  sched.rho_star = rho_lb(j_star);
}

SSchedule schedule_k2(int lattice_dim) {
  SSchedule sched;
  sched.name = "k2";
  sched.lattice_dim = lattice_dim;
  sched.s = [](int k) { return static_cast<long long>(k) * k; };
  sched.sum_inv_tail = [](long long j) { return 1.0 / static_cast<double>(j); };
  const double growth = std::pow(1.5, 1.0 / lattice_dim);
  growth_certificate(sched, [growth](int j) {
    const double r = static_cast<double>(j) / (j + 1);
    return growth * r * r;
  });
  return sched;
}

SSchedule schedule_k1eps(int lattice_dim, double eps) {
  if (eps <= 0.0) throw ConfigError("schedule k1eps: need eps > 0");
  SSchedule sched;
  sched.name = "k1eps(eps=" + std::to_string(eps) + ")";
  sched.lattice_dim = lattice_dim;
  sched.s = [eps](int k) {
    return static_cast<long long>(std::ceil(std::pow(double(k), 1.0 + eps)));
  };
  // 1/s_j <= j^-(1+eps); integral tail
  sched.sum_inv_tail = [eps](long long j) {
    return std::pow(static_cast<double>(j), -eps) / eps;
  };
  const double growth = std::pow(1.5, 1.0 / lattice_dim);
  growth_certificate(sched, [growth, eps](int j) {
    const double denom = std::pow(double(j + 1), 1.0 + eps) + 1.0;
    return growth * std::pow(double(j), 1.0 + eps) / denom;
  });
  return sched;
}

SSchedule schedule_cesi(int lattice_dim) {
  SSchedule sched;
  sched.name = "cesi";
  sched.lattice_dim = lattice_dim;
  const int d = lattice_dim;
  sched.s = [d](int k) {
    return static_cast<long long>(std::ceil(std::pow(ell(k, d), 1.0 / 3.0)));
  };
  // 1/s_j <= l_j^(-1/3) = q^j with q = (3/2)^(-1/(3D))
  const double q = std::pow(1.5, -1.0 / (3.0 * d));
  sched.sum_inv_tail = [q](long long j) {
    return std::pow(q, static_cast<double>(j + 1)) / (1.0 - q);
  };
  const double growth = std::pow(1.5, 1.0 / d);
  // smooth bound: s_j >= l_j^(1/3), s_{j+1} <= l_{j+1}^(1/3) + 1
  growth_certificate(sched, [growth, d](int j) {
    const double sj = std::pow(ell(j, d), 1.0 / 3.0);
    const double sj1 = std::pow(ell(j + 1, d), 1.0 / 3.0) + 1.0;
    return growth * sj / sj1;
  });
  return sched;
}

SSchedule schedule_unit(int lattice_dim) {
  SSchedule sched;
  sched.name = "unit";
  sched.lattice_dim = lattice_dim;
  sched.summable = false;  // sum 1/s_k diverges
  sched.s = [](int) { return 1LL; };
  sched.sum_inv_tail = [](long long) {
    return std::numeric_limits<double>::infinity();
  };
  const double growth = std::pow(1.5, 1.0 / lattice_dim);
  growth_certificate(sched, [growth](int) { return growth; });
  return sched;
}

SSchedule parse_schedule(const std::string& text, int lattice_dim) {
  if (text == "k2") return schedule_k2(lattice_dim);
  if (text == "cesi") return schedule_cesi(lattice_dim);
  if (text == "unit") return schedule_unit(lattice_dim);
  if (text.rfind("k1eps", 0) == 0) {
    double eps = 1.0;
    const auto pos = text.find("eps=");
    if (pos != std::string::npos) eps = std::stod(text.substr(pos + 4));
    return schedule_k1eps(lattice_dim, eps);
  }
  throw ConfigError("unknown schedule '" + text + "'");
}

// ---- delta models -------------------------------------------------------------

DeltaModel DeltaModel::zero() { return exponential(0.0, 0.5); }

DeltaModel DeltaModel::exponential(double c, double alpha) {
  if (c < 0.0 || alpha <= 0.0 || alpha >= 1.0)
    throw ConfigError("exponential delta model: need c >= 0, 0 < alpha < 1");
  DeltaModel m;
  m.kind = Kind::exponential;
  m.c = c;
  m.alpha = alpha;
  return m;
}

DeltaModel DeltaModel::polynomial(double c, double alpha) {
  if (c < 0.0 || alpha <= 0.0)
    throw ConfigError("polynomial delta model: need c >= 0, alpha > 0");
  DeltaModel m;
  m.kind = Kind::polynomial;
  m.c = c;
  m.alpha = alpha;
  return m;
}

DeltaModel DeltaModel::from_table(std::vector<double> deltas) {
  for (double d : deltas)
    if (d < 0.0) throw ConfigError("delta table: negative entry");
  DeltaModel m;
  m.kind = Kind::table;
  m.table = std::move(deltas);
  return m;
}

DeltaModel DeltaModel::pvbs(const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw ConfigError("pvbs model: no lambdas");
  double star = 0.0;
  for (double l : lambdas) {
    if (l <= 0.0) throw ConfigError("pvbs model: lambdas must be positive");
    star = std::max(star, std::min(l, 1.0 / l));
  }
  if (std::abs(star - 1.0) <= 1e-12)
    throw ConfigError(
        "pvbs model: some lambda_j = 1, delta(l) is bounded away from zero");
  DeltaModel m;
  m.kind = Kind::pvbs;
  m.alpha = star;
  m.c = 1.0 / (1.0 - star * star);
  m.lambdas = lambdas;
  return m;
}

double DeltaModel::delta_at_width(double w) const {
  switch (kind) {
    case Kind::exponential:
    case Kind::pvbs:
      if (c == 0.0) return 0.0;
      return c * std::pow(alpha, w);
    case Kind::polynomial:
      if (c == 0.0) return 0.0;
      if (w <= 0.0) return std::numeric_limits<double>::infinity();
      return c * std::pow(w, -alpha);
    default:
      throw ConfigError("delta_at_width on a table model");
  }
}

std::string DeltaModel::describe() const {
  std::ostringstream os;
  os.precision(12);
  switch (kind) {
    case Kind::exponential:
      os << "exponential(c=" << c << ",alpha=" << alpha << ")";
      break;
    case Kind::polynomial:
      os << "polynomial(c=" << c << ",alpha=" << alpha << ")";
      break;
    case Kind::pvbs:
      os << "pvbs(lambda_*=" << alpha << ")";
      break;
    default:
      os << "table(" << table.size() << " levels)";
  }
  return os.str();
}

static double parse_param(const std::string& text, const std::string& key,
                          double fallback) {
  const auto pos = text.find(key + "=");
  if (pos == std::string::npos) return fallback;
  return std::stod(text.substr(pos + key.size() + 1));
}

DeltaModel parse_delta_model(const std::string& text) {
  if (text == "zero") return DeltaModel::zero();
  if (text.rfind("exponential", 0) == 0)
    return DeltaModel::exponential(parse_param(text, "c", 1.0),
                                   parse_param(text, "alpha", 0.5));
  if (text.rfind("polynomial", 0) == 0)
    return DeltaModel::polynomial(parse_param(text, "c", 1.0),
                                  parse_param(text, "alpha", 2.0));
  throw ConfigError("unknown delta model '" + text + "'");
}

// ---- the recursion engine ------------------------------------------------------

nlohmann::json CertificationResult::to_json() const {
  return {{"valid", valid},
          {"reason", reason},
          {"lower_bound", lower_bound},
          {"k0", k0},
          {"lambda_k0", lambda_k0},
          {"C", C},
          {"delta_levels", delta_levels},
          {"factors", factors},
          {"tail_bound", tail_bound},
          {"truncation_level", truncation_level},
          {"finite_horizon", finite_horizon},
          {"horizon_k", horizon_k},
          {"schedule", schedule_name},
          {"schedule_certificate", schedule_certificate},
          {"model", model},
          {"warnings", warnings}};
}

CertificationResult recursion_bound(double lambda_k0, std::optional<int> k0_in,
                                    const SSchedule& sched,
                                    const DeltaModel& model) {
  CertificationResult res;
  res.lambda_k0 = lambda_k0;
  res.schedule_name = sched.name;
  res.schedule_certificate = sched.certificate();
  res.model = model.describe();
  if (lambda_k0 < 0.0)
    throw ConfigError("recursion_bound: lambda_k0 must be >= 0");
  if (!sched.summable) {
    res.reason = "sum 1/s_k is not certifiably summable for this schedule";
    return res;
  }

  const int horizon =
      model.width_based() ? -1 : static_cast<int>(model.table.size());
  auto delta_at = [&](int j) -> double {
    if (!model.width_based()) {
      if (j < 1 || j > horizon)
        return std::numeric_limits<double>::quiet_NaN();
      return model.table[j - 1];
    }
    return model.delta_at_width(sched.width(j));
  };

  // The analytic kinds decay once the widths grow; beyond j_star the widths
  // are certified increasing, so checking up to j_star settles "for all k".
  const int check_until = model.width_based()
                              ? std::max(sched.j_star + 1, 2)
                              : horizon;

  auto all_small_from = [&](int k) {
    for (int j = k; j <= std::max(k, check_until); ++j) {
      const double dj = delta_at(j);
      if (std::isnan(dj)) continue;  // past a table horizon
      if (!(dj < 0.5)) return false;
    }
    if (model.width_based() && model.kind == DeltaModel::Kind::polynomial) {
      // polynomial decay needs a positive width at the tail start
      if (sched.width(std::max(k, check_until)) <= 0.0) return false;
    }
    return true;
  };

  if (k0_in) {
    res.k0 = *k0_in;
    for (int j = res.k0 + 1; j <= std::max(res.k0 + 1, check_until); ++j) {
      const double dj = delta_at(j);
      if (!std::isnan(dj) && !(dj < 0.5)) {
        res.reason = "delta_" + std::to_string(j) + " = " +
                     std::to_string(dj) + " >= 1/2";
        return res;
      }
    }
    if (!all_small_from(res.k0 + 1)) {
      res.reason = "delta_j >= 1/2 at some level beyond k0";
      return res;
    }
  } else {
    int found = -1;
    for (int k = 1; k <= 4000; ++k)
      if (all_small_from(k)) {
        found = k;
        break;
      }
    if (found < 0) {
      res.reason = "no k0 with delta_k < 1/2 for all k >= k0";
      return res;
    }
    res.k0 = found;
  }

  // C = prod_{j>=1} (1 + 1/s_j)^{-1}, partial product with a certified tail
  {
    const long long jc = 200000;
    double c_part = 1.0;
    for (long long j = 1; j <= jc; ++j) {
      const double factor =
          1.0 + 1.0 / static_cast<double>(sched.s(static_cast<int>(j)));
      c_part = round_down(c_part / round_up(factor));
    }
    const double tail = round_up(sched.sum_inv_tail(jc));
    res.C = round_down(c_part * round_down(std::exp(-tail)));
  }

  // truncation level J
  int j_end;
  if (!model.width_based()) {
    j_end = horizon;
    res.finite_horizon = true;
    res.horizon_k = horizon;
    if (j_end <= res.k0) {
      j_end = res.k0;  // empty product: the bound covers level k0 only
      res.reason = "table ends at k0; bound covers level k0 only";
    }
  } else {
    j_end = std::max(res.k0, sched.j_star);
    while (j_end < res.k0 + 4000) {
      const double next = delta_at(j_end + 1);
      if (!(next > 1e-18)) break;
      ++j_end;
    }
  }
  res.truncation_level = j_end;

  double prod = 1.0;
  for (int j = res.k0 + 1; j <= j_end; ++j) {
    const double dj = delta_at(j);
    if (std::isnan(dj)) break;
    if (!(dj < 0.5)) {
      res.reason = "delta_" + std::to_string(j) + " = " + std::to_string(dj) +
                   " >= 1/2";
      res.valid = false;
      return res;
    }
    res.delta_levels.push_back(dj);
    const double factor = round_down(1.0 - 2.0 * dj);
    res.factors.push_back(factor);
    prod = round_down(prod * factor);
  }

  // certified tail of prod_{j>J} (1 - 2 delta_j)
  res.tail_bound = 1.0;
  if (model.width_based()) {
    const double d_next = delta_at(j_end + 1);
    if (d_next > 0.0) {
      if (!(d_next < 0.5)) {
        res.reason = "tail start delta >= 1/2";
        return res;
      }
      double ratio;  // upper bound on delta_{j+1}/delta_j beyond j_end
      const double w_next = sched.width(j_end + 1);
      if (model.kind == DeltaModel::Kind::polynomial) {
        ratio = std::pow(sched.rho_star, -model.alpha);
      } else {
        ratio = std::pow(model.alpha,
                         (sched.rho_star - 1.0) * (w_next + 2.0));
      }
      if (!(ratio < 1.0)) {
        res.reason = "tail ratio is not contracting";
        return res;
      }
      // sum_{j>J} delta_j <= d_next / (1 - ratio); then
      // prod (1-2d_j) >= exp(-2 sum / (1 - 2 d_next))
      const double sum_tail = round_up(d_next / (1.0 - ratio));
      const double exponent = round_up(2.0 * sum_tail / (1.0 - 2.0 * d_next));
      res.tail_bound = round_down(std::exp(-exponent));
    }
  }

  double bound = round_down(lambda_k0 * res.C);
  bound = round_down(bound * prod);
  bound = round_down(bound * res.tail_bound);
  res.lower_bound = std::max(0.0, bound);

  // the geometric construction needs s_k <= l_k/8; warn where it fails
  int bad_levels = 0;
  int first_bad = -1;
  for (int j = res.k0 + 1; j <= std::min(j_end, res.k0 + 256); ++j)
    if (8.0 * static_cast<double>(sched.s(j)) > ell(j, sched.lattice_dim)) {
      ++bad_levels;
      if (first_bad < 0) first_bad = j;
    }
  if (bad_levels > 0)
    res.warnings.push_back(
        "s_k > l_k/8 on " + std::to_string(bad_levels) +
        " used level(s) starting at k=" + std::to_string(first_bad) +
        "; the s-decomposition is infeasible there");

  res.valid = true;
  return res;
}

// ---- thresholds ---------------------------------------------------------------

LatticeKind parse_lattice_kind(const std::string& text) {
  if (text == "1d" || text == "chain" || text == "chain_1d")
    return LatticeKind::chain_1d;
  if (text == "square" || text == "2d_square" || text == "square_2d")
    return LatticeKind::square_2d;
  if (text == "hex" || text == "hexagonal" || text == "2d_hex")
    return LatticeKind::hexagonal_2d;
  throw ConfigError("unknown lattice kind '" + text + "'");
}

std::string lattice_kind_name(LatticeKind k) {
  switch (k) {
    case LatticeKind::chain_1d: return "chain_1d";
    case LatticeKind::square_2d: return "square_2d";
    default: return "hexagonal_2d";
  }
}

nlohmann::json ThresholdReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ThresholdRow& r : rows)
    rows_json.push_back({{"n", r.n},
                         {"gap", r.gap},
                         {"knabe_1d", r.knabe_1d},
                         {"gosset_1d", r.gosset_1d},
                         {"knabe_hex", r.knabe_hex},
                         {"gosset_square", r.gosset_square},
                         {"log_threshold", r.log_threshold},
                         {"clears_knabe_1d", r.clears_knabe_1d},
                         {"clears_gosset_1d", r.clears_gosset_1d},
                         {"clears_knabe_hex", r.clears_knabe_hex},
                         {"clears_gosset_square", r.clears_gosset_square},
                         {"clears_log", r.clears_log},
                         {"clears_matching", r.clears_matching}});
  return {{"kind", lattice_kind_name(kind)},
          {"C", c},
          {"eps", eps},
          {"rows", rows_json}};
}

std::string ThresholdReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "n,gap,knabe_1d,gosset_1d,knabe_hex,gosset_square,log_threshold,"
        "clears_matching\n";
  for (const ThresholdRow& r : rows)
    os << r.n << ',' << r.gap << ',' << r.knabe_1d << ',' << r.gosset_1d << ','
       << r.knabe_hex << ',' << r.gosset_square << ',' << r.log_threshold
       << ',' << (r.clears_matching ? 1 : 0) << '\n';
  return os.str();
}

ThresholdReport threshold_check(const std::vector<std::pair<int, double>>& gaps,
                                LatticeKind kind, double c, double eps) {
  ThresholdReport rep;
  rep.kind = kind;
  rep.c = c;
  rep.eps = eps;
  for (const auto& [n, gap] : gaps) {
    if (n < 2) throw ConfigError("threshold_check: need n >= 2");
    ThresholdRow row;
    row.n = n;
    row.gap = gap;
    row.knabe_1d = 1.0 / (n - 1.0);
    row.gosset_1d = 6.0 / (static_cast<double>(n) * (n + 1.0));
    row.knabe_hex = 1.0 / (3.0 * n - 1.0);
    row.gosset_square = 8.0 / (static_cast<double>(n) * n);
    row.log_threshold = c * std::pow(std::log(double(n)), 2.0 + eps) / n;
    row.clears_knabe_1d = gap > row.knabe_1d;
    row.clears_gosset_1d = gap > row.gosset_1d;
    row.clears_knabe_hex = gap > row.knabe_hex;
    row.clears_gosset_square = gap > row.gosset_square;
    row.clears_log = gap > row.log_threshold;
    switch (kind) {
      case LatticeKind::chain_1d:
        row.clears_matching = row.clears_knabe_1d && row.clears_gosset_1d;
        break;
      case LatticeKind::square_2d:
        row.clears_matching = row.clears_gosset_square;
        break;
      default:
        row.clears_matching = row.clears_knabe_hex;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

// ---- PVBS -----------------------------------------------------------------------

static bool is_box(const Region& r) {
  if (r.empty()) return false;
  std::size_t cells = 1;
  for (int e : r.extents()) cells *= static_cast<std::size_t>(e) + 1;
  return cells == r.size();
}

double pvbs_normalization(const Region& x, const std::vector<double>& lambdas) {
  if (x.empty()) return 0.0;
  if (static_cast<int>(lambdas.size()) != x.dim())
    throw ConfigError("pvbs: lambda count must match the dimension");
  for (double l : lambdas)
    if (l <= 0.0) throw ConfigError("pvbs: lambdas must be positive");
  if (is_box(x)) {
    // per-axis geometric sums
    const std::vector<int> lo = x.bbox_min();
    const std::vector<int> ext = x.extents();
    double prod = 1.0;
    for (int j = 0; j < x.dim(); ++j) {
      double axis = 0.0;
      for (int t = 0; t <= ext[j]; ++t)
        axis += std::pow(lambdas[j], 2.0 * (lo[j] + t));
      prod *= axis;
    }
    return prod;
  }
  double total = 0.0;
  for (const Site& s : x.sites()) {
    double w = 1.0;
    for (int j = 0; j < x.dim(); ++j) w *= std::pow(lambdas[j], 2.0 * s.x[j]);
    total += w;
  }
  return total;
}

DeltaEstimate pvbs_delta(const Region& a, const Region& b,
                         const std::vector<double>& lambdas) {
  if (a.dim() != b.dim()) throw ConfigError("pvbs delta: dimension mismatch");
  if (!is_box(a) || !is_box(b))
    throw ConfigError("pvbs delta: A and B must be rectangles");
  const Region overlap = region_intersection(a, b);
  if (overlap.empty())
    throw ConfigError("pvbs delta: A and B must overlap");
  const double ca = pvbs_normalization(a, lambdas);
  const double cb = pvbs_normalization(b, lambdas);
  const double ca_b = pvbs_normalization(region_difference(a, b), lambdas);
  const double cb_a = pvbs_normalization(region_difference(b, a), lambdas);
  DeltaEstimate est;
  est.method = DeltaMethod::closed_form_pvbs;
  est.a = a;
  est.b = b;
  est.overlap = overlap_size(overlap);
  est.value = std::sqrt((ca_b * cb_a) / (ca * cb));
  est.value_form2 = est.value;
  return est;
}

double pvbs_bound(int l, int l_a, int l_b, double lambda) {
  if (lambda <= 0.0) throw ConfigError("pvbs bound: lambda must be positive");
  if (lambda == 1.0)
    throw ConfigError("pvbs bound: undefined at lambda = 1");
  if (l < 0 || l_a <= l || l_b <= l)
    throw ConfigError("pvbs bound: need 0 <= l < min(l_A, l_B)");
  const double mu = std::min(lambda, 1.0 / lambda);
  const double denom =
      (1.0 - std::pow(mu, 2.0 * (l_a + 1))) *
      (1.0 - std::pow(mu, 2.0 * (l_b + 1)));
  return std::pow(mu, l + 1.0) / std::sqrt(denom);
}

CertificationResult pvbs_certify(const std::vector<double>& lambdas,
                                 const SSchedule& sched, double lambda_k0) {
  for (double l : lambdas)
    if (l <= 0.0) throw ConfigError("pvbs certify: lambdas must be positive");
  double star = 0.0;
  for (double l : lambdas) star = std::max(star, std::min(l, 1.0 / l));
  if (std::abs(star - 1.0) <= 1e-12) {
    CertificationResult res;
    res.lambda_k0 = lambda_k0;
    res.schedule_name = sched.name;
    res.schedule_certificate = sched.certificate();
    res.model = "pvbs(lambda_*=1)";
    res.reason =
        "some lambda_j = 1: delta(l) is bounded away from zero and the "
        "rectangular finite-size gap closes; no certificate";
    res.valid = false;
    return res;
  }
  return recursion_bound(lambda_k0, std::nullopt, sched,
                         DeltaModel::pvbs(lambdas));
}

}  // namespace gapcert
