#include "gapcert/dl.hpp"

#include <algorithm>
#include <set>

namespace gapcert {

LayerSchedule layer_schedule(const std::vector<InteractionTerm>& terms) {
  LayerSchedule sched;
  sched.layer_of_term.assign(terms.size(), -1);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    int layer = 0;
    for (;; ++layer) {
      if (layer == sched.g) {
        sched.layers.emplace_back();
        ++sched.g;
      }
      bool conflict = false;
      for (int other : sched.layers[layer])
        if (!region_intersection(terms[t].support, terms[other].support)
                 .empty()) {
          conflict = true;
          break;
        }
      if (!conflict) break;
    }
    sched.layers[layer].push_back(static_cast<int>(t));
    sched.layer_of_term[t] = layer;
  }
  return sched;
}

DLOperator::DLOperator(std::shared_ptr<const AssembledOperator> op,
                       LayerSchedule sched, std::vector<int> order)
    : op_(std::move(op)), sched_(std::move(sched)), order_(std::move(order)) {
  if (static_cast<int>(order_.size()) != sched_.g)
    throw ConfigError("dl operator: order must be a permutation of the layers");
  std::vector<int> check = order_;
  std::sort(check.begin(), check.end());
  for (int i = 0; i < sched_.g; ++i)
    if (check[i] != i)
      throw ConfigError("dl operator: order must be a permutation of the layers");
}

Vec DLOperator::apply_layer(int layer, Vec phi) const {
  // product of (1 - h_t) over a layer of disjoint supports
  for (int t : sched_.layers[layer]) phi -= op_->apply_single_term(t, phi);
  return phi;
}

Vec DLOperator::apply(Vec phi) const {
  // L = L_{o(1)} ... L_{o(g)}: the rightmost factor acts first
  for (int i = sched_.g - 1; i >= 0; --i) phi = apply_layer(order_[i], phi);
  return phi;
}

Vec DLOperator::apply_adjoint(Vec phi) const {
  // layer factors are Hermitian, so L^dag reverses the order
  for (int i = 0; i < sched_.g; ++i) phi = apply_layer(order_[i], phi);
  return phi;
}

Vec DLOperator::apply_power(int q, Vec phi) const {
  for (int i = 0; i < q; ++i) phi = apply(phi);
  return phi;
}

Mat DLOperator::matrix() const {
  const std::size_t dim = op_->dim;
  Mat out = Mat::Identity(dim, dim);
  Vec col(dim);
  Mat applied(dim, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    col = out.col(c);
    applied.col(c) = apply(col);
  }
  return applied;
}

DLOperator build_dl(std::shared_ptr<const AssembledOperator> op,
                    std::optional<std::vector<int>> order) {
  LayerSchedule sched = layer_schedule(op->terms);
  std::vector<int> ord;
  if (order) {
    ord = *order;
  } else {
    ord.resize(sched.g);
    for (int i = 0; i < sched.g; ++i) ord[i] = i;
  }
  return DLOperator(std::move(op), std::move(sched), std::move(ord));
}

double dl_functional(const DLOperator& l, const Vec& phi) {
  if (static_cast<std::size_t>(phi.size()) != l.op().dim)
    throw ConfigError("dl functional: state dimension mismatch");
  return phi.squaredNorm() - l.apply(phi).squaredNorm();
}

std::pair<double, Vec> dl_contraction(const DLOperator& l,
                                      const GroundProjector& p,
                                      const SolverOptions& opts) {
  const std::size_t dim = l.op().dim;
  auto apply_lp = [&](const Vec& v) { return l.apply(p.apply_perp(v)); };
  auto apply_adj = [&](const Vec& v) { return p.apply_perp(l.apply_adjoint(v)); };
  if (dim <= opts.dense_threshold && dim <= 1024) {
    Mat m(dim, dim);
    Vec e = Vec::Zero(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      e(c) = 1.0;
      m.col(c) = apply_lp(e);
      e(c) = 0.0;
    }
    return top_singular_pair(m);
  }
  const double sigma =
      op_norm_apply(apply_lp, apply_adj, dim, opts.norm_tol, opts.seed);
  // witness vector from the Gram power iteration
  Rng rng(opts.seed + 1);
  Vec v = random_state(dim, rng);
  v.normalize();
  for (int it = 0; it < 600; ++it) {
    Vec w = apply_adj(apply_lp(v));
    double n = w.norm();
    if (n < 1e-280) break;
    v = w / n;
  }
  return {sigma, v};
}

nlohmann::json DlReport::to_json() const {
  return {{"samples", samples},        {"seed", seed},
          {"g", g},                    {"tol", tol},
          {"worst_margin", worst_margin},
          {"norm_lp_perp_sq", norm_lp_perp_sq},
          {"corollary_rhs", corollary_rhs},
          {"pass_samples", pass_samples},
          {"pass_corollary", pass_corollary},
          {"pass", pass()}};
}

DlReport verify_dl(const DLOperator& l, const GroundProjector& p,
                   const SpectralReport& spec, int samples, std::uint64_t seed,
                   double tol, const SolverOptions& opts) {
  DlReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.g = l.g();
  rep.tol = tol;
  const double g2 = static_cast<double>(l.g()) * l.g();
  Rng rng(seed);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    Vec phi = random_state(l.op().dim, rng);
    Vec lphi = l.apply(phi);
    const double e_l = std::real(lphi.dot(l.op().apply(lphi)));
    const double dl = phi.squaredNorm() - lphi.squaredNorm();
    rep.worst_margin = std::min(rep.worst_margin, g2 * dl - e_l);
  }
  rep.pass_samples = rep.worst_margin >= -tol;

  const double sigma = dl_contraction(l, p, opts).first;
  rep.norm_lp_perp_sq = sigma * sigma;
  rep.corollary_rhs = 1.0 / (1.0 + spec.gap / g2);
  rep.pass_corollary = rep.norm_lp_perp_sq <= rep.corollary_rhs + tol;
  return rep;
}

nlohmann::json ConverseDlReport::to_json() const {
  return {{"samples", samples},
          {"seed", seed},
          {"tol", tol},
          {"worst_margin", worst_margin},
          {"pass", pass()}};
}

ConverseDlReport verify_converse_dl(const DLOperator& l, int samples,
                                    std::uint64_t seed, double tol) {
  ConverseDlReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.tol = tol;
  Rng rng(seed);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    Vec phi = random_state(l.op().dim, rng);
    const double e = dirichlet(l.op(), phi);
    const double dl = dl_functional(l, phi);
    rep.worst_margin = std::min(rep.worst_margin, 4.0 * e - dl);
  }
  rep.pass_samples = rep.worst_margin >= -tol;
  return rep;
}

nlohmann::json SandwichReport::to_json() const {
  return {{"samples", samples},
          {"seed", seed},
          {"tol", tol},
          {"worst_lower", worst_lower},
          {"worst_upper", worst_upper},
          {"norm_lp_perp_sq", norm_lp_perp_sq},
          {"tightness_rel", tightness_rel},
          {"corollary_margin", corollary_margin},
          {"pass", pass()}};
}

SandwichReport verify_sandwich(const DLOperator& l, const GroundProjector& p,
                               const SpectralReport& spec, int samples,
                               std::uint64_t seed, double tol,
                               double tightness_tol,
                               const SolverOptions& opts) {
  SandwichReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.tol = tol;
  auto [sigma, witness] = dl_contraction(l, p, opts);
  rep.norm_lp_perp_sq = sigma * sigma;
  const double upper_const = 1.0 / (1.0 - rep.norm_lp_perp_sq);

  Rng rng(seed);
  rep.worst_lower = std::numeric_limits<double>::infinity();
  rep.worst_upper = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    Vec phi = random_state(l.op().dim, rng);
    const double var = variance(p, phi);
    const double dl = dl_functional(l, phi);
    rep.worst_lower = std::min(rep.worst_lower, var - dl);
    rep.worst_upper = std::min(rep.worst_upper, dl * upper_const - var);
  }
  rep.pass_samples = rep.worst_lower >= -tol && rep.worst_upper >= -tol;

  // tightness at the top singular vector of L P^perp
  {
    const Vec& phi = witness;
    const double var = variance(p, phi);
    const double dl = dl_functional(l, phi);
    const double bound = dl * upper_const;
    rep.tightness_rel = std::abs(bound - var) / std::max(1e-300, var);
    rep.pass_tightness = rep.tightness_rel <= tightness_tol;
  }

  rep.corollary_margin = spec.gap - (1.0 - rep.norm_lp_perp_sq) / 4.0;
  rep.pass_corollary = rep.corollary_margin >= -tol;
  return rep;
}

// ---- splitting --------------------------------------------------------------

namespace {

std::set<Site> site_set(const Region& r) {
  return {r.sites().begin(), r.sites().end()};
}

bool touches(const Region& support, const std::set<Site>& cone) {
  for (const Site& s : support.sites())
    if (cone.count(s)) return true;
  return false;
}

}  // namespace

SplitPair split_factors(const DLOperator& l, const Region& a, const Region& b,
                        int q) {
  const AssembledOperator& op = l.op();
  if (region_union(a, b) != op.region)
    throw ConfigError("split: A u B must equal the operator's region");
  const Region seed_a = region_difference(op.region, b);  // lives in A
  const Region seed_b = region_difference(op.region, a);  // lives in B
  if (seed_a.empty() || seed_b.empty())
    throw ConfigError("split: degenerate split, one side covers the region");
  const double l_dist = region_dist(seed_a, seed_b);
  if (static_cast<double>(q) > l_dist)
    throw ConfigError("split: q exceeds l = dist(region\\A, region\\B) = " +
                      std::to_string(l_dist));
  if (q < 1) throw ConfigError("split: q must be positive");

  const int g = l.g();
  const int n = g * q;
  const int first_half = (g * q) / 2;  // layer instances applied first

  // side[p-1][i] for term sched.layers[layer(p)][i]
  const LayerSchedule& sched = l.schedule();
  auto layer_at = [&](int p) { return l.order()[(p - 1) % g]; };
  std::vector<std::vector<char>> side(n);

  // Instances applied first (rightmost in the written product): the light
  // cone grown from region\B collects M_A factors.
  std::set<Site> cone_a = site_set(seed_a);
  for (int p = n; p > n - first_half; --p) {
    const int layer = layer_at(p);
    auto& assignment = side[p - 1];
    std::vector<const Region*> grown;
    for (int t : sched.layers[layer]) {
      if (touches(op.terms[t].support, cone_a)) {
        assignment.push_back('A');
        grown.push_back(&op.terms[t].support);
      } else {
        assignment.push_back('B');
      }
    }
    for (const Region* r : grown)
      for (const Site& s : r->sites()) cone_a.insert(s);
  }

  // Remaining instances, processed from the other end of the product with
  // the roles of A and B reversed.
  std::set<Site> cone_b = site_set(seed_b);
  for (int p = 1; p <= n - first_half; ++p) {
    const int layer = layer_at(p);
    auto& assignment = side[p - 1];
    std::vector<const Region*> grown;
    for (int t : sched.layers[layer]) {
      if (touches(op.terms[t].support, cone_b)) {
        assignment.push_back('B');
        grown.push_back(&op.terms[t].support);
      } else {
        assignment.push_back('A');
      }
    }
    for (const Region* r : grown)
      for (const Site& s : r->sites()) cone_b.insert(s);
  }

  SplitPair split;
  split.op = l.op_ptr();
  split.region_a = a;
  split.region_b = b;
  split.q = q;
  split.g = g;
  split.order = l.order();
  for (int p = 1; p <= n; ++p) {
    const int layer = layer_at(p);
    for (std::size_t i = 0; i < sched.layers[layer].size(); ++i) {
      const int t = sched.layers[layer][i];
      const char s = side[p - 1][i];
      split.trace.emplace_back(p, t, s);
      if (s == 'A')
        split.ma.push_back({p, t});
      else
        split.mb.push_back({p, t});
    }
  }

  // Support containment: each factor must act inside its side.
  for (const SplitFactor& f : split.ma)
    if (!op.terms[f.term].support.is_subset_of(a))
      throw ConfigError("split: an M_A factor leaks outside A (q too large)");
  for (const SplitFactor& f : split.mb)
    if (!op.terms[f.term].support.is_subset_of(b))
      throw ConfigError("split: an M_B factor leaks outside B (q too large)");

  // Ordered-product identity: every M_B factor must commute with every
  // M_A factor at a later written position.
  for (const SplitFactor& fb : split.mb)
    for (const SplitFactor& fa : split.ma)
      if (fb.position < fa.position &&
          !region_intersection(op.terms[fb.term].support,
                               op.terms[fa.term].support)
               .empty())
        throw ConfigError(
            "split: the A and B light cones collide; L^q does not factor for "
            "this (A, B, q)");
  return split;
}

static Vec apply_factor_list(const AssembledOperator& op,
                             const std::vector<SplitFactor>& factors, Vec phi,
                             bool adjoint) {
  // written order: the last factor in the list acts first; the adjoint
  // reverses the order (factors are Hermitian)
  if (!adjoint) {
    for (auto it = factors.rbegin(); it != factors.rend(); ++it)
      phi -= op.apply_single_term(it->term, phi);
  } else {
    for (const SplitFactor& f : factors)
      phi -= op.apply_single_term(f.term, phi);
  }
  return phi;
}

Vec SplitPair::apply_ma(Vec phi) const {
  return apply_factor_list(*op, ma, std::move(phi), false);
}
Vec SplitPair::apply_ma_adjoint(Vec phi) const {
  return apply_factor_list(*op, ma, std::move(phi), true);
}
Vec SplitPair::apply_mb(Vec phi) const {
  return apply_factor_list(*op, mb, std::move(phi), false);
}
Vec SplitPair::apply_mb_adjoint(Vec phi) const {
  return apply_factor_list(*op, mb, std::move(phi), true);
}

Vec SplitPair::apply_lq(Vec phi) const {
  // all factors in written order: positions ascending, canonical within
  std::vector<SplitFactor> all;
  for (const auto& [p, t, s] : trace) all.push_back({p, t});
  return apply_factor_list(*op, all, std::move(phi), false);
}

Vec SplitPair::apply_lq_adjoint(Vec phi) const {
  std::vector<SplitFactor> all;
  for (const auto& [p, t, s] : trace) all.push_back({p, t});
  return apply_factor_list(*op, all, std::move(phi), true);
}

static Mat materialize(const std::function<Vec(Vec)>& apply, std::size_t dim) {
  Mat out(dim, dim);
  Vec e = Vec::Zero(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    e(c) = 1.0;
    out.col(c) = apply(e);
    e(c) = 0.0;
  }
  return out;
}

Mat SplitPair::matrix_ma() const {
  return materialize([this](Vec v) { return apply_ma(std::move(v)); }, op->dim);
}
Mat SplitPair::matrix_mb() const {
  return materialize([this](Vec v) { return apply_mb(std::move(v)); }, op->dim);
}

nlohmann::json SplitReport::to_json() const {
  return {{"q", q},
          {"l_dist", l_dist},
          {"eps", eps},
          {"product_residual", product_residual},
          {"norm_pa_ma", norm_pa_ma},
          {"norm_pa_ma_mb", norm_pa_ma_mb},
          {"norm_pb_mb", norm_pb_mb},
          {"norm_pb_mb_ma", norm_pb_mb_ma},
          {"product_tol", product_tol},
          {"norm_tol", norm_tol},
          {"pass", pass()}};
}

SplitReport verify_split(const SplitPair& split, const LocalHamiltonian& h,
                         double product_tol, double norm_tol,
                         const SolverOptions& opts) {
  const AssembledOperator& op = *split.op;
  const std::size_t dim = op.dim;
  SplitReport rep;
  rep.q = split.q;
  rep.product_tol = product_tol;
  rep.norm_tol = norm_tol;
  rep.l_dist = region_dist(region_difference(op.region, split.region_a),
                           region_difference(op.region, split.region_b));

  SpectralReport spec = spectral_gap(op, opts);
  rep.eps = spec.epsilon(split.g);

  EmbeddedProjector pa =
      embedded_ground_projector(h, split.region_a, op.region, opts);
  EmbeddedProjector pb =
      embedded_ground_projector(h, split.region_b, op.region, opts);

  auto norm_of = [&](const std::function<Vec(const Vec&)>& fwd,
                     const std::function<Vec(const Vec&)>& adj) {
    if (dim <= 1024) {
      Mat m = materialize([&](Vec v) { return fwd(v); }, dim);
      return op_norm(m);
    }
    return op_norm_apply([&](const Vec& v) { return fwd(v); },
                         [&](const Vec& v) { return adj(v); }, dim,
                         opts.norm_tol, opts.seed);
  };

  rep.product_residual = norm_of(
      [&](const Vec& v) {
        return Vec(split.apply_ma(split.apply_mb(v)) - split.apply_lq(v));
      },
      [&](const Vec& v) {
        return Vec(split.apply_mb_adjoint(split.apply_ma_adjoint(v)) -
                   split.apply_lq_adjoint(v));
      });

  // P_A - M_A and (P_A - M_A) M_B, then the same with A and B swapped
  auto diff_a = [&](const Vec& v) {
    return Vec(pa.apply(v) - split.apply_ma(v));
  };
  auto diff_a_adj = [&](const Vec& v) {
    return Vec(pa.apply(v) - split.apply_ma_adjoint(v));
  };
  auto diff_b = [&](const Vec& v) {
    return Vec(pb.apply(v) - split.apply_mb(v));
  };
  auto diff_b_adj = [&](const Vec& v) {
    return Vec(pb.apply(v) - split.apply_mb_adjoint(v));
  };

  rep.norm_pa_ma = norm_of(diff_a, diff_a_adj);
  rep.norm_pb_mb = norm_of(diff_b, diff_b_adj);
  rep.norm_pa_ma_mb =
      norm_of([&](const Vec& v) { return diff_a(split.apply_mb(v)); },
              [&](const Vec& v) { return split.apply_mb_adjoint(diff_a_adj(v)); });
  rep.norm_pb_mb_ma =
      norm_of([&](const Vec& v) { return diff_b(split.apply_ma(v)); },
              [&](const Vec& v) { return split.apply_ma_adjoint(diff_b_adj(v)); });

  const double epsq = std::pow(rep.eps, split.q);
  rep.pass_product = rep.product_residual <= product_tol;
  rep.pass_norms = rep.norm_pa_ma <= rep.eps && rep.norm_pb_mb <= rep.eps &&
                   rep.norm_pa_ma_mb <= epsq + norm_tol &&
                   rep.norm_pb_mb_ma <= epsq + norm_tol;
  return rep;
}

std::pair<SplitPair, SplitReport> split_ma_mb(
    const LocalHamiltonian& h, const Region& lambda, const Region& a,
    const Region& b, int q, const SolverOptions& opts,
    std::optional<std::vector<int>> order) {
  auto op = std::make_shared<AssembledOperator>(assemble(h, lambda, opts));
  DLOperator l = build_dl(op, order);
  SplitPair split = split_factors(l, a, b, q);
  SplitReport rep = verify_split(split, h, 1e-12, 1e-9, opts);
  return {std::move(split), std::move(rep)};
}

// ---- gamma ------------------------------------------------------------------

nlohmann::json GammaReport::to_json() const {
  return {{"gamma", gamma},
          {"has_certificate", has_certificate},
          {"bound", bound},
          {"gap", gap},
          {"crosscheck_margin", crosscheck_margin},
          {"pass_crosscheck", pass_crosscheck}};
}

double m2_gap_bound(double gamma) {
  if (gamma >= 1.0)
    throw ConfigError("m2_gap_bound: gamma >= 1 carries no certificate");
  return (1.0 - gamma) / 4.0;
}

GammaReport gamma_contraction(const AssembledOperator& op, const DLOperator& l,
                              const SolverOptions& opts, double crosscheck_tol) {
  if (!op.is_dense())
    throw BudgetError("gamma_contraction needs the dense operator");
  GammaReport rep;
  const double tol = op.kernel_tolerance(opts.kernel_tol);
  EigenSystem es = eigensystem(op.matrix());
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (es.values(i) >= tol) support.push_back(i);
  if (support.empty()) {
    // H = 0 on the space: no excitations, gamma vacuously 0
    rep.gamma = 0.0;
    rep.has_certificate = true;
    rep.bound = 0.25;
    rep.gap = 0.0;
    rep.crosscheck_margin = -rep.bound;
    rep.pass_crosscheck = false;
    return rep;
  }

  // X = V_+ S_+^{-1/2}; gamma = max eig of X^dag L^dag H L X
  Mat x(op.dim, support.size());
  for (std::size_t c = 0; c < support.size(); ++c)
    x.col(c) = es.vectors.col(support[c]) / std::sqrt(es.values(support[c]));
  Mat lx(op.dim, support.size());
  for (Eigen::Index c = 0; c < x.cols(); ++c) lx.col(c) = l.apply(x.col(c));
  Mat hlx(op.dim, support.size());
  for (Eigen::Index c = 0; c < lx.cols(); ++c)
    hlx.col(c) = op.apply(lx.col(c));
  Mat pencil = lx.adjoint() * hlx;
  rep.gamma = std::max(0.0, eigenvalues_only(pencil).maxCoeff());

  const double gap_value = es.values(support.front());
  rep.gap = gap_value;
  rep.has_certificate = rep.gamma < 1.0;
  if (rep.has_certificate) {
    rep.bound = (1.0 - rep.gamma) / 4.0;
    rep.crosscheck_margin = rep.gap - rep.bound;
    rep.pass_crosscheck = rep.crosscheck_margin >= -crosscheck_tol;
  }
  return rep;
}

}  // namespace gapcert
