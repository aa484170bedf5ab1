#include "gapcert/model.hpp"

#include <algorithm>
#include <cmath>

#include "gapcert/spectral.hpp"

namespace gapcert {

bool term_order_less(const InteractionTerm& a, const InteractionTerm& b) {
  const auto amin = a.support.sites().front();
  const auto bmin = b.support.sites().front();
  if (amin != bmin) return amin < bmin;
  const auto aext = a.support.extents();
  const auto bext = b.support.extents();
  if (aext != bext) return aext < bext;
  return a.support.sites() < b.support.sites();
}

LocalHamiltonian::LocalHamiltonian(std::string name, int dim, int local_dim,
                                   int range, Generator gen)
    : name_(std::move(name)),
      dim_(dim),
      local_dim_(local_dim),
      range_(range),
      gen_(std::move(gen)) {
  if (dim_ < 1 || local_dim_ < 2 || range_ < 1)
    throw ConfigError("model: need dim >= 1, local_dim >= 2, range >= 1");
}

std::vector<InteractionTerm> LocalHamiltonian::restrict(
    const Region& region) const {
  if (region.empty()) throw ConfigError("restrict: empty region");
  if (region.dim() != dim_)
    throw ConfigError("restrict: region dimension mismatch");
  std::vector<InteractionTerm> terms = gen_(region);
  std::vector<InteractionTerm> kept;
  for (InteractionTerm& t : terms)
    if (t.support.is_subset_of(region)) kept.push_back(std::move(t));
  std::sort(kept.begin(), kept.end(), term_order_less);
  return kept;
}

double projector_deviation(const Mat& m) {
  const double idem = (m * m - m).cwiseAbs().maxCoeff();
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  return std::max(idem, herm);
}

bool is_projector(const Mat& m, double tol) {
  return projector_deviation(m) <= tol;
}

// ---- builtin models -------------------------------------------------------

// Nearest-neighbor pairs (Euclidean distance 1) inside the region.
static std::vector<std::pair<Site, Site>> nn_pairs(const Region& region) {
  std::vector<std::pair<Site, Site>> pairs;
  for (const Site& s : region.sites())
    for (int j = 0; j < region.dim(); ++j) {
      Site t = s;
      t.x[j] += 1;
      if (region.contains(t)) pairs.emplace_back(s, t);
    }
  return pairs;
}

static Mat singlet_projector() {
  // |s> = (|01> - |10>)/sqrt(2) on a qubit pair
  Mat p = Mat::Zero(4, 4);
  p(1, 1) = 0.5;
  p(2, 2) = 0.5;
  p(1, 2) = -0.5;
  p(2, 1) = -0.5;
  return p;
}

static Mat spin1_matrices(int which) {
  const double s = 1.0 / std::sqrt(2.0);
  Mat m = Mat::Zero(3, 3);
  switch (which) {
    case 0:  // Sx
      m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = s;
      break;
    case 1:  // Sy
      m(0, 1) = cplx(0, -s);
      m(1, 0) = cplx(0, s);
      m(1, 2) = cplx(0, -s);
      m(2, 1) = cplx(0, s);
      break;
    default:  // Sz
      m(0, 0) = 1.0;
      m(2, 2) = -1.0;
      break;
  }
  return m;
}

static Mat aklt_projector() {
  // Projector onto the spin-2 subspace of two spin-1s:
  // P2 = 1/3 + (S.S)/2 + (S.S)^2/6
  Mat ss = Mat::Zero(9, 9);
  for (int a = 0; a < 3; ++a) {
    Mat sa = spin1_matrices(a);
    ss += kron(sa, sa);
  }
  Mat id = Mat::Identity(9, 9);
  return id / 3.0 + ss / 2.0 + (ss * ss) / 6.0;
}

LocalHamiltonian builtin_model(const std::string& name, int dim) {
  if (name == "product") {
    Mat p = Mat::Zero(2, 2);
    p(1, 1) = 1.0;
    return LocalHamiltonian(
        "product", dim, 2, 1, [p](const Region& region) {
          std::vector<InteractionTerm> terms;
          for (const Site& s : region.sites()) {
            InteractionTerm t;
            t.support = Region(region.dim(), {s});
            t.matrix = p;
            terms.push_back(std::move(t));
          }
          return terms;
        });
  }
  if (name == "heisenberg_fm") {
    Mat p = singlet_projector();
    return LocalHamiltonian(
        "heisenberg_fm", dim, 2, 2, [p](const Region& region) {
          std::vector<InteractionTerm> terms;
          for (auto& [a, b] : nn_pairs(region)) {
            InteractionTerm t;
            t.support = Region(region.dim(), {a, b});
            t.matrix = p;
            terms.push_back(std::move(t));
          }
          return terms;
        });
  }
  if (name == "aklt") {
    Mat p = aklt_projector();
    return LocalHamiltonian(
        "aklt", dim, 3, 2, [p](const Region& region) {
          std::vector<InteractionTerm> terms;
          for (auto& [a, b] : nn_pairs(region)) {
            InteractionTerm t;
            t.support = Region(region.dim(), {a, b});
            t.matrix = p;
            terms.push_back(std::move(t));
          }
          return terms;
        });
  }
  throw ConfigError("unknown builtin model '" + name + "'");
}

// ---- explicit term lists --------------------------------------------------

static InteractionTerm sanitize_term(InteractionTerm t, int local_dim,
                                     int range) {
  const auto n = t.support.size();
  std::size_t want = 1;
  for (std::size_t i = 0; i < n; ++i) want *= local_dim;
  if (static_cast<std::size_t>(t.matrix.rows()) != want ||
      static_cast<std::size_t>(t.matrix.cols()) != want)
    throw ConfigError("term matrix dimension does not match d^|support|");
  if (region_diameter(t.support) > static_cast<double>(range))
    throw ConfigError("term support diameter exceeds the declared range");
  const double scale = std::max(1.0, t.matrix.cwiseAbs().maxCoeff());
  if ((t.matrix - t.matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ConfigError("term matrix is not Hermitian");
  t.matrix = 0.5 * (t.matrix + t.matrix.adjoint());
  if (!is_projector(t.matrix)) {
    // Shift the ground energy to zero, then keep only the projector off the
    // kernel. The original matrix stays on the term for reporting.
    EigenSystem es = eigensystem(t.matrix);
    t.raw = std::make_shared<Mat>(t.matrix);
    const double e0 = es.values(0);
    const double span = std::max(1.0, es.values(es.values.size() - 1) - e0);
    Mat proj = Mat::Zero(t.matrix.rows(), t.matrix.cols());
    for (Eigen::Index i = 0; i < es.values.size(); ++i)
      if (es.values(i) - e0 > 1e-10 * span)
        proj += es.vectors.col(i) * es.vectors.col(i).adjoint();
    t.matrix = proj;
    t.projectorized = true;
  }
  return t;
}

LocalHamiltonian model_from_terms(std::string name, int dim, int local_dim,
                                  int range,
                                  std::vector<InteractionTerm> terms) {
  for (InteractionTerm& t : terms) {
    if (t.support.dim() != dim)
      throw ConfigError("term support dimension mismatch");
    if (t.support.empty()) throw ConfigError("term with empty support");
    t = sanitize_term(std::move(t), local_dim, range);
  }
  auto store = std::make_shared<std::vector<InteractionTerm>>(std::move(terms));
  return LocalHamiltonian(std::move(name), dim, local_dim, range,
                          [store](const Region&) { return *store; });
}

// ---- JSON model files ------------------------------------------------------

static Mat matrix_from_json(const nlohmann::json& rows, std::size_t dim) {
  if (rows.size() != dim * dim)
    throw ConfigError("model file: matrix entry count != dim^2");
  Mat m(dim, dim);
  std::size_t idx = 0;
  for (const auto& entry : rows) {
    if (!entry.is_array() || entry.size() != 2)
      throw ConfigError("model file: matrix entries must be [re,im] pairs");
    m(idx / dim, idx % dim) = cplx(entry[0].get<double>(),
                                   entry[1].get<double>());
    ++idx;
  }
  return m;
}

LocalHamiltonian load_model(const nlohmann::json& doc) {
  for (const char* field : {"dim", "local_dim", "range"})
    if (!doc.contains(field))
      throw ConfigError(std::string("model file: missing field ") + field);
  const int dim = doc.at("dim").get<int>();
  const int local_dim = doc.at("local_dim").get<int>();
  const int range = doc.at("range").get<int>();

  if (doc.contains("builtin")) {
    const auto& b = doc.at("builtin");
    LocalHamiltonian h = builtin_model(b.at("name").get<std::string>(), dim);
    if (h.dim() != dim || h.local_dim() != local_dim || h.range() != range)
      throw ConfigError("model file: builtin parameters disagree with header");
    return h;
  }
  if (!doc.contains("terms"))
    throw ConfigError("model file: need either builtin or terms");

  std::vector<InteractionTerm> terms;
  for (const auto& jt : doc.at("terms")) {
    InteractionTerm t;
    t.support = Region(dim, [&] {
      std::vector<Site> sites;
      for (const auto& coords : jt.at("support"))
        sites.push_back({coords.get<std::vector<int>>()});
      return sites;
    }());
    std::size_t d = 1;
    for (std::size_t i = 0; i < t.support.size(); ++i) d *= local_dim;
    t.matrix = matrix_from_json(jt.at("matrix"), d);
    terms.push_back(std::move(t));
  }
  std::string name = doc.value("name", std::string("custom"));
  return model_from_terms(std::move(name), dim, local_dim, range,
                          std::move(terms));
}

nlohmann::json model_to_json(const LocalHamiltonian& h, const Region& region) {
  nlohmann::json terms = nlohmann::json::array();
  for (const InteractionTerm& t : h.restrict(region)) {
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index i = 0; i < t.matrix.rows(); ++i)
      for (Eigen::Index j = 0; j < t.matrix.cols(); ++j)
        entries.push_back({t.matrix(i, j).real(), t.matrix(i, j).imag()});
    terms.push_back({{"support", region_to_json(t.support)["sites"]},
                     {"matrix", entries}});
  }
  return {{"format", "gapcert-model/1"},
          {"name", h.name()},
          {"dim", h.dim()},
          {"local_dim", h.local_dim()},
          {"range", h.range()},
          {"terms", terms}};
}

bool check_frustration_free(const LocalHamiltonian& h, const Region& region,
                            double tol, const SolverOptions& opts) {
  AssembledOperator op = assemble(h, region, opts);
  if (op.terms.empty()) return true;  // H = 0
  SolverOptions gp_opts = opts;
  gp_opts.kernel_tol = tol;
  GroundProjector p = ground_projector(op, gp_opts);
  if (p.basis.cols() == 0) return false;  // lowest eigenvalue above tol
  for (std::size_t t = 0; t < op.terms.size(); ++t)
    for (Eigen::Index c = 0; c < p.basis.cols(); ++c)
      if (op.apply_single_term(t, p.basis.col(c)).norm() > tol) return false;
  return true;
}

}  // namespace gapcert
