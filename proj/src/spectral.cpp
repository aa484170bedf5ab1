#include "gapcert/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gapcert {

// ---- index arithmetic -------------------------------------------------------

SlotIndexer build_slot_indexer(const std::vector<int>& slots, int d,
                               int nsites, std::size_t dim) {
  SlotIndexer ix;
  std::vector<std::size_t> stride(nsites, 1);
  for (int p = nsites - 2; p >= 0; --p) stride[p] = stride[p + 1] * d;

  std::size_t sub_dim = 1;
  for (std::size_t i = 0; i < slots.size(); ++i) sub_dim *= d;
  ix.off_sub.resize(sub_dim, 0);
  for (std::size_t js = 0; js < sub_dim; ++js) {
    std::size_t rem = js, off = 0;
    for (int p = static_cast<int>(slots.size()) - 1; p >= 0; --p) {
      off += (rem % d) * stride[slots[p]];
      rem /= d;
    }
    ix.off_sub[js] = off;
  }

  std::vector<int> rest;
  for (int p = 0; p < nsites; ++p)
    if (std::find(slots.begin(), slots.end(), p) == slots.end())
      rest.push_back(p);
  const std::size_t rest_dim = dim / sub_dim;
  ix.off_rest.resize(rest_dim, 0);
  for (std::size_t jr = 0; jr < rest_dim; ++jr) {
    std::size_t rem = jr, off = 0;
    for (int p = static_cast<int>(rest.size()) - 1; p >= 0; --p) {
      off += (rem % d) * stride[rest[p]];
      rem /= d;
    }
    ix.off_rest[jr] = off;
  }
  return ix;
}

static void apply_with_indexer(const Mat& op, const SlotIndexer& ix,
                               const Vec& phi, Vec& out) {
  const std::size_t sub_dim = ix.off_sub.size();
  Vec v(sub_dim), w(sub_dim);
  for (std::size_t base : ix.off_rest) {
    for (std::size_t js = 0; js < sub_dim; ++js)
      v(js) = phi(base + ix.off_sub[js]);
    w.noalias() = op * v;
    for (std::size_t js = 0; js < sub_dim; ++js)
      out(base + ix.off_sub[js]) += w(js);
  }
}

std::vector<int> support_positions(const Region& support, const Region& whole) {
  std::vector<int> slots;
  const auto& sites = whole.sites();
  for (const Site& s : support.sites()) {
    auto it = std::lower_bound(sites.begin(), sites.end(), s);
    if (it == sites.end() || *it != s)
      throw ConfigError("support site outside the region");
    slots.push_back(static_cast<int>(it - sites.begin()));
  }
  return slots;
}

static int sites_of_dim(std::size_t dim, int d) {
  int n = 0;
  std::size_t acc = 1;
  while (acc < dim) {
    acc *= d;
    ++n;
  }
  if (acc != dim) throw ConfigError("dimension is not a power of local_dim");
  return n;
}

Vec apply_on_slots(const Mat& op, const std::vector<int>& slots, int local_dim,
                   std::size_t dim, const Vec& phi) {
  SlotIndexer ix =
      build_slot_indexer(slots, local_dim, sites_of_dim(dim, local_dim), dim);
  Vec out = Vec::Zero(dim);
  apply_with_indexer(op, ix, phi, out);
  return out;
}

Mat embed_matrix(const Mat& op, const Region& support, const Region& whole,
                 int local_dim) {
  std::size_t dim = 1;
  for (std::size_t i = 0; i < whole.size(); ++i) dim *= local_dim;
  const std::vector<int> slots = support_positions(support, whole);
  SlotIndexer ix = build_slot_indexer(slots, local_dim,
                                      static_cast<int>(whole.size()), dim);
  Mat out = Mat::Zero(dim, dim);
  const std::size_t sub_dim = ix.off_sub.size();
  for (std::size_t base : ix.off_rest)
    for (std::size_t r = 0; r < sub_dim; ++r)
      for (std::size_t c = 0; c < sub_dim; ++c)
        out(base + ix.off_sub[r], base + ix.off_sub[c]) += op(r, c);
  return out;
}

// ---- assembly ---------------------------------------------------------------

Vec AssembledOperator::apply(const Vec& phi) const {
  if (static_cast<std::size_t>(phi.size()) != dim)
    throw ConfigError("apply: state dimension mismatch");
  if (dense_) return *dense_ * phi;
  Vec out = Vec::Zero(dim);
  for (std::size_t t = 0; t < terms.size(); ++t)
    apply_with_indexer(terms[t].matrix, indexers[t], phi, out);
  return out;
}

Vec AssembledOperator::apply_single_term(std::size_t t, const Vec& phi) const {
  Vec out = Vec::Zero(dim);
  apply_with_indexer(terms[t].matrix, indexers[t], phi, out);
  return out;
}

const Mat& AssembledOperator::matrix() const {
  if (!dense_)
    throw BudgetError("dense matrix requested for an implicit operator (dim " +
                      std::to_string(dim) + ")");
  return *dense_;
}

double AssembledOperator::kernel_tolerance(double requested) const {
  if (requested > 0.0) return requested;
  return 1e-10 * std::max(1.0, norm_upper());
}

AssembledOperator assemble(const LocalHamiltonian& h, const Region& region,
                           const SolverOptions& opts) {
  if (region.empty()) throw ConfigError("assemble: empty region");
  AssembledOperator op;
  op.region = region;
  op.local_dim = h.local_dim();
  op.dim = 1;
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (op.dim > opts.max_dim / h.local_dim())
      throw BudgetError("assemble: d^|Lambda| exceeds the memory budget (" +
                        std::to_string(opts.max_dim) + ")");
    op.dim *= h.local_dim();
  }
  op.terms = h.restrict(region);
  for (const InteractionTerm& t : op.terms) {
    op.term_positions.push_back(support_positions(t.support, region));
    op.indexers.push_back(build_slot_indexer(op.term_positions.back(),
                                             op.local_dim,
                                             static_cast<int>(region.size()),
                                             op.dim));
  }

  if (op.dim <= opts.dense_threshold) {
    Mat dense = Mat::Zero(op.dim, op.dim);
    for (const InteractionTerm& t : op.terms)
      dense += embed_matrix(t.matrix, t.support, region, op.local_dim);
    op.dense_ = std::move(dense);
  }
  return op;
}

// ---- spectra ----------------------------------------------------------------

Mat GroundProjector::matrix() const { return basis * basis.adjoint(); }

Mat GroundProjector::perp_matrix() const {
  return Mat::Identity(basis.rows(), basis.rows()) - matrix();
}

double SpectralReport::epsilon(double g) const {
  return 1.0 / std::sqrt(1.0 + gap / (g * g));
}

static void check_ambiguous(double value, double tol) {
  if (value >= tol / 10.0 && value < tol)
    throw NumericsError(
        "ambiguous kernel: eigenvalue " + std::to_string(value) +
        " inside [tol/10, tol); adjust the kernel tolerance");
}

std::pair<GroundProjector, SpectralReport> ground_and_gap(
    const AssembledOperator& op, const SolverOptions& opts) {
  const double tol = op.kernel_tolerance(opts.kernel_tol);
  GroundProjector p;
  p.region = op.region;
  p.tol_used = tol;
  SpectralReport rep;
  rep.dim = op.dim;
  rep.tol_used = tol;

  if (op.terms.empty()) {
    // H = 0: every state is a ground state
    p.basis = Mat::Identity(op.dim, op.dim);
    rep.gap = 0.0;
    rep.ground_degeneracy = static_cast<int>(op.dim);
    return {std::move(p), rep};
  }

  if (op.is_dense()) {
    EigenSystem es = eigensystem(op.matrix());
    for (Eigen::Index i = 0; i < es.values.size(); ++i)
      check_ambiguous(es.values(i), tol);
    if (es.values(0) < -100.0 * tol)
      throw NumericsError("operator is not positive semidefinite");
    Eigen::Index deg = 0;
    while (deg < es.values.size() && es.values(deg) < tol) ++deg;
    p.basis = es.vectors.leftCols(deg);
    rep.ground_degeneracy = static_cast<int>(deg);
    rep.gap = deg < es.values.size() ? std::max(0.0, es.values(deg)) : 0.0;
    return {std::move(p), rep};
  }

  // implicit path: kernel vectors are the top of c - H
  const double c = op.norm_upper() + 1.0;
  ApplyFn shifted = [&](const Vec& v) { return Vec(c * v - op.apply(v)); };
  std::vector<Vec> kernel;
  double gap = 0.0;
  const int deg_cap = 160;
  int want = 8;
  while (true) {
    LanczosResult r = lanczos_largest(shifted, op.dim, want, opts.lanczos_tol,
                                      opts.seed, opts.lanczos_max_iter);
    int first_excited = -1;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      const double ev = c - r.values[i];
      check_ambiguous(ev, tol);
      if (ev >= tol) {
        first_excited = static_cast<int>(i);
        break;
      }
    }
    if (first_excited >= 0) {
      kernel.assign(r.vectors.begin(), r.vectors.begin() + first_excited);
      gap = c - r.values[first_excited];
      break;
    }
    if (static_cast<int>(r.values.size()) < want) {
      // operator exhausted without an excited state: H vanishes on the space
      kernel = r.vectors;
      gap = 0.0;
      break;
    }
    want *= 2;
    if (want > deg_cap)
      throw NumericsError("kernel degeneracy exceeds the iterative cap");
  }
  p.basis = Mat(op.dim, kernel.size());
  for (std::size_t i = 0; i < kernel.size(); ++i) p.basis.col(i) = kernel[i];
  for (const Vec& v : kernel)
    if (op.apply(v).norm() > std::max(tol, 1e-9))
      throw NumericsError("implicit kernel vector residual above tolerance");
  rep.ground_degeneracy = static_cast<int>(kernel.size());
  rep.gap = gap;
  return {std::move(p), rep};
}

GroundProjector ground_projector(const AssembledOperator& op,
                                 const SolverOptions& opts) {
  return ground_and_gap(op, opts).first;
}

SpectralReport spectral_gap(const AssembledOperator& op,
                            const SolverOptions& opts) {
  return ground_and_gap(op, opts).second;
}

double variance(const GroundProjector& p, const Vec& phi) {
  if (phi.size() != p.basis.rows())
    throw ConfigError("variance: state dimension mismatch");
  const double nn = phi.squaredNorm();
  const double pp = (p.basis.adjoint() * phi).squaredNorm();
  return nn - pp;
}

double dirichlet(const AssembledOperator& op, const Vec& phi) {
  if (static_cast<std::size_t>(phi.size()) != op.dim)
    throw ConfigError("dirichlet: state dimension mismatch");
  return std::real(phi.dot(op.apply(phi)));
}

// ---- embedded projectors ----------------------------------------------------

Vec EmbeddedProjector::apply(const Vec& phi) const {
  if (static_cast<std::size_t>(phi.size()) != dim)
    throw ConfigError("embedded projector: state dimension mismatch");
  if (static_cast<std::size_t>(sub_basis.rows()) == dim)
    return sub_basis * (sub_basis.adjoint() * phi);
  const std::size_t sub_dim = indexer.off_sub.size();
  Vec out(dim);
  Vec v(sub_dim);
  for (std::size_t base : indexer.off_rest) {
    for (std::size_t js = 0; js < sub_dim; ++js)
      v(js) = phi(base + indexer.off_sub[js]);
    Vec w = sub_basis * (sub_basis.adjoint() * v);
    for (std::size_t js = 0; js < sub_dim; ++js)
      out(base + indexer.off_sub[js]) = w(js);
  }
  return out;
}

Mat EmbeddedProjector::matrix() const {
  Mat out(dim, dim);
  Vec e = Vec::Zero(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    e(c) = 1.0;
    out.col(c) = apply(e);
    e(c) = 0.0;
  }
  return out;
}

EmbeddedProjector embedded_ground_projector(const LocalHamiltonian& h,
                                            const Region& sub,
                                            const Region& whole,
                                            const SolverOptions& opts) {
  if (!sub.is_subset_of(whole))
    throw ConfigError("embedded projector: sub-region not inside the region");
  AssembledOperator op = assemble(h, sub, opts);
  GroundProjector p = ground_projector(op, opts);
  EmbeddedProjector e;
  e.sub_basis = p.basis;
  e.slots = support_positions(sub, whole);
  e.local_dim = h.local_dim();
  e.dim = 1;
  for (std::size_t i = 0; i < whole.size(); ++i) e.dim *= h.local_dim();
  if (static_cast<std::size_t>(e.sub_basis.rows()) != e.dim)
    e.indexer = build_slot_indexer(e.slots, e.local_dim,
                                   static_cast<int>(whole.size()), e.dim);
  return e;
}

// ---- CSV --------------------------------------------------------------------

static std::string region_label(const Region& r) {
  if (r.dim() == 1 && !r.empty()) {
    const int a = r.sites().front().x[0];
    const int b = r.sites().back().x[0];
    if (static_cast<int>(r.size()) == b - a + 1)
      return std::to_string(a) + ".." + std::to_string(b);
  }
  return region_to_json(r).dump();
}

std::string spectral_csv_header() { return "region,dim,gap,degeneracy,tol"; }

std::string spectral_csv_row(const Region& region, const SpectralReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << '"' << region_label(region) << '"' << ',' << rep.dim << ',' << rep.gap
     << ',' << rep.ground_degeneracy << ',' << rep.tol_used;
  return os.str();
}

}  // namespace gapcert
