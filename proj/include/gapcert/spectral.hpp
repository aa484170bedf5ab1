#pragma once

#include <optional>
#include <vector>

#include "gapcert/model.hpp"
#include "gapcert/options.hpp"

namespace gapcert {

// Linear offsets of a slot subset's tensor indices: off_sub enumerates the
// support configurations, off_rest the complement.
struct SlotIndexer {
  std::vector<std::size_t> off_sub, off_rest;
};
SlotIndexer build_slot_indexer(const std::vector<int>& slots, int local_dim,
                               int nsites, std::size_t dim);

// H_Lambda on the ordered tensor product over Lambda (site order =
// lexicographic). Dense matrix below the threshold, matrix-free above it.
class AssembledOperator {
 public:
  Region region;
  int local_dim = 2;
  std::size_t dim = 1;
  std::vector<InteractionTerm> terms;           // canonical order
  std::vector<std::vector<int>> term_positions; // site slots within region
  std::vector<SlotIndexer> indexers;            // per term, built at assembly

  Vec apply(const Vec& phi) const;
  Vec apply_single_term(std::size_t t, const Vec& phi) const;
  bool is_dense() const { return dense_.has_value(); }
  const Mat& matrix() const;
  // ||H|| <= number of projector terms
  double norm_upper() const { return static_cast<double>(terms.size()); }
  double kernel_tolerance(double requested) const;

  std::optional<Mat> dense_;
};

AssembledOperator assemble(const LocalHamiltonian& h, const Region& region,
                           const SolverOptions& opts = {});

// Orthonormal basis of ker H_Lambda.
struct GroundProjector {
  Region region;
  Mat basis;  // dim x degeneracy, orthonormal columns
  double tol_used = 0.0;

  Vec apply(const Vec& phi) const { return basis * (basis.adjoint() * phi); }
  Vec apply_perp(const Vec& phi) const { return phi - apply(phi); }
  Mat matrix() const;
  Mat perp_matrix() const;
};

struct SpectralReport {
  double gap = 0.0;
  int ground_degeneracy = 0;
  std::size_t dim = 0;
  double tol_used = 0.0;
  // epsilon_Lambda = (1 + gap/g^2)^(-1/2)
  double epsilon(double g) const;
};

GroundProjector ground_projector(const AssembledOperator& op,
                                 const SolverOptions& opts = {});
SpectralReport spectral_gap(const AssembledOperator& op,
                            const SolverOptions& opts = {});
// Both at once (one decomposition).
std::pair<GroundProjector, SpectralReport> ground_and_gap(
    const AssembledOperator& op, const SolverOptions& opts = {});

// Var(phi) = <phi|phi> - <phi|P|phi>, E(phi) = <phi|H|phi>.
double variance(const GroundProjector& p, const Vec& phi);
double dirichlet(const AssembledOperator& op, const Vec& phi);

// Embed an operator on `support` into the full region's tensor product.
Mat embed_matrix(const Mat& op, const Region& support, const Region& whole,
                 int local_dim);
// Positions (slots) of the support sites within the sorted whole region.
std::vector<int> support_positions(const Region& support, const Region& whole);
// y = (op on the support slots (x) identity) phi
Vec apply_on_slots(const Mat& op, const std::vector<int>& slots, int local_dim,
                   std::size_t dim, const Vec& phi);

// Ground projector of H restricted to `sub`, as an operator on the whole
// region's space (basis embedded with identities).
struct EmbeddedProjector {
  Mat sub_basis;           // d^|sub| x r
  std::vector<int> slots;  // positions of sub inside whole
  int local_dim = 2;
  std::size_t dim = 1;     // whole-space dimension
  SlotIndexer indexer;

  Vec apply(const Vec& phi) const;
  Vec apply_perp(const Vec& phi) const { return phi - apply(phi); }
  Mat matrix() const;  // dense; requires modest dim
};
EmbeddedProjector embedded_ground_projector(const LocalHamiltonian& h,
                                            const Region& sub,
                                            const Region& whole,
                                            const SolverOptions& opts = {});

// CSV row: region, dim, gap, degeneracy (+ tolerance used).
std::string spectral_csv_header();
std::string spectral_csv_row(const Region& region, const SpectralReport& rep);

}  // namespace gapcert
