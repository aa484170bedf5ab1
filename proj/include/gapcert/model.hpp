#pragma once

#include <functional>
#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "gapcert/geometry.hpp"
#include "gapcert/linalg.hpp"
#include "gapcert/options.hpp"

namespace gapcert {

// One projector interaction h(X) on the tensor factor of its support.
struct InteractionTerm {
  Region support;
  Mat matrix;  // d^|X| x d^|X|, Hermitian idempotent
  bool projectorized = false;   // true if the loaded matrix was replaced by
  std::shared_ptr<Mat> raw;     // the projector off its kernel (raw kept
                                // for reporting only)
};

// Canonical term order: support minimum site, then extents, then the full
// site list. Everything downstream (layer schedules, L) inherits it.
bool term_order_less(const InteractionTerm& a, const InteractionTerm& b);

// A finite-range frustration-free projector Hamiltonian, represented as a
// generator so translation-invariant models produce terms on demand.
class LocalHamiltonian {
 public:
  using Generator = std::function<std::vector<InteractionTerm>(const Region&)>;

  LocalHamiltonian(std::string name, int dim, int local_dim, int range,
                   Generator gen);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int local_dim() const { return local_dim_; }
  int range() const { return range_; }

  // Exactly the terms with support inside the region, canonically ordered.
  std::vector<InteractionTerm> restrict(const Region& region) const;

 private:
  std::string name_;
  int dim_;
  int local_dim_;
  int range_;
  Generator gen_;
};

// product | heisenberg_fm | aklt, on a lattice of the given dimension
// (nearest-neighbor bonds along the axes for the two-site models)
LocalHamiltonian builtin_model(const std::string& name, int dim = 1);

// Explicit term list (arbitrary user models). Non-projector inputs are
// shifted to ground energy zero and replaced by the projector off their
// kernel; originals are retained on the term.
LocalHamiltonian model_from_terms(std::string name, int dim, int local_dim,
                                  int range, std::vector<InteractionTerm> terms);

// Model file format (versioned): dim, local_dim, range, then either
// builtin{name} or terms[{support, matrix as row-major [re,im] pairs}].
LocalHamiltonian load_model(const nlohmann::json& doc);
nlohmann::json model_to_json(const LocalHamiltonian& h, const Region& region);

// True iff H_Lambda has a zero-energy state and every term annihilates the
// ground space to the given tolerance.
bool check_frustration_free(const LocalHamiltonian& h, const Region& region,
                            double tol = 1e-9,
                            const SolverOptions& opts = {});

// Validation helpers (1e-12 projector tolerance per the model contract).
double projector_deviation(const Mat& m);   // max(|m^2-m|, |m-m^dag|)
bool is_projector(const Mat& m, double tol = 1e-12);

}  // namespace gapcert
