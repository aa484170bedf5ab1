#pragma once

#include <json.hpp>

#include "gapcert/dl.hpp"
#include "gapcert/spectral.hpp"

namespace gapcert {

enum class DeltaMethod { exact_norm, closed_form_pvbs, analytic_bound };
std::string delta_method_name(DeltaMethod m);

// delta(A,B) = ||(P_A - P_AuB)(P_B - P_AuB)|| = ||P_A P_B - P_AuB||.
struct DeltaEstimate {
  double value = 0.0;        // first form (both agree to 1e-9 for exact_norm)
  double value_form2 = 0.0;
  DeltaMethod method = DeltaMethod::exact_norm;
  Region a, b;
  double overlap = 0.0;      // size l of A n B
  nlohmann::json to_json() const;
};

DeltaEstimate delta_exact(const LocalHamiltonian& h, const Region& a,
                          const Region& b, const SolverOptions& opts = {});

struct ProjIneqReport {
  double min_eig_lower = 0.0;  // min eig of 1 - P - Q + {P,Q}
  double min_eig_upper = 0.0;  // min eig of {Pp,Qp} - (1 - P - Q)
  double tol = 0.0;
  bool pass() const {
    return min_eig_lower >= -tol && min_eig_upper >= -tol;
  }
  nlohmann::json to_json() const;
};
ProjIneqReport verify_projector_inequality(const Mat& p, const Mat& q,
                                           double tol = 1e-9);

struct QfReport {
  double delta = 0.0;
  double c = 0.0;            // 1 - 2 delta
  bool vacuous = false;      // c <= 0
  double min_eig = 0.0;      // of P_A^perp + P_B^perp - c P_AuB^perp
  double sample_margin = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  bool pass() const { return min_eig >= -tol && sample_margin >= -tol; }
  nlohmann::json to_json() const;
};
QfReport verify_quasi_factorization(const LocalHamiltonian& h, const Region& a,
                                    const Region& b, double tol = 1e-9,
                                    int samples = 50, std::uint64_t seed = 4242,
                                    const SolverOptions& opts = {});

struct GapDeltaReport {
  double delta = 0.0;
  double gap = 0.0;
  int g = 0;
  double l_dist = 0.0;
  double rhs = 0.0;  // (1 + gap/g^2)^(-l/2)
  double tol = 0.0;
  bool pass() const { return delta <= rhs + tol; }
  nlohmann::json to_json() const;
};
GapDeltaReport verify_gap_to_delta(const LocalHamiltonian& h, const Region& a,
                                   const Region& b, double tol = 1e-9,
                                   const SolverOptions& opts = {});

// One level of the delta_k tabulation.
struct DeltaTableRow {
  int k = 0;
  double l_k = 0.0;
  long long s_k = 0;
  std::string status;  // ok | no_valid_s | budget_truncated
  double delta_k = 0.0;
  std::vector<double> pair_deltas;
  std::vector<double> pair_overlaps;
  std::size_t region_sites = 0;
};
struct DeltaTable {
  std::vector<DeltaTableRow> rows;
  bool truncated = false;
  int truncated_at = -1;
};

class SSchedule;  // certify.hpp
DeltaTable delta_k_table(const LocalHamiltonian& h, int k_max,
                         const std::function<long long(int)>& s_of_k,
                         const SolverOptions& opts = {});
std::string delta_table_csv(const DeltaTable& table);

// Restricted sup of section-2.3 type for 1D translation-invariant models:
// sup over n, m of delta([0,n],[n-d,n-d+m]) with min(m,n) > d and the union
// capped at `max_sites` sites.
struct DeltaProfilePoint {
  int d = 0;
  double value = 0.0;
  int at_n = 0, at_m = 0;
};
DeltaProfilePoint restricted_delta_1d(const LocalHamiltonian& h, int d,
                                      int max_sites,
                                      const SolverOptions& opts = {});

}  // namespace gapcert
