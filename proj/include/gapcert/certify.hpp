#pragma once

#include <json.hpp>
#include <optional>

#include "gapcert/delta.hpp"
#include "gapcert/geometry.hpp"

namespace gapcert {

// Increasing integer schedule s_k together with the certificates the
// recursion needs: a closed-form tail bound on sum 1/s_j and a growth
// ratio for the level widths w_j = l_j/(8 s_j) - 2.
class SSchedule {
 public:
  std::string name;
  int lattice_dim = 1;
  bool summable = true;
  std::function<long long(int)> s;
  std::function<double(long long)> sum_inv_tail;  // >= sum_{j>J} 1/s_j
  // For every j >= j_star: w_{j+1} + 2 >= rho_star * (w_j + 2), rho_star > 1.
  int j_star = 1;
  double rho_star = 1.0;

  double width(int j) const {
    return ell(j, lattice_dim) / (8.0 * static_cast<double>(s(j))) - 2.0;
  }
  std::string certificate() const;
};

SSchedule schedule_k2(int lattice_dim);
SSchedule schedule_k1eps(int lattice_dim, double eps);
SSchedule schedule_cesi(int lattice_dim);   // s_k = ceil(l_k^(1/3))
SSchedule schedule_unit(int lattice_dim);   // s_k = 1; table exploration only
// "k2" | "k1eps:eps=<v>" | "cesi" | "unit"
SSchedule parse_schedule(const std::string& text, int lattice_dim);

// The decay model feeding per-level overlaps into delta_j.
struct DeltaModel {
  enum class Kind { exponential, polynomial, table, pvbs };
  Kind kind = Kind::exponential;
  double c = 0.0;
  double alpha = 0.5;
  std::vector<double> table;     // delta_k for k = 1..table.size()
  std::vector<double> lambdas;   // pvbs parameters (kept for provenance)

  static DeltaModel zero();
  static DeltaModel exponential(double c, double alpha);
  static DeltaModel polynomial(double c, double alpha);
  static DeltaModel from_table(std::vector<double> deltas);
  static DeltaModel pvbs(const std::vector<double>& lambdas);

  bool width_based() const { return kind != Kind::table; }
  // delta(w) for the analytic kinds; +inf marks an unusable level.
  double delta_at_width(double w) const;
  std::string describe() const;
};
// "zero" | "exponential:c=..,alpha=.." | "polynomial:c=..,alpha=.."
DeltaModel parse_delta_model(const std::string& text);

struct CertificationResult {
  bool valid = false;
  std::string reason;
  double lower_bound = 0.0;  // lambda_k0 * C * prod(1-2 delta_j) * tail
  int k0 = 0;
  double lambda_k0 = 0.0;
  double C = 0.0;
  std::vector<double> delta_levels;  // j = k0+1 .. J
  std::vector<double> factors;       // 1 - 2 delta_j, rounded down
  double tail_bound = 1.0;
  int truncation_level = 0;  // J
  bool finite_horizon = false;
  int horizon_k = -1;
  std::string schedule_name;
  std::string schedule_certificate;
  std::string model;
  std::vector<std::string> warnings;
  nlohmann::json to_json() const;
};

CertificationResult recursion_bound(double lambda_k0, std::optional<int> k0,
                                    const SSchedule& sched,
                                    const DeltaModel& model);

// ---- local gap thresholds ----------------------------------------------------

enum class LatticeKind { chain_1d, square_2d, hexagonal_2d };
LatticeKind parse_lattice_kind(const std::string& text);
std::string lattice_kind_name(LatticeKind k);

struct ThresholdRow {
  int n = 0;
  double gap = 0.0;
  double knabe_1d = 0.0;       // 1/(n-1)
  double gosset_1d = 0.0;      // 6/(n(n+1))
  double knabe_hex = 0.0;      // 1/(3n-1)
  double gosset_square = 0.0;  // 8/n^2
  double log_threshold = 0.0;  // C log(n)^(2+eps) / n
  bool clears_knabe_1d = false, clears_gosset_1d = false;
  bool clears_knabe_hex = false, clears_gosset_square = false;
  bool clears_log = false;
  bool clears_matching = false;
};
struct ThresholdReport {
  LatticeKind kind = LatticeKind::chain_1d;
  double c = 1.0, eps = 1.0;
  std::vector<ThresholdRow> rows;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};
ThresholdReport threshold_check(const std::vector<std::pair<int, double>>& gaps,
                                LatticeKind kind, double c = 1.0,
                                double eps = 1.0);

// ---- PVBS closed forms ---------------------------------------------------------

// C(X) = sum_x prod_j lambda_j^(2 x_j); per-axis geometric products for boxes.
double pvbs_normalization(const Region& x, const std::vector<double>& lambdas);
DeltaEstimate pvbs_delta(const Region& a, const Region& b,
                         const std::vector<double>& lambdas);
// Two-case closed bound on delta for 1D marginals of lengths (l, l_A, l_B).
double pvbs_bound(int l, int l_a, int l_b, double lambda);
// Certified recursion with delta(l) = lambda_*^l / (1 - lambda_*^2).
CertificationResult pvbs_certify(const std::vector<double>& lambdas,
                                 const SSchedule& sched,
                                 double lambda_k0 = 1.0);

}  // namespace gapcert
