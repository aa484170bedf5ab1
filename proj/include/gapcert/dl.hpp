#pragma once

#include <json.hpp>
#include <memory>
#include <optional>
#include <tuple>

#include "gapcert/spectral.hpp"

namespace gapcert {

// Terms partitioned into layers of pairwise disjoint (hence commuting)
// supports; greedy coloring in canonical term order.
struct LayerSchedule {
  int g = 0;
  std::vector<int> layer_of_term;
  std::vector<std::vector<int>> layers;  // layer -> term indices
};
LayerSchedule layer_schedule(const std::vector<InteractionTerm>& terms);

// Approximate ground state projector L = L_1 ... L_g, where L_i is the
// product of the kernel projectors (1 - h(X)) of layer i.
class DLOperator {
 public:
  DLOperator(std::shared_ptr<const AssembledOperator> op, LayerSchedule sched,
             std::vector<int> order);

  int g() const { return sched_.g; }
  const LayerSchedule& schedule() const { return sched_; }
  const std::vector<int>& order() const { return order_; }
  const AssembledOperator& op() const { return *op_; }
  std::shared_ptr<const AssembledOperator> op_ptr() const { return op_; }

  Vec apply(Vec phi) const;          // L phi
  Vec apply_adjoint(Vec phi) const;  // L^dag phi
  Vec apply_power(int q, Vec phi) const;
  Mat matrix() const;  // dense ordered product (dense operators only)

 private:
  Vec apply_layer(int layer, Vec phi) const;
  std::shared_ptr<const AssembledOperator> op_;
  LayerSchedule sched_;
  std::vector<int> order_;  // layer visit order, default ascending
};

DLOperator build_dl(std::shared_ptr<const AssembledOperator> op,
                    std::optional<std::vector<int>> order = std::nullopt);

// DL(phi) = <phi|phi> - ||L phi||^2
double dl_functional(const DLOperator& l, const Vec& phi);

// ||L P^perp|| with the top right singular vector (the tightness witness).
std::pair<double, Vec> dl_contraction(const DLOperator& l,
                                      const GroundProjector& p,
                                      const SolverOptions& opts = {});

struct DlReport {
  int samples = 0;
  std::uint64_t seed = 0;
  int g = 0;
  double tol = 0.0;
  double worst_margin = 0.0;      // min over phi of g^2 DL - E(L phi)
  double norm_lp_perp_sq = 0.0;   // ||L P^perp||^2
  double corollary_rhs = 0.0;     // 1/(1 + gap/g^2)
  bool pass_samples = false;
  bool pass_corollary = false;
  bool pass() const { return pass_samples && pass_corollary; }
  nlohmann::json to_json() const;
};
DlReport verify_dl(const DLOperator& l, const GroundProjector& p,
                   const SpectralReport& spec, int samples,
                   std::uint64_t seed, double tol = 1e-9,
                   const SolverOptions& opts = {});

struct ConverseDlReport {
  int samples = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  double worst_margin = 0.0;  // min over phi of 4E - DL
  bool pass_samples = false;
  bool pass() const { return pass_samples; }
  nlohmann::json to_json() const;
};
ConverseDlReport verify_converse_dl(const DLOperator& l, int samples,
                                    std::uint64_t seed, double tol = 1e-9);

struct SandwichReport {
  int samples = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  double worst_lower = 0.0;     // min of Var - DL
  double worst_upper = 0.0;     // min of DL/(1-s^2) - Var
  double norm_lp_perp_sq = 0.0;
  double tightness_rel = 0.0;   // relative slack at the top singular vector
  double corollary_margin = 0.0;  // gap - (1-s^2)/4
  bool pass_samples = false;
  bool pass_tightness = false;
  bool pass_corollary = false;
  bool pass() const {
    return pass_samples && pass_tightness && pass_corollary;
  }
  nlohmann::json to_json() const;
};
SandwichReport verify_sandwich(const DLOperator& l, const GroundProjector& p,
                               const SpectralReport& spec, int samples,
                               std::uint64_t seed, double tol = 1e-9,
                               double tightness_tol = 1e-6,
                               const SolverOptions& opts = {});

// One factor instance of L^q: written position (1-based) and term index.
struct SplitFactor {
  int position = 0;
  int term = 0;
};

// L^q = M_A . M_B as an ordered-product identity, with M_A supported in A
// and M_B in B. Assignment by the layer-structure light cones grown from
// (A u B)\B and (A u B)\A.
struct SplitPair {
  std::shared_ptr<const AssembledOperator> op;
  Region region_a, region_b;
  int q = 0;
  int g = 0;
  std::vector<int> order;
  std::vector<SplitFactor> ma, mb;                 // written order
  std::vector<std::tuple<int, int, char>> trace;   // (position, term, side)

  Vec apply_ma(Vec phi) const;
  Vec apply_ma_adjoint(Vec phi) const;
  Vec apply_mb(Vec phi) const;
  Vec apply_mb_adjoint(Vec phi) const;
  Vec apply_lq(Vec phi) const;       // the same factors in full written order
  Vec apply_lq_adjoint(Vec phi) const;
  Mat matrix_ma() const;
  Mat matrix_mb() const;
};

SplitPair split_factors(const DLOperator& l, const Region& a, const Region& b,
                        int q);

struct SplitReport {
  int q = 0;
  double l_dist = 0.0;
  double eps = 0.0;                 // (1 + gap/g^2)^(-1/2)
  double product_residual = 0.0;    // ||M_A M_B - L^q||
  double norm_pa_ma = 0.0;          // ||P_A - M_A||
  double norm_pa_ma_mb = 0.0;       // ||(P_A - M_A) M_B||
  double norm_pb_mb = 0.0;
  double norm_pb_mb_ma = 0.0;
  double product_tol = 0.0;
  double norm_tol = 0.0;
  bool pass_product = false;
  bool pass_norms = false;
  bool pass() const { return pass_product && pass_norms; }
  nlohmann::json to_json() const;
};
SplitReport verify_split(const SplitPair& split, const LocalHamiltonian& h,
                         double product_tol = 1e-12, double norm_tol = 1e-9,
                         const SolverOptions& opts = {});

// Assemble, schedule, split and verify in one call.
std::pair<SplitPair, SplitReport> split_ma_mb(
    const LocalHamiltonian& h, const Region& lambda, const Region& a,
    const Region& b, int q, const SolverOptions& opts = {},
    std::optional<std::vector<int>> order = std::nullopt);

struct GammaReport {
  double gamma = 0.0;
  bool has_certificate = false;
  double bound = 0.0;            // (1-gamma)/4 when certified
  double gap = 0.0;              // measured spectral gap
  double crosscheck_margin = 0.0;  // gap - bound
  bool pass_crosscheck = false;
  nlohmann::json to_json() const;
};
// gamma = sup E(L phi)/E(phi) over positive-energy states, via the pencil
// (L^dag H L, H) restricted to the support of H.
GammaReport gamma_contraction(const AssembledOperator& op, const DLOperator& l,
                              const SolverOptions& opts = {},
                              double crosscheck_tol = 1e-9);
double m2_gap_bound(double gamma);

}  // namespace gapcert
