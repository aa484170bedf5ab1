#pragma once

#include <json.hpp>
#include <optional>
#include <vector>

#include "gapcert/common.hpp"

namespace gapcert {

// A lattice site in Z^D.
struct Site {
  std::vector<int> x;
  auto operator<=>(const Site&) const = default;
};

// A finite set of sites of common dimension. Sites are kept sorted and
// deduplicated so set algebra is canonical.
class Region {
 public:
  Region() = default;
  Region(int dim, std::vector<Site> sites);

  static Region interval(int a, int b);                 // 1D {a..b}
  static Region box(const std::vector<int>& lo, const std::vector<int>& hi);
  static Region single(const std::vector<int>& coords);

  int dim() const { return dim_; }
  const std::vector<Site>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  bool contains(const Site& s) const;
  bool is_subset_of(const Region& other) const;

  // Bounding box: per-axis minima and integer extents (max - min).
  std::vector<int> bbox_min() const;
  std::vector<int> extents() const;

  Region translated(const std::vector<int>& shift) const;
  // new coordinate j = old coordinate perm[j]
  Region permuted(const std::vector<int>& perm) const;

  auto operator<=>(const Region&) const = default;

 private:
  int dim_ = 0;
  std::vector<Site> sites_;
};

Region region_union(const Region& a, const Region& b);
Region region_intersection(const Region& a, const Region& b);
Region region_difference(const Region& a, const Region& b);

// Minimum Euclidean distance between site pairs; +infinity if either side
// is empty.
double region_dist(const Region& a, const Region& b);

double region_diameter(const Region& a);

// Overlap size l: cardinality in 1D, diameter of the largest lattice ball
// contained in the region for D >= 2.
double overlap_size(const Region& overlap);

// l_j = (3/2)^(j/D)
double ell(int j, int dim);

// Smallest k such that the region fits R(k) = [0,l_{k+1}] x ... x [0,l_{k+D}]
// up to translation and axis permutation.
int classify_region(const Region& r);

// Canonical frame: min corner at the origin, axes permuted so the sorted
// extents match the sorted box sides, longest admissible axis last. Among
// the permutations that fit, the lexicographically smallest is taken.
struct CanonicalFrame {
  Region region;               // normalized copy
  std::vector<int> perm;       // new axis j = old axis perm[j]
  std::vector<int> offset;     // subtracted from original coordinates
  int cut_axis = 0;            // original index of the axis in slot D
};
CanonicalFrame canonical_frame(const Region& r, int k);

struct SDecomposition {
  Region parent;
  int k = 0;
  int s = 0;
  int cut_axis = 0;  // original axis index that was cut
  double d_k = 0.0;  // l_k / (8 s)
  std::vector<std::pair<Region, Region>> pairs;
};

// The s overlapping pairs (A_i, B_i) covering a class-k region: the cut
// axis is sliced at l_{k+D}/2 + 2i*d and l_{k+D}/2 + (2i-1)*d with
// d = l_k/(8s). (An alternative normalization of the overlap width,
// l_k/(12s), appears in related constructions; this one uses 8s
// throughout, matching the distance guarantee of verify_decomposition.)
SDecomposition s_decompose(const Region& lambda, int k, int s);

struct DecompositionReport {
  bool prop1 = false;  // A_i u B_i = parent, both non-empty and in F_{k-1}
  bool prop2 = false;  // dist(parent\A_i, parent\B_i) >= l_k/(8s) - 2
  bool prop3 = false;  // overlaps pairwise disjoint
  double min_distance = 0.0;
  double required_distance = 0.0;
  bool all() const { return prop1 && prop2 && prop3; }
};
DecompositionReport verify_decomposition(const SDecomposition& dec);

// Region literal: {"dim":D,"sites":[[..],..]}
nlohmann::json region_to_json(const Region& r);
Region region_from_json(const nlohmann::json& j);

// Accepts "a..b" (1D range), "a" (1D single site), or a JSON region literal.
Region parse_region(const std::string& text);

}  // namespace gapcert
