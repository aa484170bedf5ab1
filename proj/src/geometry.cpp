#include "gapcert/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace gapcert {

Region::Region(int dim, std::vector<Site> sites)
    : dim_(dim), sites_(std::move(sites)) {
  for (const Site& s : sites_)
    if (static_cast<int>(s.x.size()) != dim_)
      throw ConfigError("region: site dimension mismatch");
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

Region Region::interval(int a, int b) {
  if (b < a) std::swap(a, b);
  std::vector<Site> sites;
  for (int x = a; x <= b; ++x) sites.push_back({{x}});
  return Region(1, std::move(sites));
}

Region Region::box(const std::vector<int>& lo, const std::vector<int>& hi) {
  if (lo.size() != hi.size() || lo.empty())
    throw ConfigError("region box: corner dimension mismatch");
  const int d = static_cast<int>(lo.size());
  for (int j = 0; j < d; ++j)
    if (hi[j] < lo[j]) throw ConfigError("region box: empty side");
  std::vector<Site> sites;
  Site cur{lo};
  while (true) {
    sites.push_back(cur);
    int j = d - 1;
    while (j >= 0) {
      if (++cur.x[j] <= hi[j]) break;
      cur.x[j] = lo[j];
      --j;
    }
    if (j < 0) break;
  }
  return Region(d, std::move(sites));
}

Region Region::single(const std::vector<int>& coords) {
  return Region(static_cast<int>(coords.size()), {Site{coords}});
}

bool Region::contains(const Site& s) const {
  return std::binary_search(sites_.begin(), sites_.end(), s);
}

bool Region::is_subset_of(const Region& other) const {
  return std::includes(other.sites_.begin(), other.sites_.end(),
                       sites_.begin(), sites_.end());
}

std::vector<int> Region::bbox_min() const {
  if (empty()) throw ConfigError("bbox of empty region");
  std::vector<int> lo = sites_[0].x;
  for (const Site& s : sites_)
    for (int j = 0; j < dim_; ++j) lo[j] = std::min(lo[j], s.x[j]);
  return lo;
}

std::vector<int> Region::extents() const {
  if (empty()) throw ConfigError("extents of empty region");
  std::vector<int> lo = sites_[0].x, hi = sites_[0].x;
  for (const Site& s : sites_)
    for (int j = 0; j < dim_; ++j) {
      lo[j] = std::min(lo[j], s.x[j]);
      hi[j] = std::max(hi[j], s.x[j]);
    }
  std::vector<int> e(dim_);
  for (int j = 0; j < dim_; ++j) e[j] = hi[j] - lo[j];
  return e;
}

Region Region::translated(const std::vector<int>& shift) const {
  std::vector<Site> out = sites_;
  for (Site& s : out)
    for (int j = 0; j < dim_; ++j) s.x[j] += shift[j];
  return Region(dim_, std::move(out));
}

Region Region::permuted(const std::vector<int>& perm) const {
  std::vector<Site> out;
  out.reserve(sites_.size());
  for (const Site& s : sites_) {
    Site t;
    t.x.resize(dim_);
    for (int j = 0; j < dim_; ++j) t.x[j] = s.x[perm[j]];
    out.push_back(std::move(t));
  }
  return Region(dim_, std::move(out));
}

static void require_same_dim(const Region& a, const Region& b) {
  if (a.dim() != b.dim())
    throw ConfigError("region algebra: dimension mismatch");
}

Region region_union(const Region& a, const Region& b) {
  require_same_dim(a, b);
  std::vector<Site> out;
  std::set_union(a.sites().begin(), a.sites().end(), b.sites().begin(),
                 b.sites().end(), std::back_inserter(out));
  return Region(a.dim(), std::move(out));
}

Region region_intersection(const Region& a, const Region& b) {
  require_same_dim(a, b);
  std::vector<Site> out;
  std::set_intersection(a.sites().begin(), a.sites().end(), b.sites().begin(),
                        b.sites().end(), std::back_inserter(out));
  return Region(a.dim(), std::move(out));
}

Region region_difference(const Region& a, const Region& b) {
  require_same_dim(a, b);
  std::vector<Site> out;
  std::set_difference(a.sites().begin(), a.sites().end(), b.sites().begin(),
                      b.sites().end(), std::back_inserter(out));
  return Region(a.dim(), std::move(out));
}

static double site_dist2(const Site& a, const Site& b) {
  double d2 = 0.0;
  for (std::size_t j = 0; j < a.x.size(); ++j) {
    const double d = static_cast<double>(a.x[j]) - b.x[j];
    d2 += d * d;
  }
  return d2;
}

double region_dist(const Region& a, const Region& b) {
  require_same_dim(a, b);
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (const Site& s : a.sites())
    for (const Site& t : b.sites()) best = std::min(best, site_dist2(s, t));
  return std::sqrt(best);
}

double region_diameter(const Region& a) {
  if (a.empty()) return 0.0;
  double best = 0.0;
  for (const Site& s : a.sites())
    for (const Site& t : a.sites()) best = std::max(best, site_dist2(s, t));
  return std::sqrt(best);
}

double overlap_size(const Region& overlap) {
  if (overlap.empty()) return 0.0;
  if (overlap.dim() == 1) return static_cast<double>(overlap.size());
  // Largest lattice ball contained in the overlap: for each candidate
  // center, the radius is bounded by the nearest lattice point outside.
  std::set<Site> inside(overlap.sites().begin(), overlap.sites().end());
  const std::vector<int> lo = overlap.bbox_min();
  const std::vector<int> ext = overlap.extents();
  double best_r = 0.0;
  for (const Site& c : overlap.sites()) {
    double nearest_out2 = std::numeric_limits<double>::infinity();
    // scan the bounding box plus a one-site margin
    std::vector<int> cur(lo);
    for (int j = 0; j < overlap.dim(); ++j) cur[j] -= 1;
    Site probe{cur};
    std::vector<int> hi(lo);
    for (int j = 0; j < overlap.dim(); ++j) hi[j] = lo[j] + ext[j] + 1;
    while (true) {
      if (!inside.count(probe))
        nearest_out2 = std::min(nearest_out2, site_dist2(c, probe));
      int j = overlap.dim() - 1;
      while (j >= 0) {
        if (++probe.x[j] <= hi[j]) break;
        probe.x[j] = lo[j] - 1;
        --j;
      }
      if (j < 0) break;
    }
    // every lattice point strictly closer than nearest_out2 lies inside
    best_r = std::max(best_r, std::sqrt(nearest_out2) - 1.0);
  }
  return 2.0 * std::max(0.0, best_r);
}

double ell(int j, int dim) {
  return std::pow(1.5, static_cast<double>(j) / dim);
}

static bool extents_fit(const std::vector<int>& sorted_ext, int k, int dim) {
  for (int j = 0; j < dim; ++j)
    if (static_cast<double>(sorted_ext[j]) > ell(k + j + 1, dim)) return false;
  return true;
}

int classify_region(const Region& r) {
  if (r.empty()) throw ConfigError("classify_region: empty region");
  std::vector<int> e = r.extents();
  std::sort(e.begin(), e.end());
  for (int k = 0; k <= 4000; ++k)
    if (extents_fit(e, k, r.dim())) return k;
  throw ConfigError("classify_region: region too large to classify");
}

CanonicalFrame canonical_frame(const Region& r, int k) {
  const int d = r.dim();
  const std::vector<int> ext = r.extents();
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  bool found = false;
  do {
    bool ok = true;
    for (int j = 0; j < d && ok; ++j)
      if (static_cast<double>(ext[perm[j]]) > ell(k + j + 1, d)) ok = false;
    if (ok) {
      found = true;
      break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (!found)
    throw ConfigError("canonical_frame: region does not fit R(k)");
  CanonicalFrame f;
  f.perm = perm;
  f.cut_axis = perm[d - 1];
  Region p = r.permuted(perm);
  std::vector<int> lo = p.bbox_min();
  f.offset = lo;
  std::vector<int> shift(d);
  for (int j = 0; j < d; ++j) shift[j] = -lo[j];
  f.region = p.translated(shift);
  return f;
}

SDecomposition s_decompose(const Region& lambda, int k, int s) {
  if (lambda.empty()) throw ConfigError("s_decompose: empty region");
  const int d = lambda.dim();
  const int cls = classify_region(lambda);
  if (cls < k)
    throw ConfigError("s_decompose: region already in F_{k-1} (class " +
                      std::to_string(cls) + " < " + std::to_string(k) + ")");
  if (cls > k)
    throw ConfigError("s_decompose: region not in F_k (class " +
                      std::to_string(cls) + " > " + std::to_string(k) + ")");
  const double lk = ell(k, d);
  if (s < 1 || static_cast<double>(s) > lk / 8.0)
    throw ConfigError("s_decompose: s out of range, need 1 <= s <= l_k/8 = " +
                      std::to_string(lk / 8.0));

  CanonicalFrame frame = canonical_frame(lambda, k);
  const double dk = lk / (8.0 * s);
  const double half = ell(k + d, d) / 2.0;

  // inverse transform back to the original coordinates
  std::vector<int> inv_perm(d);
  for (int j = 0; j < d; ++j) inv_perm[frame.perm[j]] = j;

  auto back_to_original = [&](const Region& canon) {
    Region p = canon.translated(frame.offset);
    return p.permuted(inv_perm);
  };

  SDecomposition dec;
  dec.parent = lambda;
  dec.k = k;
  dec.s = s;
  dec.cut_axis = frame.cut_axis;
  dec.d_k = dk;
  for (int i = 1; i <= s; ++i) {
    const double a_hi = half + 2.0 * i * dk;
    const double b_lo = half + (2.0 * i - 1.0) * dk;
    std::vector<Site> a_sites, b_sites;
    for (const Site& site : frame.region.sites()) {
      const double xd = static_cast<double>(site.x[d - 1]);
      if (xd <= a_hi) a_sites.push_back(site);
      if (xd >= b_lo) b_sites.push_back(site);
    }
    Region a_canon(d, std::move(a_sites));
    Region b_canon(d, std::move(b_sites));
    if (a_canon.empty() || b_canon.empty())
      throw ConfigError(
          "s_decompose: produced an empty half; the region violates the "
          "proposition's hypotheses");
    dec.pairs.emplace_back(back_to_original(a_canon), back_to_original(b_canon));
  }
  return dec;
}

DecompositionReport verify_decomposition(const SDecomposition& dec) {
  DecompositionReport rep;
  const int d = dec.parent.dim();
  rep.required_distance = ell(dec.k, d) / (8.0 * dec.s) - 2.0;

  rep.prop1 = true;
  for (const auto& [a, b] : dec.pairs) {
    if (a.empty() || b.empty() || region_union(a, b) != dec.parent) {
      rep.prop1 = false;
      break;
    }
    if (classify_region(a) > dec.k - 1 || classify_region(b) > dec.k - 1) {
      rep.prop1 = false;
      break;
    }
  }

  rep.min_distance = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : dec.pairs) {
    const double dist = region_dist(region_difference(dec.parent, a),
                                    region_difference(dec.parent, b));
    rep.min_distance = std::min(rep.min_distance, dist);
  }
  rep.prop2 = rep.min_distance >= rep.required_distance;

  rep.prop3 = true;
  std::vector<Region> overlaps;
  for (const auto& [a, b] : dec.pairs)
    overlaps.push_back(region_intersection(a, b));
  for (std::size_t i = 0; i < overlaps.size() && rep.prop3; ++i)
    for (std::size_t j = i + 1; j < overlaps.size(); ++j)
      if (!region_intersection(overlaps[i], overlaps[j]).empty()) {
        rep.prop3 = false;
        break;
      }
  return rep;
}

nlohmann::json region_to_json(const Region& r) {
  nlohmann::json sites = nlohmann::json::array();
  for (const Site& s : r.sites()) sites.push_back(s.x);
  return {{"dim", r.dim()}, {"sites", sites}};
}

Region region_from_json(const nlohmann::json& j) {
  if (!j.contains("dim") || !j.contains("sites"))
    throw ConfigError("region JSON: need fields dim and sites");
  const int d = j.at("dim").get<int>();
  std::vector<Site> sites;
  for (const auto& coords : j.at("sites"))
    sites.push_back({coords.get<std::vector<int>>()});
  return Region(d, std::move(sites));
}

Region parse_region(const std::string& text) {
  if (!text.empty() && text.front() == '{')
    return region_from_json(nlohmann::json::parse(text));
  const auto pos = text.find("..");
  try {
    if (pos == std::string::npos) {
      return Region::interval(std::stoi(text), std::stoi(text));
    }
    const int a = std::stoi(text.substr(0, pos));
    const int b = std::stoi(text.substr(pos + 2));
    return Region::interval(a, b);
  } catch (const std::invalid_argument&) {
    throw ConfigError("cannot parse region '" + text + "'");
  } catch (const std::out_of_range&) {
    throw ConfigError("cannot parse region '" + text + "'");
  }
}

}  // namespace gapcert
