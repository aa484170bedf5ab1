#include "gapcert/delta.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gapcert {

std::string delta_method_name(DeltaMethod m) {
  switch (m) {
    case DeltaMethod::exact_norm: return "exact-norm";
    case DeltaMethod::closed_form_pvbs: return "closed-form-pvbs";
    default: return "analytic-bound";
  }
}

nlohmann::json DeltaEstimate::to_json() const {
  return {{"value", value},
          {"value_form2", value_form2},
          {"method", delta_method_name(method)},
          {"A", region_to_json(a)},
          {"B", region_to_json(b)},
          {"overlap", overlap}};
}

DeltaEstimate delta_exact(const LocalHamiltonian& h, const Region& a,
                          const Region& b, const SolverOptions& opts) {
  if (a.empty() || b.empty())
    throw ConfigError("delta: A and B must be non-empty");
  const Region u = region_union(a, b);
  AssembledOperator op_u = assemble(h, u, opts);
  GroundProjector pu = ground_projector(op_u, opts);
  if (pu.basis.cols() == 0 && !op_u.terms.empty())
    throw NumericsError(
        "delta: H_AuB has no zero-energy state; the model is not frustration "
        "free on the union");
  EmbeddedProjector pa = embedded_ground_projector(h, a, u, opts);
  EmbeddedProjector pb = embedded_ground_projector(h, b, u, opts);

  // frustration freeness gives P_A P_AuB = P_AuB; the delta identity relies
  // on it, so refuse when it fails.
  {
    Mat resid(pu.basis.rows(), pu.basis.cols());
    Mat resid_b(pu.basis.rows(), pu.basis.cols());
    for (Eigen::Index c = 0; c < pu.basis.cols(); ++c) {
      resid.col(c) = pa.apply(pu.basis.col(c)) - pu.basis.col(c);
      resid_b.col(c) = pb.apply(pu.basis.col(c)) - pu.basis.col(c);
    }
    const double dev = std::max(op_norm(resid), op_norm(resid_b));
    if (dev > 1e-8)
      throw NumericsError(
          "delta: P_X P_AuB = P_AuB fails (deviation " + std::to_string(dev) +
          "); the model is not frustration free on these regions");
  }

  DeltaEstimate est;
  est.method = DeltaMethod::exact_norm;
  est.a = a;
  est.b = b;
  est.overlap = overlap_size(region_intersection(a, b));

  // norms by dense SVD below the dense threshold, power iteration above
  const std::size_t dim = op_u.dim;
  if (dim <= opts.dense_threshold) {
    Mat pa_m = pa.matrix();
    Mat pb_m = pb.matrix();
    Mat pu_m = pu.matrix();
    est.value = op_norm((pa_m - pu_m) * (pb_m - pu_m));
    est.value_form2 = op_norm(pa_m * pb_m - pu_m);
  } else {
    auto form1 = [&](const Vec& v) {
      Vec w = pb.apply(v) - pu.apply(v);
      return Vec(pa.apply(w) - pu.apply(w));
    };
    auto form1_adj = [&](const Vec& v) {
      Vec w = pa.apply(v) - pu.apply(v);
      return Vec(pb.apply(w) - pu.apply(w));
    };
    auto form2 = [&](const Vec& v) {
      return Vec(pa.apply(pb.apply(v)) - pu.apply(v));
    };
    auto form2_adj = [&](const Vec& v) {
      return Vec(pb.apply(pa.apply(v)) - pu.apply(v));
    };
    est.value = op_norm_apply(form1, form1_adj, dim, opts.norm_tol, opts.seed);
    est.value_form2 =
        op_norm_apply(form2, form2_adj, dim, opts.norm_tol, opts.seed);
  }

  if (std::abs(est.value - est.value_form2) > 1e-9)
    throw NumericsError("delta: the two norm formulas disagree by " +
                        std::to_string(std::abs(est.value - est.value_form2)));
  return est;
}

nlohmann::json ProjIneqReport::to_json() const {
  return {{"min_eig_lower", min_eig_lower},
          {"min_eig_upper", min_eig_upper},
          {"tol", tol},
          {"pass", pass()}};
}

ProjIneqReport verify_projector_inequality(const Mat& p, const Mat& q,
                                           double tol) {
  if (p.rows() != q.rows() || p.cols() != q.cols() || p.rows() != p.cols())
    throw ConfigError("projector inequality: dimension mismatch");
  if (!is_projector(p, 1e-9) || !is_projector(q, 1e-9))
    throw ConfigError("projector inequality: inputs are not projections");
  const Mat id = Mat::Identity(p.rows(), p.cols());
  const Mat pp = id - p, qp = id - q;
  ProjIneqReport rep;
  rep.tol = tol;
  rep.min_eig_lower = min_eigenvalue(id - p - q + p * q + q * p);
  rep.min_eig_upper = min_eigenvalue(pp * qp + qp * pp - (id - p - q));
  return rep;
}

nlohmann::json QfReport::to_json() const {
  return {{"delta", delta},   {"c", c},
          {"vacuous", vacuous}, {"min_eig", min_eig},
          {"sample_margin", sample_margin}, {"samples", samples},
          {"seed", seed},     {"tol", tol},
          {"pass", pass()}};
}

QfReport verify_quasi_factorization(const LocalHamiltonian& h, const Region& a,
                                    const Region& b, double tol, int samples,
                                    std::uint64_t seed,
                                    const SolverOptions& opts) {
  QfReport rep;
  rep.tol = tol;
  rep.samples = samples;
  rep.seed = seed;
  DeltaEstimate est = delta_exact(h, a, b, opts);
  rep.delta = est.value;
  rep.c = 1.0 - 2.0 * est.value;
  rep.vacuous = rep.c <= 0.0;

  const Region u = region_union(a, b);
  AssembledOperator op_u = assemble(h, u, opts);
  if (op_u.dim > opts.dense_threshold)
    throw BudgetError("quasi-factorization eigencheck needs the dense path");
  GroundProjector pu = ground_projector(op_u, opts);
  EmbeddedProjector pa = embedded_ground_projector(h, a, u, opts);
  EmbeddedProjector pb = embedded_ground_projector(h, b, u, opts);
  const Mat id = Mat::Identity(op_u.dim, op_u.dim);
  const Mat t = (id - pa.matrix()) + (id - pb.matrix()) -
                rep.c * (id - pu.matrix());
  rep.min_eig = min_eigenvalue(t);

  Rng rng(seed);
  rep.sample_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    Vec phi = random_state(op_u.dim, rng);
    const double val = std::real(phi.dot(t * phi)) / phi.squaredNorm();
    rep.sample_margin = std::min(rep.sample_margin, val);
  }
  return rep;
}

nlohmann::json GapDeltaReport::to_json() const {
  return {{"delta", delta}, {"gap", gap},   {"g", g},
          {"l_dist", l_dist}, {"rhs", rhs}, {"tol", tol},
          {"pass", pass()}};
}

GapDeltaReport verify_gap_to_delta(const LocalHamiltonian& h, const Region& a,
                                   const Region& b, double tol,
                                   const SolverOptions& opts) {
  GapDeltaReport rep;
  rep.tol = tol;
  const Region u = region_union(a, b);
  if (region_difference(u, a).empty() || region_difference(u, b).empty())
    throw ConfigError("gap->delta: nested regions leave l undefined");
  rep.l_dist = region_dist(region_difference(u, a), region_difference(u, b));
  if (!(rep.l_dist >= 1.0))
    throw ConfigError("gap->delta: need l = dist(U\\A, U\\B) >= 1");
  AssembledOperator op_u = assemble(h, u, opts);
  rep.g = layer_schedule(op_u.terms).g;
  rep.gap = spectral_gap(op_u, opts).gap;
  rep.delta = delta_exact(h, a, b, opts).value;
  rep.rhs = std::pow(1.0 + rep.gap / (double(rep.g) * rep.g),
                     -rep.l_dist / 2.0);
  return rep;
}

DeltaTable delta_k_table(const LocalHamiltonian& h, int k_max,
                         const std::function<long long(int)>& s_of_k,
                         const SolverOptions& opts) {
  DeltaTable table;
  const int d = h.dim();
  for (int k = 1; k <= k_max; ++k) {
    DeltaTableRow row;
    row.k = k;
    row.l_k = ell(k, d);
    row.s_k = s_of_k(k);
    if (row.s_k < 1 || static_cast<double>(row.s_k) > row.l_k / 8.0) {
      row.status = "no_valid_s";
      table.rows.push_back(std::move(row));
      continue;
    }
    // canonical maximal region of F_k \ F_{k-1}: the full box of R(k)
    std::vector<int> lo(d, 0), hi(d);
    for (int j = 0; j < d; ++j)
      hi[j] = static_cast<int>(std::floor(ell(k + j + 1, d)));
    Region box = Region::box(lo, hi);
    row.region_sites = box.size();

    // budget check before any assembly
    double log_dim = box.size() * std::log(double(h.local_dim()));
    if (log_dim > std::log(double(opts.max_dim))) {
      row.status = "budget_truncated";
      table.rows.push_back(std::move(row));
      table.truncated = true;
      table.truncated_at = k;
      break;
    }
    try {
      SDecomposition dec = s_decompose(box, k, static_cast<int>(row.s_k));
      row.delta_k = 0.0;
      for (const auto& [ai, bi] : dec.pairs) {
        DeltaEstimate est = delta_exact(h, ai, bi, opts);
        row.pair_deltas.push_back(est.value);
        row.pair_overlaps.push_back(
            overlap_size(region_intersection(ai, bi)));
        row.delta_k = std::max(row.delta_k, est.value);
      }
      row.status = "ok";
      table.rows.push_back(std::move(row));
    } catch (const BudgetError&) {
      row.status = "budget_truncated";
      table.rows.push_back(std::move(row));
      table.truncated = true;
      table.truncated_at = k;
      break;
    }
  }
  return table;
}

std::string delta_table_csv(const DeltaTable& table) {
  std::ostringstream os;
  os.precision(17);
  os << "k,l_k,s_k,pair,overlap_width,delta,method,status\n";
  for (const DeltaTableRow& row : table.rows) {
    if (row.status != "ok") {
      os << row.k << ',' << row.l_k << ',' << row.s_k << ",,,,"
         << ",\"" << row.status << "\"\n";
      continue;
    }
    for (std::size_t i = 0; i < row.pair_deltas.size(); ++i)
      os << row.k << ',' << row.l_k << ',' << row.s_k << ',' << (i + 1) << ','
         << row.pair_overlaps[i] << ',' << row.pair_deltas[i]
         << ",exact-norm,ok\n";
  }
  if (table.truncated)
    os << "# table truncated at k=" << table.truncated_at
       << " (memory budget exceeded)\n";
  return os.str();
}

DeltaProfilePoint restricted_delta_1d(const LocalHamiltonian& h, int d,
                                      int max_sites,
                                      const SolverOptions& opts) {
  if (h.dim() != 1)
    throw ConfigError("restricted delta profile is one-dimensional");
  if (d < 1) throw ConfigError("restricted delta profile: need d >= 1");
  DeltaProfilePoint point;
  point.d = d;
  // A = [0,n], B = [n-d, n-d+m], union of n-d+m+1 sites, min(m,n) > d
  for (int n = d + 1; n + 2 <= max_sites + d - 1; ++n) {
    bool any = false;
    for (int m = d + 1; n - d + m + 1 <= max_sites; ++m) {
      any = true;
      Region a = Region::interval(0, n);
      Region b = Region::interval(n - d, n - d + m);
      DeltaEstimate est = delta_exact(h, a, b, opts);
      if (est.value > point.value) {
        point.value = est.value;
        point.at_n = n;
        point.at_m = m;
      }
    }
    if (!any) break;
  }
  return point;
}

}  // namespace gapcert
