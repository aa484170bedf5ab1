#include <doctest.h>
#include <gapcert/spectral.hpp>

#include "test_util.hpp"

using namespace gapcert;
using namespace gapcert::testutil;

TEST_CASE("assemble of the product model on two sites is diag(0,1,1,2)") {
  AssembledOperator op = assemble(builtin_model("product"), chain(2));
  REQUIRE(op.is_dense());
  Mat expected = Mat::Zero(4, 4);
  expected(1, 1) = 1;
  expected(2, 2) = 1;
  expected(3, 3) = 2;
  CHECK((op.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("heisenberg two-site operator is the rank-1 singlet projector") {
  AssembledOperator op = assemble(builtin_model("heisenberg_fm"), chain(2));
  RVec vals = eigenvalues_only(op.matrix());
  CHECK(vals(0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(vals(2) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(vals(3) == doctest::Approx(1.0));
}

TEST_CASE("gaps and degeneracies of the builtin models") {
  // product: gap 1, unique ground state
  auto [p_prod, rep_prod] = ground_and_gap(assemble(builtin_model("product"), chain(3)));
  CHECK(rep_prod.gap == doctest::Approx(1.0));
  CHECK(rep_prod.ground_degeneracy == 1);
  CHECK(p_prod.basis.cols() == 1);

  // heisenberg_fm n=4: gap 1 - cos(pi/4), degeneracy 5 (one magnon branch)
  auto [p_h, rep_h] = ground_and_gap(assemble(builtin_model("heisenberg_fm"), chain(4)));
  CHECK(rep_h.gap == doctest::Approx(1.0 - std::cos(M_PI / 4.0)).epsilon(1e-10));
  CHECK(rep_h.ground_degeneracy == 5);

  // aklt n=4: positive gap, fourfold edge degeneracy
  auto [p_a, rep_a] = ground_and_gap(assemble(builtin_model("aklt"), chain(4)));
  CHECK(rep_a.gap > 0.1);
  CHECK(rep_a.ground_degeneracy == 4);
  (void)p_a;

  // magnon dispersion across sizes
  for (int n = 3; n <= 7; ++n) {
    SpectralReport rep = spectral_gap(assemble(builtin_model("heisenberg_fm"), chain(n)));
    CHECK(rep.gap == doctest::Approx(1.0 - std::cos(M_PI / n)).epsilon(1e-9));
    CHECK(rep.ground_degeneracy == n + 1);
  }
}

TEST_CASE("variance and dirichlet") {
  LocalHamiltonian h = builtin_model("product");
  AssembledOperator op = assemble(h, chain(1));
  GroundProjector p = ground_projector(op);
  Vec one = Vec::Zero(2);
  one(1) = 1.0;  // the |1> state
  CHECK(variance(p, one) == doctest::Approx(1.0));
  CHECK(dirichlet(op, one) == doctest::Approx(1.0));
  Vec ground = Vec::Zero(2);
  ground(0) = 1.0;
  CHECK(variance(p, ground) == doctest::Approx(0.0));
  CHECK(dirichlet(op, ground) == doctest::Approx(0.0));
  CHECK_THROWS_AS(variance(p, Vec::Zero(3)), ConfigError);
}

TEST_CASE("variational inequality lambda Var <= E on seeded random states") {
  struct Case {
    const char* model;
    int n;
  };
  for (const Case& c : std::vector<Case>{
           {"heisenberg_fm", 4}, {"heisenberg_fm", 6}, {"aklt", 4},
           {"aklt", 5}}) {
    LocalHamiltonian h = builtin_model(c.model);
    AssembledOperator op = assemble(h, chain(c.n));
    auto [p, rep] = ground_and_gap(op);
    Rng rng(314);
    for (int i = 0; i < 200; ++i) {
      Vec phi = random_state(op.dim, rng);
      const double var = variance(p, phi);
      const double e = dirichlet(op, phi);
      CHECK(rep.gap * var <= e + 1e-9);
      // Var equals ||phi - P phi||^2
      CHECK(var == doctest::Approx((phi - p.apply(phi)).squaredNorm())
                       .epsilon(1e-12));
    }
  }
}

TEST_CASE("implicit operator matches the dense one just under the threshold") {
  LocalHamiltonian h = builtin_model("heisenberg_fm");
  const Region region = chain(8);  // dim 256
  SolverOptions dense_opts;
  AssembledOperator dense_op = assemble(h, region, dense_opts);
  SolverOptions implicit_opts;
  implicit_opts.dense_threshold = 128;  // force the matrix-free path
  AssembledOperator impl_op = assemble(h, region, implicit_opts);
  REQUIRE(dense_op.is_dense());
  REQUIRE(!impl_op.is_dense());
  Rng rng(99);
  for (int i = 0; i < 20; ++i) {
    Vec phi = random_state(dense_op.dim, rng);
    CHECK((dense_op.apply(phi) - impl_op.apply(phi)).norm() <= 1e-12 * phi.norm());
  }

  // iterative spectra agree with dense ones
  auto [p_dense, rep_dense] = ground_and_gap(dense_op);
  auto [p_impl, rep_impl] = ground_and_gap(impl_op, implicit_opts);
  CHECK(rep_impl.gap == doctest::Approx(rep_dense.gap).epsilon(1e-8));
  CHECK(rep_impl.ground_degeneracy == rep_dense.ground_degeneracy);
  // the two kernel bases span the same space
  Mat cross = p_dense.basis.adjoint() * p_impl.basis;
  CHECK(std::abs(op_norm(cross) - 1.0) < 1e-8);
  Mat resid = p_impl.basis - p_dense.basis * cross;
  CHECK(op_norm(resid) < 1e-7);
}

TEST_CASE("budget and kernel-ambiguity errors") {
  SolverOptions tiny;
  tiny.max_dim = 64;
  CHECK_THROWS_AS(assemble(builtin_model("heisenberg_fm"), chain(8), tiny),
                  BudgetError);

  // a term with eigenvalue inside [tol/10, tol) trips the ambiguity check
  Mat m = Mat::Zero(2, 2);
  m(1, 1) = 1.0;
  InteractionTerm t;
  t.support = Region::single({0});
  t.matrix = m;
  LocalHamiltonian h = model_from_terms("amb", 1, 2, 1, {t});
  SolverOptions opts;
  opts.kernel_tol = 2.0;  // [0.2, 2) contains the eigenvalue 1
  CHECK_THROWS_AS(ground_and_gap(assemble(h, chain(1)), opts), NumericsError);
}

TEST_CASE("single site of a bond-only model has H = 0") {
  AssembledOperator op = assemble(builtin_model("heisenberg_fm"),
                                  Region::single({0}));
  CHECK(op.terms.empty());
  auto [p, rep] = ground_and_gap(op);
  CHECK(rep.gap == 0.0);
  CHECK(rep.ground_degeneracy == 2);
  CHECK(p.basis.cols() == 2);
}

TEST_CASE("spectral csv row") {
  SpectralReport rep;
  rep.dim = 16;
  rep.gap = 0.5;
  rep.ground_degeneracy = 2;
  rep.tol_used = 1e-10;
  CHECK(spectral_csv_header() == "region,dim,gap,degeneracy,tol");
  CHECK(spectral_csv_row(chain(4), rep) == "\"0..3\",16,0.5,2,1e-10");
}
