#include <doctest.h>

#include <cmath>
#include <limits>

#include "socert/lp.hpp"
#include "socert/multipliers.hpp"
#include "socert/random.hpp"
#include "support.hpp"

using namespace socert;
using testing_support::gallery;

namespace {

MultiplierPolytope polytope_of(const std::string& id) { return lagrange_polytope(analyze_point(gallery(id))); }

bool has_vertex(const MultiplierPolytope& p, const Vector& v) {
  for (const Vector& w : p.vertices)
    if (norm_inf(axpy(-1.0, v, w)) <= 1e-12) return true;
  return false;
}

}  // namespace

TEST_CASE("lp_solve basic statuses") {
  LinearProgram simplex;
  simplex.objective = {1, 0, 0};
  simplex.a = Matrix::from_rows({{1, 1, 1}});
  simplex.b = {1};
  simplex.sign.assign(3, VarSign::Nonnegative);
  const LpResult r = lp_solve(simplex);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(1));
  CHECK(r.point == Vector{1, 0, 0});

  LinearProgram capped;
  capped.objective = {1};
  capped.a = Matrix(0, 1);
  capped.sign = {VarSign::Free};
  capped.lower = {-std::numeric_limits<double>::infinity()};
  capped.upper = {-1};
  const LpResult c = lp_solve(capped);
  REQUIRE(c.status == LpStatus::Optimal);
  CHECK(c.value == doctest::Approx(-1));

  LinearProgram free_lp;
  free_lp.objective = {1};
  free_lp.a = Matrix(0, 1);
  free_lp.sign = {VarSign::Free};
  CHECK(lp_solve(free_lp).status == LpStatus::Unbounded);

  LinearProgram infeasible = simplex;
  infeasible.b = {-1};
  CHECK(lp_solve(infeasible).status == LpStatus::Infeasible);
}

TEST_CASE("lp_solve agrees with brute force on random bounded problems") {
  for (std::size_t k = 0; k < 100; ++k) {
    Rng rng(31, k);
    // Random polytope: 2 equality rows over 5 nonnegative variables, shifted
    // so that a known positive point is feasible; a sum row keeps it bounded.
    Matrix a(3, 5);
    Vector x0(5);
    for (double& v : x0) v = rng.uniform(0.1, 1.0);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 5; ++j) a(i, j) = rng.normal();
    for (std::size_t j = 0; j < 5; ++j) a(2, j) = 1.0;
    const Vector b = a * x0;
    Vector c(5);
    for (double& v : c) v = rng.normal();
    const MultiplierPolytope p = make_polytope(a, b, 0);
    REQUIRE_FALSE(p.empty);
    REQUIRE(p.bounded);
    double best = -std::numeric_limits<double>::infinity();
    for (const Vector& v : p.vertices) best = std::max(best, dot(c, v));
    const LpResult r = lp_solve(p.lp(c));
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(std::abs(r.value - best) <= 1e-8);
  }
}

TEST_CASE("arutyunov multipliers are the unit simplex") {
  const MultiplierPolytope p = polytope_of("arutyunov");
  CHECK_FALSE(p.empty);
  CHECK(p.bounded);
  REQUIRE(p.vertices.size() == 3);
  CHECK(norm_inf(axpy(-1.0, p.vertices[0], Vector{1, 0, 0})) <= 1e-12);
  CHECK(norm_inf(axpy(-1.0, p.vertices[1], Vector{0, 1, 0})) <= 1e-12);
  CHECK(norm_inf(axpy(-1.0, p.vertices[2], Vector{0, 0, 1})) <= 1e-12);
  for (const Vector& v : p.vertices) CHECK(p.residual(v) <= 1e-8);
}

TEST_CASE("cosine multiplier vertices") {
  const MultiplierPolytope p = polytope_of("cosine-svd");
  REQUIRE(p.vertices.size() == 3);
  CHECK(has_vertex(p, {1, 0, 0}));
  CHECK(has_vertex(p, {0, 1, 0}));
  CHECK(has_vertex(p, {0, 0, 0.5}));
}

TEST_CASE("unconstrained stationary point has the singleton polytope") {
  const StationaryPointAnalysis a =
      analyze_point(parse_problem("problem t\nvars x1\npoint 0\nobjective x1^2\nle g x1 - 1\n"));
  const MultiplierPolytope p = lagrange_polytope(a);
  CHECK_FALSE(p.empty);
  CHECK(p.dim() == 0);
  REQUIRE(p.vertices.size() == 1);
  CHECK(p.vertices[0].empty());
}

TEST_CASE("non-stationary point has an empty polytope") {
  const StationaryPointAnalysis a =
      analyze_point(parse_problem("problem t\nvars x1\npoint 0\nobjective x1\nle g x1 - 1\n"));
  CHECK(lagrange_polytope(a).empty);
  CHECK(fritz_john_polytope(a).empty);
}

TEST_CASE("Fritz John polytope") {
  const FritzJohnPolytope fj = fritz_john_polytope(analyze_point(gallery("arutyunov")));
  CHECK_FALSE(fj.empty);
  const auto l0 = min_lambda0(fj);
  REQUIRE(l0.has_value());
  CHECK(*l0 > 0);

  const StationaryPointAnalysis opp =
      analyze_point(parse_problem("problem t\nvars x1\npoint 0\nobjective x1\nle g1 x1\nle g2 -x1\n"));
  const FritzJohnPolytope fj2 = fritz_john_polytope(opp);
  REQUIRE(min_lambda0(fj2).has_value());
  CHECK(*min_lambda0(fj2) == doctest::Approx(0.0));
}

TEST_CASE("linear_bounds on the arutyunov simplex") {
  const MultiplierPolytope p = polytope_of("arutyunov");
  const double s = 1 / std::sqrt(2.0);
  const LinearBounds b = linear_bounds(p, Vector{s, -s, 0});
  CHECK(b.min_value == doctest::Approx(-s));
  CHECK(b.max_value == doctest::Approx(s));
  CHECK(b.argmin == Vector{0, 1, 0});
  CHECK(b.argmax == Vector{1, 0, 0});
}

TEST_CASE("linear_bounds on a singleton and on an unbounded set") {
  const MultiplierPolytope single = polytope_of("rank-lemma-counterexample");
  const LinearBounds b = linear_bounds(single, Vector{0.3, -1, 2});
  CHECK(b.min_value == b.max_value);

  const StationaryPointAnalysis opp =
      analyze_point(parse_problem("problem t\nvars x1\npoint 0\nobjective x1\nle g1 x1\nle g2 -x1\n"));
  const MultiplierPolytope unb = lagrange_polytope(opp);
  CHECK_FALSE(unb.bounded);
  CHECK_THROWS_WITH_AS(linear_bounds(unb, Vector{1, 0}), doctest::Contains("MFCQ"), PolytopeError);
}

TEST_CASE("GSCS detection") {
  const GscsResult g = gscs_check(polytope_of("arutyunov"));
  CHECK(g.holds);
  CHECK(g.zero_indices.empty());
  CHECK_FALSE(g.i_star.has_value());

  const MultiplierPolytope forced =
      make_polytope(Matrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}}), Vector{0, 0, 1, 0}, 0);
  const GscsResult f = gscs_check(forced);
  CHECK_FALSE(f.holds);
  CHECK(f.zero_indices == std::vector<std::size_t>{0, 1});

  const MultiplierPolytope single = make_polytope(Matrix::from_rows({{1, 0}, {0, 1}}), Vector{2, 3}, 0);
  CHECK(gscs_check(single).holds);
}

TEST_CASE("Λ is the multiplier plus kernel directions") {
  const StationaryPointAnalysis a = analyze_point(gallery("cosine-svd"));
  const MultiplierPolytope p = lagrange_polytope(a);
  const Matrix kernel = nullspace(a.jacobian.transpose());
  REQUIRE(kernel.cols() == 2);
  for (std::size_t k = 0; k < 50; ++k) {
    Rng rng(32, k);
    const Vector w = kernel * Vector{rng.normal(), rng.normal()};
    for (double t : {-3.0, -0.1, 0.5, 10.0}) CHECK(p.residual(axpy(t, w, p.vertices[0])) <= 1e-10);
  }
}

TEST_CASE("boundedness agrees with MFCQ-style gallery expectations") {
  for (const auto& id : gallery_ids()) CHECK(polytope_of(id).bounded);
}
