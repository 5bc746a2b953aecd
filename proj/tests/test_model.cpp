#include <doctest.h>

#include <cmath>

#include "socert/model.hpp"
#include "socert/random.hpp"
#include "support.hpp"

using namespace socert;
using testing_support::gallery;

TEST_CASE("load the arutyunov gallery file") {
  const NlpProblem p = gallery("arutyunov");
  CHECK(p.arity() == 3);
  CHECK(p.equalities.empty());
  CHECK(p.inequalities.size() == 3);
  CHECK(p.point == Vector{0, 0, 0});
  CHECK_FALSE(p.oracle.has_value());
}

TEST_CASE("cosine gallery file carries the oracle") {
  const NlpProblem p = gallery("cosine-svd");
  REQUIRE(p.oracle.has_value());
  CHECK(p.oracle->u.size() == 9);
  CHECK(p.oracle->sigma.size() == 3);
  CHECK(p.oracle->v.size() == 9);
}

TEST_CASE("problem file errors") {
  CHECK_THROWS_WITH_AS(parse_problem("problem t\nvars x1 x2 x3\npoint 0 0\nobjective x1\n"),
                       doctest::Contains("point has 2 coordinates"), DataError);
  CHECK_THROWS_WITH_AS(parse_problem("problem t\nvars x1\npoint 0\nobjective x1\nle g x1\nle g -x1\n"),
                       doctest::Contains("line 6"), DataError);
  CHECK_THROWS_WITH_AS(parse_problem("problem t\nvars x1\npoint 0\nobjective x1 +* 2\n"),
                       doctest::Contains("line 4"), DataError);
  CHECK_THROWS_WITH_AS(parse_problem("problem t\nvars x1\npoint 0\nobjective x1\nfoo bar\n"),
                       doctest::Contains("unknown directive"), DataError);
  CHECK_THROWS_AS(parse_problem("problem t\nvars x1 x1\npoint 0 0\nobjective x1\n"), DataError);
  CHECK_THROWS_AS(parse_problem("problem t\nvars x1\nobjective x1\n"), DataError);
}

TEST_CASE("comments, blank lines and constant-expression coordinates") {
  const NlpProblem p = parse_problem("# header\n\nproblem t  # trailing\nvars x1 x2\npoint pi/4 1/2\n"
                                     "objective x1\neq h1 x1 - pi/4\n");
  CHECK(p.point[0] == doctest::Approx(std::numbers::pi / 4));
  CHECK(p.point[1] == 0.5);
  CHECK(p.equalities.size() == 1);
}

TEST_CASE("analyze_point on gallery problems") {
  const StationaryPointAnalysis a = analyze_point(gallery("arutyunov"));
  CHECK(a.active == std::vector<std::size_t>{0, 1, 2});
  CHECK(a.rank == 1);
  CHECK(a.subspace_dim() == 2);

  const StationaryPointAnalysis m = analyze_point(gallery("minchenko"));
  CHECK(m.active == std::vector<std::size_t>{0, 1, 2});
  CHECK(m.rank == 1);
  REQUIRE(m.subspace_dim() == 1);
  CHECK(std::abs(m.critical_basis(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("interior point has no active constraints") {
  const NlpProblem p = parse_problem("problem t\nvars x1 x2\npoint 0 0\nobjective x1^2 + x2^2\nle g x1 - 1\n");
  const StationaryPointAnalysis a = analyze_point(p);
  CHECK(a.active.empty());
  CHECK(a.jacobian.rows() == 0);
  CHECK(a.subspace_dim() == 2);
  CHECK((a.critical_basis - Matrix::identity(2)).max_abs() == 0.0);
}

TEST_CASE("infeasible points are rejected naming the worst constraint") {
  const NlpProblem p = parse_problem("problem t\nvars x1\npoint 1\nobjective x1\nle ga x1 - 0.5\nle gb x1 - 0.9\n");
  CHECK_THROWS_WITH_AS(analyze_point(p), doctest::Contains("'ga'"), DataError);
}

TEST_CASE("minchenko Lagrangian Hessians") {
  const NlpProblem p = gallery("minchenko");
  const StationaryPointAnalysis a = analyze_point(p);
  const Matrix h1 = lagrangian_hessian(p, a, {}, Vector{1, 0, 0});
  CHECK((h1 - Matrix::from_rows({{2, 0}, {0, 0}})).max_abs() == 0.0);
  const Matrix h2 = lagrangian_hessian(p, a, {}, Vector{0, 1, 0});
  CHECK((h2 - Matrix::from_rows({{-4, 0}, {0, 0}})).max_abs() == 0.0);
  CHECK((lagrangian_hessian(p, a, {}, Vector{0, 0, 0}) - a.hess_f).max_abs() == 0.0);
  CHECK_THROWS_AS(lagrangian_hessian(p, a, {}, Vector{1, 0}), DataError);
}

TEST_CASE("Lagrangian Hessian is affine in the multiplier") {
  const NlpProblem p = gallery("cosine-svd");
  const StationaryPointAnalysis a = analyze_point(p);
  for (std::size_t k = 0; k < 50; ++k) {
    Rng rng(21, k);
    const Vector n1{rng.uniform(), rng.uniform(), rng.uniform()};
    const Vector n2{rng.uniform(), rng.uniform(), rng.uniform()};
    const double t = rng.uniform();
    const Matrix lhs = lagrangian_hessian(a, axpy(t, n1, scaled(1 - t, n2)));
    const Matrix rhs = t * lagrangian_hessian(a, n1) + (1 - t) * lagrangian_hessian(a, n2);
    CHECK((lhs - rhs).max_abs() <= 1e-14);
  }
}

TEST_CASE("analysis is invariant under reordering inactive constraints") {
  const std::string head = "problem t\nvars x1 x2\npoint 0 0\nobjective x2\nle a x1^2 - x2\n";
  const StationaryPointAnalysis a1 = analyze_point(parse_problem(head + "le b x1 - 3\nle c x2 - 5\n"));
  const StationaryPointAnalysis a2 = analyze_point(parse_problem(head + "le c x2 - 5\nle b x1 - 3\n"));
  CHECK(a1.rank == a2.rank);
  CHECK((a1.jacobian - a2.jacobian).max_abs() == 0.0);
  CHECK((a1.critical_basis - a2.critical_basis).max_abs() == 0.0);
}

TEST_CASE("oracle shape errors") {
  const NlpProblem p = parse_problem("problem t\nvars x1\npoint 0\nobjective x1\nle g -x1\nsvd_u 2 1 1\n");
  const StationaryPointAnalysis a = analyze_point(p);
  CHECK_THROWS_AS(p.oracle->evaluate(a.x, a.rows(), a.dim()), DataError);
}
