#include <doctest.h>

#include <cmath>

#include "socert/random.hpp"
#include "socert/secondorder.hpp"
#include "support.hpp"

using namespace socert;
using testing_support::gallery;

namespace {

Matrix random_symmetric(std::size_t n, Rng& rng) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.normal();
  return m;
}

double restricted_lambda_min(const StationaryPointAnalysis& a, const Vector& nu) {
  return wsoc_check(restrict_form(a.critical_basis, lagrangian_hessian(a, nu))).lambda_min;
}

}  // namespace

TEST_CASE("wsoc_check on the minchenko vertices") {
  const StationaryPointAnalysis a = analyze_point(gallery("minchenko"));
  CHECK(restricted_lambda_min(a, {1, 0, 0}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(restricted_lambda_min(a, {0, 1, 0}) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(restricted_lambda_min(a, {0, 0, 1}) == doctest::Approx(-2.0).epsilon(1e-12));
  const PsdVerdict v = wsoc_check(restrict_form(a.critical_basis, lagrangian_hessian(a, Vector{0, 1, 0})));
  CHECK_FALSE(v.holds);
  REQUIRE(v.witness.size() == 2);
  CHECK(quad_form(lagrangian_hessian(a, Vector{0, 1, 0}), v.witness) < 0);
}

TEST_CASE("wsoc_check on an empty subspace holds trivially") {
  const PsdVerdict v = wsoc_check(restrict_form(Matrix(3, 0), -1.0 * Matrix::identity(3)));
  CHECK(v.holds);
  CHECK(v.lambda_min == 0.0);
  CHECK(v.witness.empty());
}

TEST_CASE("MFCQ examples") {
  const MfcqReport m = check_mfcq(analyze_point(gallery("minchenko")));
  CHECK(m.holds);
  REQUIRE(m.direction.has_value());
  CHECK(*m.direction == Vector{0, -1});
  CHECK(check_mfcq(analyze_point(gallery("arutyunov"))).holds);

  const StationaryPointAnalysis opp =
      analyze_point(parse_problem("problem t\nvars x1\npoint 0\nobjective x1\nle g1 x1\nle g2 -x1\n"));
  CHECK_FALSE(check_mfcq(opp).holds);

  const StationaryPointAnalysis dup =
      analyze_point(parse_problem("problem t\nvars x1 x2\npoint 0 0\nobjective x2\neq h1 x1\neq h2 2*x1\n"));
  const MfcqReport d = check_mfcq(dup);
  CHECK_FALSE(d.holds);
  CHECK_FALSE(d.equality_independent);
}

TEST_CASE("critical cone descriptions agree on random directions") {
  for (const std::string id : {"minchenko", "arutyunov", "cosine-svd", "parabola-duplicated"}) {
    const StationaryPointAnalysis a = analyze_point(gallery(id));
    const MultiplierPolytope p = lagrange_polytope(a);
    // A relative-interior multiplier: the vertex average.
    Vector nu(p.dim(), 0.0);
    for (const Vector& v : p.vertices) nu = axpy(1.0 / static_cast<double>(p.vertices.size()), v, nu);
    const LinearCone c4 = critical_cone_gradients(a);
    const LinearCone c5 = critical_cone_multiplier(a, nu);
    std::size_t disagreements = 0, inside = 0;
    for (std::size_t k = 0; k < 10000; ++k) {
      Rng rng(41, k);
      Vector d(a.dim());
      for (double& v : d) v = rng.normal();
      // Half the samples are pushed into S so both sides see members.
      if (k % 2 == 0) d = a.critical_basis * (a.critical_basis.transpose() * d);
      const bool in4 = c4.contains(d), in5 = c5.contains(d);
      inside += in4;
      disagreements += in4 != in5;
    }
    CHECK(disagreements == 0);
    CHECK(inside > 0);
  }
}

TEST_CASE("SSOC on a first-order cone that is a subspace equals WSOC") {
  const StationaryPointAnalysis a = analyze_point(gallery("minchenko"));
  const FirstOrderCone cone{a.critical_basis, std::nullopt};
  for (const Vector& nu : {Vector{1, 0, 0}, Vector{0, 1, 0}}) {
    const Matrix h = lagrangian_hessian(a, nu);
    const PsdVerdict s = ssoc_first_order_check(h, cone);
    const PsdVerdict w = wsoc_check(restrict_form(a.critical_basis, h));
    CHECK(s.holds == w.holds);
    CHECK(s.lambda_min == doctest::Approx(w.lambda_min).epsilon(1e-12));
  }
}

TEST_CASE("GSCS cone on the arutyunov example") {
  const StationaryPointAnalysis a = analyze_point(gallery("arutyunov"));
  const MultiplierPolytope p = lagrange_polytope(a);
  const GscsResult g = gscs_check(p);
  const auto cone = gscs_cone(a, p, g);
  REQUIRE(cone.has_value());
  CHECK(cone->span_basis().cols() == 2);
}

TEST_CASE("GSCS cone with a forced-zero multiplier adds a ray") {
  // μ₂ vanishes on all of Λ; the cone is S plus the ray where g2 decreases.
  const StationaryPointAnalysis a = analyze_point(
      parse_problem("problem t\nvars x1 x2\npoint 0 0\nobjective x1^2 + x2\nle g1 -x2\nle g2 x1\n"));
  const MultiplierPolytope p = lagrange_polytope(a);
  const GscsResult g = gscs_check(p);
  CHECK(g.holds);
  REQUIRE(g.i_star.has_value());
  CHECK(*g.i_star == 1);
  const auto cone = gscs_cone(a, p, g);
  REQUIRE(cone.has_value());
  REQUIRE(cone->ray.has_value());
  CHECK((*cone->ray)[0] == doctest::Approx(-1.0));
}

TEST_CASE("sample_directions shapes") {
  CHECK(sample_directions(1, 10, 1).size() == 1);
  const auto circle = sample_directions(2, 720, 1);
  CHECK(circle.size() == 720);
  for (const Vector& d : circle) CHECK(norm2(d) == doctest::Approx(1.0));
  const auto sphere = sample_directions(3, 100, 1);
  CHECK(sphere.size() == 100);
  const auto high = sample_directions(5, 50, 1);
  CHECK(high.size() == 50);
  CHECK(high[0] == Vector{1, 0, 0, 0, 0});
  CHECK(sample_directions(5, 50, 7) == sample_directions(5, 50, 7));
}

TEST_CASE("directionwise necessary condition on the arutyunov example") {
  const StationaryPointAnalysis a = analyze_point(gallery("arutyunov"));
  const MultiplierPolytope p = lagrange_polytope(a);
  const DirectionwiseResult r = directionwise_necessary(p, a, a.critical_basis, sample_directions(2, 720, 42));
  CHECK(r.directions == 720);
  CHECK(r.worst_value >= -1e-9);
  // The LP optimum in direction d is the max over the simplex vertices.
  const FormCoefficients fc = form_coefficients(a, r.worst_direction);
  double best = -1e300;
  for (const Vector& v : p.vertices) best = std::max(best, fc.constant + dot(fc.coef, v));
  CHECK(r.worst_value == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("form coefficients reproduce the quadratic form") {
  const StationaryPointAnalysis a = analyze_point(gallery("cosine-svd"));
  for (std::size_t k = 0; k < 20; ++k) {
    Rng rng(42, k);
    const Vector d{rng.normal(), rng.normal(), rng.normal()};
    const Vector nu{rng.uniform(), rng.uniform(), rng.uniform()};
    const FormCoefficients fc = form_coefficients(a, d);
    CHECK(fc.constant + dot(fc.coef, nu) == doctest::Approx(quad_form(lagrangian_hessian(a, nu), d)).epsilon(1e-12));
  }
}

TEST_CASE("Yuan combiner examples") {
  const Matrix p = Matrix::from_rows({{1, 0}, {0, -1}});
  const Matrix q = Matrix::from_rows({{-1, 0}, {0, 1}});
  const YuanResult c = yuan_combine(p, q);
  REQUIRE(c.kind == YuanResult::Kind::Combined);
  CHECK(c.alpha == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(c.lambda_min >= -1e-8);

  const YuanResult r = yuan_combine(-1.0 * Matrix::identity(2), Matrix::from_rows({{-2, 0}, {0, 1}}));
  REQUIRE(r.kind == YuanResult::Kind::Refuted);
  CHECK(quad_form(-1.0 * Matrix::identity(2), r.witness) < 0);

  const YuanResult e = yuan_combine(Matrix::identity(3), -1.0 * Matrix::identity(3));
  REQUIRE(e.kind == YuanResult::Kind::Combined);
  CHECK(e.alpha == 1.0);
}

TEST_CASE("Yuan combined verdicts are sound on random pairs") {
  for (std::size_t k = 0; k < 200; ++k) {
    Rng rng(43, k);
    const std::size_t s = 1 + k % 5;
    const Matrix p = random_symmetric(s, rng), q = random_symmetric(s, rng);
    const YuanResult y = yuan_combine(p, q);
    const Matrix m = y.alpha * p + (1 - y.alpha) * q;
    if (y.kind == YuanResult::Kind::Combined)
      CHECK(sym_eigen(m).values[0] >= -1e-8 * (1 + m.frobenius()));
    if (y.kind == YuanResult::Kind::Refuted) CHECK(std::max(quad_form(p, y.witness), quad_form(q, y.witness)) < 0);
  }
}

TEST_CASE("combined_lambda_min is concave along the segment") {
  Rng rng(44, 0);
  const Matrix p = random_symmetric(4, rng), q = random_symmetric(4, rng);
  for (int i = 1; i < 20; ++i) {
    const double a = i / 20.0, h = 0.05;
    const double mid = combined_lambda_min(p, q, a);
    CHECK(mid >= 0.5 * (combined_lambda_min(p, q, a - h) + combined_lambda_min(p, q, a + h)) - 1e-12);
  }
}

TEST_CASE("golden section maximization") {
  CHECK(golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0, 1, 1e-10) ==
        doctest::Approx(0.3).epsilon(1e-8));
  CHECK(golden_section_max([](double) { return 1.0; }, 0, 1, 1e-10) <= 1e-8);
}

TEST_CASE("WSOC multiplier search") {
  const StationaryPointAnalysis m = analyze_point(gallery("minchenko"));
  const WsocSearchResult r = find_wsoc_multiplier(lagrange_polytope(m), m, m.critical_basis);
  CHECK(r.found);
  CHECK(r.lambda_min == doctest::Approx(2.0).epsilon(1e-9));

  const StationaryPointAnalysis a = analyze_point(gallery("arutyunov"));
  const WsocSearchResult s = find_wsoc_multiplier(lagrange_polytope(a), a, a.critical_basis);
  CHECK_FALSE(s.found);
  CHECK(s.lambda_min == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("Fritz John directionwise value") {
  const StationaryPointAnalysis a = analyze_point(gallery("arutyunov"));
  const FjDirectionResult r = fritz_john_directionwise(fritz_john_polytope(a), a, Vector{1, 0, 0});
  CHECK(r.point.size() == 4);
  CHECK(std::isfinite(r.value));
}
