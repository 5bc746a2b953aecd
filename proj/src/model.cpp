#include "socert/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace socert {

SvdOracle::Factors SvdOracle::evaluate(std::span<const double> x, std::size_t rows, std::size_t n) const {
  Factors f{Matrix(rows, rows), Vector(std::min(rows, n), 0.0), Matrix(n, n)};
  for (const auto& [ij, fn] : u) {
    if (ij.first >= rows || ij.second >= rows)
      throw DataError("svd_u index (" + std::to_string(ij.first + 1) + "," + std::to_string(ij.second + 1) +
                      ") outside the " + std::to_string(rows) + "x" + std::to_string(rows) + " active Jacobian shape");
    f.u(ij.first, ij.second) = fn.eval(x);
  }
  for (const auto& [k, fn] : sigma) {
    if (k >= f.sigma.size())
      throw DataError("svd_sigma index " + std::to_string(k + 1) + " exceeds min(rows, n) = " +
                      std::to_string(f.sigma.size()));
    f.sigma[k] = fn.eval(x);
  }
  for (const auto& [ij, fn] : v) {
    if (ij.first >= n || ij.second >= n)
      throw DataError("svd_v index (" + std::to_string(ij.first + 1) + "," + std::to_string(ij.second + 1) +
                      ") outside " + std::to_string(n) + "x" + std::to_string(n));
    f.v(ij.first, ij.second) = fn.eval(x);
  }
  return f;
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

std::size_t parse_index(const std::string& tok, std::size_t line_no) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size() || v < 1)
    throw DataError("line " + std::to_string(line_no) + ": expected a 1-based index, got '" + tok + "'");
  return static_cast<std::size_t>(v - 1);
}

bool is_ident(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

NlpProblem parse_problem(const std::string& text) {
  NlpProblem p;
  bool have_vars = false, have_point = false, have_objective = false;
  std::vector<std::string> point_tokens;
  std::size_t point_line = 0;
  std::set<std::string> names;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& msg) -> DataError { return DataError("line " + std::to_string(line_no) + ": " + msg); };
  auto expr_of = [&](const std::string& src) {
    if (!have_vars) throw fail("expression before 'vars'");
    try {
      return parse(src, p.vars);
    } catch (const ParseError& e) {
      throw fail(e.what());
    }
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto rest = [&] {
      std::string r;
      std::getline(ls, r);
      return r;
    };
    auto word = [&](const char* what) {
      std::string w;
      if (!(ls >> w)) throw fail(std::string("missing ") + what);
      return w;
    };

    if (key == "problem") {
      p.name = word("problem name");
      if (!is_ident(p.name)) throw fail("problem name must be an identifier");
    } else if (key == "vars") {
      if (have_vars) throw fail("duplicate 'vars'");
      std::string v;
      while (ls >> v) {
        if (!is_ident(v)) throw fail("bad variable name '" + v + "'");
        if (std::find(p.vars.begin(), p.vars.end(), v) != p.vars.end()) throw fail("duplicate variable '" + v + "'");
        p.vars.push_back(v);
      }
      if (p.vars.empty()) throw fail("'vars' needs at least one name");
      have_vars = true;
    } else if (key == "point") {
      std::string v;
      while (ls >> v) point_tokens.push_back(v);
      point_line = line_no;
      have_point = true;
    } else if (key == "objective") {
      p.objective = expr_of(rest());
      have_objective = true;
    } else if (key == "eq" || key == "le") {
      const std::string name = word("constraint name");
      if (!is_ident(name)) throw fail("bad constraint name '" + name + "'");
      if (!names.insert(name).second) throw fail("duplicate constraint name '" + name + "'");
      NamedFunction nf{name, expr_of(rest())};
      (key == "eq" ? p.equalities : p.inequalities).push_back(std::move(nf));
    } else if (key == "svd_u" || key == "svd_v") {
      const std::size_t i = parse_index(word("row index"), line_no);
      const std::size_t j = parse_index(word("column index"), line_no);
      if (!p.oracle) p.oracle.emplace();
      auto& target = key == "svd_u" ? p.oracle->u : p.oracle->v;
      if (!target.emplace(std::pair{i, j}, expr_of(rest())).second) throw fail("duplicate " + key + " entry");
    } else if (key == "svd_sigma") {
      const std::size_t k = parse_index(word("index"), line_no);
      if (!p.oracle) p.oracle.emplace();
      if (!p.oracle->sigma.emplace(k, expr_of(rest())).second) throw fail("duplicate svd_sigma entry");
    } else {
      throw fail("unknown directive '" + key + "'");
    }
  }

  if (p.name.empty()) throw DataError("missing 'problem' line");
  if (!have_vars) throw DataError("missing 'vars' line");
  if (!have_point) throw DataError("missing 'point' line");
  if (!have_objective) throw DataError("missing 'objective' line");
  if (point_tokens.size() != p.vars.size())
    throw DataError("line " + std::to_string(point_line) + ": point has " + std::to_string(point_tokens.size()) +
                    " coordinates but there are " + std::to_string(p.vars.size()) + " variables");
  for (const auto& t : point_tokens) {
    try {
      // Coordinates are constant expressions, so "pi/4" or "1/3" work too.
      p.point.push_back(parse(t, {}).eval({}));
    } catch (const std::exception& e) {
      throw DataError("line " + std::to_string(point_line) + ": bad coordinate '" + t + "': " + e.what());
    }
  }
  return p;
}

NlpProblem load_problem(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

StationaryPointAnalysis analyze_point(const NlpProblem& p, double eps_act, Tolerances rank_tol) {
  StationaryPointAnalysis a;
  a.x = p.point;
  a.rank_tol = rank_tol;
  a.num_equalities = p.equalities.size();
  const std::size_t n = p.arity();

  double worst = 0.0;
  std::string worst_name;
  for (const auto& h : p.equalities) {
    const double v = std::abs(h.fn.eval(a.x));
    if (v > worst) {
      worst = v;
      worst_name = h.name;
    }
  }
  std::vector<double> gvals;
  for (const auto& g : p.inequalities) {
    const double v = g.fn.eval(a.x);
    gvals.push_back(v);
    if (v > worst) {
      worst = v;
      worst_name = g.name;
    }
  }
  a.feasibility_residual = worst;
  if (worst > kFeasibilityTol)
    throw DataError("candidate point is infeasible: constraint '" + worst_name + "' violated by " +
                    std::to_string(worst));

  for (std::size_t j = 0; j < gvals.size(); ++j)
    if (gvals[j] >= -eps_act) a.active.push_back(j);

  const Taylor2 fj = p.objective.eval_jet(a.x);
  a.grad_f = fj.gradient();
  a.hess_f = fj.hessian();

  a.jacobian = Matrix(a.rows(), n);
  auto add_row = [&](std::size_t r, const ScalarFunction& fn) {
    const Taylor2 t = fn.eval_jet(a.x);
    for (std::size_t c = 0; c < n; ++c) a.jacobian(r, c) = t.gradient()[c];
    a.row_hessians.push_back(t.hessian());
  };
  for (std::size_t i = 0; i < p.equalities.size(); ++i) add_row(i, p.equalities[i].fn);
  for (std::size_t k = 0; k < a.active.size(); ++k) add_row(a.num_equalities + k, p.inequalities[a.active[k]].fn);

  if (a.rows() == 0) {
    a.rank = 0;
    a.critical_basis = Matrix::identity(n);
  } else {
    a.rank = svd(a.jacobian, rank_tol).rank;
    a.critical_basis = nullspace(a.jacobian, rank_tol);
  }
  return a;
}

Matrix active_jacobian(const NlpProblem& p, const StationaryPointAnalysis& a, std::span<const double> x) {
  const std::size_t n = p.arity();
  Matrix j(a.rows(), n);
  auto fill = [&](std::size_t r, const ScalarFunction& fn) {
    const Taylor2 t = fn.eval_jet(x);
    for (std::size_t c = 0; c < n; ++c) j(r, c) = t.gradient()[c];
  };
  for (std::size_t i = 0; i < a.num_equalities; ++i) fill(i, p.equalities[i].fn);
  for (std::size_t k = 0; k < a.active.size(); ++k) fill(a.num_equalities + k, p.inequalities[a.active[k]].fn);
  return j;
}

Matrix lagrangian_hessian(const StationaryPointAnalysis& a, std::span<const double> nu) {
  if (nu.size() != a.rows())
    throw DataError("multiplier has " + std::to_string(nu.size()) + " entries, expected " + std::to_string(a.rows()));
  Matrix h = a.hess_f;
  for (std::size_t r = 0; r < nu.size(); ++r) {
    if (nu[r] == 0.0) continue;
    h = h + nu[r] * a.row_hessians[r];
  }
  return h;
}

Matrix lagrangian_hessian(const NlpProblem& p, const StationaryPointAnalysis& a, std::span<const double> lambda,
                          std::span<const double> mu_active) {
  if (lambda.size() != p.equalities.size())
    throw DataError("expected " + std::to_string(p.equalities.size()) + " equality multipliers");
  if (mu_active.size() != a.active.size())
    throw DataError("expected " + std::to_string(a.active.size()) + " active inequality multipliers");
  Vector nu(lambda.begin(), lambda.end());
  nu.insert(nu.end(), mu_active.begin(), mu_active.end());
  return lagrangian_hessian(a, nu);
}

std::string row_name(const NlpProblem& p, const StationaryPointAnalysis& a, std::size_t row) {
  if (row < a.num_equalities) return p.equalities[row].name;
  return p.inequalities[a.active[row - a.num_equalities]].name;
}

}  // namespace socert
