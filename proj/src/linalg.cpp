#include "socert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace socert {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw LinalgError("ragged rows");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Matrix Matrix::from_columns(const std::vector<Vector>& cols, std::size_t rows) {
  Matrix m(rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) m.set_col(c, cols[c]);
  return m;
}

Vector Matrix::row(std::size_t r) const {
  return Vector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

Vector Matrix::col(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void Matrix::set_col(std::size_t c, std::span<const double> v) {
  if (v.size() != rows_) throw LinalgError("column length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw LinalgError("matrix product dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw LinalgError("matrix sum dimension mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-1.0) * b; }

Matrix operator*(double s, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw LinalgError("matrix-vector dimension mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw LinalgError("dot dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LinalgError("axpy dimension mismatch");
  Vector r(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] += alpha * x[i];
  return r;
}

Vector scaled(double alpha, std::span<const double> x) {
  Vector r(x.begin(), x.end());
  for (double& v : r) v *= alpha;
  return r;
}

Vector normalized(std::span<const double> x) {
  const double n = norm2(x);
  if (n == 0.0) throw LinalgError("cannot normalize a zero vector");
  return scaled(1.0 / n, x);
}

Matrix congruence(const Matrix& basis, const Matrix& a) {
  Matrix m = basis.transpose() * a * basis;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double s = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = s;
      m(j, i) = s;
    }
  return m;
}

double quad_form(const Matrix& a, std::span<const double> d) { return dot(d, a * d); }

void canonical_sign(std::span<double> v) {
  std::size_t best = 0;
  double mag = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > mag) {
      mag = std::abs(v[i]);
      best = i;
    }
  }
  if (!v.empty() && v[best] < 0.0)
    for (double& x : v) x = -x;
}

void first_nonzero_positive(std::span<double> v, double eps) {
  for (double x : v) {
    if (std::abs(x) > eps) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

namespace {

void check_finite(const Matrix& a) {
  for (double x : a.data())
    if (!std::isfinite(x)) throw LinalgError("matrix has non-finite entries");
}

}  // namespace

SymEigen sym_eigen(const Matrix& input) {
  if (input.rows() != input.cols()) throw LinalgError("sym_eigen needs a square matrix");
  check_finite(input);
  const std::size_t n = input.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
  Matrix v = Matrix::identity(n);

  const double fro = a.frobenius();
  const double target = 1e-14 * fro;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= target) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    Vector col = v.col(order[k]);
    canonical_sign(col);
    out.vectors.set_col(k, col);
  }
  return out;
}

std::size_t numeric_rank(std::span<const double> sigma, Tolerances tol) {
  if (sigma.empty()) return 0;
  const double top = sigma[0];
  std::size_t r = 0;
  for (double s : sigma)
    if (s > tol.rel * top && s > tol.abs) ++r;
  return r;
}

namespace {

// Completes the columns [from, k) of u to an orthonormal set against the
// earlier columns, using standard basis vectors as seeds.
void complete_orthonormal(Matrix& u, std::size_t from) {
  const std::size_t m = u.rows();
  std::size_t seed = 0;
  for (std::size_t c = from; c < u.cols(); ++c) {
    for (; seed < m; ++seed) {
      Vector w(m, 0.0);
      w[seed] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < c; ++j) {
          const Vector uj = u.col(j);
          w = axpy(-dot(uj, w), uj, w);
        }
      const double nw = norm2(w);
      if (nw > 1e-6) {
        u.set_col(c, scaled(1.0 / nw, w));
        ++seed;
        break;
      }
    }
  }
}

}  // namespace

SvdResult svd(const Matrix& a, Tolerances tol) {
  check_finite(a);
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix w = a;  // columns get orthogonalized in place
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Vector norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = norm2(w.col(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

  const std::size_t k = std::min(m, n);
  SvdResult out;
  out.sigma.resize(k);
  out.u = Matrix(m, k);
  out.v = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector vc = v.col(order[j]);
    Vector wc = w.col(order[j]);
    // Sign convention on the right vector; the left vector follows.
    std::size_t big = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(vc[i]) > std::abs(vc[big])) big = i;
    if (vc[big] < 0.0) {
      vc = scaled(-1.0, vc);
      wc = scaled(-1.0, wc);
    }
    out.v.set_col(j, vc);
    if (j < k) out.sigma[j] = norms[order[j]];
    if (j < k && norms[order[j]] > 0.0) out.u.set_col(j, scaled(1.0 / norms[order[j]], wc));
  }
  out.rank = numeric_rank(out.sigma, tol);

  // Left vectors for (numerically) zero singular values are arbitrary; give
  // them an orthonormal completion.
  std::size_t first_zero = 0;
  while (first_zero < k && out.sigma[first_zero] > 0.0 &&
         out.sigma[first_zero] > 1e-13 * std::max(1.0, out.sigma[0]))
    ++first_zero;
  complete_orthonormal(out.u, first_zero);
  return out;
}

Matrix nullspace(const Matrix& a, Tolerances tol) {
  if (a.cols() == 0) return {};
  if (a.rows() == 0) return Matrix::identity(a.cols());
  const SvdResult s = svd(a, tol);
  const std::size_t n = a.cols();
  Matrix basis(n, n - s.rank);
  for (std::size_t j = s.rank; j < n; ++j) basis.set_col(j - s.rank, s.v.col(j));
  return basis;
}

Matrix orthonormal_span(const Matrix& cols, Tolerances tol) {
  if (cols.cols() == 0) return Matrix(cols.rows(), 0);
  const SvdResult s = svd(cols, tol);
  Matrix basis(cols.rows(), s.rank);
  for (std::size_t j = 0; j < s.rank; ++j) {
    Vector c = s.u.col(j);
    canonical_sign(c);
    basis.set_col(j, c);
  }
  return basis;
}

Vector pinv_solve(const Matrix& a, std::span<const double> b, Tolerances tol) {
  if (a.rows() != b.size()) throw LinalgError("pinv_solve dimension mismatch");
  const SvdResult s = svd(a, tol);
  Vector x(a.cols(), 0.0);
  for (std::size_t j = 0; j < s.rank; ++j) {
    const double coef = dot(s.u.col(j), b) / s.sigma[j];
    x = axpy(coef, s.v.col(j), x);
  }
  return x;
}

}  // namespace socert
