#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace socert {

using Vector = std::vector<double>;

// Dense row-major matrix. Sized for the desk-scale problems this library
// targets (tens of rows/columns at most).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vector>& rows);
  static Matrix from_columns(const std::vector<Vector>& cols, std::size_t rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Vector row(std::size_t r) const;
  Vector col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const double> v);

  Matrix transpose() const;
  double frobenius() const;
  double max_abs() const;

  std::span<const double> data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);  // alpha*x + y
Vector scaled(double alpha, std::span<const double> x);
Vector normalized(std::span<const double> x);

// Bᵀ A B for symmetric A; the result is symmetrized exactly.
Matrix congruence(const Matrix& basis, const Matrix& a);
double quad_form(const Matrix& a, std::span<const double> d);

struct SymEigen {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, column i pairs with values[i]
};

// Cyclic Jacobi. The input is symmetrized on entry.
SymEigen sym_eigen(const Matrix& a);

struct Tolerances {
  double rel = 1e-8;
  double abs = 1e-12;
};

struct SvdResult {
  Matrix u;       // rows x k, orthonormal columns
  Vector sigma;   // k = min(rows, cols), descending
  Matrix v;       // cols x cols, orthonormal; first k columns pair with sigma
  std::size_t rank = 0;
};

// One-sided Jacobi SVD. Each right singular vector is signed so that its
// largest-magnitude entry (lowest index on ties) is positive.
SvdResult svd(const Matrix& a, Tolerances tol = {});

std::size_t numeric_rank(std::span<const double> sigma, Tolerances tol);

// Orthonormal basis of Ker(a) under the numeric rank decision of svd().
Matrix nullspace(const Matrix& a, Tolerances tol = {});

// Orthonormal basis for the span of the given columns (may have fewer columns).
Matrix orthonormal_span(const Matrix& cols, Tolerances tol = {});

// Minimum-norm least-squares solution via the SVD pseudo-inverse.
Vector pinv_solve(const Matrix& a, std::span<const double> b, Tolerances tol = {});

// Sign convention shared by vectors in reports: the largest-magnitude
// entry (lowest index on ties) is made positive.
void canonical_sign(std::span<double> v);
// Alternative convention: the first entry with |v_i| > eps is made positive.
void first_nonzero_positive(std::span<double> v, double eps = 1e-12);

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace socert
