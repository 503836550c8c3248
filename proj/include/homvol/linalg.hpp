#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace homvol {

/// Dense row-major matrix; sizes here are small (Gram and moment matrices).
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }

  double trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  Matrix transpose() const;
  bool is_symmetric(double rel_tol = 1e-12) const;

  Matrix &operator+=(const Matrix &o);
  Matrix &operator-=(const Matrix &o);
  Matrix &operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix &b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix &b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix &a, const Matrix &b);
  friend bool operator==(const Matrix &, const Matrix &) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Frobenius inner product <A, B> = trace(A^T B).
double inner(const Matrix &a, const Matrix &b);

/// Largest absolute eigenvalue of a symmetric matrix.
double operator_norm_sym(const Matrix &a);

struct EigenDecomposition {
  std::vector<double> values; // ascending
  Matrix vectors;             // column k is the eigenvector of values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Iterates until the
/// off-diagonal Frobenius norm drops below tol times the matrix norm.
/// Throws std::domain_error on non-finite entries or a non-square input.
EigenDecomposition jacobi_eigen(const Matrix &a, double tol = 1e-12,
                                int max_sweeps = 100);

/// V diag(values) V^T
Matrix reconstruct(const EigenDecomposition &eig);

} // namespace homvol
