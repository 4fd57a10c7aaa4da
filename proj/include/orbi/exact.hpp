#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace orbi {

using Rational = boost::rational<std::int64_t>;

/// Gaussian rational a + b i with exact arithmetic.
struct GaussRat {
  Rational re{0};
  Rational im{0};

  GaussRat() = default;
  GaussRat(std::int64_t r) : re(r) {}  // NOLINT: implicit from integers is intended
  GaussRat(Rational r, Rational i = Rational(0)) : re(r), im(i) {}

  static GaussRat i() { return GaussRat(Rational(0), Rational(1)); }

  bool is_zero() const { return re == Rational(0) && im == Rational(0); }
  GaussRat conj() const { return GaussRat(re, -im); }
  Rational norm2() const { return re * re + im * im; }
  std::complex<double> to_complex() const;

  GaussRat operator-() const { return GaussRat(-re, -im); }
  GaussRat& operator+=(const GaussRat& o);
  GaussRat& operator-=(const GaussRat& o);
  GaussRat& operator*=(const GaussRat& o);
  GaussRat& operator/=(const GaussRat& o);

  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
  friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
  friend bool operator==(const GaussRat& a, const GaussRat& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

  std::string str() const;
};

/// Small dense matrix over the Gaussian rationals, row-major.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

  static ExactMatrix identity(int n);
  static ExactMatrix scalar(int n, const GaussRat& s);
  static ExactMatrix from_rows(const std::vector<std::vector<GaussRat>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  GaussRat& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  const GaussRat& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  ExactMatrix operator*(const ExactMatrix& o) const;
  ExactMatrix operator+(const ExactMatrix& o) const;
  ExactMatrix operator-(const ExactMatrix& o) const;
  ExactMatrix scaled(const GaussRat& s) const;
  ExactMatrix adjoint() const;
  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const ExactMatrix& a, const ExactMatrix& b) { return !(a == b); }

  bool is_identity() const;
  bool is_zero() const;

  /// Inverse by Gauss-Jordan; empty when singular.
  std::optional<ExactMatrix> inverse() const;
  int rank() const;
  /// Basis of the right nullspace, one column per basis vector.
  ExactMatrix nullspace() const;

  std::string str() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<GaussRat> data_;
};

/// Reduced row echelon form in place; returns the pivot columns.
std::vector<int> row_reduce(ExactMatrix& m);

}  // namespace orbi
