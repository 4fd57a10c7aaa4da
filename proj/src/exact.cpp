#include "orbi/exact.hpp"

#include <boost/rational.hpp>
#include <sstream>
#include <utility>

namespace orbi {

std::complex<double> GaussRat::to_complex() const {
  return {boost::rational_cast<double>(re), boost::rational_cast<double>(im)};
}

GaussRat& GaussRat::operator+=(const GaussRat& o) {
  re += o.re;
  im += o.im;
  return *this;
}

GaussRat& GaussRat::operator-=(const GaussRat& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

GaussRat& GaussRat::operator*=(const GaussRat& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = r;
  im = i;
  return *this;
}

GaussRat& GaussRat::operator/=(const GaussRat& o) {
  Rational d = o.norm2();
  if (d == Rational(0)) throw std::domain_error("GaussRat: division by zero");
  *this *= o.conj();
  re /= d;
  im /= d;
  return *this;
}

namespace {
std::string rat_str(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}
}  // namespace

std::string GaussRat::str() const {
  if (im == Rational(0)) return rat_str(re);
  if (re == Rational(0)) return rat_str(im) + "i";
  return rat_str(re) + (im > Rational(0) ? "+" : "") + rat_str(im) + "i";
}

ExactMatrix ExactMatrix::identity(int n) { return scalar(n, GaussRat(1)); }

ExactMatrix ExactMatrix::scalar(int n, const GaussRat& s) {
  ExactMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = s;
  return m;
}

ExactMatrix ExactMatrix::from_rows(const std::vector<std::vector<GaussRat>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
  ExactMatrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw std::invalid_argument("ExactMatrix: ragged rows");
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

ExactMatrix ExactMatrix::operator*(const ExactMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("ExactMatrix: shape mismatch in product");
  ExactMatrix out(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const GaussRat& a = (*this)(i, k);
      if (a.is_zero()) continue;
      for (int j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
    }
  return out;
}

ExactMatrix ExactMatrix::operator+(const ExactMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("ExactMatrix: shape mismatch in sum");
  ExactMatrix out = *this;
  for (size_t i = 0; i < data_.size(); ++i) out.data_[i] += o.data_[i];
  return out;
}

ExactMatrix ExactMatrix::operator-(const ExactMatrix& o) const { return *this + o.scaled(GaussRat(-1)); }

ExactMatrix ExactMatrix::scaled(const GaussRat& s) const {
  ExactMatrix out = *this;
  for (auto& v : out.data_) v *= s;
  return out;
}

ExactMatrix ExactMatrix::adjoint() const {
  ExactMatrix out(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j).conj();
  return out;
}

bool ExactMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if ((*this)(i, j) != GaussRat(i == j ? 1 : 0)) return false;
  return true;
}

bool ExactMatrix::is_zero() const {
  for (const auto& v : data_)
    if (!v.is_zero()) return false;
  return true;
}

std::vector<int> row_reduce(ExactMatrix& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int sel = -1;
    for (int r = row; r < m.rows(); ++r)
      if (!m(r, col).is_zero()) {
        sel = r;
        break;
      }
    if (sel < 0) continue;
    if (sel != row)
      for (int c = 0; c < m.cols(); ++c) std::swap(m(sel, c), m(row, c));
    const GaussRat inv = GaussRat(1) / m(row, col);
    for (int c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (int r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col).is_zero()) continue;
      const GaussRat f = m(r, col);
      for (int c = col; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::optional<ExactMatrix> ExactMatrix::inverse() const {
  if (rows_ != cols_) return std::nullopt;
  const int n = rows_;
  ExactMatrix aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = (*this)(i, j);
    aug(i, n + i) = GaussRat(1);
  }
  auto piv = row_reduce(aug);
  if (static_cast<int>(piv.size()) < n || (n > 0 && piv[n - 1] >= n)) return std::nullopt;
  ExactMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

int ExactMatrix::rank() const {
  ExactMatrix copy = *this;
  return static_cast<int>(row_reduce(copy).size());
}

ExactMatrix ExactMatrix::nullspace() const {
  ExactMatrix rref = *this;
  const auto piv = row_reduce(rref);
  std::vector<bool> is_pivot(cols_, false);
  for (int p : piv) is_pivot[p] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < cols_; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  ExactMatrix basis(cols_, static_cast<int>(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k) {
    const int f = free_cols[k];
    basis(f, static_cast<int>(k)) = GaussRat(1);
    for (size_t r = 0; r < piv.size(); ++r) basis(piv[r], static_cast<int>(k)) = -rref(static_cast<int>(r), f);
  }
  return basis;
}

std::string ExactMatrix::str() const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < rows_; ++i) {
    if (i) os << "; ";
    for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j).str();
  }
  os << ']';
  return os.str();
}

}  // namespace orbi
