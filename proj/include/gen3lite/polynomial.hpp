#pragma once

// Dense univariate polynomials: evaluation, construction by interpolation and
// root extraction through balanced companion-matrix eigenvalues.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace gen3lite {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Real polynomial sum_k coeffs[k] x^k (ascending order). The nominal degree
/// is coeffs.size() - 1 even when the top coefficients vanish.
template <typename Scalar>
class DensePolynomial {
 public:
  DensePolynomial() : coeffs_(VectorX<Scalar>::Zero(1)) {}
  explicit DensePolynomial(VectorX<Scalar> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() == 0) throw std::invalid_argument("DensePolynomial: empty coefficient list");
  }
  DensePolynomial(std::initializer_list<Scalar> coeffs)
      : DensePolynomial(Eigen::Map<const VectorX<Scalar>>(coeffs.begin(),
                                                          static_cast<Eigen::Index>(coeffs.size()))) {}

  [[nodiscard]] int nominal_degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] const VectorX<Scalar>& coeffs() const { return coeffs_; }
  [[nodiscard]] Scalar operator[](int k) const { return coeffs_[k]; }

  template <typename T>
  [[nodiscard]] T operator()(const T& x) const {
    T acc = T(coeffs_[coeffs_.size() - 1]);
    for (Eigen::Index k = coeffs_.size() - 2; k >= 0; --k) acc = acc * x + T(coeffs_[k]);
    return acc;
  }

  [[nodiscard]] Scalar max_abs_coeff() const { return coeffs_.cwiseAbs().maxCoeff(); }

 private:
  VectorX<Scalar> coeffs_;
};

/// First-kind Chebyshev points cos((2k+1) pi / 2n), k = 0..n-1, mapped to [lo, hi].
template <typename Scalar>
std::vector<Scalar> chebyshev_nodes(int count, Scalar lo, Scalar hi) {
  using std::cos;
  std::vector<Scalar> nodes(static_cast<std::size_t>(count));
  const Scalar mid = (hi + lo) / 2, half = (hi - lo) / 2;
  for (int k = 0; k < count; ++k)
    nodes[static_cast<std::size_t>(k)] =
        mid + half * cos(Scalar(2 * k + 1) * std::numbers::pi_v<Scalar> / Scalar(2 * count));
  return nodes;
}

/// Polynomial of the given degree through (nodes[i], values[i]).
///
/// Nodes are mapped affinely onto [-1, 1] before the Vandermonde solve, and the
/// result is expanded back into the monomial basis of the original variable.
/// Double input is solved and expanded in long double.
template <typename Scalar>
DensePolynomial<Scalar> interpolate(std::span<const Scalar> nodes, std::span<const Scalar> values,
                                    int degree) {
  using std::abs;
  using Work = std::conditional_t<std::is_same_v<Scalar, double>, long double, Scalar>;
  const auto n = static_cast<Eigen::Index>(nodes.size());
  if (degree < 0 || n != degree + 1 || values.size() != nodes.size())
    throw std::invalid_argument("interpolate: need exactly degree+1 nodes and values");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (abs(nodes[i] - nodes[j]) <= Scalar(1e-12))
        throw std::invalid_argument("interpolate: duplicate interpolation nodes");

  const auto [lo_it, hi_it] = std::minmax_element(nodes.begin(), nodes.end());
  const Work center = (Work(*lo_it) + Work(*hi_it)) / 2;
  const Work half = n > 1 ? (Work(*hi_it) - Work(*lo_it)) / 2 : Work(1);

  Eigen::Matrix<Work, Eigen::Dynamic, Eigen::Dynamic> vander(n, n);
  VectorX<Work> rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Work u = (Work(nodes[i]) - center) / half;
    Work pw(1);
    for (Eigen::Index k = 0; k < n; ++k) {
      vander(i, k) = pw;
      pw *= u;
    }
    rhs[i] = Work(values[i]);
  }
  const VectorX<Work> scaled = vander.colPivHouseholderQr().solve(rhs);

  // Horner expansion of sum_k scaled[k] ((x - center) / half)^k.
  VectorX<Work> out = VectorX<Work>::Zero(n);
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    VectorX<Work> next = VectorX<Work>::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j > 0) next[j] += out[j - 1] / half;
      next[j] -= center * out[j] / half;
    }
    next[0] += scaled[k];
    out = next;
  }
  return DensePolynomial<Scalar>(VectorX<Scalar>(out.template cast<Scalar>()));
}

template <typename Scalar>
DensePolynomial<Scalar> interpolate(const std::vector<Scalar>& nodes,
                                    const std::vector<Scalar>& values, int degree) {
  return interpolate(std::span<const Scalar>(nodes), std::span<const Scalar>(values), degree);
}

namespace detail {

// Parlett-Reinsch diagonal similarity scaling by powers of two.
template <typename Scalar>
void balance(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  using std::abs;
  constexpr Scalar radix = 2;
  const Eigen::Index n = m.rows();
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar col = 0, row = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += abs(m(j, i));
        row += abs(m(i, j));
      }
      if (col == 0 || row == 0) continue;
      Scalar g = row / radix, f = 1;
      const Scalar s = col + row;
      while (col < g) {
        f *= radix;
        col *= radix * radix;
      }
      g = row * radix;
      while (col > g) {
        f /= radix;
        col /= radix * radix;
      }
      if ((col + row) / f < Scalar(0.95) * s) {
        converged = false;
        m.row(i) /= f;
        m.col(i) *= f;
      }
    }
  }
}

}  // namespace detail

template <typename Scalar>
struct PolynomialRoots {
  std::vector<std::complex<Scalar>> roots;
  /// Number of leading coefficients dropped as negligible; each one stands for
  /// a root at infinity.
  int trimmed_degrees = 0;
};

/// All complex roots, after trimming leading coefficients below
/// leading_tol * max|c|.
template <typename Scalar>
PolynomialRoots<Scalar> polynomial_roots(const DensePolynomial<Scalar>& poly,
                                         Scalar leading_tol = Scalar(1e-10)) {
  using std::abs;
  const VectorX<Scalar>& c = poly.coeffs();
  const Scalar scale = poly.max_abs_coeff();
  if (scale == Scalar(0)) throw std::invalid_argument("polynomial_roots: zero polynomial");

  int top = poly.nominal_degree();
  while (top > 0 && abs(c[top]) < leading_tol * scale) --top;

  PolynomialRoots<Scalar> out;
  out.trimmed_degrees = poly.nominal_degree() - top;
  if (top == 0) return out;

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> companion =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(top, top);
  for (int i = 1; i < top; ++i) companion(i, i - 1) = Scalar(1);
  for (int i = 0; i < top; ++i) companion(i, top - 1) = -c[i] / c[top];
  detail::balance(companion);

  Eigen::EigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> solver(companion,
                                                                                   false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("polynomial_roots: eigenvalue iteration did not converge");
  const auto& ev = solver.eigenvalues();
  out.roots.assign(ev.data(), ev.data() + ev.size());
  return out;
}

template <typename Scalar>
struct RealRoots {
  std::vector<Scalar> roots;  // ascending, multiplicities repeated
  int trimmed_degrees = 0;
};

/// Real roots of `poly`: eigenvalues whose imaginary part is at most
/// real_tol * (1 + |real part|), sorted ascending.
template <typename Scalar>
RealRoots<Scalar> real_roots(const DensePolynomial<Scalar>& poly, Scalar real_tol = Scalar(1e-7),
                             Scalar leading_tol = Scalar(1e-10)) {
  using std::abs;
  const PolynomialRoots<Scalar> all = polynomial_roots(poly, leading_tol);
  RealRoots<Scalar> out;
  out.trimmed_degrees = all.trimmed_degrees;
  for (const auto& z : all.roots)
    if (abs(z.imag()) <= real_tol * (Scalar(1) + abs(z.real()))) out.roots.push_back(z.real());
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

}  // namespace gen3lite
