#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ness {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

constexpr cx ci{0.0, 1.0};

inline long ipow(int n, int k) {
  long r = 1;
  for (int i = 0; i < k; ++i) r *= n;
  return r;
}

inline bool is_hermitian(const Mat& A, double tol = 1e-12) {
  return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Pauli matrices, sigma^0 = identity.
inline Mat pauli(int a) {
  Mat s(2, 2);
  switch (a) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -ci, ci, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli: index must be 0..3");
  }
  return s;
}

/// Matrix unit E^{ab} in dimension n: a single 1 at row a, column b.
inline Mat basis_unit(int a, int b, int n = 2) {
  if (a < 0 || b < 0 || a >= n || b >= n)
    throw std::invalid_argument("basis_unit: index out of range");
  Mat e = Mat::Zero(n, n);
  e(a, b) = 1.0;
  return e;
}

/// Structure constants of the Pauli product sigma^a sigma^b = sum_c zeta_{abc} sigma^c.
/// zeta is delta on the remaining pair when any index is 0, and i*epsilon on {1,2,3}.
inline cx zeta(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0 || a > 3 || b > 3 || c > 3)
    throw std::invalid_argument("zeta: index must be 0..3");
  if (a == 0) return (b == c) ? 1.0 : 0.0;
  if (b == 0) return (a == c) ? 1.0 : 0.0;
  if (c == 0) return (a == b) ? 1.0 : 0.0;
  int e = (b - a + 3) % 3;
  if (e == 1 && c != a && c != b) return cx(0.0, 1.0);   // cyclic (a,b,c)
  if (e == 2 && c != a && c != b) return cx(0.0, -1.0);  // anti-cyclic
  return 0.0;
}

/// Single-site rotation with u sigma^a u^dagger = sigma^{a+1} (indices cyclic on {1,2,3}).
inline Mat rotation_u() {
  Mat u(2, 2);
  u << 1, -ci, 1, ci;
  return u / std::sqrt(2.0);
}

inline Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (long i = 0; i < A.rows(); ++i)
    for (long j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

/// In-place X <- (q at site k) * X for a chain of N n-level sites.
/// Site 1 is the leftmost (most significant) tensor factor.
inline void site_mult_left(Mat& X, const Mat& q, int site, int n, int N) {
  const long stride = ipow(n, N - site);
  const long block = stride * n;
  const long outer = X.rows() / block;
  std::vector<cx> tmp(n);
  for (long col = 0; col < X.cols(); ++col)
    for (long hi = 0; hi < outer; ++hi)
      for (long lo = 0; lo < stride; ++lo) {
        const long base = hi * block + lo;
        for (int a = 0; a < n; ++a) tmp[a] = X(base + a * stride, col);
        for (int a = 0; a < n; ++a) {
          cx acc = 0.0;
          for (int b = 0; b < n; ++b) acc += q(a, b) * tmp[b];
          X(base + a * stride, col) = acc;
        }
      }
}

/// In-place X <- X * (q at site k).
inline void site_mult_right(Mat& X, const Mat& q, int site, int n, int N) {
  const long stride = ipow(n, N - site);
  const long block = stride * n;
  const long outer = X.cols() / block;
  std::vector<cx> tmp(n);
  for (long row = 0; row < X.rows(); ++row)
    for (long hi = 0; hi < outer; ++hi)
      for (long lo = 0; lo < stride; ++lo) {
        const long base = hi * block + lo;
        for (int a = 0; a < n; ++a) tmp[a] = X(row, base + a * stride);
        for (int b = 0; b < n; ++b) {
          cx acc = 0.0;
          for (int a = 0; a < n; ++a) acc += tmp[a] * q(a, b);
          X(row, base + b * stride) = acc;
        }
      }
}

struct SiteFactor {
  int site;  // 1-based
  Mat op;    // n x n
};

struct ChainTerm {
  cx coeff{1.0};
  std::vector<SiteFactor> factors;  // strictly ascending sites
};

/**
 * Lazy sum of site-embedded operator products on an N-site chain of n-level
 * systems. Terms are kept factored; dense materialization is guarded so that
 * large chains stay matrix-free.
 */
class ChainOp {
 public:
  ChainOp(int n, int N) : n_(n), N_(N) {
    if (n < 2 || N < 1) throw std::invalid_argument("ChainOp: need n >= 2, N >= 1");
  }

  int n() const { return n_; }
  int sites() const { return N_; }
  long dim() const { return ipow(n_, N_); }
  const std::vector<ChainTerm>& terms() const { return terms_; }

  void add_term(ChainTerm t) {
    int prev = 0;
    for (const auto& f : t.factors) {
      if (f.site <= prev || f.site > N_)
        throw std::invalid_argument("ChainOp: factor sites must be strictly ascending, within chain");
      if (f.op.rows() != n_ || f.op.cols() != n_)
        throw std::invalid_argument("ChainOp: factor dimension mismatch");
      prev = f.site;
    }
    terms_.push_back(std::move(t));
  }

  ChainOp& operator+=(const ChainOp& other) {
    if (other.n_ != n_ || other.N_ != N_)
      throw std::invalid_argument("ChainOp: shape mismatch in +=");
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
  }

  /// A * X with X given in the full n^N-dimensional space.
  Mat apply_left(const Mat& X) const {
    check_shape(X.rows());
    Mat out = Mat::Zero(X.rows(), X.cols());
    Mat work;
    for (const auto& t : terms_) {
      work = X;
      for (const auto& f : t.factors) site_mult_left(work, f.op, f.site, n_, N_);
      out += t.coeff * work;
    }
    return out;
  }

  /// X * A.
  Mat apply_right(const Mat& X) const {
    check_shape(X.cols());
    Mat out = Mat::Zero(X.rows(), X.cols());
    Mat work;
    for (const auto& t : terms_) {
      work = X;
      for (const auto& f : t.factors) site_mult_right(work, f.op, f.site, n_, N_);
      out += t.coeff * work;
    }
    return out;
  }

  ChainOp adjoint() const {
    ChainOp out(n_, N_);
    for (const auto& t : terms_) {
      ChainTerm a;
      a.coeff = std::conj(t.coeff);
      for (const auto& f : t.factors) a.factors.push_back({f.site, f.op.adjoint()});
      out.terms_.push_back(std::move(a));
    }
    return out;
  }

  Mat dense(long guard = 4096) const {
    const long d = dim();
    if (d > guard)
      throw std::invalid_argument("ChainOp::dense: dimension " + std::to_string(d) +
                                  " exceeds guard " + std::to_string(guard));
    Mat out = Mat::Zero(d, d);
    for (const auto& t : terms_) {
      Mat acc = Mat::Identity(1, 1);
      std::size_t fi = 0;
      for (int site = 1; site <= N_; ++site) {
        if (fi < t.factors.size() && t.factors[fi].site == site)
          acc = kron(acc, t.factors[fi++].op);
        else
          acc = kron(acc, Mat::Identity(n_, n_));
      }
      out += t.coeff * acc;
    }
    return out;
  }

 private:
  void check_shape(long rows) const {
    if (rows != dim()) throw std::invalid_argument("ChainOp: operand dimension mismatch");
  }

  int n_, N_;
  std::vector<ChainTerm> terms_;
};

/// Single-site operator q placed at `site`.
inline ChainOp embed(const Mat& q, int site, int n, int N) {
  ChainOp op(n, N);
  ChainTerm t;
  t.factors.push_back({site, q});
  op.add_term(std::move(t));
  return op;
}

/// Two-site operator h (acting on C^n (x) C^n) placed on the bond (site, site+1),
/// decomposed into matrix-unit products.
inline ChainOp two_site(const Mat& h, int site, int n, int N) {
  if (h.rows() != n * n || h.cols() != n * n)
    throw std::invalid_argument("two_site: h must be n^2 x n^2");
  if (site < 1 || site + 1 > N) throw std::invalid_argument("two_site: bond out of range");
  ChainOp op(n, N);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const cx w = h(a * n + c, b * n + d);
          if (w == cx(0.0)) continue;
          ChainTerm t;
          t.coeff = w;
          t.factors.push_back({site, basis_unit(a, b, n)});
          t.factors.push_back({site + 1, basis_unit(c, d, n)});
          op.add_term(std::move(t));
        }
  return op;
}

/// X -> (u (x) ... (x) u) X (u (x) ... (x) u)^dagger on an N-site qubit chain.
inline Mat conjugate_frame(const Mat& X, const Mat& u, int N) {
  if (u.rows() != 2 || u.cols() != 2)
    throw std::invalid_argument("conjugate_frame: u must be 2x2");
  Mat out = X;
  const Mat ud = u.adjoint();
  for (int k = 1; k <= N; ++k) {
    site_mult_left(out, u, k, 2, N);
    site_mult_right(out, ud, k, 2, N);
  }
  return out;
}

}  // namespace ness
