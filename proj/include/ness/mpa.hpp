#pragma once

#include "ness/lindblad.hpp"
#include "ness/spin_space.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ness {

/**
 * Representation data for the matrix product ansatz: bulk generators
 * Omega^{aa'}, auxiliary matrices Xi^{aa'} and the boundary vectors W (dual)
 * and V, all on an M-dimensional truncation of the auxiliary space.
 */
struct AuxRep {
  int n = 2;
  int M = 0;
  std::vector<Mat> omega;  // n*n matrices, index a*n + a'
  std::vector<Mat> xi;
  Vec W, V;

  const Mat& Om(int a, int ap) const { return omega[a * n + ap]; }
  const Mat& Xi(int a, int ap) const { return xi[a * n + ap]; }

  void validate() const {
    if (n < 2 || M < 1) throw std::invalid_argument("AuxRep: need n >= 2, M >= 1");
    if (omega.size() != static_cast<std::size_t>(n * n) || xi.size() != omega.size())
      throw std::invalid_argument("AuxRep: need n^2 omega and xi matrices");
    for (const auto* fam : {&omega, &xi})
      for (const Mat& A : *fam)
        if (A.rows() != M || A.cols() != M)
          throw std::invalid_argument("AuxRep: matrix dimension mismatch");
    if (W.size() != M || V.size() != M)
      throw std::invalid_argument("AuxRep: boundary vector dimension mismatch");
    for (const auto* fam : {&omega, &xi})
      for (const Mat& A : *fam)
        if (!A.allFinite()) throw std::invalid_argument("AuxRep: non-finite entries");
    if (!W.allFinite() || !V.allFinite())
      throw std::invalid_argument("AuxRep: non-finite boundary vector");
  }
};

/**
 * Operator on the doubled auxiliary space, kept as a factored sum
 * sum_i A_i (x) conj(B_i). Doubled vectors live on C^{M^2} and are stored as
 * M x M matrices X with X(m1, m2) the coefficient of |m1> (x) |m2>.
 */
struct DoubledOp {
  int M = 0;
  std::vector<std::pair<Mat, Mat>> factors;

  void add(Mat A, Mat B) {
    if (A.rows() != M || A.cols() != M || B.rows() != M || B.cols() != M)
      throw std::invalid_argument("DoubledOp: factor dimension mismatch");
    factors.emplace_back(std::move(A), std::move(B));
  }

  DoubledOp& operator+=(const DoubledOp& o) {
    if (o.M != M) throw std::invalid_argument("DoubledOp: shape mismatch");
    factors.insert(factors.end(), o.factors.begin(), o.factors.end());
    return *this;
  }

  DoubledOp scaled(cx s) const {
    DoubledOp out{M, {}};
    for (const auto& [A, B] : factors) out.factors.emplace_back(s * A, B);
    return out;
  }

  /// Op |x>:  Y = sum_i A_i X B_i^dagger.
  Mat apply_right(const Mat& X) const {
    Mat Y = Mat::Zero(M, M);
    for (const auto& [A, B] : factors) Y.noalias() += A * X * B.adjoint();
    return Y;
  }

  /// <x| Op:  Y = sum_i A_i^T X conj(B_i).
  Mat apply_left(const Mat& X) const {
    Mat Y = Mat::Zero(M, M);
    for (const auto& [A, B] : factors) Y.noalias() += A.transpose() * X * B.conjugate();
    return Y;
  }

  Mat dense() const {
    Mat D = Mat::Zero(M * M, M * M);
    for (const auto& [A, B] : factors) D += kron(A, B.conjugate());
    return D;
  }
};

/// Theta^{aa'} = sum_b Omega^{ab} (x) conj(Omega^{a'b}).
inline DoubledOp theta(const AuxRep& rep, int a, int ap) {
  if (a < 0 || ap < 0 || a >= rep.n || ap >= rep.n)
    throw std::invalid_argument("theta: physical index out of range");
  DoubledOp op{rep.M, {}};
  for (int b = 0; b < rep.n; ++b) op.add(rep.Om(a, b), rep.Om(ap, b));
  return op;
}

/// Theta_0 = sum_a Theta^{aa}.
inline DoubledOp theta0(const AuxRep& rep) {
  DoubledOp op{rep.M, {}};
  for (int a = 0; a < rep.n; ++a)
    for (int b = 0; b < rep.n; ++b) op.add(rep.Om(a, b), rep.Om(a, b));
  return op;
}

/// Insertion operator for a local observable O: <O_k> contracts with
/// sum_{cc'} O_{cc'} Theta^{c'c} (note the index transposition).
inline DoubledOp insertion_op(const AuxRep& rep, const Mat& O) {
  if (O.rows() != rep.n || O.cols() != rep.n)
    throw std::invalid_argument("insertion_op: observable must be n x n");
  DoubledOp op{rep.M, {}};
  for (int c = 0; c < rep.n; ++c)
    for (int cp = 0; cp < rep.n; ++cp) {
      if (O(c, cp) == cx(0.0)) continue;
      for (int b = 0; b < rep.n; ++b) op.add(O(c, cp) * rep.Om(cp, b), rep.Om(c, b));
    }
  return op;
}

/// W (x) conj(W) as an M x M coefficient matrix.
inline Mat doubled_w(const AuxRep& rep) { return rep.W * rep.W.adjoint().eval(); }

/// V (x) conj(V).
inline Mat doubled_v(const AuxRep& rep) { return rep.V * rep.V.adjoint().eval(); }

/// Bilinear pairing of a dual-side state with a ket-side state.
inline cx pair_states(const Mat& bra, const Mat& ket) {
  return (bra.array() * ket.array()).sum();
}

/// Doubled-space vector with an accumulated log magnitude. The mantissa is
/// kept at unit max-norm so arbitrarily long chains neither overflow nor
/// underflow.
struct ContractionState {
  Mat mat;
  double logscale = 0.0;

  void rescale() {
    const double s = mat.cwiseAbs().maxCoeff();
    if (!(s > 0.0) || !std::isfinite(s))
      throw NumericalError("ContractionState: contraction collapsed to zero or overflowed");
    mat /= s;
    logscale += std::log(s);
  }
};

/// Scalar carried as mantissa * exp(logscale).
struct LogScaled {
  cx mantissa{0.0};
  double logscale = 0.0;

  cx ratio(const LogScaled& den) const {
    return mantissa / den.mantissa * std::exp(logscale - den.logscale);
  }
  double log_abs() const { return std::log(std::abs(mantissa)) + logscale; }
  cx value() const { return mantissa * std::exp(logscale); }
};

/// Z_N = <<W,Wbar| Theta_0^N |V,Vbar>>, rescaled after every application.
inline LogScaled partition_function(const AuxRep& rep, int N) {
  rep.validate();
  if (N < 0) throw std::invalid_argument("partition_function: N must be >= 0");
  const DoubledOp T0 = theta0(rep);
  ContractionState st{doubled_w(rep), 0.0};
  for (int k = 0; k < N; ++k) {
    st.mat = T0.apply_left(st.mat);
    st.rescale();
  }
  return {pair_states(st.mat, doubled_v(rep)), st.logscale};
}

struct Insertion {
  int site;  // 1-based
  Mat op;    // n x n local observable
};

/// Normalized expectation <O_{k_1} ... O_{k_q}> for strictly ascending sites.
inline cx correlation(const AuxRep& rep, int N, const std::vector<Insertion>& ins) {
  rep.validate();
  int prev = 0;
  for (const auto& i : ins) {
    if (i.site <= prev || i.site > N)
      throw std::invalid_argument("correlation: insertion sites must be strictly ascending, within chain");
    prev = i.site;
  }
  const DoubledOp T0 = theta0(rep);
  ContractionState num{doubled_w(rep), 0.0};
  ContractionState den{doubled_w(rep), 0.0};
  std::size_t next = 0;
  for (int k = 1; k <= N; ++k) {
    if (next < ins.size() && ins[next].site == k)
      num.mat = insertion_op(rep, ins[next++].op).apply_left(num.mat);
    else
      num.mat = T0.apply_left(num.mat);
    num.rescale();
    den.mat = T0.apply_left(den.mat);
    den.rescale();
  }
  const LogScaled zn{pair_states(num.mat, doubled_v(rep)), num.logscale};
  const LogScaled zd{pair_states(den.mat, doubled_v(rep)), den.logscale};
  return zn.ratio(zd);
}

/// Dense n^N x n^N density matrix from the doubled contraction,
/// rho_{a,a'} proportional to <<W,Wbar| Theta^{a1 a1'} ... Theta^{aN aN'} |V,Vbar>>.
inline Mat density_matrix_from_mpa(const AuxRep& rep, int N, long guard = 64) {
  rep.validate();
  const long d = ipow(rep.n, N);
  if (d > guard)
    throw std::invalid_argument("density_matrix_from_mpa: n^N exceeds guard");
  std::vector<DoubledOp> th;
  th.reserve(rep.n * rep.n);
  for (int a = 0; a < rep.n; ++a)
    for (int ap = 0; ap < rep.n; ++ap) th.push_back(theta(rep, a, ap));
  const Mat v2 = doubled_v(rep);
  Mat rho(d, d);
  // depth-first over (row, column) digit pairs, sharing prefixes of the
  // W-side contraction
  std::function<void(const Mat&, int, long, long)> walk =
      [&](const Mat& state, int depth, long arow, long acol) {
        if (depth == N) {
          rho(arow, acol) = pair_states(state, v2);
          return;
        }
        for (int a = 0; a < rep.n; ++a)
          for (int ap = 0; ap < rep.n; ++ap)
            walk(th[a * rep.n + ap].apply_left(state), depth + 1,
                 arow * rep.n + a, acol * rep.n + ap);
      };
  walk(doubled_w(rep), 0, 0, 0);
  const cx tr = rho.trace();
  if (std::abs(tr) == 0.0) throw NumericalError("density_matrix_from_mpa: vanishing trace");
  return rho / tr;
}

struct IdentityResidual {
  double interior = 0.0;  // relative, on auxiliary levels where truncation is exact
  double boundary = 0.0;  // absolute, on the truncated top levels
};

namespace detail {

/// X (x)_p Y = sum E^{aa'} (x) E^{bb'} (x) X^{aa'} Y^{bb'} as a dense matrix
/// with n^2 x n^2 blocks of size M.
inline Mat otimes_p(const AuxRep& rep, const std::vector<Mat>& X, const std::vector<Mat>& Y) {
  const int n = rep.n, M = rep.M;
  Mat out = Mat::Zero(n * n * M, n * n * M);
  for (int a = 0; a < n; ++a)
    for (int ap = 0; ap < n; ++ap)
      for (int b = 0; b < n; ++b)
        for (int bp = 0; bp < n; ++bp)
          out.block((a * n + b) * M, (ap * n + bp) * M, M, M) =
              X[a * n + ap] * Y[b * n + bp];
  return out;
}

/// max |R| over interior / boundary parts of an operator made of n^2 x n^2
/// blocks of size M, where interior keeps `margin` top auxiliary levels out.
inline IdentityResidual split_blockwise(const Mat& R, int n2, int M, int margin,
                                        double denom) {
  IdentityResidual res;
  const int keep = M - margin;
  for (int br = 0; br < n2; ++br)
    for (int bc = 0; bc < n2; ++bc) {
      const Mat blk = R.block(br * M, bc * M, M, M);
      for (int r = 0; r < M; ++r)
        for (int c = 0; c < M; ++c) {
          const double v = std::abs(blk(r, c));
          if (r < keep && c < keep)
            res.interior = std::max(res.interior, v);
          else
            res.boundary = std::max(res.boundary, v);
        }
    }
  res.interior /= denom;
  return res;
}

inline double interior_max(const Mat& R, int n2, int M, int margin) {
  double m = 0.0;
  const int keep = M - margin;
  for (int br = 0; br < n2; ++br)
    for (int bc = 0; bc < n2; ++bc)
      for (int r = 0; r < keep; ++r)
        for (int c = 0; c < keep; ++c)
          m = std::max(m, std::abs(R(br * M + r, bc * M + c)));
  return m;
}

}  // namespace detail

/**
 * Local divergence condition [h_hat, Omega (x)_p Omega] = Xi (x)_p Omega -
 * Omega (x)_p Xi, evaluated as a dense identity on the physical-pair times
 * auxiliary space. Products of two generators corrupt the top truncated
 * level, so the interior residual excludes one level per side; the residual
 * there is relative to the largest constituent term.
 */
inline IdentityResidual check_ldc(const AuxRep& rep, const Mat& h) {
  rep.validate();
  const int n = rep.n, M = rep.M;
  if (h.rows() != n * n || h.cols() != n * n)
    throw std::invalid_argument("check_ldc: h must be n^2 x n^2");
  if (M < 3) throw std::invalid_argument("check_ldc: need M >= 3");
  const Mat hhat = kron(h, Mat::Identity(M, M));
  const Mat OO = detail::otimes_p(rep, rep.omega, rep.omega);
  const Mat XO = detail::otimes_p(rep, rep.xi, rep.omega);
  const Mat OX = detail::otimes_p(rep, rep.omega, rep.xi);
  const Mat comm = hhat * OO - OO * hhat;
  const Mat R = comm - (XO - OX);
  const double denom = std::max({detail::interior_max(comm, n * n, M, 1),
                                 detail::interior_max(XO - OX, n * n, M, 1),
                                 1e-300});
  return detail::split_blockwise(R, n * n, M, 1, denom);
}

/// Lambda^{aa'} = i sum_b (Omega^{ab} (x) conj(Xi^{a'b}) - Xi^{ab} (x) conj(Omega^{a'b})).
inline DoubledOp lambda_op(const AuxRep& rep, int a, int ap) {
  DoubledOp op{rep.M, {}};
  for (int b = 0; b < rep.n; ++b) {
    op.add(ci * rep.Om(a, b), rep.Xi(ap, b));
    op.add(-ci * rep.Xi(a, b), rep.Om(ap, b));
  }
  return op;
}

/// Gamma_B^{aa'} for a boundary field with matrix elements b_{aa'}.
inline DoubledOp gamma_b(const AuxRep& rep, const Mat& b, int a, int ap) {
  if (b.rows() != rep.n || b.cols() != rep.n)
    throw std::invalid_argument("gamma_b: field must be n x n");
  DoubledOp op{rep.M, {}};
  for (int be = 0; be < rep.n; ++be)
    for (int bp = 0; bp < rep.n; ++bp) {
      if (b(a, be) != cx(0.0)) op.add(-ci * b(a, be) * rep.Om(be, bp), rep.Om(ap, bp));
      if (b(ap, be) != cx(0.0))
        op.add(ci * std::conj(b(ap, be)) * rep.Om(a, bp), rep.Om(be, bp));
    }
  return op;
}

/// Delta_B^{aa'} for a boundary Lindblad operator with elements D_{aa'}.
inline DoubledOp delta_b(const AuxRep& rep, const Mat& D, int a, int ap) {
  if (D.rows() != rep.n || D.cols() != rep.n)
    throw std::invalid_argument("delta_b: Lindblad operator must be n x n");
  DoubledOp op{rep.M, {}};
  const int n = rep.n;
  for (int be = 0; be < n; ++be)
    for (int bp = 0; bp < n; ++bp)
      for (int ga = 0; ga < n; ++ga) {
        const cx c1 = D(a, be) * std::conj(D(ap, bp));
        if (c1 != cx(0.0)) op.add(c1 * rep.Om(be, ga), rep.Om(bp, ga));
        const cx c2 = -0.5 * D(be, ap) * std::conj(D(be, bp));
        if (c2 != cx(0.0)) op.add(c2 * rep.Om(a, ga), rep.Om(bp, ga));
        const cx c3 = -0.5 * D(bp, be) * std::conj(D(bp, a));
        if (c3 != cx(0.0)) op.add(c3 * rep.Om(be, ga), rep.Om(ap, ga));
      }
  return op;
}

struct LbmcOptions {
  std::uint64_t seed = 12345;
  int samples = 64;       // random linear combinations of the span
  long span_cap = 4096;   // largest enumerated span
};

struct LbmcResult {
  double left = 0.0;            // relative residual of the W-side condition
  double right = 0.0;           // relative residual of the V-side condition (interior)
  double right_boundary = 0.0;  // truncated top levels of the V-side condition
  std::uint64_t seed = 0;
  long span_size = 0;
};

/**
 * Lindblad boundary matching condition. The V-side operator
 * (Gamma_R + Delta_R - Lambda)^{aa'} must annihilate |V,Vbar>; the W-side
 * operator (Gamma_L + Delta_L + Lambda)^{aa'} must annihilate <<W,Wbar|
 * against span{Theta^{a2 a2'} ... Theta^{aN aN'} |V,Vbar>}, probed with
 * seeded random combinations plus the all-Theta_0 element. Residuals are
 * relative to the largest single contribution, and the V-side interior
 * excludes the top truncated level per factor.
 */
inline LbmcResult check_lbmc(const AuxRep& rep, const Mat& bL, const Mat& bR,
                             const Mat& DL, const Mat& DR, int N,
                             const LbmcOptions& opt = {}) {
  rep.validate();
  if (N < 2) throw std::invalid_argument("check_lbmc: need N >= 2");
  const int n = rep.n, M = rep.M;
  const Mat v2 = doubled_v(rep);
  const Mat w2 = doubled_w(rep);

  LbmcResult res;
  res.seed = opt.seed;

  // V side
  for (int a = 0; a < n; ++a)
    for (int ap = 0; ap < n; ++ap) {
      const Mat g = gamma_b(rep, bR, a, ap).apply_right(v2);
      const Mat dl = delta_b(rep, DR, a, ap).apply_right(v2);
      const Mat lm = lambda_op(rep, a, ap).apply_right(v2);
      const Mat r = g + dl - lm;
      const double denom = std::max({g.cwiseAbs().maxCoeff(), dl.cwiseAbs().maxCoeff(),
                                     lm.cwiseAbs().maxCoeff(), 1e-300});
      for (int m1 = 0; m1 < M; ++m1)
        for (int m2 = 0; m2 < M; ++m2) {
          const double v = std::abs(r(m1, m2)) / denom;
          if (m1 <= M - 2 && m2 <= M - 2)
            res.right = std::max(res.right, v);
          else
            res.right_boundary = std::max(res.right_boundary, v);
        }
    }

  // span of Theta-words applied to |V,Vbar>
  std::vector<DoubledOp> th;
  for (int a = 0; a < n; ++a)
    for (int ap = 0; ap < n; ++ap) th.push_back(theta(rep, a, ap));
  std::vector<Mat> span{v2};
  for (int depth = 1; depth < N; ++depth) {
    if (static_cast<long>(span.size()) * n * n > opt.span_cap)
      throw std::invalid_argument("check_lbmc: span too large, reduce N or raise span_cap");
    std::vector<Mat> next;
    next.reserve(span.size() * n * n);
    for (const Mat& y : span)
      for (const auto& t : th) next.push_back(t.apply_right(y));
    span.swap(next);
  }
  res.span_size = static_cast<long>(span.size());

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  std::vector<Mat> probes;
  probes.reserve(opt.samples + 1);
  for (int s = 0; s < opt.samples; ++s) {
    Mat y = Mat::Zero(M, M);
    for (const Mat& e : span) y += cx(gauss(rng), gauss(rng)) * e;
    probes.push_back(std::move(y));
  }
  {
    const DoubledOp T0 = theta0(rep);
    Mat y = v2;
    for (int k = 1; k < N; ++k) y = T0.apply_right(y);
    probes.push_back(std::move(y));
  }

  // W side
  for (int a = 0; a < n; ++a)
    for (int ap = 0; ap < n; ++ap) {
      const Mat g = gamma_b(rep, bL, a, ap).apply_left(w2);
      const Mat dl = delta_b(rep, DL, a, ap).apply_left(w2);
      const Mat lm = lambda_op(rep, a, ap).apply_left(w2);
      const Mat r = g + dl + lm;
      const double rnorm = r.norm();
      for (const Mat& y : probes) {
        const double num = std::abs(pair_states(r, y));
        const double denom =
            std::max({std::abs(pair_states(g, y)), std::abs(pair_states(dl, y)),
                      std::abs(pair_states(lm, y)), rnorm * y.norm() * 1e-16, 1e-300});
        res.left = std::max(res.left, num / denom);
      }
    }
  return res;
}

}  // namespace ness
