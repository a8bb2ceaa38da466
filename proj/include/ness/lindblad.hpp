#pragma once

#include "ness/spin_space.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <random>
#include <stdexcept>
#include <vector>

namespace ness {

/// Thrown when a solver cannot produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/**
 * Boundary-driven chain: nearest-neighbour bulk density h, boundary fields
 * bL/bR and Lindblad operators attached to the first and last site.
 */
struct ChainSpec {
  int n = 2;
  int N = 2;
  Mat h;                   // n^2 x n^2, hermitian
  Mat bL, bR;              // n x n, hermitian (zero allowed)
  std::vector<Mat> dissL;  // Lindblad operators on site 1
  std::vector<Mat> dissR;  // Lindblad operators on site N

  long dim() const { return ipow(n, N); }

  void validate(double tol = 1e-12) const {
    if (n < 2 || N < 1) throw std::invalid_argument("ChainSpec: need n >= 2, N >= 1");
    if (h.rows() != n * n || h.cols() != n * n)
      throw std::invalid_argument("ChainSpec: h must be n^2 x n^2");
    if (!is_hermitian(h, tol)) throw std::invalid_argument("ChainSpec: h must be hermitian");
    for (const Mat* b : {&bL, &bR}) {
      if (b->size() == 0) continue;
      if (b->rows() != n || b->cols() != n)
        throw std::invalid_argument("ChainSpec: boundary field must be n x n");
      if (!is_hermitian(*b, tol))
        throw std::invalid_argument("ChainSpec: boundary field must be hermitian");
    }
    for (const auto* ds : {&dissL, &dissR})
      for (const Mat& D : *ds)
        if (D.rows() != n || D.cols() != n)
          throw std::invalid_argument("ChainSpec: Lindblad operator must be n x n");
  }
};

/// H = sum_k h_{k,k+1} + bL_1 + bR_N. For N = 1 the bulk sum is empty.
inline ChainOp hamiltonian(const ChainSpec& spec) {
  spec.validate();
  ChainOp H(spec.n, spec.N);
  for (int k = 1; k + 1 <= spec.N; ++k) H += two_site(spec.h, k, spec.n, spec.N);
  if (spec.bL.size() > 0) H += embed(spec.bL, 1, spec.n, spec.N);
  if (spec.bR.size() > 0) H += embed(spec.bR, spec.N, spec.n, spec.N);
  return H;
}

/// D rho D^+ - 1/2 {rho, D^+ D} for a single-site Lindblad operator at `site`.
inline Mat dissipator_apply(const Mat& D, int site, const Mat& rho, int n, int N) {
  Mat t1 = rho;
  site_mult_left(t1, D, site, n, N);
  site_mult_right(t1, D.adjoint(), site, n, N);
  const Mat DdD = D.adjoint() * D;
  Mat t2 = rho;
  site_mult_left(t2, DdD, site, n, N);
  Mat t3 = rho;
  site_mult_right(t3, DdD, site, n, N);
  return t1 - 0.5 * (t2 + t3);
}

/// L(rho) = -i[H, rho] + sum of boundary dissipators, evaluated matrix-free.
inline Mat liouvillian_apply(const ChainSpec& spec, const Mat& rho) {
  const ChainOp H = hamiltonian(spec);
  Mat out = -ci * (H.apply_left(rho) - H.apply_right(rho));
  for (const Mat& D : spec.dissL) out += dissipator_apply(D, 1, rho, spec.n, spec.N);
  for (const Mat& D : spec.dissR) out += dissipator_apply(D, spec.N, rho, spec.n, spec.N);
  return out;
}

/// Heisenberg picture generator: L^+(F) = i[H, F] + sum_j (D_j^+ F D_j - 1/2 {F, D_j^+ D_j}).
inline Mat adjoint_apply(const ChainSpec& spec, const Mat& F) {
  const ChainOp H = hamiltonian(spec);
  Mat out = ci * (H.apply_left(F) - H.apply_right(F));
  auto add = [&](const Mat& D, int site) {
    Mat t1 = F;
    site_mult_left(t1, D.adjoint(), site, spec.n, spec.N);
    site_mult_right(t1, D, site, spec.n, spec.N);
    const Mat DdD = D.adjoint() * D;
    Mat t2 = F;
    site_mult_left(t2, DdD, site, spec.n, spec.N);
    Mat t3 = F;
    site_mult_right(t3, DdD, site, spec.n, spec.N);
    out += t1 - 0.5 * (t2 + t3);
  };
  for (const Mat& D : spec.dissL) add(D, 1);
  for (const Mat& D : spec.dissR) add(D, spec.N);
  return out;
}

/// <j_k^alpha> = 2 sum_{bc} eps_{abc} <sigma^b_k sigma^c_{k+1}> on a qubit chain.
inline double local_current(const Mat& rho, int k, int alpha, int N) {
  if (alpha < 1 || alpha > 3) throw std::invalid_argument("local_current: alpha must be 1..3");
  if (k < 1 || k + 1 > N) throw std::invalid_argument("local_current: bond out of range");
  const int b = alpha % 3 + 1;       // (alpha, b, c) cyclic
  const int c = (alpha + 1) % 3 + 1;
  auto bond_exp = [&](int pb, int pc) {
    Mat t = rho;
    site_mult_left(t, pauli(pc), k + 1, 2, N);
    site_mult_left(t, pauli(pb), k, 2, N);
    return t.trace();
  };
  const cx val = 2.0 * (bond_exp(b, c) - bond_exp(c, b));
  return val.real();
}

/// Dense superoperator in row-major vectorization: vec(rho)_{a*d+b} = rho_{ab},
/// so A rho B maps to (A (x) B^T) vec(rho).
inline Mat superoperator(const ChainSpec& spec) {
  spec.validate();
  const long d = spec.dim();
  const Mat H = hamiltonian(spec).dense(d);
  const Mat I = Mat::Identity(d, d);
  Mat L = -ci * (kron(H, I) - kron(I, H.transpose()));
  auto add = [&](const Mat& Dloc, int site) {
    const Mat D = embed(Dloc, site, spec.n, spec.N).dense(d);
    const Mat DdD = D.adjoint() * D;
    L += kron(D, D.conjugate()) - 0.5 * (kron(DdD, I) + kron(I, DdD.transpose()));
  };
  for (const Mat& D : spec.dissL) add(D, 1);
  for (const Mat& D : spec.dissR) add(D, spec.N);
  return L;
}

struct SteadyStateOptions {
  double tol = 1e-10;          // max |L(rho)| accepted
  long max_dim = 64;           // guard on n^N
  long svd_confirm_dim = 1024; // largest superoperator dimension for SVD confirmation
  double pivot_ratio_tol = 1e-10;
  int fallback_iters = 64;
};

struct SteadyStateResult {
  Mat rho;
  double residual = 0.0;
  double pivot_ratio = 0.0;
  bool fallback_used = false;
};

namespace detail {

inline Mat unvec(const Vec& x, long d) {
  Mat rho(d, d);
  for (long a = 0; a < d; ++a)
    for (long b = 0; b < d; ++b) rho(a, b) = x(a * d + b);
  return rho;
}

inline Mat finish_state(const ChainSpec& spec, Mat rho) {
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return rho;
}

}  // namespace detail

/**
 * Stationary state of L. The trace row of the dense superoperator is replaced
 * by the trace functional and the resulting system solved by LU; trace
 * preservation makes the dropped row redundant, so the replaced system is
 * regular exactly when the kernel of L is one-dimensional. A collapsing pivot
 * therefore doubles as a cheap degeneracy alarm, confirmed by SVD where the
 * dimension permits.
 */
inline SteadyStateResult steady_state(const ChainSpec& spec, const SteadyStateOptions& opt = {}) {
  spec.validate();
  const long d = spec.dim();
  if (d > opt.max_dim)
    throw std::invalid_argument("steady_state: n^N exceeds the configured cap");

  const Mat L = superoperator(spec);
  const long m = d * d;
  Mat Lt = L;
  Lt.row(0).setZero();
  for (long a = 0; a < d; ++a) Lt(0, a * d + a) = 1.0;  // trace functional

  Eigen::PartialPivLU<Mat> lu(Lt);
  const Vec du = lu.matrixLU().diagonal();
  const double dmax = du.cwiseAbs().maxCoeff();
  const double dmin = du.cwiseAbs().minCoeff();
  const double pivot_ratio = (dmax > 0) ? dmin / dmax : 0.0;

  if (pivot_ratio < opt.pivot_ratio_tol) {
    if (m <= opt.svd_confirm_dim) {
      Eigen::BDCSVD<Mat> svd(L);
      const auto& sv = svd.singularValues();
      if (sv(m - 2) < 1e-8 * sv(0))
        throw NumericalError("steady_state: Liouvillian kernel is degenerate");
      // narrowly scaled pivot but unique kernel: fall through and let the
      // residual check decide
    } else {
      throw NumericalError("steady_state: suspected degenerate kernel (pivot collapse), "
                           "dimension too large for SVD confirmation");
    }
  }

  Vec rhs = Vec::Zero(m);
  rhs(0) = 1.0;
  Mat rho = detail::finish_state(spec, detail::unvec(lu.solve(rhs), d));
  SteadyStateResult res;
  res.pivot_ratio = pivot_ratio;
  res.residual = liouvillian_apply(spec, rho).cwiseAbs().maxCoeff();
  res.rho = rho;
  if (res.residual <= opt.tol) return res;

  // shift-inverted power iteration on L as a fallback
  res.fallback_used = true;
  const double shift = 1e-13 * L.cwiseAbs().maxCoeff();
  Eigen::PartialPivLU<Mat> lu2(L - shift * Mat::Identity(m, m));
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss;
  Vec x(m);
  for (long i = 0; i < m; ++i) x(i) = cx(gauss(rng), gauss(rng));
  for (int it = 0; it < opt.fallback_iters; ++it) {
    x = lu2.solve(x);
    x /= x.norm();
  }
  rho = detail::finish_state(spec, detail::unvec(x, d));
  const double r2 = liouvillian_apply(spec, rho).cwiseAbs().maxCoeff();
  if (r2 < res.residual) {
    res.rho = rho;
    res.residual = r2;
  }
  if (res.residual > opt.tol)
    throw NumericalError("steady_state: solver residual " + std::to_string(res.residual) +
                         " above tolerance");
  return res;
}

/**
 * Residual of the gauge-shift identity: shifting D_j -> D_j - c_j while
 * absorbing G_j = (i/2)(c_j D_j^+ - conj(c_j) D_j) into the boundary field
 * leaves L(rho) unchanged. `shifts` lists one c per Lindblad operator,
 * dissL first.
 */
inline double gauge_shift_check(const ChainSpec& spec, const std::vector<cx>& shifts,
                                const Mat& rho) {
  if (shifts.size() != spec.dissL.size() + spec.dissR.size())
    throw std::invalid_argument("gauge_shift_check: need one shift per Lindblad operator");
  ChainSpec shifted = spec;
  const Mat id = Mat::Identity(spec.n, spec.n);
  if (shifted.bL.size() == 0) shifted.bL = Mat::Zero(spec.n, spec.n);
  if (shifted.bR.size() == 0) shifted.bR = Mat::Zero(spec.n, spec.n);
  std::size_t si = 0;
  for (Mat& D : shifted.dissL) {
    const cx c = shifts[si++];
    shifted.bL -= 0.5 * ci * (c * D.adjoint() - std::conj(c) * D);
    D -= c * id;
  }
  for (Mat& D : shifted.dissR) {
    const cx c = shifts[si++];
    shifted.bR -= 0.5 * ci * (c * D.adjoint() - std::conj(c) * D);
    D -= c * id;
  }
  const Mat a = liouvillian_apply(spec, rho);
  const Mat b = liouvillian_apply(shifted, rho);
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace ness
