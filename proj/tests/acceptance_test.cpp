// End-to-end release gate. Each test prints exactly one summary line so the
// suite output doubles as a sign-off checklist.
#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ness/lindblad.hpp"
#include "ness/mpa.hpp"
#include "ness/spin_space.hpp"
#include "ness/xxx.hpp"

namespace {

using ness::Mat;

constexpr double kPi = ness::XxxParams::pi();

void report(int id, bool pass, const std::string& detail) {
  std::printf("[criterion %d] %s %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  EXPECT_TRUE(pass) << "[criterion " << id << "] " << detail;
}

std::string sci(double v) {
  std::ostringstream s;
  s.setf(std::ios::scientific);
  s.precision(2);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TEST(Acceptance, OracleEquivalence) {
  const auto t0 = std::chrono::steady_clock::now();
  double maxdev = 0.0;
  int points = 0;
  for (int N : {2, 3, 4, 5})
    for (double gamma : {0.5, 1.0, 2.0})
      for (double theta : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
        ness::XxxParams p{N, gamma, theta};
        const Mat rho = ness::steady_state(ness::xxx_lab_spec(p)).rho;
        ++points;

        const auto prof = ness::magnetization_profile(p);
        for (int k = 1; k <= N; ++k)
          for (int a = 1; a <= 3; ++a) {
            Mat t = rho;
            ness::site_mult_left(t, ness::pauli(a), k, 2, N);
            maxdev = std::max(maxdev, std::abs(prof[k - 1][a - 1] - t.trace().real()));
          }

        for (int k = 1; k < N; ++k)
          for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b) {
              const ness::cx mpa = ness::lab_correlation(p, {{k, a}, {k + 1, b}});
              Mat t = rho;
              ness::site_mult_left(t, ness::pauli(b), k + 1, 2, N);
              ness::site_mult_left(t, ness::pauli(a), k, 2, N);
              maxdev = std::max(maxdev, std::abs(mpa - t.trace()));
            }

        const auto j = ness::currents(p);
        const double jm[3] = {j.jx, j.jy, j.jz};
        for (int a = 1; a <= 3; ++a)
          for (int k = 1; k < N; ++k)
            maxdev = std::max(maxdev, std::abs(jm[a - 1] - ness::local_current(rho, k, a, N)));
      }
  const double secs = seconds_since(t0);
  report(1, maxdev <= 1e-8 && secs < 300.0,
         "ansatz vs exact steady state over " + std::to_string(points) +
             " parameter points (one-point, adjacent two-point, currents): max dev " +
             sci(maxdev) + " <= 1e-8 in " + sci(secs) + " s");
}

TEST(Acceptance, IdentitySuite) {
  ness::XxxParams p4{4, 1.0, kPi / 2};
  const auto ldc = ness::check_ldc(ness::xxx_rep(p4), ness::xxx_h());

  double lbmc = 0.0;
  for (int N : {2, 3, 4}) {
    ness::XxxParams q{N, 1.0, kPi / 2};
    const auto [DL, DR] = ness::xxx_mpa_lindblads(q.gamma, q.theta);
    const auto r =
        ness::check_lbmc(ness::xxx_rep(q), Mat::Zero(2, 2), Mat::Zero(2, 2), DL, DR, N);
    lbmc = std::max({lbmc, r.left, r.right});
  }

  const auto cubic = ness::check_cubic(1.0, 12);

  ness::XxxParams q3{3, 1.0, kPi / 2};
  const auto spec = ness::xxx_lab_spec(q3);
  const Mat rho = ness::steady_state(spec).rho;
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> g;
  const std::vector<ness::cx> shifts{{g(rng), g(rng)}, {g(rng), g(rng)}};
  const double gauge = ness::gauge_shift_check(spec, shifts, rho);

  double gl2 = 0.0;
  for (double gamma : {0.5, 1.0, 2.0})
    gl2 = std::max(gl2,
                   ness::check_gl2_commutators(ness::gl2_rep(ness::ci / gamma, 8)).interior);

  const bool pass = ldc.interior <= 1e-12 && lbmc <= 1e-10 && cubic.interior <= 1e-12 &&
                    gauge <= 1e-12 && gl2 <= 1e-13;
  report(2, pass,
         "algebraic identities: bulk divergence " + sci(ldc.interior) +
             " <= 1e-12, boundary matching " + sci(lbmc) + " <= 1e-10 (N=2..4), cubic " +
             sci(cubic.interior) + " <= 1e-12 (M=12), gauge shift " + sci(gauge) +
             " <= 1e-12, ladder commutators " + sci(gl2) + " <= 1e-13");
}

TEST(Acceptance, InPlaneCurrentRatio) {
  double maxdev = 0.0;
  for (int N : {2, 3, 5, 50})
    for (double gamma : {0.5, 1.0, 2.0})
      for (double theta : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
        ness::XxxParams p{N, gamma, theta};
        const auto j = ness::currents(p);
        maxdev = std::max(maxdev, std::abs(j.jy / j.jx + 1.0 / std::tan(theta / 2)));
      }
  report(3, maxdev <= 1e-12,
         "jy/jx = -cot(theta/2) across N in {2,3,5,50} x Gamma x theta grid: max dev " +
             sci(maxdev) + " <= 1e-12");
}

TEST(Acceptance, PartitionRatioTrend) {
  const auto t0 = std::chrono::steady_clock::now();
  const double theta = kPi / 2;
  const double target = theta * theta / 4.0;
  const auto pts = ness::z_ratio_scan(1.0, theta, 100);
  std::map<int, double> ratio;
  for (const auto& pt : pts) ratio[pt.N] = pt.ratio;
  const double d10 = std::abs(ratio.at(10) - target);
  const double d20 = std::abs(ratio.at(20) - target);
  const double d40 = std::abs(ratio.at(40) - target);
  const double d80 = std::abs(ratio.at(80) - target);
  const double r100 = ratio.at(100);
  const double secs = seconds_since(t0);
  const bool decreasing = d20 < d10 && d40 < d20 && d80 < d40;
  const bool close = std::abs(r100 - target) <= 0.10 * target;
  report(4, decreasing && close && secs < 120.0,
         "N^2 Z_{N-1}/Z_N trend toward theta^2/4 = " + sci(target) +
             ": |r_N - target| strictly decreasing over N in {10,20,40,80}, r_100 = " +
             sci(r100) + " within 10% in " + sci(secs) + " s");
}

TEST(Acceptance, HelixProfileConvergence) {
  auto profile_devs = [](int N) {
    ness::XxxParams p{N, 1.0, kPi / 2};
    const auto prof = ness::magnetization_profile(p);
    std::array<double, 3> d{0.0, 0.0, 0.0};
    for (int k = 1; k <= N; ++k) {
      const auto h = ness::helix_reference(double(k) / N, p.theta);
      d[0] = std::max(d[0], std::abs(prof[k - 1][0] - h[0]));
      d[1] = std::max(d[1], std::abs(prof[k - 1][1] - h[1]));
      d[2] = std::max(d[2], std::abs(prof[k - 1][2]));
    }
    return d;
  };
  const auto d50 = profile_devs(50);
  const auto d100 = profile_devs(100);
  const bool pass = d100[0] < d50[0] && d100[1] < d50[1] && d100[2] < d50[2];
  report(5, pass,
         "magnetization approaches the spin helix: max helix deviation (mx, my, mz) shrinks "
         "from (" +
             sci(d50[0]) + ", " + sci(d50[1]) + ", " + sci(d50[2]) + ") at N=50 to (" +
             sci(d100[0]) + ", " + sci(d100[1]) + ", " + sci(d100[2]) + ") at N=100");
}

TEST(Acceptance, TruncationExactness) {
  double maxrel = 0.0;
  auto rel = [](double x, double y) {
    return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-14});
  };
  for (int N : {5, 20, 50}) {
    ness::XxxParams a{N, 1.3, 2.1, N + 1};
    ness::XxxParams b{N, 1.3, 2.1, N + 5};
    const auto ja = ness::currents(a);
    const auto jb = ness::currents(b);
    maxrel = std::max({maxrel, rel(ja.jx, jb.jx), rel(ja.jy, jb.jy), rel(ja.jz, jb.jz)});
    const auto pa = ness::magnetization_profile(a);
    const auto pb = ness::magnetization_profile(b);
    for (int k = 0; k < N; ++k)
      for (int c = 0; c < 3; ++c) maxrel = std::max(maxrel, rel(pa[k][c], pb[k][c]));
  }
  report(6, maxrel <= 1e-12,
         "truncation at M=N+1 is exact: currents and profiles match M=N+5 to relative " +
             sci(maxrel) + " <= 1e-12 for N in {5,20,50}");
}

TEST(Acceptance, StrongCouplingTrend) {
  const auto pts = ness::zeno_scan(kPi / 2, 4, {1e2, 1e3, 1e4});
  const double drift = std::abs(pts[2].scaled_z - pts[1].scaled_z) / std::abs(pts[1].scaled_z);
  const bool monotone = std::abs(pts[1].jx) < std::abs(pts[0].jx) &&
                        std::abs(pts[2].jx) < std::abs(pts[1].jx) &&
                        std::abs(pts[1].jy) < std::abs(pts[0].jy) &&
                        std::abs(pts[2].jy) < std::abs(pts[1].jy);
  double ratio_dev = 0.0;
  for (const auto& pt : pts)
    ratio_dev = std::max(ratio_dev, std::abs(pt.jy / pt.jx + 1.0 / std::tan(kPi / 4)));
  report(7, drift <= 0.01 && monotone && ratio_dev <= 1e-12,
         "strong-coupling limit at N=4: (Gamma^2/4) Z drifts " + sci(100 * drift) +
             " % (<= 1%) from Gamma=1e3 to 1e4, in-plane currents decrease monotonically, "
             "jy/jx stays -cot(theta/2) to " +
             sci(ratio_dev));
}

TEST(Acceptance, UntwistedProductState) {
  double maxres = 0.0;
  for (int N : {2, 3, 4}) {
    const Mat rho = ness::untwisted_product_state(N);
    ness::ChainSpec spec;
    spec.n = 2;
    spec.N = N;
    spec.h = ness::xxx_h();
    const auto [DL, DR] = ness::xxx_lab_lindblads(1.0, 0.0);
    spec.dissL = {DL};
    spec.dissR = {DR};
    maxres = std::max(maxres, ness::liouvillian_apply(spec, rho).cwiseAbs().maxCoeff());
  }
  report(8, maxres <= 1e-12,
         "aligned-boundary product state is exactly stationary: max |L(rho)| = " + sci(maxres) +
             " <= 1e-12 for N in {2,3,4}");
}

TEST(Acceptance, RecursionAudit) {
  const auto a = ness::check_recursion(1.0, kPi / 2, 3, 8);
  const auto b = ness::check_recursion(0.5, kPi / 4, 3, 6);
  const auto c = ness::check_recursion(2.0, 3 * kPi / 4, 3, 6);
  const bool one_holds =
      a.printed_holds || a.sign_variant_holds || a.cubic_consequence_holds;
  auto flags = [](const ness::RecursionAudit& r) {
    return std::array<bool, 3>{r.printed_holds, r.sign_variant_holds,
                               r.cubic_consequence_holds};
  };
  const bool stable = flags(a) == flags(b) && flags(b) == flags(c);
  report(9, one_holds && stable,
         "one-point recursion audit: " + a.verdict + "; verdict stable across (Gamma, theta)");
}

}  // namespace
