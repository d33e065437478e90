#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hoa/closedform.hpp"
#include "hoa/criteria.hpp"

using namespace hoa;

namespace {
struct Ref {
  double x;
  std::uint32_t k;
  std::uint32_t l;
  double value;
};

// tests/oracles/reference_values.py, 50-digit evaluation
const std::vector<Ref> kPacsClosed = {
    {0.5, 1, 1, -0.24440243194754999137},   {1.0, 1, 2, -5.5791179968118844867},
    {1.0, 5, 3, -2151.9869445009669461},    {2.0, 5, 4, -91599.247216394955824},
    {1.5, 15, 3, -49431.792672470500234},   {1.5, 15, 4, -1745286.084782264414},
    {3.0, 20, 4, -13893185.516573538216},
};
const std::vector<Ref> kNbsClosed = {
    {0.5, 0, 1, -3.0},    {0.25, 1, 2, -309.5},           {0.75, 5, 3, -3011.3333333333333333},
    {0.5, 10, 8, -605351996992.0}, {0.2, 10, 8, 611585653621768.69551}, {1.0, 3, 4, -1024.0},
};
const std::vector<Ref> kPacsOracle = {
    {1.0, 1, 1, -1.25}, {1.0, 5, 3, -1632.9904317837450848}, {2.0, 5, 2, -231.18403465677210106}};
const std::vector<Ref> kNbsOracle = {{0.5, 1, 1, 1.0}, {0.25, 5, 3, 196343.0}, {0.75, 0, 2, 0.18518518518518518519}};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

int sign_changes(std::uint32_t l, double lo, double hi, int n) {
  int changes = 0;
  double prev = d_gs_closed(lo, l);
  for (int i = 1; i <= n; ++i) {
    const double eta = lo + (hi - lo) * i / n;
    const double cur = d_gs_closed(eta, l);
    if ((cur < 0) != (prev < 0)) ++changes;
    prev = cur;
  }
  return changes;
}

double gs_root(std::uint32_t l) {
  double lo = 0.2;
  double hi = 0.999;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((d_gs_closed(mid, l) < 0) == (d_gs_closed(lo, l) < 0)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace

TEST(BsClosed, Examples) {
  EXPECT_NEAR(d_bs_closed(0.5, 10, 1), -2.5, 1e-12);
  EXPECT_EQ(d_bs_closed(0.0, 10, 2), 0.0);
  EXPECT_NEAR(d_bs_closed(1.0, 2, 1), -2.0, 1e-12);
  EXPECT_THROW((void)d_bs_closed(0.5, 3, 3), ConstraintError);
}

TEST(BsClosed, MatchesOracle) {
  for (double p = 0.1; p < 0.95; p += 0.1) {
    for (std::uint32_t M = 2; M <= 25; ++M) {
      const PND pnd = build_binomial(p, M);
      for (std::uint32_t l = 1; l < M; ++l) {
        const double o = d_criterion(pnd, l);
        EXPECT_LE(rel(d_bs_closed(p, M, l), o), 1e-10) << p << " " << M << " " << l;
      }
    }
  }
}

TEST(GbsClosed, Examples) {
  EXPECT_NEAR(d_gbs_closed(2, 0, 0, 1), -1.0 / 3.0, 1e-15);
  EXPECT_LT(d_gbs_closed(10, 2, 1, 8), 0.0);
  EXPECT_NEAR(d_gbs_closed(12, 0, 0, 1), d_criterion(build_gbs(12, 0, 0), 1), 1e-10);
  EXPECT_THROW((void)d_gbs_closed(3, 0, 0, 3), ConstraintError);
  EXPECT_THROW((void)d_gbs_closed(3, -1, 0, 1), DomainError);
}

TEST(GbsClosed, UniformCase) {
  // uniform on 0..N: <N(N-1)> = N(N-1)/3, <N> = N/2
  for (std::uint32_t N = 2; N <= 30; ++N) {
    const double ref = N * (N - 1.0) / 3.0 - 0.25 * N * N;
    EXPECT_NEAR(d_gbs_closed(N, 0, 0, 1), ref, 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST(GbsClosed, MatchesOracle) {
  for (std::uint32_t N = 2; N <= 25; ++N) {
    for (double a : {-0.5, 0.0, 1.0, 2.0, 10.0}) {
      for (double b : {-0.5, 0.0, 1.0, 5.0}) {
        const PND pnd = build_gbs(N, a, b);
        for (std::uint32_t l = 1; l < N; ++l) {
          const double o = d_criterion(pnd, l);
          const double c = d_gbs_closed(N, a, b, l);
          // exact zeros (e.g. the uniform state at N = 4, l = 1) fall back to the criterion zero tolerance
          if (std::abs(c - o) > default_zero_tol(mean_photon_number(pnd), l)) {
            EXPECT_LE(rel(c, o), 1e-9) << N << " " << a << " " << b << " " << l;
          }
        }
      }
    }
  }
}

TEST(RbsClosed, Examples) {
  EXPECT_NEAR(d_rbs_closed(2, 1), -2.0, 1e-12);
  EXPECT_EQ(d_rbs_closed(0, 1), 0.0);
  EXPECT_TRUE(std::isfinite(d_rbs_closed(10, 8)));
  EXPECT_TRUE(std::isfinite(d_rbs_closed(10, 9)));
}

TEST(RbsClosed, FiniteOnIntegerGrid) {
  for (std::uint32_t N = 0; N <= 30; ++N) {
    for (std::uint32_t l = 1; l <= 10; ++l) EXPECT_TRUE(std::isfinite(d_rbs_closed(N, l))) << N << " " << l;
  }
}

TEST(NbsClosed, ReferenceValues) {
  EXPECT_NEAR(d_nbs_closed(0.5, 0, 1), -3.0, 1e-12);
  EXPECT_NEAR(d_nbs_closed(1.0, 0, 1), -1.0, 1e-12);
  for (const auto& r : kNbsClosed) EXPECT_LE(rel(d_nbs_closed(r.x, r.k, r.l), r.value), 1e-12) << r.x << " " << r.k << " " << r.l;
  EXPECT_THROW((void)d_nbs_closed(0.0, 1, 1), DomainError);
}

TEST(NbsOracle, ReferenceValues) {
  for (const auto& r : kNbsOracle) {
    EXPECT_LE(rel(d_criterion(build_nbs(r.x, r.k, kOracleTailTol), r.l), r.value), 1e-10) << r.x << " " << r.k;
  }
}

TEST(GsClosed, Examples) {
  EXPECT_NEAR(d_gs_closed(0.5, 2), -5.0, 1e-12);
  for (std::uint32_t l = 1; l <= 10; ++l) EXPECT_NEAR(d_gs_closed(1.0, l), -1.0, 1e-15);
  EXPECT_NEAR(d_gs_closed(1.0 - 1e-9, 4), -1.0, 1e-6);
  EXPECT_THROW((void)d_gs_closed(0.0, 2), DomainError);
}

TEST(GsClosed, SingleRootForHigherOrders) {
  double prev_root = 0.0;
  for (std::uint32_t l = 4; l <= 10; ++l) {
    EXPECT_EQ(sign_changes(l, 0.05, 0.999999, 20000), 1) << l;
    const double root = gs_root(l);
    EXPECT_GT(root, prev_root) << l;
    prev_root = root;
  }
}

TEST(GsClosed, ThirdOrderHasTwoSignChanges) {
  // a second root sits just above eta = 0.05 for l = 3
  EXPECT_EQ(sign_changes(3, 0.05, 0.999999, 20000), 2);
  EXPECT_LT(d_gs_closed(0.05, 3), 0.0);
  EXPECT_GT(d_gs_closed(0.06, 3), 0.0);
  EXPECT_GT(d_gs_closed(0.3, 3), 0.0);
  EXPECT_LT(d_gs_closed(0.6, 3), 0.0);
}

TEST(PacsClosed, ReferenceValues) {
  for (const auto& r : kPacsClosed) EXPECT_LE(rel(d_pacs_closed(r.x, r.k, r.l), r.value), 1e-11) << r.x << " " << r.k << " " << r.l;
}

TEST(PacsOracle, ReferenceValues) {
  for (const auto& r : kPacsOracle) {
    EXPECT_LE(rel(d_criterion(build_pacs(r.x, r.k, kOracleTailTol), r.l), r.value), 1e-10) << r.x << " " << r.k;
  }
}

TEST(PacsClosed, CoherentLimitVanishes) {
  EXPECT_NEAR(d_pacs_closed(1.7, 0, 3), 0.0, 1e-9);
  for (double a : {0.5, 1.0, 1.5, 2.0}) {
    for (std::uint32_t l = 1; l <= 5; ++l) EXPECT_LE(std::abs(d_pacs_closed(a, 0, l)), 1e-9 * std::pow(a, 2.0 * l + 2.0));
  }
}

TEST(PacsClosed, VanishesAtZeroAmplitude) {
  EXPECT_EQ(d_pacs_closed(0.0, 5, 2), 0.0);
  // the number-state value would be 5*4*3 - 125 = -65
  EXPECT_NE(d_criterion(build_pacs(0.0, 5), 2), d_pacs_closed(0.0, 5, 2));
}

TEST(PacsClosed, FourthOrderDeeperAtFifteenPhotons) {
  for (int i = 1; i <= 30; ++i) {
    const double a = 0.1 * i;
    const double d3 = d_pacs_closed(a, 15, 3);
    const double d4 = d_pacs_closed(a, 15, 4);
    EXPECT_LT(d3, 0.0);
    EXPECT_LT(d4, 0.0);
    EXPECT_GT(std::abs(d4), std::abs(d3)) << a;
  }
}

TEST(HsClosed, Examples) {
  EXPECT_NEAR(d_hs_closed(4, 2, 0.5, 1), -2.0 / 3.0, 1e-12);
  EXPECT_NEAR(d_hs_closed(1e8, 10, 0.5, 1), -2.5, 1e-5);
  EXPECT_THROW((void)d_hs_closed(4, 2, 0.5, 2), ConstraintError);
  EXPECT_THROW((void)d_hs_closed(3, 2, 0.5, 1), ConstraintError);
}

TEST(HsClosed, MatchesOracle) {
  for (std::uint32_t M = 2; M <= 10; ++M) {
    for (double eta : {0.2, 0.5, 0.8}) {
      for (double f : {1.0, 10.0}) {
        const double L = f * hs_minimal_L(M, eta);
        const PND pnd = build_hs(L, M, eta);
        for (std::uint32_t l = 1; l < M; ++l) {
          EXPECT_LE(rel(d_hs_closed(L, M, eta, l), d_criterion(pnd, l)), 1e-9) << M << " " << eta << " " << f << " " << l;
        }
      }
    }
  }
}

TEST(HsClosed, NegativeOnMinimalLGrid) {
  for (int i = 0; i <= 16; ++i) {
    const double eta = 0.1 + 0.05 * i;
    for (std::uint32_t M = 9; M <= 20; ++M) EXPECT_LT(d_hs_closed(hs_minimal_L(M, eta), M, eta, 8), 0.0);
  }
}

TEST(DClosed, DispatchAndCaps) {
  EXPECT_EQ(d_closed(Binomial{0.5, 10}, 1), d_bs_closed(0.5, 10, 1));
  EXPECT_EQ(d_closed(Geometric{0.5}, 2), d_gs_closed(0.5, 2));
  EXPECT_EQ(max_closed_order(Binomial{0.5, 10}), 9u);
  EXPECT_EQ(max_closed_order(GeneralizedBinomial{4, 0, 0}), 3u);
  EXPECT_EQ(max_closed_order(Hypergeometric{4, 2, 0.5}), 1u);
  EXPECT_FALSE(max_closed_order(PhotonAddedCoherent{1, 2}).has_value());
}

TEST(Crosscheck, Examples) {
  const auto bs = crosscheck(Binomial{0.5, 10}, 5);
  ASSERT_EQ(bs.rows.size(), 5u);
  for (const auto& r : bs.rows) {
    EXPECT_TRUE(r.agree);
    EXPECT_LE(r.rel_dev, 1e-10);
    EXPECT_EQ(r.note, "normal-ordered oracle");
    EXPECT_EQ(r.abs_dev, std::abs(r.d_oracle - r.d_closed));
  }
  const auto hs = crosscheck(Hypergeometric{4, 2, 0.5}, 1);
  ASSERT_EQ(hs.rows.size(), 1u);
  EXPECT_TRUE(hs.rows[0].agree);
  EXPECT_NEAR(hs.rows[0].d_closed, -2.0 / 3.0, 1e-12);
  EXPECT_NEAR(hs.rows[0].d_oracle, -2.0 / 3.0, 1e-12);

  const auto gs = crosscheck(Geometric{0.5}, 2);
  EXPECT_EQ(gs.disagree_count(), 2u);
  EXPECT_GE(gs.rows[1].d_oracle, 0.0);
  EXPECT_NEAR(gs.rows[1].d_closed, -5.0, 1e-12);
  EXPECT_NE(gs.rows[1].note.find("ordering"), std::string::npos);
  EXPECT_NE(gs.rows[1].note.find("|rel_dev| > tol"), std::string::npos);

  EXPECT_THROW((void)crosscheck(Binomial{0.5, 3}, 3), ConstraintError);
  EXPECT_THROW((void)crosscheck(Hypergeometric{3, 2, 0.5}, 1), ConstraintError);
}
