#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spsdgeo/errors.hpp"
#include "spsdgeo/grassmann.hpp"
#include "spsdgeo/spd.hpp"
#include "spsdgeo/spsd.hpp"
#include "spsdgeo/sym_eig.hpp"
#include "test_util.hpp"

using namespace spsdgeo;
using testutil::random_spsd_point;
using testutil::rel_err;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix line2(double angle) {
  Matrix g(2, 1);
  g << std::cos(angle), std::sin(angle);
  return g;
}

SpsdPoint rank1(double angle, double scale) {
  SpsdPoint x;
  x.frame = line2(angle);
  x.core = Matrix::Constant(1, 1, scale);
  return x;
}

// Re-gauge a point by a random r-by-r rotation; the composed matrix is
// unchanged.
SpsdPoint regauge(Rng& rng, const SpsdPoint& x) {
  const Matrix o = random_orthogonal(rng, x.rank());
  SpsdPoint out;
  out.frame = x.frame * o;
  out.core = o.transpose() * x.core * o;
  return out;
}

SpsdPoint random_cluster_point(Rng& rng, const SpsdPoint& center,
                               double spread) {
  SpsdTangent t;
  t.delta = testutil::random_horizontal(rng, center.frame, spread);
  t.sym = random_symmetric(rng, center.rank(), spread);
  return spsd_exp(center, t);
}

}  // namespace

TEST_CASE("factor basics") {
  Matrix c = Matrix::Zero(2, 2);
  c(0, 0) = 4.0;
  const SpsdPoint x = spsd_factor(c, 1);
  CHECK(x.frame(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(x.frame(1, 0)) < 1e-14);
  CHECK(x.core(0, 0) == doctest::Approx(4.0));

  Matrix full = Matrix::Zero(3, 3);
  full(0, 0) = 4.0;
  full(1, 1) = 3.0;
  try {
    spsd_factor(full, 1);
    FAIL("expected RankMismatch");
  } catch (const RankMismatch& e) {
    CHECK(e.actual_rank == 2);
  }
}

TEST_CASE("factor round trip on constructed input") {
  Rng rng(81);
  const SpsdPoint built = random_spsd_point(rng, 8, 3);
  const Matrix c = spsd_compose(built);
  const SpsdPoint factored = spsd_factor(c, 3);
  CHECK(rel_err(spsd_compose(factored), c) < 1e-10);
}

TEST_CASE("factor_truncated keeps the leading block") {
  Matrix c = Matrix::Zero(3, 3);
  c(0, 0) = 4.0;
  c(1, 1) = 3.0;
  c(2, 2) = 1.0;
  const SpsdPoint x = spsd_factor_truncated(c, 2);
  CHECK(x.core(0, 0) == doctest::Approx(4.0));
  CHECK(x.core(1, 1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(spsd_factor(c, 2), RankMismatch);
  CHECK_THROWS_AS(spsd_factor_truncated(Matrix::Zero(3, 3), 1, 1e-9),
                  RankMismatch);
}

TEST_CASE("compose gauge invariance") {
  Rng rng(83);
  const SpsdPoint x = random_spsd_point(rng, 6, 2);
  const SpsdPoint y = regauge(rng, x);
  CHECK(rel_err(spsd_compose(y), spsd_compose(x)) < 1e-12);
}

TEST_CASE("inner product structure") {
  Rng rng(85);
  const SpsdPoint base = random_spsd_point(rng, 6, 2);
  SpsdTangent zero{Matrix::Zero(6, 2), Matrix::Zero(2, 2)};
  CHECK(spsd_inner(zero, zero, base) == 0.0);

  SpsdTangent t1{testutil::random_horizontal(rng, base.frame, 1.0),
                 random_symmetric(rng, 2, 1.0)};
  SpsdTangent t2{testutil::random_horizontal(rng, base.frame, 0.5),
                 random_symmetric(rng, 2, 0.8)};
  CHECK(spsd_inner(t1, t2, base) == doctest::Approx(spsd_inner(t2, t1, base)));

  // k scales only the SPD block.
  SpsdTangent s1{Matrix::Zero(6, 2), t1.sym};
  SpsdTangent s2{Matrix::Zero(6, 2), t2.sym};
  const double k1 = spsd_inner(s1, s2, base, SpsdMetricConfig{1.0});
  const double k2 = spsd_inner(s1, s2, base, SpsdMetricConfig{2.0});
  CHECK(k2 == doctest::Approx(2.0 * k1));
}

TEST_CASE("alignment keeps the composed matrix and fixes the gauge") {
  Rng rng(87);
  const SpsdPoint x1 = random_spsd_point(rng, 7, 3);
  SpsdPoint x2 = random_cluster_point(rng, x1, 0.5);

  const SpsdPoint aligned = align_pair(x1, x2);
  CHECK(rel_err(spsd_compose(aligned), spsd_compose(x2)) < 1e-10);
  CHECK(rel_err(grass_project(x1.frame, aligned.frame), aligned.frame) <
        1e-10);

  // Already aligned input stays put.
  const SpsdPoint again = align_pair(x1, aligned);
  CHECK(rel_err(again.frame, aligned.frame) < 1e-10);
  CHECK(rel_err(again.core, aligned.core) < 1e-10);

  // Re-gauged input aligns to the same representative.
  const SpsdPoint other = align_pair(x1, regauge(rng, x2));
  CHECK(rel_err(other.frame, aligned.frame) < 1e-8);
  CHECK(rel_err(other.core, aligned.core) < 1e-8);
}

TEST_CASE("geodesic endpoints and the rank-1 closed form") {
  Rng rng(89);
  const SpsdPoint x1 = random_spsd_point(rng, 7, 3);
  const SpsdPoint x2 = align_pair(x1, random_cluster_point(rng, x1, 0.5));

  CHECK(rel_err(spsd_compose(spsd_geodesic(x1, x2, 0.0)), spsd_compose(x1)) <
        1e-10);
  CHECK(rel_err(spsd_compose(spsd_geodesic(x1, x2, 1.0)), spsd_compose(x2)) <
        1e-8);

  const SpsdPoint a = rank1(0.0, 4.0);
  const SpsdPoint b = align_pair(a, rank1(kPi / 4.0, 9.0));
  const SpsdPoint mid = spsd_geodesic(a, b, 0.5);
  CHECK(grass_distance(mid.frame, line2(kPi / 8.0)) < 1e-10);
  CHECK(mid.core(0, 0) == doctest::Approx(6.0));

  SpsdPoint unaligned = rank1(kPi / 4.0, 9.0);
  unaligned.frame = -unaligned.frame;  // wrong representative
  CHECK_THROWS_AS(spsd_geodesic(a, unaligned, 0.5), NotAligned);
}

TEST_CASE("curve length hand values") {
  const SpsdPoint a = rank1(0.0, 4.0);
  CHECK(spsd_curve_length(a, a) < 1e-12);

  const SpsdPoint b_same = rank1(0.0, 9.0);
  CHECK(spsd_curve_length(a, b_same) == doctest::Approx(std::log(9.0 / 4.0)));

  const SpsdPoint b_rot = rank1(kPi / 4.0, 9.0);
  const double expect = std::sqrt(std::pow(kPi / 4.0, 2.0) +
                                  std::pow(std::log(9.0 / 4.0), 2.0));
  CHECK(spsd_curve_length(a, b_rot) == doctest::Approx(expect));
  CHECK(spsd_curve_length(a, b_rot) == doctest::Approx(1.1289).epsilon(1e-4));
}

TEST_CASE("curve length is symmetric for every k") {
  Rng rng(91);
  for (int trial = 0; trial < 8; ++trial) {
    const SpsdPoint x1 = random_spsd_point(rng, 6, 2);
    const SpsdPoint x2 = random_cluster_point(rng, x1, 0.6);
    for (double k : {0.5, 1.0, 2.0}) {
      const SpsdMetricConfig cfg{k};
      const double ab = spsd_curve_length(x1, x2, cfg);
      const double ba = spsd_curve_length(x2, x1, cfg);
      CHECK(std::abs(ab - ba) <= 1e-8 * std::max(1.0, ab));
    }
  }
}

TEST_CASE("log and exp invert each other") {
  SpsdPoint base = rank1(0.0, 1.0);
  SpsdPoint x = rank1(kPi / 4.0, std::exp(1.0));
  const SpsdTangent t = spsd_log(base, x);
  CHECK(t.delta(0, 0) == doctest::Approx(0.0));
  CHECK(t.delta(1, 0) == doctest::Approx(kPi / 4.0));
  CHECK(t.sym(0, 0) == doctest::Approx(1.0));

  const SpsdPoint back = spsd_exp(base, t);
  CHECK(rel_err(spsd_compose(back), spsd_compose(x)) < 1e-10);

  const SpsdTangent at_self = spsd_log(base, base);
  CHECK(at_self.delta.norm() < 1e-10);
  CHECK(at_self.sym.norm() < 1e-10);

  Rng rng(93);
  for (int trial = 0; trial < 10; ++trial) {
    const SpsdPoint p = random_spsd_point(rng, 8, 3);
    const SpsdPoint q = random_cluster_point(rng, p, 0.7);
    const SpsdPoint rt = spsd_exp(p, spsd_log(p, q));
    CHECK(rel_err(spsd_compose(rt), spsd_compose(q)) < 1e-8);
  }
}

TEST_CASE("exp keeps the rank") {
  Rng rng(95);
  const SpsdPoint base = random_spsd_point(rng, 8, 3);
  SpsdTangent t{testutil::random_horizontal(rng, base.frame, 0.8),
                random_symmetric(rng, 3, 0.8)};
  const SymEig eig = sym_eig(spsd_compose(spsd_exp(base, t)));
  CHECK(eig.values(2) > 1e-9 * eig.values(0));
  CHECK(eig.values(3) < 1e-9 * eig.values(0));
}

TEST_CASE("transport identity and zero cases") {
  Rng rng(97);
  const SpsdPoint x = random_spsd_point(rng, 6, 2);
  SpsdTangent t{testutil::random_horizontal(rng, x.frame, 1.0),
                random_symmetric(rng, 2, 1.0)};
  const SpsdTangent same = spsd_pt(x, x, t);
  CHECK(rel_err(same.delta, t.delta) < 1e-9);
  CHECK(rel_err(same.sym, t.sym) < 1e-9);

  const SpsdPoint y = align_pair(x, random_cluster_point(rng, x, 0.5));
  const SpsdTangent zero =
      spsd_pt(x, y, SpsdTangent{Matrix::Zero(6, 2), Matrix::Zero(2, 2)});
  CHECK(zero.delta.norm() < 1e-12);
  CHECK(zero.sym.norm() < 1e-12);
}

TEST_CASE("transport preserves the product metric for every k") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const SpsdPoint x = random_spsd_point(rng, 7, 3);
    const SpsdPoint y = align_pair(x, random_cluster_point(rng, x, 0.6));
    SpsdTangent t1{testutil::random_horizontal(rng, x.frame, 1.0),
                   random_symmetric(rng, 3, 1.0)};
    SpsdTangent t2{testutil::random_horizontal(rng, x.frame, 0.6),
                   random_symmetric(rng, 3, 0.9)};
    const SpsdTangent m1 = spsd_pt(x, y, t1);
    const SpsdTangent m2 = spsd_pt(x, y, t2);
    for (double k : {0.5, 1.0, 2.0}) {
      const SpsdMetricConfig cfg{k};
      const double before = spsd_inner(t1, t2, x, cfg);
      const double after = spsd_inner(m1, m2, y, cfg);
      CHECK(std::abs(after - before) <=
            1e-8 * std::max(1.0, std::abs(before)));
    }
  }
}

TEST_CASE("transported velocity approximates the reversed log") {
  Rng rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    const SpsdPoint x1 = random_spsd_point(rng, 7, 2);
    const SpsdPoint x2 = align_pair(x1, random_cluster_point(rng, x1, 0.5));
    const SpsdTangent moved = spsd_pt(x1, x2, spsd_log(x1, x2));
    const SpsdPoint x1_at_x2 = align_pair(x2, x1);
    const SpsdTangent reverse = spsd_log(x2, x1_at_x2);
    CHECK((moved.delta + reverse.delta).norm() < 1e-6);
    CHECK((moved.sym + reverse.sym).norm() < 1e-6);
  }
}

TEST_CASE("mean of duplicates and singletons") {
  Rng rng(103);
  const SpsdPoint x = random_spsd_point(rng, 6, 2);
  const SpsdPoint mean2 = spsd_mean({x, x});
  CHECK(rel_err(spsd_compose(mean2), spsd_compose(x)) < 1e-8);
  const SpsdPoint mean1 = spsd_mean({x});
  CHECK(rel_err(spsd_compose(mean1), spsd_compose(x)) < 1e-12);
}

TEST_CASE("rank-1 mean closed form") {
  const SpsdPoint a = rank1(0.0, 4.0);
  const SpsdPoint b = rank1(0.0, 9.0);
  const SpsdPoint mean = spsd_mean({a, b});
  const Matrix composed = spsd_compose(mean);
  CHECK(composed(0, 0) == doctest::Approx(6.0));
  CHECK(std::abs(composed(1, 1)) < 1e-12);
}

TEST_CASE("canonicalization properties") {
  Rng rng(105);
  const SpsdPoint center = random_spsd_point(rng, 9, 3);
  std::vector<SpsdPoint> items;
  for (int i = 0; i < 12; ++i)
    items.push_back(random_cluster_point(rng, center, 0.4));

  MeanConfig cfg;
  SpsdMeanDiagnostics diag;
  const CanonicalSet canon = spsd_canonicalize(items, cfg, &diag);
  CHECK(diag.grassmann.final_residual <= cfg.eps);
  CHECK(diag.spd.final_residual <= cfg.eps);

  for (std::size_t i = 0; i < items.size(); ++i) {
    // Projection fixed point and composition preserved.
    CHECK(rel_err(grass_project(canon.mean_frame, canon.items[i].frame),
                  canon.items[i].frame) < 1e-10);
    CHECK(rel_err(spsd_compose(canon.items[i]), spsd_compose(items[i])) <
          1e-8);
  }

  // Tangent sums at the mean vanish (centering).
  Matrix grass_sum = Matrix::Zero(9, 3);
  Matrix spd_sum = Matrix::Zero(3, 3);
  for (const SpsdPoint& item : canon.items) {
    grass_sum += grass_log(canon.mean_frame, item.frame);
    spd_sum += spd_log(canon.mean_core, item.core);
  }
  const double n = static_cast<double>(items.size());
  CHECK(grass_sum.norm() <= 1e-6 * n);
  CHECK(spd_sum.norm() <= 1e-6 * n);
}

TEST_CASE("canonicalization is gauge invariant") {
  Rng rng(107);
  const SpsdPoint center = random_spsd_point(rng, 8, 2);
  std::vector<SpsdPoint> items;
  for (int i = 0; i < 6; ++i)
    items.push_back(random_cluster_point(rng, center, 0.4));
  std::vector<SpsdPoint> regauged;
  for (const SpsdPoint& x : items) regauged.push_back(regauge(rng, x));

  const CanonicalSet a = spsd_canonicalize(items);
  const CanonicalSet b = spsd_canonicalize(regauged);
  CHECK(rel_err(spsd_compose(a.mean()), spsd_compose(b.mean())) < 1e-8);
  for (std::size_t i = 0; i < items.size(); ++i) {
    CHECK(rel_err(a.items[i].frame, b.items[i].frame) < 1e-7);
    CHECK(rel_err(a.items[i].core, b.items[i].core) < 1e-7);
  }
}

TEST_CASE("singleton canonical set") {
  Rng rng(109);
  const SpsdPoint x = random_spsd_point(rng, 6, 2);
  const CanonicalSet canon = spsd_canonicalize({x});
  CHECK(grass_distance(canon.mean_frame, x.frame) < 1e-12);
  CHECK(rel_err(spsd_compose(canon.items.front()), spsd_compose(x)) < 1e-10);
  CHECK(rel_err(spsd_compose(canon.mean()), spsd_compose(x)) < 1e-10);
}

TEST_CASE("mean rejects empty and mismatched sets") {
  CHECK_THROWS_AS(spsd_mean({}), EmptySet);
  Rng rng(111);
  const SpsdPoint a = random_spsd_point(rng, 6, 2);
  const SpsdPoint b = random_spsd_point(rng, 6, 3);
  CHECK_THROWS_AS(spsd_mean({a, b}), DimensionMismatch);
}
