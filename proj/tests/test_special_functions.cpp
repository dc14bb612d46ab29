#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracss/errors.hpp"
#include "fracss/special_functions.hpp"
#include "support.hpp"

using namespace fracss;

TEST_CASE("mittag-leffler") {
  CHECK(oracle::rel_err(mittag_leffler(MittagLefflerParams(1.0), 1.0), M_E) < 1e-15);
  for (double beta : {0.3, 1.0, 1.7, 2.5}) {
    CHECK(oracle::rel_err(mittag_leffler(MittagLefflerParams(0.6, beta), 0.0), 1.0 / oracle::gamma(beta)) < 1e-15);
  }
  for (double z : {-2.0, -1.0, -0.3, 0.0, 0.4, 1.0, 1.8}) {
    CHECK(oracle::rel_err(mittag_leffler(MittagLefflerParams(0.5), z), oracle::ml_half(z)) < 1e-12);
  }
  for (double z : {0.1, 0.7, 1.5, 2.2}) {
    CHECK(oracle::rel_err(mittag_leffler(MittagLefflerParams(2.0), z * z), std::cosh(z)) < 1e-14);
  }
  CHECK_THROWS_AS(MittagLefflerParams(0.0), InvalidArgument);
  CHECK_THROWS_AS(MittagLefflerParams(0.5, -1.0), InvalidArgument);
}

TEST_CASE("truncation failure carries the last term") {
  SeriesOptions opt;
  opt.max_terms = 10;
  try {
    mittag_leffler(MittagLefflerParams(1.0), 30.0, opt);
    FAIL("expected a truncation error");
  } catch (const TruncationError& e) {
    CHECK(e.last_term_magnitude() > 0.0);
  }
}

TEST_CASE("tail bound covers the change from adding terms") {
  SeriesOptions loose;
  loose.tol = 1e-6;
  for (double z : {-1.5, 0.5, 2.0}) {
    auto coarse = mittag_leffler_series(MittagLefflerParams(0.8, 1.2), z, loose);
    auto fine = mittag_leffler_series(MittagLefflerParams(0.8, 1.2), z);
    CHECK(std::abs(coarse.value - fine.value) <= coarse.tail_bound);
    CHECK(fine.terms > coarse.terms);
  }
}

TEST_CASE("kilbas-saigo") {
  CHECK(kilbas_saigo(KilbasSaigoParams(0.5, 1.3, 0.45), 0.0) == 1.0);
  for (double alpha : {0.4, 0.9, 1.6}) {
    for (double gamma : {0.2, 1.0, 2.5}) {
      for (double z : {-1.2, 0.3, 1.1}) {
        double want = oracle::gamma(alpha * gamma + 1) *
                      mittag_leffler(MittagLefflerParams(alpha, alpha * gamma + 1), z);
        CHECK(oracle::rel_err(kilbas_saigo(KilbasSaigoParams(alpha, 1.0, gamma), z), want) < 1e-12);
      }
    }
  }
  SUBCASE("coefficients are the running gamma-ratio product") {
    KilbasSaigoParams p(0.6, 1.5, 0.5);
    double c = 1.0;
    for (int k = 0; k < 12; ++k) {
      CHECK(oracle::rel_err(kilbas_saigo_coefficient(p, k), c) < 1e-13);
      double a = 0.6 * (k * 1.5 + 0.5);
      c *= oracle::gamma(a + 1) / oracle::gamma(a + 0.6 + 1);
    }
  }
  SUBCASE("a pole inside the product is an error") {
    // alpha(im + l) + 1 = -1 at i = 0
    CHECK_THROWS_AS(kilbas_saigo(KilbasSaigoParams(0.5, 1.0, -4.0), 0.5), std::exception);
  }
}

TEST_CASE("wright") {
  for (double mu : {0.5, 1.0, 2.3}) {
    CHECK(oracle::rel_err(wright(WrightParams(0.7, mu), 0.0), 1.0 / oracle::gamma(mu)) < 1e-15);
  }
  for (double z : {-2.0, -0.5, 0.25, 1.0, 3.0}) CHECK(oracle::rel_err(wright(WrightParams(0.0, 1.0), z), std::exp(z)) < 1e-14);
  // reciprocal gamma vanishes at the poles
  CHECK(wright(WrightParams(1.0, 0.0), 0.0) == 0.0);
  CHECK(oracle::rel_err(wright(WrightParams(1.0, 0.0), 1.0), 1.0 + 1.0 / 2 + 1.0 / 12 + 1.0 / 144 + 1.0 / 2880 + 1.0 / 86400 +
                                                                 1.0 / 3628800.0 + 1.0 / 203212800.0) < 1e-9);
  CHECK_THROWS_AS(WrightParams(-1.0, 1.0), InvalidArgument);
}

TEST_CASE("generalized wright specialisations") {
  for (double alpha : {0.5, 1.2}) {
    for (double beta : {0.8, 1.0, 2.0}) {
      for (double z : {-1.0, 0.6}) {
        GeneralizedWrightParams p({{1.0, 1.0}}, {{beta, alpha}});
        CHECK(oracle::rel_err(generalized_wright(p, z), mittag_leffler(MittagLefflerParams(alpha, beta), z)) < 1e-12);
        GeneralizedWrightParams w({}, {{beta, alpha}});
        CHECK(oracle::rel_err(generalized_wright(w, z), wright(WrightParams(alpha, beta), z)) < 1e-12);
      }
    }
  }
  CHECK(generalized_wright(GeneralizedWrightParams({}, {}), 0.0) == 1.0);
  CHECK_THROWS_AS(GeneralizedWrightParams({{1.0, -1.0}}, {}), InvalidArgument);
}
