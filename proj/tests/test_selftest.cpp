#include <gtest/gtest.h>

#include <sstream>

#include "pulsesynth/selftest.hpp"

namespace ps = pulsesynth;

TEST(Selftest, AllChecksPass) {
  for (const auto& r : ps::run_selftest()) {
    EXPECT_TRUE(r.passed) << r.name << " worst=" << r.worst << " " << r.detail;
    EXPECT_GT(r.cases, 0) << r.name;
    EXPECT_LE(r.worst, r.tolerance) << r.name;
  }
}

TEST(Selftest, DetectsABrokenTolerance) {
  // With a zero tolerance the gradient check must fail: finite differences
  // are never exact.
  const auto r = ps::check_gradients(3, 7, 0.0);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.worst, 0.0);
  std::ostringstream os;
  ps::write_check(os, r);
  EXPECT_EQ(os.str().rfind("FAIL ", 0), 0u);
}

TEST(Selftest, HaarUnitariesAreUnitary) {
  std::mt19937_64 rng(3);
  for (int dim : {2, 4, 8, 16}) {
    EXPECT_LT(ps::unitarity_error(ps::random_unitary(dim, rng)), 1e-12);
    const auto h = ps::random_hermitian(dim, rng);
    EXPECT_LT(ps::hermiticity_error(h), 1e-15);
  }
}
