// Copyright 2026 The GridGame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>

#include "gridgame/stats.hpp"

using namespace gridgame;

TEST(Summarize, TwoSamples) {
  const std::vector<double> xs = {0.7, 0.8};
  const auto s = stats::summarize(xs);
  EXPECT_NEAR(s.mean, 0.75, 1e-12);
  EXPECT_NEAR(s.std_dev, 0.0707107, 1e-6);
  EXPECT_NEAR(s.ci95_high - s.mean, 1.96 * s.std_dev / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(s.samples, 2u);
}

TEST(Summarize, SingleSampleHasZeroWidth) {
  const std::vector<double> xs = {0.4};
  const auto s = stats::summarize(xs);
  EXPECT_EQ(s.std_dev, 0.0);
  EXPECT_EQ(s.ci95_low, s.ci95_high);
  EXPECT_THROW(stats::summarize(std::vector<double>{}), ValidationError);
}

TEST(IncompleteBeta, KnownValues) {
  EXPECT_NEAR(stats::incomplete_beta(1, 1, 0.3), 0.3, 1e-14);
  EXPECT_NEAR(stats::incomplete_beta(2, 2, 0.5), 0.5, 1e-14);
  EXPECT_NEAR(stats::incomplete_beta(2, 1, 0.4), 0.16, 1e-14);
  EXPECT_EQ(stats::incomplete_beta(3, 4, 0.0), 0.0);
  EXPECT_EQ(stats::incomplete_beta(3, 4, 1.0), 1.0);
  EXPECT_THROW(stats::incomplete_beta(0, 1, 0.5), ValidationError);
  EXPECT_THROW(stats::incomplete_beta(1, 1, 1.5), ValidationError);
}

TEST(StudentT, MatchesBoost) {
  for (double df : {1.0, 2.0, 4.0, 9.0, 30.0, 999.0}) {
    boost::math::students_t dist(df);
    for (double t : {0.0, 0.1, 0.5, 1.0, 2.0, 3.5, 6.0, 12.0}) {
      const double want = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
      const double got = stats::student_t_two_sided(t, df);
      EXPECT_NEAR(got, want, 1e-10 * std::max(1.0, want)) << "df=" << df << " t=" << t;
      EXPECT_NEAR(stats::student_t_two_sided(-t, df), got, 1e-15);
    }
  }
}

TEST(StudentT, TinyTailsRelativeAccuracy) {
  boost::math::students_t dist(999.0);
  const double want = 2.0 * boost::math::cdf(boost::math::complement(dist, 15.0));
  EXPECT_NEAR(stats::student_t_two_sided(15.0, 999.0) / want, 1.0, 1e-8);
}

TEST(PairedT, HandExample) {
  const std::vector<double> a = {0.1, 0.1, 0.1, 0.1, 0.2};
  const std::vector<double> b(5, 0.0);
  const auto r = stats::paired_t_test(a, b);
  EXPECT_NEAR(r.t, 6.0, 1e-9);
  EXPECT_NEAR(r.mean_difference, 0.12, 1e-12);
  boost::math::students_t dist(4.0);
  EXPECT_NEAR(r.p, 2.0 * boost::math::cdf(boost::math::complement(dist, 6.0)), 1e-12);
}

TEST(PairedT, DegenerateInputs) {
  const std::vector<double> a = {0.5, 0.6, 0.7};
  EXPECT_THROW(stats::paired_t_test(a, a), ValidationError);
  EXPECT_THROW(stats::paired_t_test(a, std::vector<double>{0.1, 0.2}), ValidationError);
  EXPECT_THROW(stats::paired_t_test(std::vector<double>{0.1}, std::vector<double>{0.2}), ValidationError);
}

TEST(PairedT, CalibratedUnderNull) {
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> noise(0.0, 0.1);
  int accepted = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(100), b(100);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double base = 0.5 + noise(gen);
      a[k] = base + noise(gen);
      b[k] = base + noise(gen);
    }
    accepted += stats::paired_t_test(a, b).p > 0.01;
  }
  EXPECT_GE(accepted, 95);
}

TEST(Summarize, IntervalCoverage) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> dist(0.3, 0.2);
  const int trials = 2000;
  int covered = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> xs(200);
    for (auto& x : xs) x = dist(gen);
    const auto s = stats::summarize(xs);
    covered += s.ci95_low <= 0.3 && 0.3 <= s.ci95_high;
  }
  const double rate = covered / static_cast<double>(trials);
  EXPECT_GE(rate, 0.93);
  EXPECT_LE(rate, 0.97);
}
