#include <doctest.h>

#include <cmath>
#include <vector>

#include "wirecons/consensus.hpp"

using namespace wirecons;
using namespace wirecons::consensus;

namespace {

// Independent oracle machinery: Pascal-triangle binomial coefficients and a
// literal four-deep (two-deep for RAFT) enumeration of the nested sums. Kept
// deliberately separate from the library's evaluation path.
std::vector<std::vector<double>> pascal(int rows) {
  std::vector<std::vector<double>> c(rows + 1);
  for (int m = 0; m <= rows; ++m) {
    c[m].assign(m + 1, 1.0);
    for (int k = 1; k < m; ++k) c[m][k] = c[m - 1][k - 1] + c[m - 1][k];
  }
  return c;
}

double pbft_enumerated(int n, double p) {
  const int b = (n - 1) / 3;
  const double q = 1.0 - p;
  const auto c = pascal(n);
  double total = 0.0;
  for (int i = 0; i <= b; ++i)
    for (int j = 0; j <= b - i; ++j)
      for (int k = 0; k <= b - i - j; ++k)
        for (int l = 0; l <= b - i - j - k; ++l) {
          double term = c[n - 1][i] * std::pow(q, i) * std::pow(p, n - 1 - i);
          term *= c[n - 1 - i][j] * std::pow(q, j) * std::pow(p, n - 1 - i - j);
          term *= c[n - i - j][k] * std::pow(q, k) * std::pow(p, n - i - j - k);
          term *= c[n - i - j - k][l] * std::pow(q, l) *
                  std::pow(p, n - i - j - k - l);
          total += term;
        }
  return total;
}

double raft_enumerated(int n, double p) {
  const int f = (n - 1) / 2;
  const double q = 1.0 - p;
  const auto c = pascal(n);
  double total = 0.0;
  for (int i = 0; i <= f; ++i)
    for (int j = 0; j <= f - i; ++j) {
      double term = c[n - 1][i] * std::pow(q, i) * std::pow(p, n - 1 - i);
      term *= c[n - 1 - i][j] * std::pow(q, j) * std::pow(p, n - 1 - i - j);
      total += term;
    }
  return total;
}

}  // namespace

TEST_CASE("fault budgets and optimal sizes") {
  const FaultBudget pbft4 = fault_budget(Protocol::pbft, 4);
  CHECK(pbft4.budget == 1);
  CHECK(pbft4.optimal_size);

  const FaultBudget raft7 = fault_budget(Protocol::raft, 7);
  CHECK(raft7.budget == 3);
  CHECK(raft7.optimal_size);

  const FaultBudget pbft3 = fault_budget(Protocol::pbft, 3);
  CHECK(pbft3.budget == 0);
  CHECK(!pbft3.optimal_size);

  CHECK_THROWS_AS(fault_budget(Protocol::pbft, 1), std::domain_error);
}

TEST_CASE("primary rotation is a plain modulus") {
  CHECK(primary_index(0, 4) == 0);
  CHECK(primary_index(5, 4) == 1);
  CHECK(primary_index(4, 4) == 0);
  CHECK(primary_index((1ULL << 63) + 2, 7) ==
        static_cast<int>(((1ULL << 63) + 2) % 7));
  CHECK_THROWS_AS(primary_index(3, 0), std::domain_error);
}

TEST_CASE("degenerate link probabilities") {
  const ConsensusBreakdown sure = pbft_success(4, 1.0);
  CHECK(sure.total == 1.0);
  for (const auto& [label, probability] : sure.per_stage)
    CHECK(probability == 1.0);

  CHECK(pbft_success(4, 0.0).total == 0.0);
  CHECK(raft_success(7, 1.0).total == 1.0);
  CHECK(raft_success(3, 0.0).total == 0.0);

  CHECK_THROWS_AS(pbft_success(4, -0.1), std::domain_error);
  CHECK_THROWS_AS(raft_success(4, 1.1), std::domain_error);
}

TEST_CASE("nested-sum evaluation equals explicit enumeration for small n") {
  for (const int n : {2, 4, 5, 6, 7}) {
    for (const double p : {0.3, 0.5, 0.9, 0.99}) {
      CHECK(std::abs(pbft_success(n, p).total - pbft_enumerated(n, p)) <=
            1e-12);
      CHECK(std::abs(raft_success(n, p).total - raft_enumerated(n, p)) <=
            1e-12);
    }
  }
}

TEST_CASE("log-space evaluation matches enumeration beyond the exact range") {
  // n = 100 exercises the lgamma-based binomial path.
  for (const double p : {0.7, 0.9, 0.97}) {
    CHECK(pbft_success(100, p).total ==
          doctest::Approx(pbft_enumerated(100, p)).epsilon(1e-10));
    CHECK(raft_success(101, p).total ==
          doctest::Approx(raft_enumerated(101, p)).epsilon(1e-10));
  }
}

TEST_CASE("per-stage probabilities multiply back to the total") {
  for (const int n : {4, 10, 31}) {
    for (const double p : {0.6, 0.9, 0.999}) {
      for (const auto& breakdown : {pbft_success(n, p), raft_success(n, p)}) {
        double product = 1.0;
        for (const auto& [label, probability] : breakdown.per_stage) {
          CHECK(probability >= 0.0);
          CHECK(probability <= 1.0);
          product *= probability;
        }
        CHECK(product == doctest::Approx(breakdown.total).epsilon(1e-12));
        CHECK(breakdown.stage_geometric_mean() ==
              doctest::Approx(std::pow(breakdown.total,
                                       1.0 / breakdown.per_stage.size()))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("totals are monotone in the link probability and bounded") {
  for (const int n : {4, 13}) {
    double prev_p = -1.0, prev_r = -1.0;
    for (double p = 0.0; p <= 1.0; p += 0.05) {
      const double pp = pbft_success(n, p).total;
      const double rr = raft_success(n, p).total;
      CHECK(pp >= 0.0);
      CHECK(pp <= 1.0);
      CHECK(pp >= prev_p);
      CHECK(rr >= prev_r);
      prev_p = pp;
      prev_r = rr;
    }
  }
}

TEST_CASE("raft dominates pbft at equal size and link probability") {
  for (int n = 4; n <= 52; n += 3) {
    for (const double p : {0.5, 0.7, 0.9, 0.99}) {
      CHECK(raft_success(n, p).total >= pbft_success(n, p).total);
    }
  }
}

TEST_CASE("binomial stage terms over the full failure range sum to one") {
  // The truncated stage sums rely on this identity; checked here with
  // independent Pascal coefficients.
  const auto c = pascal(200);
  for (const int m : {1, 7, 52, 200}) {
    for (const double q : {0.01, 0.3, 0.8}) {
      double sum = 0.0;
      for (int k = 0; k <= m; ++k)
        sum += c[m][k] * std::pow(q, k) * std::pow(1.0 - q, m - k);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}
