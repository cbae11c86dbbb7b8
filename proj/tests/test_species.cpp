#include <cmath>
#include <vector>

#include "doctest.h"
#include "unimix/paths.hpp"
#include "unimix/species.hpp"

using namespace unimix;

namespace {

// Independent EPPF oracle: opening factors times rising-factorial block
// products over the seating normalizer, all through lgamma.
double log_chi_oracle(const PitmanYor& m, const std::vector<int>& sizes) {
  const double a = m.discount();
  const double b = m.strength();
  double value = 0.0;
  int n = 0;
  for (std::size_t i = 1; i < sizes.size(); ++i)
    value += std::log(b + static_cast<double>(i) * a);
  for (const int e : sizes) {
    n += e;
    value += std::lgamma(e - a) - std::lgamma(1.0 - a);
  }
  for (int k = 2; k <= n; ++k) value -= std::log(b + k - 1);
  return value;
}

// Probability of the assignment sequence that produces this partition with
// items arriving in index order, multiplying predictive weights stepwise.
double sequential_probability(const PitmanYor& m, const Partition& p) {
  std::vector<int> owner(static_cast<std::size_t>(p.n()) + 1, -1);
  for (std::size_t c = 0; c < p.cells().size(); ++c)
    for (const int item : p.cells()[c]) owner[item] = static_cast<int>(c);
  std::vector<int> appearance;  // cell indices in order of first appearance
  std::vector<int> sizes;
  double prob = 1.0;
  for (int item = 1; item <= p.n(); ++item) {
    const PredictiveWeights w = m.predictive_weights(sizes);
    const int cell = owner[item];
    int slot = -1;
    for (std::size_t i = 0; i < appearance.size(); ++i)
      if (appearance[i] == cell) slot = static_cast<int>(i);
    if (slot < 0) {
      prob *= w.new_block;
      appearance.push_back(cell);
      sizes.push_back(1);
    } else {
      prob *= w.per_block[static_cast<std::size_t>(slot)];
      ++sizes[static_cast<std::size_t>(slot)];
    }
  }
  return prob;
}

const std::vector<PitmanYor> kModels = {
    PitmanYor(0.0, 1.0), PitmanYor(0.9, 100.0), PitmanYor(0.5, 0.5),
    PitmanYor(0.25, -0.1)};

}  // namespace

TEST_CASE("Poisson-Dirichlet parameter validation") {
  CHECK_NOTHROW(PitmanYor(0.0, 1.0));
  CHECK_NOTHROW(PitmanYor(0.25, -0.1));
  CHECK_THROWS_AS(PitmanYor(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PitmanYor(-0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PitmanYor(0.5, -0.5), std::invalid_argument);
}

TEST_CASE("factor logs stay finite for negative strength") {
  const PitmanYor m(0.25, -0.1);
  for (int i = 1; i <= 5; ++i) CHECK(std::isfinite(m.log_open_factor(i)));
  for (int e = 1; e <= 10; ++e) CHECK(std::isfinite(m.log_grow_factor(e)));
  for (int k = 2; k <= 10; ++k) CHECK(std::isfinite(m.log_seat_factor(k)));
}

TEST_CASE("EPPF literal values") {
  const PitmanYor unit(0.0, 1.0);
  CHECK(unit.log_chi({3}) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-14));
  const PitmanYor heavy(0.9, 100.0);
  const double expected =
      std::log(100.9 * 0.1 * 1.1 / (102.0 * 103.0 * 104.0));
  CHECK(heavy.log_chi_conditional({2}, {3}) ==
        doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("EPPF matches the lgamma oracle") {
  for (const PitmanYor& m : kModels)
    for (int n = 1; n <= 7; ++n)
      for (const Partition& p : enumerate_partitions(n)) {
        const std::vector<int> sizes = p.sizes();
        CHECK(m.log_chi(sizes) ==
              doctest::Approx(log_chi_oracle(m, sizes)).epsilon(1e-11));
      }
}

TEST_CASE("EPPF is exchangeable in the block sizes") {
  for (const PitmanYor& m : kModels) {
    CHECK(m.log_chi({3, 1, 2}) == doctest::Approx(m.log_chi({1, 2, 3})));
    CHECK(m.log_chi({5, 1}) == doctest::Approx(m.log_chi({1, 5})));
  }
}

TEST_CASE("EPPF sums to one over set partitions") {
  for (const PitmanYor& m : {PitmanYor(0.0, 1.0), PitmanYor(0.9, 100.0)})
    for (int n = 1; n <= 8; ++n) {
      double total = 0.0;
      for (const Partition& p : enumerate_partitions(n))
        total += std::exp(m.log_chi(p.sizes()));
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("conditional EPPF is the joint over the first-side marginal") {
  for (const PitmanYor& m : kModels) {
    const std::vector<std::pair<std::vector<int>, std::vector<int>>> cases = {
        {{2}, {3}}, {{1, 1}, {2, 1}}, {{3, 2}, {1}}, {{1}, {1, 1, 1}}};
    for (const auto& [first, second] : cases) {
      std::vector<int> joint = first;
      joint.insert(joint.end(), second.begin(), second.end());
      CHECK(m.log_chi_conditional(first, second) ==
            doctest::Approx(m.log_chi(joint) - m.log_chi(first))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("conditional EPPF depends on the first side only through counts") {
  for (const PitmanYor& m : kModels) {
    const std::vector<int> second = {2, 1};
    // Both firsts have two blocks over four items.
    CHECK(m.log_chi_conditional({3, 1}, second) ==
          doctest::Approx(m.log_chi_conditional({2, 2}, second)));
    const int blocks = 2, total = 4;
    CHECK(m.log_chi_conditional(blocks, total, second) ==
          doctest::Approx(m.log_chi_conditional({3, 1}, second)));
    CHECK(m.log_chi_conditional(0, 0, second) ==
          doctest::Approx(m.log_chi(second)));
  }
}

TEST_CASE("prediction rule reproduces the EPPF sequentially") {
  for (const PitmanYor& m : kModels)
    for (int n = 1; n <= 6; ++n)
      for (const Partition& p : enumerate_partitions(n)) {
        const double direct = std::exp(m.log_chi(p.sizes()));
        CHECK(sequential_probability(m, p) ==
              doctest::Approx(direct).epsilon(1e-11));
      }
}

TEST_CASE("predictive weights literal and normalization") {
  const PitmanYor m(0.5, 0.5);
  const PredictiveWeights w = m.predictive_weights({2});
  CHECK(w.new_block == doctest::Approx(0.4).epsilon(1e-14));
  REQUIRE(w.per_block.size() == 1);
  CHECK(w.per_block[0] == doctest::Approx(0.6).epsilon(1e-14));
  for (const PitmanYor& model : kModels) {
    const PredictiveWeights v = model.predictive_weights({3, 1, 2});
    double total = v.new_block;
    for (const double x : v.per_block) {
      CHECK(x > 0.0);
      total += x;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("eta weights literals") {
  // Entries are positional: index j holds the weight of the block jumping
  // at j, zero elsewhere.
  const PitmanYor m(0.0, 1.0);
  const EtaWeights one = m.eta_weights(SPath({0, 1}), SPath({0, 1}));
  CHECK(one.eta0 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  REQUIRE(one.plus.size() == 2);
  REQUIRE(one.minus.size() == 2);
  CHECK(one.plus[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(one.minus[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const EtaWeights two = m.eta_weights(SPath({0, 0, 2}), SPath());
  CHECK(two.eta0 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  REQUIRE(two.plus.size() == 3);
  CHECK(two.plus[1] == 0.0);
  CHECK(two.plus[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("eta weights normalize for random path pairs") {
  for (const PitmanYor& m : kModels)
    for (const SPath& sp : enumerate_paths(4))
      for (const SPath& sm : enumerate_paths(3)) {
        const EtaWeights w = m.eta_weights(sp, sm);
        double total = w.eta0;
        for (const double x : w.plus) total += x;
        for (const double x : w.minus) total += x;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(w.eta0 > 0.0);
      }
}
