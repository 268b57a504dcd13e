#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "noisebench/rng.hpp"

using namespace noisebench;

TEST_CASE("mix64 avalanche: flipping one input bit flips about half the output") {
  // Average over inputs and bit positions; a full-avalanche mixer sits
  // near 32 of 64 bits.
  double total_flips = 0.0;
  int cases = 0;
  for (std::uint64_t x = 1; x <= 64; ++x) {
    std::uint64_t base = mix64(x * 0x9E3779B97F4A7C15ULL);
    for (int bit = 0; bit < 64; bit += 7) {
      std::uint64_t flipped = mix64((x * 0x9E3779B97F4A7C15ULL) ^ (1ULL << bit));
      total_flips += __builtin_popcountll(base ^ flipped);
      ++cases;
    }
  }
  double mean_flips = total_flips / cases;
  CHECK(mean_flips > 28.0);
  CHECK(mean_flips < 36.0);
}

TEST_CASE("mix64_seq is order-sensitive and collision-resistant on small tuples") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 16; ++a)
    for (std::uint64_t b = 0; b < 16; ++b)
      for (std::uint64_t c = 0; c < 16; ++c) seen.insert(mix64_seq({a, b, c}));
  CHECK(seen.size() == 16 * 16 * 16);
  CHECK(mix64_seq({1, 2}) != mix64_seq({2, 1}));
}

TEST_CASE("Rng streams are deterministic per seed and differ across seeds") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t xa = a.next_u64(), xb = b.next_u64(), xc = c.next_u64();
    all_equal = all_equal && (xa == xb);
    any_diff = any_diff || (xa != xc);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("next_unit stays in (0, 1]") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.next_unit();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("next_below is within bounds and roughly uniform") {
  Rng rng(11);
  std::vector<int> counts(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto v = rng.next_below(10);
    REQUIRE(v < 10);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int count : counts) {
    CHECK(count > n / 10 - 600);  // ~6 sigma of binomial(n, 1/10)
    CHECK(count < n / 10 + 600);
  }
}

TEST_CASE("gaussian draws have standard-normal moments") {
  Rng rng(1234);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.next_gaussian();
    sum += z;
    sumsq += z * z;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.01);       // se ~ 1/sqrt(n) = 0.0022
  CHECK(std::fabs(var - 1.0) < 0.02);  // se ~ sqrt(2/n) = 0.0032
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> w = v;
  Rng a(5), b(5);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::multiset<int> elements(v.begin(), v.end());
  CHECK(elements == std::multiset<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
}
