#include <doctest.h>

#include <cmath>

#include "deltasim/rng.hpp"

using namespace deltasim;

TEST_CASE("streams are deterministic and key-separated") {
  RandomStream a(mix_key(1, 2, 3, 4));
  RandomStream b(mix_key(1, 2, 3, 4));
  RandomStream c(mix_key(1, 2, 3, 5));
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    all_equal = all_equal && va == b.next_u64();
    any_diff = any_diff || va != c.next_u64();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform draws stay in (0, 1)") {
  RandomStream s(99);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.next_uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal draws have the requested moments") {
  RandomStream s(7);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.next_normal(0.0, 0.5);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double stddev = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.01);
  CHECK(stddev == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("fnv1a64 separates ids") {
  CHECK(fnv1a64("scenario-a") != fnv1a64("scenario-b"));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
}
