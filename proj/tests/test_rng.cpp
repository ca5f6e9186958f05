#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>

#include "classo/rng.hpp"
#include "doctest.h"

using classo::derive_seed;
using classo::Rng;
using classo::splitmix64;

// The raw stream is mt19937_64, bit-exact by the standard; the frozen values
// below were reproduced by an independent implementation of the generator.
TEST_CASE("raw stream is pinned") {
  Rng rng(42);
  CHECK(rng.raw() == 13930160852258120406ULL);
  CHECK(rng.raw() == 11788048577503494824ULL);
  CHECK(rng.raw() == 13874630024467741450ULL);
}

TEST_CASE("uniform01 mapping is pinned") {
  // (raw >> 11) * 2^-53: exact double arithmetic
  Rng rng(42);
  CHECK(rng.uniform01() == 0.755155532954539);
  CHECK(rng.uniform01() == 0.6390313938546974);
  CHECK(rng.uniform01() == 0.7521452007480266);
  CHECK(rng.uniform01() == 0.13627268363243705);
}

TEST_CASE("uniform01 range") {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal and cnormal first draws are pinned") {
  // Box-Muller through libm transcendentals: pinned to 1e-12, not bitwise
  {
    Rng rng(42);
    CHECK(std::abs(rng.normal() - (-1.0771745442782885)) < 1e-12);
    CHECK(std::abs(rng.normal() - (-1.2860634502166481)) < 1e-12);  // cached spare
  }
  {
    Rng rng(42);
    const auto z = rng.cnormal(1.0);
    CHECK(std::abs(z.real() - (-0.7616774247807068)) < 1e-12);
    CHECK(std::abs(z.imag() - (-0.9093841866843598)) < 1e-12);
  }
}

TEST_CASE("moment sanity") {
  Rng rng(99);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0, cpow = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sumsq / n - 1.0) < 0.02);

  for (int i = 0; i < n; ++i) cpow += std::norm(rng.cnormal(2.0));
  CHECK(std::abs(cpow / n - 2.0) < 0.04);
}

TEST_CASE("seed derivation is pinned and collision free") {
  CHECK(splitmix64(0) == 16294208416658607535ULL);
  CHECK(derive_seed(1, 0) == 16834447057089888969ULL);
  CHECK(derive_seed(1, 1) == 17911839290282890590ULL);
  CHECK(derive_seed(42, 7) == 14737624668983934838ULL);

  // neighboring trials get unrelated streams
  for (std::uint64_t i = 0; i < 64; ++i) {
    for (std::uint64_t j = i + 1; j < 64; ++j) {
      CHECK(derive_seed(7, i) != derive_seed(7, j));
    }
  }
}

TEST_CASE("same seed same stream") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.raw() == b.raw());
  Rng c(124);
  CHECK(Rng(123).raw() != c.raw());
}
