#include <cmath>
#include <cstdint>
#include <set>

#include "doctest.h"
#include "pmol/rng.hpp"

using namespace pmol;

TEST_CASE("philox4x32-10 known-answer vectors") {
  uint32_t out[4];

  SUBCASE("all zeros") {
    Philox(0, 0).block(0, out);
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }

  SUBCASE("all ones") {
    Philox(0xffffffffffffffffull, 0xffffffffffffffffull).block(0xffffffffffffffffull, out);
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }

  SUBCASE("pi digits") {
    // counter = {243f6a88, 85a308d3, 13198a2e, 03707344}, key = {a4093822, 299f31d0}
    Philox(0x299f31d0a4093822ull, 0x0370734413198a2eull).block(0x85a308d3243f6a88ull, out);
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("uniforms live in [0,1) and are reproducible") {
  const Philox rng(42, 7);
  double u0, u1;
  for (uint64_t n = 0; n < 1000; ++n) {
    rng.uniform_pair(n, u0, u1);
    CHECK(u0 >= 0.0);
    CHECK(u0 < 1.0);
    CHECK(u1 >= 0.0);
    CHECK(u1 < 1.0);
  }
  const Philox again(42, 7);
  double v0, v1;
  rng.uniform_pair(123, u0, u1);
  again.uniform_pair(123, v0, v1);
  CHECK(u0 == v0);
  CHECK(u1 == v1);
}

TEST_CASE("normal pairs have the right first moments") {
  const Philox rng(9001, 0);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0, z0, z1;
  for (int i = 0; i < n; ++i) {
    rng.normal_pair(uint64_t(i), z0, z1);
    sum += z0 + z1;
    sum2 += z0 * z0 + z1 * z1;
  }
  const double mean = sum / (2.0 * n);
  const double var = sum2 / (2.0 * n) - mean * mean;
  CHECK(std::abs(mean) < 5e-3);
  CHECK(std::abs(var - 1.0) < 1e-2);
}

TEST_CASE("distinct streams are distinct") {
  const Philox a(1, 0), b(1, 1), c(2, 0);
  uint32_t oa[4], ob[4], oc[4];
  a.block(0, oa);
  b.block(0, ob);
  c.block(0, oc);
  CHECK(oa[0] != ob[0]);
  CHECK(oa[0] != oc[0]);
}
