#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pmol {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair selects an
/// independent stream; the 64-bit draw index addresses 128-bit blocks at
/// random, so concurrent runs never share generator state.
class Philox {
 public:
  Philox(uint64_t seed, uint64_t stream)
      : key0_(uint32_t(seed)),
        key1_(uint32_t(seed >> 32)),
        c2_(uint32_t(stream)),
        c3_(uint32_t(stream >> 32)) {}

  void block(uint64_t n, uint32_t out[4]) const {
    uint32_t c0 = uint32_t(n), c1 = uint32_t(n >> 32), c2 = c2_, c3 = c3_;
    uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      const uint64_t p0 = uint64_t(0xD2511F53u) * c0;
      const uint64_t p1 = uint64_t(0xCD9E8D57u) * c2;
      const uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
      const uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
      const uint32_t n0 = hi1 ^ c1 ^ k0;
      const uint32_t n1 = lo1;
      const uint32_t n2 = hi0 ^ c3 ^ k1;
      const uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
  }

  /// Two uniforms in [0,1) from block n.
  void uniform_pair(uint64_t n, double& u0, double& u1) const {
    uint32_t w[4];
    block(n, w);
    const uint64_t a = (uint64_t(w[1]) << 32) | w[0];
    const uint64_t b = (uint64_t(w[3]) << 32) | w[2];
    u0 = double(a >> 11) * 0x1.0p-53;
    u1 = double(b >> 11) * 0x1.0p-53;
  }

  /// Two independent standard normals from block n (Box-Muller).
  void normal_pair(uint64_t n, double& z0, double& z1) const {
    double u0, u1;
    uniform_pair(n, u0, u1);
    if (u0 <= 0.0) u0 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u0));
    const double phi = 2.0 * std::numbers::pi * u1;
    z0 = r * std::cos(phi);
    z1 = r * std::sin(phi);
  }

 private:
  uint32_t key0_, key1_, c2_, c3_;
};

}  // namespace pmol
