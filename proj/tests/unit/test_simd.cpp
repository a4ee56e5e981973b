#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <string>

#include "dtinspect/color.hpp"
#include "dtinspect/simd/kernels.hpp"

using namespace dtinspect;

namespace {

// Odd sizes exercise the scalar tails of every vector loop.
constexpr std::size_t kSizes[] = {0, 1, 7, 8, 15, 16, 17, 31, 33, 1000, 4099};

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar table is always available and first") {
  const auto all = simd::AvailableKernels();
  REQUIRE_FALSE(all.empty());
  CHECK(all.front() == &simd::ScalarKernels());
  CHECK_FALSE(simd::ActiveKernels().isa.empty());
  MESSAGE("active kernels: " << std::string(simd::ActiveKernels().isa));
}

TEST_CASE("scalar lab kernel matches the double-precision conversion") {
  std::vector<std::uint8_t> rgb;
  for (int r = 0; r < 256; r += 5)
    for (int g = 0; g < 256; g += 5)
      for (int b = 0; b < 256; b += 5) rgb.insert(rgb.end(), {std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)});
  const std::size_t n = rgb.size() / 3;
  std::vector<float> l(n), a(n), b(n);
  simd::ScalarKernels().rgb_to_lab(rgb.data(), l.data(), a.data(), b.data(), n);
  for (std::size_t i = 0; i < n; ++i) {
    const Lab ref = RgbToLab({rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]});
    CHECK(std::abs(l[i] - ref.l) < 1e-3);
    CHECK(std::abs(a[i] - ref.a) < 1e-3);
    CHECK(std::abs(b[i] - ref.b) < 1e-3);
  }
}

TEST_CASE("every available table agrees with scalar") {
  const simd::KernelTable &ref = simd::ScalarKernels();
  std::mt19937 rng(123);
  std::uniform_real_distribution<float> z(0.0f, 3000.0f);
  for (const simd::KernelTable *k : simd::AvailableKernels()) {
    CAPTURE(std::string(k->isa));
    for (std::size_t n : kSizes) {
      CAPTURE(n);
      std::vector<float> ra(n), rb(n);
      for (std::size_t i = 0; i < n; ++i) {
        ra[i] = z(rng);
        rb[i] = z(rng);
        switch (rng() % 9) {
          case 0: ra[i] = 0.0f; break;
          case 1: rb[i] = std::numeric_limits<float>::quiet_NaN(); break;
          case 2: ra[i] = std::numeric_limits<float>::infinity(); break;
          case 3: rb[i] = -5.0f; break;
          default: break;
        }
      }
      std::vector<float> o1(n, -1), o2(n, -2);
      std::vector<std::uint8_t> v1(n, 7), v2(n, 9);
      ref.depth_abs_diff(ra.data(), rb.data(), o1.data(), v1.data(), n);
      k->depth_abs_diff(ra.data(), rb.data(), o2.data(), v2.data(), n);
      CHECK(std::memcmp(o1.data(), o2.data(), n * sizeof(float)) == 0);
      CHECK(v1 == v2);

      std::vector<std::uint8_t> t1(n, 3), t2(n, 4);
      ref.threshold(o1.data(), v1.data(), 750.0f, t1.data(), n);
      k->threshold(o1.data(), v1.data(), 750.0f, t2.data(), n);
      CHECK(t1 == t2);
      if (n > 0) {
        // Boundary: a value equal to tau is set.
        std::vector<float> eq(n, 750.0f);
        std::vector<std::uint8_t> ones(n, 1), bits(n, 0);
        k->threshold(eq.data(), ones.data(), 750.0f, bits.data(), n);
        CHECK(std::all_of(bits.begin(), bits.end(), [](std::uint8_t x) { return x == 1; }));
      }

      std::vector<std::uint8_t> ca(3 * n), cb(3 * n), mask(n);
      for (auto &c : ca) c = static_cast<std::uint8_t>(rng());
      for (auto &c : cb) c = static_cast<std::uint8_t>(rng());
      for (auto &m : mask) m = rng() % 4 ? 1 : 0;
      std::vector<float> l1(n), a1(n), b1(n), l2(n), a2(n), b2(n);
      ref.rgb_to_lab(ca.data(), l1.data(), a1.data(), b1.data(), n);
      k->rgb_to_lab(ca.data(), l2.data(), a2.data(), b2.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(l1[i] - l2[i]) <= 1e-3f);
        CHECK(std::abs(a1[i] - a2[i]) <= 1e-3f);
        CHECK(std::abs(b1[i] - b2[i]) <= 1e-3f);
      }
      std::vector<float> e1(n, -1), e2(n, -2);
      std::vector<std::uint8_t> ev1(n, 5), ev2(n, 6);
      ref.delta_e76(ca.data(), cb.data(), mask.data(), e1.data(), ev1.data(), n);
      k->delta_e76(ca.data(), cb.data(), mask.data(), e2.data(), ev2.data(), n);
      CHECK(ev1 == ev2);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(e1[i] - e2[i]) <= 1e-3f);
        if (!mask[i]) CHECK(e2[i] == 0.0f);
      }
    }
  }
}

}  // TEST_SUITE
