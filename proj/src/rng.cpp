#include "cggm/rng.hpp"

#include <cmath>

namespace cggm {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0,
                         std::uint32_t k1) noexcept {
    const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
    const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
    : stream_(stream),
      key0_(std::uint32_t(seed)),
      key1_(std::uint32_t(seed >> 32)) {}

void Philox4x32::refill() noexcept {
    buf_ = {std::uint32_t(block_), std::uint32_t(block_ >> 32),
            std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int r = 0; r < 10; ++r) {
        philox_round(buf_, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    ++block_;
    pos_ = 0;
}

std::uint32_t Philox4x32::next_u32() noexcept {
    if (pos_ == 4) refill();
    return buf_[pos_++];
}

std::uint64_t Philox4x32::next_u64() noexcept {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double Philox4x32::next_unit() noexcept {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double Philox4x32::next_uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_unit();
}

double Philox4x32::next_normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    // Marsaglia polar: accept (u,v) in the open unit disk, s = u^2+v^2.
    double u, v, s;
    do {
        u = 2.0 * next_unit() - 1.0;
        v = 2.0 * next_unit() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    has_spare_ = true;
    return u * f;
}

int Philox4x32::next_weighted(const double* weights, int n) noexcept {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += weights[i];
    const double target = next_unit() * total;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += weights[i];
        if (target < acc) return i;
    }
    return n - 1;  // total mass rounding; only reachable by fp roundoff
}

}  // namespace cggm
