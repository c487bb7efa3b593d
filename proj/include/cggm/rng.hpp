#pragma once

#include <array>
#include <cstdint>

namespace cggm {

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
// All state updates are integer arithmetic, so a (seed, stream) pair yields
// the same sequence on every platform. Distinct stream ids give statistically
// independent sequences for the same seed, which is how the harness separates
// graph generation, noise variances, and data draws within one replication.
//
// Normal deviates use the Marsaglia polar method on 53-bit uniforms; the
// transform is documented here rather than delegated to std::normal_distribution,
// whose output sequence the C++ standard leaves unspecified.
class Philox4x32 {
public:
    explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    // Uniform on [0,1) with 53 random mantissa bits.
    double next_unit() noexcept;

    // Uniform on [lo, hi).
    double next_uniform(double lo, double hi) noexcept;

    // Standard normal deviate.
    double next_normal() noexcept;

    // Index into [0, n) proportional to weights[i] >= 0. Consumes one uniform.
    int next_weighted(const double* weights, int n) noexcept;

private:
    void refill() noexcept;

    std::array<std::uint32_t, 4> buf_{};
    std::uint64_t block_ = 0;
    std::uint64_t stream_;
    std::uint32_t key0_, key1_;
    int pos_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cggm
