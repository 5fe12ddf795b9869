#pragma once

#include <cstdint>

#include "zo/vec.hpp"

namespace zo {

// Counter-based splittable RNG. Output is a pure function of
// (seed, stream_id, counter), so any sample can be regenerated in isolation
// and batch members can run in any order, or in parallel, with identical
// results. Core transform is the splitmix64 finalizer.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    // Child stream i; independent of the parent and of other children.
    RngStream split(std::uint64_t i) const;

    std::uint64_t next_u64();
    // Uniform on [0,1) with 53 random bits.
    double next_uniform();
    // Uniform on [lo, hi).
    double next_uniform(double lo, double hi);
    // Standard normal via the Marsaglia polar method.
    double next_gaussian();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace zo
