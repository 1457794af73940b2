#pragma once

#include <complex>
#include <cstdint>

namespace rcsf {

/// Deterministic counter-style generator built on the splitmix64 finalizer.
/// The same seed yields the same draw sequence on every platform, and
/// substream(i) derives an independent generator keyed by (parent, i) so
/// per-sample streams can be consumed in any order.
class Rng {
public:
    explicit Rng(uint64_t seed);

    /// Independent stream for sample index `index`; does not disturb or
    /// depend on this generator's position.
    Rng substream(uint64_t index) const;

    uint64_t next_u64();
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)
    double normal();                        // N(0, 1); consumes two draws
    std::complex<double> cnormal();         // CN(0, 1): E|z|^2 = 1

private:
    Rng() = default;
    uint64_t key_ = 0;
    uint64_t counter_ = 0;
};

}  // namespace rcsf
