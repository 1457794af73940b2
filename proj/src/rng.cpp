#include "rcsf/rng.hpp"

#include <cmath>
#include <numbers>

namespace rcsf {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(uint64_t seed) : key_(mix64(seed + kGolden)) {}

Rng Rng::substream(uint64_t index) const {
    Rng child;
    child.key_ = mix64(key_ ^ (0xD1B54A32D192ED03ULL + index * kGolden));
    return child;
}

uint64_t Rng::next_u64() {
    counter_ += 1;
    return mix64(key_ + counter_ * kGolden);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::normal() {
    // Box-Muller, fixed two-draw layout: no cached second value, so draw
    // sequences stay alignment-independent.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> Rng::cnormal() {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    double re = normal();
    double im = normal();
    return {re * inv_sqrt2, im * inv_sqrt2};
}

}  // namespace rcsf
