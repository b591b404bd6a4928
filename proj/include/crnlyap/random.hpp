#ifndef CRNLYAP_RANDOM_HPP
#define CRNLYAP_RANDOM_HPP

#include <cmath>
#include <cstdint>

namespace crnlyap {

/// Counter-based 64-bit generator: output k is the splitmix64 finalizer of
/// seed + k * golden. Reproducible across platforms, and stream k can be
/// reached without generating the earlier outputs.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) : seed_(seed), counter_(counter) {}

    std::uint64_t next() { return mix(seed_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open0() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Exponential with the given rate, by inversion.
    double exponential(double rate) { return -std::log(uniform_open0()) / rate; }

    std::uint64_t counter() const noexcept { return counter_; }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace crnlyap

#endif  // CRNLYAP_RANDOM_HPP
