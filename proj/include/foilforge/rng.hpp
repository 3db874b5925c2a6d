#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace foilforge {

/// SplitMix64 finalizer; used to derive independent stream seeds from (seed, tag) pairs.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic generator shared by initialization and shuffling.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++ standard.
/// Distributions are implemented here (not with <random> distributions, whose
/// algorithms are implementation-defined) so draws are identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, bound) by rejection sampling; bound > 0.
    std::uint64_t below(std::uint64_t bound);
    /// Standard normal via the Box-Muller transform.
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace foilforge
