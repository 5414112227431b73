#pragma once

#include <cstdint>
#include <random>

namespace redsim {

/// Uniform random stream over the open interval (0, 1).
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// converts each 64-bit word to a double by hand so that results do not depend
/// on the standard library's uniform_real_distribution. One call to uniform()
/// consumes exactly one engine step.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        // 53 high bits, offset by half an ulp: never returns 0 or 1.
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Consumes one step.
    std::uint64_t below(std::uint64_t n) {
        auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive well-separated child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class StreamId : std::uint64_t { Arrivals = 1, ServerSelection = 2, JobSizes = 3 };

inline RandomStream child_stream(std::uint64_t master_seed, StreamId id) {
    return RandomStream(mix_seed(mix_seed(master_seed) ^ static_cast<std::uint64_t>(id)));
}

}  // namespace redsim
