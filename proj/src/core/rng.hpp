#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace odmtc {

// Deterministic RNG for split generation. mt19937_64 output is fixed by the
// standard; the bounded draw below is our own (rejection sampling), so the
// same seed yields the same splits on every platform. std::shuffle and
// std::uniform_int_distribution are implementation-defined and must not be
// used anywhere splits are made.
class SplitRng {
  public:
    explicit SplitRng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }

    // uniform in [0, bound), bound >= 1
    uint64_t below(uint64_t bound) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v = engine_();
        while (v >= limit)
            v = engine_();
        return v % bound;
    }

    template <typename T>
    void shuffle(std::vector<T> &v) {
        for (size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace odmtc
