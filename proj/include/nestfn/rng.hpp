#pragma once

#include <cmath>
#include <cstdint>

namespace nestfn {

// Counter-based deterministic generator. Draw i of a stream with seed s is a
// pure function of (s, i):
//
//   word(s, i)    = mix(s + (i + 1) * 0x9E3779B97F4A7C15)
//   mix(z)        : z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//                   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
//   uniform(s, i) = (word(s, i) >> 11) * 2^-53          in [0, 1)
//
// All arithmetic is unsigned 64-bit with wraparound, so streams are
// reproducible across platforms and languages.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t word(std::uint64_t counter) const {
        std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform(std::uint64_t counter) const {
        return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + uniform(counter) * (hi - lo);
    }

    double log_uniform(std::uint64_t counter, double lo, double hi) const {
        return std::exp(uniform(counter, std::log(lo), std::log(hi)));
    }

    // Box-Muller from two counters; uses 1-u to keep the log argument in (0, 1].
    double normal(std::uint64_t counter_a, std::uint64_t counter_b) const {
        const double u1 = 1.0 - uniform(counter_a);
        const double u2 = uniform(counter_b);
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
};

// Sequential consumer over a CounterRng; callers that need parallel or
// resumable draws index the CounterRng directly instead.
class CounterStream {
  public:
    explicit CounterStream(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return rng_.uniform(next_++); }
    double uniform(double lo, double hi) { return rng_.uniform(next_++, lo, hi); }
    double log_uniform(double lo, double hi) { return rng_.log_uniform(next_++, lo, hi); }
    double normal() {
        const std::uint64_t a = next_++;
        const std::uint64_t b = next_++;
        return rng_.normal(a, b);
    }
    std::uint64_t word() { return rng_.word(next_++); }

    // Fisher-Yates permutation of 0..n-1.
    template <typename Vec>
    void permutation(std::size_t n, Vec& out) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(word() % i);
            std::swap(out[i - 1], out[j]);
        }
    }

    std::uint64_t consumed() const { return next_; }

  private:
    CounterRng rng_;
    std::uint64_t next_ = 0;
};

}  // namespace nestfn
