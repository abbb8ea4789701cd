#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rankstab {

// Error taxonomy mapped to CLI exit codes: config 2, data 3, numeric 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ConfigError : public Error {
public:
    using Error::Error;
};
class DataError : public Error {
public:
    using Error::Error;
};
class NumericError : public Error {
public:
    using Error::Error;
};

// Non-owning view of a row-major matrix.
struct MatrixView {
    const double* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;

    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    const double* row(std::size_t i) const { return data + i * cols; }
    bool empty() const { return rows == 0; }
};

// Thread-safe collector for non-fatal diagnostics (clamped hyperparameters,
// skipped groups, convergence fallbacks).
class WarningSink {
public:
    void add(std::string msg) {
        std::lock_guard<std::mutex> lock(mutex_);
        messages_.push_back(std::move(msg));
    }
    std::vector<std::string> messages() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return messages_;
    }
    bool empty() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return messages_.empty();
    }

private:
    mutable std::mutex mutex_;
    std::vector<std::string> messages_;
};

inline void warn(WarningSink* sink, std::string msg) {
    if (sink) sink->add(std::move(msg));
}

// --- seed derivation ---------------------------------------------------
//
// Run seeds are derived from the master seed by mixing a stream name and a
// counter through splitmix64. Name-keyed streams keep seeds stable when new
// rankers or classifiers are added to a configuration.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t counter) {
    return splitmix64(splitmix64(master ^ fnv1a64(stream)) + counter);
}

// --- deterministic RNG --------------------------------------------------
//
// xoshiro-free, stdlib-distribution-free generator: all draws are written
// out explicitly so results do not depend on the standard library's
// distribution implementations.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x8e1f0c5a2d94b3e7ULL)) {
        // warm up so nearby seeds decorrelate
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() {
        state_ = splitmix64(state_);
        return state_;
    }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, n)
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t range = n;
        const std::uint64_t scaling = UINT64_MAX / range;
        const std::uint64_t past = range * scaling;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= past);
        return static_cast<std::size_t>(x / scaling);
    }

    // standard normal via Box-Muller (cosine branch only, stateless)
    double normal() {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    bool bernoulli(double prob) { return uniform01() < prob; }

    // number of successes in two Bernoulli(q) trials (genotype draw)
    int binomial2(double q) { return (bernoulli(q) ? 1 : 0) + (bernoulli(q) ? 1 : 0); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), returned in ascending order
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::uint64_t state_;
};

// --- deterministic parallel loop -----------------------------------------
//
// Runs fn(i) for i in [0, n). Each index owns its output slot, so the result
// is identical for any thread count. threads == 0 means hardware concurrency.

unsigned resolve_threads(unsigned requested);
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace rankstab
