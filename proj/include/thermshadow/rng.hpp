// Copyright 2026 The thermshadow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace thermshadow {

/// SplitMix64 finalizer; used to derive independent stream keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Key of sub-stream `index` under `parent`. Pure function of its inputs, so
/// work items can be processed in any order or on any thread.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(parent) ^ splitmix64(index ^ 0x5851f42d4c957f2dULL));
}

/// Explicit random stream. There is no global generator anywhere in the
/// library; every sampling routine takes one of these.
class Rng {
public:
    explicit Rng(std::uint64_t key) : key_(key), engine_(splitmix64(key)) {}

    static Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(derive_key(seed, index)); }

    std::uint64_t key() const noexcept { return key_; }

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound). Rejection keeps it exactly uniform.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do {
            r = next();
        } while (r >= limit);
        return r % bound;
    }

    /// `bits` uniformly random low bits (bits <= 64).
    std::uint64_t bits(int bits) {
        if (bits <= 0) return 0;
        const std::uint64_t r = next();
        return bits >= 64 ? r : (r & ((std::uint64_t{1} << bits) - 1));
    }

private:
    std::uint64_t key_;
    std::mt19937_64 engine_;
};

}  // namespace thermshadow
