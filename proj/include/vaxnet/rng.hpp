/*
 * Copyright (C) 2026 The vaxnet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef VAXNET_RNG_HPP
#define VAXNET_RNG_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <string_view>
#include <vector>

namespace vaxnet::rng
{

/// Labels for the elements of a stream derivation path.
enum class Label : std::uint64_t {
    Village = 1,
    Strategy,
    Variant,
    Run,
    Node,
    Fold,
    Sample,
    Truncation,
    Selection,
    Epidemic,
    Chain,
    User,
};

struct PathElement {
    Label label;
    std::uint64_t value;

    bool operator==(PathElement const&) const = default;
};

/// Master seed plus an ordered path of labeled integers.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::vector<PathElement> path;

    StreamKey extended(Label label, std::uint64_t value) const;
    bool operator==(StreamKey const&) const = default;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Stable 64-bit value for a string (FNV-1a, then mixed), for use as a path
/// element such as a village id.
std::uint64_t hash_string(std::string_view s) noexcept;

/*!
 * Counter-based random stream.
 *
 * The stream is fully determined by a 64-bit digest of its key; draw i is a
 * bijective mix of (digest + i * increment), so any stream can be re-created
 * at any time from its key alone. Child streams are derived from the digest,
 * never from the draw counter, so split(a).split(b) equals derive({a, b}).
 *
 * Satisfies UniformRandomBitGenerator, but the helpers below are preferred
 * because they produce the same values on every standard library.
 */
class Stream
{
  public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t digest) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept;

    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t uniform_below(std::uint64_t bound) noexcept;
    /// Uniform real in [0, 1) with 53 random bits.
    double uniform_real() noexcept;
    bool bernoulli(double p) noexcept;

    template <class T>
    void shuffle(std::span<T> items) noexcept
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(uniform_below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

    /// Moves a uniform random k-subset to the front of items, in random order.
    template <class T>
    void partial_shuffle(std::span<T> items, std::size_t k) noexcept
    {
        auto n = items.size();
        if (k > n)
            k = n;
        for (std::size_t i = 0; i < k; ++i) {
            auto j = i + static_cast<std::size_t>(uniform_below(n - i));
            using std::swap;
            swap(items[i], items[j]);
        }
    }

    Stream split(Label label, std::uint64_t value) const noexcept;

    std::uint64_t digest() const noexcept { return digest_; }

  private:
    std::uint64_t digest_;
    std::uint64_t increment_;
    std::uint64_t counter_ = 0;
};

Stream derive_stream(StreamKey const& key) noexcept;

/// Indices 0..n-1 in uniformly random order.
std::vector<std::uint32_t> random_permutation(std::size_t n, Stream& stream);

} // namespace vaxnet::rng

#endif
