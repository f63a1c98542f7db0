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
#include "vaxnet/rng.hpp"

#include <numeric>

namespace vaxnet::rng
{
namespace
{
constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t fold(std::uint64_t digest, PathElement e) noexcept
{
    auto tag = mix64(static_cast<std::uint64_t>(e.label) * 0xd1342543de82ef95ULL
                     + 0x632be59bd9b4e019ULL);
    return mix64(digest ^ mix64(tag + e.value * golden_gamma));
}

std::uint64_t increment_for(std::uint64_t digest) noexcept
{
    // Odd, and with enough bit transitions to avoid weak Weyl sequences.
    auto z = mix64(digest ^ 0xbf58476d1ce4e5b9ULL) | 1ULL;
    auto transitions = __builtin_popcountll(z ^ (z >> 1));
    if (transitions < 24)
        z ^= 0xaaaaaaaaaaaaaaaaULL;
    return z;
}
} // namespace

std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t hash_string(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return mix64(h);
}

StreamKey StreamKey::extended(Label label, std::uint64_t value) const
{
    StreamKey out = *this;
    out.path.push_back({label, value});
    return out;
}

Stream::Stream(std::uint64_t digest) noexcept
    : digest_{digest}, increment_{increment_for(digest)}
{
}

Stream::result_type Stream::operator()() noexcept
{
    ++counter_;
    return mix64(digest_ + counter_ * increment_);
}

std::uint64_t Stream::uniform_below(std::uint64_t bound) noexcept
{
    // Lemire's nearly-divisionless bounded draw.
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>((*this)()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Stream::uniform_real() noexcept
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

bool Stream::bernoulli(double p) noexcept
{
    if (p <= 0.0)
        return false;
    if (p >= 1.0)
        return true;
    return uniform_real() < p;
}

Stream Stream::split(Label label, std::uint64_t value) const noexcept
{
    return Stream{fold(digest_, {label, value})};
}

Stream derive_stream(StreamKey const& key) noexcept
{
    auto digest = mix64(key.master_seed ^ 0x2545f4914f6cdd1dULL);
    for (auto const& e : key.path)
        digest = fold(digest, e);
    return Stream{digest};
}

std::vector<std::uint32_t> random_permutation(std::size_t n, Stream& stream)
{
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0U);
    stream.shuffle(std::span{order});
    return order;
}

} // namespace vaxnet::rng
