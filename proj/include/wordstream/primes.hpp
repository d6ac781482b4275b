#pragma once

#include <cstdint>

#include "wordstream/bigint.hpp"
#include "wordstream/rng.hpp"

namespace wordstream {

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

// Miller-Rabin: exact below 2^64, otherwise 41 random bases (error below 2^-80).
bool is_probable_prime(const BigInt& n, Rng& rng);

// Prime drawn uniformly from the primes in [lo, hi] by rejection sampling.
// Throws ConstructionError when the range holds no prime.
BigInt sample_prime(const BigInt& lo, const BigInt& hi, Rng& rng);

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m);

}  // namespace wordstream
