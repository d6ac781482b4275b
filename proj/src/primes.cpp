#include "wordstream/primes.hpp"

#include <array>
#include <vector>

#include "wordstream/errors.hpp"

namespace wordstream {

namespace {

constexpr std::array<std::uint32_t, 25> kSmallPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                                        29, 31, 37, 41, 43, 47, 53, 59, 61,
                                                        67, 71, 73, 79, 83, 89, 97};

bool mr_round_u64(std::uint64_t n, std::uint64_t a, std::uint64_t d, unsigned s) {
  std::uint64_t x = powmod_u64(a % n, d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned r = 1; r < s; ++r) {
    x = mulmod_u64(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint32_t p : kSmallPrimes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL})
    if (!mr_round_u64(n, a, d, s)) return false;
  return true;
}

bool is_probable_prime(const BigInt& n, Rng& rng) {
  if (n < 2) return false;
  if (fits_u64(n)) return is_prime_u64(static_cast<std::uint64_t>(n));
  for (std::uint32_t p : kSmallPrimes)
    if (n % p == 0) return false;
  BigInt d = n - 1;
  unsigned s = 0;
  while (!boost::multiprecision::bit_test(d, 0)) {
    d >>= 1;
    ++s;
  }
  const BigInt n1 = n - 1;
  for (int round = 0; round < 41; ++round) {
    BigInt a = rng.between(BigInt(2), BigInt(n - 2));
    BigInt x = boost::multiprecision::powm(a, d, n);
    if (x == 1 || x == n1) continue;
    bool witness = true;
    for (unsigned r = 1; r < s; ++r) {
      x = x * x % n;
      if (x == n1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

BigInt sample_prime(const BigInt& lo, const BigInt& hi, Rng& rng) {
  if (lo < 2 || hi < lo) throw ConstructionError("sample_prime: invalid range");
  BigInt width = hi - lo + 1;
  if (width <= 4096) {
    std::vector<BigInt> primes;
    for (BigInt x = lo; x <= hi; ++x)
      if (is_probable_prime(x, rng)) primes.push_back(x);
    if (primes.empty()) throw ConstructionError("sample_prime: no prime in range");
    return primes[rng.below(static_cast<std::uint64_t>(primes.size()))];
  }
  // Density of primes is about 1/ln(hi); the cap is far beyond any realistic run.
  std::uint64_t cap = 1000ULL * (bit_length(hi) + 8);
  for (std::uint64_t attempt = 0; attempt < cap; ++attempt) {
    BigInt x = rng.between(lo, hi);
    if (is_probable_prime(x, rng)) return x;
  }
  throw ConstructionError("sample_prime: no prime found in range");
}

}  // namespace wordstream
