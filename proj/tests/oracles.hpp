// Test-only oracles, deliberately independent of the library's code paths:
// exhaustive search, trial division and repeated multiplication only.
#pragma once

#include <cstdint>
#include <vector>

namespace oracles {

// All x in [0, m) with x*x = y (mod m).
inline std::vector<std::uint64_t> brute_force_roots(std::uint64_t y, std::uint64_t m) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 0; x < m; ++x)
        if ((x * x) % m == y % m) out.push_back(x);
    return out;
}

inline bool trial_division_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// base^exp (mod m) by repeated multiplication.
inline std::uint64_t slow_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t acc = 1 % m;
    for (std::uint64_t i = 0; i < exp; ++i) acc = (acc * (base % m)) % m;
    return acc;
}

// Legendre symbol by exhaustive QR search; Jacobi by multiplicativity over
// the trial-division factorization of n.
inline int legendre_by_search(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    for (std::uint64_t x = 1; x < p; ++x)
        if ((x * x) % p == a) return 1;
    return -1;
}

inline int jacobi_by_factoring(std::uint64_t a, std::uint64_t n) {
    int result = 1;
    for (std::uint64_t d = 3; n > 1; d += 2) {
        while (n % d == 0) {
            result *= legendre_by_search(a, d);
            n /= d;
        }
        if (d * d > n && n > 1) {
            result *= legendre_by_search(a, n);
            break;
        }
    }
    return result;
}

}  // namespace oracles
