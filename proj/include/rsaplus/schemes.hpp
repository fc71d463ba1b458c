#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "rsaplus/bigint.hpp"
#include "rsaplus/keys.hpp"
#include "rsaplus/modarith.hpp"
#include "rsaplus/primes.hpp"

namespace rsaplus::schemes {

using keys::RabinKeyPair;
using keys::RsaKeyPair;
using keys::RsaPlusCiphertext;
using keys::RsaPlusPrivateKey;
using keys::RsaPlusPublicKey;

enum class ExponentMode { naive, fast, williams };

// Constants of the fast sampler. The production profile is the published
// parameter set (ell0 in [2^150, 2^190]); the toy profile scales the range
// and the two affine constants down so that desk-scale moduli admit a
// nonempty k-interval. In both profiles c1 = lo_bits - 2 and
// c2 = hi_bits - 2, which is what makes sqrt(n) < ell0 * ell1^k < n.
struct ExponentProfile {
    unsigned ell0_lo_bits;
    unsigned ell0_hi_bits;
    long c1;
    long c2;

    static ExponentProfile production() { return {150, 190, 148, 188}; }
    static ExponentProfile toy() { return {4, 6, 2, 4}; }
};

struct ExponentSample {
    BigInt x;
    ExponentMode mode;
    std::optional<BigInt> ell0;  // fast mode only
    std::optional<unsigned> k;   // fast mode only
};

namespace detail {

inline BigInt isqrt(const BigInt& n) {
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline void require_unit(const BigInt& v, const BigInt& n, const char* what) {
    BigInt g;
    mpz_gcd(g.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    if (g != 1) throw NotCoprime(what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Textbook RSA
// ---------------------------------------------------------------------------

inline BigInt rsa_encrypt(const BigInt& m, const keys::RsaPublicKey& pub) {
    detail::require_unit(m, pub.n, "rsa_encrypt: gcd(m, n) != 1");
    return modarith::mod_pow(m, pub.e, pub.n);
}

// Textbook decryption, deliberately without the CRT shortcut: RSA here is the
// baseline the RSA+ timings are compared against.
inline BigInt rsa_decrypt(const BigInt& c, const RsaKeyPair& key) {
    detail::require_unit(c, key.n, "rsa_decrypt: gcd(c, n) != 1");
    return modarith::mod_pow(c, key.d, key.n);
}

// ---------------------------------------------------------------------------
// Rabin
// ---------------------------------------------------------------------------

inline BigInt rabin_encrypt(const BigInt& m, const BigInt& n) {
    detail::require_unit(m, n, "rabin_encrypt: gcd(m, n) != 1");
    return (m * m) % n;
}

// All four roots; a parity hint narrows the result to the two roots of the
// stated parity (n odd, so r and n-r always differ in parity).
inline std::vector<BigInt> rabin_decrypt(const BigInt& c, const RabinKeyPair& key,
                                         std::optional<int> parity_hint = std::nullopt) {
    detail::require_unit(c, key.n, "rabin_decrypt: gcd(c, n) != 1");
    modarith::RootSet roots = modarith::sqrt_mod_n(c, key.p, key.q);
    if (!parity_hint) return roots.roots;
    std::vector<BigInt> filtered;
    for (const BigInt& r : roots.roots)
        if (static_cast<int>(mpz_fdiv_ui(r.get_mpz_t(), 2)) == *parity_hint)
            filtered.push_back(r);
    return filtered;
}

// ---------------------------------------------------------------------------
// RSA+ exponent sampling
// ---------------------------------------------------------------------------

// x is a probable prime in (sqrt(n), n); expensive, kept as the baseline.
inline ExponentSample sample_exponent_naive(const BigInt& n, const primes::PrimalityConfig& cfg,
                                            Rng& rng) {
    if (n < 10) throw DomainError("sample_exponent_naive: n too small");
    BigInt lo = detail::isqrt(n) + 1;
    // At toy scale a sampled prime can be the larger key prime itself.
    auto coprime_with_n = [&n](const BigInt& v) { return mpz_divisible_p(n.get_mpz_t(), v.get_mpz_t()) == 0; };
    BigInt x = primes::random_prime_in(lo, n - 1, coprime_with_n, cfg, rng);
    return {x, ExponentMode::naive, std::nullopt, std::nullopt};
}

// x = ell0 * ell1^k with ell0 a random prime from the profile range and k
// drawn so that sqrt(n) < x < n. The encryptor holds only n, so the
// bit-length parameter is derived as floor(bits(n)/2) - 1.
inline ExponentSample sample_exponent_fast(const BigInt& n, const BigInt& ell1,
                                           const ExponentProfile& profile,
                                           const primes::PrimalityConfig& cfg, Rng& rng) {
    const long b = static_cast<long>(bit_length(n) / 2) - 1;
    const double log2_ell1 = std::log2(ell1.get_d());
    const long k_lo = static_cast<long>(std::floor((static_cast<double>(b) - profile.c1) / log2_ell1)) + 1;
    const long k_hi = static_cast<long>(std::floor((1.5 * static_cast<double>(b) - profile.c2) / log2_ell1));
    if (k_lo > k_hi || k_lo < 1)
        throw RangeEmpty("sample_exponent_fast: empty k-interval for this modulus size");

    const BigInt sqrt_n = detail::isqrt(n);
    for (int attempt = 0; attempt < 64; ++attempt) {
        unsigned k = static_cast<unsigned>(
            k_lo + rng.below(BigInt(static_cast<unsigned long>(k_hi - k_lo + 1))).get_ui());
        BigInt ell0 = primes::random_prime_in(pow2(profile.ell0_lo_bits), pow2(profile.ell0_hi_bits),
                                              nullptr, cfg, rng);
        BigInt x = ell0;
        for (unsigned i = 0; i < k; ++i) x *= ell1;
        if (x <= sqrt_n || x >= n) continue;  // cannot happen for in-profile sizes
        BigInt g;
        mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), n.get_mpz_t());
        if (g != 1) continue;  // toy-scale ell0 may collide with a key prime
        return {x, ExponentMode::fast, ell0, k};
    }
    throw Exhausted("sample_exponent_fast: no in-range x found");
}

// Williams-style sampling: x is a square mod n, so the key holder can single
// out x among the four roots of y when p = q = 3 (mod 4).
inline ExponentSample sample_exponent_qr(const BigInt& n, const primes::PrimalityConfig& cfg,
                                         Rng& rng) {
    const BigInt sqrt_n = detail::isqrt(n);
    for (std::uint64_t attempt = 0; attempt < cfg.attempt_budget; ++attempt) {
        BigInt w = rng.in_range(BigInt(2), n - 1);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), w.get_mpz_t(), n.get_mpz_t());
        if (g != 1) continue;
        BigInt x = (w * w) % n;
        if (mpz_even_p(x.get_mpz_t())) continue;
        if (x <= sqrt_n || x >= n) continue;
        return {x, ExponentMode::williams, std::nullopt, std::nullopt};
    }
    throw Exhausted("sample_exponent_qr: attempt budget exceeded");
}

// ---------------------------------------------------------------------------
// RSA+
// ---------------------------------------------------------------------------

struct DecryptionCandidate {
    BigInt m;       // recovered plaintext, m = c^u mod n
    BigInt x_used;  // the odd square root of y that produced it
    BigInt u;       // x_used^-1 mod phi(n)
};

// (c, y) = (m^x, x^2) mod n for a given exponent. Exposed separately so
// tests can force x; the CLI never does.
inline RsaPlusCiphertext rsaplus_encrypt_with(const BigInt& m, const BigInt& n, const BigInt& x) {
    detail::require_unit(m, n, "rsaplus_encrypt: gcd(m, n) != 1");
    detail::require_unit(x, n, "rsaplus_encrypt: gcd(x, n) != 1");
    return {modarith::mod_pow(m, x, n), (x * x) % n};
}

inline ExponentSample sample_exponent(const RsaPlusPublicKey& pub, ExponentMode mode,
                                      const ExponentProfile& profile,
                                      const primes::PrimalityConfig& cfg, Rng& rng) {
    switch (mode) {
        case ExponentMode::naive: return sample_exponent_naive(pub.n, cfg, rng);
        case ExponentMode::fast: return sample_exponent_fast(pub.n, pub.ell1, profile, cfg, rng);
        case ExponentMode::williams: return sample_exponent_qr(pub.n, cfg, rng);
    }
    throw DomainError("sample_exponent: bad mode");
}

inline RsaPlusCiphertext rsaplus_encrypt(const BigInt& m, const RsaPlusPublicKey& pub,
                                         ExponentMode mode, const ExponentProfile& profile,
                                         const primes::PrimalityConfig& cfg, Rng& rng) {
    ExponentSample s = sample_exponent(pub, mode, profile, cfg, rng);
    return rsaplus_encrypt_with(m, pub.n, s.x);
}

inline RsaPlusCiphertext rsaplus_encrypt_qr(const BigInt& m, const RsaPlusPublicKey& pub,
                                            const primes::PrimalityConfig& cfg, Rng& rng) {
    return rsaplus_encrypt(m, pub, ExponentMode::williams, ExponentProfile::toy(), cfg, rng);
}

// Of the four roots of y exactly two are odd (n odd); only those can be
// inverted mod phi(n). Returns 1 or 2 candidates sorted by x_used.
inline std::vector<DecryptionCandidate> rsaplus_decrypt(const RsaPlusCiphertext& ct,
                                                        const RsaPlusPrivateKey& priv) {
    const BigInt n = priv.n();
    detail::require_unit(ct.c, n, "rsaplus_decrypt: gcd(c, n) != 1");
    detail::require_unit(ct.y, n, "rsaplus_decrypt: gcd(y, n) != 1");
    modarith::RootSet roots = modarith::sqrt_mod_n(ct.y, priv.p, priv.q);
    std::vector<DecryptionCandidate> out;
    for (const BigInt& root : roots.roots) {
        if (mpz_even_p(root.get_mpz_t())) continue;
        auto inv = modarith::mod_inv(root, priv.phi);
        if (!inv.ok) continue;
        out.push_back({modarith::crt_pow(ct.c, inv.value, priv.p, priv.q), root, inv.value});
    }
    if (out.empty())
        throw NoInvertibleRoot("rsaplus_decrypt: no odd root of y is coprime with phi(n)");
    return out;
}

// Williams-variant decryption: the unique root of y that is a quadratic
// residue mod both primes is x itself.
inline DecryptionCandidate rsaplus_decrypt_qr(const RsaPlusCiphertext& ct,
                                              const RsaPlusPrivateKey& priv) {
    if (mpz_fdiv_ui(priv.p.get_mpz_t(), 4) != 3 || mpz_fdiv_ui(priv.q.get_mpz_t(), 4) != 3)
        throw WrongKeyShape("rsaplus_decrypt_qr: requires p = q = 3 (mod 4)");
    const BigInt n = priv.n();
    detail::require_unit(ct.c, n, "rsaplus_decrypt_qr: gcd(c, n) != 1");
    detail::require_unit(ct.y, n, "rsaplus_decrypt_qr: gcd(y, n) != 1");
    modarith::RootSet roots = modarith::sqrt_mod_n(ct.y, priv.p, priv.q);
    for (const BigInt& root : roots.roots) {
        if (modarith::mod_pow(root % priv.p, (priv.p - 1) / 2, priv.p) != 1) continue;
        if (modarith::mod_pow(root % priv.q, (priv.q - 1) / 2, priv.q) != 1) continue;
        auto inv = modarith::mod_inv(root, priv.phi);
        if (!inv.ok)
            throw NoInvertibleRoot("rsaplus_decrypt_qr: the QR root shares a factor with phi(n)");
        return {modarith::crt_pow(ct.c, inv.value, priv.p, priv.q), root, inv.value};
    }
    throw NotAResidue("rsaplus_decrypt_qr: no root of y is a square mod both primes");
}

}  // namespace rsaplus::schemes
