#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "rsaplus/bigint.hpp"

namespace rsaplus::modarith {

// Square roots of a fixed target modulo a fixed modulus, sorted ascending.
struct RootSet {
    std::vector<BigInt> roots;
    BigInt modulus;
};

// Left-to-right square-and-multiply.
inline BigInt mod_pow(const BigInt& base, const BigInt& exponent, const BigInt& modulus) {
    if (modulus < 2) throw InvalidModulus("mod_pow: modulus must be >= 2");
    if (exponent < 0) throw DomainError("mod_pow: negative exponent");
    BigInt b = base % modulus;
    if (b < 0) b += modulus;
    BigInt acc(1);
    const std::size_t nbits = bit_length(exponent);
    for (std::size_t i = nbits; i-- > 0;) {
        acc = (acc * acc) % modulus;
        if (mpz_tstbit(exponent.get_mpz_t(), i)) acc = (acc * b) % modulus;
    }
    return acc;
}

struct InverseResult {
    bool ok;
    BigInt value;  // inverse in [0, modulus) when ok
    BigInt gcd;    // > 1 exactly when !ok
};

// Extended Euclid. Non-invertibility is a normal outcome here: RSA+
// decryption uses the gcd as a root filter.
inline InverseResult mod_inv(const BigInt& a, const BigInt& modulus) {
    if (modulus < 2) throw InvalidModulus("mod_inv: modulus must be >= 2");
    BigInt reduced = a % modulus;
    if (reduced < 0) reduced += modulus;
    BigInt g, s;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), nullptr, reduced.get_mpz_t(), modulus.get_mpz_t());
    if (g != 1) return {false, BigInt(0), g};
    BigInt inv = s % modulus;
    if (inv < 0) inv += modulus;
    return {true, inv, BigInt(1)};
}

// Jacobi symbol (a/n) by the quadratic reciprocity iteration.
inline int jacobi(const BigInt& a_in, const BigInt& n_in) {
    if (n_in < 1 || mpz_even_p(n_in.get_mpz_t()))
        throw InvalidModulus("jacobi: n must be odd and positive");
    BigInt a = a_in % n_in;
    if (a < 0) a += n_in;
    BigInt n = n_in;
    int result = 1;
    while (a != 0) {
        while (mpz_even_p(a.get_mpz_t())) {
            a >>= 1;
            unsigned long n_mod_8 = mpz_fdiv_ui(n.get_mpz_t(), 8);
            if (n_mod_8 == 3 || n_mod_8 == 5) result = -result;
        }
        std::swap(a, n);
        if (mpz_fdiv_ui(a.get_mpz_t(), 4) == 3 && mpz_fdiv_ui(n.get_mpz_t(), 4) == 3)
            result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

namespace detail {

inline void require_residue(const BigInt& y, const BigInt& p) {
    if (mod_pow(y, (p - 1) / 2, p) != 1)
        throw NotAResidue("not a quadratic residue modulo the given prime");
}

inline RootSet pair_roots(BigInt r, const BigInt& p) {
    r %= p;
    if (r < 0) r += p;
    BigInt other = (p - r) % p;
    RootSet out;
    out.modulus = p;
    if (r == other) {
        out.roots = {r};
    } else {
        out.roots = {std::min(r, other), std::max(r, other)};
    }
    return out;
}

}  // namespace detail

// p ≡ 3 (mod 4): roots are ±y^((p+1)/4).
inline RootSet sqrt_mod_p_3mod4(const BigInt& y, const BigInt& p) {
    if (mpz_fdiv_ui(p.get_mpz_t(), 4) != 3)
        throw WrongResidueClass("sqrt_mod_p_3mod4: p != 3 (mod 4)");
    detail::require_residue(y, p);
    return detail::pair_roots(mod_pow(y, (p + 1) / 4, p), p);
}

// p ≡ 5 (mod 8): case split on eps = y^((p-1)/4), using that 2 is a
// non-residue so (2^((p-1)/4))^2 ≡ -1.
inline RootSet sqrt_mod_p_5mod8(const BigInt& y, const BigInt& p) {
    if (mpz_fdiv_ui(p.get_mpz_t(), 8) != 5)
        throw WrongResidueClass("sqrt_mod_p_5mod8: p != 5 (mod 8)");
    detail::require_residue(y, p);
    BigInt eps = mod_pow(y, (p - 1) / 4, p);
    BigInt root = mod_pow(y, (p + 3) / 8, p);
    if (eps != 1) {
        root = (root * mod_pow(BigInt(2), (p - 1) / 4, p)) % p;
    }
    return detail::pair_roots(root, p);
}

// Tonelli-Shanks, needed only when p ≡ 1 (mod 8).
inline RootSet sqrt_mod_p_tonelli_shanks(const BigInt& y_in, const BigInt& p) {
    detail::require_residue(y_in, p);
    BigInt y = y_in % p;
    if (y < 0) y += p;
    if (y == 0) return detail::pair_roots(BigInt(0), p);

    // p - 1 = q * 2^s with q odd
    BigInt q = p - 1;
    unsigned long s = 0;
    while (mpz_even_p(q.get_mpz_t())) {
        q >>= 1;
        ++s;
    }

    // any quadratic non-residue serves as the group generator
    BigInt z(2);
    while (jacobi(z, p) != -1) ++z;

    BigInt m(s);
    BigInt c = mod_pow(z, q, p);
    BigInt t = mod_pow(y, q, p);
    BigInt r = mod_pow(y, (q + 1) / 2, p);
    while (t != 1) {
        BigInt t2 = t;
        unsigned long i = 0;
        while (t2 != 1) {
            t2 = (t2 * t2) % p;
            ++i;
        }
        BigInt exp = pow2(static_cast<unsigned long>(m.get_ui() - i - 1));
        BigInt b = mod_pow(c, exp, p);
        m = i;
        c = (b * b) % p;
        t = (t * c) % p;
        r = (r * b) % p;
    }
    return detail::pair_roots(r, p);
}

// Dispatches on p mod 8; Tonelli-Shanks only for p ≡ 1 (mod 8).
inline RootSet sqrt_mod_p_general(const BigInt& y, const BigInt& p) {
    if (p == 2) return detail::pair_roots(y % 2, p);
    unsigned long p_mod_8 = mpz_fdiv_ui(p.get_mpz_t(), 8);
    if (p_mod_8 == 3 || p_mod_8 == 7) return sqrt_mod_p_3mod4(y, p);
    if (p_mod_8 == 5) return sqrt_mod_p_5mod8(y, p);
    return sqrt_mod_p_tonelli_shanks(y, p);
}

// Unique r mod pq with r ≡ r_p (mod p) and r ≡ r_q (mod q).
inline BigInt crt_combine(const BigInt& r_p, const BigInt& r_q, const BigInt& p, const BigInt& q) {
    InverseResult q_inv = mod_inv(q, p);
    if (!q_inv.ok) throw DomainError("crt_combine: p and q not coprime");
    BigInt n = p * q;
    BigInt diff = (r_p - r_q) % p;
    if (diff < 0) diff += p;
    BigInt r = (r_q + q * ((diff * q_inv.value) % p)) % n;
    if (r < 0) r += n;
    return r;
}

// All four square roots of y modulo n = pq, ascending.
inline RootSet sqrt_mod_n(const BigInt& y, const BigInt& p, const BigInt& q) {
    RootSet rp = sqrt_mod_p_general(y, p);
    RootSet rq = sqrt_mod_p_general(y, q);
    RootSet out;
    out.modulus = p * q;
    for (const BigInt& a : rp.roots)
        for (const BigInt& b : rq.roots)
            out.roots.push_back(crt_combine(a, b, p, q));
    std::sort(out.roots.begin(), out.roots.end());
    out.roots.erase(std::unique(out.roots.begin(), out.roots.end()), out.roots.end());
    return out;
}

// mod_pow(base, exponent, pq) via exponentiations mod p and q with the
// exponents reduced mod p-1 and q-1.
inline BigInt crt_pow(const BigInt& base, const BigInt& exponent, const BigInt& p, const BigInt& q) {
    if (exponent == 0) return BigInt(1) % (p * q);
    BigInt rp = mod_pow(base % p, exponent % (p - 1), p);
    BigInt rq = mod_pow(base % q, exponent % (q - 1), q);
    // Fermat reduction only applies to bases coprime with the prime.
    if (base % p == 0) rp = 0;
    if (base % q == 0) rq = 0;
    return crt_combine(rp, rq, p, q);
}

}  // namespace rsaplus::modarith
