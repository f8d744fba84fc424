#pragma once

// Self-similar orthotope families: exact volumes for integral scaling and
// replication parameters, extra-volume fractions against the simplex, the
// covering onset n0, and the exhaustive parameter search over the
// feasible integral grid.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "core.hpp"

namespace simplexmap {

// 1/r >= beta admits the halving family (2, 2) the closed forms specialize
// to; the strict 1/r > beta feasibility constraint applies to the optimizer
// search grid.
struct self_similar_params {
    i64 inv_r = 2;  // inverse scaling factor 1/r
    i64 beta = 2;   // replication arity
    int m = 2;

    self_similar_params() = default;
    self_similar_params(i64 inv_r_, i64 beta_, int m_) : inv_r(inv_r_), beta(beta_), m(m_) {
        if (m < 1) throw std::invalid_argument("self_similar_params: m must be >= 1");
        if (beta <= 1) throw std::invalid_argument("self_similar_params: beta must be > 1");
        if (inv_r < beta)
            throw std::invalid_argument("self_similar_params: 1/r must be >= beta");
    }
};

struct efficiency_report {
    rational volume_s;       // V(S_n^m)
    u128 volume_simplex = 0; // V(simplex side n-1)
    rational alpha;          // volume_s / volume_simplex - 1
    i64 n0 = 0;              // smallest covering n, valid when found
    bool found = false;
};

namespace detail {

// Exact exponent k with inv_r^k == n; n that is not a power is an error.
inline unsigned exact_log(i64 n, i64 inv_r) {
    if (n < 1) throw std::invalid_argument("self_similar_volume: n must be >= 1");
    unsigned k = 0;
    i64 v = 1;
    while (v < n) {
        v *= inv_r;
        ++k;
    }
    if (v != n)
        throw std::invalid_argument("self_similar_volume: n must be a power of 1/r");
    return k;
}

} // namespace detail

// (n^m - beta^k) / ((1/r)^m - beta) with k = log_{1/r}(n); equals the
// unrolled recurrence V(n) = (n/(1/r))^m + beta * V(n/(1/r)), V(1) = 0.
inline rational self_similar_volume(i64 n, const self_similar_params& p) {
    unsigned k = detail::exact_log(n, p.inv_r);
    u128 ipow = checked_pow(u128(p.inv_r), unsigned(p.m));
    if (ipow <= u128(p.beta))
        throw std::invalid_argument("self_similar_volume: (1/r)^m must exceed beta");
    u128 npow = checked_pow(u128(n), unsigned(p.m));
    u128 bpow = checked_pow(u128(p.beta), k);
    return rational::from_u128(npow - bpow) / rational::from_u128(ipow - u128(p.beta));
}

// Limit of the extra fraction for the halving family (1/r = 2, beta = 2):
// m! / (2^m - 2) - 1.
inline rational extra_fraction_limit(int m, const self_similar_params& p) {
    if (m < 2) throw std::invalid_argument("extra_fraction_limit: m must be >= 2");
    if (p.inv_r != 2 || p.beta != 2)
        throw std::invalid_argument("extra_fraction_limit: defined for inv_r=2, beta=2");
    u128 denom = (u128{1} << unsigned(m)) - 2;
    return rational::from_u128(factorial_u128(m)) / rational::from_u128(denom) - rational(1);
}

inline rational extra_fraction_limit(int m) {
    return extra_fraction_limit(m, self_similar_params(2, 2, m));
}

inline rational extra_fraction_at(i64 n, const self_similar_params& p) {
    if (n < 2) throw std::invalid_argument("extra_fraction_at: n must be >= 2");
    return self_similar_volume(n, p) / rational::from_u128(simplex_volume(n - 1, p.m)) -
           rational(1);
}

// Smallest n (a power of 1/r, swept up to n_bound) whose self-similar volume
// covers the simplex volume.
inline efficiency_report find_n0(const self_similar_params& p, i64 n_bound) {
    efficiency_report rep;
    for (i64 n = p.inv_r; n <= n_bound; n *= p.inv_r) {
        rational vs = self_similar_volume(n, p);
        u128 vd = simplex_volume(n - 1, p.m);
        if (vs >= rational::from_u128(vd)) {
            rep.volume_s = vs;
            rep.volume_simplex = vd;
            rep.alpha = vs / rational::from_u128(vd) - rational(1);
            rep.n0 = n;
            rep.found = true;
            return rep;
        }
        if (n > n_bound / p.inv_r) break;
    }
    return rep;
}

// Exhaustive integral grid search over 1/r >= beta > 1, ranked by |alpha| at
// the largest power of 1/r not exceeding n_eval (at least (1/r)^1), ties by
// smaller n0, then smaller beta, then smaller 1/r. Ordering is a pure
// function of the inputs.
inline std::vector<std::pair<self_similar_params, efficiency_report>>
optimize_params(int m, i64 inv_r_max, i64 beta_max, i64 n_eval) {
    if (n_eval < 2) throw std::invalid_argument("optimize_params: n_eval must be >= 2");
    std::vector<std::pair<self_similar_params, efficiency_report>> out;
    for (i64 beta = 2; beta <= beta_max; ++beta)
        for (i64 inv_r = beta; inv_r <= inv_r_max; ++inv_r) {
            self_similar_params p(inv_r, beta, m);
            i64 n = inv_r;
            while (n <= n_eval / inv_r) n *= inv_r;
            efficiency_report sweep = find_n0(p, n_eval);
            efficiency_report rep;
            rep.volume_s = self_similar_volume(n, p);
            rep.volume_simplex = simplex_volume(n - 1, m);
            rep.alpha = extra_fraction_at(n, p);
            rep.n0 = sweep.n0;
            rep.found = sweep.found;
            out.emplace_back(p, rep);
        }
    if (out.empty())
        throw std::invalid_argument("optimize_params: empty feasible (1/r, beta) grid");
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        rational aa = a.second.alpha.abs(), ab = b.second.alpha.abs();
        if (aa != ab) return aa < ab;
        i64 na = a.second.found ? a.second.n0 : std::numeric_limits<i64>::max();
        i64 nb = b.second.found ? b.second.n0 : std::numeric_limits<i64>::max();
        if (na != nb) return na < nb;
        if (a.first.beta != b.first.beta) return a.first.beta < b.first.beta;
        return a.first.inv_r < b.first.inv_r;
    });
    return out;
}

// Non-integral scaling diagnostic: with (1/r)^m = m! the extra fraction
// tends to beta / (m! - beta). Not a realizable block packing; excluded
// from the integral search.
struct real_scaling_report {
    double inv_r = 0;
    double alpha_infinity = 0;
};

inline real_scaling_report real_scaling_diagnostic(int m, i64 beta) {
    if (m < 2) throw std::invalid_argument("real_scaling_diagnostic: m must be >= 2");
    if (beta <= 1) throw std::invalid_argument("real_scaling_diagnostic: beta must be > 1");
    double mfact = double(u64(factorial_u128(m)));
    if (double(beta) >= mfact)
        throw std::invalid_argument("real_scaling_diagnostic: beta must be below m!");
    return {std::pow(mfact, 1.0 / double(m)), double(beta) / (mfact - double(beta))};
}

} // namespace simplexmap
