#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpotts {

// LHS of the hashing-bound equation: the entropy rate of the uniform qudit
// channel, p ln(d-1) - p ln p - (1-p) ln(1-p). Natural logs throughout; the
// equation is base-invariant.
inline double hashing_entropy(int d, double p) {
    double h = p * std::log(static_cast<double>(d - 1));
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
    return h;
}

// Hashing bound p_hb(d): the root of hashing_entropy(d, p) = ln(d)/2 in
// (0, (d-1)/d), by bisection to 1e-10. The LHS derivative is the Nishimori
// beta ln[(d-1)(1-p)/p], strictly positive on the bracket, so the root is
// unique; this is spot-checked at runtime.
inline double hashing_bound(int d) {
    if (d < 2) throw std::invalid_argument("hashing_bound: d must be >= 2");
    const double target = 0.5 * std::log(static_cast<double>(d));
    double lo = 1e-15;
    double hi = static_cast<double>(d - 1) / d - 1e-15;
    for (double p : {lo, 0.5 * (lo + hi), hi}) {
        const double slope = std::log((d - 1) * (1.0 - p) / p);
        if (!(slope > 0.0)) throw std::logic_error("hashing_bound: LHS not increasing");
    }
    if (!(hashing_entropy(d, lo) < target && hashing_entropy(d, hi) > target))
        throw std::logic_error("hashing_bound: bracket does not straddle the root");
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (hashing_entropy(d, mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Closed-form threshold upper bound p_d < (d-1) / (2 (d + sqrt(d))).
inline double upper_bound(int d) {
    if (d < 2) throw std::invalid_argument("upper_bound: d must be >= 2");
    const double dd = static_cast<double>(d);
    return (dd - 1.0) / (2.0 * (dd + std::sqrt(dd)));
}

// Threshold lower bound for d = n*m with n, m co-prime, from independent
// decoding of the two component codes:
//   p_d >= min( p_n (d-1)/(d-m), p_m (d-1)/(d-n) ).
inline double lower_bound(double p_n, double p_m, int n, int m) {
    if (n < 2 || m < 2) throw std::invalid_argument("lower_bound: n, m must be >= 2");
    if (std::gcd(n, m) != 1) throw std::invalid_argument("lower_bound: n, m must be co-prime");
    const double d = static_cast<double>(n) * m;
    return std::min(p_n * (d - 1.0) / (d - m), p_m * (d - 1.0) / (d - n));
}

inline bool is_prime(int n) {
    if (n < 2) return false;
    for (int k = 2; k * k <= n; ++k)
        if (n % k == 0) return false;
    return true;
}

struct SelfConsistency {
    int n;
    double lhs;     // threshold at d = n^2 + n
    double rhs;     // p_n (1 + 1/n - 1/n^2)
    double margin;  // lhs - rhs
    bool pass;
};

// Self-consistency inequality for a proposed threshold family p(d): with n
// prime (so m = n+1 is co-prime), p(n^2+n) >= p(n) (1 + 1/n - 1/n^2).
inline SelfConsistency self_consistency(const std::function<double(int)>& threshold_fn, int n) {
    if (!is_prime(n)) throw std::invalid_argument("self_consistency: n must be prime");
    SelfConsistency r;
    r.n = n;
    r.lhs = threshold_fn(n * n + n);
    r.rhs = threshold_fn(n) * (1.0 + 1.0 / n - 1.0 / (static_cast<double>(n) * n));
    r.margin = r.lhs - r.rhs;
    r.pass = r.lhs >= r.rhs;
    return r;
}

struct BoundReport {
    int d;
    double p_hb;
    double p_upper;
};

inline BoundReport bound_report(int d) { return {d, hashing_bound(d), upper_bound(d)}; }

}  // namespace dpotts
