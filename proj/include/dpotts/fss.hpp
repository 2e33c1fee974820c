#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpotts/disorder.hpp"
#include "dpotts/observables.hpp"
#include "dpotts/rng.hpp"

namespace dpotts {

// xi_L/L versus temperature for one system size.
struct Curve {
    int L = 0;
    std::vector<double> T;
    std::vector<double> y;
};

namespace detail {

// Least-squares polynomial fit with the abscissa mapped to [-1,1] for
// conditioning. Returns coefficients in the mapped variable, lowest first.
struct PolyFit {
    double x_mid, x_half;
    std::vector<double> c;

    double eval(double x) const {
        const double u = (x - x_mid) / x_half;
        double acc = 0.0, pw = 1.0;
        for (double ck : c) {
            acc += ck * pw;
            pw *= u;
        }
        return acc;
    }
};

inline PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
    const int n = static_cast<int>(x.size());
    if (n != static_cast<int>(y.size()) || n == 0)
        throw std::invalid_argument("polyfit: bad input sizes");
    degree = std::min(degree, n - 1);
    const int m = degree + 1;

    PolyFit fit;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    fit.x_mid = 0.5 * (*lo + *hi);
    fit.x_half = (*hi - *lo) > 0 ? 0.5 * (*hi - *lo) : 1.0;

    // normal equations A c = b in the mapped variable
    std::vector<double> a(m * m, 0.0), b(m, 0.0);
    std::vector<double> pw(2 * m - 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const double u = (x[i] - fit.x_mid) / fit.x_half;
        double p = 1.0;
        for (int k = 0; k < 2 * m - 1; ++k) {
            pw[k] = p;
            p *= u;
        }
        for (int r = 0; r < m; ++r) {
            b[r] += pw[r] * y[i];
            for (int s = 0; s <= r; ++s) a[r * m + s] += pw[r + s];
        }
    }
    for (int r = 0; r < m; ++r)
        for (int s = r + 1; s < m; ++s) a[r * m + s] = a[s * m + r];

    // Gaussian elimination with partial pivoting
    std::vector<int> piv(m);
    for (int k = 0; k < m; ++k) piv[k] = k;
    for (int k = 0; k < m; ++k) {
        int best = k;
        for (int r = k + 1; r < m; ++r)
            if (std::fabs(a[r * m + k]) > std::fabs(a[best * m + k])) best = r;
        if (best != k) {
            for (int s = 0; s < m; ++s) std::swap(a[k * m + s], a[best * m + s]);
            std::swap(b[k], b[best]);
        }
        const double pivot = a[k * m + k];
        if (pivot == 0.0) throw std::runtime_error("polyfit: singular system");
        for (int r = k + 1; r < m; ++r) {
            const double f = a[r * m + k] / pivot;
            for (int s = k; s < m; ++s) a[r * m + s] -= f * a[k * m + s];
            b[r] -= f * b[k];
        }
    }
    fit.c.assign(m, 0.0);
    for (int k = m - 1; k >= 0; --k) {
        double acc = b[k];
        for (int s = k + 1; s < m; ++s) acc -= a[k * m + s] * fit.c[s];
        fit.c[k] = acc / a[k * m + k];
    }
    return fit;
}

}  // namespace detail

struct CrossingResult {
    enum class Status { found, no_crossing, insufficient };
    Status status = Status::insufficient;
    double T_star = 0.0;
    bool ambiguous = false;  // multiple physical roots; nearest to window center returned
};

// Crossing of the xi_L/L curves of two sizes. Each curve is fitted with a
// cubic over a shared window centered where the curves are closest (widened
// to at least 6 points per curve when available) and the crossing is the
// root of the fitted difference. With curveA the smaller and curveB the
// larger size, the physical root has the difference B - A falling through
// zero as T increases.
inline CrossingResult find_crossing(const Curve& curve_a, const Curve& curve_b,
                                    int fit_degree = 3) {
    CrossingResult out;
    if (curve_a.T.empty() || curve_b.T.empty()) return out;
    const auto [a_lo, a_hi] = std::minmax_element(curve_a.T.begin(), curve_a.T.end());
    const auto [b_lo, b_hi] = std::minmax_element(curve_b.T.begin(), curve_b.T.end());
    const double lo = std::max(*a_lo, *b_lo);
    const double hi = std::min(*a_hi, *b_hi);
    if (!(lo < hi)) return out;

    auto in_window = [](const Curve& c, double a, double b, std::vector<double>& x,
                        std::vector<double>& y) {
        x.clear();
        y.clear();
        for (size_t i = 0; i < c.T.size(); ++i)
            if (c.T[i] >= a - 1e-12 && c.T[i] <= b + 1e-12) {
                x.push_back(c.T[i]);
                y.push_back(c.y[i]);
            }
    };

    std::vector<double> xa, ya, xb, yb;
    in_window(curve_a, lo, hi, xa, ya);
    in_window(curve_b, lo, hi, xb, yb);
    if (xa.size() < 4 || xb.size() < 4) return out;

    // locate the temperature where the curves approach each other most
    // closely, then widen the fit window around it
    const detail::PolyFit pre_a = detail::polyfit(xa, ya, fit_degree);
    const detail::PolyFit pre_b = detail::polyfit(xb, yb, fit_degree);
    double t_close = 0.5 * (lo + hi), best = 1e300;
    for (int i = 0; i <= 200; ++i) {
        const double t = lo + (hi - lo) * i / 200.0;
        const double gap = std::fabs(pre_b.eval(t) - pre_a.eval(t));
        if (gap < best) {
            best = gap;
            t_close = t;
        }
    }
    const size_t min_pts = 6;
    double w_lo = lo, w_hi = hi;
    if (xa.size() > min_pts && xb.size() > min_pts) {
        const double half = std::max({0.3 * (hi - lo), 3.0 * (xa[1] - xa[0]), 1e-12});
        w_lo = std::max(lo, t_close - half);
        w_hi = std::min(hi, t_close + half);
        std::vector<double> txa, tya, txb, tyb;
        in_window(curve_a, w_lo, w_hi, txa, tya);
        in_window(curve_b, w_lo, w_hi, txb, tyb);
        if (txa.size() >= min_pts && txb.size() >= min_pts) {
            xa.swap(txa);
            ya.swap(tya);
            xb.swap(txb);
            yb.swap(tyb);
        } else {
            w_lo = lo;
            w_hi = hi;
        }
    }

    const detail::PolyFit fit_a = detail::polyfit(xa, ya, fit_degree);
    const detail::PolyFit fit_b = detail::polyfit(xb, yb, fit_degree);
    auto diff = [&](double t) { return fit_b.eval(t) - fit_a.eval(t); };

    // scan for sign changes of the fitted difference, refine by bisection
    const int scan = 2048;
    std::vector<std::pair<double, double>> roots;  // (T*, slope sign)
    double prev_t = w_lo, prev_d = diff(w_lo);
    for (int i = 1; i <= scan; ++i) {
        const double t = w_lo + (w_hi - w_lo) * i / scan;
        const double dv = diff(t);
        if (prev_d == 0.0 || (prev_d > 0.0) != (dv > 0.0)) {
            double a = prev_t, b = t, fa = prev_d;
            for (int it = 0; it < 100; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = diff(m);
                if (fa == 0.0) break;
                if ((fa > 0.0) == (fm > 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            const double root = 0.5 * (a + b);
            const double h = std::max(1e-9, 1e-7 * (w_hi - w_lo));
            roots.emplace_back(root, diff(root + h) - diff(root - h));
        }
        prev_t = t;
        prev_d = dv;
    }
    if (roots.empty()) {
        out.status = CrossingResult::Status::no_crossing;
        return out;
    }

    // prefer the ordering-side crossing: difference decreasing through zero
    std::vector<std::pair<double, double>> physical;
    for (const auto& r : roots)
        if (r.second < 0.0) physical.push_back(r);
    const auto& pool = physical.empty() ? roots : physical;
    const double center = 0.5 * (w_lo + w_hi);
    double best_root = pool.front().first;
    for (const auto& r : pool)
        if (std::fabs(r.first - center) < std::fabs(best_root - center)) best_root = r.first;

    out.status = CrossingResult::Status::found;
    out.T_star = best_root;
    out.ambiguous = pool.size() > 1;
    return out;
}

struct CrossingPoint {
    int L1, L2;
    double T_star;
};

struct Extrapolation {
    double T_c = 0.0;
    double slope = 0.0;
    bool extrapolated = false;  // false when only one crossing was available
};

// Thermodynamic-limit estimate: least-squares line of T*(L1,L2) against the
// average inverse size x = 2/(L1+L2); the intercept at x = 0 is T_c.
inline Extrapolation extrapolate(const std::vector<CrossingPoint>& crossings) {
    if (crossings.empty()) throw std::invalid_argument("extrapolate: no crossings");
    Extrapolation out;
    if (crossings.size() == 1) {
        out.T_c = crossings[0].T_star;
        return out;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(crossings.size());
    for (const auto& c : crossings) {
        const double x = 2.0 / (c.L1 + c.L2);
        sx += x;
        sy += c.T_star;
        sxx += x * x;
        sxy += x * c.T_star;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) {
        // all pairs at the same inverse size; fall back to the mean
        out.T_c = sy / n;
        out.extrapolated = false;
        return out;
    }
    out.slope = (n * sxy - sx * sy) / denom;
    out.T_c = (sy - out.slope * sx) / n;
    out.extrapolated = true;
    return out;
}

// --- bootstrap over disorder samples -----------------------------------------

// Per-size raw material for the analysis: the per-disorder-sample thermal
// means of chi(0) and chi(k_min) on a fixed temperature grid.
struct SizeData {
    int L = 0;
    std::vector<double> T;
    std::vector<std::vector<ChiTerms>> samples;  // [sample][temperature]
};

// Disorder-average the chi terms (optionally through a resampled index set)
// and form the xi_L/L curve. Temperatures with an ordered or unphysical
// ratio are dropped from the curve.
inline Curve curve_from_samples(const SizeData& data, const std::vector<int>* resample = nullptr) {
    Curve c;
    c.L = data.L;
    const size_t n_t = data.T.size();
    const size_t n_s = resample ? resample->size() : data.samples.size();
    if (n_s == 0) return c;
    for (size_t t = 0; t < n_t; ++t) {
        double chi0 = 0.0, chik = 0.0;
        for (size_t i = 0; i < n_s; ++i) {
            const auto& row = data.samples[resample ? (*resample)[i] : i];
            chi0 += row[t].chi0;
            chik += row[t].chik;
        }
        chi0 /= n_s;
        chik /= n_s;
        const XiResult xi = correlation_length(chi0, chik, data.L);
        if (xi.status == XiResult::Status::ok) {
            c.T.push_back(data.T[t]);
            c.y.push_back(xi.value / data.L);
        }
    }
    return c;
}

// Crossings of consecutive sizes plus the extrapolated T_c.
inline Extrapolation crossings_and_extrapolation(const std::vector<Curve>& curves,
                                                 std::vector<CrossingPoint>* points = nullptr) {
    std::vector<CrossingPoint> pts;
    for (size_t i = 0; i + 1 < curves.size(); ++i) {
        const CrossingResult r = find_crossing(curves[i], curves[i + 1]);
        if (r.status == CrossingResult::Status::found)
            pts.push_back({curves[i].L, curves[i + 1].L, r.T_star});
    }
    if (points) *points = pts;
    if (pts.empty()) throw std::runtime_error("crossings_and_extrapolation: no crossing found");
    return extrapolate(pts);
}

struct BootstrapTc {
    double T_c = 0.0;           // from the full data set
    double se = 0.0;            // std deviation over resamples
    std::vector<double> resampled;  // one T_c per successful resample
};

// Bootstrap of the crossing/extrapolation pipeline: disorder samples are
// redrawn with replacement per size (one index set per size, shared by all
// temperatures of that size, preserving cross-T correlations).
inline BootstrapTc bootstrap_Tc(const std::vector<SizeData>& sizes, int resamples,
                                uint64_t seed) {
    if (resamples < 1) throw std::invalid_argument("bootstrap_Tc: resamples must be >= 1");
    BootstrapTc out;
    std::vector<Curve> central;
    for (const auto& sd : sizes) central.push_back(curve_from_samples(sd));
    out.T_c = crossings_and_extrapolation(central).T_c;

    Xoshiro256 rng(seed);
    out.resampled.reserve(resamples);
    for (int r = 0; r < resamples; ++r) {
        std::vector<Curve> curves;
        curves.reserve(sizes.size());
        for (const auto& sd : sizes) {
            const uint32_t n = static_cast<uint32_t>(sd.samples.size());
            std::vector<int> idx(n);
            for (auto& k : idx) k = static_cast<int>(rng.below(n));
            curves.push_back(curve_from_samples(sd, &idx));
        }
        try {
            out.resampled.push_back(crossings_and_extrapolation(curves).T_c);
        } catch (const std::runtime_error&) {
            // a resample may lose the crossing; skip it
        }
    }
    RunningStats st;
    for (double v : out.resampled) st.add(v);
    out.se = st.n > 1 ? std::sqrt(st.variance()) : 0.0;
    return out;
}

// --- phase boundary vs Nishimori line ----------------------------------------

struct BoundaryPoint {
    double p;
    double T_c;
    double sigma;
};

struct Intersection {
    enum class Status { found, no_sign_change };
    Status status = Status::no_sign_change;
    double p_c = 0.0;
    double sigma = 0.0;
    double sign_lo = 0.0, sign_hi = 0.0;  // f = T_c(p) - T_N(p) at the grid ends
};

namespace detail {
// Root of the piecewise-linear interpolation of f(p) = T_c(p) - T_N(p).
inline bool boundary_root(const std::vector<double>& ps, const std::vector<double>& tcs, int d,
                          double* root) {
    for (size_t i = 0; i + 1 < ps.size(); ++i) {
        const double f0 = tcs[i] - nishimori_temperature(d, ps[i]);
        const double f1 = tcs[i + 1] - nishimori_temperature(d, ps[i + 1]);
        if (f0 == 0.0) {
            *root = ps[i];
            return true;
        }
        if ((f0 > 0.0) != (f1 > 0.0)) {
            // bisect on the interpolated segment against the exact T_N(p)
            double a = ps[i], b = ps[i + 1];
            auto f = [&](double p) {
                const double t = tcs[i] + (tcs[i + 1] - tcs[i]) * (p - ps[i]) / (ps[i + 1] - ps[i]);
                return t - nishimori_temperature(d, p);
            };
            double fa = f0;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if ((fa > 0.0) == (fm > 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            *root = 0.5 * (a + b);
            return true;
        }
    }
    if (!ps.empty() && tcs.back() - nishimori_temperature(d, ps.back()) == 0.0) {
        *root = ps.back();
        return true;
    }
    return false;
}
}  // namespace detail

// Error threshold p_c: intersection of the phase boundary T_c(p) with the
// Nishimori line T_N(p). The error is propagated end to end when per-p
// bootstrap replicates of T_c are supplied (resampled[i] holds the replicate
// vector for boundary[i]); replicates are consumed in lockstep across p.
inline Intersection threshold_intersection(const std::vector<BoundaryPoint>& boundary, int d,
                                           const std::vector<std::vector<double>>* resampled =
                                               nullptr) {
    if (boundary.size() < 2)
        throw std::invalid_argument("threshold_intersection: need >= 2 boundary points");
    std::vector<double> ps, tcs;
    for (const auto& b : boundary) {
        ps.push_back(b.p);
        tcs.push_back(b.T_c);
    }
    Intersection out;
    out.sign_lo = tcs.front() - nishimori_temperature(d, ps.front());
    out.sign_hi = tcs.back() - nishimori_temperature(d, ps.back());

    double root = 0.0;
    if (!detail::boundary_root(ps, tcs, d, &root)) return out;
    out.status = Intersection::Status::found;
    out.p_c = root;

    if (resampled && !resampled->empty()) {
        size_t n_rep = (*resampled)[0].size();
        for (const auto& v : *resampled) n_rep = std::min(n_rep, v.size());
        RunningStats st;
        for (size_t r = 0; r < n_rep; ++r) {
            std::vector<double> t_rep(ps.size());
            for (size_t i = 0; i < ps.size(); ++i) t_rep[i] = (*resampled)[i][r];
            double pr = 0.0;
            if (detail::boundary_root(ps, t_rep, d, &pr)) st.add(pr);
        }
        out.sigma = st.n > 1 ? std::sqrt(st.variance()) : 0.0;
    }
    return out;
}

}  // namespace dpotts
