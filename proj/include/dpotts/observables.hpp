#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpotts/lattice.hpp"
#include "dpotts/potts.hpp"

namespace dpotts {

// One measured sample of the observables, at one temperature of one
// disorder realization.
struct MeasurementRecord {
    int sample_id;
    int t_index;
    long long sweep;
    double energy;
    double chi0_term;  // |sum_i S_i|^2 in the simplex representation
    double chik_term;  // |sum_i S_i e^{i k_min.R_i}|^2, averaged over both k_min
};

struct ChiTerms {
    double chi0;
    double chik;
};

// Susceptibility terms of the simplex representation. Using the identity
// vec(s).vec(t) = (d delta_st - 1)/(d-1) both terms reduce to per-state
// tallies:
//   chi0 = (d sum_s n_s^2 - N^2) / (d-1)
//   chik = d/(d-1) sum_s |z_s|^2,  z_s = sum_{i: S_i=s} e^{i k.R_i}
// (the k != 0 plane-wave sum over the full torus vanishes, which removes the
// cross term). chik averages the two minimal wave vectors (2pi/L,0) and
// (0,2pi/L). No normalization by N; it cancels in the xi_L ratio.
inline ChiTerms measure(std::span<const uint8_t> spins, const Lattice& lat, int d) {
    const int L = lat.size();
    const int n = lat.n_vertices();
    if (static_cast<int>(spins.size()) != n)
        throw std::invalid_argument("measure: spins size mismatch");

    std::vector<double> cosw(L), sinw(L);
    for (int x = 0; x < L; ++x) {
        const double a = 2.0 * M_PI * x / L;
        cosw[x] = std::cos(a);
        sinw[x] = std::sin(a);
    }

    std::vector<long long> count(d, 0);
    std::vector<double> zx_re(d, 0.0), zx_im(d, 0.0), zy_re(d, 0.0), zy_im(d, 0.0);
    int v = 0;
    for (int y = 0; y < L; ++y) {
        for (int x = 0; x < L; ++x, ++v) {
            const int s = spins[v];
            ++count[s];
            zx_re[s] += cosw[x];
            zx_im[s] += sinw[x];
            zy_re[s] += cosw[y];
            zy_im[s] += sinw[y];
        }
    }

    double sum_sq = 0.0, zx2 = 0.0, zy2 = 0.0;
    for (int s = 0; s < d; ++s) {
        sum_sq += static_cast<double>(count[s]) * count[s];
        zx2 += zx_re[s] * zx_re[s] + zx_im[s] * zx_im[s];
        zy2 += zy_re[s] * zy_re[s] + zy_im[s] * zy_im[s];
    }
    const double nn = static_cast<double>(n) * n;
    const double ratio = static_cast<double>(d) / (d - 1);
    ChiTerms t;
    t.chi0 = ratio * sum_sq - nn / (d - 1);
    t.chik = 0.5 * ratio * (zx2 + zy2);
    return t;
}

struct XiResult {
    enum class Status { ok, ordered, unphysical };
    Status status;
    double value;  // valid only when status == ok
};

// Two-point finite-size correlation length
//   xi_L = [2 sin(k_min/2)]^{-1} sqrt(chi(0)/chi(k_min) - 1),  k_min = 2pi/L.
// chik = 0 signals a fully ordered (diverged) ratio; chi0 < chik has no real
// solution and is flagged unphysical.
inline XiResult correlation_length(double chi0_av, double chik_av, int L) {
    if (L < 2) throw std::invalid_argument("correlation_length: L must be >= 2");
    if (chik_av <= 0.0) return {XiResult::Status::ordered, 0.0};
    if (chi0_av < chik_av) return {XiResult::Status::unphysical, 0.0};
    const double xi = std::sqrt(chi0_av / chik_av - 1.0) / (2.0 * std::sin(M_PI / L));
    return {XiResult::Status::ok, xi};
}

// --- logarithmic-binning equilibration test ---------------------------------

struct LogBin {
    long long count = 0;
    double mean = 0.0;
    double se = 0.0;  // standard error attached by the caller
};

enum class Equilibration { pass, fail, indeterminate };

struct EquilibrationReport {
    Equilibration combined = Equilibration::indeterminate;
    std::vector<Equilibration> per_observable;
    double max_z = 0.0;  // largest |difference| / (2 combined se) seen
};

// Pass iff for every observable the last three logarithmic bins are pairwise
// compatible, |m_a - m_b| <= 2 sqrt(se_a^2 + se_b^2). Fewer than three bins
// for any observable gives an indeterminate verdict rather than a failure.
inline EquilibrationReport equilibration_check(
    const std::vector<std::vector<LogBin>>& series_per_observable) {
    EquilibrationReport rep;
    rep.per_observable.reserve(series_per_observable.size());
    bool any_indet = false, any_fail = false;

    for (const auto& series : series_per_observable) {
        if (series.size() < 3) {
            rep.per_observable.push_back(Equilibration::indeterminate);
            any_indet = true;
            continue;
        }
        const LogBin* last3 = &series[series.size() - 3];
        bool ok = true;
        for (int a = 0; a < 3 && ok; ++a) {
            for (int b = a + 1; b < 3; ++b) {
                const double diff = std::fabs(last3[a].mean - last3[b].mean);
                const double tol =
                    2.0 * std::sqrt(last3[a].se * last3[a].se + last3[b].se * last3[b].se);
                if (tol > 0.0) rep.max_z = std::max(rep.max_z, diff / tol);
                if (diff > tol) {
                    ok = false;
                    break;
                }
            }
        }
        rep.per_observable.push_back(ok ? Equilibration::pass : Equilibration::fail);
        if (!ok) any_fail = true;
    }

    if (any_fail)
        rep.combined = Equilibration::fail;
    else if (any_indet || rep.per_observable.empty())
        rep.combined = Equilibration::indeterminate;
    else
        rep.combined = Equilibration::pass;
    return rep;
}

// Welford accumulator; used for per-bin and whole-run statistics.
struct RunningStats {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
    double std_error() const { return n > 1 ? std::sqrt(variance() / n) : 0.0; }

    void merge(const RunningStats& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double delta = o.mean - mean;
        const long long tot = n + o.n;
        m2 += o.m2 + delta * delta * (static_cast<double>(n) * o.n / tot);
        mean += delta * o.n / tot;
        n = tot;
    }
};

}  // namespace dpotts
