#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "dpotts/disorder.hpp"
#include "dpotts/observables.hpp"
#include "dpotts/potts.hpp"
#include "dpotts/rng.hpp"

namespace dpotts {

enum class GridSpacing { geometric, linear };

struct TemperatureGrid {
    std::vector<double> T;  // strictly ascending

    int size() const { return static_cast<int>(T.size()); }
    double beta(int i) const { return 1.0 / T[i]; }

    static TemperatureGrid from_values(std::vector<double> values) {
        if (values.empty()) throw std::invalid_argument("TemperatureGrid: empty");
        for (size_t i = 0; i + 1 < values.size(); ++i)
            if (!(values[i] < values[i + 1]))
                throw std::invalid_argument("TemperatureGrid: not strictly ascending");
        if (values.front() <= 0.0) throw std::invalid_argument("TemperatureGrid: T must be > 0");
        return {std::move(values)};
    }
};

// Geometric spacing (uniform in ln T) by default; endpoints are exact.
inline TemperatureGrid build_grid(double t_min, double t_max, int n_t,
                                  GridSpacing spacing = GridSpacing::geometric) {
    if (!(t_min > 0.0) || !(t_min < t_max))
        throw std::invalid_argument("build_grid: need 0 < T_min < T_max");
    if (n_t < 2) throw std::invalid_argument("build_grid: need N_T >= 2");
    std::vector<double> T(n_t);
    for (int i = 1; i + 1 < n_t; ++i) {
        const double f = static_cast<double>(i) / (n_t - 1);
        T[i] = spacing == GridSpacing::geometric ? t_min * std::pow(t_max / t_min, f)
                                                 : t_min + f * (t_max - t_min);
    }
    T[0] = t_min;
    T[n_t - 1] = t_max;
    return TemperatureGrid{std::move(T)};
}

// Optional feedback pass: re-place interior temperatures so the measured
// pair "difficulty" -ln(acceptance) is spread evenly. Endpoints stay fixed.
// Not used by default; campaigns run on the plain geometric grid.
inline TemperatureGrid respace_grid(const TemperatureGrid& grid,
                                    const std::vector<double>& pair_acceptance) {
    const int n = grid.size();
    if (static_cast<int>(pair_acceptance.size()) != n - 1)
        throw std::invalid_argument("respace_grid: need one acceptance per adjacent pair");
    std::vector<double> cum(n, 0.0);
    for (int i = 0; i < n - 1; ++i) {
        const double a = std::clamp(pair_acceptance[i], 1e-6, 1.0);
        cum[i + 1] = cum[i] - std::log(a) + 1e-9;
    }
    std::vector<double> T(n);
    T[0] = grid.T.front();
    T[n - 1] = grid.T.back();
    for (int i = 1; i < n - 1; ++i) {
        const double target = cum[n - 1] * i / (n - 1);
        const auto it = std::upper_bound(cum.begin(), cum.end(), target);
        const int k = std::clamp(static_cast<int>(it - cum.begin()) - 1, 0, n - 2);
        const double f = (target - cum[k]) / (cum[k + 1] - cum[k]);
        T[i] = grid.T[k] + f * (grid.T[k + 1] - grid.T[k]);
    }
    return TemperatureGrid::from_values(std::move(T));
}

struct PairStats {
    long long attempts = 0;
    long long accepts = 0;
    double rate() const { return attempts > 0 ? static_cast<double>(accepts) / attempts : 0.0; }
};

// Swap probability for the replicas currently at temperature slots i and j.
inline double exchange_probability(double beta_i, double beta_j, double energy_i,
                                   double energy_j) {
    const double x = (beta_i - beta_j) * (energy_i - energy_j);
    return x >= 0.0 ? 1.0 : std::exp(x);
}

// Parallel-tempering state for one disorder realization: one replica per
// temperature, the slot<->replica permutation, exchange statistics and the
// temperature random-walk trace.
struct SampleRun {
    const DisorderRealization* dis;
    TemperatureGrid grid;
    std::vector<Replica> replicas;           // indexed by replica id
    std::vector<int> slot_to_replica;        // permutation: slot -> replica id
    std::vector<Xoshiro256> replica_rng;     // one sweep stream per replica
    Xoshiro256 exchange_rng;
    std::vector<PairStats> exchange;              // per adjacent slot pair
    std::vector<std::vector<uint32_t>> slot_visits;  // [replica][slot]
    std::vector<double> acc_sum;             // Metropolis acceptance, per slot
    long long sweeps_done = 0;
};

inline SampleRun make_sample_run(const DisorderRealization& dis, const TemperatureGrid& grid,
                                 uint64_t seed) {
    SampleRun run;
    run.dis = &dis;
    run.grid = grid;
    const int n_t = grid.size();
    Xoshiro256 init(derive_seed(seed, 0x1417));
    run.replicas.reserve(n_t);
    for (int t = 0; t < n_t; ++t) {
        run.replicas.push_back(make_random_replica(dis, init, t));
        run.replica_rng.emplace_back(derive_seed(seed, 0x51EE, static_cast<uint64_t>(t)));
    }
    run.slot_to_replica.resize(n_t);
    for (int t = 0; t < n_t; ++t) run.slot_to_replica[t] = t;
    run.exchange_rng = Xoshiro256(derive_seed(seed, 0xE8C4));
    run.exchange.assign(n_t > 1 ? n_t - 1 : 0, PairStats{});
    run.slot_visits.assign(n_t, std::vector<uint32_t>(n_t, 0));
    run.acc_sum.assign(n_t, 0.0);
    return run;
}

// One pass of exchange attempts over the adjacent slot pairs of the given
// parity (0: pairs (0,1),(2,3),...; 1: pairs (1,2),(3,4),...). Only the
// slot assignment moves; configurations and energies are untouched.
inline void pt_exchange(SampleRun& run, int parity) {
    const int n_t = run.grid.size();
    for (int k = parity; k + 1 < n_t; k += 2) {
        auto& stats = run.exchange[k];
        ++stats.attempts;
        const int ra = run.slot_to_replica[k];
        const int rb = run.slot_to_replica[k + 1];
        const double p = exchange_probability(run.grid.beta(k), run.grid.beta(k + 1),
                                              static_cast<double>(run.replicas[ra].energy),
                                              static_cast<double>(run.replicas[rb].energy));
        if (p >= 1.0 || run.exchange_rng.uniform() < p) {
            run.slot_to_replica[k] = rb;
            run.slot_to_replica[k + 1] = ra;
            run.replicas[ra].temperature_slot = k + 1;
            run.replicas[rb].temperature_slot = k;
            ++stats.accepts;
        }
    }
}

// One composite sweep: a Metropolis lattice sweep of every replica at its
// current temperature, then one exchange pass with alternating parity.
inline void pt_sweep(SampleRun& run) {
    const int n_t = run.grid.size();
    for (int slot = 0; slot < n_t; ++slot) {
        const int r = run.slot_to_replica[slot];
        run.acc_sum[slot] +=
            metropolis_sweep(run.replicas[r], *run.dis, run.grid.beta(slot), run.replica_rng[r]);
        ++run.slot_visits[r][slot];
    }
    if (n_t > 1) pt_exchange(run, static_cast<int>(run.sweeps_done & 1));
    ++run.sweeps_done;
}

// --- per-sample measurement aggregation --------------------------------------

struct ObsBins {
    RunningStats total;
    std::vector<RunningStats> bins;
};

struct TempStats {
    ObsBins energy, chi0, chik;
    double metropolis_acceptance = 0.0;
};

struct SampleStats {
    std::vector<TempStats> per_temperature;
    std::vector<PairStats> exchange;
    std::vector<uint32_t> visits_bottom, visits_top;  // per replica
    long long t_eq = 0;
    int n_bins = 0;
};

using MeasurementSink = std::function<void(const MeasurementRecord&)>;

// Full protocol for one disorder sample: random start, t_eq equilibration
// sweeps, then t_eq measurement sweeps recording every measure_every sweeps
// at every temperature. Measurement sweep s (1-based) lands in logarithmic
// bin floor(log2 s), clamped to the last complete bin.
inline SampleStats run_sample(const DisorderRealization& dis, const TemperatureGrid& grid,
                              long long t_eq, int measure_every, uint64_t seed,
                              const MeasurementSink& sink = nullptr, int sample_id = 0) {
    if (t_eq < 1) throw std::invalid_argument("run_sample: t_eq must be >= 1");
    if (measure_every < 1) throw std::invalid_argument("run_sample: measure_every must be >= 1");

    SampleRun run = make_sample_run(dis, grid, seed);
    const int n_t = grid.size();
    const int n_bins = std::max(1, static_cast<int>(std::floor(std::log2(static_cast<double>(t_eq)))));

    SampleStats stats;
    stats.t_eq = t_eq;
    stats.n_bins = n_bins;
    stats.per_temperature.resize(n_t);
    for (auto& ts : stats.per_temperature) {
        ts.energy.bins.resize(n_bins);
        ts.chi0.bins.resize(n_bins);
        ts.chik.bins.resize(n_bins);
    }

    for (long long s = 0; s < t_eq; ++s) pt_sweep(run);

    // reset acceptance accounting so reported rates cover the measurement phase
    std::fill(run.acc_sum.begin(), run.acc_sum.end(), 0.0);

    for (long long s = 1; s <= t_eq; ++s) {
        pt_sweep(run);
        if (s % measure_every != 0) continue;
        int bin = static_cast<int>(std::floor(std::log2(static_cast<double>(s))));
        bin = std::min(bin, n_bins - 1);
        for (int slot = 0; slot < n_t; ++slot) {
            const Replica& rep = run.replicas[run.slot_to_replica[slot]];
            const ChiTerms chi = measure(rep.spins, *dis.lat, dis.d);
            const double e = static_cast<double>(rep.energy);
            auto& ts = stats.per_temperature[slot];
            ts.energy.total.add(e);
            ts.energy.bins[bin].add(e);
            ts.chi0.total.add(chi.chi0);
            ts.chi0.bins[bin].add(chi.chi0);
            ts.chik.total.add(chi.chik);
            ts.chik.bins[bin].add(chi.chik);
            if (sink) sink(MeasurementRecord{sample_id, slot, s, e, chi.chi0, chi.chik});
        }
    }

    for (int slot = 0; slot < n_t; ++slot)
        stats.per_temperature[slot].metropolis_acceptance = run.acc_sum[slot] / t_eq;
    stats.exchange = run.exchange;
    stats.visits_bottom.resize(n_t);
    stats.visits_top.resize(n_t);
    for (int r = 0; r < n_t; ++r) {
        stats.visits_bottom[r] = run.slot_visits[r][0];
        stats.visits_top[r] = run.slot_visits[r][n_t - 1];
    }
    return stats;
}

}  // namespace dpotts
