#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dpotts/config.hpp"
#include "dpotts/disorder.hpp"
#include "dpotts/exact.hpp"
#include "dpotts/fss.hpp"
#include "dpotts/records.hpp"
#include "dpotts/tempering.hpp"

namespace dpotts {

inline int resolve_workers(int configured) {
    if (const char* env = std::getenv("DPOTTS_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (configured > 0) return configured;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace detail {

inline double robust_scatter(std::vector<double> v) {
    if (v.size() < 2) return 0.0;
    RunningStats plain;
    for (double x : v) plain.add(x);
    const auto mid = v.begin() + v.size() / 2;
    std::nth_element(v.begin(), mid, v.end());
    const double med = *mid;
    for (auto& x : v) x = std::fabs(x - med);
    std::nth_element(v.begin(), mid, v.end());
    const double mad = *mid;
    // Gaussian-consistent MAD; fall back to the plain deviation when more
    // than half the values coincide
    return mad > 0.0 ? 1.4826 * mad : std::sqrt(plain.variance());
}

// Per-sample equilibration flags for one record set. The error scale of a
// bin is the scatter of that bin's mean across disorder samples (a robust
// MAD estimate, so a drifting outlier cannot mask itself); each sample's
// last three bins must agree within twice the combined scale. With a single
// sample there is no scatter to compare against and the verdict stays
// indeterminate (such samples are not excluded).
inline void flag_equilibration(RecordSet& set) {
    const size_t n = set.samples.size();
    set.verdicts.assign(n, Equilibration::indeterminate);
    set.verdict_z.assign(n, 0.0);
    if (n < 2) return;

    auto bins_of = [](const SampleRecord& s, int obs) -> const std::vector<BinSummary>& {
        return obs == 0 ? s.temps[0].bins_e : obs == 1 ? s.temps[0].bins_chi0
                                                       : s.temps[0].bins_chik;
    };

    size_t n_bins = 0;
    for (const auto& s : set.samples)
        if (s.ok && !s.temps.empty()) n_bins = std::max(n_bins, bins_of(s, 0).size());
    if (n_bins < 3) return;

    // cross-sample scatter per (observable, bin)
    std::vector<std::vector<double>> sigma(3, std::vector<double>(n_bins, 0.0));
    for (int obs = 0; obs < 3; ++obs) {
        for (size_t b = 0; b < n_bins; ++b) {
            std::vector<double> vals;
            for (const auto& s : set.samples)
                if (s.ok && !s.temps.empty() && b < bins_of(s, obs).size())
                    vals.push_back(bins_of(s, obs)[b].mean);
            sigma[obs][b] = robust_scatter(std::move(vals));
        }
    }

    for (size_t i = 0; i < n; ++i) {
        const SampleRecord& s = set.samples[i];
        if (!s.ok || s.temps.empty()) continue;
        std::vector<std::vector<LogBin>> series(3);
        for (int obs = 0; obs < 3; ++obs) {
            const auto& bins = bins_of(s, obs);
            for (size_t b = 0; b < bins.size(); ++b)
                series[obs].push_back({bins[b].n, bins[b].mean, sigma[obs][b]});
        }
        const EquilibrationReport rep = equilibration_check(series);
        set.verdicts[i] = rep.combined;
        set.verdict_z[i] = rep.max_z;
    }
}

}  // namespace detail

using CampaignProgress = std::function<void(double p, int L, int done, int total)>;

// Run the full (p, L) grid of a campaign: for every cell, n_samples quenched
// disorder realizations, each simulated with run_sample under the configured
// tempering schedule. Samples fan out over a worker pool; everything is
// derived from the master seed, so results are independent of scheduling.
// Per-sample failures are recorded and skipped, not fatal.
inline ResultStore run_campaign(const CampaignConfig& cfg,
                                const CampaignProgress& progress = nullptr) {
    cfg.validate();
    ResultStore store;
    store.config = cfg;
    const int n_workers = resolve_workers(cfg.workers);

    for (size_t ip = 0; ip < cfg.p.size(); ++ip) {
        const double p = cfg.p[ip];
        for (size_t il = 0; il < cfg.L.size(); ++il) {
            const int L = cfg.L[il];
            const Lattice lat(L);
            const TemperatureGrid grid = build_grid(cfg.t_min, cfg.t_max, cfg.n_temps, cfg.spacing);

            RecordSet set;
            set.p = p;
            set.L = L;
            set.temperatures = grid.T;
            set.t_eq = cfg.t_eq();
            set.n_bins = std::max(1, cfg.b);
            set.measure_every = cfg.measure_every;
            set.samples.resize(cfg.n_samples);

            std::atomic<int> next{0};
            std::atomic<int> done{0};
            auto worker = [&]() {
                for (;;) {
                    const int i = next.fetch_add(1);
                    if (i >= cfg.n_samples) return;
                    const uint64_t sample_seed =
                        derive_seed(cfg.seed, ip + 1, il + 1, static_cast<uint64_t>(i));
                    SampleRecord rec;
                    rec.sample_id = i;
                    rec.seed = sample_seed;
                    try {
                        const DisorderRealization dis = sample_disorder(
                            lat, ErrorModel(cfg.d, p), derive_seed(sample_seed, 0xD150));
                        const SampleStats stats =
                            run_sample(dis, grid, cfg.t_eq(), cfg.measure_every,
                                       derive_seed(sample_seed, 0x30C4), nullptr, i);
                        rec = sample_record_from_stats(stats, i, sample_seed);
                    } catch (const std::exception& ex) {
                        rec.ok = false;
                        rec.error = ex.what();
                        rec.temps.clear();
                    }
                    set.samples[i] = std::move(rec);
                    const int d = done.fetch_add(1) + 1;
                    if (progress) progress(p, L, d, cfg.n_samples);
                }
            };
            std::vector<std::thread> pool;
            const int n_threads = std::min(n_workers, cfg.n_samples);
            pool.reserve(n_threads);
            for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
            for (auto& t : pool) t.join();

            detail::flag_equilibration(set);
            store.sets[{p, L}] = std::move(set);
        }
    }
    return store;
}

// --- analysis driver ----------------------------------------------------------

struct PerPAnalysis {
    double p = 0.0;
    std::vector<Curve> curves;                 // one per size, ascending L
    std::vector<std::vector<double>> curve_se;  // bootstrap SE per curve point
    std::vector<CrossingPoint> crossings;
    bool has_tc = false;
    double T_c = 0.0, T_c_se = 0.0;
    std::vector<double> tc_resamples;
    int excluded = 0;  // samples flagged unequilibrated or failed
    std::string note;
};

struct ThresholdAnalysis {
    int d = 0;
    std::vector<PerPAnalysis> per_p;
    bool has_pc = false;
    double p_c = 0.0, p_c_se = 0.0;
    std::string bracket_note;
};

namespace detail {

inline SizeData size_data_from_set(const RecordSet& set, int* excluded) {
    SizeData sd;
    sd.L = set.L;
    sd.T = set.temperatures;
    for (size_t i = 0; i < set.samples.size(); ++i) {
        const SampleRecord& s = set.samples[i];
        const bool flagged =
            !set.verdicts.empty() && set.verdicts[i] == Equilibration::fail;
        if (!s.ok || flagged || s.temps.size() != set.temperatures.size()) {
            if (excluded) ++*excluded;
            continue;
        }
        std::vector<ChiTerms> row(s.temps.size());
        for (size_t t = 0; t < s.temps.size(); ++t)
            row[t] = {s.temps[t].chi0_mean, s.temps[t].chik_mean};
        sd.samples.push_back(std::move(row));
    }
    return sd;
}

inline std::vector<double> bootstrap_curve_se(const SizeData& sd, int resamples, uint64_t seed) {
    const size_t n_t = sd.T.size();
    std::vector<RunningStats> acc(n_t);
    Xoshiro256 rng(seed);
    const uint32_t n = static_cast<uint32_t>(sd.samples.size());
    if (n < 2) return std::vector<double>(n_t, 0.0);
    std::vector<int> idx(n);
    for (int r = 0; r < resamples; ++r) {
        for (auto& k : idx) k = static_cast<int>(rng.below(n));
        const Curve c = curve_from_samples(sd, &idx);
        size_t j = 0;
        for (size_t t = 0; t < n_t; ++t) {
            if (j < c.T.size() && c.T[j] == sd.T[t]) {
                acc[t].add(c.y[j]);
                ++j;
            }
        }
    }
    std::vector<double> se(n_t, 0.0);
    for (size_t t = 0; t < n_t; ++t) se[t] = acc[t].n > 1 ? std::sqrt(acc[t].variance()) : 0.0;
    return se;
}

}  // namespace detail

// Full finite-size-scaling analysis of a store: xi_L/L curves, size-pair
// crossings, extrapolated T_c(p) with bootstrap errors, and the Nishimori
// intersection p_c. Deterministic for a given store.
inline ThresholdAnalysis analyze(const ResultStore& store, int bootstrap_resamples = 500,
                                 const std::vector<double>* p_filter = nullptr) {
    ThresholdAnalysis out;
    out.d = store.config.d;

    std::vector<double> ps;
    for (const auto& [key, set] : store.sets) {
        (void)set;
        if (std::find(ps.begin(), ps.end(), key.first) == ps.end()) ps.push_back(key.first);
    }
    std::sort(ps.begin(), ps.end());

    for (double p : ps) {
        if (p_filter && std::find_if(p_filter->begin(), p_filter->end(), [&](double v) {
                            return std::fabs(v - p) < 1e-12;
                        }) == p_filter->end())
            continue;
        PerPAnalysis pa;
        pa.p = p;
        std::vector<SizeData> sizes;
        for (const auto& [key, set] : store.sets) {
            if (key.first != p) continue;
            int excl = 0;
            SizeData sd = detail::size_data_from_set(set, &excl);
            pa.excluded += excl;
            if (!sd.samples.empty()) sizes.push_back(std::move(sd));
        }
        std::sort(sizes.begin(), sizes.end(),
                  [](const SizeData& a, const SizeData& b) { return a.L < b.L; });
        if (sizes.empty()) {
            pa.note = "no usable samples";
            out.per_p.push_back(std::move(pa));
            continue;
        }
        for (const auto& sd : sizes) {
            pa.curves.push_back(curve_from_samples(sd));
            pa.curve_se.push_back(detail::bootstrap_curve_se(
                sd, bootstrap_resamples,
                derive_seed(store.config.seed, 0xC43E, std::bit_cast<uint64_t>(p), sd.L)));
        }
        if (sizes.size() < 2) {
            pa.note = "fewer than two sizes; no crossing analysis";
            out.per_p.push_back(std::move(pa));
            continue;
        }
        try {
            const Extrapolation ex = crossings_and_extrapolation(pa.curves, &pa.crossings);
            const BootstrapTc bt = bootstrap_Tc(
                sizes, bootstrap_resamples,
                derive_seed(store.config.seed, 0xB007, std::bit_cast<uint64_t>(p)));
            pa.has_tc = true;
            pa.T_c = ex.T_c;
            pa.T_c_se = bt.se;
            pa.tc_resamples = bt.resampled;
            if (!ex.extrapolated) pa.note = "single size pair; unextrapolated";
        } catch (const std::runtime_error&) {
            pa.note = "no crossing in the simulated window";
        }
        out.per_p.push_back(std::move(pa));
    }

    // phase boundary and Nishimori intersection
    std::vector<BoundaryPoint> boundary;
    std::vector<std::vector<double>> resamples;
    for (const auto& pa : out.per_p) {
        if (!pa.has_tc) continue;
        boundary.push_back({pa.p, pa.T_c, pa.T_c_se});
        resamples.push_back(pa.tc_resamples);
    }
    if (boundary.size() >= 2) {
        const Intersection is = threshold_intersection(boundary, out.d, &resamples);
        if (is.status == Intersection::Status::found) {
            out.has_pc = true;
            out.p_c = is.p_c;
            out.p_c_se = is.sigma;
        } else {
            std::ostringstream note;
            note << "no Nishimori intersection bracketed: T_c - T_N = " << is.sign_lo
                 << " at p=" << boundary.front().p << ", " << is.sign_hi
                 << " at p=" << boundary.back().p;
            out.bracket_note = note.str();
        }
    } else {
        out.bracket_note = "fewer than two boundary points; p_c not estimated";
    }
    return out;
}

inline std::string analysis_table(const ThresholdAnalysis& an) {
    std::ostringstream out;
    out << "d = " << an.d << "\n";
    for (const auto& pa : an.per_p) {
        out << "p = " << std::setw(8) << pa.p;
        if (pa.has_tc) {
            out << "  T_c = " << std::fixed << std::setprecision(5) << pa.T_c << " +/- "
                << pa.T_c_se << std::defaultfloat << std::setprecision(6);
            out << "  crossings:";
            for (const auto& c : pa.crossings)
                out << " (" << c.L1 << "," << c.L2 << ")@" << std::fixed << std::setprecision(4)
                    << c.T_star << std::defaultfloat << std::setprecision(6);
        }
        if (!pa.note.empty()) out << "  [" << pa.note << "]";
        if (pa.excluded > 0) out << "  excluded=" << pa.excluded;
        out << "\n";
    }
    if (an.has_pc)
        out << "p_c = " << std::fixed << std::setprecision(5) << an.p_c << " +/- " << an.p_c_se
            << std::defaultfloat << "\n";
    else if (!an.bracket_note.empty())
        out << an.bracket_note << "\n";
    return out.str();
}

// Plot-ready TSV files: per-p xi_L/L curves and the phase boundary with a
// sampled Nishimori line.
inline void write_analysis(const ThresholdAnalysis& an, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const auto& pa : an.per_p) {
        char name[64];
        std::snprintf(name, sizeof(name), "xi_d%d_p%.6f.tsv", an.d, pa.p);
        std::ofstream out(fs::path(dir) / name);
        out << "# L\tT\txi_over_L\tse\n";
        for (size_t i = 0; i < pa.curves.size(); ++i) {
            const Curve& c = pa.curves[i];
            size_t j = 0;
            for (size_t t = 0; t < c.T.size(); ++t, ++j)
                out << c.L << '\t' << format_double(c.T[t]) << '\t' << format_double(c.y[t])
                    << '\t'
                    << format_double(i < pa.curve_se.size() && t < pa.curve_se[i].size()
                                         ? pa.curve_se[i][t]
                                         : 0.0)
                    << "\n";
        }
        if (!pa.crossings.empty()) {
            std::snprintf(name, sizeof(name), "crossings_d%d_p%.6f.tsv", an.d, pa.p);
            std::ofstream cx(fs::path(dir) / name);
            cx << "# L1\tL2\tT_star\tinv_size\n";
            for (const auto& c : pa.crossings)
                cx << c.L1 << '\t' << c.L2 << '\t' << format_double(c.T_star) << '\t'
                   << format_double(2.0 / (c.L1 + c.L2)) << "\n";
        }
    }
    {
        char name[64];
        std::snprintf(name, sizeof(name), "boundary_d%d.tsv", an.d);
        std::ofstream out(fs::path(dir) / name);
        out << "# p\tT_c\tsigma\tT_nishimori\n";
        for (const auto& pa : an.per_p)
            if (pa.has_tc)
                out << format_double(pa.p) << '\t' << format_double(pa.T_c) << '\t'
                    << format_double(pa.T_c_se) << '\t'
                    << format_double(nishimori_temperature(an.d, pa.p)) << "\n";
        if (an.has_pc)
            out << "# p_c = " << format_double(an.p_c) << " +/- " << format_double(an.p_c_se)
                << "\n";
    }
    {
        char name[64];
        std::snprintf(name, sizeof(name), "nishimori_d%d.tsv", an.d);
        std::ofstream out(fs::path(dir) / name);
        out << "# p\tT_nishimori\n";
        const double p_max = ErrorModel::max_p(an.d);
        for (int i = 1; i <= 100; ++i) {
            const double p = p_max * i / 100.0;
            out << format_double(p) << '\t' << format_double(nishimori_temperature(an.d, p))
                << "\n";
        }
    }
}

// --- brute-force verification -------------------------------------------------

struct VerifyReport {
    int d = 0, L = 0;
    double p = 0.0, beta = 0.0;
    uint64_t seed = 0;
    ExactAverages exact;
    double mc_e = 0, mc_e_se = 0;
    double mc_chi0 = 0, mc_chi0_se = 0;
    double mc_chik = 0, mc_chik_se = 0;
    double z_e = 0, z_chi0 = 0, z_chik = 0;
    long long t_eq = 0;
};

// Exact enumeration versus tempered Monte Carlo, as z-scores of the MC
// statistical error. The MC estimate pools independent chains (fresh random
// starts, disjoint streams) and the error comes from the cross-chain
// scatter, which stays honest even where a single sequential-sweep chain
// mixes poorly (at beta = 0 and d = 2 one sweep is exactly a global shift).
// Each chain runs a short three-temperature ladder whose middle rung is
// exactly 1/beta (a single rung at beta = 0).
inline VerifyReport verify_bruteforce(int d, int L, double p, double beta, uint64_t seed,
                                      long long t_eq = 1LL << 12, int n_chains = 24) {
    const Lattice lat(L);
    VerifyReport rep;
    rep.d = d;
    rep.L = L;
    rep.p = p;
    rep.beta = beta;
    rep.seed = seed;
    rep.t_eq = t_eq;

    const DisorderRealization dis = sample_disorder(lat, ErrorModel(d, p), seed);
    rep.exact = exact_thermal_averages(dis, beta);

    TemperatureGrid grid;
    int mid = 0;
    if (beta == 0.0) {
        grid = TemperatureGrid::from_values({std::numeric_limits<double>::infinity()});
    } else {
        const double T = 1.0 / beta;
        grid = build_grid(T / 1.3, T * 1.3, 3);
        mid = 1;
        grid.T[mid] = T;  // geometric midpoint equals T up to rounding; pin it
    }

    RunningStats e_chains, chi0_chains, chik_chains;
    for (int c = 0; c < n_chains; ++c) {
        const SampleStats stats =
            run_sample(dis, grid, t_eq, 1, derive_seed(seed, 0xF00D, static_cast<uint64_t>(c)));
        const TempStats& ts = stats.per_temperature[mid];
        e_chains.add(ts.energy.total.mean);
        chi0_chains.add(ts.chi0.total.mean);
        chik_chains.add(ts.chik.total.mean);
    }
    rep.mc_e = e_chains.mean;
    rep.mc_chi0 = chi0_chains.mean;
    rep.mc_chik = chik_chains.mean;
    rep.mc_e_se = e_chains.std_error();
    rep.mc_chi0_se = chi0_chains.std_error();
    rep.mc_chik_se = chik_chains.std_error();
    auto z = [](double mc, double exact, double se) {
        const double diff = mc - exact;
        if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return diff / se;
    };
    rep.z_e = z(rep.mc_e, rep.exact.energy, rep.mc_e_se);
    rep.z_chi0 = z(rep.mc_chi0, rep.exact.chi0, rep.mc_chi0_se);
    rep.z_chik = z(rep.mc_chik, rep.exact.chik, rep.mc_chik_se);
    return rep;
}

}  // namespace dpotts
