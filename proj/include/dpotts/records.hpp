#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpotts/config.hpp"
#include "dpotts/observables.hpp"
#include "dpotts/tempering.hpp"

namespace dpotts {

// Aggregated results of one (disorder sample, temperature): thermal means
// over the measurement phase plus the logarithmic bins (count, mean,
// variance of the measurements) needed for the equilibration audit.
struct BinSummary {
    long long n = 0;
    double mean = 0.0;
    double var = 0.0;
};

struct TempRecord {
    int t_index = 0;
    long long n_meas = 0;
    double e_mean = 0.0, chi0_mean = 0.0, chik_mean = 0.0;
    double acceptance = 0.0;
    std::vector<BinSummary> bins_e, bins_chi0, bins_chik;
};

struct SampleRecord {
    int sample_id = 0;
    uint64_t seed = 0;
    bool ok = true;            // false: the run failed (resources); payload absent
    std::string error;
    std::vector<TempRecord> temps;
    std::vector<double> exchange_rate;         // per adjacent pair
    std::vector<uint32_t> visits_bottom, visits_top;  // per replica
};

// All samples of one (p, L) cell, with the schedule they were run under.
struct RecordSet {
    double p = 0.0;
    int L = 0;
    std::vector<double> temperatures;
    long long t_eq = 0;
    int n_bins = 0;
    int measure_every = 1;
    std::vector<SampleRecord> samples;
    std::vector<Equilibration> verdicts;  // parallel to samples (set by the campaign)
    std::vector<double> verdict_z;
};

struct ResultStore {
    CampaignConfig config;
    // keyed by (p, L); doubles round-trip exactly through the %.17g records
    std::map<std::pair<double, int>, RecordSet> sets;
};

namespace detail {

inline std::string bins_to_string(const std::vector<BinSummary>& bins) {
    if (bins.empty()) return "-";
    std::ostringstream out;
    for (size_t i = 0; i < bins.size(); ++i) {
        if (i) out << ';';
        out << bins[i].n << ':' << format_double(bins[i].mean) << ':'
            << format_double(bins[i].var);
    }
    return out.str();
}

inline std::vector<BinSummary> bins_from_string(const std::string& s) {
    std::vector<BinSummary> bins;
    if (s == "-") return bins;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        BinSummary b;
        if (std::sscanf(item.c_str(), "%lld:%lf:%lf", &b.n, &b.mean, &b.var) != 3)
            throw std::runtime_error("records: bad bin field '" + item + "'");
        bins.push_back(b);
    }
    return bins;
}

template <typename T>
std::string join(const std::vector<T>& v, char sep = ',') {
    std::ostringstream out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out << sep;
        if constexpr (std::is_same_v<T, double>)
            out << format_double(v[i]);
        else
            out << v[i];
    }
    return out.str();
}

template <typename T>
std::vector<T> split_csv(const std::string& s) {
    std::vector<T> out;
    if (s.empty() || s == "-") return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream in(item);
        T v;
        in >> v;
        if (in.fail()) throw std::runtime_error("records: bad csv field '" + item + "'");
        out.push_back(v);
    }
    return out;
}

inline std::string set_filename(double p, int L) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "records_p%.6f_L%d.tsv", p, L);
    return buf;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, '\t')) out.push_back(item);
    return out;
}

}  // namespace detail

inline TempRecord temp_record_from_stats(const TempStats& ts, int t_index) {
    TempRecord r;
    r.t_index = t_index;
    r.n_meas = ts.energy.total.n;
    r.e_mean = ts.energy.total.mean;
    r.chi0_mean = ts.chi0.total.mean;
    r.chik_mean = ts.chik.total.mean;
    r.acceptance = ts.metropolis_acceptance;
    auto conv = [](const std::vector<RunningStats>& bins) {
        std::vector<BinSummary> out;
        out.reserve(bins.size());
        for (const auto& b : bins) out.push_back({b.n, b.mean, b.variance()});
        return out;
    };
    r.bins_e = conv(ts.energy.bins);
    r.bins_chi0 = conv(ts.chi0.bins);
    r.bins_chik = conv(ts.chik.bins);
    return r;
}

inline SampleRecord sample_record_from_stats(const SampleStats& stats, int sample_id,
                                             uint64_t seed) {
    SampleRecord rec;
    rec.sample_id = sample_id;
    rec.seed = seed;
    for (int t = 0; t < static_cast<int>(stats.per_temperature.size()); ++t)
        rec.temps.push_back(temp_record_from_stats(stats.per_temperature[t], t));
    for (const auto& pair : stats.exchange) rec.exchange_rate.push_back(pair.rate());
    rec.visits_bottom = stats.visits_bottom;
    rec.visits_top = stats.visits_top;
    return rec;
}

inline void write_record_set(std::ostream& out, const RecordSet& set, int d) {
    out << "# dpotts-records v1\n";
    out << "# d=" << d << " p=" << format_double(set.p) << " L=" << set.L
        << " t_eq=" << set.t_eq << " n_bins=" << set.n_bins
        << " measure_every=" << set.measure_every << "\n";
    out << "# T\t" << detail::join(set.temperatures, '\t') << "\n";
    out << "# S-columns: sample seed ok exchange_rates visits_bottom visits_top error\n";
    out << "# M-columns: sample t_index n_meas e_mean chi0_mean chik_mean acceptance "
           "bins_e bins_chi0 bins_chik\n";
    for (const auto& s : set.samples) {
        out << "S\t" << s.sample_id << '\t' << s.seed << '\t' << (s.ok ? 1 : 0) << '\t'
            << (s.exchange_rate.empty() ? "-" : detail::join(s.exchange_rate)) << '\t'
            << (s.visits_bottom.empty() ? "-" : detail::join(s.visits_bottom)) << '\t'
            << (s.visits_top.empty() ? "-" : detail::join(s.visits_top)) << '\t'
            << (s.error.empty() ? "-" : s.error) << "\n";
        for (const auto& t : s.temps) {
            out << "M\t" << s.sample_id << '\t' << t.t_index << '\t' << t.n_meas << '\t'
                << format_double(t.e_mean) << '\t' << format_double(t.chi0_mean) << '\t'
                << format_double(t.chik_mean) << '\t' << format_double(t.acceptance) << '\t'
                << detail::bins_to_string(t.bins_e) << '\t'
                << detail::bins_to_string(t.bins_chi0) << '\t'
                << detail::bins_to_string(t.bins_chik) << "\n";
        }
    }
}

inline RecordSet read_record_set(std::istream& in) {
    RecordSet set;
    std::string line;
    std::map<int, size_t> sample_index;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# d=", 0) == 0) {
                int d = 0, L = 0, me = 1, nb = 0;
                long long teq = 0;
                double p = 0;
                if (std::sscanf(line.c_str(), "# d=%d p=%lf L=%d t_eq=%lld n_bins=%d measure_every=%d",
                                &d, &p, &L, &teq, &nb, &me) != 6)
                    throw std::runtime_error("records: bad header line: " + line);
                set.p = p;
                set.L = L;
                set.t_eq = teq;
                set.n_bins = nb;
                set.measure_every = me;
            } else if (line.rfind("# T\t", 0) == 0) {
                const auto fields = detail::split_tabs(line.substr(4));
                for (const auto& f : fields)
                    set.temperatures.push_back(detail::parse_number<double>(f, "T"));
            }
            continue;
        }
        const auto f = detail::split_tabs(line);
        if (f[0] == "S") {
            if (f.size() != 8) throw std::runtime_error("records: bad S line");
            SampleRecord s;
            s.sample_id = detail::parse_number<int>(f[1], "sample");
            s.seed = detail::parse_number<uint64_t>(f[2], "seed");
            s.ok = f[3] == "1";
            s.exchange_rate = detail::split_csv<double>(f[4]);
            s.visits_bottom = detail::split_csv<uint32_t>(f[5]);
            s.visits_top = detail::split_csv<uint32_t>(f[6]);
            if (f[7] != "-") s.error = f[7];
            sample_index[s.sample_id] = set.samples.size();
            set.samples.push_back(std::move(s));
        } else if (f[0] == "M") {
            if (f.size() != 11) throw std::runtime_error("records: bad M line");
            const int sid = detail::parse_number<int>(f[1], "sample");
            const auto it = sample_index.find(sid);
            if (it == sample_index.end())
                throw std::runtime_error("records: M line before its S line");
            TempRecord t;
            t.t_index = detail::parse_number<int>(f[2], "t_index");
            t.n_meas = detail::parse_number<long long>(f[3], "n_meas");
            t.e_mean = detail::parse_number<double>(f[4], "e_mean");
            t.chi0_mean = detail::parse_number<double>(f[5], "chi0_mean");
            t.chik_mean = detail::parse_number<double>(f[6], "chik_mean");
            t.acceptance = detail::parse_number<double>(f[7], "acceptance");
            t.bins_e = detail::bins_from_string(f[8]);
            t.bins_chi0 = detail::bins_from_string(f[9]);
            t.bins_chik = detail::bins_from_string(f[10]);
            set.samples[it->second].temps.push_back(std::move(t));
        } else {
            throw std::runtime_error("records: unknown line kind '" + f[0] + "'");
        }
    }
    return set;
}

inline const char* verdict_name(Equilibration v) {
    switch (v) {
        case Equilibration::pass: return "pass";
        case Equilibration::fail: return "fail";
        default: return "indeterminate";
    }
}

inline Equilibration verdict_from_name(const std::string& s) {
    if (s == "pass") return Equilibration::pass;
    if (s == "fail") return Equilibration::fail;
    if (s == "indeterminate") return Equilibration::indeterminate;
    throw std::runtime_error("records: bad verdict '" + s + "'");
}

inline void save_store(const ResultStore& store, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / "config.txt");
        out << echo_config(store.config);
    }
    for (const auto& [key, set] : store.sets) {
        std::ofstream out(fs::path(dir) / detail::set_filename(key.first, key.second));
        write_record_set(out, set, store.config.d);
        if (!set.verdicts.empty()) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "equilibration_p%.6f_L%d.tsv", key.first, key.second);
            std::ofstream vq(fs::path(dir) / buf);
            vq << "# sample\tverdict\tmax_z\n";
            for (size_t i = 0; i < set.verdicts.size(); ++i)
                vq << set.samples[i].sample_id << '\t' << verdict_name(set.verdicts[i]) << '\t'
                   << format_double(set.verdict_z[i]) << "\n";
        }
    }
}

inline ResultStore load_store(const std::string& dir) {
    namespace fs = std::filesystem;
    ResultStore store;
    const fs::path root(dir);
    if (!fs::exists(root / "config.txt"))
        throw std::runtime_error("store: missing " + (root / "config.txt").string());
    {
        std::ifstream in(root / "config.txt");
        store.config = parse_config(in);
    }
    for (const auto& entry : fs::directory_iterator(root)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("records_", 0) != 0) continue;
        std::ifstream in(entry.path());
        RecordSet set = read_record_set(in);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "equilibration_p%.6f_L%d.tsv", set.p, set.L);
        if (fs::exists(root / buf)) {
            std::ifstream vq(root / buf);
            std::string line;
            std::map<int, std::pair<Equilibration, double>> by_id;
            while (std::getline(vq, line)) {
                if (line.empty() || line[0] == '#') continue;
                const auto f = detail::split_tabs(line);
                if (f.size() != 3) throw std::runtime_error("store: bad verdict line");
                by_id[detail::parse_number<int>(f[0], "sample")] = {
                    verdict_from_name(f[1]), detail::parse_number<double>(f[2], "max_z")};
            }
            for (const auto& s : set.samples) {
                const auto it = by_id.find(s.sample_id);
                set.verdicts.push_back(it == by_id.end() ? Equilibration::indeterminate
                                                         : it->second.first);
                set.verdict_z.push_back(it == by_id.end() ? 0.0 : it->second.second);
            }
        }
        store.sets[{set.p, set.L}] = std::move(set);
    }
    return store;
}

}  // namespace dpotts
