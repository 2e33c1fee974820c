#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpotts/disorder.hpp"
#include "dpotts/tempering.hpp"

namespace dpotts {

// Campaign parameters, one row of a simulation plan: which (d, p, L) grid to
// run, how many disorder samples, and the tempering schedule. t_eq = 2^b.
struct CampaignConfig {
    int d = 3;
    std::vector<double> p;
    std::vector<int> L;
    int n_samples = 1;
    int b = 14;
    double t_min = 0.60;
    double t_max = 1.40;
    int n_temps = 24;
    GridSpacing spacing = GridSpacing::geometric;
    uint64_t seed = 1;
    int measure_every = 1;
    int workers = 0;  // 0 = hardware concurrency

    long long t_eq() const { return 1LL << b; }

    void validate() const {
        if (d < 2 || d > 255) throw std::invalid_argument("config: d must be in [2, 255]");
        if (p.empty()) throw std::invalid_argument("config: p list is empty");
        for (double pp : p)
            if (pp < 0.0 || pp > ErrorModel::max_p(d))
                throw std::invalid_argument("config: p outside [0, (d-1)/d]");
        if (L.empty()) throw std::invalid_argument("config: L list is empty");
        for (int l : L)
            if (l < 2) throw std::invalid_argument("config: L must be >= 2");
        if (n_samples < 1) throw std::invalid_argument("config: n_samples must be >= 1");
        if (b < 1 || b > 40) throw std::invalid_argument("config: b must be in [1, 40]");
        if (!(t_min > 0.0 && t_min < t_max))
            throw std::invalid_argument("config: need 0 < t_min < t_max");
        if (n_temps < 2) throw std::invalid_argument("config: n_temps must be >= 2");
        if (measure_every < 1) throw std::invalid_argument("config: measure_every must be >= 1");
        if (workers < 0) throw std::invalid_argument("config: workers must be >= 0");
    }
};

namespace detail {
inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

template <typename T>
T parse_number(const std::string& tok, const char* key) {
    std::istringstream in(tok);
    T v;
    in >> v;
    if (in.fail() || !in.eof())
        throw std::invalid_argument(std::string("config: bad value for ") + key + ": " + tok);
    return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& val, const char* key) {
    std::vector<T> out;
    std::string item;
    std::istringstream in(val);
    while (in >> item) {
        // allow comma separators as well as whitespace
        std::stringstream ss(item);
        std::string piece;
        while (std::getline(ss, piece, ','))
            if (!piece.empty()) out.push_back(parse_number<T>(piece, key));
    }
    if (out.empty()) throw std::invalid_argument(std::string("config: empty list for ") + key);
    return out;
}
}  // namespace detail

inline CampaignConfig parse_config(std::istream& in) {
    CampaignConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));

        if (key == "d")
            cfg.d = detail::parse_number<int>(val, "d");
        else if (key == "p")
            cfg.p = detail::parse_list<double>(val, "p");
        else if (key == "L")
            cfg.L = detail::parse_list<int>(val, "L");
        else if (key == "n_samples")
            cfg.n_samples = detail::parse_number<int>(val, "n_samples");
        else if (key == "b")
            cfg.b = detail::parse_number<int>(val, "b");
        else if (key == "t_min")
            cfg.t_min = detail::parse_number<double>(val, "t_min");
        else if (key == "t_max")
            cfg.t_max = detail::parse_number<double>(val, "t_max");
        else if (key == "n_temps")
            cfg.n_temps = detail::parse_number<int>(val, "n_temps");
        else if (key == "spacing") {
            if (val == "geometric")
                cfg.spacing = GridSpacing::geometric;
            else if (val == "linear")
                cfg.spacing = GridSpacing::linear;
            else
                throw std::invalid_argument("config: spacing must be geometric or linear");
        } else if (key == "seed")
            cfg.seed = detail::parse_number<uint64_t>(val, "seed");
        else if (key == "measure_every")
            cfg.measure_every = detail::parse_number<int>(val, "measure_every");
        else if (key == "workers")
            cfg.workers = detail::parse_number<int>(val, "workers");
        else
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    cfg.validate();
    std::sort(cfg.L.begin(), cfg.L.end());
    return cfg;
}

inline CampaignConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    return parse_config(in);
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Canonical echo: parse(echo(cfg)) reproduces every field.
inline std::string echo_config(const CampaignConfig& cfg) {
    std::ostringstream out;
    out << "d = " << cfg.d << "\n";
    out << "p =";
    for (double v : cfg.p) out << ' ' << format_double(v);
    out << "\nL =";
    for (int v : cfg.L) out << ' ' << v;
    out << "\nn_samples = " << cfg.n_samples << "\n";
    out << "b = " << cfg.b << "\n";
    out << "t_min = " << format_double(cfg.t_min) << "\n";
    out << "t_max = " << format_double(cfg.t_max) << "\n";
    out << "n_temps = " << cfg.n_temps << "\n";
    out << "spacing = " << (cfg.spacing == GridSpacing::geometric ? "geometric" : "linear")
        << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "measure_every = " << cfg.measure_every << "\n";
    out << "workers = " << cfg.workers << "\n";
    return out.str();
}

}  // namespace dpotts
