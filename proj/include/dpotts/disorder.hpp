#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpotts/lattice.hpp"
#include "dpotts/rng.hpp"

namespace dpotts {

// Uniform qudit error model: an edge is left alone with probability 1-p and
// shifted by each of the d-1 non-trivial values with probability p/(d-1).
struct ErrorModel {
    int d;
    double p;

    ErrorModel(int d_, double p_) : d(d_), p(p_) {
        if (d < 2) throw std::invalid_argument("ErrorModel: d must be >= 2");
        if (!(p >= 0.0 && p <= max_p(d)))
            throw std::invalid_argument("ErrorModel: p outside [0, (d-1)/d]");
    }

    // p = (d-1)/d is the maximally mixed point; beyond it the Boltzmann
    // mapping has negative temperature.
    static double max_p(int d) { return static_cast<double>(d - 1) / d; }

    double p_each() const { return p / (d - 1); }
};

// One quenched error configuration E = {eps_l}, plus the seed it was drawn
// from so it can be regenerated bit-exactly.
struct DisorderRealization {
    const Lattice* lat;
    int d;
    std::vector<uint8_t> eps;  // one value in 0..d-1 per edge
    uint64_t seed;
};

inline DisorderRealization sample_disorder(const Lattice& lat, const ErrorModel& model,
                                           uint64_t seed) {
    DisorderRealization dis{&lat, model.d, {}, seed};
    dis.eps.assign(lat.n_edges(), 0);
    Xoshiro256 rng(seed);
    const double p = model.p;
    const uint32_t m = static_cast<uint32_t>(model.d - 1);
    for (auto& e : dis.eps) {
        if (rng.uniform() < p) e = static_cast<uint8_t>(1 + rng.below(m));
    }
    return dis;
}

// Nishimori inverse temperature beta(p) = ln[(d-1)(1-p)/p]. At this beta the
// Boltzmann weight of a state equals the a-priori probability of the error
// configuration it represents. Returns +infinity at p = 0 and 0 at the
// maximally mixed point p = (d-1)/d.
inline double nishimori_beta(int d, double p) {
    if (d < 2) throw std::invalid_argument("nishimori_beta: d must be >= 2");
    if (p < 0.0 || p > ErrorModel::max_p(d))
        throw std::invalid_argument("nishimori_beta: p outside [0, (d-1)/d]");
    if (p == 0.0) return std::numeric_limits<double>::infinity();
    return std::log((d - 1) * (1.0 - p) / p);
}

inline double nishimori_temperature(int d, double p) {
    const double beta = nishimori_beta(d, p);
    return beta == std::numeric_limits<double>::infinity() ? 0.0 : 1.0 / beta;
}

namespace detail {
// Signed plaquette sum of per-edge values, reduced mod d.
inline std::vector<uint8_t> plaquette_charge(const Lattice& lat, std::span<const uint8_t> edge_vals,
                                             int d) {
    std::vector<uint8_t> n(lat.n_plaquettes());
    for (int p = 0; p < lat.n_plaquettes(); ++p) {
        int acc = 0;
        for (const auto& [e, sign] : lat.incidence(p)) acc += sign * edge_vals[e];
        acc %= d;
        if (acc < 0) acc += d;
        n[p] = static_cast<uint8_t>(acc);
    }
    return n;
}
}  // namespace detail

// Anyon syndrome n_p = (eps_top + eps_right - eps_bottom - eps_left) mod d.
inline std::vector<uint8_t> syndrome(const DisorderRealization& dis) {
    return detail::plaquette_charge(*dis.lat, dis.eps, dis.d);
}

// Per-edge differences kappa_l = (S_l2 - S_l1) mod d of a vertex spin
// configuration. Their syndrome is identically zero.
inline std::vector<uint8_t> gauge_field(std::span<const uint8_t> spins, const Lattice& lat,
                                        int d) {
    if (static_cast<int>(spins.size()) != lat.n_vertices())
        throw std::invalid_argument("gauge_field: spins size mismatch");
    std::vector<uint8_t> kappa(lat.n_edges());
    for (int e = 0; e < lat.n_edges(); ++e) {
        const auto [l1, l2] = lat.edge_endpoints(e);
        int k = static_cast<int>(spins[l2]) - static_cast<int>(spins[l1]);
        if (k < 0) k += d;
        kappa[e] = static_cast<uint8_t>(k);
    }
    return kappa;
}

}  // namespace dpotts
