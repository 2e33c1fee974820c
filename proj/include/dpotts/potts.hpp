#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpotts/disorder.hpp"
#include "dpotts/lattice.hpp"
#include "dpotts/rng.hpp"

namespace dpotts {

// One Potts spin configuration bound to a temperature slot. The energy is
// maintained incrementally by metropolis_sweep; it is an exact integer
// (every edge contributes 0 or -1).
struct Replica {
    std::vector<uint8_t> spins;  // S_v in 0..d-1
    long long energy = 0;
    int temperature_slot = 0;
};

// H(E) = -sum_l delta(eps_l + S_l1 - S_l2 mod d, 0): minus the number of
// edges whose spin difference matches the quenched shift.
inline long long energy_uniform(std::span<const uint8_t> spins, const DisorderRealization& dis) {
    const Lattice& lat = *dis.lat;
    if (static_cast<int>(spins.size()) != lat.n_vertices())
        throw std::invalid_argument("energy_uniform: spins size mismatch");
    const int d = dis.d;
    long long satisfied = 0;
    for (int v = 0; v < lat.n_vertices(); ++v) {
        const int s = spins[v];
        int tr = s + dis.eps[Lattice::right_edge(v)] - spins[lat.right_of(v)];
        int td = s + dis.eps[Lattice::down_edge(v)] - spins[lat.down_of(v)];
        satisfied += (tr % d == 0) + (td % d == 0);
    }
    return -satisfied;
}

inline Replica make_random_replica(const DisorderRealization& dis, Xoshiro256& rng,
                                   int temperature_slot = 0) {
    Replica rep;
    rep.spins.resize(dis.lat->n_vertices());
    for (auto& s : rep.spins) s = static_cast<uint8_t>(rng.below(static_cast<uint32_t>(dis.d)));
    rep.energy = energy_uniform(rep.spins, dis);
    rep.temperature_slot = temperature_slot;
    return rep;
}

// Interaction constants J_eps of the general Hamiltonian, tied to an error
// model through p_eps = exp(-beta J_eps).
struct CouplingTable {
    std::vector<double> J;

    static CouplingTable from_error_model(const ErrorModel& model, double beta) {
        if (!(beta > 0.0)) throw std::invalid_argument("CouplingTable: beta must be > 0");
        if (model.p <= 0.0 || model.p >= 1.0)
            throw std::invalid_argument("CouplingTable: need 0 < p < 1");
        CouplingTable t;
        t.J.resize(model.d);
        t.J[0] = -std::log(1.0 - model.p) / beta;
        for (int e = 1; e < model.d; ++e) t.J[e] = -std::log(model.p_each()) / beta;
        return t;
    }
};

// General-couplings energy H = sum_l J_{(eps_l + S_l1 - S_l2) mod d}.
// With the couplings of CouplingTable::from_error_model this ranks states
// exactly like energy_uniform (up to an additive constant and scale).
inline double energy_general(std::span<const uint8_t> spins, const DisorderRealization& dis,
                             const CouplingTable& couplings) {
    const Lattice& lat = *dis.lat;
    if (static_cast<int>(spins.size()) != lat.n_vertices())
        throw std::invalid_argument("energy_general: spins size mismatch");
    const int d = dis.d;
    if (static_cast<int>(couplings.J.size()) != d)
        throw std::invalid_argument("energy_general: couplings length != d");
    double h = 0.0;
    for (int v = 0; v < lat.n_vertices(); ++v) {
        const int s = spins[v];
        int tr = (s + dis.eps[Lattice::right_edge(v)] - spins[lat.right_of(v)]) % d;
        int td = (s + dis.eps[Lattice::down_edge(v)] - spins[lat.down_of(v)]) % d;
        if (tr < 0) tr += d;
        if (td < 0) td += d;
        h += couplings.J[tr] + couplings.J[td];
    }
    return h;
}

namespace detail {
// Acceptance thresholds for integer energy increases 1..4, as raw 64-bit
// cutoffs so the hot loop compares RNG words directly.
struct AcceptTable {
    uint64_t thr[5];
    bool always;  // beta == 0

    explicit AcceptTable(double beta) : always(beta == 0.0) {
        thr[0] = ~0ull;
        for (int k = 1; k <= 4; ++k) {
            const double a = std::exp(-beta * k);
            thr[k] = a >= 1.0 ? ~0ull : static_cast<uint64_t>(a * 18446744073709551616.0);
        }
    }
};

inline int sub_mod(int a, int b, int d) {
    int t = a - b;
    return t < 0 ? t + d : t;
}
inline int add_mod(int a, int b, int d) {
    int t = a + b;
    return t >= d ? t - d : t;
}
}  // namespace detail

// One sweep = N single-spin Metropolis proposals in sequential site order.
// Each proposal picks one of the d-1 other values uniformly and accepts
// with min(1, exp(-beta dE)), dE computed from the 4 incident edges.
// Returns the acceptance fraction; the cached energy is updated in place.
inline double metropolis_sweep(Replica& rep, const DisorderRealization& dis, double beta,
                               Xoshiro256& rng) {
    const Lattice& lat = *dis.lat;
    const int n = lat.n_vertices();
    const int d = dis.d;
    const uint32_t dm1 = static_cast<uint32_t>(d - 1);
    const detail::AcceptTable acc(beta);
    const uint8_t* eps = dis.eps.data();
    uint8_t* s = rep.spins.data();
    long long accepted = 0;
    long long denergy = 0;

    for (int v = 0; v < n; ++v) {
        const int vr = lat.right_of(v), vd = lat.down_of(v);
        const int vl = lat.left_of(v), vu = lat.up_of(v);
        // value of S_v that would satisfy each incident edge
        const int ar = detail::sub_mod(s[vr], eps[Lattice::right_edge(v)], d);
        const int ad = detail::sub_mod(s[vd], eps[Lattice::down_edge(v)], d);
        const int al = detail::add_mod(s[vl], eps[Lattice::right_edge(vl)], d);
        const int au = detail::add_mod(s[vu], eps[Lattice::down_edge(vu)], d);

        const int old = s[v];
        int prop = old + 1 + static_cast<int>(rng.below(dm1));
        if (prop >= d) prop -= d;

        const int c_old = (old == ar) + (old == ad) + (old == al) + (old == au);
        const int c_new = (prop == ar) + (prop == ad) + (prop == al) + (prop == au);
        const int de = c_old - c_new;

        if (de <= 0 || acc.always || rng.next() < acc.thr[de]) {
            s[v] = static_cast<uint8_t>(prop);
            denergy += de;
            ++accepted;
        }
    }
    rep.energy += denergy;
#ifndef NDEBUG
    assert(rep.energy == energy_uniform(rep.spins, dis));
#endif
    return static_cast<double>(accepted) / n;
}

// Simplex (hyper-tetrahedron) representation: state s of d maps to a
// (d-1)-component unit vector; distinct states have dot product -1/(d-1)
// and the d vectors sum to zero. Built from the Helmert basis of the
// hyperplane orthogonal to (1,...,1).
inline std::vector<double> simplex_vector(int d, int s) {
    if (d < 2) throw std::invalid_argument("simplex_vector: d must be >= 2");
    if (s < 0 || s >= d) throw std::out_of_range("simplex_vector: state out of range");
    std::vector<double> v(d - 1, 0.0);
    const double scale = std::sqrt(static_cast<double>(d) / (d - 1));
    for (int j = 1; j < d; ++j) {
        const double norm = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
        double h;
        if (s < j)
            h = norm;
        else if (s == j)
            h = -j * norm;
        else
            h = 0.0;
        v[j - 1] = scale * h;
    }
    return v;
}

}  // namespace dpotts
