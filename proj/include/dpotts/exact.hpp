#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dpotts/disorder.hpp"
#include "dpotts/observables.hpp"
#include "dpotts/potts.hpp"

namespace dpotts {

struct ExactAverages {
    double log_z;      // ln Z, shifted energies summed exactly
    double energy;     // <H>
    double chi0;       // <chi0_term>
    double chik;       // <chik_term>
    long long states;  // d^(L^2)
};

// Thermal averages by full enumeration of all d^(L^2) spin states at fixed
// disorder. Weights are exp(-beta (H - H_min)) to keep sums in range.
// Refuses state spaces above 10^7.
inline ExactAverages exact_thermal_averages(const DisorderRealization& dis, double beta) {
    const Lattice& lat = *dis.lat;
    const int n = lat.n_vertices();
    const int d = dis.d;

    double states_d = std::pow(static_cast<double>(d), n);
    if (states_d > 1e7) throw std::invalid_argument("exact_thermal_averages: state space too large");
    const long long n_states = static_cast<long long>(std::llround(states_d));

    std::vector<uint8_t> spins(n, 0);
    const double h_min = -2.0 * n;  // energy is bounded below by -2 L^2

    double z = 0.0, sum_e = 0.0, sum_chi0 = 0.0, sum_chik = 0.0;
    for (long long idx = 0;; ++idx) {
        const double h = static_cast<double>(energy_uniform(spins, dis));
        const double w = std::exp(-beta * (h - h_min));
        const ChiTerms chi = measure(spins, lat, d);
        z += w;
        sum_e += w * h;
        sum_chi0 += w * chi.chi0;
        sum_chik += w * chi.chik;

        // odometer increment
        int pos = 0;
        while (pos < n) {
            if (++spins[pos] < d) break;
            spins[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
    }

    ExactAverages out;
    out.log_z = std::log(z) - beta * h_min;
    out.energy = sum_e / z;
    out.chi0 = sum_chi0 / z;
    out.chik = sum_chik / z;
    out.states = n_states;
    return out;
}

}  // namespace dpotts
