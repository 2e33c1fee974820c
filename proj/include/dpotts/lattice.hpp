#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dpotts {

// L x L square lattice on a torus.
//
// Vertices are indexed row-major, v = y*L + x. Every vertex owns two
// directed edges: edge 2v points right (to x+1) and edge 2v+1 points down
// (to y+1), both with periodic wrap. The arrow fixes the endpoint order of
// an edge: l1 is the origin, l2 the tip.
//
// Plaquette p = y*L + x is the face whose top-left corner is vertex (x,y).
// Its boundary is read clockwise from the top edge; the top and right edges
// are crossed along their arrows (sign +1), the bottom and left edges
// against them (sign -1). With this choice the signed sum of the vertex
// differences S_l2 - S_l1 around any plaquette vanishes identically.
class Lattice {
  public:
    explicit Lattice(int L) : L_(L) {
        if (L < 2) throw std::invalid_argument("Lattice: L must be >= 2");
        const int n = L * L;
        right_.resize(n);
        left_.resize(n);
        up_.resize(n);
        down_.resize(n);
        for (int y = 0; y < L; ++y) {
            const int yp = (y + 1) % L;
            const int ym = (y - 1 + L) % L;
            for (int x = 0; x < L; ++x) {
                const int xp = (x + 1) % L;
                const int xm = (x - 1 + L) % L;
                const int v = y * L + x;
                right_[v] = y * L + xp;
                left_[v] = y * L + xm;
                down_[v] = yp * L + x;
                up_[v] = ym * L + x;
            }
        }
    }

    int size() const { return L_; }
    int n_vertices() const { return L_ * L_; }
    int n_edges() const { return 2 * L_ * L_; }
    int n_plaquettes() const { return L_ * L_; }

    int x_of(int v) const { return v % L_; }
    int y_of(int v) const { return v / L_; }
    int vertex_at(int x, int y) const { return y * L_ + x; }

    int right_of(int v) const { return right_[v]; }
    int left_of(int v) const { return left_[v]; }
    int up_of(int v) const { return up_[v]; }
    int down_of(int v) const { return down_[v]; }

    static int right_edge(int v) { return 2 * v; }
    static int down_edge(int v) { return 2 * v + 1; }

    struct EdgeEnds {
        int l1;  // arrow origin
        int l2;  // arrow tip
    };

    EdgeEnds edge_endpoints(int e) const {
        if (e < 0 || e >= n_edges()) throw std::out_of_range("Lattice: edge index");
        const int v = e / 2;
        return (e & 1) ? EdgeEnds{v, down_[v]} : EdgeEnds{v, right_[v]};
    }

    // The four (edge, sign) incidences of a plaquette, ordered
    // (top,+1), (right,+1), (bottom,-1), (left,-1).
    std::array<std::pair<int, int>, 4> incidence(int p) const {
        if (p < 0 || p >= n_plaquettes()) throw std::out_of_range("Lattice: plaquette index");
        const int v = p;  // top-left corner vertex
        return {{{right_edge(v), +1},
                 {down_edge(right_[v]), +1},
                 {right_edge(down_[v]), -1},
                 {down_edge(v), -1}}};
    }

  private:
    int L_;
    std::vector<int32_t> right_, left_, up_, down_;
};

}  // namespace dpotts
