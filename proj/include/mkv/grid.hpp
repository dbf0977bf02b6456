#pragma once

#include <cstddef>
#include <vector>

#include "mkv/errors.hpp"

namespace mkv {

// Uniform tensor grid over a box in R^P, cell-centered. Used for the
// configuration-space fields (FP marginals, the macro density, particle
// histograms); sharing one type keeps "matched grids" checks trivial.
struct RGrid {
    int P = 0;
    std::vector<int> n;
    std::vector<double> lo, hi, h;

    RGrid() = default;
    RGrid(std::vector<int> n_, std::vector<double> lo_, std::vector<double> hi_)
        : P(static_cast<int>(n_.size())), n(std::move(n_)), lo(std::move(lo_)),
          hi(std::move(hi_)) {
        if (lo.size() != n.size() || hi.size() != n.size())
            throw ConfigError("RGrid: inconsistent dimension counts");
        h.resize(P);
        for (int k = 0; k < P; ++k) {
            if (n[k] < 1 || !(lo[k] < hi[k])) throw ConfigError("RGrid: bad extents");
            h[k] = (hi[k] - lo[k]) / n[k];
        }
    }

    // P copies of [a,b] with m cells each.
    static RGrid uniform(int P, double a, double b, int m) {
        return RGrid(std::vector<int>(P, m), std::vector<double>(P, a),
                     std::vector<double>(P, b));
    }

    std::size_t cells() const {
        std::size_t c = 1;
        for (int k = 0; k < P; ++k) c *= static_cast<std::size_t>(n[k]);
        return c;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int k = 0; k < P; ++k) v *= h[k];
        return v;
    }

    // Row-major flattening, dimension 0 slowest.
    std::size_t flat(const int* idx) const {
        std::size_t f = 0;
        for (int k = 0; k < P; ++k)
            f = f * static_cast<std::size_t>(n[k]) + static_cast<std::size_t>(idx[k]);
        return f;
    }

    void unflatten(std::size_t f, int* idx) const {
        for (int k = P - 1; k >= 0; --k) {
            idx[k] = static_cast<int>(f % static_cast<std::size_t>(n[k]));
            f /= static_cast<std::size_t>(n[k]);
        }
    }

    double center(int k, int i) const { return lo[k] + (i + 0.5) * h[k]; }
    double face(int k, int i) const { return lo[k] + i * h[k]; }

    // Bin containing x along dimension k, clamped to the grid.
    int locate(int k, double x) const {
        int i = static_cast<int>((x - lo[k]) / h[k]);
        if (i < 0) i = 0;
        if (i >= n[k]) i = n[k] - 1;
        return i;
    }

    bool same_layout(const RGrid& o) const {
        if (P != o.P) return false;
        for (int k = 0; k < P; ++k)
            if (n[k] != o.n[k] || lo[k] != o.lo[k] || hi[k] != o.hi[k]) return false;
        return true;
    }
};

}  // namespace mkv
