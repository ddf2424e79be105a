// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cogisac/types.hpp"

namespace cogisac {

/// Colocated transmit/receive uniform planar arrays, half-wavelength spacing.
struct UpaConfig {
    int tx_x = 4;
    int tx_y = 4;
    int rx_x = 4;
    int rx_y = 4;

    int n_tx() const { return tx_x * tx_y; }
    int n_rx() const { return rx_x * rx_y; }
    /// Virtual channel count N = N_t * N_r.
    int n_virtual() const { return n_tx() * n_rx(); }

    void validate() const;

    /// Square arrays with `side x side` elements on both ends.
    static UpaConfig square(int side) { return {side, side, side, side}; }

    bool operator==(const UpaConfig&) const = default;
};

enum class ArraySide { Transmit, Receive };

struct SpatialBin {
    double nu_x = 0.0;
    double nu_y = 0.0;
    int index = 0;

    /// True when some (theta, phi) with theta in [0, pi/2) maps to this bin.
    bool has_physical_direction() const { return nu_x * nu_x + nu_y * nu_y <= 0.25; }
};

/// Uniform L_x x L_y discretization of [-0.5, 0.5]^2 in spatial frequency.
/// Bin index is row-major: m = i * L_y + j with i along nu_x.
class SpatialGrid {
public:
    static SpatialGrid make(int lx, int ly);

    int lx() const { return lx_; }
    int ly() const { return ly_; }
    int size() const { return static_cast<int>(bins_.size()); }

    const SpatialBin& operator[](int m) const { return bins_.at(static_cast<std::size_t>(m)); }
    std::span<const SpatialBin> bins() const { return bins_; }

    int index_of(int i, int j) const { return i * ly_ + j; }
    std::pair<int, int> coords(int m) const { return {m / ly_, m % ly_}; }

    /// Bin whose centre lies within `tol` of (nu_x, nu_y) in both axes.
    std::optional<int> find(double nu_x, double nu_y, double tol = 1e-9) const;

    /// Grid abscissa for point `i` of an axis with `count` points.
    static double axis_value(int i, int count);

private:
    int lx_ = 0;
    int ly_ = 0;
    std::vector<SpatialBin> bins_;
};

inline SpatialGrid make_grid(int lx, int ly) { return SpatialGrid::make(lx, ly); }

/// Planar steering vector a_x (x) a_y with entry (p, q) = exp(j 2 pi (p nu_x + q nu_y)),
/// stored at position p * elems_y + q.
CVec steering(int elems_x, int elems_y, double nu_x, double nu_y);

CVec steering(const UpaConfig& upa, ArraySide side, const SpatialBin& bin);

/// Virtual-array response h = a_r (x) (a_t^T R), length N_t * N_r.
/// Entry i * N_t + k holds a_r[i] * (a_t^T R)[k].
CVec effective_channel(const CVec& a_t, const CVec& a_r, const CMat& R);

}  // namespace cogisac
