// SPDX-License-Identifier: Apache-2.0
#include "cogisac/array.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cogisac {

void UpaConfig::validate() const {
    if (tx_x < 1 || tx_y < 1 || rx_x < 1 || rx_y < 1) {
        throw ConfigError("array", "UPA dimensions must all be >= 1 (got tx " + std::to_string(tx_x) +
                                       "x" + std::to_string(tx_y) + ", rx " + std::to_string(rx_x) +
                                       "x" + std::to_string(rx_y) + ")");
    }
}

double SpatialGrid::axis_value(int i, int count) {
    if (count == 1) return 0.0;
    // Written as a ratio of integers so the centre and both endpoints are exact.
    return static_cast<double>(2 * i - (count - 1)) / static_cast<double>(2 * (count - 1));
}

SpatialGrid SpatialGrid::make(int lx, int ly) {
    if (lx < 1 || ly < 1) {
        throw ConfigError("array", "grid dimensions must be >= 1");
    }
    SpatialGrid grid;
    grid.lx_ = lx;
    grid.ly_ = ly;
    grid.bins_.reserve(static_cast<std::size_t>(lx) * static_cast<std::size_t>(ly));
    for (int i = 0; i < lx; ++i) {
        for (int j = 0; j < ly; ++j) {
            grid.bins_.push_back({axis_value(i, lx), axis_value(j, ly), i * ly + j});
        }
    }
    return grid;
}

std::optional<int> SpatialGrid::find(double nu_x, double nu_y, double tol) const {
    for (const auto& b : bins_) {
        if (std::abs(b.nu_x - nu_x) <= tol && std::abs(b.nu_y - nu_y) <= tol) return b.index;
    }
    return std::nullopt;
}

CVec steering(int elems_x, int elems_y, double nu_x, double nu_y) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    CVec a(static_cast<Eigen::Index>(elems_x) * elems_y);
    for (int p = 0; p < elems_x; ++p) {
        for (int q = 0; q < elems_y; ++q) {
            // Reduce the phase in cycles first so large element indices stay accurate.
            const double cycles = std::fmod(p * nu_x + q * nu_y, 1.0);
            a(p * elems_y + q) = std::polar(1.0, two_pi * cycles);
        }
    }
    return a;
}

CVec steering(const UpaConfig& upa, ArraySide side, const SpatialBin& bin) {
    if (side == ArraySide::Transmit) return steering(upa.tx_x, upa.tx_y, bin.nu_x, bin.nu_y);
    return steering(upa.rx_x, upa.rx_y, bin.nu_x, bin.nu_y);
}

CVec effective_channel(const CVec& a_t, const CVec& a_r, const CMat& R) {
    const Eigen::Index nt = a_t.size();
    const Eigen::Index nr = a_r.size();
    if (R.rows() != nt || R.cols() != nt) {
        throw DimensionError("array", "covariance is " + std::to_string(R.rows()) + "x" +
                                          std::to_string(R.cols()) + ", expected " +
                                          std::to_string(nt) + "x" + std::to_string(nt));
    }
    if (nt == 0 || nr == 0) throw DimensionError("array", "empty steering vector");

    const Eigen::RowVectorXcd row = a_t.transpose() * R;
    CVec h(nt * nr);
    for (Eigen::Index i = 0; i < nr; ++i) {
        h.segment(i * nt, nt) = a_r(i) * row.transpose();
    }
    return h;
}

}  // namespace cogisac
