#pragma once

#include <cmath>
#include <vector>

#include "perex/periodic_pricer.hpp"

namespace perex {

/// Suboptimal barrier prices plotted next to the optimal put curve.
inline std::vector<double> put_comparison_barriers(double optimal_barrier, double strike) {
    return {optimal_barrier / 3.0, 2.0 * optimal_barrier / 3.0, 0.5 * (optimal_barrier + strike), strike};
}

/// Suboptimal barrier prices plotted next to the optimal call curve.
inline std::vector<double> call_comparison_barriers(double optimal_barrier, double strike) {
    return {strike, 0.5 * (optimal_barrier + strike), optimal_barrier + 50.0, optimal_barrier + 100.0};
}

inline std::vector<double> comparison_barriers(OptionKind kind, double optimal_barrier, double strike) {
    return kind == OptionKind::Put ? put_comparison_barriers(optimal_barrier, strike)
                                   : call_comparison_barriers(optimal_barrier, strike);
}

/// 0.001, 0.002, ..., 0.009, 0.01, ..., 0.09, 0.1, ..., 0.9, 1, ..., 10.
inline std::vector<double> put_lambda_sweep() {
    std::vector<double> grid;
    for (double decade : {0.001, 0.01, 0.1, 1.0})
        for (int k = 1; k <= 9; ++k) grid.push_back(k * decade);
    grid.push_back(10.0);
    return grid;
}

/// The put sweep extended by 20, 30, ..., 200.
inline std::vector<double> call_lambda_sweep() {
    std::vector<double> grid = put_lambda_sweep();
    for (int k = 2; k <= 20; ++k) grid.push_back(10.0 * k);
    return grid;
}

/// Linear spot grid (0, 2.5 K] with `points` nodes; s = 0 itself is excluded.
inline std::vector<double> figure_spot_grid(double strike, std::size_t points = 250) {
    std::vector<double> grid(points);
    const double step = 2.5 * strike / static_cast<double>(points);
    for (std::size_t i = 0; i < points; ++i) grid[i] = step * static_cast<double>(i + 1);
    return grid;
}

}  // namespace perex
