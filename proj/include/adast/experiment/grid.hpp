#pragma once

#include <vector>

#include "adast/experiment/runner.hpp"

namespace adast::experiment {

inline const std::vector<std::size_t>& default_input_windows() {
    static const std::vector<std::size_t> w{3, 5, 7, 9, 11};
    return w;
}

inline const std::vector<std::size_t>& default_horizons() {
    static const std::vector<std::size_t> h{1, 3, 5, 7, 9};
    return h;
}

struct GridResult {
    std::string model;
    std::vector<CellResult> cells;  // row-major over (W, H) in the order given

    const CellResult* find(std::size_t w, std::size_t h) const {
        for (const auto& c : cells)
            if (c.input_window == w && c.horizon == h) return &c;
        return nullptr;
    }
};

/// Every (W, H) combination with fresh models per fold. `base` supplies
/// everything except the window configuration.
inline GridResult run_grid(const PreparedData& prepared, const std::vector<std::size_t>& windows,
                           const std::vector<std::size_t>& horizons, const RunSpec& base, std::size_t jobs = 1,
                           std::ostream* log = nullptr) {
    if (windows.empty() || horizons.empty()) throw ParameterError("run_grid: empty window or horizon list");
    GridResult grid;
    grid.model = model::to_string(base.kind);
    for (std::size_t w : windows)
        for (std::size_t h : horizons) {
            RunSpec spec = base;
            spec.window.input_window = w;
            spec.window.horizon = h;
            grid.cells.push_back(run_loso(prepared, spec, jobs, log));
        }
    return grid;
}

}  // namespace adast::experiment
