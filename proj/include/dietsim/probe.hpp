#pragma once

#include <cstddef>
#include <vector>

namespace dietsim {

/// Field time series at one grid node. E is sampled at t_first + k dt_sample;
/// H (averaged onto the node) at the same instants shifted by h_offset.
struct ProbeRecording {
    std::size_t cell = 0;
    double dt_sample = 0.0;
    double t_first = 0.0;
    double h_offset = 0.0;
    std::vector<double> e;
    std::vector<double> h;

    std::size_t size() const noexcept { return e.size(); }
    double time(std::size_t k) const noexcept { return t_first + static_cast<double>(k) * dt_sample; }
};

}  // namespace dietsim
