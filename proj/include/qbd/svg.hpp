#pragma once

#include "qbd/experiment.hpp"

#include <string>

namespace qbd {

struct PlotStyle {
    int width = 800;
    int height = 500;
    std::string title;
    std::size_t max_points = 2000;
};

// Standalone SVG 1.1: fidelity (red dotted), S2(+1) probability (blue solid),
// ideal-driving probability (black dashed) against t, y axis fixed to [0, 1].
// Throws EmptyInput on a run without rows.
std::string render_plot(const RunOutput& run, const PlotStyle& style = {});

}  // namespace qbd
