#pragma once

#include <vector>

#include "stbiholo/error.hpp"

namespace stbiholo {

struct Gradient {
    std::vector<double> gx; // I(r,c+1) - I(r,c); 0 on the last column
    std::vector<double> gy; // I(r+1,c) - I(r,c); 0 on the last row
};

/// Forward differences with zero fill on the trailing row/column, so a
/// constant image has an identically zero gradient.
Gradient gradient_forward(const std::vector<double>& image, int w, int h);

} // namespace stbiholo
