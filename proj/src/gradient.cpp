#include "stbiholo/gradient.hpp"

namespace stbiholo {

Gradient gradient_forward(const std::vector<double>& image, int w, int h) {
    if (w < 2 || h < 2)
        throw validation_error("gradient_forward: both dimensions must be >= 2");
    if (image.size() != static_cast<size_t>(w) * h)
        throw validation_error("gradient_forward: buffer size does not match dimensions");

    Gradient g;
    g.gx.assign(image.size(), 0.0);
    g.gy.assign(image.size(), 0.0);
    for (int y = 0; y < h; ++y) {
        const size_t row = static_cast<size_t>(y) * w;
        for (int x = 0; x + 1 < w; ++x)
            g.gx[row + x] = image[row + x + 1] - image[row + x];
        if (y + 1 < h)
            for (int x = 0; x < w; ++x)
                g.gy[row + x] = image[row + w + x] - image[row + x];
    }
    return g;
}

} // namespace stbiholo
