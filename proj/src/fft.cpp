#include "stbiholo/fft.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

namespace stbiholo {

// FFTW plan creation is not thread-safe; execution of distinct plans is.
static std::mutex g_plan_mutex;

void dft2_raw(std::vector<cplx>& data, int w, int h, FftDirection direction) {
    if (w < 2 || h < 2)
        throw validation_error("dft2: both dimensions must be >= 2");
    if (data.size() != static_cast<size_t>(w) * h)
        throw validation_error("dft2: buffer size does not match dimensions");

    auto* io = reinterpret_cast<fftw_complex*>(data.data());
    const int sign = direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        plan = fftw_plan_dft_2d(h, w, io, io, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(w) * h);
    for (auto& v : data) v *= scale;
}

ComplexField dft2(const ComplexField& field, FftDirection direction) {
    field.check();
    ComplexField out = field;
    dft2_raw(out.values, out.width, out.height, direction);
    return out;
}

static void dct2_r2r(std::vector<double>& data, int w, int h, fftw_r2r_kind kind) {
    if (w < 2 || h < 2)
        throw validation_error("dct2: both dimensions must be >= 2");
    if (data.size() != static_cast<size_t>(w) * h)
        throw validation_error("dct2: buffer size does not match dimensions");
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        plan = fftw_plan_r2r_2d(h, w, data.data(), data.data(), kind, kind, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        fftw_destroy_plan(plan);
    }
}

void dct2_forward(std::vector<double>& data, int w, int h) {
    dct2_r2r(data, w, h, FFTW_REDFT10);
}

void dct2_inverse(std::vector<double>& data, int w, int h) {
    dct2_r2r(data, w, h, FFTW_REDFT01);
    const double scale = 1.0 / (4.0 * static_cast<double>(w) * h);
    for (auto& v : data) v *= scale;
}

} // namespace stbiholo
