#pragma once

#include <complex>
#include <vector>

#include "stbiholo/field.hpp"

namespace stbiholo {

enum class FftDirection { forward, inverse };

/// Unitary 2-D DFT: forward and inverse are each scaled by 1/sqrt(W*H), so
/// Parseval holds symmetrically and inverse(forward(f)) == f. Any size >= 2
/// per axis is supported (mixed radix). Output inherits pitch and size.
ComplexField dft2(const ComplexField& field, FftDirection direction);

/// Raw unitary transform on a bare buffer (row-major, h rows of w).
void dft2_raw(std::vector<cplx>& data, int w, int h, FftDirection direction);

/// DCT-II of each axis ("forward"), orthonormalized to match dct2_inverse.
/// Used by the least-squares unwrapper; grid is row-major h x w doubles.
void dct2_forward(std::vector<double>& data, int w, int h);

/// DCT-III of each axis (inverse of dct2_forward).
void dct2_inverse(std::vector<double>& data, int w, int h);

} // namespace stbiholo
