#pragma once

#include <string>
#include <variant>
#include <vector>

#include "stbiholo/field.hpp"

namespace stbiholo {

/// Binary container for fields, holograms, and phase maps.
/// Layout (all little-endian):
///   8 bytes  magic "STBIFLD1"
///   1 byte   kind: 0 complex field, 1 hologram, 2 phase map
///   u32      width, u32 height
///   f64      pixel_pitch_um
///   f64      defocus_um (0 where not meaningful)
///   payload  row-major f64; complex interleaved re,im for kind 0
///   mask     kind 2 only: width*height bytes, 1 = valid
constexpr char kFieldFileMagic[8] = {'S', 'T', 'B', 'I', 'F', 'L', 'D', '1'};

enum class FieldKind : uint8_t { complex_field = 0, hologram = 1, phase_map = 2 };

void write_field_file(const std::string& path, const ComplexField& f);
void write_field_file(const std::string& path, const Hologram& h);
void write_field_file(const std::string& path, const PhaseMap& p);

using FieldFileContent = std::variant<ComplexField, Hologram, PhaseMap>;
FieldFileContent read_field_file(const std::string& path);

/// 16-bit binary PGM ("P5", maxval 65535, big-endian samples); values map
/// linearly from [lo, hi] to [0, 65535], clamped, rounded half-up.
void export_pgm16(const std::vector<double>& image, int w, int h,
                  const std::string& path, double lo, double hi);

} // namespace stbiholo
