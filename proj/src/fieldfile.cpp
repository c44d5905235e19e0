#include "stbiholo/fieldfile.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace stbiholo {

// Explicit little-endian byte serialization so files are identical across
// hosts regardless of native byte order.
static void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

static void put_f64(std::string& buf, double v) {
    const uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;

    uint8_t u8() {
        if (pos + 1 > buf.size()) throw validation_error("field file: truncated");
        return static_cast<uint8_t>(buf[pos++]);
    }
    uint32_t u32() {
        if (pos + 4 > buf.size()) throw validation_error("field file: truncated");
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    double f64() {
        if (pos + 8 > buf.size()) throw validation_error("field file: truncated");
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<uint64_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 8;
        return std::bit_cast<double>(bits);
    }
};

static void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw validation_error(std::string("field file: non-finite ") + what);
}

static std::string header(FieldKind kind, int w, int h, double pitch, double defocus) {
    if (w < 2 || h < 2)
        throw validation_error("field file: dimensions must be >= 2");
    require_finite(pitch, "pixel pitch");
    require_finite(defocus, "defocus");
    std::string buf(kFieldFileMagic, sizeof(kFieldFileMagic));
    buf.push_back(static_cast<char>(kind));
    put_u32(buf, static_cast<uint32_t>(w));
    put_u32(buf, static_cast<uint32_t>(h));
    put_f64(buf, pitch);
    put_f64(buf, defocus);
    return buf;
}

static void write_all(const std::string& path, const std::string& buf) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw io_error("write failed: " + path);
}

void write_field_file(const std::string& path, const ComplexField& f) {
    f.check();
    std::string buf = header(FieldKind::complex_field, f.width, f.height, f.pixel_pitch_um, 0.0);
    for (const auto& v : f.values) {
        require_finite(v.real(), "payload value");
        require_finite(v.imag(), "payload value");
        put_f64(buf, v.real());
        put_f64(buf, v.imag());
    }
    write_all(path, buf);
}

void write_field_file(const std::string& path, const Hologram& h) {
    h.check();
    std::string buf = header(FieldKind::hologram, h.width, h.height, h.pixel_pitch_um,
                             h.defocus_um);
    for (double v : h.values) {
        require_finite(v, "payload value");
        put_f64(buf, v);
    }
    write_all(path, buf);
}

void write_field_file(const std::string& path, const PhaseMap& p) {
    if (p.width < 2 || p.height < 2 || p.values.size() != p.size() ||
        p.mask.size() != p.size())
        throw validation_error("field file: malformed phase map");
    std::string buf = header(FieldKind::phase_map, p.width, p.height, p.pixel_pitch_um, 0.0);
    for (double v : p.values) {
        require_finite(v, "payload value");
        put_f64(buf, v);
    }
    for (uint8_t m : p.mask) buf.push_back(static_cast<char>(m ? 1 : 0));
    write_all(path, buf);
}

FieldFileContent read_field_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw io_error("read failed: " + path);

    if (buf.size() < sizeof(kFieldFileMagic) ||
        std::memcmp(buf.data(), kFieldFileMagic, sizeof(kFieldFileMagic)) != 0)
        throw validation_error("field file: bad magic: " + path);

    Reader r{buf, sizeof(kFieldFileMagic)};
    const uint8_t kind = r.u8();
    const uint32_t w = r.u32();
    const uint32_t h = r.u32();
    if (w < 2 || h < 2 || w > (1u << 20) || h > (1u << 20))
        throw validation_error("field file: bad dimensions");
    const double pitch = r.f64();
    const double defocus = r.f64();
    const size_t n = static_cast<size_t>(w) * h;

    auto expect_end = [&](size_t at) {
        if (buf.size() != at)
            throw validation_error("field file: payload size mismatch");
    };

    switch (static_cast<FieldKind>(kind)) {
        case FieldKind::complex_field: {
            expect_end(r.pos + n * 16);
            ComplexField f(static_cast<int>(w), static_cast<int>(h), pitch);
            for (auto& v : f.values) {
                const double re = r.f64();
                const double im = r.f64();
                v = {re, im};
            }
            return f;
        }
        case FieldKind::hologram: {
            expect_end(r.pos + n * 8);
            Hologram hg(static_cast<int>(w), static_cast<int>(h), pitch);
            hg.defocus_um = defocus;
            for (auto& v : hg.values) v = r.f64();
            hg.check();
            return hg;
        }
        case FieldKind::phase_map: {
            expect_end(r.pos + n * 9);
            PhaseMap p(static_cast<int>(w), static_cast<int>(h), pitch);
            p.wrapped = false; // files store unwrapped maps by convention
            for (auto& v : p.values) v = r.f64();
            for (auto& m : p.mask) m = r.u8() ? 1 : 0;
            return p;
        }
        default:
            throw validation_error("field file: unknown kind byte");
    }
}

void export_pgm16(const std::vector<double>& image, int w, int h,
                  const std::string& path, double lo, double hi) {
    if (w < 1 || h < 1 || image.size() != static_cast<size_t>(w) * h)
        throw validation_error("pgm: image size does not match dimensions");
    if (!(lo < hi))
        throw validation_error("pgm: lo must be strictly below hi");

    std::string buf = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n65535\n";
    const double scale = 65535.0 / (hi - lo);
    for (double v : image) {
        require_finite(v, "pgm sample");
        double t = (v - lo) * scale;
        t = std::floor(t + 0.5); // round half up
        const uint16_t q = static_cast<uint16_t>(std::clamp(t, 0.0, 65535.0));
        buf.push_back(static_cast<char>(q >> 8)); // big-endian sample
        buf.push_back(static_cast<char>(q & 0xff));
    }
    write_all(path, buf);
}

} // namespace stbiholo
