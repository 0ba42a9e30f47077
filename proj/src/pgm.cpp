#include "aefuse/pgm.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace aefuse {
namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Header tokens are separated by whitespace; '#' starts a comment that runs
// to end of line.
size_t skip_separators(std::string_view buf, size_t pos) {
    while (pos < buf.size()) {
        if (is_space(static_cast<unsigned char>(buf[pos]))) {
            ++pos;
        } else if (buf[pos] == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    return pos;
}

long parse_int(std::string_view buf, size_t& pos, const char* what) {
    pos = skip_separators(buf, pos);
    size_t start = pos;
    while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') ++pos;
    if (pos == start)
        throw MalformedHeader("pgm: expected " + std::string(what) + " at byte offset " +
                              std::to_string(start));
    return std::stol(std::string(buf.substr(start, pos - start)));
}

}  // namespace

GrayImage parse_pgm(std::string_view buf, const std::string& origin) {
    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5')
        throw MalformedHeader("pgm: missing P5 magic in '" + origin + "'");
    size_t pos = 2;
    long w = parse_int(buf, pos, "width");
    long h = parse_int(buf, pos, "height");
    long maxval = parse_int(buf, pos, "maxval");
    if (w <= 0 || h <= 0)
        throw MalformedHeader("pgm: non-positive dimensions in '" + origin + "'");
    if (maxval != 255)
        throw UnsupportedMaxval("pgm: maxval " + std::to_string(maxval) + " in '" + origin +
                                "', only 255 supported");
    if (pos >= buf.size() || !is_space(static_cast<unsigned char>(buf[pos])))
        throw MalformedHeader("pgm: missing separator after maxval at byte offset " +
                              std::to_string(pos));
    ++pos;  // exactly one whitespace byte before the raster

    const size_t need = static_cast<size_t>(w) * static_cast<size_t>(h);
    if (buf.size() - pos < need)
        throw TruncatedData("pgm: raster truncated in '" + origin + "': expected " +
                            std::to_string(need) + " bytes at byte offset " + std::to_string(pos) +
                            ", found " + std::to_string(buf.size() - pos));

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    double* d = img.data();
    for (size_t i = 0; i < need; ++i)
        d[i] = static_cast<unsigned char>(buf[pos + i]) / 255.0;
    return img;
}

GrayImage load_pgm(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoFailure("pgm: cannot open '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoFailure("pgm: read failure on '" + file.string() + "'");
    return parse_pgm(ss.str(), file.string());
}

std::string pgm_bytes(const GrayImage& img) {
    std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                      "\n255\n";
    out.reserve(out.size() + img.size());
    const double* d = img.data();
    for (size_t i = 0; i < img.size(); ++i) {
        long v = std::lround(d[i] * 255.0);
        if (v < 0) v = 0;
        if (v > 255) v = 255;
        out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
    }
    return out;
}

void save_pgm(const GrayImage& img, const std::filesystem::path& file) {
    if (img.empty()) throw DimensionMismatch("pgm: refusing to write empty image");
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("pgm: cannot create '" + file.string() + "'");
    const std::string bytes = pgm_bytes(img);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoFailure("pgm: write failure on '" + file.string() + "'");
}

}  // namespace aefuse
