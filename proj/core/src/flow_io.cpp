#include "flowref/flow_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "flowref/errors.hpp"

namespace flowref {

namespace {

bool has_png_signature(std::istream& in) {
  unsigned char sig[8] = {0};
  in.read(reinterpret_cast<char*>(sig), 8);
  in.seekg(0);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

int pgm_next_int(std::istream& in) {
  // Skips whitespace and '#' comments per the netpbm grammar.
  for (;;) {
    const int c = in.peek();
    if (c == EOF) throw IoError("read_image: truncated PGM header");
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      break;
    }
  }
  int value = 0;
  in >> value;
  if (!in) throw IoError("read_image: malformed PGM header");
  return value;
}

ScalarField read_pgm(std::istream& in, const std::string& path) {
  char p = 0, kind = 0;
  in.get(p);
  in.get(kind);
  if (p != 'P' || (kind != '2' && kind != '5'))
    throw IoError("read_image: unsupported format (expected PGM or PNG): " + path);
  const int width = pgm_next_int(in);
  const int height = pgm_next_int(in);
  const int maxval = pgm_next_int(in);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
    throw IoError("read_image: corrupt PGM header: " + path);

  ScalarField img(width, height);
  const double scale = 1.0 / maxval;
  if (kind == '2') {
    for (double& v : img.data()) {
      long raw = 0;
      in >> raw;
      if (!in || raw < 0 || raw > maxval)
        throw IoError("read_image: corrupt PGM data: " + path);
      v = raw * scale;
    }
  } else {
    in.get();  // single whitespace after maxval
    const bool wide = maxval > 255;
    const size_t n = img.size() * (wide ? 2 : 1);
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n)
      throw IoError("read_image: truncated PGM data: " + path);
    for (size_t i = 0; i < img.size(); ++i) {
      const unsigned raw = wide ? (unsigned(buf[2 * i]) << 8) | buf[2 * i + 1]
                                : buf[i];
      img.data()[i] = raw * scale;
    }
  }
  return img;
}

ScalarField read_png(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw IoError("read_image: cannot open " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw IoError("read_image: libpng init failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<unsigned char> pixels;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw IoError("read_image: corrupt PNG: " + path);
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw IoError("read_image: only grayscale PNG is supported: " + path);
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);
  const size_t rowbytes = png_get_rowbytes(png, info);
  pixels.assign(rowbytes * height, 0);
  row_ptrs.resize(height);
  for (png_uint_32 y = 0; y < height; ++y)
    row_ptrs[y] = pixels.data() + y * rowbytes;
  png_read_image(png, row_ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);

  const bool wide = depth == 16;
  const double scale = wide ? 1.0 / 65535.0 : 1.0 / 255.0;
  ScalarField img(static_cast<int>(width), static_cast<int>(height));
  for (png_uint_32 y = 0; y < height; ++y) {
    const unsigned char* row = pixels.data() + y * rowbytes;
    for (png_uint_32 x = 0; x < width; ++x) {
      const unsigned raw =
          wide ? (unsigned(row[2 * x]) << 8) | row[2 * x + 1] : row[x];
      img.at(static_cast<int>(x), static_cast<int>(y)) = raw * scale;
    }
  }
  return img;
}

}  // namespace

ScalarField read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_image: cannot open " + path);
  if (has_png_signature(in)) {
    in.close();
    return read_png(path);
  }
  return read_pgm(in, path);
}

void write_image_pgm(const std::string& path, const ScalarField& s, int maxval) {
  if (maxval != 255 && maxval != 65535)
    throw std::invalid_argument("write_image_pgm: maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_image_pgm: cannot open " + path);
  out << "P5\n" << s.width() << " " << s.height() << "\n" << maxval << "\n";
  for (double v : s.data()) {
    const long q = std::lround(std::clamp(v, 0.0, 1.0) * maxval);
    if (maxval > 255) {
      out.put(static_cast<char>((q >> 8) & 0xff));
      out.put(static_cast<char>(q & 0xff));
    } else {
      out.put(static_cast<char>(q & 0xff));
    }
  }
  if (!out) throw IoError("write_image_pgm: write failed: " + path);
}

namespace {

void put_le_u32(std::ostream& out, uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff),
                         static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

uint32_t get_le_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw IoError("read_flo: truncated file: " + path);
  return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) |
         (uint32_t(b[3]) << 24);
}

uint32_t float_bits(float f) {
  uint32_t u;
  std::memcpy(&u, &f, 4);
  return u;
}

float bits_float(uint32_t u) {
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

void write_flo(const std::string& path, const FlowField& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_flo: cannot open " + path);
  out.write("PIEH", 4);
  put_le_u32(out, static_cast<uint32_t>(w.width()));
  put_le_u32(out, static_cast<uint32_t>(w.height()));
  for (int y = 0; y < w.height(); ++y)
    for (int x = 0; x < w.width(); ++x) {
      put_le_u32(out, float_bits(static_cast<float>(w.u.at(x, y))));
      put_le_u32(out, float_bits(static_cast<float>(w.v.at(x, y))));
    }
  if (!out) throw IoError("write_flo: write failed: " + path);
}

FlowField read_flo(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_flo: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "PIEH", 4) != 0)
    throw IoError("read_flo: bad magic: " + path);
  const uint32_t width = get_le_u32(in, path);
  const uint32_t height = get_le_u32(in, path);
  if (width == 0 || height == 0 || width > (1u << 20) || height > (1u << 20))
    throw IoError("read_flo: implausible dimensions: " + path);
  FlowField w(static_cast<int>(width), static_cast<int>(height));
  for (int y = 0; y < w.height(); ++y)
    for (int x = 0; x < w.width(); ++x) {
      w.u.at(x, y) = bits_float(get_le_u32(in, path));
      w.v.at(x, y) = bits_float(get_le_u32(in, path));
    }
  return w;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_csv: cannot open " + path);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  char buf[64];
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", row[i]);
      out << buf << (i + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
  if (!out) throw IoError("write_csv: write failed: " + path);
}

}  // namespace flowref
