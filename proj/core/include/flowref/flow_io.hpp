#pragma once

#include <string>
#include <vector>

#include "flowref/field.hpp"

namespace flowref {

/// Reads an 8- or 16-bit grayscale image (PGM P2/P5, or grayscale PNG) and
/// normalizes intensities to [0, 1]. Throws IoError for missing files,
/// corrupt headers, or unsupported formats.
ScalarField read_image(const std::string& path);

/// Writes a PGM (P5) with the given maxval (255 or 65535). Values are
/// clamped to [0, 1] and quantized; output bytes are deterministic.
void write_image_pgm(const std::string& path, const ScalarField& s,
                     int maxval = 255);

/// Flow interchange format: little-endian "PIEH" magic, int32 width,
/// int32 height, then row-major interleaved float32 (u, v).
void write_flo(const std::string& path, const FlowField& w);
FlowField read_flo(const std::string& path);

/// CSV with a header row and 9 significant digits per value.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace flowref
