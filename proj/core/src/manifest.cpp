#include "flowref/manifest.hpp"

#include <fstream>

#include "flowref/errors.hpp"
#include "flowref/version.hpp"

namespace flowref {

void write_manifest(const std::string& path, const Manifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_manifest: cannot open " + path);
  out << "# flowref " << kVersion << " run manifest\n";
  for (const auto& [key, value] : m) out << key << "=" << value << "\n";
  if (!out) throw IoError("write_manifest: write failed: " + path);
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_manifest: cannot open " + path);
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("read_manifest: malformed line in " + path + ": " + line);
    m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

}  // namespace flowref
