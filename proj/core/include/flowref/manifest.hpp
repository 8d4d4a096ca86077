#pragma once

#include <map>
#include <string>

namespace flowref {

/// Plain-text key=value run manifest. Keys are written sorted so identical
/// settings serialize to identical bytes; '#' lines are comments. A manifest
/// is a valid --config file, so any run can be replayed from its manifest.
using Manifest = std::map<std::string, std::string>;

void write_manifest(const std::string& path, const Manifest& m);
Manifest read_manifest(const std::string& path);

}  // namespace flowref
