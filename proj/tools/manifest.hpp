#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace polyfuse_cli {

/// FNV-1a 64-bit digest of the file contents, as a hex string.
std::string file_digest(const std::string& path);

/// Writes the run manifest next to the command outputs: command line, config
/// snapshot, seed, tool version and input digests. Contains no timestamps, so
/// identical runs produce identical manifests.
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& argv, std::uint64_t seed,
                    const nlohmann::json& config, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs);

}  // namespace polyfuse_cli
