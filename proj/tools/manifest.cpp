#include "manifest.hpp"

#include <cstdio>

#include "polyfuse/polyfuse.h"
#include <fstream>
#include <stdexcept>

namespace polyfuse_cli {

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' to digest");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& argv, std::uint64_t seed,
                    const nlohmann::json& config, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["tool"] = "polyfuse";
    doc["tool_version"] = pf_version();
    doc["command"] = command;
    doc["argv"] = argv;
    doc["seed"] = seed;
    doc["config"] = config;
    doc["inputs"] = nlohmann::json::array();
    for (const std::string& input : inputs) {
        doc["inputs"].push_back({{"path", input}, {"fnv1a64", file_digest(input)}});
    }
    doc["outputs"] = outputs;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << doc.dump(2) << '\n';
}

}  // namespace polyfuse_cli
