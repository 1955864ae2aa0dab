#include "progbayes/run_manifest.hpp"

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "progbayes/errors.hpp"

namespace progbayes {

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open file for digest: " + path.string());
    std::uint64_t h = 0xCBF29CE484222325ull;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ull;
        }
    }
    char out[32];
    std::snprintf(out, sizeof out, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs.push_back(Input{path.string(), file_digest(path)});
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json inputs_json = nlohmann::json::array();
    for (const auto& input : inputs)
        inputs_json.push_back({{"path", input.path}, {"digest", input.digest}});
    return nlohmann::json{{"tool", kToolName},
                          {"version", kToolVersion},
                          {"command", command},
                          {"parameters", parameters},
                          {"inputs", inputs_json},
                          {"timestamp", timestamp.empty() ? utc_timestamp() : timestamp}};
}

void RunManifest::write_alongside(const std::filesystem::path& output) const {
    std::filesystem::path manifest_path = output;
    manifest_path += ".manifest.json";
    std::ofstream out(manifest_path);
    if (!out) throw LoadError("cannot write manifest: " + manifest_path.string());
    out << to_json().dump(2) << '\n';
}

}  // namespace progbayes
