#include "eitlab/io/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "eitlab/io/csv.hpp"

namespace eit::io {

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string RunManifest::to_yaml() const {
    std::ostringstream os;
    os << "tool: " << kToolName << "\n"
       << "version: " << kToolVersion << "\n"
       << "command: " << command << "\n"
       << "seed: " << seed << "\n"
       << "model: " << model << "\n"
       << "noise_pct: " << format_number(noise_pct) << "\n";
    if (input) os << "input: \"" << *input << "\"\n";
    if (input_sha256) os << "input_sha256: " << *input_sha256 << "\n";
    os << "wall_clock: \"" << wall_clock << "\"\n"
       << "outputs:\n";
    for (const auto& o : outputs) os << "  - file: " << o.file << "\n    sha256: " << o.sha256 << "\n";
    os << "config:\n";
    std::istringstream in(config_yaml);
    std::string line;
    while (std::getline(in, line)) os << "  " << line << "\n";
    return os.str();
}

}  // namespace eit::io
