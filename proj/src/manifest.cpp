#include "leser/manifest.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "leser/error.hpp"

namespace leser {

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
  public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw Error("sha256 initialization failed");
        }
    }
    void update(const void* data, std::size_t len) {
        if (EVP_DigestUpdate(ctx_.get(), data, len) != 1) {
            throw Error("sha256 update failed");
        }
    }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) {
            throw Error("sha256 finalization failed");
        }
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(kDigits[md[i] >> 4]);
            out.push_back(kDigits[md[i] & 0xF]);
        }
        return out;
    }

  private:
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    Sha256 h;
    std::array<char, 1 << 16> buf;
    while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

void RunManifest::add_input(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) {
        // Directories hash as the digest of "name digest" lines in name order.
        std::map<std::string, std::string> entries;
        for (const auto& e : std::filesystem::directory_iterator(path)) {
            if (e.is_regular_file()) {
                entries.emplace(e.path().filename().string(), sha256_file(e.path()));
            }
        }
        std::string listing;
        for (const auto& [name, digest] : entries) {
            listing += name + ' ' + digest + '\n';
        }
        inputs[path.string()] = sha256_hex(listing);
    } else {
        inputs[path.string()] = sha256_file(path);
    }
}

nlohmann::ordered_json to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    if (!m.mode.empty()) {
        j["mode"] = m.mode;
    }
    j["config"] = m.config;
    j["inputs"] = m.inputs;
    j["output_sha256"] = m.output_digest;
    j["tool_version"] = m.tool_version;
    j["timestamp"] = m.timestamp;
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace leser
