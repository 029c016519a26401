#include "femkit/util.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace femkit::util {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf, ptr);
}

namespace {

std::string digest_hex(EVP_MD_CTX* ctx) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

struct MdCtx {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    ~MdCtx() { EVP_MD_CTX_free(ctx); }
};

} // namespace

std::string sha256_hex(std::string_view data) {
    MdCtx md;
    EVP_DigestInit_ex(md.ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(md.ctx, data.data(), data.size());
    return digest_hex(md.ctx);
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("sha256_file: cannot open " + path);
    MdCtx md;
    EVP_DigestInit_ex(md.ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        EVP_DigestUpdate(md.ctx, buf, static_cast<size_t>(in.gcount()));
    }
    return digest_hex(md.ctx);
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        current.push_back(c);
        if (c == '.' || c == '!' || c == '?') {
            // absorb the rest of a terminator run ("?!", "...")
            while (i + 1 < text.size() &&
                   (text[i + 1] == '.' || text[i + 1] == '!' || text[i + 1] == '?')) {
                current.push_back(text[++i]);
            }
            std::string s = trim(current);
            if (!s.empty()) out.push_back(std::move(s));
            current.clear();
        }
    }
    std::string tail = trim(current);
    if (!tail.empty()) out.push_back(std::move(tail));
    return out;
}

std::size_t whitespace_token_count(std::string_view text) {
    std::size_t count = 0;
    bool in_token = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

void deterministic_shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

UrlParts parse_url(std::string_view url) {
    UrlParts parts;
    auto sep = url.find("://");
    if (sep == std::string_view::npos) throw std::invalid_argument("url missing scheme: " + std::string(url));
    parts.scheme = std::string(url.substr(0, sep));
    if (parts.scheme != "http" && parts.scheme != "https") {
        throw std::invalid_argument("unsupported url scheme \"" + parts.scheme + "\"");
    }
    std::string_view rest = url.substr(sep + 3);
    auto slash = rest.find('/');
    std::string_view authority = rest.substr(0, slash);
    parts.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    auto colon = authority.rfind(':');
    if (colon == std::string_view::npos) {
        parts.host = std::string(authority);
        parts.port = parts.scheme == "https" ? 443 : 80;
    } else {
        parts.host = std::string(authority.substr(0, colon));
        auto p = authority.substr(colon + 1);
        auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), parts.port);
        if (ec != std::errc{} || ptr != p.data() + p.size() || parts.port <= 0 || parts.port > 65535) {
            throw std::invalid_argument("bad port in url: " + std::string(url));
        }
    }
    if (parts.host.empty()) throw std::invalid_argument("url missing host: " + std::string(url));
    return parts;
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

} // namespace femkit::util
