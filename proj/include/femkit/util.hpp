#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace femkit::util {

// Shortest round-trip decimal form via std::to_chars. Locale-free, so CSV and
// manifest output is byte-stable across environments.
std::string format_double(double v);

// SHA-256 hex digest of a byte string.
std::string sha256_hex(std::string_view data);

// SHA-256 hex digest of a file's contents.
std::string sha256_file(const std::string& path);

// FNV-1a 64-bit over raw bytes. Offset basis is returned for empty input.
std::uint64_t fnv1a64(std::string_view data);

// Splits text into sentences on '.', '!' or '?' runs, trimming whitespace and
// dropping empties. Terminators stay attached to their sentence.
std::vector<std::string> split_sentences(std::string_view text);

// Count of whitespace-separated tokens.
std::size_t whitespace_token_count(std::string_view text);

std::string trim(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

// ISO-8601 UTC timestamp of now, second precision.
std::string utc_timestamp();

// Fisher-Yates with an explicit draw rule; std::shuffle is not pinned across
// standard libraries, this is.
void deterministic_shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng);

// http(s)://host[:port][/path] broken into pieces. Port defaults by scheme,
// path defaults to "/". Throws std::invalid_argument on anything else.
struct UrlParts {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;
};

UrlParts parse_url(std::string_view url);

} // namespace femkit::util
