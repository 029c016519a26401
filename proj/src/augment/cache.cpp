#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "femkit/augment.hpp"
#include "femkit/util.hpp"

namespace femkit::augment {

CompletionCache::CompletionCache(std::string dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::string CompletionCache::key(int template_version, const std::string& prompt,
                                 const GenerationParams& params) {
    // \x1f separators keep the components from bleeding into each other.
    std::string material = "v" + std::to_string(template_version);
    material += '\x1f';
    material += prompt;
    material += '\x1f';
    material += params.cache_token();
    return util::sha256_hex(material);
}

std::optional<std::string> CompletionCache::get(const std::string& key) const {
    std::ifstream in(dir_ + "/" + key + ".txt", std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

void CompletionCache::put(const std::string& key, const std::string& value) const {
    const std::string final_path = dir_ + "/" + key + ".txt";
    const std::string tmp_path =
        final_path + ".tmp." +
        std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw core::IoError("cannot write cache entry " + tmp_path);
        out << value;
    }
    std::filesystem::rename(tmp_path, final_path);
}

namespace {

double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

} // namespace

TokenBucket::TokenBucket(double rate_per_sec, double burst, Clock clock)
    : rate_(rate_per_sec),
      burst_(burst > 0 ? burst : 1.0),
      tokens_(burst_),
      clock_(clock ? std::move(clock) : Clock(steady_seconds)) {
    last_ = clock_();
}

void TokenBucket::refill_locked() {
    const double now = clock_();
    if (now > last_) {
        tokens_ = std::min(burst_, tokens_ + (now - last_) * rate_);
        last_ = now;
    }
}

bool TokenBucket::try_acquire() {
    if (rate_ <= 0) return true;
    std::lock_guard<std::mutex> lock(mu_);
    refill_locked();
    if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return true;
    }
    return false;
}

double TokenBucket::seconds_until_token() {
    if (rate_ <= 0) return 0.0;
    std::lock_guard<std::mutex> lock(mu_);
    refill_locked();
    if (tokens_ >= 1.0) return 0.0;
    return (1.0 - tokens_) / rate_;
}

void TokenBucket::acquire() {
    while (!try_acquire()) {
        const double wait = seconds_until_token();
        std::this_thread::sleep_for(std::chrono::duration<double>(std::max(wait, 1e-4)));
    }
}

} // namespace femkit::augment
