// Checkpoint directory layout:
//   config.json   model hyperparameters and segment mask
//   weights.bin   "FEMW" magic, u32 format version, dims, raw little-endian
//                 doubles per tensor in a fixed order
//   history.csv   per-epoch training log (degenerate metrics left blank)

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "femkit/fem.hpp"
#include "femkit/util.hpp"

namespace femkit::fem {

namespace {

constexpr char kMagic[4] = {'F', 'E', 'M', 'W'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw CheckpointError("weights.bin truncated");
    return v;
}

void write_tensor(std::ostream& out, const std::vector<double>& t) {
    write_pod<std::uint64_t>(out, t.size());
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
}

void read_tensor(std::istream& in, std::vector<double>& t) {
    auto count = read_pod<std::uint64_t>(in);
    if (count != t.size()) {
        throw CheckpointError("weights.bin tensor size " + std::to_string(count) +
                              " does not match configured dimensions (" +
                              std::to_string(t.size()) + ")");
    }
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!in) throw CheckpointError("weights.bin truncated");
}

std::string metric_field(double v, bool present) {
    return present ? util::format_double(v) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

nlohmann::json config_to_json(const FemConfig& c) {
    nlohmann::json mask = nlohmann::json::array();
    for (bool b : c.segment_mask) mask.push_back(b);
    return nlohmann::json{{"input_dim", c.input_dim},
                          {"hidden_dim", c.hidden_dim},
                          {"dropout", c.dropout},
                          {"peak_lr", c.peak_lr},
                          {"epochs", c.epochs},
                          {"batch_size", c.batch_size},
                          {"weight_decay", c.weight_decay},
                          {"warmup_steps", c.warmup_steps},
                          {"seed", c.seed},
                          {"segment_mask", mask},
                          {"encoder_finetune", c.encoder_finetune},
                          {"encoder_name", c.encoder_name}};
}

FemConfig config_from_json(const nlohmann::json& j) {
    FemConfig c;
    try {
        c.input_dim = j.at("input_dim").get<std::size_t>();
        c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
        c.dropout = j.at("dropout").get<double>();
        c.peak_lr = j.at("peak_lr").get<double>();
        c.epochs = j.at("epochs").get<std::size_t>();
        c.batch_size = j.at("batch_size").get<std::size_t>();
        c.weight_decay = j.at("weight_decay").get<double>();
        c.warmup_steps = j.at("warmup_steps").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        auto mask = j.at("segment_mask");
        if (!mask.is_array() || mask.size() != c.segment_mask.size()) {
            throw CheckpointError("segment_mask must be an array of 5 booleans");
        }
        for (std::size_t i = 0; i < c.segment_mask.size(); ++i) {
            c.segment_mask[i] = mask[i].get<bool>();
        }
        if (j.contains("encoder_finetune")) c.encoder_finetune = j["encoder_finetune"].get<bool>();
        if (j.contains("encoder_name")) c.encoder_name = j["encoder_name"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("bad config.json: ") + e.what());
    }
    return c;
}

void save_checkpoint(const std::string& dir, const FemModel& model, const TrainResult& result) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CheckpointError("cannot create " + dir + ": " + ec.message());

    {
        std::ofstream out(fs::path(dir) / "config.json", std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot write config.json in " + dir);
        out << config_to_json(model.config()).dump(2) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "weights.bin", std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot write weights.bin in " + dir);
        out.write(kMagic, sizeof(kMagic));
        write_pod(out, kVersion);
        write_pod<std::uint64_t>(out, model.config().input_dim);
        write_pod<std::uint64_t>(out, model.config().hidden_dim);
        const auto& p = model.params();
        for (const auto* t : {&p.w_fwd, &p.u_fwd, &p.b_fwd, &p.w_bwd, &p.u_bwd, &p.b_bwd,
                              &p.w_cls, &p.b_cls}) {
            write_tensor(out, *t);
        }
        if (!out) throw CheckpointError("short write to weights.bin in " + dir);
    }
    {
        std::ofstream out(fs::path(dir) / "history.csv", std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot write history.csv in " + dir);
        out << "epoch,loss,accuracy,precision,recall,f1,lr\n";
        for (const auto& e : result.history) {
            out << e.epoch << ',' << util::format_double(e.train_loss) << ','
                << util::format_double(e.val.accuracy) << ','
                << metric_field(e.val.precision, e.val.has_precision) << ','
                << metric_field(e.val.recall, e.val.has_recall) << ','
                << metric_field(e.val.f1, e.val.has_f1) << ',' << util::format_double(e.lr)
                << '\n';
        }
    }
}

LoadedCheckpoint load_checkpoint(const std::string& dir) {
    namespace fs = std::filesystem;

    nlohmann::json cfg_json;
    {
        std::ifstream in(fs::path(dir) / "config.json", std::ios::binary);
        if (!in) throw CheckpointError("missing config.json in " + dir);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg_json = nlohmann::json::parse(ss.str(), nullptr, false);
        if (cfg_json.is_discarded()) throw CheckpointError("config.json is not valid JSON");
    }
    FemModel model(config_from_json(cfg_json));

    {
        std::ifstream in(fs::path(dir) / "weights.bin", std::ios::binary);
        if (!in) throw CheckpointError("missing weights.bin in " + dir);
        char magic[4];
        in.read(magic, sizeof(magic));
        if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
            throw CheckpointError("weights.bin has wrong magic");
        }
        auto version = read_pod<std::uint32_t>(in);
        if (version != kVersion) {
            throw CheckpointError("unsupported weights.bin version " + std::to_string(version));
        }
        auto d = read_pod<std::uint64_t>(in);
        auto h = read_pod<std::uint64_t>(in);
        if (d != model.config().input_dim || h != model.config().hidden_dim) {
            throw CheckpointError("weights.bin dimensions disagree with config.json");
        }
        auto& p = model.params();
        for (auto* t :
             {&p.w_fwd, &p.u_fwd, &p.b_fwd, &p.w_bwd, &p.u_bwd, &p.b_bwd, &p.w_cls, &p.b_cls}) {
            read_tensor(in, *t);
        }
    }

    LoadedCheckpoint out{std::move(model), {}};
    std::ifstream in(fs::path(dir) / "history.csv", std::ios::binary);
    if (!in) return out; // history is optional on load
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 7) throw CheckpointError("history.csv row has wrong field count");
        EpochStats e;
        e.epoch = std::stoul(fields[0]);
        e.train_loss = std::stod(fields[1]);
        e.val.accuracy = std::stod(fields[2]);
        e.val.has_precision = !fields[3].empty();
        if (e.val.has_precision) e.val.precision = std::stod(fields[3]);
        e.val.has_recall = !fields[4].empty();
        if (e.val.has_recall) e.val.recall = std::stod(fields[4]);
        e.val.has_f1 = !fields[5].empty();
        if (e.val.has_f1) e.val.f1 = std::stod(fields[5]);
        e.lr = std::stod(fields[6]);
        out.history.push_back(e);
    }
    return out;
}

} // namespace femkit::fem
