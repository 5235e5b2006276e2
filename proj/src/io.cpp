#include "axel/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace axel::io {

std::string config_hash(const json& config) {
    const std::string dump = config.dump();  // nlohmann keeps object keys sorted
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string csv_provenance(const std::string& hash, std::uint64_t seed) {
    return "# config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << content;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<train::EpochRow>& history,
                       const std::string& hash, std::uint64_t seed) {
    std::ostringstream os;
    os << csv_provenance(hash, seed);
    os << "epoch,train_loss,val_loss,val_metric,mean_embedding_change\n";
    for (const auto& row : history)
        os << row.epoch << ',' << fmt(row.train_loss) << ',' << fmt(row.val_loss) << ','
           << fmt(row.val_metric) << ',' << fmt(row.embedding_change) << '\n';
    write_text(path, os.str());
}

void write_mapping_csv(const std::filesystem::path& path,
                       const std::vector<long long>& original_ids,
                       const std::string& hash, std::uint64_t seed) {
    std::ostringstream os;
    os << csv_provenance(hash, seed);
    os << "original_id,dense_id\n";
    for (std::size_t i = 0; i < original_ids.size(); ++i)
        os << original_ids[i] << ',' << i << '\n';
    write_text(path, os.str());
}

void write_labels_csv(const std::filesystem::path& path,
                      const diffusion::DiffusionResult& result,
                      const std::string& hash, std::uint64_t seed) {
    std::ostringstream os;
    os << csv_provenance(hash, seed);
    os << "node_id,prob,stderr\n";
    for (std::size_t v = 0; v < result.probs.size(); ++v)
        os << v << ',' << fmt(result.probs[v]) << ',' << fmt(result.stderrs[v]) << '\n';
    write_text(path, os.str());
}

diffusion::DiffusionResult read_labels_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open labels csv: " + path.string());
    diffusion::DiffusionResult res;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // "node_id,prob,stderr"
            continue;
        }
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
            throw FormatError("labels csv: malformed line '" + line + "'");
        const std::size_t id = std::stoul(a);
        if (id != res.probs.size()) throw FormatError("labels csv: non-contiguous node ids");
        res.probs.push_back(std::stod(b));
        res.stderrs.push_back(std::stod(c));
    }
    return res;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<LayerMetricsRow>& rows,
                       const std::string& hash, std::uint64_t seed) {
    std::ostringstream os;
    os << csv_provenance(hash, seed);
    os << "layer,inter_class_distance,intra_class_distance,polarization_ratio,"
          "ratio_defined,smoothness,silhouette,calinski_harabasz,ch_defined\n";
    for (const auto& r : rows)
        os << r.layer << ',' << fmt(r.inter) << ',' << fmt(r.intra) << ',' << fmt(r.ratio)
           << ',' << (r.ratio_defined ? 1 : 0) << ',' << fmt(r.smoothness) << ','
           << fmt(r.silhouette) << ',' << fmt(r.calinski_harabasz) << ','
           << (r.ch_defined ? 1 : 0) << '\n';
    write_text(path, os.str());
}

namespace {

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    m.data = j.at("data").get<std::vector<double>>();
    if (static_cast<int>(m.data.size()) != m.rows * m.cols)
        throw FormatError("checkpoint: matrix payload size mismatch");
    return m;
}

}  // namespace

json checkpoint_to_json(const gnn::Model& model) {
    json j;
    j["format"] = "axelgnn-checkpoint";
    j["version"] = 1;
    j["config"] = {
        {"num_layers", model.cfg.num_layers},
        {"hidden_dim", model.cfg.hidden_dim},
        {"segment_size", model.cfg.segment_size},
        {"variant", gnn::to_string(model.cfg.variant)},
        {"dropout", model.cfg.dropout},
        {"head", model.cfg.head == gnn::Head::classify ? "classify" : "regress_unit"},
        {"num_classes", model.cfg.num_classes},
        {"phi_hidden", model.cfg.phi_hidden},
        {"literal_neighbor_norm", model.cfg.literal_neighbor_norm},
        {"cosine_eps", model.cfg.cosine_eps},
        {"input_dim", model.input_dim},
    };
    json layers = json::array();
    for (const auto& p : model.layers) {
        json lj;
        lj["W"] = matrix_to_json(p.W->value);
        lj["b"] = matrix_to_json(p.b->value);
        lj["log_beta"] = p.log_beta->value.at(0, 0);
        lj["theta_raw"] = p.theta_raw->value.at(0, 0);
        if (!p.phi.empty()) {
            json phis = json::array();
            for (const auto& phi : p.phi)
                phis.push_back(json{{"W1", matrix_to_json(phi.W1->value)},
                                    {"b1", matrix_to_json(phi.b1->value)},
                                    {"W2", matrix_to_json(phi.W2->value)},
                                    {"b2", matrix_to_json(phi.b2->value)}});
            lj["phi"] = std::move(phis);
        }
        if (p.W_group) lj["W_group"] = matrix_to_json(p.W_group->value);
        layers.push_back(std::move(lj));
    }
    j["layers"] = std::move(layers);
    j["head_W"] = matrix_to_json(model.head_W->value);
    j["head_b"] = matrix_to_json(model.head_b->value);
    return j;
}

gnn::Model checkpoint_from_json(const json& j) {
    if (j.value("format", "") != "axelgnn-checkpoint")
        throw FormatError("checkpoint: unknown format");
    if (j.value("version", 0) != 1) throw FormatError("checkpoint: unsupported version");
    const auto& cj = j.at("config");
    gnn::ModelConfig cfg;
    cfg.num_layers = cj.at("num_layers").get<int>();
    cfg.hidden_dim = cj.at("hidden_dim").get<int>();
    cfg.segment_size = cj.at("segment_size").get<int>();
    cfg.variant = gnn::variant_from_string(cj.at("variant").get<std::string>());
    cfg.dropout = cj.at("dropout").get<double>();
    cfg.head = cj.at("head").get<std::string>() == "classify" ? gnn::Head::classify
                                                              : gnn::Head::regress_unit;
    cfg.num_classes = cj.at("num_classes").get<int>();
    cfg.phi_hidden = cj.at("phi_hidden").get<int>();
    cfg.literal_neighbor_norm = cj.at("literal_neighbor_norm").get<bool>();
    cfg.cosine_eps = cj.at("cosine_eps").get<double>();

    Rng scratch(0);
    gnn::Model model = gnn::build_model(cfg, cj.at("input_dim").get<int>(), scratch);
    const auto& layers = j.at("layers");
    if (layers.size() != model.layers.size())
        throw FormatError("checkpoint: layer count mismatch");
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& p = model.layers[l];
        const auto& lj = layers[l];
        p.W->value = matrix_from_json(lj.at("W"));
        p.b->value = matrix_from_json(lj.at("b"));
        p.log_beta->value.at(0, 0) = lj.at("log_beta").get<double>();
        p.theta_raw->value.at(0, 0) = lj.at("theta_raw").get<double>();
        if (lj.contains("phi")) {
            const auto& phis = lj.at("phi");
            if (phis.size() != p.phi.size())
                throw FormatError("checkpoint: phi count mismatch");
            for (std::size_t s = 0; s < p.phi.size(); ++s) {
                p.phi[s].W1->value = matrix_from_json(phis[s].at("W1"));
                p.phi[s].b1->value = matrix_from_json(phis[s].at("b1"));
                p.phi[s].W2->value = matrix_from_json(phis[s].at("W2"));
                p.phi[s].b2->value = matrix_from_json(phis[s].at("b2"));
            }
        }
        if (lj.contains("W_group")) p.W_group->value = matrix_from_json(lj.at("W_group"));
    }
    model.head_W->value = matrix_from_json(j.at("head_W"));
    model.head_b->value = matrix_from_json(j.at("head_b"));
    return model;
}

void save_checkpoint(const std::filesystem::path& path, const gnn::Model& model,
                     const std::string& config_hash, std::uint64_t seed) {
    json j = checkpoint_to_json(model);
    if (!config_hash.empty()) {
        j["config_hash"] = config_hash;
        j["seed"] = seed;
    }
    write_text(path, j.dump(2) + "\n");
}

gnn::Model load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open checkpoint: " + path.string());
    json j;
    in >> j;
    return checkpoint_from_json(j);
}

}  // namespace axel::io
