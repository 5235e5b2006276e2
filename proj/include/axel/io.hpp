#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "axel/axelgnn.hpp"
#include "axel/diffusion.hpp"
#include "axel/graph.hpp"
#include "axel/training.hpp"

#include "json.hpp"

namespace axel::io {

using json = nlohmann::json;

// FNV-1a over the canonical (sorted-key) JSON dump, hex string
std::string config_hash(const json& config);

// "# key=value ..." comment header carrying provenance for every CSV artifact
std::string csv_provenance(const std::string& config_hash, std::uint64_t seed);

void write_text(const std::filesystem::path& path, const std::string& content);

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<train::EpochRow>& history,
                       const std::string& hash, std::uint64_t seed);

void write_mapping_csv(const std::filesystem::path& path,
                       const std::vector<long long>& original_ids,
                       const std::string& hash, std::uint64_t seed);

void write_labels_csv(const std::filesystem::path& path,
                      const diffusion::DiffusionResult& result,
                      const std::string& hash, std::uint64_t seed);

// "node_id,prob,stderr" with '#' comments skipped
diffusion::DiffusionResult read_labels_csv(const std::filesystem::path& path);

struct LayerMetricsRow {
    int layer;
    double inter, intra, ratio;
    bool ratio_defined;
    double smoothness;
    double silhouette;
    double calinski_harabasz;
    bool ch_defined;
};

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<LayerMetricsRow>& rows,
                       const std::string& hash, std::uint64_t seed);

// Versioned JSON checkpoint. Gate parameters are stored in raw
// (unconstrained) space: log_beta and pre-tanh theta.
json checkpoint_to_json(const gnn::Model& model);
gnn::Model checkpoint_from_json(const json& j);
void save_checkpoint(const std::filesystem::path& path, const gnn::Model& model,
                     const std::string& config_hash = "", std::uint64_t seed = 0);
gnn::Model load_checkpoint(const std::filesystem::path& path);

}  // namespace axel::io
