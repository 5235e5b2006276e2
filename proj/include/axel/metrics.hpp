#pragma once

#include <vector>

#include "axel/graph.hpp"
#include "axel/matrix.hpp"

namespace axel::metrics {

double accuracy(const std::vector<int>& preds, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask);

struct LayerPolarization {
    double inter_class_distance = 0.0;
    double intra_class_distance = 0.0;
    double ratio = 0.0;
    bool ratio_defined = false;  // false when intra <= tolerance or < 2 classes
};

struct PolarizationReport {
    std::vector<LayerPolarization> per_layer;
};

// intra: mean distance from each node to its class centroid;
// inter: mean pairwise distance between class centroids. Euclidean.
PolarizationReport polarization_report(const std::vector<Matrix>& per_layer_embeddings,
                                       const std::vector<int>& labels,
                                       double tolerance = 1e-12);

// mean cosine similarity of endpoint embeddings over all edges; 1.0 means
// total smoothing
double smoothness(const Matrix& embeddings, const Graph& g);

// standard silhouette; singleton-cluster points contribute 0
double silhouette(const Matrix& embeddings, const std::vector<int>& labels);

struct ChScore {
    double value = 0.0;
    bool defined = false;  // false when within-dispersion is 0 or < 2 classes
};

ChScore calinski_harabasz(const Matrix& embeddings, const std::vector<int>& labels);

}  // namespace axel::metrics
