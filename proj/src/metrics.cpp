#include "axel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace axel::metrics {

double accuracy(const std::vector<int>& preds, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask) {
    if (preds.size() != labels.size() || preds.size() != mask.size())
        throw DimensionError("accuracy: size mismatch");
    int total = 0, correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!mask[i]) continue;
        correct += preds[i] == labels[i];
        ++total;
    }
    if (total == 0) throw ContractError("accuracy: empty mask");
    return static_cast<double>(correct) / total;
}

namespace {

double euclidean(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return std::sqrt(s);
}

// class id -> list of row indices
std::map<int, std::vector<int>> group_by_class(const std::vector<int>& labels) {
    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i)
        groups[labels[i]].push_back(static_cast<int>(i));
    return groups;
}

Matrix class_centroids(const Matrix& emb, const std::map<int, std::vector<int>>& groups) {
    Matrix centroids(static_cast<int>(groups.size()), emb.cols);
    int c = 0;
    for (const auto& [cls, ids] : groups) {
        double* row = centroids.row(c);
        for (int i : ids) {
            const double* e = emb.row(i);
            for (int j = 0; j < emb.cols; ++j) row[j] += e[j];
        }
        for (int j = 0; j < emb.cols; ++j) row[j] /= static_cast<double>(ids.size());
        ++c;
    }
    return centroids;
}

}  // namespace

PolarizationReport polarization_report(const std::vector<Matrix>& per_layer_embeddings,
                                       const std::vector<int>& labels, double tolerance) {
    PolarizationReport report;
    for (const auto& emb : per_layer_embeddings) {
        if (emb.rows != static_cast<int>(labels.size()))
            throw DimensionError("polarization_report: labels size mismatch");
        LayerPolarization lp;
        const auto groups = group_by_class(labels);
        const Matrix centroids = class_centroids(emb, groups);
        const int k = centroids.rows;

        double intra = 0.0;
        int c = 0;
        for (const auto& [cls, ids] : groups) {
            for (int i : ids) intra += euclidean(emb.row(i), centroids.row(c), emb.cols);
            ++c;
        }
        lp.intra_class_distance = intra / emb.rows;

        if (k >= 2) {
            double inter = 0.0;
            int pairs = 0;
            for (int a = 0; a < k; ++a)
                for (int b = a + 1; b < k; ++b) {
                    inter += euclidean(centroids.row(a), centroids.row(b), emb.cols);
                    ++pairs;
                }
            lp.inter_class_distance = inter / pairs;
            if (lp.intra_class_distance > tolerance) {
                lp.ratio = lp.inter_class_distance / lp.intra_class_distance;
                lp.ratio_defined = true;
            }
        }
        report.per_layer.push_back(lp);
    }
    return report;
}

double smoothness(const Matrix& embeddings, const Graph& g) {
    if (g.edges.empty()) return 1.0;
    double acc = 0.0;
    const int d = embeddings.cols;
    for (auto [u, v] : g.edges) {
        const double* a = embeddings.row(u);
        const double* b = embeddings.row(v);
        double dot = 0, na = 0, nb = 0;
        for (int j = 0; j < d; ++j) {
            dot += a[j] * b[j];
            na += a[j] * a[j];
            nb += b[j] * b[j];
        }
        const double den = std::sqrt(na) * std::sqrt(nb) + 1e-12;
        acc += std::clamp(dot / den, -1.0, 1.0);
    }
    return acc / static_cast<double>(g.edges.size());
}

double silhouette(const Matrix& embeddings, const std::vector<int>& labels) {
    const int n = embeddings.rows;
    if (n != static_cast<int>(labels.size()))
        throw DimensionError("silhouette: labels size mismatch");
    const auto groups = group_by_class(labels);
    if (groups.size() < 2) throw ContractError("silhouette: need >= 2 classes");

    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& own = groups.at(labels[i]);
        if (own.size() == 1) continue;  // convention: singleton contributes 0
        double a = 0.0;
        for (int j : own)
            if (j != i) a += euclidean(embeddings.row(i), embeddings.row(j), embeddings.cols);
        a /= static_cast<double>(own.size() - 1);

        double b = 1e300;
        for (const auto& [cls, ids] : groups) {
            if (cls == labels[i]) continue;
            double m = 0.0;
            for (int j : ids) m += euclidean(embeddings.row(i), embeddings.row(j), embeddings.cols);
            b = std::min(b, m / static_cast<double>(ids.size()));
        }
        const double denom = std::max(a, b);
        if (denom > 0) acc += (b - a) / denom;
    }
    return acc / n;
}

ChScore calinski_harabasz(const Matrix& embeddings, const std::vector<int>& labels) {
    const int n = embeddings.rows;
    if (n != static_cast<int>(labels.size()))
        throw DimensionError("calinski_harabasz: labels size mismatch");
    const auto groups = group_by_class(labels);
    const int k = static_cast<int>(groups.size());
    ChScore out;
    if (k < 2 || n <= k) return out;

    const Matrix centroids = class_centroids(embeddings, groups);
    std::vector<double> global(embeddings.cols, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < embeddings.cols; ++j) global[j] += embeddings.at(i, j);
    for (double& g : global) g /= n;

    double between = 0.0, within = 0.0;
    int c = 0;
    for (const auto& [cls, ids] : groups) {
        double dist2 = 0.0;
        for (int j = 0; j < embeddings.cols; ++j) {
            const double diff = centroids.at(c, j) - global[j];
            dist2 += diff * diff;
        }
        between += static_cast<double>(ids.size()) * dist2;
        for (int i : ids) {
            for (int j = 0; j < embeddings.cols; ++j) {
                const double diff = embeddings.at(i, j) - centroids.at(c, j);
                within += diff * diff;
            }
        }
        ++c;
    }
    if (within <= 0.0) return out;  // degenerate: point-mass clusters
    out.value = (between / (k - 1)) / (within / (n - k));
    out.defined = true;
    return out;
}

}  // namespace axel::metrics
