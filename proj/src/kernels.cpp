#include "axel/kernels.hpp"

#include <atomic>

namespace axel::kernels {

namespace {
std::atomic<bool> g_parallel{true};
constexpr long long kMatmulGrain = 32768;  // flop threshold before threading pays off
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

static void check_matmul_dims(const Matrix& A, const Matrix& B, const Matrix& C) {
    if (A.cols != B.rows || C.rows != A.rows || C.cols != B.cols)
        throw DimensionError("matmul: shape mismatch");
}

void matmul_serial(const Matrix& A, const Matrix& B, Matrix& C) {
    check_matmul_dims(A, B, C);
    const int m = A.rows, k = A.cols, n = B.cols;
    for (int i = 0; i < m; ++i) {
        double* ci = C.row(i);
        for (int j = 0; j < n; ++j) ci[j] = 0.0;
        const double* ai = A.row(i);
        for (int t = 0; t < k; ++t) {
            const double a = ai[t];
            const double* bt = B.row(t);
            for (int j = 0; j < n; ++j) ci[j] += a * bt[j];
        }
    }
}

void matmul_omp(const Matrix& A, const Matrix& B, Matrix& C) {
    check_matmul_dims(A, B, C);
    const int m = A.rows, k = A.cols, n = B.cols;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        double* ci = C.row(i);
        for (int j = 0; j < n; ++j) ci[j] = 0.0;
        const double* ai = A.row(i);
        for (int t = 0; t < k; ++t) {
            const double a = ai[t];
            const double* bt = B.row(t);
            for (int j = 0; j < n; ++j) ci[j] += a * bt[j];
        }
    }
}

void matmul(const Matrix& A, const Matrix& B, Matrix& C) {
    const long long flops = 1LL * A.rows * A.cols * B.cols;
    if (parallel_enabled() && flops >= kMatmulGrain)
        matmul_omp(A, B, C);
    else
        matmul_serial(A, B, C);
}

// dA[i][t] += sum_j dC[i][j] * B[t][j]
void matmul_acc_nt_serial(const Matrix& dC, const Matrix& B, Matrix& dA) {
    const int m = dC.rows, n = dC.cols, k = B.rows;
    for (int i = 0; i < m; ++i) {
        const double* dci = dC.row(i);
        double* dai = dA.row(i);
        for (int t = 0; t < k; ++t) {
            const double* bt = B.row(t);
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += dci[j] * bt[j];
            dai[t] += s;
        }
    }
}

void matmul_acc_nt_omp(const Matrix& dC, const Matrix& B, Matrix& dA) {
    const int m = dC.rows, n = dC.cols, k = B.rows;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        const double* dci = dC.row(i);
        double* dai = dA.row(i);
        for (int t = 0; t < k; ++t) {
            const double* bt = B.row(t);
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += dci[j] * bt[j];
            dai[t] += s;
        }
    }
}

void matmul_acc_nt(const Matrix& dC, const Matrix& B, Matrix& dA) {
    const long long flops = 1LL * dC.rows * dC.cols * B.rows;
    if (parallel_enabled() && flops >= kMatmulGrain)
        matmul_acc_nt_omp(dC, B, dA);
    else
        matmul_acc_nt_serial(dC, B, dA);
}

// dB[t][j] += sum_i A[i][t] * dC[i][j]
void matmul_acc_tn_serial(const Matrix& A, const Matrix& dC, Matrix& dB) {
    const int m = A.rows, k = A.cols, n = dC.cols;
    for (int t = 0; t < k; ++t) {
        double* dbt = dB.row(t);
        for (int i = 0; i < m; ++i) {
            const double a = A.at(i, t);
            const double* dci = dC.row(i);
            for (int j = 0; j < n; ++j) dbt[j] += a * dci[j];
        }
    }
}

void matmul_acc_tn_omp(const Matrix& A, const Matrix& dC, Matrix& dB) {
    const int m = A.rows, k = A.cols, n = dC.cols;
#pragma omp parallel for schedule(static)
    for (int t = 0; t < k; ++t) {
        double* dbt = dB.row(t);
        for (int i = 0; i < m; ++i) {
            const double a = A.at(i, t);
            const double* dci = dC.row(i);
            for (int j = 0; j < n; ++j) dbt[j] += a * dci[j];
        }
    }
}

void matmul_acc_tn(const Matrix& A, const Matrix& dC, Matrix& dB) {
    const long long flops = 1LL * A.rows * A.cols * dC.cols;
    if (parallel_enabled() && flops >= kMatmulGrain)
        matmul_acc_tn_omp(A, dC, dB);
    else
        matmul_acc_tn_serial(A, dC, dB);
}

static inline double node_denominator(int deg, bool literal_norm) {
    if (literal_norm) return static_cast<double>(deg > 0 ? deg : 1);
    return static_cast<double>(deg + 1);
}

template <bool Parallel>
static void aggregate_forward_impl(int n, const int* offsets, const int* neighbors,
                                   const int* arc_edge, const Matrix& H,
                                   const double* p_edge, const double* p_self,
                                   bool literal_norm, Matrix& out) {
    const int d = H.cols;
#pragma omp parallel for schedule(static) if (Parallel)
    for (int v = 0; v < n; ++v) {
        const int deg = offsets[v + 1] - offsets[v];
        const double inv = 1.0 / node_denominator(deg, literal_norm);
        double* ov = out.row(v);
        const double* hv = H.row(v);
        const double ps = p_self[v];
        for (int j = 0; j < d; ++j) ov[j] = ps * hv[j];
        for (int a = offsets[v]; a < offsets[v + 1]; ++a) {
            const double pe = p_edge[arc_edge[a]];
            const double* hu = H.row(neighbors[a]);
            for (int j = 0; j < d; ++j) ov[j] += pe * hu[j];
        }
        for (int j = 0; j < d; ++j) ov[j] *= inv;
    }
}

void aggregate_forward_serial(int n, const int* offsets, const int* neighbors,
                              const int* arc_edge, const Matrix& H,
                              const double* p_edge, const double* p_self,
                              bool literal_norm, Matrix& out) {
    aggregate_forward_impl<false>(n, offsets, neighbors, arc_edge, H, p_edge, p_self,
                                  literal_norm, out);
}

void aggregate_forward_omp(int n, const int* offsets, const int* neighbors,
                           const int* arc_edge, const Matrix& H, const double* p_edge,
                           const double* p_self, bool literal_norm, Matrix& out) {
    aggregate_forward_impl<true>(n, offsets, neighbors, arc_edge, H, p_edge, p_self,
                                 literal_norm, out);
}

void aggregate_forward(int n, const int* offsets, const int* neighbors,
                       const int* arc_edge, const Matrix& H, const double* p_edge,
                       const double* p_self, bool literal_norm, Matrix& out) {
    if (parallel_enabled() && 1LL * offsets[n] * H.cols >= kMatmulGrain)
        aggregate_forward_omp(n, offsets, neighbors, arc_edge, H, p_edge, p_self,
                              literal_norm, out);
    else
        aggregate_forward_serial(n, offsets, neighbors, arc_edge, H, p_edge, p_self,
                                 literal_norm, out);
}

// dH_u gets contributions from every v with u in N(v) plus its own self term.
// Iterating u's adjacency (symmetric CSR) keeps each dH row single-writer.
// dp for edge (a,b) sums the uses of p_e in both directions.
template <bool Parallel>
static void aggregate_backward_impl(int n, const int* offsets, const int* neighbors,
                                    const int* arc_edge, int num_edges, const Matrix& H,
                                    const double* p_edge, const double* p_self,
                                    bool literal_norm, const Matrix& dOut, Matrix& dH,
                                    double* dp_edge, double* dp_self) {
    const int d = H.cols;
#pragma omp parallel for schedule(static) if (Parallel)
    for (int u = 0; u < n; ++u) {
        const int deg_u = offsets[u + 1] - offsets[u];
        const double inv_u = 1.0 / node_denominator(deg_u, literal_norm);
        double* dhu = dH.row(u);
        const double* dou = dOut.row(u);
        const double ps = p_self[u];
        double acc_self = 0.0;
        const double* hu = H.row(u);
        for (int j = 0; j < d; ++j) {
            dhu[j] += ps * inv_u * dou[j];
            acc_self += hu[j] * dou[j];
        }
        dp_self[u] += acc_self * inv_u;
        for (int a = offsets[u]; a < offsets[u + 1]; ++a) {
            const int v = neighbors[a];
            const int deg_v = offsets[v + 1] - offsets[v];
            const double inv_v = 1.0 / node_denominator(deg_v, literal_norm);
            const double pe = p_edge[arc_edge[a]];
            const double* dov = dOut.row(v);
            for (int j = 0; j < d; ++j) dhu[j] += pe * inv_v * dov[j];
        }
    }
    // Edge-probability gradients: one pass over arcs, each edge id touched by
    // both of its arcs, accumulated serially per edge via the arc owner u.
    (void)num_edges;
#pragma omp parallel for schedule(static) if (Parallel)
    for (int u = 0; u < n; ++u) {
        const double* hu = H.row(u);
        for (int a = offsets[u]; a < offsets[u + 1]; ++a) {
            const int v = neighbors[a];
            if (u > v) continue;  // handle each undirected edge once
            const int e = arc_edge[a];
            const int deg_u = offsets[u + 1] - offsets[u];
            const int deg_v = offsets[v + 1] - offsets[v];
            const double inv_u = 1.0 / node_denominator(deg_u, literal_norm);
            const double inv_v = 1.0 / node_denominator(deg_v, literal_norm);
            const double* hv = H.row(v);
            const double* dou = dOut.row(u);
            const double* dov = dOut.row(v);
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += hu[j] * dov[j] * inv_v + hv[j] * dou[j] * inv_u;
            dp_edge[e] += acc;
        }
    }
}

void aggregate_backward_serial(int n, const int* offsets, const int* neighbors,
                               const int* arc_edge, int num_edges, const Matrix& H,
                               const double* p_edge, const double* p_self,
                               bool literal_norm, const Matrix& dOut, Matrix& dH,
                               double* dp_edge, double* dp_self) {
    aggregate_backward_impl<false>(n, offsets, neighbors, arc_edge, num_edges, H, p_edge,
                                   p_self, literal_norm, dOut, dH, dp_edge, dp_self);
}

void aggregate_backward_omp(int n, const int* offsets, const int* neighbors,
                            const int* arc_edge, int num_edges, const Matrix& H,
                            const double* p_edge, const double* p_self, bool literal_norm,
                            const Matrix& dOut, Matrix& dH, double* dp_edge,
                            double* dp_self) {
    aggregate_backward_impl<true>(n, offsets, neighbors, arc_edge, num_edges, H, p_edge,
                                  p_self, literal_norm, dOut, dH, dp_edge, dp_self);
}

void aggregate_backward(int n, const int* offsets, const int* neighbors,
                        const int* arc_edge, int num_edges, const Matrix& H,
                        const double* p_edge, const double* p_self, bool literal_norm,
                        const Matrix& dOut, Matrix& dH, double* dp_edge, double* dp_self) {
    if (parallel_enabled() && 1LL * offsets[n] * H.cols >= kMatmulGrain)
        aggregate_backward_omp(n, offsets, neighbors, arc_edge, num_edges, H, p_edge,
                               p_self, literal_norm, dOut, dH, dp_edge, dp_self);
    else
        aggregate_backward_serial(n, offsets, neighbors, arc_edge, num_edges, H, p_edge,
                                  p_self, literal_norm, dOut, dH, dp_edge, dp_self);
}

}  // namespace axel::kernels
