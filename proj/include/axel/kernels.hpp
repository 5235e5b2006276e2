#pragma once

#include "axel/matrix.hpp"

namespace axel::kernels {

// Runtime switch between the OpenMP kernels and their serial references.
// Both produce bitwise-identical results: every output element is written by
// exactly one thread with a fixed inner summation order, so results do not
// depend on scheduling or thread count.
bool parallel_enabled();
void set_parallel(bool on);

struct SerialGuard {
    bool prev;
    SerialGuard() : prev(parallel_enabled()) { set_parallel(false); }
    ~SerialGuard() { set_parallel(prev); }
};

// C = A * B
void matmul_serial(const Matrix& A, const Matrix& B, Matrix& C);
void matmul_omp(const Matrix& A, const Matrix& B, Matrix& C);
void matmul(const Matrix& A, const Matrix& B, Matrix& C);

// dA += dC * B^T
void matmul_acc_nt_serial(const Matrix& dC, const Matrix& B, Matrix& dA);
void matmul_acc_nt_omp(const Matrix& dC, const Matrix& B, Matrix& dA);
void matmul_acc_nt(const Matrix& dC, const Matrix& B, Matrix& dA);

// dB += A^T * dC
void matmul_acc_tn_serial(const Matrix& A, const Matrix& dC, Matrix& dB);
void matmul_acc_tn_omp(const Matrix& A, const Matrix& dC, Matrix& dB);
void matmul_acc_tn(const Matrix& A, const Matrix& dC, Matrix& dB);

// Gated neighborhood mean over CSR adjacency. For each node v:
//   out_v = (p_self[v]*H_v + sum_{u in N(v)} p_edge[arc_edge(v,u)]*H_u) / den_v
// where den_v = deg(v)+1, or max(deg(v),1) when literal_norm is set.
// offsets/neighbors are CSR arrays; arc_edge maps each CSR arc to its
// undirected edge id (shared by both directions).
void aggregate_forward_serial(int n, const int* offsets, const int* neighbors,
                              const int* arc_edge, const Matrix& H,
                              const double* p_edge, const double* p_self,
                              bool literal_norm, Matrix& out);
void aggregate_forward_omp(int n, const int* offsets, const int* neighbors,
                           const int* arc_edge, const Matrix& H,
                           const double* p_edge, const double* p_self,
                           bool literal_norm, Matrix& out);
void aggregate_forward(int n, const int* offsets, const int* neighbors,
                       const int* arc_edge, const Matrix& H,
                       const double* p_edge, const double* p_self,
                       bool literal_norm, Matrix& out);

// Backward of aggregate_forward. Accumulates into dH, dp_edge, dp_self.
// num_edges is the undirected edge count (p_edge length).
void aggregate_backward_serial(int n, const int* offsets, const int* neighbors,
                               const int* arc_edge, int num_edges,
                               const Matrix& H, const double* p_edge,
                               const double* p_self, bool literal_norm,
                               const Matrix& dOut, Matrix& dH, double* dp_edge,
                               double* dp_self);
void aggregate_backward_omp(int n, const int* offsets, const int* neighbors,
                            const int* arc_edge, int num_edges, const Matrix& H,
                            const double* p_edge, const double* p_self,
                            bool literal_norm, const Matrix& dOut, Matrix& dH,
                            double* dp_edge, double* dp_self);
void aggregate_backward(int n, const int* offsets, const int* neighbors,
                        const int* arc_edge, int num_edges, const Matrix& H,
                        const double* p_edge, const double* p_self,
                        bool literal_norm, const Matrix& dOut, Matrix& dH,
                        double* dp_edge, double* dp_self);

// Elementwise helpers used by the tape ops. Parallel over rows; each row is
// owned by one thread.
template <typename F>
void map_rows(const Matrix& in, Matrix& out, F f);
template <typename F>
void zip_rows(const Matrix& a, const Matrix& b, Matrix& out, F f);

}  // namespace axel::kernels

// -- inline template bodies ---------------------------------------------------

#include <omp.h>

namespace axel::kernels {

namespace detail {
constexpr int kElemGrain = 4096;  // below this, threading overhead dominates
}

template <typename F>
void map_rows(const Matrix& in, Matrix& out, F f) {
    const int n = in.size();
    const double* src = in.data.data();
    double* dst = out.data.data();
    if (parallel_enabled() && n >= detail::kElemGrain) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) dst[i] = f(src[i]);
    } else {
        for (int i = 0; i < n; ++i) dst[i] = f(src[i]);
    }
}

template <typename F>
void zip_rows(const Matrix& a, const Matrix& b, Matrix& out, F f) {
    const int n = a.size();
    const double* pa = a.data.data();
    const double* pb = b.data.data();
    double* dst = out.data.data();
    if (parallel_enabled() && n >= detail::kElemGrain) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) dst[i] = f(pa[i], pb[i]);
    } else {
        for (int i = 0; i < n; ++i) dst[i] = f(pa[i], pb[i]);
    }
}

}  // namespace axel::kernels
