#pragma once

#include <cstddef>
#include <string>

// Low-level array kernels behind the image ops. Every kernel has a scalar
// reference implementation and, where the host supports it, an AVX2 or NEON
// variant selected at runtime. Variants are bit-identical to the reference:
// per-element op chains match, and reductions use a fixed 4-lane blocked
// accumulation defined by the scalar code.
namespace aefuse::kernels {

enum class Backend { Scalar, Avx2, Neon };

// Backend in effect for subsequent calls. Resolution order: forced value,
// AEFUSE_KERNELS env var (scalar|avx2|neon|auto), then best supported.
Backend active_backend();
const char* backend_name(Backend b);
bool backend_supported(Backend b);
void force_backend(Backend b);
void reset_backend();  // back to env/auto selection

// dst[i] = b[i] + w*(a[i]-b[i]); exact at w=0, w=1, and a[i]==b[i]
void mix(const double* a, const double* b, double w, double* dst, size_t n);
// dst[i] = b[i] + w[i]*(a[i]-b[i])
void mix_map(const double* a, const double* b, const double* w, double* dst, size_t n);
void mul(const double* a, const double* b, double* dst, size_t n);
void sub(const double* a, const double* b, double* dst, size_t n);
void scale(const double* x, double c, double* dst, size_t n);
void clamp01(double* x, size_t n);

// Blocked reductions: lanes s0..s3 take elements round-robin over the
// aligned prefix, tail elements land in lanes 0..2, result (s0+s1)+(s2+s3).
double sum(const double* x, size_t n);
double dot(const double* a, const double* b, size_t n);
double sse(const double* a, const double* b, size_t n);  // sum of squared differences

// Separable 1-D convolution passes with replicate borders. taps has
// 2*radius+1 entries; accumulation runs in ascending tap order.
void conv_row(const double* src, double* dst, int w, int h, const double* taps, int radius);
void conv_col(const double* src, double* dst, int w, int h, const double* taps, int radius);

}  // namespace aefuse::kernels
