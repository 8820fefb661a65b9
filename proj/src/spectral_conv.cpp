#include "nlsepdf/spectral_conv.hpp"

#include "nlsepdf/fft.hpp"

namespace nlsepdf {
namespace {

// cubic products span output offsets in [-(M-1), 2(M-1)], quintic in
// [-2(M-1), 3(M-1)]; these lengths keep aliases outside [0, M).
int cubic_pad(int M) { return fft::good_size(2 * M - 1); }
int quintic_pad(int M) { return fft::good_size(3 * M - 2); }

void load_padded(cvec& buf, std::span<const cplx> a, int P) {
  buf.assign(P, cplx{});
  std::copy(a.begin(), a.end(), buf.begin());
  fft::transform(buf, fft::Direction::Forward);
}

cvec unload(cvec& buf, int M) {
  fft::transform(buf, fft::Direction::Backward);
  const double scale = 1.0 / static_cast<double>(buf.size());
  cvec out(M);
  for (int k = 0; k < M; ++k) out[k] = buf[k] * scale;
  return out;
}

}  // namespace

cvec trilinear(std::span<const cplx> a, std::span<const cplx> b, std::span<const cplx> c) {
  const int M = static_cast<int>(a.size());
  if (b.size() != a.size() || c.size() != a.size())
    throw GuardViolation("conv.size", "operands must share one length");
  const int P = cubic_pad(M);
  thread_local cvec fa, fb, fc;
  load_padded(fa, a, P);
  load_padded(fb, b, P);
  load_padded(fc, c, P);
  for (int n = 0; n < P; ++n) fa[n] *= fb[n] * std::conj(fc[n]);
  return unload(fa, M);
}

cvec cubic(std::span<const cplx> a) {
  const int M = static_cast<int>(a.size());
  const int P = cubic_pad(M);
  thread_local cvec fa;
  load_padded(fa, a, P);
  for (int n = 0; n < P; ++n) fa[n] *= std::norm(fa[n]);
  return unload(fa, M);
}

cvec quintic(std::span<const cplx> a) {
  const int M = static_cast<int>(a.size());
  const int P = quintic_pad(M);
  thread_local cvec fa;
  load_padded(fa, a, P);
  for (int n = 0; n < P; ++n) {
    const double p = std::norm(fa[n]);
    fa[n] *= p * p;
  }
  return unload(fa, M);
}

}  // namespace nlsepdf
