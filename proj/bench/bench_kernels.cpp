// Wall-clock comparison of the OpenMP kernels against their serial references.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "nlsepdf/channel.hpp"
#include "nlsepdf/pathint.hpp"
#include "nlsepdf/spectral_conv.hpp"

using namespace nlsepdf;

namespace {

double seconds(const std::function<void()>& f, int reps = 1) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

cvec naive_cubic(const cvec& a) {
  const int M = static_cast<int>(a.size());
  cvec out(M, cplx{});
  for (int k = 0; k < M; ++k)
    for (int j1 = 0; j1 < M; ++j1)
      for (int j2 = 0; j2 < M; ++j2) {
        const int j3 = j1 + j2 - k;
        if (j3 >= 0 && j3 < M) out[k] += a[j1] * a[j2] * std::conj(a[j3]);
      }
  return out;
}

SpectralField test_field(const GridSpec& g) {
  SpectralField f(g);
  for (int j = 0; j < g.M; ++j) {
    const double w = g.omega(j);
    f[j] = std::exp(-0.5 * w * w) * cplx(1.0, 0.3 * w);
  }
  return f;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  {
    const GridSpec g = GridSpec::symmetric(8, 0.5, 16, 1.0);
    const SpectralField X = test_field(g);
    SpectralField Y = X;
    for (auto& v : Y.values) v *= 1.05;
    const ChannelParams p{0.1, 0.05, 0.02, 1.0};
    const McOptions o{20000, 7, 1024, 10.0};
    const double tp = seconds([&] { estimate_log_pdf(X, Y, p, o); });
    const double ts = seconds([&] { estimate_log_pdf_serial(X, Y, p, o); });
    std::printf("estimate_log_pdf   M=8 N=16 n=20000   omp %.3fs  serial %.3fs  speedup %.2f\n", tp,
                ts, ts / tp);
  }

  {
    const GridSpec g = GridSpec::symmetric(64, 0.2, 32, 1.0);
    const SpectralField X = test_field(g);
    const ChannelParams p{0.1, 0.5, 0.01, 1.0};
    const double tp = seconds([&] { forward_ensemble(X, p, 2000, 3); });
    const double ts = seconds([&] { forward_ensemble_serial(X, p, 2000, 3); });
    std::printf("forward_ensemble   M=64 N=32 runs=2000 omp %.3fs  serial %.3fs  speedup %.2f\n",
                tp, ts, ts / tp);
  }

  for (int M : {16, 64, 256}) {
    const GridSpec g = GridSpec::symmetric(M, 0.1, 1, 1.0);
    const cvec a = test_field(g).values;
    const int reps = M <= 64 ? 200 : 5;
    const double tf = seconds([&] { cubic(a); }, reps);
    const double tn = seconds([&] { naive_cubic(a); }, reps);
    std::printf("cubic convolution  M=%-4d            fft %.2e s  direct %.2e s  ratio %.1f\n", M,
                tf, tn, tn / tf);
  }
  return 0;
}
