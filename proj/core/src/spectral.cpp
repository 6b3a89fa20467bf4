#include "krf/spectral.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <cstring>
#include <mutex>
#include <vector>

namespace krf {

namespace {
// The FFTW planner is not thread-safe; executions of distinct plans are.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

struct Spectral::Impl {
  int n = 0;
  std::size_t real_size = 0;
  std::size_t cplx_size = 0;  // n * (n/2 + 1)
  double* rbuf = nullptr;
  fftw_complex* cbuf = nullptr;
  fftw_plan fwd{};
  fftw_plan bwd{};
  std::vector<double> ksq;  // (kx^2 + ky^2) per complex index, integer freqs

  explicit Impl(int n_) : n(n_) {
    real_size = static_cast<std::size_t>(n) * n;
    cplx_size = static_cast<std::size_t>(n) * (n / 2 + 1);
    rbuf = fftw_alloc_real(real_size);
    cbuf = fftw_alloc_complex(cplx_size);
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fwd = fftw_plan_dft_r2c_2d(n, n, rbuf, cbuf, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_c2r_2d(n, n, cbuf, rbuf, FFTW_ESTIMATE);
    }
    ksq.resize(cplx_size);
    const int half = n / 2;
    for (int j = 0; j < n; ++j) {
      const int ky = (j <= half) ? j : j - n;
      for (int i = 0; i <= half; ++i) {
        const int kx = i;
        ksq[static_cast<std::size_t>(j) * (half + 1) + i] =
            static_cast<double>(kx) * kx + static_cast<double>(ky) * ky;
      }
    }
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(rbuf);
    fftw_free(cbuf);
  }

  // out[k] = mult(k) * in[k] in Fourier space; mult(0) applied as given.
  template <class Mult>
  void apply(const ScalarField& f, ScalarField& out, Mult mult) {
    std::copy(f.data().begin(), f.data().end(), rbuf);
    fftw_execute(fwd);
    const double scale = 1.0 / static_cast<double>(real_size);
    for (std::size_t k = 0; k < cplx_size; ++k) {
      const double m = mult(ksq[k], k == 0) * scale;
      cbuf[k][0] *= m;
      cbuf[k][1] *= m;
    }
    fftw_execute(bwd);
    std::copy(rbuf, rbuf + real_size, out.data().begin());
  }
};

Spectral::Spectral(TorusGrid grid) : grid_(grid), impl_(std::make_unique<Impl>(grid.n())) {}
Spectral::~Spectral() = default;

ScalarField Spectral::laplacian(const ScalarField& f) {
  ScalarField out(grid_);
  impl_->apply(f, out, [](double ksq, bool zero) {
    return zero ? 0.0 : -kTwoPi * ksq;
  });
  return out;
}

ScalarField Spectral::solve_poisson(const ScalarField& rhs) {
  const double m = rhs.mean();
  if (std::fabs(m) > 1e-10)
    throw std::runtime_error(
        "solve_poisson: right-hand side has nonzero mean " + std::to_string(m) +
        " (mass normalization bug upstream)");
  ScalarField out(grid_);
  impl_->apply(rhs, out, [](double ksq, bool zero) {
    return zero ? 0.0 : -1.0 / (kTwoPi * ksq);
  });
  out.set_mean_zero_flag(true);
  return out;
}

void Spectral::gradient(const ScalarField& f, ScalarField& fx, ScalarField& fy) {
  const int n = impl_->n;
  const int half = n / 2;
  std::copy(f.data().begin(), f.data().end(), impl_->rbuf);
  fftw_execute(impl_->fwd);
  const double scale = 1.0 / static_cast<double>(impl_->real_size);
  std::vector<std::array<double, 2>> hat(impl_->cplx_size);
  std::memcpy(hat.data(), impl_->cbuf, impl_->cplx_size * sizeof(fftw_complex));

  auto run = [&](bool ydir, ScalarField& out) {
    for (int j = 0; j < n; ++j) {
      const int ky = (j <= half) ? j : j - n;
      for (int i = 0; i <= half; ++i) {
        // Nyquist derivative modes are dropped (their sine transform is zero
        // on the grid); keeps d/dx real and antisymmetric.
        int k = ydir ? ky : i;
        if ((!ydir && i == half) || (ydir && (ky == -half))) k = 0;
        const double w = kTwoPi * k * scale;
        const std::size_t idx = static_cast<std::size_t>(j) * (half + 1) + i;
        impl_->cbuf[idx][0] = -w * hat[idx][1];
        impl_->cbuf[idx][1] = w * hat[idx][0];
      }
    }
    fftw_execute(impl_->bwd);
    std::copy(impl_->rbuf, impl_->rbuf + impl_->real_size, out.data().begin());
  };
  if (fx.size() != f.size()) fx = ScalarField(grid_);
  if (fy.size() != f.size()) fy = ScalarField(grid_);
  run(false, fx);
  run(true, fy);
}

ScalarField Spectral::solve_helmholtz(const ScalarField& rhs, double c0, double dt) {
  ScalarField out(grid_);
  impl_->apply(rhs, out, [c0, dt](double ksq, bool) {
    return 1.0 / (c0 + dt * kTwoPi * ksq);
  });
  return out;
}

}  // namespace krf
