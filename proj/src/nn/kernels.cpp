// Copyright 2026 The svfl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svfl/nn/kernels.hpp"

#include <atomic>
#include <cstddef>
#include <string>

#include "svfl/common/error.hpp"

namespace svfl::nn {

namespace {
std::atomic<Exec> g_default_exec{Exec::Parallel};
}  // namespace

Exec default_exec() { return g_default_exec.load(std::memory_order_relaxed); }
void set_default_exec(Exec exec) { g_default_exec.store(exec, std::memory_order_relaxed); }

namespace kernels {

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc[0] += pa[k] * pb[k];
    acc[1] += pa[k + 1] * pb[k + 1];
    acc[2] += pa[k + 2] * pb[k + 2];
    acc[3] += pa[k + 3] * pb[k + 3];
  }
  for (; k < n; ++k) acc[0] += pa[k] * pb[k];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

namespace {

void check_forward(const Matrix& x, const Matrix& w, std::span<const double> bias,
                   const Matrix& out) {
  if (x.cols() != w.cols() || bias.size() != w.rows() || out.rows() != x.rows() ||
      out.cols() != w.rows()) {
    throw DimensionError("affine_forward: x " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", w " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()));
  }
}

void check_input_grad(const Matrix& grad, const Matrix& w, const Matrix& grad_in) {
  if (grad.cols() != w.rows() || grad_in.rows() != grad.rows() || grad_in.cols() != w.cols()) {
    throw DimensionError("input_grad: shape mismatch");
  }
}

void check_param_grad(const Matrix& grad, const Matrix& x, const Matrix& grad_w,
                      std::span<double> grad_b) {
  if (grad.rows() != x.rows() || grad_w.rows() != grad.cols() || grad_w.cols() != x.cols() ||
      grad_b.size() != grad.cols()) {
    throw DimensionError("accumulate_param_grad: shape mismatch");
  }
}

// Per-row routines shared by both execution policies.

inline void forward_row(const Matrix& x, const Matrix& w, std::span<const double> bias,
                        Matrix& out, std::size_t i) {
  auto xi = x.row(i);
  auto yi = out.row(i);
  for (std::size_t o = 0; o < w.rows(); ++o) yi[o] = bias[o] + dot(xi, w.row(o));
}

inline void input_grad_row(const Matrix& grad, const Matrix& w, Matrix& grad_in, std::size_t i) {
  auto gi = grad.row(i);
  auto dst = grad_in.row(i);
  std::fill(dst.begin(), dst.end(), 0.0);
  const std::size_t in = w.cols();
  for (std::size_t o = 0; o < w.rows(); ++o) {
    const double g = gi[o];
    if (g == 0.0) continue;
    const double* wo = w.row(o).data();
    double* d = dst.data();
    for (std::size_t k = 0; k < in; ++k) d[k] += g * wo[k];
  }
}

inline void param_grad_row(const Matrix& grad, const Matrix& x, Matrix& grad_w,
                           std::span<double> grad_b, std::size_t o) {
  double* gw = grad_w.row(o).data();
  const std::size_t in = x.cols();
  double gb = 0.0;
  for (std::size_t i = 0; i < grad.rows(); ++i) {
    const double g = grad(i, o);
    gb += g;
    if (g == 0.0) continue;
    const double* xi = x.row(i).data();
    for (std::size_t k = 0; k < in; ++k) gw[k] += g * xi[k];
  }
  grad_b[o] += gb;
}

}  // namespace

namespace serial {

void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out) {
  check_forward(x, w, bias, out);
  for (std::size_t i = 0; i < x.rows(); ++i) forward_row(x, w, bias, out, i);
}

void input_grad(const Matrix& grad, const Matrix& w, Matrix& grad_in) {
  check_input_grad(grad, w, grad_in);
  for (std::size_t i = 0; i < grad.rows(); ++i) input_grad_row(grad, w, grad_in, i);
}

void accumulate_param_grad(const Matrix& grad, const Matrix& x, Matrix& grad_w,
                           std::span<double> grad_b) {
  check_param_grad(grad, x, grad_w, grad_b);
  for (std::size_t o = 0; o < grad.cols(); ++o) param_grad_row(grad, x, grad_w, grad_b, o);
}

}  // namespace serial

namespace parallel {

void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out) {
  check_forward(x, w, bias, out);
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    forward_row(x, w, bias, out, static_cast<std::size_t>(i));
  }
}

void input_grad(const Matrix& grad, const Matrix& w, Matrix& grad_in) {
  check_input_grad(grad, w, grad_in);
  const auto n = static_cast<std::ptrdiff_t>(grad.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    input_grad_row(grad, w, grad_in, static_cast<std::size_t>(i));
  }
}

void accumulate_param_grad(const Matrix& grad, const Matrix& x, Matrix& grad_w,
                           std::span<double> grad_b) {
  check_param_grad(grad, x, grad_w, grad_b);
  const auto n = static_cast<std::ptrdiff_t>(grad.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t o = 0; o < n; ++o) {
    param_grad_row(grad, x, grad_w, grad_b, static_cast<std::size_t>(o));
  }
}

}  // namespace parallel

void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out,
                    Exec exec) {
  if (exec == Exec::Parallel) {
    parallel::affine_forward(x, w, bias, out);
  } else {
    serial::affine_forward(x, w, bias, out);
  }
}

void input_grad(const Matrix& grad, const Matrix& w, Matrix& grad_in, Exec exec) {
  if (exec == Exec::Parallel) {
    parallel::input_grad(grad, w, grad_in);
  } else {
    serial::input_grad(grad, w, grad_in);
  }
}

void accumulate_param_grad(const Matrix& grad, const Matrix& x, Matrix& grad_w,
                           std::span<double> grad_b, Exec exec) {
  if (exec == Exec::Parallel) {
    parallel::accumulate_param_grad(grad, x, grad_w, grad_b);
  } else {
    serial::accumulate_param_grad(grad, x, grad_w, grad_b);
  }
}

}  // namespace kernels
}  // namespace svfl::nn
