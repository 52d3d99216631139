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

// Dense-layer kernels. Each kernel exists twice: a serial reference and an
// OpenMP version that splits the outer loop across threads. Both call the
// same per-row routine, so their results are bit-identical for any thread
// count; tests/unit/kernels_test.cpp holds them to that.

#pragma once

#include <span>

#include "svfl/nn/matrix.hpp"

namespace svfl::nn {

enum class Exec { Serial, Parallel };

// Process-wide default used by the layer code. Parallel unless overridden.
Exec default_exec();
void set_default_exec(Exec exec);

namespace kernels {

namespace serial {
// out(B x out) = x(B x in) * w(out x in)^T + bias
void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out);
// grad_in(B x in) = grad(B x out) * w(out x in)
void input_grad(const Matrix& grad, const Matrix& w, Matrix& grad_in);
// grad_w += grad^T * x ; grad_b += column sums of grad
void accumulate_param_grad(const Matrix& grad, const Matrix& x, Matrix& grad_w,
                           std::span<double> grad_b);
}  // namespace serial

namespace parallel {
void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out);
void input_grad(const Matrix& grad, const Matrix& w, Matrix& grad_in);
void accumulate_param_grad(const Matrix& grad, const Matrix& x, Matrix& grad_w,
                           std::span<double> grad_b);
}  // namespace parallel

void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> bias, Matrix& out,
                    Exec exec = default_exec());
void input_grad(const Matrix& grad, const Matrix& w, Matrix& grad_in, Exec exec = default_exec());
void accumulate_param_grad(const Matrix& grad, const Matrix& x, Matrix& grad_w,
                           std::span<double> grad_b, Exec exec = default_exec());

// Fixed-order dot product (four interleaved partial sums).
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace kernels
}  // namespace svfl::nn
