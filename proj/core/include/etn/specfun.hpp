// Copyright 2026 The ETN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Scalar special functions used by the Dirichlet and Gamma formulas.
// All functions are pure and thread-safe.

namespace etn::specfun {

/// ln Gamma(x) for x > 0. Lanczos approximation with reflection below 1/2.
double lgamma(double x);

/// psi(x) = d/dx ln Gamma(x) for x > 0.
double digamma(double x);

/// psi'(x) for x > 0.
double trigamma(double x);

/// ln(1 + e^x), overflow-safe.
double softplus(double x);

/// Inverse of softplus: ln(e^y - 1) for y > 0.
double softplus_inv(double y);

/// Logistic sigmoid, the derivative of softplus.
double sigmoid(double x);

/// log(e^x - 1) for x > 0 without overflow; equals softplus_inv.
inline double log_expm1(double x) { return softplus_inv(x); }

/// Regularized lower incomplete gamma P(shape, x).
double gamma_p(double shape, double x);

/// Regularized upper incomplete gamma Q(shape, x) = 1 - P(shape, x),
/// computed directly so the upper tail keeps relative accuracy.
double gamma_q(double shape, double x);

/// Log density of Gamma(shape, rate) at x > 0.
double log_gamma_pdf(double x, double shape, double rate);

/// Quantile of the standard Gamma(shape, 1): returns g with P(shape, g) = u.
/// u must lie in (0, 1).
double gamma_p_inverse(double shape, double u);

}  // namespace etn::specfun
