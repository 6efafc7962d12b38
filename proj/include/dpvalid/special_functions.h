// Copyright 2026 The dpvalid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPVALID_SPECIAL_FUNCTIONS_H_
#define DPVALID_SPECIAL_FUNCTIONS_H_

// Special functions for p-values. Target absolute accuracy is 1e-10; all
// functions throw ArgumentError outside their domain.

namespace dpvalid {

double normal_cdf(double x);
// 1 - normal_cdf(x) without cancellation for large x.
double normal_sf(double x);
// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

// I_x(a, b), a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);
// Smallest x with I_x(a, b) >= p (bisection to ~1e-15).
double inverse_regularized_incomplete_beta(double a, double b, double p);

// P(s, x) and Q(s, x) = 1 - P(s, x), s > 0, x >= 0.
double regularized_lower_gamma(double s, double x);
double regularized_upper_gamma(double s, double x);

// Upper tail of chi-squared with `df` degrees of freedom.
double chi_squared_sf(double statistic, double df);
// Two-sided p-value of Student's t.
double student_t_two_sided(double t, double df);

}  // namespace dpvalid

#endif  // DPVALID_SPECIAL_FUNCTIONS_H_
