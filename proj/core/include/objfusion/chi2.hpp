/******************************************************************************
 * Copyright 2026 The objfusion Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#pragma once

namespace objfusion {

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// Chi-squared CDF with `df` degrees of freedom.
double chi2_cdf(double x, int df);

/// Percent point function (inverse CDF) of the chi-squared distribution.
/// Accurate to 1e-10 relative. Throws std::domain_error unless
/// 0 < p < 1 and df >= 1.
double chi2_ppf(double p, int df);

}  // namespace objfusion
