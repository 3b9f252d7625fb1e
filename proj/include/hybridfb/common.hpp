// SPDX-License-Identifier: Apache-2.0
//
// hybridfb - hybrid statistical/instantaneous feedback for FDD massive MIMO
// Copyright (C) 2026 The hybridfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybridfb {

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;

constexpr double pi = std::numbers::pi;

// All recoverable input and contract violations surface as this type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Closest integer, ties to even (0.5 -> 0, 1.5 -> 2, 2.5 -> 2).
inline long round_half_even(double x)
{
    return static_cast<long>(std::nearbyint(x)); // default FE_TONEAREST
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs)
{
    CompensatedSum s;
    for (double x : xs)
        s.add(x);
    return s.value();
}

inline bool is_hermitian(const cmat& a, double tol = 1e-10)
{
    if (a.rows() != a.cols())
        return false;
    const double scale = std::max(1.0, a.norm());
    return (a - a.adjoint()).norm() <= tol * scale;
}

} // namespace hybridfb
