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

#include "hybridfb/common.hpp"
#include "hybridfb/rng.hpp"

#include <algorithm>

namespace hybridfb {

struct ArrayGeometry {
    int antennas = 2;
    double d_over_lambda = 0.5;

    void validate() const
    {
        if (antennas < 2)
            throw Error("array geometry: antenna count must be >= 2");
        if (!(d_over_lambda > 0.0))
            throw Error("array geometry: antenna spacing must be positive");
    }
};

// Per-user multipath geometry. Path angles are drawn once and frozen; only
// the complex path gains change between coherence blocks.
struct UserChannelProfile {
    double mean_aoa = 0.0;
    double spread = 0.0;
    std::vector<double> path_angles;

    std::size_t paths() const { return path_angles.size(); }

    void validate() const
    {
        if (path_angles.empty())
            throw Error("user profile: at least one path is required");
        if (spread < 0.0)
            throw Error("user profile: angular spread must be nonnegative");
        const double lo = mean_aoa - spread / 2.0;
        const double hi = mean_aoa + spread / 2.0;
        const double slack = 1e-12 * std::max(1.0, std::abs(mean_aoa));
        for (double th : path_angles)
            if (th < lo - slack || th > hi + slack)
                throw Error("user profile: path angle outside [mean - spread/2, mean + spread/2]");
    }

    // Paths may leave [-pi/2, pi/2] near endfire; this is accepted and only
    // reported.
    bool exceeds_visible_region() const
    {
        return mean_aoa - spread / 2.0 < -pi / 2.0 || mean_aoa + spread / 2.0 > pi / 2.0;
    }
};

struct ChannelRealization {
    cvec h;
    std::size_t owner = 0;
};

struct Covariance {
    cmat phi;

    Eigen::Index dim() const { return phi.rows(); }
};

// Diagonal of V^H Phi V: the average gain of each virtual beam.
struct BeamDomainCovariance {
    rvec diag;

    Eigen::Index dim() const { return diag.size(); }
    // 1-indexed beam access.
    double gain(int beam) const { return diag[beam - 1]; }
};

// a(theta)_m = exp(j 2 pi d/lambda m sin(theta)), m = 0..M-1.
inline cvec steering_vector(double theta, const ArrayGeometry& geometry)
{
    const int m_count = geometry.antennas;
    cvec a(m_count);
    const double step = geometry.d_over_lambda * std::sin(theta);
    for (int m = 0; m < m_count; ++m) {
        double cycles = step * m;
        cycles -= std::floor(cycles);
        const double phase = 2.0 * pi * cycles;
        a[m] = cplx(std::cos(phase), std::sin(phase));
    }
    return a;
}

// Columns are the steering vectors of the profile's paths.
inline cmat steering_matrix(const UserChannelProfile& profile, const ArrayGeometry& geometry)
{
    cmat a(geometry.antennas, static_cast<Eigen::Index>(profile.paths()));
    for (std::size_t p = 0; p < profile.paths(); ++p)
        a.col(static_cast<Eigen::Index>(p)) = steering_vector(profile.path_angles[p], geometry);
    return a;
}

inline UserChannelProfile draw_user_profile(double mean_aoa, double spread, int paths, Rng& rng)
{
    if (paths < 1)
        throw Error("draw_user_profile: path count must be >= 1");
    if (spread < 0.0)
        throw Error("draw_user_profile: angular spread must be nonnegative");
    UserChannelProfile profile{mean_aoa, spread, {}};
    profile.path_angles.reserve(static_cast<std::size_t>(paths));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int p = 0; p < paths; ++p) {
        const double offset = spread == 0.0 ? 0.0 : (u(rng) - 0.5) * spread;
        profile.path_angles.push_back(mean_aoa + offset);
    }
    return profile;
}

// h = (1/sqrt(P)) A gamma, for explicit path gains.
inline cvec compose_channel(const cmat& steering, const cvec& gains)
{
    if (steering.cols() != gains.size())
        throw Error("compose_channel: gain count does not match path count");
    return steering * gains / std::sqrt(static_cast<double>(gains.size()));
}

inline ChannelRealization draw_channel(const cmat& steering, Rng& rng, std::size_t owner = 0)
{
    const cvec gains = complex_gaussian_vector(steering.cols(), rng);
    return {compose_channel(steering, gains), owner};
}

inline ChannelRealization draw_channel(const UserChannelProfile& profile, const ArrayGeometry& geometry,
                                       Rng& rng, std::size_t owner = 0)
{
    return draw_channel(steering_matrix(profile, geometry), rng, owner);
}

inline Covariance covariance_from_steering(const cmat& steering)
{
    const double inv_p = 1.0 / static_cast<double>(steering.cols());
    cmat phi = inv_p * (steering * steering.adjoint());
    phi = 0.5 * (phi + phi.adjoint()).eval();
    return {phi};
}

// Phi = (1/P) sum_p a(theta_p) a(theta_p)^H, exact for unit-variance i.i.d. gains.
inline Covariance covariance(const UserChannelProfile& profile, const ArrayGeometry& geometry)
{
    return covariance_from_steering(steering_matrix(profile, geometry));
}

// Column t (1-indexed) entry m: exp(j pi m (2t/M - 1)) / sqrt(M).
inline cmat dft_matrix(int m_count)
{
    if (m_count < 1)
        throw Error("dft_matrix: size must be >= 1");
    cmat v(m_count, m_count);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_count));
    const long two_m = 2L * m_count;
    for (int t = 1; t <= m_count; ++t) {
        for (int m = 0; m < m_count; ++m) {
            // phase = pi * m (2t - M) / M, reduced exactly in integers mod 2M
            long num = (static_cast<long>(m) * (2L * t - m_count)) % two_m;
            if (num < 0)
                num += two_m;
            const double phase = pi * static_cast<double>(num) / m_count;
            v(m, t - 1) = scale * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return v;
}

inline BeamDomainCovariance beam_domain_covariance(const Covariance& cov, const cmat& v)
{
    if (cov.phi.rows() != v.rows() || v.rows() != v.cols())
        throw Error("beam_domain_covariance: dimension mismatch");
    if (!is_hermitian(cov.phi))
        throw Error("beam_domain_covariance: covariance is not Hermitian");
    const cmat pv = cov.phi * v;
    rvec diag(v.cols());
    for (Eigen::Index t = 0; t < v.cols(); ++t)
        diag[t] = std::max(0.0, v.col(t).dot(pv.col(t)).real());
    return {diag};
}

// Closest virtual beam (1-indexed) to a single path at half-wavelength spacing.
// Beam 0 and beam M share a phase grid point, so 0 wraps to M.
inline int closest_beam(double theta, int m_count)
{
    const long t = round_half_even(0.5 * m_count * (std::sin(theta) + 1.0));
    return t <= 0 ? m_count : static_cast<int>(std::min<long>(t, m_count));
}

} // namespace hybridfb
