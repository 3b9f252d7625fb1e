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

#include "hybridfb/channel_model.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace hybridfb;

namespace {

void expect_vec_near(const cvec& got, const std::vector<cplx>& want, double tol = 1e-12)
{
    ASSERT_EQ(got.size(), static_cast<Eigen::Index>(want.size()));
    for (std::size_t i = 0; i < want.size(); ++i)
        EXPECT_LT(std::abs(got[static_cast<Eigen::Index>(i)] - want[i]), tol) << "entry " << i;
}

UserChannelProfile fixed_profile(std::vector<double> angles)
{
    UserChannelProfile p;
    p.mean_aoa = angles.front();
    p.spread = 0.0;
    double lo = angles.front(), hi = angles.front();
    for (double a : angles) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    p.mean_aoa = 0.5 * (lo + hi);
    p.spread = hi - lo;
    p.path_angles = std::move(angles);
    return p;
}

} // namespace

TEST(SteeringVector, Broadside)
{
    expect_vec_near(steering_vector(0.0, {4, 0.5}), {1, 1, 1, 1});
}

TEST(SteeringVector, Endfire)
{
    expect_vec_near(steering_vector(pi / 2, {2, 0.5}), {1, -1});
}

TEST(SteeringVector, QuarterStep)
{
    const cplx j{0, 1};
    expect_vec_near(steering_vector(pi / 6, {4, 0.5}), {1, j, -1, -j});
}

TEST(SteeringVector, NormIsExactlyM)
{
    Rng rng(7);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double theta = u(rng);
        for (int m : {2, 7, 64, 128})
            EXPECT_NEAR(steering_vector(theta, {m, 0.5}).squaredNorm(), m, 1e-9 * m);
    }
}

TEST(UserProfile, DegenerateSpread)
{
    Rng rng(1);
    const auto p = draw_user_profile(0.3, 0.0, 5, rng);
    ASSERT_EQ(p.paths(), 5u);
    for (double a : p.path_angles)
        EXPECT_EQ(a, 0.3);
}

TEST(UserProfile, RejectsZeroPaths)
{
    Rng rng(1);
    EXPECT_THROW(draw_user_profile(0.0, 0.1, 0, rng), Error);
}

TEST(UserProfile, SampleMeanMoments)
{
    const double spread = 10.0 * pi / 180.0;
    const int paths = 20;
    const double sigma = spread / std::sqrt(12.0 * paths);
    Rng rng(2024);
    double grand = 0.0;
    int outside = 0;
    const int redraws = 1000;
    for (int r = 0; r < redraws; ++r) {
        const auto p = draw_user_profile(0.0, spread, paths, rng);
        double mean = 0.0;
        for (double a : p.path_angles)
            mean += a;
        mean /= paths;
        grand += mean;
        if (std::abs(mean) > 3.0 * sigma)
            ++outside;
    }
    grand /= redraws;
    EXPECT_LT(std::abs(grand), 3.0 * sigma);
    // 3-sigma band holds ~99.7% of redraws
    EXPECT_LE(outside, 10);
}

TEST(UserProfile, SinglePathNearEndfire)
{
    Rng rng(3);
    const double spread = 10.0 * pi / 180.0;
    for (int r = 0; r < 100; ++r) {
        const auto p = draw_user_profile(pi / 2, spread, 1, rng);
        ASSERT_EQ(p.paths(), 1u);
        EXPECT_GE(p.path_angles[0], pi / 2 - spread / 2);
        EXPECT_LE(p.path_angles[0], pi / 2 + spread / 2);
        EXPECT_TRUE(p.exceeds_visible_region());
        EXPECT_NO_THROW(p.validate());
    }
}

TEST(Channel, SinglePathUnitGainIsSteeringVector)
{
    const ArrayGeometry g{8, 0.5};
    const auto p = fixed_profile({0.4});
    const cvec h = compose_channel(steering_matrix(p, g), cvec::Ones(1));
    EXPECT_LT((h - steering_vector(0.4, g)).norm(), 1e-12);
}

TEST(Channel, MeanSquaredNormIsM)
{
    const ArrayGeometry g{16, 0.5};
    Rng rng(11);
    const auto p = draw_user_profile(0.2, 10.0 * pi / 180.0, 20, rng);
    const cmat a = steering_matrix(p, g);
    double acc = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i)
        acc += draw_channel(a, rng).h.squaredNorm();
    EXPECT_NEAR(acc / draws, 16.0, 0.05 * 16.0);
}

TEST(Channel, SampleCovarianceMatchesAnalytic)
{
    const ArrayGeometry g{8, 0.5};
    Rng rng(5);
    const auto p = draw_user_profile(-0.6, 10.0 * pi / 180.0, 20, rng);
    const cmat a = steering_matrix(p, g);
    cmat sample = cmat::Zero(8, 8);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const cvec h = draw_channel(a, rng).h;
        sample += h * h.adjoint();
    }
    sample /= draws;
    const cmat phi = covariance(p, g).phi;
    EXPECT_LT((sample - phi).norm() / phi.norm(), 0.05);
}

TEST(Covariance, SinglePathRankOne)
{
    const ArrayGeometry g{6, 0.5};
    const auto p = fixed_profile({0.9});
    const cmat phi = covariance(p, g).phi;
    const cvec a = steering_vector(0.9, g);
    EXPECT_LT((phi - a * a.adjoint()).norm(), 1e-12);
    EXPECT_NEAR(phi.trace().real(), 6.0, 1e-12);
}

TEST(Covariance, OrthogonalPathsGiveIdentity)
{
    const auto p = fixed_profile({0.0, pi / 2});
    const cmat phi = covariance(p, {2, 0.5}).phi;
    EXPECT_LT((phi - cmat::Identity(2, 2)).norm(), 1e-12);
}

TEST(Covariance, InvariantsOnRandomProfiles)
{
    Rng rng(8);
    std::uniform_real_distribution<double> mean(-pi / 2, pi / 2);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 4 + 4 * (trial % 8);
        const int paths = 1 + trial % 25;
        const auto p = draw_user_profile(mean(rng), 10.0 * pi / 180.0, paths, rng);
        const cmat phi = covariance(p, {m, 0.5}).phi;
        EXPECT_TRUE(is_hermitian(phi));
        EXPECT_NEAR(phi.trace().real(), m, 1e-9 * m);
        Eigen::SelfAdjointEigenSolver<cmat> es(phi);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9 * m);
        int rank = 0;
        for (double ev : es.eigenvalues())
            if (ev > 1e-8 * m)
                ++rank;
        EXPECT_LE(rank, std::min(paths, m));
    }
}

TEST(DftMatrix, SizeTwo)
{
    const cmat v = dft_matrix(2);
    const double s = 1 / std::sqrt(2.0);
    // t = 1: phase step 0; t = 2: phase step pi
    expect_vec_near(v.col(0), {s, s});
    expect_vec_near(v.col(1), {s, -s});
}

TEST(DftMatrix, MiddleColumnIsFlat)
{
    for (int m : {2, 4, 8, 16}) {
        const cmat v = dft_matrix(m);
        const double s = 1 / std::sqrt(static_cast<double>(m));
        for (int i = 0; i < m; ++i)
            EXPECT_LT(std::abs(v(i, m / 2 - 1) - s), 1e-14);
    }
}

TEST(DftMatrix, Unitary)
{
    for (int m : {2, 4, 8, 16, 64, 128}) {
        const cmat v = dft_matrix(m);
        EXPECT_LT((v.adjoint() * v - cmat::Identity(m, m)).norm(), 1e-10) << "M=" << m;
    }
}

TEST(BeamDomain, IdentityGivesOnes)
{
    const cmat v = dft_matrix(8);
    const auto bd = beam_domain_covariance({cmat::Identity(8, 8)}, v);
    for (int t = 1; t <= 8; ++t)
        EXPECT_NEAR(bd.gain(t), 1.0, 1e-12);
}

TEST(BeamDomain, AlignedPathHitsOneBeam)
{
    const int m = 16;
    const int t = 5;
    const double theta = std::asin(2.0 * t / m - 1.0);
    const auto phi = covariance(fixed_profile({theta}), {m, 0.5});
    const auto bd = beam_domain_covariance(phi, dft_matrix(m));
    for (int b = 1; b <= m; ++b)
        EXPECT_NEAR(bd.gain(b), b == t ? m : 0.0, 1e-9) << "beam " << b;
}

TEST(BeamDomain, TracePreserved)
{
    Rng rng(13);
    for (int m : {3, 8, 32}) {
        const cmat phi = oracle::random_psd(m, 2, rng);
        const auto bd = beam_domain_covariance({phi}, dft_matrix(m));
        EXPECT_NEAR(bd.diag.sum(), phi.trace().real(), 1e-9 * phi.trace().real());
        EXPECT_GE(bd.diag.minCoeff(), 0.0);
    }
}

TEST(BeamDomain, RejectsNonHermitian)
{
    cmat phi = cmat::Identity(4, 4);
    phi(0, 1) = 1.0;
    EXPECT_THROW(beam_domain_covariance({phi}, dft_matrix(4)), Error);
}

TEST(BeamDomain, PowerConcentratesOnClosestBeam)
{
    const int m = 64;
    const cmat v = dft_matrix(m);
    Rng rng(99);
    std::uniform_real_distribution<double> u(-pi / 2, pi / 2);
    for (int trial = 0; trial < 100; ++trial) {
        const double theta = u(rng);
        const auto bd = beam_domain_covariance(covariance(fixed_profile({theta}), {m, 0.5}), v);
        Eigen::Index peak = 0;
        bd.diag.maxCoeff(&peak);
        EXPECT_EQ(static_cast<int>(peak) + 1, closest_beam(theta, m)) << "theta=" << theta;
    }
}
