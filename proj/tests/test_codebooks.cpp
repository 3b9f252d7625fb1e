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

#include "hybridfb/codebooks.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace hybridfb;

namespace {

void expect_unit_norm(const Codebook& cb)
{
    for (long u = 1; u <= cb.size(); ++u)
        EXPECT_NEAR(cb.codeword(u).norm(), 1.0, 1e-12) << "codeword " << u;
}

BeamDomainCovariance diag_of(std::vector<double> d)
{
    return {Eigen::Map<rvec>(d.data(), static_cast<Eigen::Index>(d.size()))};
}

SubspaceBounds bounds(int x_min, int x_max, int m)
{
    SubspaceBounds b;
    b.x_min = x_min;
    b.x_max = x_max;
    b.beams = m;
    return b;
}

} // namespace

TEST(DftCodebook, FullSizeMatchesDftMatrix)
{
    for (int m : {4, 8, 16}) {
        const Codebook cb = dft_codebook(m, m);
        const cmat v = dft_matrix(m);
        EXPECT_LT((cb.vectors - v).norm(), 1e-12);
        expect_unit_norm(cb);
    }
}

TEST(DftCodebook, LastCodewordAlternates)
{
    const int m = 6;
    const Codebook cb = dft_codebook(m, 8);
    for (int i = 0; i < m; ++i)
        EXPECT_LT(std::abs(cb.codeword(8)[i] - cplx((i % 2 ? -1.0 : 1.0) / std::sqrt(6.0), 0.0)), 1e-14);
}

TEST(DftCodebook, DistinctCodewords)
{
    for (int m : {4, 16, 32})
        for (long x : {1L, 2L, 4L, 16L, 64L}) {
            const Codebook cb = dft_codebook(m, x);
            expect_unit_norm(cb);
            double worst = 0.0;
            for (long u = 1; u <= x; ++u)
                for (long w = u + 1; w <= x; ++w) {
                    cplx acc{};
                    for (int i = 0; i < m; ++i)
                        acc += std::conj(cb.codeword(u)[i]) * cb.codeword(w)[i];
                    worst = std::max(worst, std::abs(acc));
                }
            EXPECT_LT(worst, 1.0 - 1e-12) << "M=" << m << " X=" << x;
        }
}

TEST(SkewedCodebook, IdentityCovarianceIsIsotropic)
{
    Rng rng(4);
    const Codebook cb = skewed_codebook({cmat::Identity(4, 4)}, 4000, rng);
    expect_unit_norm(cb);
    // E[c c^H] = I/M for isotropic unit vectors
    const cmat second = cb.vectors * cb.vectors.adjoint() / 4000.0;
    EXPECT_LT((second - cmat::Identity(4, 4) / 4.0).norm(), 0.03);
}

TEST(SkewedCodebook, RankOneCovarianceCollinear)
{
    const ArrayGeometry g{8, 0.5};
    const cvec a = steering_vector(0.3, g);
    const cmat phi = a * a.adjoint() / (a.squaredNorm() / 8.0);
    Rng rng(5);
    const Codebook cb = skewed_codebook({phi}, 32, rng);
    for (long u = 1; u <= cb.size(); ++u)
        EXPECT_NEAR(std::abs(cb.codeword(u).dot(a)) / a.norm(), 1.0, 1e-9);
}

TEST(SkewedCodebook, UnitNormOnRandomCovariance)
{
    Rng rng(6);
    for (int rank : {1, 3, 16}) {
        const cmat phi = oracle::random_psd(16, rank, rng);
        expect_unit_norm(skewed_codebook({phi}, 64, rng));
    }
}

TEST(SkewedCodebook, RejectsZeroCovariance)
{
    Rng rng(6);
    EXPECT_THROW(skewed_codebook({cmat::Zero(3, 3)}, 2, rng), Error);
}

TEST(ApproximateSubspace, LeakageMargin)
{
    std::vector<double> d(16, 0.0);
    d[2] = d[3] = d[4] = 1.0; // beams 3..5
    const auto b = approximate_subspace(diag_of(d), 2);
    EXPECT_EQ(b.x_min, 1);
    EXPECT_EQ(b.x_max, 7);
    EXPECT_EQ(b.d_min, 3);
    EXPECT_EQ(b.d_max, 5);
}

TEST(ApproximateSubspace, SingleBeam)
{
    std::vector<double> d(16, 0.0);
    d[8] = 3.0;
    const auto b = approximate_subspace(diag_of(d), 0);
    EXPECT_EQ(b.x_min, 9);
    EXPECT_EQ(b.x_max, 9);
}

TEST(ApproximateSubspace, MarginClampsToArray)
{
    std::vector<double> d(16, 0.0);
    d[8] = 3.0;
    const auto b = approximate_subspace(diag_of(d), 16);
    EXPECT_EQ(b.x_min, 1);
    EXPECT_EQ(b.x_max, 16);
}

TEST(ApproximateSubspace, ThresholdIgnoresLeakageFloor)
{
    std::vector<double> d(8, 1e-6);
    d[3] = 1.0;
    d[5] = 0.01;
    const auto b = approximate_subspace(diag_of(d), 0, 1e-3);
    EXPECT_EQ(b.x_min, 4);
    EXPECT_EQ(b.x_max, 6);
}

TEST(ApproximateSubspace, EmptyCovariance)
{
    EXPECT_THROW(approximate_subspace(diag_of(std::vector<double>(8, 0.0)), 1), Error);
}

TEST(PredictedCodebook, LastCodewordOnUpperEdge)
{
    const int m = 32;
    const auto b = bounds(5, 12, m);
    const Codebook cb = predicted_codebook(b, 8, m);
    const double theta = 2.0 * 12 / m - 1.0;
    for (int i = 0; i < m; ++i) {
        const double ph = pi * i * theta;
        EXPECT_LT(std::abs(cb.codeword(8)[i] - cplx(std::cos(ph), std::sin(ph)) / std::sqrt(32.0)), 1e-12);
    }
    // upper edge coincides with DFT beam 12
    EXPECT_LT((cb.codeword(8) - dft_matrix(m).col(11)).norm(), 1e-12);
}

TEST(PredictedCodebook, ZeroWidthSubspace)
{
    const Codebook cb = predicted_codebook(bounds(7, 7, 16), 4, 16);
    for (long u = 2; u <= 4; ++u)
        EXPECT_LT((cb.codeword(u) - cb.codeword(1)).norm(), 1e-14);
}

TEST(PredictedCodebook, UnitNorm)
{
    for (int lo = 1; lo <= 20; lo += 3)
        expect_unit_norm(predicted_codebook(bounds(lo, lo + 9, 64), 16, 64));
}

TEST(Quantize, ExactCodeword)
{
    const Codebook cb = dft_codebook(8, 8);
    EXPECT_EQ(quantize_channel(cvec(cb.codeword(3)), cb).index, 3);
}

TEST(Quantize, OnlyOneNonOrthogonal)
{
    // Codewords 2..4 are e_2..e_4; h = e_1 + c_1 component only.
    cmat c = cmat::Zero(4, 4);
    c(0, 0) = 1.0;
    c(1, 1) = 1.0;
    c(2, 2) = 1.0;
    c(3, 3) = 1.0;
    const Codebook cb{c, CodebookKind::Dft, std::nullopt};
    cvec h = cvec::Zero(4);
    h[0] = cplx(0.3, -2.0);
    EXPECT_EQ(quantize_channel(h, cb).index, 1);
}

TEST(Quantize, TiesGoToLowestIndex)
{
    cmat c(2, 3);
    c << 1, 0, 1, 0, 1, 0;
    const Codebook cb{c, CodebookKind::Dft, std::nullopt};
    cvec h(2);
    h << 1, 1;
    EXPECT_EQ(quantize_channel(h, cb).index, 1);
}

TEST(Quantize, MatchesScanOracle)
{
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 4 + trial % 29;
        const cvec h = oracle::random_gaussian_matrix(m, 1, rng);
        const Codebook cb = trial % 2 ? dft_codebook(m, 16) : skewed_codebook({oracle::random_psd(m, 3, rng)}, 16, rng);
        EXPECT_EQ(quantize_channel(h, cb).index, oracle::scan_quantize(h, cb.vectors));
    }
}

TEST(Quantize, InvariantToPhaseAndScale)
{
    Rng rng(18);
    std::uniform_real_distribution<double> ph(0, 2 * pi), sc(0.01, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
        const cvec h = oracle::random_gaussian_matrix(16, 1, rng);
        const Codebook cb = dft_codebook(16, 32);
        const cvec g = h * std::polar(sc(rng), ph(rng));
        EXPECT_EQ(quantize_channel(h, cb).index, quantize_channel(g, cb).index);
    }
}

TEST(Quantize, ZeroChannelRejected)
{
    EXPECT_THROW(quantize_channel(cvec::Zero(4), dft_codebook(4, 4)), Error);
}

TEST(PredictedFeedback, LowerEdge)
{
    EXPECT_EQ(predicted_feedback_index(3, bounds(3, 20, 32), 16), 1);
}

TEST(PredictedFeedback, UpperEdge)
{
    EXPECT_EQ(predicted_feedback_index(20, bounds(3, 20, 32), 16), 16);
}

TEST(PredictedFeedback, Arithmetic)
{
    EXPECT_EQ(predicted_feedback_index(5, bounds(1, 9, 16), 4), 2);
}

TEST(PredictedFeedback, JustAboveLowerEdgeClampsToOne)
{
    // (4 - 3) * 2 / 17 rounds to 0
    EXPECT_EQ(predicted_feedback_index(4, bounds(3, 20, 32), 2), 1);
}

TEST(PredictedFeedback, OutsideSubspace)
{
    EXPECT_THROW(predicted_feedback_index(2, bounds(3, 20, 32), 4), Error);
    EXPECT_THROW(predicted_feedback_index(21, bounds(3, 20, 32), 4), Error);
}

TEST(PredictedBeam, Examples)
{
    EXPECT_EQ(predicted_beam_index(bounds(4, 11, 16), 8, 8), 11);
    for (long u = 1; u <= 8; ++u)
        EXPECT_EQ(predicted_beam_index(bounds(6, 6, 16), 8, u), 6);
    EXPECT_EQ(predicted_beam_index(bounds(1, 9, 16), 4, 2), 5);
    EXPECT_THROW(predicted_beam_index(bounds(1, 9, 16), 4, 5), Error);
}

TEST(PredictedBeam, RoundTripLandsNearStrongestBeam)
{
    for (int m : {8, 16, 32})
        for (int lo = 1; lo <= m; ++lo)
            for (int hi = lo; hi <= m; ++hi)
                for (long x : {1L, 2L, 4L, 16L, 64L})
                    for (int t = lo; t <= hi; ++t) {
                        const auto b = bounds(lo, hi, m);
                        const int back = predicted_beam_index(b, x, predicted_feedback_index(t, b, x));
                        const long slack = (hi - lo + x - 1) / x + 1;
                        ASSERT_LE(std::abs(back - t), slack)
                            << "M=" << m << " [" << lo << "," << hi << "] X=" << x << " t=" << t;
                    }
}

TEST(PredictedCodebook, RefinesDftGridForAlignedUser)
{
    const int m = 64;
    const cmat v = dft_matrix(m);
    for (long x : {2L, 4L, 8L, 16L}) {
        for (int t : {3, 10, 27, 45}) {
            if (t % (m / x) == 0)
                continue; // grid point shared with the DFT codebook
            const double theta = std::asin(2.0 * t / m - 1.0);
            const cvec a = steering_vector(theta, {m, 0.5});
            const cvec dir = a / a.norm();
            BeamDomainCovariance bd{rvec::Zero(m)};
            for (int b = 1; b <= m; ++b)
                bd.diag[b - 1] = std::norm(v.col(b - 1).dot(a));
            const auto sb = approximate_subspace(bd, 0);
            const Codebook pred = predicted_codebook(sb, x, m);
            const Codebook dft = dft_codebook(m, x);
            double best_pred = 0.0, best_dft = 0.0;
            for (long u = 1; u <= x; ++u) {
                best_pred = std::max(best_pred, std::abs(pred.codeword(u).dot(dir)));
                best_dft = std::max(best_dft, std::abs(dft.codeword(u).dot(dir)));
            }
            EXPECT_GT(best_pred, best_dft) << "X=" << x << " t=" << t;
        }
    }
}

TEST(CodebookText, RoundTrip)
{
    Rng rng(21);
    const Codebook cb = skewed_codebook({oracle::random_psd(5, 2, rng)}, 8, rng);
    std::stringstream ss;
    write_codebook(ss, cb);
    const Codebook back = read_codebook(ss);
    EXPECT_EQ(back.kind, CodebookKind::Skewed);
    EXPECT_EQ(back.vectors, cb.vectors);
}
