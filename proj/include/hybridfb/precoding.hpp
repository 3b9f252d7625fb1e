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

#include "hybridfb/channel_model.hpp"
#include "hybridfb/common.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace hybridfb {

struct PrecoderSet {
    std::vector<cvec> class_i;
    std::vector<cvec> class_s;
};

struct GeneralizedEigenvector {
    cvec vector;
    double quotient = 0.0; // (w^H B w) / (w^H A w)
    bool tie = false;      // top generalized eigenvalue was not simple
};

// Rotates w so that its first entry of largest modulus is real positive.
inline void fix_phase(cvec& w)
{
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double a = std::abs(w[i]);
        if (a > best) {
            best = a;
            pivot = i;
        }
    }
    if (best > 0.0)
        w *= std::conj(w[pivot]) / best;
}

inline double rayleigh_quotient(const cmat& a, const cmat& b, const cvec& w)
{
    return w.dot(b * w).real() / w.dot(a * w).real();
}

namespace detail {

inline void check_pair(const cmat& a, Eigen::Index b_rows, Eigen::Index b_cols)
{
    if (a.rows() != a.cols() || b_rows != a.rows() || b_cols != a.cols())
        throw Error("generalized eigenproblem: dimension mismatch");
    if (a.rows() == 0)
        throw Error("generalized eigenproblem: empty matrices");
    if (!is_hermitian(a))
        throw Error("generalized eigenproblem: A is not Hermitian");
}

inline double pd_floor(const cmat& a)
{
    return 1e-12 * a.trace().real() / static_cast<double>(a.rows());
}

inline Eigen::LLT<cmat> checked_cholesky(const cmat& a, bool exact_check)
{
    if (exact_check) {
        Eigen::SelfAdjointEigenSolver<cmat> es(a, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success || !(es.eigenvalues()[0] > pd_floor(a)))
            throw Error("generalized eigenproblem: A is not positive definite");
    }
    Eigen::LLT<cmat> llt(a);
    if (llt.info() != Eigen::Success)
        throw Error("generalized eigenproblem: A is not positive definite");
    if (!exact_check) {
        const double floor_level = pd_floor(a);
        const cmat& l = llt.matrixLLT();
        for (Eigen::Index i = 0; i < l.rows(); ++i)
            if (!(std::norm(l(i, i)) > floor_level))
                throw Error("generalized eigenproblem: A is not positive definite");
    }
    return llt;
}

} // namespace detail

// Unit-norm maximizer of (w^H B w) / (w^H A w) for Hermitian PD A and
// Hermitian PSD B, by Cholesky whitening A = L L^H and a Hermitian
// eigendecomposition of L^-1 B L^-H.
inline GeneralizedEigenvector max_gen_eigvec(const cmat& a, const cmat& b)
{
    detail::check_pair(a, b.rows(), b.cols());
    if (!is_hermitian(b))
        throw Error("generalized eigenproblem: B is not Hermitian");
    const Eigen::LLT<cmat> llt = detail::checked_cholesky(a, true);
    const auto l = llt.matrixL();
    const cmat y = l.solve(b);
    cmat c = l.solve(cmat(y.adjoint()));
    c = 0.5 * (c + c.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<cmat> es(c);
    if (es.info() != Eigen::Success)
        throw Error("generalized eigenproblem: eigensolver did not converge");
    const rvec& lambda = es.eigenvalues(); // ascending
    const Eigen::Index top = lambda.size() - 1;
    const double tie_tol = 1e-10 * std::max(1.0, std::abs(lambda[top]));
    Eigen::Index pick = top;
    while (pick > 0 && lambda[top] - lambda[pick - 1] <= tie_tol)
        --pick;

    GeneralizedEigenvector out;
    out.tie = pick != top;
    out.vector = llt.matrixU().solve(cvec(es.eigenvectors().col(pick)));
    out.vector.normalize();
    fix_phase(out.vector);
    out.quotient = rayleigh_quotient(a, b, out.vector);
    return out;
}

// Rank-one numerator B = b b^H has the closed-form maximizer A^-1 b; this
// is the same generalized eigenvector without the dense eigensolve.
inline GeneralizedEigenvector max_gen_eigvec_rank1(const cmat& a, const cvec& b)
{
    detail::check_pair(a, b.size(), b.size());
    const Eigen::LLT<cmat> llt = detail::checked_cholesky(a, false);
    GeneralizedEigenvector out;
    out.vector = llt.solve(b);
    const double n = out.vector.norm();
    if (n == 0.0) {
        // b = 0: every direction has zero quotient.
        out.vector = cvec::Zero(b.size());
        out.vector[0] = 1.0;
        out.tie = b.size() > 1;
        return out;
    }
    out.vector /= n;
    fix_phase(out.vector);
    const double num = std::norm(b.dot(out.vector));
    out.quotient = num / out.vector.dot(a * out.vector).real();
    return out;
}

// SLNR precoders for class-I users (quantized channels) and class-S users
// (covariances). Leakage from each precoder onto every other user is
// measured with whatever CSI the BS holds for that user.
inline PrecoderSet hybrid_slnr_precoders(std::span<const cvec> quantized_i,
                                         std::span<const Covariance> cov_s, double p_d)
{
    if (quantized_i.size() + cov_s.size() == 0)
        throw Error("hybrid_slnr_precoders: no users");
    if (!(p_d > 0.0))
        throw Error("hybrid_slnr_precoders: transmit power must be positive");
    const Eigen::Index m_count = !quantized_i.empty() ? quantized_i.front().size() : cov_s.front().dim();
    for (const auto& h : quantized_i)
        if (h.size() != m_count)
            throw Error("hybrid_slnr_precoders: dimension mismatch");
    for (const auto& c : cov_s)
        if (c.dim() != m_count)
            throw Error("hybrid_slnr_precoders: dimension mismatch");

    const cmat noise = cmat::Identity(m_count, m_count) / p_d;
    std::vector<cmat> outer;
    outer.reserve(quantized_i.size());
    for (const auto& h : quantized_i)
        outer.push_back(h * h.adjoint());

    PrecoderSet out;
    out.class_i.reserve(quantized_i.size());
    for (std::size_t i = 0; i < quantized_i.size(); ++i) {
        cmat a = noise;
        for (std::size_t j = 0; j < quantized_i.size(); ++j)
            if (j != i)
                a += outer[j];
        for (const auto& c : cov_s)
            a += c.phi;
        out.class_i.push_back(max_gen_eigvec_rank1(a, quantized_i[i]).vector);
    }
    out.class_s.reserve(cov_s.size());
    for (std::size_t n = 0; n < cov_s.size(); ++n) {
        cmat a = noise;
        for (std::size_t q = 0; q < cov_s.size(); ++q)
            if (q != n)
                a += cov_s[q].phi;
        for (const auto& o : outer)
            a += o;
        out.class_s.push_back(max_gen_eigvec(a, cov_s[n].phi).vector);
    }
    return out;
}

// Every user fed back a quantized channel.
inline std::vector<cvec> conventional_slnr_precoders(std::span<const cvec> quantized, double p_d)
{
    return hybrid_slnr_precoders(quantized, {}, p_d).class_i;
}

// l*_n = argmax_l [bd_n]_l / (sum_{q != n} [bd_q]_l + #{i : t_hat_i = l} + 1/p_d),
// lowest beam on ties. Beams are 1-indexed.
inline std::vector<int> select_statistical_beams(std::span<const BeamDomainCovariance> bd_s,
                                                 std::span<const int> t_hat, double p_d)
{
    std::vector<int> l_star;
    if (bd_s.empty())
        return l_star;
    const Eigen::Index m_count = bd_s.front().dim();
    for (const auto& bd : bd_s)
        if (bd.dim() != m_count)
            throw Error("select_statistical_beams: dimension mismatch");
    rvec hits = rvec::Zero(m_count);
    for (int t : t_hat) {
        if (t < 1 || t > m_count)
            throw Error("select_statistical_beams: class-I beam index outside [1, M]");
        hits[t - 1] += 1.0;
    }
    const double noise = 1.0 / p_d;
    l_star.reserve(bd_s.size());
    for (const auto& bd : bd_s) {
        int best = 1;
        double best_ratio = -1.0;
        for (Eigen::Index l = 0; l < m_count; ++l) {
            // Others' gain at l, formed explicitly so the own term cancels exactly.
            double others = 0.0;
            for (const auto& other : bd_s)
                if (&other != &bd)
                    others += other.diag[l];
            const double ratio = bd.diag[l] / (others + hits[l] + noise);
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best = static_cast<int>(l) + 1;
            }
        }
        l_star.push_back(best);
    }
    return l_star;
}

struct ApproximatePrecoders {
    std::vector<int> l_star;
    PrecoderSet precoders;
};

// DFT-column precoders: class-I on their predicted beams, class-S on l*.
inline ApproximatePrecoders approximate_precoders(std::span<const BeamDomainCovariance> bd_s,
                                                  std::span<const int> t_hat, double p_d, const cmat& v)
{
    ApproximatePrecoders out;
    out.l_star = select_statistical_beams(bd_s, t_hat, p_d);
    for (int t : t_hat)
        out.precoders.class_i.push_back(v.col(t - 1));
    for (int l : out.l_star)
        out.precoders.class_s.push_back(v.col(l - 1));
    return out;
}

} // namespace hybridfb
