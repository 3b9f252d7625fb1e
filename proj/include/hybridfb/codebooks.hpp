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
#include "hybridfb/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

namespace hybridfb {

enum class CodebookKind { Dft, Skewed, Predicted };

inline std::string_view to_string(CodebookKind kind)
{
    switch (kind) {
    case CodebookKind::Dft: return "dft";
    case CodebookKind::Skewed: return "skewed";
    case CodebookKind::Predicted: return "predicted";
    }
    return "?";
}

inline CodebookKind codebook_kind_from_string(std::string_view s)
{
    if (s == "dft") return CodebookKind::Dft;
    if (s == "skewed") return CodebookKind::Skewed;
    if (s == "predicted") return CodebookKind::Predicted;
    throw Error("unknown codebook kind '" + std::string(s) + "' (expected dft, skewed or predicted)");
}

// Unit-norm codewords stored as matrix columns; codeword u is column u - 1.
struct Codebook {
    cmat vectors;
    CodebookKind kind = CodebookKind::Dft;
    std::optional<std::size_t> owner;

    long size() const { return static_cast<long>(vectors.cols()); }
    Eigen::Index dim() const { return vectors.rows(); }
    auto codeword(long u) const { return vectors.col(u - 1); }
};

struct SubspaceBounds {
    int x_min = 1;
    int x_max = 1;
    int leakage_margin = 0;
    int beams = 1; // M
    int d_min = 1;
    int d_max = 1;
};

struct QuantizedChannel {
    long index = 1; // 1-indexed codeword
    cvec vector;
};

inline long codebook_size_for_bits(int bits)
{
    if (bits < 0 || bits > 62)
        throw Error("codebook bits out of range: " + std::to_string(bits));
    return 1L << bits;
}

// Codeword u (1-indexed) entry m: exp(j pi m (2u/X - 1)) / sqrt(M).
inline Codebook dft_codebook(int m_count, long x_size)
{
    if (m_count < 1 || x_size < 1)
        throw Error("dft_codebook: M and X must be >= 1");
    cmat c(m_count, x_size);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_count));
    const long two_x = 2 * x_size;
    for (long u = 1; u <= x_size; ++u) {
        for (int m = 0; m < m_count; ++m) {
            long num = (static_cast<long>(m) * (2 * u - x_size)) % two_x;
            if (num < 0)
                num += two_x;
            const double phase = pi * static_cast<double>(num) / static_cast<double>(x_size);
            c(m, u - 1) = scale * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return {std::move(c), CodebookKind::Dft, std::nullopt};
}

// Hermitian PSD square root; tiny negative eigenvalues from rounding are clamped.
inline cmat psd_sqrt(const cmat& phi)
{
    Eigen::SelfAdjointEigenSolver<cmat> es(phi);
    if (es.info() != Eigen::Success)
        throw Error("psd_sqrt: eigendecomposition failed");
    const rvec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

inline Codebook skewed_codebook(const Covariance& cov, long x_size, Rng& rng,
                                std::optional<std::size_t> owner = std::nullopt)
{
    if (x_size < 1)
        throw Error("skewed_codebook: X must be >= 1");
    if (!is_hermitian(cov.phi))
        throw Error("skewed_codebook: covariance is not Hermitian");
    const cmat root = psd_sqrt(cov.phi);
    const Eigen::Index m_count = cov.dim();
    cmat c(m_count, x_size);
    constexpr int max_redraws = 1000;
    for (long u = 0; u < x_size; ++u) {
        int attempt = 0;
        for (;; ++attempt) {
            if (attempt == max_redraws)
                throw Error("skewed_codebook: covariance square root annihilates every draw");
            cvec f = complex_gaussian_vector(m_count, rng);
            f.normalize();
            cvec g = root * f;
            const double n = g.norm();
            if (n >= 1e-12) {
                c.col(u) = g / n;
                break;
            }
        }
    }
    return {std::move(c), CodebookKind::Skewed, owner};
}

// Beam support of the covariance widened by the leakage margin. "Nonzero"
// beams are those at or above power_threshold times the strongest beam.
inline SubspaceBounds approximate_subspace(const BeamDomainCovariance& bd, int leakage_margin,
                                           double power_threshold = 1e-3)
{
    if (leakage_margin < 0)
        throw Error("approximate_subspace: leakage margin must be nonnegative");
    const int m_count = static_cast<int>(bd.dim());
    if (m_count < 1)
        throw Error("approximate_subspace: empty covariance");
    const double peak = bd.diag.maxCoeff();
    if (!(peak > 0.0))
        throw Error("approximate_subspace: empty covariance");
    const double floor_level = power_threshold * peak;
    int d_min = 0;
    int d_max = 0;
    for (int t = 1; t <= m_count; ++t) {
        if (bd.gain(t) >= floor_level) {
            if (d_min == 0)
                d_min = t;
            d_max = t;
        }
    }
    SubspaceBounds b;
    b.leakage_margin = leakage_margin;
    b.beams = m_count;
    b.d_min = d_min;
    b.d_max = d_max;
    b.x_min = std::max(d_min - leakage_margin, 1);
    b.x_max = static_cast<int>(std::min<long>(static_cast<long>(d_max) + leakage_margin, m_count));
    return b;
}

// Codewords spread uniformly over the subspace's phase interval; the last
// codeword sits on the upper edge.
inline Codebook predicted_codebook(const SubspaceBounds& bounds, long x_size, int m_count,
                                   std::optional<std::size_t> owner = std::nullopt)
{
    if (x_size < 1 || m_count < 1)
        throw Error("predicted_codebook: M and X must be >= 1");
    if (bounds.x_min > bounds.x_max)
        throw Error("predicted_codebook: x_min > x_max");
    const double base = 2.0 * bounds.x_min / m_count - 1.0;
    const double step = 2.0 * (bounds.x_max - bounds.x_min) / (static_cast<double>(m_count) * x_size);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_count));
    cmat c(m_count, x_size);
    for (long u = 1; u <= x_size; ++u) {
        const double theta = base + static_cast<double>(u) * step;
        for (int m = 0; m < m_count; ++m) {
            const double half_cycles = std::fmod(theta * m, 2.0);
            const double phase = pi * half_cycles;
            c(m, u - 1) = scale * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return {std::move(c), CodebookKind::Predicted, owner};
}

// argmax_u |h^H c_u|^2, lowest index on ties.
inline QuantizedChannel quantize_channel(const cvec& h, const Codebook& cb)
{
    if (h.size() != cb.dim())
        throw Error("quantize_channel: dimension mismatch");
    if (cb.size() < 1)
        throw Error("quantize_channel: empty codebook");
    if (h.squaredNorm() == 0.0)
        throw Error("quantize_channel: zero channel");
    const cvec corr = cb.vectors.adjoint() * h;
    long best = 0;
    double best_power = std::norm(corr[0]);
    for (long u = 1; u < cb.size(); ++u) {
        const double p = std::norm(corr[u]);
        if (p > best_power) {
            best_power = p;
            best = u;
        }
    }
    return {best + 1, cb.vectors.col(best)};
}

inline long predicted_feedback_index(int t_star, const SubspaceBounds& bounds, long x_size)
{
    if (x_size < 1)
        throw Error("predicted_feedback_index: X must be >= 1");
    if (t_star < bounds.x_min || t_star > bounds.x_max)
        throw Error("predicted_feedback_index: strongest beam " + std::to_string(t_star) +
                    " outside subspace [" + std::to_string(bounds.x_min) + ", " +
                    std::to_string(bounds.x_max) + "]");
    if (t_star == bounds.x_min)
        return 1;
    const double ratio = static_cast<double>(t_star - bounds.x_min) * static_cast<double>(x_size) /
                         static_cast<double>(bounds.x_max - bounds.x_min);
    return std::clamp(round_half_even(ratio), 1L, x_size);
}

inline int predicted_beam_index(const SubspaceBounds& bounds, long x_size, long u_tilde)
{
    if (x_size < 1 || u_tilde < 1 || u_tilde > x_size)
        throw Error("predicted_beam_index: codeword index outside [1, X]");
    const double t = bounds.x_min + static_cast<double>(bounds.x_max - bounds.x_min) *
                                        static_cast<double>(u_tilde) / static_cast<double>(x_size);
    return static_cast<int>(std::clamp(round_half_even(t), 1L, static_cast<long>(bounds.beams)));
}

// Debug text format: a header line, then one line per codeword holding its
// 1-based index followed by interleaved real/imag entries.
inline void write_codebook(std::ostream& os, const Codebook& cb)
{
    os << "# codebook kind=" << to_string(cb.kind) << " M=" << cb.dim() << " X=" << cb.size() << '\n';
    char buf[40];
    for (long u = 1; u <= cb.size(); ++u) {
        os << u;
        for (Eigen::Index m = 0; m < cb.dim(); ++m) {
            const cplx z = cb.vectors(m, u - 1);
            std::snprintf(buf, sizeof buf, " %.17g", z.real());
            os << buf;
            std::snprintf(buf, sizeof buf, " %.17g", z.imag());
            os << buf;
        }
        os << '\n';
    }
}

inline Codebook read_codebook(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("# codebook", 0) != 0)
        throw Error("read_codebook: missing header");
    std::string kind_text;
    long m_count = 0;
    long x_size = 0;
    {
        std::istringstream hs(line.substr(std::string("# codebook").size()));
        std::string field;
        while (hs >> field) {
            const auto eq = field.find('=');
            if (eq == std::string::npos)
                continue;
            const std::string key = field.substr(0, eq);
            const std::string value = field.substr(eq + 1);
            if (key == "kind") kind_text = value;
            else if (key == "M") m_count = std::stol(value);
            else if (key == "X") x_size = std::stol(value);
        }
    }
    if (m_count < 1 || x_size < 1)
        throw Error("read_codebook: invalid header dimensions");
    Codebook cb{cmat(m_count, x_size), codebook_kind_from_string(kind_text), std::nullopt};
    for (long u = 1; u <= x_size; ++u) {
        if (!std::getline(is, line))
            throw Error("read_codebook: truncated codebook");
        std::istringstream ls(line);
        long index = 0;
        ls >> index;
        if (index != u)
            throw Error("read_codebook: unexpected codeword index");
        for (long m = 0; m < m_count; ++m) {
            double re = 0.0;
            double im = 0.0;
            if (!(ls >> re >> im))
                throw Error("read_codebook: short codeword line");
            cb.vectors(m, u - 1) = cplx(re, im);
        }
    }
    return cb;
}

} // namespace hybridfb
