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

#include "hybridfb/codebooks.hpp"
#include "hybridfb/common.hpp"
#include "hybridfb/parallel.hpp"
#include "hybridfb/precoding.hpp"
#include "hybridfb/rng.hpp"
#include "hybridfb/scenario.hpp"

#include <limits>

namespace hybridfb {

struct RateReport {
    std::vector<double> per_user_rate; // bits/s/Hz, indexed by user
    double sum_rate = 0.0;
    long trials = 0;
    double half_width = 0.0; // 95% normal-approximation half-width of the mean
};

// |h^H w_own|^2 / (sum_others |h^H w|^2 + 1/p_d)
template <class Others>
double sinr(const cvec& h, const cvec& own, const Others& others, double p_d)
{
    if (!(p_d > 0.0))
        throw Error("sinr: transmit power must be positive");
    const double signal = std::norm(h.dot(own));
    double interference = 0.0;
    for (const cvec& w : others)
        interference += std::norm(h.dot(w));
    return signal / (interference + 1.0 / p_d);
}

inline double sinr(const cvec& h, const cvec& own, std::initializer_list<cvec> others, double p_d)
{
    return sinr<std::initializer_list<cvec>>(h, own, others, p_d);
}

// Per-user feedback codebooks. A null entry for a class-I user means the BS
// receives that user's exact channel (perfect CSI).
using CodebookTable = std::vector<const Codebook*>;

// One coherence block: quantize class-I channels, build hybrid SLNR
// precoders, evaluate log2(1 + SINR) with the true channels. Writes one rate
// per user and returns their sum.
inline double trial_sum_rate(const LinkScenario& scenario, const Classification& cls,
                             const CodebookTable& codebooks, std::span<const cvec> channels, double p_d,
                             std::span<double> per_user)
{
    const std::size_t k = scenario.user_count();
    if (channels.size() != k || per_user.size() != k)
        throw Error("trial_sum_rate: channel count does not match user count");
    if (k == 0)
        return 0.0;
    std::vector<cvec> fed_back;
    fed_back.reserve(cls.class_i.size());
    for (std::size_t u : cls.class_i) {
        const Codebook* cb = u < codebooks.size() ? codebooks[u] : nullptr;
        fed_back.push_back(cb ? quantize_channel(channels[u], *cb).vector : channels[u]);
    }
    std::vector<Covariance> cov_s;
    cov_s.reserve(cls.class_s.size());
    for (std::size_t u : cls.class_s)
        cov_s.push_back(scenario.users[u].covariance);

    const PrecoderSet pre = hybrid_slnr_precoders(fed_back, cov_s, p_d);
    std::vector<cvec> all;
    all.reserve(k);
    for (std::size_t i = 0; i < cls.class_i.size(); ++i)
        all.push_back(pre.class_i[i]);
    for (std::size_t n = 0; n < cls.class_s.size(); ++n)
        all.push_back(pre.class_s[n]);
    std::vector<std::size_t> order(cls.class_i);
    order.insert(order.end(), cls.class_s.begin(), cls.class_s.end());

    CompensatedSum total;
    for (std::size_t slot = 0; slot < k; ++slot) {
        const std::size_t u = order[slot];
        const cvec& h = channels[u];
        const double signal = std::norm(h.dot(all[slot]));
        double interference = 0.0;
        for (std::size_t other = 0; other < k; ++other)
            if (other != slot)
                interference += std::norm(h.dot(all[other]));
        const double r = std::log2(1.0 + signal / (interference + 1.0 / p_d));
        per_user[u] = r;
        total.add(r);
    }
    return total.value();
}

struct MonteCarloOptions {
    long trials = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
};

// Channel of user k in trial t comes from its own stream, so draws are shared
// across schemes, transmit powers and user counts.
inline std::vector<cvec> draw_trial_channels(const LinkScenario& scenario, std::uint64_t seed, long trial)
{
    std::vector<cvec> h;
    h.reserve(scenario.user_count());
    for (std::size_t u = 0; u < scenario.user_count(); ++u) {
        Rng rng = make_stream(seed, {stream::trial_channel, static_cast<std::uint64_t>(trial), u});
        h.push_back(draw_channel(scenario.users[u].steering, rng, u).h);
    }
    return h;
}

inline RateReport summarize_trials(std::span<const double> trial_sums, const std::vector<std::vector<double>>& per_user,
                                   std::size_t k)
{
    RateReport r;
    r.trials = static_cast<long>(trial_sums.size());
    r.per_user_rate.assign(k, 0.0);
    if (trial_sums.empty())
        return r;
    const double n = static_cast<double>(trial_sums.size());
    for (std::size_t u = 0; u < k; ++u) {
        CompensatedSum s;
        for (const auto& row : per_user)
            s.add(row[u]);
        r.per_user_rate[u] = s.value() / n;
    }
    r.sum_rate = compensated_sum(r.per_user_rate);
    if (trial_sums.size() > 1) {
        const double mean = compensated_sum(trial_sums) / n;
        CompensatedSum ss;
        for (double x : trial_sums)
            ss.add((x - mean) * (x - mean));
        const double sd = std::sqrt(ss.value() / (n - 1.0));
        r.half_width = 1.96 * sd / std::sqrt(n);
    }
    return r;
}

// Ergodic sum rate by Monte Carlo over coherence blocks.
inline RateReport monte_carlo_sum_rate(const LinkScenario& scenario, const Classification& cls,
                                       const CodebookTable& codebooks, double p_d, const MonteCarloOptions& opts)
{
    if (opts.trials < 1)
        throw Error("monte_carlo_sum_rate: trials must be >= 1");
    if (!(p_d > 0.0))
        throw Error("monte_carlo_sum_rate: transmit power must be positive");
    const std::size_t k = scenario.user_count();
    if (cls.user_count() != k)
        throw Error("monte_carlo_sum_rate: classification does not cover every user");
    const auto trials = static_cast<std::size_t>(opts.trials);
    std::vector<double> sums(trials, 0.0);
    std::vector<std::vector<double>> per_user(trials, std::vector<double>(k, 0.0));
    if (k > 0) {
        parallel_for(trials, opts.threads, [&](std::size_t t) {
            const auto h = draw_trial_channels(scenario, opts.seed, static_cast<long>(t));
            sums[t] = trial_sum_rate(scenario, cls, codebooks, h, p_d, per_user[t]);
        });
    }
    return summarize_trials(sums, per_user, k);
}

// --- closed-form beam-domain bound -----------------------------------------

// Class-I user i (position in the class-I list): desired gain on its own
// predicted beam over its gains on every other scheduled beam.
inline double effective_sinr_class_i(std::size_t i, std::span<const BeamDomainCovariance> bd_i,
                                     std::span<const int> t_hat, std::span<const int> l_star, double p_d)
{
    const BeamDomainCovariance& own = bd_i[i];
    double interference = 0.0;
    for (std::size_t j = 0; j < t_hat.size(); ++j)
        if (j != i)
            interference += own.gain(t_hat[j]);
    for (int l : l_star)
        interference += own.gain(l);
    return own.gain(t_hat[i]) / (interference + 1.0 / p_d);
}

inline double effective_sinr_class_s(std::size_t n, std::span<const BeamDomainCovariance> bd_s,
                                     std::span<const int> t_hat, std::span<const int> l_star, double p_d)
{
    const BeamDomainCovariance& own = bd_s[n];
    double interference = 0.0;
    for (std::size_t q = 0; q < l_star.size(); ++q)
        if (q != n)
            interference += own.gain(l_star[q]);
    for (int t : t_hat)
        interference += own.gain(t);
    return own.gain(l_star[n]) / (interference + 1.0 / p_d);
}

struct BoundOptions {
    int leakage_margin = 10;
    double power_threshold = 1e-3;
    int max_bits_per_user = 12; // codebook size cap: X = 2^min(B, cap)
};

struct BoundBreakdown {
    long codebook_size = 0;
    std::vector<SubspaceBounds> subspaces; // per class-I user
    std::vector<int> t_star;               // strongest own beam
    std::vector<long> u_tilde;             // predicted feedback index
    std::vector<int> t_hat;                // predicted beam
    std::vector<int> l_star;               // per class-S user
    RateReport report;
};

namespace detail {

template <class Index>
std::vector<BeamDomainCovariance> gather(std::span<const BeamDomainCovariance> bd_all, const std::vector<Index>& ids)
{
    std::vector<BeamDomainCovariance> out;
    out.reserve(ids.size());
    for (Index u : ids) {
        if (u >= bd_all.size())
            throw Error("lower bound: user index out of range");
        out.push_back(bd_all[u]);
    }
    return out;
}

inline int strongest_beam(const BeamDomainCovariance& bd)
{
    int best = 1;
    for (int t = 2; t <= bd.dim(); ++t)
        if (bd.gain(t) > bd.gain(best))
            best = t;
    return best;
}

} // namespace detail

// Evaluates the closed-form bound for given class-I beams t_hat. Both the
// predicted pipeline and any externally supplied beam choice go through here.
inline BoundBreakdown bound_from_beams(std::span<const BeamDomainCovariance> bd_all, const Classification& cls,
                                       std::vector<int> t_hat, double p_d)
{
    if (!(p_d > 0.0))
        throw Error("lower bound: transmit power must be positive");
    if (t_hat.size() != cls.class_i.size())
        throw Error("lower bound: one beam per class-I user required");
    const auto bd_i = detail::gather(bd_all, cls.class_i);
    const auto bd_s = detail::gather(bd_all, cls.class_s);

    BoundBreakdown out;
    out.t_hat = std::move(t_hat);
    out.l_star = select_statistical_beams(bd_s, out.t_hat, p_d);
    out.report.per_user_rate.assign(bd_all.size(), 0.0);
    for (std::size_t i = 0; i < cls.class_i.size(); ++i)
        out.report.per_user_rate[cls.class_i[i]] =
            std::log2(1.0 + effective_sinr_class_i(i, bd_i, out.t_hat, out.l_star, p_d));
    for (std::size_t n = 0; n < cls.class_s.size(); ++n)
        out.report.per_user_rate[cls.class_s[n]] =
            std::log2(1.0 + effective_sinr_class_s(n, bd_s, out.t_hat, out.l_star, p_d));
    out.report.sum_rate = compensated_sum(out.report.per_user_rate);
    return out;
}

// Fully statistical pipeline for a codebook of the given size: subspace,
// strongest beam, predicted feedback index, predicted beam, DFT-beam
// precoders, effective SINRs.
inline BoundBreakdown lower_bound_with_codebook_size(std::span<const BeamDomainCovariance> bd_all,
                                                     const Classification& cls, long codebook_size, double p_d,
                                                     const BoundOptions& opts = {})
{
    std::vector<SubspaceBounds> subspaces;
    std::vector<int> t_star;
    std::vector<long> u_tilde;
    std::vector<int> t_hat;
    for (std::size_t u : cls.class_i) {
        if (u >= bd_all.size())
            throw Error("lower bound: user index out of range");
        const SubspaceBounds sb = approximate_subspace(bd_all[u], opts.leakage_margin, opts.power_threshold);
        const int ts = detail::strongest_beam(bd_all[u]);
        const long ut = predicted_feedback_index(ts, sb, codebook_size);
        subspaces.push_back(sb);
        t_star.push_back(ts);
        u_tilde.push_back(ut);
        t_hat.push_back(predicted_beam_index(sb, codebook_size, ut));
    }
    BoundBreakdown out = bound_from_beams(bd_all, cls, std::move(t_hat), p_d);
    out.codebook_size = codebook_size;
    out.subspaces = std::move(subspaces);
    out.t_star = std::move(t_star);
    out.u_tilde = std::move(u_tilde);
    return out;
}

inline long bound_codebook_size(int bits, const BoundOptions& opts)
{
    return codebook_size_for_bits(std::min(bits, opts.max_bits_per_user));
}

inline BoundBreakdown sum_rate_lower_bound_detail(std::span<const BeamDomainCovariance> bd_all,
                                                  const Classification& cls, int b_total, double p_d,
                                                  const BoundOptions& opts = {})
{
    if (b_total < 0)
        throw Error("lower bound: feedback budget must be nonnegative");
    const std::size_t k_i = cls.class_i.size();
    const int bits = bits_per_class_i_user(b_total, k_i);
    if (k_i > 0 && bits < 1)
        throw Error("lower bound: zero bits per class-I user (" + std::to_string(k_i) + " class-I users share " +
                    std::to_string(b_total) + " bits)");
    return lower_bound_with_codebook_size(bd_all, cls, k_i > 0 ? bound_codebook_size(bits, opts) : 1, p_d, opts);
}

// Deterministic lower bound on the ergodic sum rate from covariances only.
inline RateReport sum_rate_lower_bound(std::span<const BeamDomainCovariance> bd_all, const Classification& cls,
                                       int b_total, double p_d, const BoundOptions& opts = {})
{
    return sum_rate_lower_bound_detail(bd_all, cls, b_total, p_d, opts).report;
}

} // namespace hybridfb
