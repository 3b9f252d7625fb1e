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

#include "hybridfb/rate_analysis.hpp"
#include "hybridfb/scenario.hpp"

#include <algorithm>
#include <limits>

namespace hybridfb {

struct GreedyTrace {
    // Users in the order they were moved to class-S.
    std::vector<std::size_t> selection_order;
    // recorded[j] is the bound with the first j selected users in class-S
    // (f = K - j class-I users); -inf where f > 0 leaves zero bits per user.
    std::vector<double> recorded;
};

struct GreedyResult {
    Classification classification;
    GreedyTrace trace;
};

namespace detail {

inline Classification make_split(std::size_t k, const std::vector<std::size_t>& class_s, int b_total)
{
    Classification c;
    c.class_s = class_s;
    std::vector<bool> in_s(k, false);
    for (std::size_t u : class_s)
        in_s[u] = true;
    for (std::size_t u = 0; u < k; ++u)
        if (!in_s[u])
            c.class_i.push_back(u);
    c.bits = bits_per_class_i_user(b_total, c.class_i.size());
    return c;
}

inline bool feasible(std::size_t k_i, int b_total)
{
    return k_i == 0 || bits_per_class_i_user(b_total, k_i) >= 1;
}

} // namespace detail

// Feasible partitions get the lower bound; infeasible ones get -inf.
inline double classification_bound(std::span<const BeamDomainCovariance> bd_all, const Classification& cls,
                                   int b_total, double p_d, const BoundOptions& opts = {})
{
    if (!detail::feasible(cls.class_i.size(), b_total))
        return -std::numeric_limits<double>::infinity();
    return sum_rate_lower_bound(bd_all, cls, b_total, p_d, opts).sum_rate;
}

// Greedy classification: start with everyone in class-I, repeatedly move the
// user whose move gives the largest bound, and keep the best of the K + 1
// recorded prefixes. Steps whose class-I set would get zero bits are
// recorded as -inf; the move at such a step is still chosen by the bound
// evaluated with a single-codeword (zero-bit) codebook.
inline GreedyResult classify_users_greedy(std::span<const BeamDomainCovariance> bd_all, int b_total, double p_d,
                                          const BoundOptions& opts = {})
{
    const std::size_t k = bd_all.size();
    if (k == 0)
        throw Error("classify_users_greedy: no users");
    if (b_total < 0)
        throw Error("classify_users_greedy: feedback budget must be nonnegative");

    GreedyResult out;
    out.trace.recorded.reserve(k + 1);
    std::vector<std::size_t> class_s;
    out.trace.recorded.push_back(classification_bound(bd_all, detail::make_split(k, class_s, b_total), b_total, p_d, opts));

    for (std::size_t step = 1; step <= k; ++step) {
        const std::size_t f = k - step;
        const bool ok = detail::feasible(f, b_total);
        const Classification current = detail::make_split(k, class_s, b_total);
        std::size_t best_user = current.class_i.front();
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t u : current.class_i) {
            std::vector<std::size_t> trial_s = class_s;
            trial_s.push_back(u);
            const Classification cand = detail::make_split(k, trial_s, b_total);
            const double value = ok ? sum_rate_lower_bound(bd_all, cand, b_total, p_d, opts).sum_rate
                                    : lower_bound_with_codebook_size(bd_all, cand, 1, p_d, opts).report.sum_rate;
            if (value > best_value) {
                best_value = value;
                best_user = u;
            }
        }
        class_s.push_back(best_user);
        out.trace.selection_order.push_back(best_user);
        out.trace.recorded.push_back(ok ? best_value : -std::numeric_limits<double>::infinity());
    }

    // Best prefix; ties keep the smaller class-S set.
    std::size_t best_prefix = 0;
    for (std::size_t j = 1; j < out.trace.recorded.size(); ++j)
        if (out.trace.recorded[j] > out.trace.recorded[best_prefix])
            best_prefix = j;

    const std::vector<std::size_t> chosen(out.trace.selection_order.begin(),
                                          out.trace.selection_order.begin() + static_cast<std::ptrdiff_t>(best_prefix));
    out.classification = detail::make_split(k, chosen, b_total);
    out.classification.objective = out.trace.recorded[best_prefix];
    return out;
}

// Enumerates every partition. Ties go to the lexicographically smallest
// (ascending) class-S set.
inline Classification exhaustive_classifier(std::span<const BeamDomainCovariance> bd_all, int b_total, double p_d,
                                            const BoundOptions& opts = {})
{
    const std::size_t k = bd_all.size();
    constexpr std::size_t max_users = 12;
    if (k == 0)
        throw Error("exhaustive_classifier: no users");
    if (k > max_users)
        throw Error("exhaustive_classifier: " + std::to_string(k) + " users is too many to enumerate (max 12)");

    bool have = false;
    Classification best;
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<std::size_t> class_s;
        for (std::size_t u = 0; u < k; ++u)
            if (mask & (1u << u))
                class_s.push_back(u);
        Classification cand = detail::make_split(k, class_s, b_total);
        if (!detail::feasible(cand.class_i.size(), b_total))
            continue;
        cand.objective = sum_rate_lower_bound(bd_all, cand, b_total, p_d, opts).sum_rate;
        if (!have || cand.objective > best.objective ||
            (cand.objective == best.objective && cand.class_s < best.class_s)) {
            best = std::move(cand);
            have = true;
        }
    }
    return best;
}

} // namespace hybridfb
