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

#include "hybridfb/classification.hpp"
#include "hybridfb/codebooks.hpp"
#include "hybridfb/rate_analysis.hpp"
#include "hybridfb/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string_view>

namespace hybridfb {

enum class Scheme { HybridProposed, ConventionalDft, ConventionalSkewed, PerfectCsi };

struct ScenarioConfig {
    int antennas = 128;
    int users = 10;
    int paths = 20;
    int b_total = 40;
    std::vector<double> p_d_db{0.0, 5.0, 10.0, 15.0, 20.0};
    double fixed_p_d_db = 10.0; // sweeps over K or B_total
    std::vector<int> k_grid{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    std::vector<int> b_total_grid{10, 20, 30, 40, 50, 60, 70, 80};
    double spread_deg = 10.0;
    double d_over_lambda = 0.5;
    int leakage_margin = 10;
    double power_threshold = 1e-3;
    int max_bits_per_user = 12;
    long trials = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::optional<Scheme> scheme; // restricts figure output to one scheme
    CodebookKind codebook = CodebookKind::Dft;

    BoundOptions bound_options() const { return {leakage_margin, power_threshold, max_bits_per_user}; }
    ArrayGeometry geometry() const { return {antennas, d_over_lambda}; }
};

struct ConfigResult {
    ScenarioConfig config;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& text)
{
    T value{};
    if constexpr (std::is_floating_point_v<T>) {
        std::size_t pos = 0;
        try {
            value = static_cast<T>(std::stod(text, &pos));
        } catch (const std::exception&) {
            pos = 0;
        }
        if (text.empty() || pos != text.size())
            throw Error("config: '" + key + "' expects a number, got '" + text + "'");
    } else {
        const char* last = text.data() + text.size();
        const auto r = std::from_chars(text.data(), last, value);
        if (text.empty() || r.ec != std::errc() || r.ptr != last)
            throw Error("config: '" + key + "' expects an integer, got '" + text + "'");
    }
    return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text)
{
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_number<T>(key, trim(item)));
    if (out.empty())
        throw Error("config: '" + key + "' needs at least one value");
    return out;
}

} // namespace detail

inline std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::HybridProposed: return "HybridProposed";
    case Scheme::ConventionalDft: return "ConventionalDFT";
    case Scheme::ConventionalSkewed: return "ConventionalSkewed";
    case Scheme::PerfectCsi: return "PerfectCSI";
    }
    return "?";
}

inline Scheme scheme_from_string(std::string_view s)
{
    if (s == "HybridProposed" || s == "proposed") return Scheme::HybridProposed;
    if (s == "ConventionalDFT" || s == "conventional-dft") return Scheme::ConventionalDft;
    if (s == "ConventionalSkewed" || s == "conventional-skewed") return Scheme::ConventionalSkewed;
    if (s == "PerfectCSI" || s == "perfect") return Scheme::PerfectCsi;
    throw Error("config: unknown scheme '" + std::string(s) +
                "' (expected HybridProposed, ConventionalDFT, ConventionalSkewed or PerfectCSI)");
}

inline void check_config(const ScenarioConfig& c, std::vector<std::string>& warnings)
{
    auto require = [](bool ok, const std::string& msg) {
        if (!ok)
            throw Error("config: " + msg);
    };
    require(c.antennas >= 2, "M must be >= 2");
    require(c.users >= 0, "K must be >= 0");
    require(c.paths >= 1, "P must be >= 1");
    require(c.b_total >= 0, "B_total must be >= 0; class-I users need floor(B_total/K_I) >= 1 bit, "
                            "use B_total = 0 to serve every user statistically");
    require(c.trials >= 1, "trials must be >= 1");
    require(c.threads >= 1, "threads must be >= 1");
    require(c.spread_deg >= 0.0, "spread_deg must be >= 0");
    require(c.d_over_lambda > 0.0, "d_over_lambda must be > 0");
    require(c.leakage_margin >= 0, "x_k must be >= 0");
    require(c.power_threshold > 0.0 && c.power_threshold <= 1.0, "power_threshold must be in (0, 1]");
    require(c.max_bits_per_user >= 0 && c.max_bits_per_user <= 20, "max_bits_per_user must be in [0, 20]");
    require(!c.p_d_db.empty(), "p_d_db needs at least one value");
    for (int k : c.k_grid)
        require(k >= 0, "K_grid entries must be >= 0");
    for (int b : c.b_total_grid)
        require(b >= 0, "B_total_grid entries must be >= 0; a negative budget cannot be shared among class-I users");
    if (c.b_total < c.users)
        warnings.push_back("B_total (" + std::to_string(c.b_total) + ") < K (" + std::to_string(c.users) +
                           "): the conventional scheme gets floor(B_total/K) = 0 bits per user, "
                           "i.e. a single-codeword codebook");
    for (int b : c.b_total_grid)
        if (b < c.users) {
            warnings.push_back("B_total_grid value " + std::to_string(b) + " < K (" + std::to_string(c.users) +
                               "): zero conventional feedback bits per user at that point");
            break;
        }
}

// Flat "key = value" text, '#' starts a comment, lists are comma separated.
inline ConfigResult validate_config(std::string_view raw)
{
    ConfigResult out;
    ScenarioConfig& c = out.config;
    std::istringstream in{std::string(raw)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        using detail::parse_list;
        using detail::parse_number;
        if (key == "M") c.antennas = parse_number<int>(key, value);
        else if (key == "K") c.users = parse_number<int>(key, value);
        else if (key == "P") c.paths = parse_number<int>(key, value);
        else if (key == "B_total") c.b_total = parse_number<int>(key, value);
        else if (key == "p_d_db") c.p_d_db = parse_list<double>(key, value);
        else if (key == "fixed_p_d_db") c.fixed_p_d_db = parse_number<double>(key, value);
        else if (key == "K_grid") c.k_grid = parse_list<int>(key, value);
        else if (key == "B_total_grid") c.b_total_grid = parse_list<int>(key, value);
        else if (key == "spread_deg") c.spread_deg = parse_number<double>(key, value);
        else if (key == "d_over_lambda") c.d_over_lambda = parse_number<double>(key, value);
        else if (key == "x_k") c.leakage_margin = parse_number<int>(key, value);
        else if (key == "power_threshold") c.power_threshold = parse_number<double>(key, value);
        else if (key == "max_bits_per_user") c.max_bits_per_user = parse_number<int>(key, value);
        else if (key == "trials") c.trials = parse_number<long>(key, value);
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "threads") c.threads = parse_number<int>(key, value);
        else if (key == "scheme") c.scheme = value == "all" ? std::nullopt : std::optional(scheme_from_string(value));
        else if (key == "codebook") c.codebook = codebook_kind_from_string(value);
        else
            throw Error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    check_config(c, out.warnings);
    return out;
}

// Mean AoA uniform in [-pi/2, pi/2], then path angles, from a per-user
// stream: the first K users are the same for every K.
inline std::vector<UserChannelProfile> draw_user_profiles(const ScenarioConfig& c, int k)
{
    std::vector<UserChannelProfile> out;
    out.reserve(static_cast<std::size_t>(std::max(k, 0)));
    const double spread = c.spread_deg * pi / 180.0;
    for (int u = 0; u < k; ++u) {
        Rng rng = make_stream(c.seed, {stream::geometry, static_cast<std::uint64_t>(u)});
        std::uniform_real_distribution<double> mean(-pi / 2.0, pi / 2.0);
        const double m = mean(rng);
        out.push_back(draw_user_profile(m, spread, c.paths, rng));
    }
    return out;
}

inline LinkScenario build_scenario(const ScenarioConfig& c, int k)
{
    return make_link_scenario(c.geometry(), draw_user_profiles(c, k));
}

// Codebooks are static knowledge: one per (user, bits) for skewed, one per
// size for DFT, generated on first use from the scenario seed.
class CodebookCache {
public:
    CodebookCache(const LinkScenario& scenario, std::uint64_t seed) : scenario_(scenario), seed_(seed) {}

    const Codebook& dft(int bits)
    {
        auto& slot = dft_[bits];
        if (!slot)
            slot = std::make_unique<Codebook>(dft_codebook(scenario_.geometry.antennas, codebook_size_for_bits(bits)));
        return *slot;
    }

    const Codebook& skewed(std::size_t user, int bits)
    {
        auto& slot = skewed_[{user, bits}];
        if (!slot) {
            Rng rng = make_stream(seed_, {stream::skewed_codebook, user, static_cast<std::uint64_t>(bits)});
            slot = std::make_unique<Codebook>(
                skewed_codebook(scenario_.users[user].covariance, codebook_size_for_bits(bits), rng, user));
        }
        return *slot;
    }

    CodebookTable table(const Classification& cls, CodebookKind kind, int bits)
    {
        CodebookTable t(scenario_.user_count(), nullptr);
        for (std::size_t u : cls.class_i)
            t[u] = kind == CodebookKind::Skewed ? &skewed(u, bits) : &dft(bits);
        return t;
    }

private:
    const LinkScenario& scenario_;
    std::uint64_t seed_;
    std::map<int, std::unique_ptr<Codebook>> dft_;
    std::map<std::pair<std::size_t, int>, std::unique_ptr<Codebook>> skewed_;
};

struct ResultRow {
    std::string scenario;
    std::string scheme;
    std::string codebook;
    double p_d_db = 0.0;
    int antennas = 0;
    int users = 0;
    int paths = 0;
    int b_total = 0;
    int class_i_users = 0;
    int bits_per_user = 0;
    double sum_rate = 0.0;
    double half_width = 0.0;
    long trials = 0;
    double spread_deg = 0.0;
    int leakage_margin = 0;
    std::uint64_t seed = 0;
};

inline std::string format_real(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

inline std::string rate_csv_header()
{
    return "scenario,scheme,codebook,p_d_db,M,K,P,B_total,K_I,bits_per_user,sum_rate,half_width,trials,"
           "spread_deg,x_k,seed\n";
}

inline std::string to_csv(const std::vector<ResultRow>& rows)
{
    std::string out = rate_csv_header();
    for (const auto& r : rows) {
        out += r.scenario + ',' + r.scheme + ',' + r.codebook + ',' + format_real(r.p_d_db) + ',' +
               std::to_string(r.antennas) + ',' + std::to_string(r.users) + ',' + std::to_string(r.paths) + ',' +
               std::to_string(r.b_total) + ',' + std::to_string(r.class_i_users) + ',' +
               std::to_string(r.bits_per_user) + ',' + format_real(r.sum_rate) + ',' + format_real(r.half_width) +
               ',' + std::to_string(r.trials) + ',' + format_real(r.spread_deg) + ',' +
               std::to_string(r.leakage_margin) + ',' + std::to_string(r.seed) + '\n';
    }
    return out;
}

// One (scenario, power, budget) operating point shared by every curve.
class OperatingPoint {
public:
    OperatingPoint(const ScenarioConfig& config, const LinkScenario& scenario, CodebookCache& cache,
                   std::string figure, double p_d_db, int b_total)
        : config_(config), scenario_(scenario), cache_(cache), figure_(std::move(figure)), p_d_db_(p_d_db),
          p_d_(db_to_linear(p_d_db)), b_total_(b_total), bd_(scenario.beam_domain_covariances())
    {
    }

    const Classification& proposed_classification()
    {
        if (!proposed_) {
            if (bd_.empty())
                proposed_ = Classification{};
            else
                proposed_ = classify_users_greedy(bd_, b_total_, p_d_, config_.bound_options()).classification;
        }
        return *proposed_;
    }

    ResultRow monte_carlo(Scheme scheme, CodebookKind kind)
    {
        const std::size_t k = scenario_.user_count();
        Classification cls;
        CodebookTable table(k, nullptr);
        std::string scheme_label;
        std::string codebook_label(to_string(kind));
        int feedback_bits = 0;
        switch (scheme) {
        case Scheme::HybridProposed:
            cls = proposed_classification();
            feedback_bits = cls.bits;
            table = cache_.table(cls, kind, std::min(cls.bits, config_.max_bits_per_user));
            scheme_label = "proposed";
            break;
        case Scheme::ConventionalDft:
        case Scheme::ConventionalSkewed:
            cls = all_class_i(k, b_total_);
            feedback_bits = cls.bits;
            table = cache_.table(cls, kind, std::min(cls.bits, config_.max_bits_per_user));
            scheme_label = "conventional";
            break;
        case Scheme::PerfectCsi:
            cls = all_class_i(k, b_total_);
            feedback_bits = 0;
            scheme_label = "perfect";
            codebook_label = "none";
            break;
        }
        ResultRow row = base_row(scheme_label, codebook_label, cls, feedback_bits);
        row.trials = config_.trials;
        if (k > 0) {
            const RateReport r = monte_carlo_sum_rate(scenario_, cls, table, p_d_,
                                                      {config_.trials, config_.seed, config_.threads});
            row.sum_rate = r.sum_rate;
            row.half_width = r.half_width;
        }
        return row;
    }

    ResultRow bound(const std::string& label, const Classification& cls)
    {
        ResultRow row = base_row(label, "predicted", cls, cls.bits);
        if (!bd_.empty())
            row.sum_rate = classification_bound(bd_, cls, b_total_, p_d_, config_.bound_options());
        return row;
    }

private:
    ResultRow base_row(std::string scheme, std::string codebook, const Classification& cls, int bits) const
    {
        ResultRow r;
        r.scenario = figure_;
        r.scheme = std::move(scheme);
        r.codebook = std::move(codebook);
        r.p_d_db = p_d_db_;
        r.antennas = config_.antennas;
        r.users = static_cast<int>(scenario_.user_count());
        r.paths = config_.paths;
        r.b_total = b_total_;
        r.class_i_users = static_cast<int>(cls.class_i.size());
        r.bits_per_user = bits;
        r.spread_deg = config_.spread_deg;
        r.leakage_margin = config_.leakage_margin;
        r.seed = config_.seed;
        return r;
    }

    const ScenarioConfig& config_;
    const LinkScenario& scenario_;
    CodebookCache& cache_;
    std::string figure_;
    double p_d_db_;
    double p_d_;
    int b_total_;
    std::vector<BeamDomainCovariance> bd_;
    std::optional<Classification> proposed_;
};

namespace detail {

inline bool wanted(const ScenarioConfig& c, Scheme s) { return !c.scheme || *c.scheme == s; }

// The four comparison curves: proposed and conventional, each with the DFT
// and the skewed codebook.
inline void comparison_rows(const ScenarioConfig& c, OperatingPoint& op, std::vector<ResultRow>& rows)
{
    if (wanted(c, Scheme::HybridProposed)) {
        rows.push_back(op.monte_carlo(Scheme::HybridProposed, CodebookKind::Dft));
        rows.push_back(op.monte_carlo(Scheme::HybridProposed, CodebookKind::Skewed));
    }
    if (wanted(c, Scheme::ConventionalDft))
        rows.push_back(op.monte_carlo(Scheme::ConventionalDft, CodebookKind::Dft));
    if (wanted(c, Scheme::ConventionalSkewed))
        rows.push_back(op.monte_carlo(Scheme::ConventionalSkewed, CodebookKind::Skewed));
}

} // namespace detail

// Proposed-scheme Monte Carlo, its closed-form bound, and perfect CSI versus p_d.
inline std::string run_fig1(const ScenarioConfig& c)
{
    const LinkScenario scenario = build_scenario(c, c.users);
    CodebookCache cache(scenario, c.seed);
    std::vector<ResultRow> rows;
    for (double db : c.p_d_db) {
        OperatingPoint op(c, scenario, cache, "fig1", db, c.b_total);
        if (detail::wanted(c, Scheme::HybridProposed))
            rows.push_back(op.monte_carlo(Scheme::HybridProposed, c.codebook));
        rows.push_back(op.bound("bound", op.proposed_classification()));
        if (detail::wanted(c, Scheme::PerfectCsi))
            rows.push_back(op.monte_carlo(Scheme::PerfectCsi, CodebookKind::Dft));
    }
    return to_csv(rows);
}

// Sum rate versus transmit power.
inline std::string run_fig2(const ScenarioConfig& c)
{
    const LinkScenario scenario = build_scenario(c, c.users);
    CodebookCache cache(scenario, c.seed);
    std::vector<ResultRow> rows;
    for (double db : c.p_d_db) {
        OperatingPoint op(c, scenario, cache, "fig2", db, c.b_total);
        detail::comparison_rows(c, op, rows);
    }
    return to_csv(rows);
}

// Sum rate versus the number of users at fixed p_d.
inline std::string run_fig3(const ScenarioConfig& c)
{
    std::vector<ResultRow> rows;
    for (int k : c.k_grid) {
        const LinkScenario scenario = build_scenario(c, k);
        CodebookCache cache(scenario, c.seed);
        OperatingPoint op(c, scenario, cache, "fig3", c.fixed_p_d_db, c.b_total);
        detail::comparison_rows(c, op, rows);
    }
    return to_csv(rows);
}

// Sum rate versus the global feedback budget at fixed K and p_d.
inline std::string run_fig4(const ScenarioConfig& c)
{
    const LinkScenario scenario = build_scenario(c, c.users);
    CodebookCache cache(scenario, c.seed);
    std::vector<ResultRow> rows;
    for (int b : c.b_total_grid) {
        OperatingPoint op(c, scenario, cache, "fig4", c.fixed_p_d_db, b);
        detail::comparison_rows(c, op, rows);
    }
    return to_csv(rows);
}

// Greedy bound next to the two trivial classifications, versus p_d.
inline std::string run_bound(const ScenarioConfig& c)
{
    const LinkScenario scenario = build_scenario(c, c.users);
    CodebookCache cache(scenario, c.seed);
    std::vector<ResultRow> rows;
    const auto k = scenario.user_count();
    for (double db : c.p_d_db) {
        OperatingPoint op(c, scenario, cache, "bound", db, c.b_total);
        rows.push_back(op.bound("bound-greedy", op.proposed_classification()));
        rows.push_back(op.bound("bound-all-i", all_class_i(k, c.b_total)));
        rows.push_back(op.bound("bound-all-s", all_class_s(k)));
    }
    return to_csv(rows);
}

// Per-user greedy classification for each p_d in the grid.
inline std::string run_classify(const ScenarioConfig& c)
{
    const LinkScenario scenario = build_scenario(c, c.users);
    const auto bd = scenario.beam_domain_covariances();
    std::string out = "scenario,p_d_db,M,K,B_total,user,class,selection_order,bits_per_user,objective,seed\n";
    for (double db : c.p_d_db) {
        if (bd.empty())
            continue;
        const GreedyResult g = classify_users_greedy(bd, c.b_total, db_to_linear(db), c.bound_options());
        std::vector<std::size_t> order_of(bd.size(), 0);
        for (std::size_t j = 0; j < g.trace.selection_order.size(); ++j)
            order_of[g.trace.selection_order[j]] = j + 1;
        std::vector<bool> is_s(bd.size(), false);
        for (std::size_t u : g.classification.class_s)
            is_s[u] = true;
        for (std::size_t u = 0; u < bd.size(); ++u) {
            out += "classify," + format_real(db) + ',' + std::to_string(c.antennas) + ',' +
                   std::to_string(c.users) + ',' + std::to_string(c.b_total) + ',' + std::to_string(u + 1) + ',' +
                   (is_s[u] ? "S" : "I") + ',' + std::to_string(order_of[u]) + ',' +
                   std::to_string(g.classification.bits) + ',' + format_real(g.classification.objective) + ',' +
                   std::to_string(c.seed) + '\n';
        }
    }
    return out;
}

inline std::string run_subcommand(std::string_view name, const ScenarioConfig& c)
{
    if (name == "fig1") return run_fig1(c);
    if (name == "fig2") return run_fig2(c);
    if (name == "fig3") return run_fig3(c);
    if (name == "fig4") return run_fig4(c);
    if (name == "classify") return run_classify(c);
    if (name == "bound") return run_bound(c);
    throw Error("unknown subcommand '" + std::string(name) + "'");
}

} // namespace hybridfb
