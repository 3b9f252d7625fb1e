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

#include "hybridfb/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw hybridfb::Error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hybrid statistical/instantaneous feedback simulator for FDD massive MIMO downlink"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::optional<int> threads;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"fig1", "Monte Carlo vs closed-form lower bound vs perfect CSI, over p_d"},
        {"fig2", "Proposed vs conventional (DFT, skewed) sum rate over p_d"},
        {"fig3", "Proposed vs conventional sum rate over the number of users"},
        {"fig4", "Proposed vs conventional sum rate over the global feedback budget"},
        {"classify", "Greedy user classification for each p_d"},
        {"bound", "Closed-form sum-rate lower bound for greedy, all-I and all-S classifications"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Scenario file (flat key = value)");
        sub->add_option("--out", out_path, "CSV output path (stdout when omitted)");
        sub->add_option("--seed", seed, "Override the scenario seed");
        sub->add_option("--trials", trials, "Override the Monte Carlo trial count");
        sub->add_option("--threads", threads, "Worker threads");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        std::string raw;
        if (!config_path.empty())
            raw = read_file(config_path);
        if (seed)
            raw += "\nseed = " + std::to_string(*seed) + "\n";
        if (trials)
            raw += "\ntrials = " + std::to_string(*trials) + "\n";
        if (threads)
            raw += "\nthreads = " + std::to_string(*threads) + "\n";
        const hybridfb::ConfigResult cfg = hybridfb::validate_config(raw);
        for (const auto& w : cfg.warnings)
            std::cerr << "warning: " << w << '\n';
        for (const auto& p : hybridfb::draw_user_profiles(cfg.config, cfg.config.users))
            if (p.exceeds_visible_region())
                std::cerr << "warning: user with mean AoA " << p.mean_aoa
                          << " rad has paths outside [-pi/2, pi/2]\n";

        const std::string csv = hybridfb::run_subcommand(name, cfg.config);
        if (out_path.empty()) {
            std::cout << csv;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out)
                throw hybridfb::Error("cannot write '" + out_path + "'");
            out << csv;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
