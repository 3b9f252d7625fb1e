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

namespace hybridfb {

// Long-term per-user state shared by every coherence block.
struct UserLink {
    UserChannelProfile profile;
    cmat steering;
    Covariance covariance;
    BeamDomainCovariance beam_domain;
};

struct LinkScenario {
    ArrayGeometry geometry;
    cmat dft;
    std::vector<UserLink> users;

    std::size_t user_count() const { return users.size(); }

    std::vector<BeamDomainCovariance> beam_domain_covariances() const
    {
        std::vector<BeamDomainCovariance> out;
        out.reserve(users.size());
        for (const auto& u : users)
            out.push_back(u.beam_domain);
        return out;
    }
};

inline LinkScenario make_link_scenario(const ArrayGeometry& geometry, std::vector<UserChannelProfile> profiles)
{
    geometry.validate();
    LinkScenario s{geometry, dft_matrix(geometry.antennas), {}};
    s.users.reserve(profiles.size());
    for (auto& p : profiles) {
        p.validate();
        UserLink link;
        link.steering = steering_matrix(p, geometry);
        link.covariance = covariance_from_steering(link.steering);
        link.beam_domain = beam_domain_covariance(link.covariance, s.dft);
        link.profile = std::move(p);
        s.users.push_back(std::move(link));
    }
    return s;
}

// Partition of users (0-based indices) into class-I and class-S.
struct Classification {
    std::vector<std::size_t> class_i; // ascending
    std::vector<std::size_t> class_s; // in selection order
    int bits = 0;                     // floor(B_total / K_I), 0 when K_I = 0
    double objective = 0.0;           // lower-bound sum rate achieved

    std::size_t user_count() const { return class_i.size() + class_s.size(); }
};

inline int bits_per_class_i_user(int b_total, std::size_t k_i)
{
    return k_i == 0 ? 0 : b_total / static_cast<int>(k_i);
}

inline Classification all_class_i(std::size_t k, int b_total)
{
    Classification c;
    for (std::size_t u = 0; u < k; ++u)
        c.class_i.push_back(u);
    c.bits = bits_per_class_i_user(b_total, k);
    return c;
}

inline Classification all_class_s(std::size_t k)
{
    Classification c;
    for (std::size_t u = 0; u < k; ++u)
        c.class_s.push_back(u);
    return c;
}

} // namespace hybridfb
