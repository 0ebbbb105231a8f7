/*
 * Copyright 2026 The sisa_rl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SISA_RL_SRC_JSON_UTIL_H_
#define SISA_RL_SRC_JSON_UTIL_H_

#include <cstdio>
#include <string>

#include "json.hpp"
#include "sisa_rl/rl_agent.h"

namespace sisa_rl::internal {

inline nlohmann::json AgentConfigToJson(const AgentConfig& c) {
  return {
      {"algorithm", std::string(AlgorithmName(c.algorithm))},
      {"gamma", c.gamma},
      {"learning_rate", c.learning_rate},
      {"batch_size", c.batch_size},
      {"total_steps", c.total_steps},
      {"target_update_interval", c.target_update_interval},
      {"epsilon_start", c.epsilon_start},
      {"epsilon_end", c.epsilon_end},
      {"epsilon_decay_steps", c.epsilon_decay_steps},
      {"buffer_capacity", c.buffer_capacity},
      {"seed", c.seed},
  };
}

inline AgentConfig AgentConfigFromJson(const nlohmann::json& j) {
  AgentConfig c;
  c.algorithm = ParseAlgorithm(j.at("algorithm").get<std::string>());
  c.gamma = j.at("gamma").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int64_t>();
  c.total_steps = j.at("total_steps").get<int64_t>();
  c.target_update_interval = j.at("target_update_interval").get<int64_t>();
  c.epsilon_start = j.at("epsilon_start").get<double>();
  c.epsilon_end = j.at("epsilon_end").get<double>();
  c.epsilon_decay_steps = j.at("epsilon_decay_steps").get<int64_t>();
  c.buffer_capacity = j.at("buffer_capacity").get<int64_t>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

inline std::string Hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace sisa_rl::internal

#endif  // SISA_RL_SRC_JSON_UTIL_H_
