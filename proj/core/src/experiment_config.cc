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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

#include "sisa_rl/experiment.h"

namespace sisa_rl {
namespace {

std::string_view Trim(std::string_view s) {
  const auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view text) {
  text = Trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" +
                      std::string(text) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw ConfigError("config key '" + std::string(key) + "' must be finite");
    }
  }
  return value;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<Algorithm> ParseAlgorithms(std::string_view text) {
  std::vector<Algorithm> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string_view item = Trim(text.substr(start, comma - start));
    if (!item.empty()) {
      try {
        const Algorithm a = ParseAlgorithm(item);
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("algorithms: at least one is required");
  return out;
}

struct KeyHandler {
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
KeyHandler NumberKey(std::string key, T ExperimentConfig::*field) {
  return {[key, field](ExperimentConfig& c, std::string_view v) {
            c.*field = ParseNumber<T>(key, v);
          },
          [field](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return FormatDouble(c.*field);
            } else {
              return std::to_string(c.*field);
            }
          }};
}

template <typename T, typename Owner>
KeyHandler NestedKey(std::string key, Owner ExperimentConfig::*owner,
                     T Owner::*field) {
  return {[key, owner, field](ExperimentConfig& c, std::string_view v) {
            c.*owner.*field = ParseNumber<T>(key, v);
          },
          [owner, field](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return FormatDouble(c.*owner.*field);
            } else {
              return std::to_string(c.*owner.*field);
            }
          }};
}

const std::vector<std::pair<std::string, KeyHandler>>& Handlers() {
  using C = ExperimentConfig;
  static const std::vector<std::pair<std::string, KeyHandler>> handlers = {
      {"data",
       {[](C& c, std::string_view v) { c.data_path = std::string(Trim(v)); },
        [](const C& c) { return c.data_path; }}},
      {"synth_n_per_class",
       NestedKey("synth_n_per_class", &C::synth, &SynthSpec::n_per_class)},
      {"synth_dim", NestedKey("synth_dim", &C::synth, &SynthSpec::dim)},
      {"synth_separation",
       NestedKey("synth_separation", &C::synth, &SynthSpec::class_separation)},
      {"synth_noise_dims",
       NestedKey("synth_noise_dims", &C::synth, &SynthSpec::noise_dims)},
      {"synth_seed", NestedKey("synth_seed", &C::synth, &SynthSpec::seed)},
      {"algorithms",
       {[](C& c, std::string_view v) { c.algorithms = ParseAlgorithms(v); },
        [](const C& c) {
          std::string out;
          for (Algorithm a : c.algorithms) {
            if (!out.empty()) out += ',';
            out += AlgorithmName(a);
          }
          return out;
        }}},
      {"k_folds", NumberKey("k_folds", &C::k_folds)},
      {"gamma", NestedKey("gamma", &C::agent, &AgentConfig::gamma)},
      {"learning_rate",
       NestedKey("learning_rate", &C::agent, &AgentConfig::learning_rate)},
      {"batch_size", NestedKey("batch_size", &C::agent, &AgentConfig::batch_size)},
      {"total_steps",
       NestedKey("total_steps", &C::agent, &AgentConfig::total_steps)},
      {"target_update_interval",
       NestedKey("target_update_interval", &C::agent,
                 &AgentConfig::target_update_interval)},
      {"epsilon_start",
       NestedKey("epsilon_start", &C::agent, &AgentConfig::epsilon_start)},
      {"epsilon_end",
       NestedKey("epsilon_end", &C::agent, &AgentConfig::epsilon_end)},
      {"epsilon_decay_steps",
       NestedKey("epsilon_decay_steps", &C::agent,
                 &AgentConfig::epsilon_decay_steps)},
      {"buffer_capacity",
       NestedKey("buffer_capacity", &C::agent, &AgentConfig::buffer_capacity)},
      {"num_shards", NumberKey("num_shards", &C::num_shards)},
      {"forget_fraction", NumberKey("forget_fraction", &C::forget_fraction)},
      {"unlearn_shard", NumberKey("unlearn_shard", &C::unlearn_shard)},
      {"seed", NumberKey("seed", &C::seed)},
      {"output_dir",
       {[](C& c, std::string_view v) { c.output_dir = std::string(Trim(v)); },
        [](const C& c) { return c.output_dir; }}},
      {"threads", NumberKey("threads", &C::threads)},
  };
  return handlers;
}

const KeyHandler& FindHandler(std::string_view key) {
  for (const auto& [name, handler] : Handlers()) {
    if (name == key) return handler;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (k_folds < 2) throw ConfigError("k_folds must be >= 2");
  if (num_shards < 1) throw ConfigError("num_shards must be >= 1");
  if (!(forget_fraction >= 0.0 && forget_fraction < 1.0)) {
    throw ConfigError("forget_fraction must be in [0, 1)");
  }
  if (unlearn_shard < 0 || unlearn_shard >= num_shards) {
    throw ConfigError("unlearn_shard must be in [0, num_shards)");
  }
  if (algorithms.empty()) throw ConfigError("algorithms: none selected");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  try {
    agent.Validate();
    if (data_path.empty()) synth.Validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, handler] : Handlers()) k.push_back(name);
    return k;
  }();
  return keys;
}

void SetConfigValue(ExperimentConfig& config, std::string_view key,
                    std::string_view value) {
  FindHandler(Trim(key)).set(config, value);
}

ExperimentConfig ParseConfig(std::string_view text) {
  ExperimentConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const size_t hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = Trim(view);
    if (view.empty()) continue;
    const size_t eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    SetConfigValue(config, view.substr(0, eq), view.substr(eq + 1));
  }
  return config;
}

ExperimentConfig LoadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

ConfigEntries ToConfigEntries(const ExperimentConfig& config) {
  ConfigEntries entries;
  for (const auto& [name, handler] : Handlers()) {
    entries.emplace_back(name, handler.get(config));
  }
  return entries;
}

ExperimentConfig FromConfigEntries(const ConfigEntries& entries) {
  ExperimentConfig config;
  for (const auto& [key, value] : entries) SetConfigValue(config, key, value);
  return config;
}

std::string FormatConfig(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, value] : ToConfigEntries(config)) {
    out += key + " = " + value + "\n";
  }
  return out;
}

}  // namespace sisa_rl
