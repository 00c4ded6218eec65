// include/segaw/io/config.h

// Copyright 2026  segaw authors

// See ../../../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace segaw {

// Ordered key/value settings from `key = value` text.  Blank lines and lines
// starting with '#' are ignored.
using ConfigMap = std::map<std::string, std::string>;

// Throws ConfigError naming the line on malformed input or repeated keys.
ConfigMap parse_config(const std::string& text);
ConfigMap load_config(const std::string& path);
std::string format_config(const ConfigMap& config);

// Throws ConfigError naming the first key not in allowed.
void check_known_keys(const ConfigMap& config, const std::set<std::string>& allowed);

// Typed lookups; a missing key returns the fallback, a malformed value throws
// ConfigError.
int config_int(const ConfigMap& c, const std::string& key, int fallback);
std::uint64_t config_u64(const ConfigMap& c, const std::string& key, std::uint64_t fallback);
double config_double(const ConfigMap& c, const std::string& key, double fallback);
bool config_bool(const ConfigMap& c, const std::string& key, bool fallback);
std::string config_string(const ConfigMap& c, const std::string& key, const std::string& fallback);

// Throws ConfigError when the key is absent.
const std::string& config_required(const ConfigMap& c, const std::string& key);

}  // namespace segaw
