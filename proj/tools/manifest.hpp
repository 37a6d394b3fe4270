/*
 * Copyright 2026 The fairgan-tab Authors.
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

#ifndef FAIRGAN_TOOLS_MANIFEST_HPP_
#define FAIRGAN_TOOLS_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fairgan::cli {

// SHA-1 over "blob <size>\0<content>", the hash git assigns to a file.
std::string GitBlobHash(std::string_view content);
std::string GitBlobHashOfFile(const std::filesystem::path& path);

struct Manifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;

  // Writes <dir>/manifest.json (or `name`) with content hashes of every
  // listed file. No timestamps, so reruns write identical manifests.
  void Write(const std::filesystem::path& dir, const std::string& name = "manifest.json") const;
};

}  // namespace fairgan::cli

#endif  // FAIRGAN_TOOLS_MANIFEST_HPP_
