/*
 * Copyright 2026 The Voidscope Authors.
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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace voidscope {

// Throws Error(kStorage) when the file cannot be read.
std::string ReadTextFile(const std::filesystem::path& path);

// Writes to a sibling temp file, fsyncs it, renames it over `path` and
// fsyncs the directory. Throws Error(kStorage).
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);

// Appends and fsyncs before returning. Throws Error(kStorage).
void AppendDurable(const std::filesystem::path& path, std::string_view content);

}  // namespace voidscope
