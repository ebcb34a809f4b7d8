/*
 * Copyright 2026 The GestureBridge Authors.
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

#ifndef GESTUREBRIDGE_FILE_IO_HPP_
#define GESTUREBRIDGE_FILE_IO_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace gb {

// Throws gb::Error(kInput) when the file cannot be read.
std::string ReadFile(const std::string& path);

// Writes to "<path>.tmp.<pid>" and renames over path.
void WriteFileAtomic(const std::string& path, std::string_view contents);

// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> SplitLines(std::string_view text);

std::string_view Trim(std::string_view s);

}  // namespace gb

#endif  // GESTUREBRIDGE_FILE_IO_HPP_
