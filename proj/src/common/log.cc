// Copyright 2026 The Unicap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "common/log.h"

#include <atomic>
#include <iostream>
#include <mutex>

namespace unicap {
namespace {

std::atomic<LogLevel> g_level{LogLevel::kWarning};
std::mutex g_mutex;

void Emit(LogLevel level, const char* tag, std::string_view message) {
  if (level < g_level.load()) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "[unicap " << tag << "] " << message << '\n';
}

}  // namespace

void SetLogLevel(LogLevel level) { g_level.store(level); }
LogLevel GetLogLevel() { return g_level.load(); }

void LogDebug(std::string_view message) { Emit(LogLevel::kDebug, "debug", message); }
void LogInfo(std::string_view message) { Emit(LogLevel::kInfo, "info", message); }
void LogWarning(std::string_view message) { Emit(LogLevel::kWarning, "warning", message); }
void LogError(std::string_view message) { Emit(LogLevel::kError, "error", message); }

}  // namespace unicap
