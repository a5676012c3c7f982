// Copyright 2026 The macrocat Authors
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

#include "macrocat/errors.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <utility>

namespace macrocat {

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler_slot() {
  static WarningHandler h = [](const std::string& msg) {
    std::cerr << "macrocat: warning: " << msg << '\n';
  };
  return h;
}

std::atomic<std::size_t> g_warning_count{0};

}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  handler_slot() = std::move(handler);
}

void warn(const std::string& message) {
  ++g_warning_count;
  std::lock_guard lock(handler_mutex());
  if (handler_slot()) handler_slot()(message);
}

std::size_t warning_count() { return g_warning_count.load(); }

void reset_warning_count() { g_warning_count = 0; }

ScopedWarningHandler::ScopedWarningHandler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  previous_ = std::exchange(handler_slot(), std::move(handler));
}

ScopedWarningHandler::~ScopedWarningHandler() {
  std::lock_guard lock(handler_mutex());
  handler_slot() = std::move(previous_);
}

}  // namespace macrocat
