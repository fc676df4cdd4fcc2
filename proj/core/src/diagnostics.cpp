// Copyright 2026 The cfmaps Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfmaps/errors.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>
#include <vector>

namespace cfmaps {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& current_sink() {
  static WarningSink sink;
  return sink;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  auto previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

void warn(std::string_view code, std::string_view message) {
  Warning w{std::string(code), std::string(message)};
  WarningSink sink;
  {
    std::lock_guard lock(sink_mutex());
    sink = current_sink();
  }
  if (sink) {
    sink(w);
  } else {
    std::cerr << "warning[" << w.code << "]: " << w.message << '\n';
  }
}

struct ScopedWarningCapture::State {
  mutable std::mutex mutex;
  std::vector<Warning> warnings;
};

ScopedWarningCapture::ScopedWarningCapture() : state_(new State) {
  State* s = state_;
  previous_ = set_warning_sink([s](const Warning& w) {
    std::lock_guard lock(s->mutex);
    s->warnings.push_back(w);
  });
}

ScopedWarningCapture::~ScopedWarningCapture() {
  set_warning_sink(std::move(previous_));
  delete state_;
}

bool ScopedWarningCapture::contains(std::string_view code) const {
  std::lock_guard lock(state_->mutex);
  return std::any_of(state_->warnings.begin(), state_->warnings.end(),
                     [&](const Warning& w) { return w.code == code; });
}

std::size_t ScopedWarningCapture::size() const {
  std::lock_guard lock(state_->mutex);
  return state_->warnings.size();
}

}  // namespace cfmaps
