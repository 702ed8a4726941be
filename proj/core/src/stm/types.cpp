/*
 * Copyright 2026 The nbfeb Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <stdexcept>

#include "nbfeb/stm/types.hpp"

namespace nbfeb::stm {

const char* to_string(TxStatus s) noexcept {
  switch (s) {
    case TxStatus::Active: return "active";
    case TxStatus::Committed: return "committed";
    case TxStatus::Aborted: return "aborted";
  }
  return "?";
}

const char* to_string(AbortCause c) noexcept {
  switch (c) {
    case AbortCause::None: return "none";
    case AbortCause::Cm: return "cm";
    case AbortCause::Lsa: return "lsa";
    case AbortCause::Enemy: return "enemy";
    case AbortCause::User: return "user";
  }
  return "?";
}

const char* to_string(CmPolicy p) noexcept {
  switch (p) {
    case CmPolicy::Aggressive: return "aggressive";
    case CmPolicy::Polite: return "polite";
    case CmPolicy::Timid: return "timid";
  }
  return "?";
}

CmPolicy parse_cm_policy(const std::string& text) {
  if (text == "aggressive") return CmPolicy::Aggressive;
  if (text == "polite") return CmPolicy::Polite;
  if (text == "timid") return CmPolicy::Timid;
  throw std::invalid_argument("unknown contention manager '" + text + "'");
}

ContentionDecision cm_decide(CmPolicy policy, std::uint32_t attempt, std::uint32_t polite_bound) noexcept {
  switch (policy) {
    case CmPolicy::Aggressive:
      return {true, 0};
    case CmPolicy::Timid:
      return {false, 0};
    case CmPolicy::Polite:
      if (attempt >= polite_bound) return {true, 0};
      return {false, std::uint32_t{1} << std::min<std::uint32_t>(attempt, 16)};
  }
  return {true, 0};
}

SessionStats& SessionStats::operator+=(const SessionStats& o) noexcept {
  commits += o.commits;
  aborts_cm += o.aborts_cm;
  aborts_lsa += o.aborts_lsa;
  aborts_enemy += o.aborts_enemy;
  aborts_user += o.aborts_user;
  find_head_calls += o.find_head_calls;
  find_head_iterations_max = std::max(find_head_iterations_max, o.find_head_iterations_max);
  return *this;
}

}  // namespace nbfeb::stm
