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
#pragma once

#include <optional>
#include <utility>

#include "nbfeb/net/request.hpp"

namespace nbfeb::net {

/// How the second request's reply is rebuilt from the combined reply (r, f).
enum class SecondReply : std::uint8_t {
  SameAsFirst,   // (r, f)
  FirstValueClear,  // (v1, 0)
  FirstValueSet,    // (v1, 1)
  TfasOutcome,      // f == 0 ? (v1, 1) : (r, 1)
  FaiOffset,        // r + first.increment
};

/// The single request forwarded in place of two, plus the pure rule that
/// splits its reply back into two.
struct CombinePlan {
  MemRequest combined;
  MemRequest first;
  MemRequest second;
  SecondReply rule = SecondReply::SameAsFirst;
};

/// Combines two NB-FEB requests on the same location, `first` ordered before
/// `second`. Returns nullopt when the locations differ (the requests travel
/// on uncombined). Throws std::invalid_argument for non-FEB kinds.
std::optional<CombinePlan> combine(const MemRequest& first, const MemRequest& second);

/// Combines two fetch-and-increment requests on one location.
std::optional<CombinePlan> combine_fai(const MemRequest& first, const MemRequest& second);

/// Dispatches to combine/combine_fai; nullopt for anything not combinable.
std::optional<CombinePlan> try_combine(const MemRequest& first, const MemRequest& second);

/// Splits the reply to `plan.combined` into replies for first and second.
std::pair<MemReply, MemReply> resolve(const CombinePlan& plan, const MemReply& reply);

}  // namespace nbfeb::net
