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
#include "nbfeb/consensus/consensus.hpp"

namespace nbfeb::consensus {

ConsensusInstance::ConsensusInstance(FebStore& store)
    : store_(store), decision_(store.alloc(FebValue::bottom(), false)) {}

ConsensusInstance::~ConsensusInstance() { store_.free(decision_); }

FebValue ConsensusInstance::propose(FebValue proposal) {
  if (proposal.is_bottom()) throw std::invalid_argument("consensus proposals must not be bottom");
  const FebPair first = store_.tfas(decision_, proposal);
  return first.value.is_bottom() ? proposal : first.value;
}

}  // namespace nbfeb::consensus
