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
#include "nbfeb/net/combine.hpp"

#include <stdexcept>

namespace nbfeb::net {

const char* to_string(Kind k) noexcept {
  switch (k) {
    case Kind::Load: return "load";
    case Kind::Sac: return "sac";
    case Kind::Sas: return "sas";
    case Kind::Tfas: return "tfas";
    case Kind::Fai: return "fai";
    case Kind::Cas: return "cas";
  }
  return "?";
}

Kind parse_kind(const std::string& text) {
  if (text == "fai") return Kind::Fai;
  if (text == "cas") return Kind::Cas;
  return from_feb_op(parse_feb_op(text));
}

FebOp to_feb_op(Kind k) {
  switch (k) {
    case Kind::Load: return FebOp::Load;
    case Kind::Sac: return FebOp::Sac;
    case Kind::Sas: return FebOp::Sas;
    case Kind::Tfas: return FebOp::Tfas;
    default: throw std::invalid_argument(std::string("not an NB-FEB primitive: ") + to_string(k));
  }
}

Kind from_feb_op(FebOp op) noexcept {
  switch (op) {
    case FebOp::Load: return Kind::Load;
    case FebOp::Sac: return Kind::Sac;
    case FebOp::Sas: return Kind::Sas;
    case FebOp::Tfas: return Kind::Tfas;
  }
  return Kind::Load;
}

bool MemRequest::well_formed() const noexcept {
  switch (kind) {
    case Kind::Load:
    case Kind::Fai:
      return operand.is_bottom();
    default:
      return true;
  }
}

std::ostream& operator<<(std::ostream& os, const MemRequest& r) {
  os << to_string(r.kind) << "(w" << r.location.index;
  if (r.kind == Kind::Fai) os << ",+" << r.increment;
  if (r.kind == Kind::Cas) os << ',' << r.expected;
  if (r.kind != Kind::Load && r.kind != Kind::Fai) os << ',' << r.operand;
  return os << ")#" << r.tag;
}

std::ostream& operator<<(std::ostream& os, const MemReply& r) {
  return os << '(' << r.value << ',' << (r.flag ? 1 : 0) << ')';
}

namespace {

MemRequest make(Kind k, const MemRequest& like, FebValue v) {
  MemRequest out;
  out.kind = k;
  out.location = like.location;
  out.operand = k == Kind::Load ? FebValue{} : v;
  out.tag = like.tag;
  return out;
}

}  // namespace

std::optional<CombinePlan> combine(const MemRequest& first, const MemRequest& second) {
  if (!is_feb(first.kind) || !is_feb(second.kind)) {
    throw std::invalid_argument("combine() takes NB-FEB requests only");
  }
  if (!(first.location == second.location)) return std::nullopt;

  const FebValue v1 = first.operand;
  const FebValue v2 = second.operand;
  CombinePlan plan{{}, first, second, SecondReply::SameAsFirst};

  switch (first.kind) {
    case Kind::Load:
      // A leading load observes the memory reply; the second request runs as is.
      plan.combined = second.kind == Kind::Load ? make(Kind::Load, first, {}) : make(second.kind, first, v2);
      plan.rule = SecondReply::SameAsFirst;
      break;
    case Kind::Sac:
      plan.rule = SecondReply::FirstValueClear;
      switch (second.kind) {
        case Kind::Load: plan.combined = make(Kind::Sac, first, v1); break;
        case Kind::Sac: plan.combined = make(Kind::Sac, first, v2); break;
        case Kind::Sas:
        case Kind::Tfas: plan.combined = make(Kind::Sas, first, v2); break;
        default: break;
      }
      break;
    case Kind::Sas:
      plan.rule = SecondReply::FirstValueSet;
      switch (second.kind) {
        case Kind::Load: plan.combined = make(Kind::Sas, first, v1); break;
        case Kind::Sac: plan.combined = make(Kind::Sac, first, v2); break;
        case Kind::Sas: plan.combined = make(Kind::Sas, first, v2); break;
        case Kind::Tfas: plan.combined = make(Kind::Sas, first, v1); break;
        default: break;
      }
      break;
    case Kind::Tfas:
      plan.rule = SecondReply::TfasOutcome;
      switch (second.kind) {
        case Kind::Load: plan.combined = make(Kind::Tfas, first, v1); break;
        case Kind::Sac: plan.combined = make(Kind::Sac, first, v2); break;
        case Kind::Sas: plan.combined = make(Kind::Sas, first, v2); break;
        case Kind::Tfas: plan.combined = make(Kind::Tfas, first, v1); break;
        default: break;
      }
      break;
    default:
      break;
  }
  return plan;
}

std::optional<CombinePlan> combine_fai(const MemRequest& first, const MemRequest& second) {
  if (first.kind != Kind::Fai || second.kind != Kind::Fai) {
    throw std::invalid_argument("combine_fai() takes fetch-and-increment requests only");
  }
  if (!(first.location == second.location)) return std::nullopt;
  MemRequest merged = MemRequest::fai(first.location, first.increment + second.increment, first.tag);
  return CombinePlan{merged, first, second, SecondReply::FaiOffset};
}

std::optional<CombinePlan> try_combine(const MemRequest& first, const MemRequest& second) {
  if (is_feb(first.kind) && is_feb(second.kind)) return combine(first, second);
  if (first.kind == Kind::Fai && second.kind == Kind::Fai) return combine_fai(first, second);
  return std::nullopt;
}

std::pair<MemReply, MemReply> resolve(const CombinePlan& plan, const MemReply& reply) {
  const FebValue v1 = plan.first.operand;
  switch (plan.rule) {
    case SecondReply::SameAsFirst:
      return {reply, reply};
    case SecondReply::FirstValueClear:
      return {reply, MemReply{v1, false}};
    case SecondReply::FirstValueSet:
      return {reply, MemReply{v1, true}};
    case SecondReply::TfasOutcome:
      return {reply, reply.flag ? MemReply{reply.value, true} : MemReply{v1, true}};
    case SecondReply::FaiOffset:
      return {reply, MemReply{FebValue::of(reply.value.payload() + plan.first.increment), false}};
  }
  return {reply, reply};
}

}  // namespace nbfeb::net
