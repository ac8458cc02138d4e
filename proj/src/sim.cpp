#include "fragstore/sim.hpp"

#include <algorithm>

namespace fragstore {

std::string to_string(MsgKind k) {
  switch (k) {
    case MsgKind::Read: return "READ";
    case MsgKind::ReadReply: return "READ-REPLY";
    case MsgKind::Write: return "WRITE";
    case MsgKind::WriteAck: return "WRITE-ACK";
    case MsgKind::Catalog: return "CATALOG";
    case MsgKind::CatalogReply: return "CATALOG-REPLY";
  }
  return "?";
}

std::optional<MsgKind> parse_msg_kind(std::string_view s) {
  if (s == "READ") return MsgKind::Read;
  if (s == "READ-REPLY") return MsgKind::ReadReply;
  if (s == "WRITE") return MsgKind::Write;
  if (s == "WRITE-ACK") return MsgKind::WriteAck;
  if (s == "CATALOG") return MsgKind::Catalog;
  if (s == "CATALOG-REPLY") return MsgKind::CatalogReply;
  return std::nullopt;
}

bool envelope_well_formed(const Envelope& e) {
  switch (e.kind) {
    case MsgKind::Read:
    case MsgKind::WriteAck:
    case MsgKind::Catalog:
      return !e.payload.has_value();
    case MsgKind::Write:
      return e.payload.has_value();
    case MsgKind::ReadReply:
    case MsgKind::CatalogReply:
      return true;
  }
  return false;
}

QuorumCollector broadcast(Network& net, ProcessId from, MsgKind kind, const Tag& tag,
                          const BlockId& block, std::optional<BlockValue> payload,
                          std::size_t quorum) {
  if (net.reachable_server_count() < quorum) {
    throw QuorumUnreachable("fault plan leaves " +
                            std::to_string(net.reachable_server_count()) +
                            " live servers, quorum needs " + std::to_string(quorum));
  }
  std::set<std::uint64_t> sent;
  for (ProcessId s : net.server_ids()) {
    Envelope e;
    e.from = from;
    e.to = s;
    e.kind = kind;
    e.tag = tag;
    e.block = block;
    e.payload = payload;
    sent.insert(net.send(std::move(e)));
  }
  return QuorumCollector(std::move(sent), quorum);
}

SimNet::SimNet(std::vector<ProcessId> servers, SimOptions opts, FaultPlan faults)
    : servers_(std::move(servers)), opts_(opts), faults_(std::move(faults)), rng_(opts.seed) {}

void SimNet::register_handler(ProcessId p, Handler h) { handlers_[p] = std::move(h); }

void SimNet::schedule_at(SimTime when, ProcessId owner, std::function<void()> fn) {
  PendingEvent ev;
  ev.at = std::max(when, now_);
  ev.order = next_order_++;
  ev.is_timer = true;
  ev.timer_owner = owner;
  ev.timer_fn = std::move(fn);
  queue_.push(std::move(ev));
}

std::size_t SimNet::reachable_server_count() const {
  std::size_t n = 0;
  for (ProcessId s : servers_) {
    if (!faults_.crashes(s)) ++n;
  }
  return n;
}

SimTime SimNet::pick_delay(const Envelope& e) {
  if (delay_script_) {
    if (auto d = delay_script_(e)) return *d;
  }
  return rng_.range(opts_.min_delay, opts_.max_delay);
}

void SimNet::enqueue_msg(Envelope e, SimTime at) {
  PendingEvent ev;
  ev.at = at;
  ev.order = next_order_++;
  ev.msg = std::move(e);
  queue_.push(std::move(ev));
}

std::uint64_t SimNet::send(Envelope e) {
  if (!envelope_well_formed(e)) throw InvariantViolation("malformed envelope");
  e.msg_id = next_msg_id_++;
  std::uint64_t id = e.msg_id;
  SimTime at = now_ + pick_delay(e);
  if (opts_.duplicate_prob > 0 && rng_.chance(opts_.duplicate_prob)) {
    enqueue_msg(e, now_ + pick_delay(e));
  }
  enqueue_msg(std::move(e), at);
  return id;
}

bool SimNet::step() {
  while (!queue_.empty()) {
    PendingEvent ev = queue_.top();
    queue_.pop();
    now_ = std::max(now_, ev.at);

    if (ev.is_timer) {
      if (faults_.crashed_by(ev.timer_owner, now_)) continue;
      ev.timer_fn();
      return true;
    }

    const Envelope& m = ev.msg;
    if (faults_.crashed_by(m.to, now_)) {
      ++dropped_;
      continue;
    }
    if (!seen_[m.to].insert(m.msg_id).second) continue;  // duplicate
    ++deliveries_;
    trace_ += std::to_string(deliveries_) + " " + std::to_string(m.msg_id) + " " +
              std::to_string(m.from) + " " + std::to_string(m.to) + " " + to_string(m.kind) +
              " " + to_string(m.block) + " " + to_string(m.tag) + "\n";
    auto it = handlers_.find(m.to);
    if (it != handlers_.end()) it->second(m);
    return true;
  }
  return false;
}

void SimNet::run_all(std::uint64_t max_steps) {
  for (std::uint64_t i = 0; i < max_steps; ++i) {
    if (!step()) return;
  }
  throw InvariantViolation("simulator did not quiesce within the step budget");
}

void SimNet::run_until(const std::function<bool()>& done, std::uint64_t max_steps) {
  for (std::uint64_t i = 0; i < max_steps; ++i) {
    if (done()) return;
    if (!step()) break;
  }
  if (!done()) throw InvariantViolation("condition not reached before quiescence");
}

}  // namespace fragstore
