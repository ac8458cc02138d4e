#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "fragstore/rng.hpp"
#include "fragstore/transport.hpp"

namespace fragstore {

using SimTime = std::uint64_t;

// Crash-fault schedule. Crashed processes stop taking steps at their crash
// time; messages already in flight from them may still be delivered.
struct FaultPlan {
  std::map<ProcessId, SimTime> crash_at;

  bool crashes(ProcessId p) const { return crash_at.count(p) != 0; }
  bool crashed_by(ProcessId p, SimTime t) const {
    auto it = crash_at.find(p);
    return it != crash_at.end() && it->second <= t;
  }
};

struct SimOptions {
  std::uint64_t seed = 1;
  SimTime min_delay = 1;
  SimTime max_delay = 20;
  // Probability that a send is queued twice; the receiver-side msg id
  // dedup keeps delivery exactly-once either way.
  double duplicate_prob = 0.0;
};

// Deterministic discrete-event network. One step delivers one message or
// fires one timer; all process code runs inside those callbacks, so the
// whole world is serialized and reproducible from (seed, workload, faults).
class SimNet : public Network {
 public:
  using Handler = std::function<void(const Envelope&)>;
  using DelayScript = std::function<std::optional<SimTime>(const Envelope&)>;

  SimNet(std::vector<ProcessId> servers, SimOptions opts, FaultPlan faults = {});

  void register_handler(ProcessId p, Handler h);
  void schedule_at(SimTime when, ProcessId owner, std::function<void()> fn);

  // Overrides the seeded delay law for matching messages (scripted tests).
  void set_delay_script(DelayScript s) { delay_script_ = std::move(s); }

  std::uint64_t send(Envelope e) override;
  const std::vector<ProcessId>& server_ids() const override { return servers_; }
  std::size_t reachable_server_count() const override;

  // Delivers the next pending event. Returns false when quiescent.
  bool step();
  void run_all(std::uint64_t max_steps = 2'000'000);
  void run_until(const std::function<bool()>& done, std::uint64_t max_steps = 2'000'000);

  bool quiescent() const { return queue_.empty(); }
  SimTime now() const { return now_; }
  std::uint64_t deliveries() const { return deliveries_; }
  std::uint64_t dropped() const { return dropped_; }

  const FaultPlan& faults() const { return faults_; }

  // One line per delivery: "step msg_id from to kind block tag".
  const std::string& trace() const { return trace_; }

 private:
  struct PendingEvent {
    SimTime at = 0;
    std::uint64_t order = 0;  // insertion tie-break
    bool is_timer = false;
    Envelope msg;
    ProcessId timer_owner = 0;
    std::function<void()> timer_fn;
  };
  struct Later {
    bool operator()(const PendingEvent& a, const PendingEvent& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.order > b.order;
    }
  };

  void enqueue_msg(Envelope e, SimTime at);
  SimTime pick_delay(const Envelope& e);

  std::vector<ProcessId> servers_;
  SimOptions opts_;
  FaultPlan faults_;
  Rng rng_;
  DelayScript delay_script_;
  std::map<ProcessId, Handler> handlers_;
  std::priority_queue<PendingEvent, std::vector<PendingEvent>, Later> queue_;
  std::map<ProcessId, std::set<std::uint64_t>> seen_;  // receiver-side dedup
  SimTime now_ = 0;
  std::uint64_t next_msg_id_ = 1;
  std::uint64_t next_order_ = 1;
  std::uint64_t deliveries_ = 0;
  std::uint64_t dropped_ = 0;
  std::string trace_;
};

}  // namespace fragstore
