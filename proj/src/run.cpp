#include "drl/run.hpp"

#include <istream>
#include <ostream>
#include <random>

#include "drl/hash.hpp"

namespace drl {

namespace {

Event pick(const std::vector<Event>& choices, Scheduler scheduler, double in_probability, std::mt19937_64& rng) {
  std::vector<const Event*> ins;
  std::vector<const Event*> rest;
  for (const auto& e : choices) (rule_of(e) == Rule::In ? ins : rest).push_back(&e);
  auto uniform = [&](const std::vector<const Event*>& from) {
    std::uniform_int_distribution<std::size_t> d(0, from.size() - 1);
    return *from[d(rng)];
  };
  if (!ins.empty()) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (rest.empty() || coin(rng) < in_probability) return uniform(ins);
  }
  if (scheduler == Scheduler::Instance) return uniform(rest);

  std::vector<std::vector<const Event*>> by_rule(kRuleCount);
  for (const auto* e : rest) by_rule[e->index()].push_back(e);
  std::erase_if(by_rule, [](const auto& v) { return v.empty(); });
  std::uniform_int_distribution<std::size_t> d(0, by_rule.size() - 1);
  return uniform(by_rule[d(rng)]);
}

}  // namespace

RunResult run_random(const RunConfig& config) {
  Simulation sim(config);
  std::mt19937_64 rng(config.seed);
  while (sim.stats().chosen_events < config.bounds.max_events_per_run) {
    const auto choices = sim.choices();
    if (choices.empty()) break;
    sim.step(pick(choices, config.scheduler, config.in_probability, rng));
  }
  sim.finish();
  return RunResult{sim.report(), sim.trace(), sim.store(), true};
}

void CampaignSummary::add(const RunReport& r) {
  ++runs;
  if (!r.violations.empty()) ++runs_with_violations;
  for (const auto& v : r.violations) ++violations_by_check[v.check];
  const auto& s = r.stats;
  chosen_events += s.chosen_events;
  if (s.quiescent) ++quiescent_runs;
  terminated_at_end += r.final_terminated.size();
  detections += s.detections;
  detection_latency_total += s.detection_latency_total;
  liveness_misses += s.liveness_misses;
  simple_garbage_positives += s.simple_garbage_positives;
  simple_garbage_literal_false_positives += s.simple_garbage_literal_false_positives;
  msg_count_samples += s.msg_count_samples;
  msg_count_mismatches += s.msg_count_mismatches;
}

std::uint64_t CampaignSummary::violations() const {
  std::uint64_t n = 0;
  for (const auto& kv : violations_by_check) n += kv.second;
  return n;
}

double CampaignSummary::mean_detection_latency() const {
  return detections == 0 ? 0.0 : static_cast<double>(detection_latency_total) / static_cast<double>(detections);
}

json to_json_value(const CampaignSummary& s) {
  return json{{"runs", s.runs},
              {"runs_with_violations", s.runs_with_violations},
              {"violations", s.violations()},
              {"violations_by_check", s.violations_by_check},
              {"chosen_events", s.chosen_events},
              {"quiescent_runs", s.quiescent_runs},
              {"terminated_at_end", s.terminated_at_end},
              {"detections", s.detections},
              {"mean_detection_latency", s.mean_detection_latency()},
              {"liveness_misses", s.liveness_misses},
              {"simple_garbage_positives", s.simple_garbage_positives},
              {"simple_garbage_literal_false_positives", s.simple_garbage_literal_false_positives},
              {"msg_count_samples", s.msg_count_samples},
              {"msg_count_mismatches", s.msg_count_mismatches}};
}

json to_json_value(const RunConfig& c) {
  json j{{"seed", c.seed},
         {"scheduler", scheduler_name(c.scheduler)},
         {"max_actors", c.bounds.max_actors},
         {"max_events", c.bounds.max_events_per_run},
         {"max_refobs_per_message", c.bounds.max_refobs_per_message},
         {"max_external_injections", c.bounds.max_external_injections},
         {"allow_in", c.bounds.allow_in},
         {"snapshot_policy", c.policy.name()},
         {"check_every", c.check_every},
         {"detect_every", c.detect_every},
         {"in_probability", c.in_probability},
         {"final_sweep", c.final_sweep},
         {"self_destruct", c.self_destruct},
         {"keep_history", c.keep_history},
         {"msg_count_samples", c.msg_count_samples},
         {"mutation", mutation_name(c.mutation)}};
  j["allow_in_until"] = c.allow_in_until ? json(*c.allow_in_until) : json(nullptr);
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.scheduler = scheduler_from_name(j.at("scheduler").get<std::string>());
  c.bounds.max_actors = j.at("max_actors").get<std::uint32_t>();
  c.bounds.max_events_per_run = j.at("max_events").get<std::uint32_t>();
  c.bounds.max_refobs_per_message = j.at("max_refobs_per_message").get<std::uint32_t>();
  c.bounds.max_external_injections = j.at("max_external_injections").get<std::uint32_t>();
  c.bounds.allow_in = j.at("allow_in").get<bool>();
  c.policy = SnapshotPolicy::parse(j.at("snapshot_policy").get<std::string>());
  c.check_every = j.at("check_every").get<std::uint32_t>();
  c.detect_every = j.at("detect_every").get<std::uint32_t>();
  c.in_probability = j.at("in_probability").get<double>();
  c.final_sweep = j.at("final_sweep").get<bool>();
  c.self_destruct = j.at("self_destruct").get<bool>();
  c.keep_history = j.at("keep_history").get<bool>();
  c.msg_count_samples = j.at("msg_count_samples").get<std::uint32_t>();
  c.mutation = mutation_from_name(j.at("mutation").get<std::string>());
  if (!j.at("allow_in_until").is_null()) c.allow_in_until = j.at("allow_in_until").get<EventIndex>();
  return c;
}

json to_json_value(const RunReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) violations.push_back(json{{"at", v.at}, {"check", v.check}, {"detail", v.detail}});
  const auto& s = r.stats;
  return json{{"config", to_json_value(r.config)},
              {"violations", std::move(violations)},
              {"final_terminated", r.final_terminated},
              {"final_detected", r.final_detected},
              {"final_hash", hex_digest(r.final_hash)},
              {"trace_length", r.trace_length},
              {"stats",
               {{"rule_counts", s.rule_counts},
                {"chosen_events", s.chosen_events},
                {"checks", s.checks},
                {"detect_calls", s.detect_calls},
                {"simple_garbage_positives", s.simple_garbage_positives},
                {"simple_garbage_literal_false_positives", s.simple_garbage_literal_false_positives},
                {"msg_count_samples", s.msg_count_samples},
                {"msg_count_mismatches", s.msg_count_mismatches},
                {"liveness_misses", s.liveness_misses},
                {"detections", s.detections},
                {"detection_latency_total", s.detection_latency_total},
                {"collected", s.collected},
                {"quiescent", s.quiescent}}}};
}

json to_json_value(const TraceEntry& e) {
  json j{{"i", e.index}, {"kind", entry_kind_name(e.kind)}, {"hash", hex_digest(e.hash)}};
  if (e.event) j["event"] = *e.event;
  if (e.collected) j["collected"] = *e.collected;
  return j;
}

TraceEntry trace_entry_from_json(const json& j) {
  TraceEntry e;
  e.index = j.at("i").get<EventIndex>();
  e.kind = entry_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("event")) e.event = j.at("event").get<Event>();
  if (j.contains("collected")) e.collected = j.at("collected").get<ActorAddress>();
  e.hash = std::stoull(j.at("hash").get<std::string>(), nullptr, 16);
  return e;
}

void write_trace(std::ostream& out, const RunConfig& config, const std::vector<TraceEntry>& entries, bool complete) {
  out << json{{"type", "header"}, {"config", to_json_value(config)}}.dump() << '\n';
  for (const auto& e : entries) {
    json j = to_json_value(e);
    j["type"] = "entry";
    out << j.dump() << '\n';
  }
  if (complete) out << json{{"type", "end"}, {"entries", entries.size()}}.dump() << '\n';
}

Trace read_trace(std::istream& in) {
  Trace t;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      if (in.peek() == std::char_traits<char>::eof()) break;  // cut short while writing
      throw std::runtime_error("trace line " + std::to_string(line_no) + " is not valid JSON");
    }
    const auto type = j.at("type").get<std::string>();
    if (type == "header") {
      t.config = run_config_from_json(j.at("config"));
      have_header = true;
    } else if (type == "entry") {
      t.entries.push_back(trace_entry_from_json(j));
    } else if (type == "end") {
      t.complete = true;
    } else {
      throw std::runtime_error("trace line " + std::to_string(line_no) + " has unknown type " + type);
    }
  }
  if (!have_header) throw std::runtime_error("trace has no header line");
  return t;
}

namespace {

void compare(const TraceEntry& got, const TraceEntry& want) {
  if (got.kind != want.kind) {
    throw ReplayDivergence(want.index, "expected a " + std::string(entry_kind_name(want.kind)) + " entry, replay produced " +
                                           std::string(entry_kind_name(got.kind)));
  }
  if (got.event != want.event || got.collected != want.collected) {
    throw ReplayDivergence(want.index, "recorded " + (want.event ? to_string(*want.event) : std::string("collect")) +
                                           ", replay produced " +
                                           (got.event ? to_string(*got.event) : std::string("collect")));
  }
  if (got.hash != want.hash) {
    throw ReplayDivergence(want.index, "configuration hash " + hex_digest(got.hash) + " differs from recorded " +
                                           hex_digest(want.hash));
  }
}

}  // namespace

RunResult replay(const Trace& trace) {
  // A truncated trace may stop between a chosen event and its policy entries;
  // the replay keeps the extra entries it generates.
  Simulation sim(trace.config);
  bool finished = false;
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const auto& want = trace.entries[i];
    if (want.index != i + 1) throw ReplayDivergence(want.index, "entry out of sequence");
    if (i >= sim.trace().size() && want.kind == EntryKind::Chosen && want.event && !finished) {
      try {
        sim.step(*want.event);
      } catch (const RejectedEvent& e) {
        throw ReplayDivergence(want.index, e.what());
      }
    } else if (i >= sim.trace().size() && want.kind != EntryKind::Chosen && trace.complete && !finished) {
      sim.finish();  // the end-of-run sweep and its collections
      finished = true;
    }
    if (i >= sim.trace().size()) {
      throw ReplayDivergence(want.index, "recorded " + std::string(entry_kind_name(want.kind)) +
                                             " entry was not produced by the replay");
    }
    compare(sim.trace()[i], want);
  }
  if (trace.complete) {
    if (!finished) sim.finish();
    if (sim.trace().size() != trace.entries.size()) {
      const auto at = std::min(sim.trace().size(), trace.entries.size()) + 1;
      throw ReplayDivergence(at, "replay produced " + std::to_string(sim.trace().size()) + " entries, trace has " +
                                     std::to_string(trace.entries.size()));
    }
  }
  return RunResult{sim.report(), sim.trace(), sim.store(), trace.complete};
}

}  // namespace drl
