#include "clarify/session.hpp"

#include <chrono>
#include <fstream>
#include <random>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "clarify/error.hpp"
#include "clarify/rng.hpp"
#include "clarify/text.hpp"

namespace clarify {

using nlohmann::json;

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::active: return "active";
    case SessionStatus::done: return "done";
    case SessionStatus::failed: return "failed";
  }
  return "failed";
}

SessionStatus parse_session_status(std::string_view text) {
  if (text == "active") return SessionStatus::active;
  if (text == "done") return SessionStatus::done;
  if (text == "failed") return SessionStatus::failed;
  throw ValidationError(fmt::format("unknown session status '{}'", text));
}

json session_to_json(const SessionState& s) {
  json turns = json::array();
  for (const auto& t : s.history.turns) turns.push_back({{"question", t.question}, {"answer", t.answer}});
  return json{{"id", s.id},
              {"initial_query", s.history.initial_query},
              {"turns", std::move(turns)},
              {"belief", s.belief},
              {"selector", to_string(s.selector)},
              {"posterior", to_string(s.mode)},
              {"seed", s.seed},
              {"turn", s.turn},
              {"status", to_string(s.status)},
              {"question", s.question},
              {"accepted_id", s.accepted_id},
              {"failure", s.failure},
              {"created_at", s.created_at},
              {"updated_at", s.updated_at}};
}

SessionState session_from_json(const json& j) {
  SessionState s;
  s.id = j.at("id").get<std::string>();
  s.history.initial_query = j.at("initial_query").get<std::string>();
  for (const auto& t : j.at("turns"))
    s.history.turns.push_back({t.at("question").get<std::string>(), t.at("answer").get<std::string>()});
  s.belief = j.at("belief").get<std::vector<double>>();
  s.selector = parse_selector_kind(j.at("selector").get<std::string>());
  s.mode = parse_posterior_mode(j.at("posterior").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  s.turn = j.at("turn").get<int>();
  s.status = parse_session_status(j.at("status").get<std::string>());
  s.question = j.at("question").get<std::string>();
  s.accepted_id = j.at("accepted_id").get<std::string>();
  s.failure = j.at("failure").get<std::string>();
  s.created_at = j.at("created_at").get<std::string>();
  s.updated_at = j.at("updated_at").get<std::string>();
  return s;
}

namespace {

std::string now_utc() {
  const auto now = std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%S}Z", now);
}

std::string new_session_id() {
  static std::mutex mutex;
  static std::mt19937_64 engine{std::random_device{}()};
  std::lock_guard lock(mutex);
  return fmt::format("{:016x}", engine());
}

std::uint64_t random_seed() {
  static std::mutex mutex;
  static std::mt19937_64 engine{std::random_device{}() ^ 0x5eed};
  std::lock_guard lock(mutex);
  return engine() >> 11;  // stays exact in JSON doubles for non-C++ clients
}

BeliefDistribution belief_of(const SessionState& s) {
  return BeliefDistribution(Eigen::Map<const Eigen::VectorXd>(s.belief.data(), static_cast<Eigen::Index>(s.belief.size())));
}

std::vector<double> to_vector(const BeliefDistribution& b) {
  return {b.probs().data(), b.probs().data() + b.probs().size()};
}

}  // namespace

SessionStore::SessionStore(const Engine& engine, SessionOptions options)
    : engine_(&engine), options_(std::move(options)) {
  if (options_.max_turns < 2) throw ValidationError("sessions need max_turns >= 2");
  if (options_.pool_size < 1) throw ValidationError("pool_size must be positive");
  if (!options_.data_dir.empty()) {
    std::filesystem::create_directories(options_.data_dir);
    restore();
  }
}

void SessionStore::restore() {
  for (const auto& file : std::filesystem::directory_iterator(options_.data_dir)) {
    if (file.path().extension() != ".jsonl") continue;
    std::ifstream in(file.path(), std::ios::binary);
    std::string line, last;
    while (std::getline(in, line))
      if (!text::trim(line).empty()) last = line;
    if (last.empty()) continue;
    try {
      auto state = session_from_json(json::parse(last).at("state"));
      auto e = std::make_shared<Entry>();
      e->snapshot = std::make_shared<const SessionState>(std::move(state));
      sessions_.emplace(e->snapshot->id, std::move(e));
    } catch (const std::exception& ex) {
      spdlog::error("skipping unreadable session log {}: {}", file.path().string(), ex.what());
    }
  }
  spdlog::info("restored {} sessions from {}", sessions_.size(), options_.data_dir.string());
}

std::shared_ptr<SessionStore::Entry> SessionStore::entry(const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError(fmt::format("no session '{}'", id));
  return it->second;
}

void SessionStore::publish(Entry& e, SessionState state, std::string_view event) {
  if (!options_.data_dir.empty()) {
    const auto path = options_.data_dir / (state.id + ".jsonl");
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << json{{"event", event}, {"state", session_to_json(state)}}.dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("cannot append to session log {}", path.string()));
  }
  auto snapshot = std::make_shared<const SessionState>(std::move(state));
  std::lock_guard lock(e.snapshot_mutex);
  e.snapshot = std::move(snapshot);
}

std::string SessionStore::next_question(const SessionState& state, const BeliefDistribution& belief) const {
  const auto blocks = render_contexts(top_candidates(belief, engine_->corpus()));
  CandidatePool pool;
  if (state.selector != SelectorKind::external)
    pool = engine_->oracles().generator->generate_pool(state.history, blocks, options_.pool_size);
  const auto selection = select_question(state.selector, pool, belief, engine_->selection_context(state.history, blocks),
                                         derive_seed(state.seed, static_cast<std::uint64_t>(state.turn)));
  return selection.question;
}

SessionState SessionStore::create(const CreateRequest& request) {
  if (text::trim(request.query).empty()) throw ValidationError("query must be non-empty");
  SessionState state;
  state.id = new_session_id();
  state.history.initial_query = request.query;
  state.selector = request.selector.value_or(options_.selector);
  state.mode = request.mode.value_or(engine_->config().posterior.mode);
  state.seed = request.seed.value_or(random_seed());
  state.created_at = state.updated_at = now_utc();
  if (state.selector == SelectorKind::external && engine_->external() == nullptr)
    throw ValidationError("the external selector needs selection.endpoint to be configured");

  auto e = std::make_shared<Entry>();
  std::lock_guard update(e->update);
  const auto belief = engine_->retriever().retrieve(request.query);
  state.belief = to_vector(belief);
  std::exception_ptr failure;
  try {
    state.question = next_question(state, belief);
  } catch (const OracleError& ex) {
    state.status = SessionStatus::failed;
    state.failure = ex.what();
    failure = std::current_exception();
  } catch (const TransportError& ex) {
    state.status = SessionStatus::failed;
    state.failure = ex.what();
    failure = std::current_exception();
  }
  auto copy = state;
  publish(*e, std::move(state), "create");
  {
    std::unique_lock lock(map_mutex_);
    sessions_.emplace(copy.id, std::move(e));
  }
  if (failure) std::rethrow_exception(failure);
  return copy;
}

SessionState SessionStore::submit_answer(const std::string& id, const AnswerRequest& request) {
  auto e = entry(id);
  std::lock_guard update(e->update);
  SessionState state = *e->snapshot;
  if (state.status != SessionStatus::active)
    throw ConflictError(fmt::format("session '{}' is {}", id, to_string(state.status)));
  if (request.turn && *request.turn != state.turn)
    throw ConflictError(fmt::format("session '{}' is at turn {}, answer was for turn {}", id, state.turn, *request.turn));
  const bool has_answer = !text::trim(request.answer).empty();
  if (!has_answer && !request.accept_id) throw ValidationError("answer must be non-empty");
  if (request.accept_id && !engine_->corpus().find(*request.accept_id))
    throw ValidationError(fmt::format("unknown item '{}'", *request.accept_id));

  std::exception_ptr failure;
  try {
    if (has_answer) {
      const auto prior = belief_of(state);
      state.history.turns.push_back({state.question, request.answer});
      const auto posterior = update_belief(state.mode, prior, state.history, engine_->belief_deps());
      state.belief = to_vector(posterior);
      ++state.turn;
    }
    state.question.clear();
    if (request.accept_id) {
      state.accepted_id = *request.accept_id;
      state.status = SessionStatus::done;
      spdlog::info("session {} accepted {} at turn {}", id, state.accepted_id, state.turn);
    } else if (state.turn >= options_.max_turns) {
      state.status = SessionStatus::done;
    } else {
      state.question = next_question(state, belief_of(state));
    }
  } catch (const OracleError& ex) {
    state.status = SessionStatus::failed;
    state.failure = ex.what();
    state.question.clear();
    failure = std::current_exception();
  } catch (const TransportError& ex) {
    state.status = SessionStatus::failed;
    state.failure = ex.what();
    state.question.clear();
    failure = std::current_exception();
  }
  state.updated_at = now_utc();
  auto copy = state;
  publish(*e, std::move(state), request.accept_id ? "accept" : "answer");
  if (failure) std::rethrow_exception(failure);
  return copy;
}

SessionState SessionStore::get(const std::string& id) const {
  auto e = entry(id);
  std::lock_guard lock(e->snapshot_mutex);
  return *e->snapshot;
}

std::vector<std::string> SessionStore::ids() const {
  std::shared_lock lock(map_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

json SessionStore::candidates_json(const SessionState& state) const {
  json out = json::array();
  for (const auto& c : top_candidates(belief_of(state), engine_->corpus()))
    out.push_back({{"id", c.item->id}, {"title", c.item->title}, {"author", c.item->author}, {"prob", c.prob}, {"rank", c.rank}});
  return out;
}

json SessionStore::view(const SessionState& state) const {
  json turns = json::array();
  for (const auto& t : state.history.turns) turns.push_back({{"question", t.question}, {"answer", t.answer}});
  json v{{"session_id", state.id},
         {"query", state.history.initial_query},
         {"turns", std::move(turns)},
         {"turn", state.turn},
         {"max_turns", options_.max_turns},
         {"status", to_string(state.status)},
         {"done", state.status != SessionStatus::active},
         {"selector", to_string(state.selector)},
         {"posterior", to_string(state.mode)},
         {"candidates", candidates_json(state)},
         {"created_at", state.created_at},
         {"updated_at", state.updated_at}};
  if (!state.question.empty()) v["question"] = state.question;
  if (!state.accepted_id.empty()) v["accepted_id"] = state.accepted_id;
  if (!state.failure.empty()) v["failure"] = state.failure;
  return v;
}

}  // namespace clarify
