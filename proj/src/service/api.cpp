#include "tow/service/api.hpp"

#include <charconv>
#include <sstream>

#include <httplib.h>

#include "tow/lint/interest.hpp"
#include "tow/lint/scan.hpp"
#include "tow/search/serialize.hpp"

namespace tow::service {

namespace {

Response error(int status, const std::string& message) {
  return {status, nlohmann::json{{"error", message}}.dump()};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream in(path);
  std::string part;
  while (std::getline(in, part, '/')) parts.push_back(part);
  return parts;
}

std::optional<int> decision_index(const std::string& s) {
  int n = -1;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || p != s.data() + s.size() || n < 0) return std::nullopt;
  return n;
}

std::string fnv_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

LibraryApi::LibraryApi(ReplayLibrary library, lint::LintOptions options)
    : library_(std::move(library)), options_(std::move(options)) {
  options_.validate();
  entries_ = library_.entries();
  nlohmann::json index = nlohmann::json::array();
  for (const auto& e : entries_) index.push_back(entry_to_json(e));
  version_ = fnv_hex(index.dump());
}

const GameEntry* LibraryApi::find(const std::string& id) const {
  for (const auto& e : entries_) {
    if (e.game_id == id) return &e;
  }
  return nullptr;
}

Response LibraryApi::get(const std::string& path) const {
  const auto parts = split_path(path);
  // A leading slash yields an empty first part.
  if (parts.size() < 3 || !parts[0].empty() || parts[1] != "api" || parts[2] != "games") {
    return error(404, "no such endpoint");
  }
  if (parts.size() == 3) {
    nlohmann::json games = nlohmann::json::array();
    for (const auto& e : entries_) games.push_back(entry_to_json(e));
    return {200, nlohmann::json{{"schema", kIndexSchema}, {"version", kIndexSchemaVersion},
                                {"library_version", version_}, {"games", std::move(games)}}
                     .dump()};
  }
  const std::string& id = parts[3];
  if (!ReplayLibrary::valid_id(id)) return error(400, "malformed game id");
  if (parts.size() == 4) return game(id);
  if (parts.size() == 5 && parts[4] == "interest") return interest(id);
  if (parts.size() == 5 && parts[4] == "flaws") return flaws(id);
  if (parts.size() == 7 && parts[4] == "decisions") {
    if (parts[6] == "tree") return tree(id, parts[5]);
    if (parts[6] == "root_table") return root_table(id, parts[5]);
  }
  return error(404, "no such endpoint");
}

Response LibraryApi::game(const std::string& id) const {
  if (!find(id)) return error(404, "unknown game '" + id + "'");
  return {200, library_.replay_text(id)};
}

Response LibraryApi::tree(const std::string& id, const std::string& n) const {
  const auto k = decision_index(n);
  if (!k) return error(400, "malformed decision index");
  const auto* e = find(id);
  if (!e) return error(404, "unknown game '" + id + "'");
  if (*k >= e->decisions) return error(404, "no decision " + n);
  return {200, library_.tree_text(id, *k)};
}

Response LibraryApi::root_table(const std::string& id, const std::string& n) const {
  const auto k = decision_index(n);
  if (!k) return error(400, "malformed decision index");
  const auto* e = find(id);
  if (!e) return error(404, "unknown game '" + id + "'");
  if (*k >= e->decisions) return error(404, "no decision " + n);
  const auto replay = library_.load(id, false);
  return {200, nlohmann::json{{"game_id", id}, {"decision", *k},
                              {"entries", search::root_table_to_json(replay.decisions[*k].root_table)}}
                   .dump()};
}

Response LibraryApi::interest(const std::string& id) const {
  if (!find(id)) return error(404, "unknown game '" + id + "'");
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : lint::rank_by_drop(lint::interest_scores(library_.load(id, false)))) {
    rows.push_back({{"decision", s.decision},
                    {"value_drop", s.value_drop ? nlohmann::json(*s.value_drop) : nlohmann::json(nullptr)},
                    {"fluctuation", s.fluctuation},
                    {"criticality", s.criticality}});
  }
  return {200, nlohmann::json{{"game_id", id}, {"decisions", std::move(rows)}}.dump()};
}

Response LibraryApi::flaws(const std::string& id) const {
  if (!find(id)) return error(404, "unknown game '" + id + "'");
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = flaw_cache_.find(id); it != flaw_cache_.end()) return {200, it->second};
  }
  const auto reports = lint::lint_replay(library_.load(id, true), lint::all_detectors(), options_);
  std::string body = nlohmann::json{{"schema", lint::kScanSchema}, {"version", lint::kScanSchemaVersion},
                                    {"game_id", id}, {"reports", lint::reports_to_json(reports)}}
                         .dump();
  std::lock_guard lock(cache_mutex_);
  return {200, flaw_cache_.emplace(id, std::move(body)).first->second};
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const LibraryApi& api) : impl_(std::make_unique<Impl>()) {
  impl_->server.Get(R"(/api(/.*)?)", [&api](const httplib::Request& req, httplib::Response& res) {
    const Response r = api.get(req.path);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    if (r.status == 200) {
      res.set_header("ETag", "\"" + api.version() + "\"");
      // The game list grows as games are added; everything under a game is
      // written once.
      res.set_header("Cache-Control", req.path == "/api/games" ? "no-cache" : "public, max-age=31536000, immutable");
    }
    res.set_content(r.body, "application/json");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void serve(const LibraryApi& api, const std::string& host, int port) {
  HttpServer server(api);
  server.bind(host, port);
  server.run();
}

}  // namespace tow::service
