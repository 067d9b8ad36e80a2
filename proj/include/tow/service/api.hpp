#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tow/lint/detectors.hpp"
#include "tow/service/library.hpp"

namespace tow::service {

struct Response {
  int status = 200;
  std::string body;  // JSON
};

// Read-only view of a library taken at construction: the index is read
// once, and game directories never change after they are published, so
// every response is a pure function of this snapshot.
//
//   GET /api/games
//   GET /api/games/{id}
//   GET /api/games/{id}/decisions/{n}/tree
//   GET /api/games/{id}/decisions/{n}/root_table
//   GET /api/games/{id}/interest
//   GET /api/games/{id}/flaws
class LibraryApi {
 public:
  LibraryApi(ReplayLibrary library, lint::LintOptions options);

  // Unknown ids or decisions give 404, malformed paths 400.
  Response get(const std::string& path) const;
  // Changes whenever the library index does; used as the ETag.
  const std::string& version() const { return version_; }

 private:
  Response game(const std::string& id) const;
  Response tree(const std::string& id, const std::string& n) const;
  Response root_table(const std::string& id, const std::string& n) const;
  Response interest(const std::string& id) const;
  Response flaws(const std::string& id) const;
  const GameEntry* find(const std::string& id) const;

  ReplayLibrary library_;
  lint::LintOptions options_;
  std::vector<GameEntry> entries_;
  std::string version_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::string> flaw_cache_;
};

// HTTP front end for a LibraryApi. Successful responses carry the library
// version as ETag; per-game documents are marked immutable.
class HttpServer {
 public:
  explicit HttpServer(const LibraryApi& api);
  ~HttpServer();

  // Port 0 picks a free port. Returns the bound port; throws
  // std::runtime_error if the address cannot be bound.
  int bind(const std::string& host, int port);
  void run();   // blocks until stop()
  void stop();  // safe from another thread

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Binds and serves until the process is stopped.
void serve(const LibraryApi& api, const std::string& host, int port);

}  // namespace tow::service
