#include "tow/service/settings.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tow::service {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw std::invalid_argument("config key '" + key + "': cannot read '" + v + "'");
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::invalid_argument("config key '" + key + "': expected on/off, got '" + v + "'");
}

std::vector<int> parse_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

std::string list_text(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

struct Key {
  std::string name;
  std::function<std::string(const Settings&)> get;
  std::function<void(Settings&, const std::string&)> set;
  bool shapes_play = false;
};

template <class T, class F>
Key number(std::string name, F field, bool shapes_play = false) {
  return {name,
          [field](const Settings& s) {
            if constexpr (std::is_floating_point_v<T>) {
              return fmt(field(const_cast<Settings&>(s)));
            } else {
              return std::to_string(field(const_cast<Settings&>(s)));
            }
          },
          [field, name](Settings& s, const std::string& v) { field(s) = parse_number<T>(name, v); }, shapes_play};
}

template <class F>
Key text(std::string name, F field) {
  return {name, [field](const Settings& s) { return std::string(field(const_cast<Settings&>(s))); },
          [field](Settings& s, const std::string& v) { field(s) = v; }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    t.push_back({"seed", [](const Settings& s) { return std::to_string(s.seed); },
                 [](Settings& s, const std::string& v) { s.set_seed(parse_number<std::uint64_t>("seed", v)); }});

    t.push_back(number<int>("search.depth", [](Settings& s) -> int& { return s.search.depth; }, true));
    t.push_back({"search.friendly", [](const Settings& s) { return list_text(s.search.friendly); },
                 [](Settings& s, const std::string& v) { s.search.friendly = parse_list("search.friendly", v); }, true});
    t.push_back({"search.enemy", [](const Settings& s) { return list_text(s.search.enemy); },
                 [](Settings& s, const std::string& v) { s.search.enemy = parse_list("search.enemy", v); }, true});
    t.push_back({"search.guard_terminals", [](const Settings& s) { return std::string(s.search.guard_terminals ? "on" : "off"); },
                 [](Settings& s, const std::string& v) { s.search.guard_terminals = parse_bool("search.guard_terminals", v); },
                 true});
    t.push_back(number<double>("search.terminal_threshold",
                               [](Settings& s) -> double& { return s.search.terminal_threshold; }, true));
    t.push_back(number<std::size_t>("search.candidate_limit",
                                    [](Settings& s) -> std::size_t& { return s.candidate_limit; }, true));

    t.push_back(number<double>("train.gamma", [](Settings& s) -> double& { return s.train.gamma; }));
    t.push_back(number<double>("train.learning_rate", [](Settings& s) -> double& { return s.train.learning_rate; }));
    t.push_back(number<int>("train.batch_size", [](Settings& s) -> int& { return s.train.batch_size; }));
    t.push_back(number<std::size_t>("train.buffer_capacity",
                                    [](Settings& s) -> std::size_t& { return s.train.buffer_capacity; }));
    t.push_back(number<int>("train.target_sync", [](Settings& s) -> int& { return s.train.target_sync; }));
    t.push_back(number<double>("train.epsilon_start", [](Settings& s) -> double& { return s.train.epsilon_start; }));
    t.push_back(number<double>("train.epsilon_end", [](Settings& s) -> double& { return s.train.epsilon_end; }));
    t.push_back(number<long long>("train.max_steps", [](Settings& s) -> long long& { return s.train.max_steps; }));
    t.push_back(number<int>("train.max_games", [](Settings& s) -> int& { return s.train.max_games; }));
    t.push_back(number<double>("train.win_rate_threshold",
                               [](Settings& s) -> double& { return s.train.win_rate_threshold; }));
    t.push_back(number<int>("train.win_rate_window", [](Settings& s) -> int& { return s.train.win_rate_window; }));
    t.push_back(number<int>("train.update_every", [](Settings& s) -> int& { return s.train.update_every; }));
    t.push_back(number<std::size_t>("train.candidate_limit",
                                    [](Settings& s) -> std::size_t& { return s.train.candidate_limit; }));
    t.push_back(number<int>("train.hidden", [](Settings& s) -> int& { return s.train.hidden; }));
    t.push_back(number<int>("train.log_every", [](Settings& s) -> int& { return s.train.log_every; }));
    t.push_back(number<int>("train.generations", [](Settings& s) -> int& { return s.generations; }));

    t.push_back(number<int>("fit.epochs", [](Settings& s) -> int& { return s.fit.epochs; }));
    t.push_back(number<int>("fit.batch_size", [](Settings& s) -> int& { return s.fit.batch_size; }));
    t.push_back(number<double>("fit.learning_rate", [](Settings& s) -> double& { return s.fit.learning_rate; }));
    t.push_back(number<double>("fit.holdout_fraction", [](Settings& s) -> double& { return s.fit.holdout_fraction; }));
    t.push_back(number<int>("fit.hidden", [](Settings& s) -> int& { return s.fit.hidden; }));
    t.push_back(number<int>("fit.games", [](Settings& s) -> int& { return s.fit_games; }));

    t.push_back(number<double>("lint.health_tolerance", [](Settings& s) -> double& { return s.lint.health_tolerance; }));
    t.push_back(number<double>("lint.severe_rise", [](Settings& s) -> double& { return s.lint.severe_rise; }));
    t.push_back(number<double>("lint.terminal_threshold",
                               [](Settings& s) -> double& { return s.lint.terminal_threshold; }));
    t.push_back(number<double>("lint.tau_state", [](Settings& s) -> double& { return s.lint.tau_state; }));
    t.push_back(number<double>("lint.tau_outcome", [](Settings& s) -> double& { return s.lint.tau_outcome; }));

    t.push_back({"paths.library", [](const Settings& s) { return s.library.string(); },
                 [](Settings& s, const std::string& v) { s.library = v; }});
    t.push_back({"paths.models", [](const Settings& s) { return s.models.string(); },
                 [](Settings& s, const std::string& v) { s.models = v; }});
    t.push_back(text("serve.host", [](Settings& s) -> std::string& { return s.host; }));
    t.push_back(number<int>("serve.port", [](Settings& s) -> int& { return s.port; }));
    return t;
  }();
  return table;
}

}  // namespace

void Settings::set_seed(std::uint64_t s) {
  seed = s;
  train.seed = s;
  fit.seed = s;
}

void Settings::validate() const {
  game.validate();
  search.validate();
  train.validate();
  lint.validate();
  if (candidate_limit == 0) throw std::invalid_argument("search.candidate_limit must be positive");
  if (generations < 1) throw std::invalid_argument("train.generations must be at least 1");
  if (fit.epochs < 1 || fit.batch_size < 1 || !(fit.learning_rate > 0) || fit.hidden < 1 ||
      !(fit.holdout_fraction >= 0 && fit.holdout_fraction < 1)) {
    throw std::invalid_argument("fit settings out of range");
  }
  if (fit_games < 1) throw std::invalid_argument("fit.games must be positive");
  if (port < 0 || port > 65535) throw std::invalid_argument("serve.port out of range");
}

std::string Settings::to_text() const {
  std::ostringstream out;
  for (const auto& k : keys()) out << k.name << " = " << k.get(*this) << '\n';
  for (const auto& [k, v] : game::game_keys(game)) out << k << " = " << v << '\n';
  return out.str();
}

std::string Settings::play_hash() const {
  std::string text = game.to_text();
  for (const auto& k : keys()) {
    if (k.shapes_play) text += k.name + " = " + k.get(*this) + '\n';
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Settings parse_settings(const std::string& text) {
  Settings s;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw std::invalid_argument(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      bool known = game::apply_game_key(s.game, key, value);
      for (const auto& k : keys()) {
        if (!known && k.name == key) {
          k.set(s, value);
          known = true;
        }
      }
      if (!known) throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
  s.lint.config = s.game;
  s.validate();
  return s;
}

Settings load_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_settings(buf.str());
}

std::optional<std::filesystem::path> settings_path(const std::optional<std::filesystem::path>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("TOW_CONFIG"); env != nullptr && *env != '\0') return std::filesystem::path(env);
  return std::nullopt;
}

Settings load_settings(const std::optional<std::filesystem::path>& flag) {
  const auto path = settings_path(flag);
  return path ? load_settings_file(*path) : parse_settings("");
}

}  // namespace tow::service
