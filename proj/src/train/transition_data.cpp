#include "tow/train/transition_data.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tow/models/features.hpp"

namespace tow::train {

namespace {

constexpr std::array<char, 8> kMagic{'T', 'O', 'W', 'D', 'A', 'T', 'A', '\0'};
constexpr std::uint32_t kDatasetVersion = 1;

static_assert(std::endian::native == std::endian::little, "dataset I/O assumes a little-endian host");

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    buf_.append(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void state(const game::AbstractState& s) {
    put<std::int32_t>(s.wave);
    for (double h : s.base_health) put(h);
    put<std::int32_t>(s.own_currency);
    for (const auto& side : s.buildings)
      for (const auto& lane : side)
        for (int n : lane) put<std::int32_t>(n);
    for (int p : s.pylons) put<std::int32_t>(p);
    for (const auto& side : s.unit_grid)
      for (const auto& type : side)
        for (int n : type) put<std::int32_t>(n);
  }
  void action(const game::PlayerAction& a) {
    put<std::uint8_t>(static_cast<std::uint8_t>(a.lane));
    for (int n : a.buildings) put<std::int32_t>(n);
    put<std::int32_t>(a.pylons);
  }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  template <typename T>
  T get() {
    T v;
    if (data_.size() - pos_ < sizeof v) throw std::runtime_error("dataset: truncated file");
    std::memcpy(&v, data_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
  }
  game::AbstractState state() {
    game::AbstractState s;
    s.wave = get<std::int32_t>();
    for (double& h : s.base_health) h = get<double>();
    s.own_currency = get<std::int32_t>();
    for (auto& side : s.buildings)
      for (auto& lane : side)
        for (int& n : lane) n = get<std::int32_t>();
    for (int& p : s.pylons) p = get<std::int32_t>();
    for (auto& side : s.unit_grid)
      for (auto& type : side)
        for (int& n : type) n = get<std::int32_t>();
    return s;
  }
  game::PlayerAction action() {
    game::PlayerAction a;
    const auto lane = get<std::uint8_t>();
    if (lane > 1) throw std::runtime_error("dataset: bad lane");
    a.lane = static_cast<game::Lane>(lane);
    for (int& n : a.buildings) n = get<std::int32_t>();
    a.pylons = get<std::int32_t>();
    return a;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, std::span<const std::size_t> cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(cols[i]));
  return out;
}

}  // namespace

std::vector<TransitionRecord> collect_transition_dataset(const TournamentPool& pool, int games, std::uint64_t seed,
                                                         const game::GameConfig& config, std::size_t candidate_limit,
                                                         const ReplayBuffer* final_buffer) {
  if (pool.members.empty()) throw std::invalid_argument("collect_transition_dataset: pool is empty");
  game::SplitMix64 rng{seed};
  const RandomPolicy random(config);
  std::vector<TransitionRecord> out;
  for (int g = 0; g < games; ++g) {
    const auto first = pool.policy(rng.next() % pool.members.size(), config, candidate_limit);
    const auto second = pool.policy(rng.next() % pool.members.size(), config, candidate_limit);
    const Policy& other = g % 2 == 0 ? *second : static_cast<const Policy&>(random);
    const bool swap = rng.next() % 2 == 1;
    const std::uint64_t game_seed = rng.next();
    const PlayedGame played =
        swap ? play_game(other, *first, game_seed, config, rng) : play_game(*first, other, game_seed, config, rng);
    auto records = game_transitions(played, config);
    out.insert(out.end(), std::make_move_iterator(records.begin()), std::make_move_iterator(records.end()));
  }
  if (final_buffer) {
    for (auto& r : final_buffer->contents()) out.push_back(std::move(r));
  }
  return out;
}

void save_dataset(std::span<const TransitionRecord> records, const std::filesystem::path& path) {
  Writer w;
  w.buffer().append(kMagic.data(), kMagic.size());
  w.put<std::uint32_t>(kDatasetVersion);
  w.put<std::uint64_t>(records.size());
  for (const auto& r : records) {
    w.state(r.s);
    w.action(r.friendly);
    w.action(r.enemy);
    w.state(r.next);
    for (double v : r.reward.p) w.put(v);
    w.put<std::uint8_t>(r.terminal ? 1 : 0);
  }
  const std::uint64_t sum = fnv1a(w.buffer());
  w.put(sum);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
  if (!out) throw std::runtime_error("dataset: cannot write " + path.string());
}

std::vector<TransitionRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("dataset: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  if (bytes.size() < kMagic.size() + 20) throw std::runtime_error("dataset: truncated file");
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) throw std::runtime_error("dataset: bad magic");
  Reader r(std::string_view(bytes).substr(kMagic.size()));
  if (r.get<std::uint32_t>() != kDatasetVersion) throw std::runtime_error("dataset: unsupported version");
  const auto count = r.get<std::uint64_t>();
  std::vector<TransitionRecord> records;
  for (std::uint64_t i = 0; i < count; ++i) {
    TransitionRecord rec;
    rec.s = r.state();
    rec.friendly = r.action();
    rec.enemy = r.action();
    rec.next = r.state();
    for (double& v : rec.reward.p) v = r.get<double>();
    rec.terminal = r.get<std::uint8_t>() != 0;
    records.push_back(rec);
  }
  const std::size_t body = kMagic.size() + r.pos();
  const auto stored = r.get<std::uint64_t>();
  if (kMagic.size() + r.pos() != bytes.size()) throw std::runtime_error("dataset: trailing bytes");
  if (stored != fnv1a(std::string_view(bytes).substr(0, body))) throw std::runtime_error("dataset: checksum mismatch");
  return records;
}

TransitionMetrics evaluate_transition_model(const models::TransitionModel& model,
                                            std::span<const TransitionRecord> records,
                                            const game::GameConfig& config) {
  TransitionMetrics m;
  m.records = records.size();
  if (records.empty()) return m;
  for (const auto& r : records) {
    const auto p = model.predict(r.s, r.friendly, r.enemy, config);
    const Eigen::VectorXd got = models::encode_state(p.state, config);
    const Eigen::VectorXd want = models::encode_state(r.next, config);
    m.health_mae += (got.segment(models::kHealthOffset, 4) - want.segment(models::kHealthOffset, 4)).cwiseAbs().mean();
    m.grid_mae += (got.segment(models::kGridOffset, 48) - want.segment(models::kGridOffset, 48)).cwiseAbs().mean();
    m.building_mae +=
        (got.segment(models::kBuildingOffset, 12) - want.segment(models::kBuildingOffset, 12)).cwiseAbs().mean();
    m.currency_mae += std::abs(got(models::kCurrencyOffset) - want(models::kCurrencyOffset));
    double reward = 0;
    for (int c = 0; c < models::kOutcomeSize; ++c) reward += std::abs(p.reward.p[c] - r.reward.p[c]);
    m.reward_mae += reward / models::kOutcomeSize;
  }
  const double n = static_cast<double>(records.size());
  m.health_mae /= n;
  m.grid_mae /= n;
  m.building_mae /= n;
  m.currency_mae /= n;
  m.reward_mae /= n;
  m.grid_count_mae = m.grid_mae * models::kGridScale;
  return m;
}

FitResult fit_transition_model(std::span<const TransitionRecord> dataset, const FitConfig& fit,
                               const game::GameConfig& config) {
  if (dataset.empty()) throw std::invalid_argument("fit_transition_model: empty dataset");
  if (fit.epochs < 1 || fit.batch_size < 1 || fit.holdout_fraction < 0 || fit.holdout_fraction >= 1) {
    throw std::invalid_argument("fit_transition_model: bad fit config");
  }
  game::SplitMix64 rng{fit.seed};
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.next() % i]);
  const auto held = static_cast<std::size_t>(std::floor(fit.holdout_fraction * static_cast<double>(dataset.size())));
  const std::vector<std::size_t> holdout(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(held));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(held), order.end());

  Eigen::MatrixXd inputs(models::TransitionModel::kInputs, static_cast<Eigen::Index>(dataset.size()));
  Eigen::MatrixXd targets(models::TransitionModel::kOutputs, static_cast<Eigen::Index>(dataset.size()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& r = dataset[i];
    inputs.col(static_cast<Eigen::Index>(i)) = models::TransitionModel::input(r.s, r.friendly, r.enemy, config);
    targets.col(static_cast<Eigen::Index>(i)) = models::TransitionModel::target(r.s, r.next, r.reward, config);
  }

  FitResult result;
  result.model = models::TransitionModel::init(rng.next(), fit.hidden);
  nn::Adam optimizer(result.model.net(), nn::AdamOptions{fit.learning_rate});
  const auto batch = static_cast<std::size_t>(fit.batch_size);
  for (int epoch = 0; epoch < fit.epochs; ++epoch) {
    for (std::size_t i = train.size(); i > 1; --i) std::swap(train[i - 1], train[rng.next() % i]);
    double total = 0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < train.size(); start += batch) {
      const std::span<const std::size_t> cols(train.data() + start, std::min(batch, train.size() - start));
      total += nn::train_step(result.model.net(), optimizer, gather(inputs, cols), gather(targets, cols));
      ++steps;
    }
    result.epoch_loss.push_back(total / static_cast<double>(steps));
  }

  std::vector<TransitionRecord> train_records;
  std::vector<TransitionRecord> holdout_records;
  for (std::size_t i : train) train_records.push_back(dataset[i]);
  for (std::size_t i : holdout) holdout_records.push_back(dataset[i]);
  result.train = evaluate_transition_model(result.model, train_records, config);
  result.holdout = evaluate_transition_model(result.model, holdout_records, config);
  return result;
}

}  // namespace tow::train
