#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "kboot/bootstrap.hpp"
#include "kboot/error.hpp"
#include "kboot/harness.hpp"
#include "kboot/stats_core.hpp"

namespace kboot {

using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;

struct Cell {
  Design design;
  DataCase data_case;
  int n;
  double rho;
  int k;
  double theta;
  CholeskyFactor factor;

  std::string key() const {
    return fmt::format("{}|{}|{}|{}|{}", to_string(design), to_string(data_case), n, rho, k);
  }

  std::uint64_t data_key(std::uint64_t seed, int rep) const {
    return derive_key({seed, static_cast<std::uint64_t>(design), static_cast<std::uint64_t>(data_case),
                       static_cast<std::uint64_t>(n), std::bit_cast<std::uint64_t>(rho),
                       static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(rep),
                       static_cast<std::uint64_t>(StreamRole::Data)});
  }
};

struct CellState {
  std::vector<int> outcomes;             // rejection bitmask per rep, -1 when pending
  std::vector<double> seconds;           // per method, summed over completed reps
};

std::vector<Cell> build_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (Design design : config.designs)
    for (DataCase data_case : config.cases)
      for (int n : config.ns)
        for (double rho : config.rhos) {
          const CholeskyFactor factor = cholesky(build_correlation(correlation_for(design, rho, config.d)));
          for (int k : config.ks) {
            const double theta = data_case == DataCase::Asymmetric ? config.theta_asymmetric : config.theta_symmetric;
            cells.push_back(Cell{design, data_case, n, rho, k, theta, factor});
          }
        }
  return cells;
}

std::uint64_t fingerprint(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  copy.threads = 0;
  const std::string text = config_to_json(copy);
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_checkpoint(const std::string& path, std::uint64_t print, const std::vector<Cell>& cells,
                     const std::vector<CellState>& states) {
  json doc;
  doc["format"] = "kboot-checkpoint";
  doc["version"] = kCheckpointVersion;
  doc["fingerprint"] = fmt::format("{:016x}", print);
  doc["cells"] = json::array();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    json cell;
    cell["key"] = cells[c].key();
    cell["outcomes"] = states[c].outcomes;
    cell["seconds"] = states[c].seconds;
    doc["cells"].push_back(cell);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) fail(ErrorCode::IOError, "cannot write checkpoint '" + tmp + "'");
    out << doc.dump();
    if (!out) fail(ErrorCode::IOError, "failed writing checkpoint '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    fail(ErrorCode::IOError, "cannot move checkpoint into place at '" + path + "'");
}

bool load_checkpoint(const std::string& path, std::uint64_t print, const std::vector<Cell>& cells,
                     std::vector<CellState>& states) {
  std::ifstream in(path);
  if (!in) return false;
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::IOError, "checkpoint '" + path + "' is unreadable: " + e.what());
  }
  if (doc.value("format", "") != "kboot-checkpoint" || doc.value("version", 0) != kCheckpointVersion)
    fail(ErrorCode::IOError, "checkpoint '" + path + "' has an unsupported format");
  if (doc.value("fingerprint", "") != fmt::format("{:016x}", print))
    fail(ErrorCode::ConfigError, "checkpoint '" + path + "' was written for a different configuration");
  const auto& stored = doc.at("cells");
  if (stored.size() != cells.size()) fail(ErrorCode::IOError, "checkpoint cell count mismatch");
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (stored[c].at("key").get<std::string>() != cells[c].key())
      fail(ErrorCode::IOError, "checkpoint cell order mismatch");
    states[c].outcomes = stored[c].at("outcomes").get<std::vector<int>>();
    states[c].seconds = stored[c].at("seconds").get<std::vector<double>>();
  }
  return true;
}

double critical_for(Method method, const Matrix& x, const Cell& cell, const ExperimentConfig& config,
                    const MultiplierLaw& outer, const MultiplierLaw& inner, const RngStream& rng) {
  const double level = 1.0 - config.alpha;
  switch (method) {
    case Method::EB:
      return critical_value(empirical_bootstrap_draws(x, config.B1, cell.k, rng), level);
    case Method::GB:
      return critical_value(wild_bootstrap_draws(x, MultiplierLaw::gaussian(), config.B1, cell.k, rng), level);
    case Method::MB:
      return critical_value(wild_bootstrap_draws(x, MultiplierLaw::mammen(), config.B1, cell.k, rng), level);
    case Method::RB:
      return critical_value(wild_bootstrap_draws(x, MultiplierLaw::rademacher(), config.B1, cell.k, rng), level);
    case Method::BB:
      return critical_value(wild_bootstrap_draws(x, MultiplierLaw::beta(config.beta_nu), config.B1, cell.k, rng),
                            level);
    case Method::DB:
      return double_bootstrap(x, outer, inner, config.B1, config.B2, config.alpha, cell.k, rng).critical;
  }
  fail(ErrorCode::DomainError, "unknown method");
}

}  // namespace

SizeTable run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const std::vector<Cell> cells = build_cells(config);
  const std::size_t n_methods = config.methods.size();
  const MultiplierLaw outer = parse_law(config.db_outer, config.beta_nu);
  const MultiplierLaw inner = parse_law(config.db_inner, config.beta_nu);
  const std::uint64_t print = fingerprint(config);

  std::vector<CellState> states(cells.size());
  for (auto& s : states) {
    s.outcomes.assign(static_cast<std::size_t>(config.reps), -1);
    s.seconds.assign(n_methods, 0.0);
  }
  if (!options.checkpoint_path.empty()) {
    load_checkpoint(options.checkpoint_path, print, cells, states);
    for (const auto& s : states)
      if (s.outcomes.size() != static_cast<std::size_t>(config.reps) || s.seconds.size() != n_methods)
        fail(ErrorCode::IOError, "checkpoint shape does not match the configuration");
  }

  std::vector<std::pair<std::size_t, int>> pending;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (int r = 0; r < config.reps; ++r)
      if (states[c].outcomes[r] < 0) pending.emplace_back(c, r);

  const long total = static_cast<long>(cells.size()) * config.reps;
  long done = total - static_cast<long>(pending.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex mutex;
  std::exception_ptr error;
  long since_checkpoint = 0;

  auto worker = [&]() {
    std::vector<double> seconds(n_methods);
    while (!abort.load()) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= pending.size()) break;
      const auto [c, rep] = pending[idx];
      const Cell& cell = cells[c];
      try {
        const std::uint64_t data_key = cell.data_key(config.seed, rep);
        RngStream data_rng(data_key);
        Matrix x;
        if (config.gaussian_data) {
          x = sample_latent_gaussian(cell.n, cell.factor, data_rng);
        } else {
          CopulaOptions copula{cell.theta, cell.data_case, true};
          x = sample_copula_gamma(cell.n, cell.factor, copula, data_rng).values;
        }
        const Vector s = normalized_sum(x);
        const double t = kth_order_stat(std::span<const double>(s.data(), s.size()), cell.k);

        int mask = 0;
        for (std::size_t m = 0; m < n_methods; ++m) {
          const Method method = config.methods[m];
          const RngStream boot_rng(derive_key({data_key, static_cast<std::uint64_t>(StreamRole::Bootstrap),
                                               static_cast<std::uint64_t>(method)}));
          const auto start = std::chrono::steady_clock::now();
          const double critical = critical_for(method, x, cell, config, outer, inner, boot_rng);
          seconds[m] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          if (t >= critical) mask |= 1 << m;
        }

        std::lock_guard<std::mutex> lock(mutex);
        states[c].outcomes[rep] = mask;
        for (std::size_t m = 0; m < n_methods; ++m) states[c].seconds[m] += seconds[m];
        ++done;
        if (!options.checkpoint_path.empty() && ++since_checkpoint >= options.checkpoint_every) {
          since_checkpoint = 0;
          save_checkpoint(options.checkpoint_path, print, cells, states);
        }
        if (options.progress) options.progress(done, total);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!error) error = std::current_exception();
        abort.store(true);
      }
    }
  };

  int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(pending.size(), 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) {
    if (!options.checkpoint_path.empty()) save_checkpoint(options.checkpoint_path, print, cells, states);
    std::rethrow_exception(error);
  }
  if (!options.checkpoint_path.empty()) save_checkpoint(options.checkpoint_path, print, cells, states);

  SizeTable table;
  table.method_order = config.methods;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      long rejections = 0;
      for (int mask : states[c].outcomes) rejections += (mask >> m) & 1;
      SizeRow row;
      row.design = cells[c].design;
      row.data_case = cells[c].data_case;
      row.n = cells[c].n;
      row.rho = cells[c].rho;
      row.method = config.methods[m];
      row.k = cells[c].k;
      row.alpha = config.alpha;
      row.reps = config.reps;
      row.rate = static_cast<double>(rejections) / config.reps;
      row.se = std::sqrt(row.rate * (1.0 - row.rate) / config.reps);
      row.runtime_s = options.record_timing ? states[c].seconds[m] : 0.0;
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace kboot
