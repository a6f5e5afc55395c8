#include "irteval/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "irteval/logging.hpp"
#include "irteval/rng.hpp"

namespace irteval {

ResponseMatrix ResponseMatrix::filled(std::vector<std::string> model_ids, std::vector<std::string> item_ids,
                                      Cell fill) {
  ResponseMatrix matrix;
  matrix.model_ids = std::move(model_ids);
  matrix.item_ids = std::move(item_ids);
  matrix.cells.assign(matrix.model_ids.size() * matrix.item_ids.size(), fill);
  return matrix;
}

std::vector<Finding> validate_matrix(const ResponseMatrix& matrix) {
  std::vector<Finding> findings;
  if (matrix.cells.size() != matrix.model_ids.size() * matrix.item_ids.size()) {
    findings.push_back({FindingSeverity::error, "cell storage does not match the declared dimensions", "", ""});
    return findings;
  }

  auto check_duplicates = [&](const std::vector<std::string>& ids, bool is_model) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
      if (!seen.insert(id).second) {
        Finding f{FindingSeverity::error, std::string(is_model ? "duplicate model_id '" : "duplicate item_id '") + id + "'",
                  "", ""};
        (is_model ? f.model_id : f.item_id) = id;
        findings.push_back(std::move(f));
      }
    }
  };
  check_duplicates(matrix.model_ids, true);
  check_duplicates(matrix.item_ids, false);

  const int k = matrix.model_count();
  const int l = matrix.item_count();
  bool any_observed = false;

  for (int i = 0; i < k; ++i) {
    bool observed = false;
    for (int j = 0; j < l; ++j) observed |= matrix.at(i, j) != Cell::missing;
    if (!observed) {
      findings.push_back({FindingSeverity::warning,
                          "model '" + matrix.model_ids[i] + "' has no observed responses", matrix.model_ids[i], ""});
    }
    any_observed |= observed;
  }
  for (int j = 0; j < l; ++j) {
    int observed = 0;
    int correct = 0;
    for (int i = 0; i < k; ++i) {
      const Cell c = matrix.at(i, j);
      if (c == Cell::missing) continue;
      ++observed;
      correct += c == Cell::correct ? 1 : 0;
    }
    if (observed == 0) {
      findings.push_back({FindingSeverity::warning,
                          "item '" + matrix.item_ids[j] + "' has no observed responses", "", matrix.item_ids[j]});
    } else if (correct == 0 || correct == observed) {
      findings.push_back({FindingSeverity::warning,
                          "item '" + matrix.item_ids[j] + "' has all-constant observed responses (" +
                              (correct == 0 ? "all incorrect" : "all correct") + ")",
                          "", matrix.item_ids[j]});
    }
  }
  if (k > 0 && l > 0 && !any_observed) {
    findings.push_back({FindingSeverity::error, "matrix has no observed cells", "", ""});
  }
  return findings;
}

namespace {

enum class ExecMode { serial, parallel };

constexpr int kAdaptWindow = 50;
constexpr double kAcceptLow = 0.30;
constexpr double kAcceptHigh = 0.45;

struct Observation {
  int index = 0;  // item index for rows, model index for columns
  bool correct = false;
};

// Fixed block-index layout; independent of the number of items in a block
// so that shared parameters keep their streams when columns are appended.
struct BlockLayout {
  int k = 0;
  int l = 0;
  static constexpr int mu_theta = 0;
  static constexpr int sigma_theta = 1;
  static constexpr int mu_b = 2;
  static constexpr int sigma_b = 3;
  static constexpr int mu_log_a = 4;
  static constexpr int sigma_log_a = 5;
  static constexpr int hyper_count = 6;

  int theta(int i) const { return hyper_count + i; }
  int difficulty(int j) const { return hyper_count + k + 2 * j; }
  int log_a(int j) const { return hyper_count + k + 2 * j + 1; }
  int total() const { return hyper_count + k + 2 * l; }
};

// Streaming moments for one half of one chain's draws (for split R-hat).
struct HalfMoments {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

struct MetropolisBlock {
  rng::Stream stream{0};
  double scale = 0.5;
  // Adaptation window (burn-in only).
  int window_proposals = 0;
  int window_accepts = 0;
  // Post-burn-in acceptance diagnostics.
  long proposals = 0;
  long accepts = 0;
};

struct ChainState {
  std::vector<double> theta;
  std::vector<double> difficulty;
  std::vector<double> log_a;
  std::vector<double> a;  // exp(log_a), kept in sync
  double mu_theta = 0.0, sigma_theta = 1.0;
  double mu_b = 0.0, sigma_b = 1.0;
  double mu_log_a = 0.0, sigma_log_a = 1.0;
  std::vector<MetropolisBlock> blocks;  // indexed by block id
};

struct FitData {
  const ResponseMatrix* matrix = nullptr;
  BlockLayout layout;
  std::vector<std::vector<Observation>> by_row;
  std::vector<std::vector<Observation>> by_col;
  std::vector<char> row_active;
  std::vector<char> col_active;
  std::vector<double> init_theta;  // standardized logit of row accuracy
  std::vector<double> init_difficulty;
};

double normal_log_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd);
}

double row_log_likelihood(const FitData& data, const ChainState& state, int i, double theta) {
  double total = 0.0;
  for (const Observation& obs : data.by_row[i]) {
    const double eta = state.a[obs.index] * (theta - state.difficulty[obs.index]);
    total += bernoulli_log_prob(eta, obs.correct);
  }
  return total;
}

double col_log_likelihood(const FitData& data, const ChainState& state, int j, double a, double b) {
  double total = 0.0;
  for (const Observation& obs : data.by_col[j]) {
    const double eta = a * (state.theta[obs.index] - b);
    total += bernoulli_log_prob(eta, obs.correct);
  }
  return total;
}

// One random-walk Metropolis step on a scalar. `log_target` evaluates the
// full conditional log density. Returns the (possibly unchanged) value.
template <typename LogTarget>
double metropolis_step(MetropolisBlock& block, double current, bool adapting, LogTarget&& log_target) {
  const double proposal = current + block.scale * block.stream.next_normal();
  const double log_alpha = log_target(proposal) - log_target(current);
  const double u = block.stream.next_unit();
  const bool accept = std::log(u) < log_alpha;
  if (adapting) {
    ++block.window_proposals;
    block.window_accepts += accept ? 1 : 0;
  } else {
    ++block.proposals;
    block.accepts += accept ? 1 : 0;
  }
  return accept ? proposal : current;
}

void maybe_adapt(MetropolisBlock& block) {
  if (block.window_proposals < kAdaptWindow) return;
  const double rate = static_cast<double>(block.window_accepts) / block.window_proposals;
  if (rate < kAcceptLow) {
    block.scale *= 0.85;
  } else if (rate > kAcceptHigh) {
    block.scale *= 1.15;
  }
  block.scale = std::clamp(block.scale, 1e-3, 10.0);
  block.window_proposals = 0;
  block.window_accepts = 0;
}

void update_theta(const FitData& data, ChainState& state, int i, bool adapting) {
  MetropolisBlock& block = state.blocks[data.layout.theta(i)];
  state.theta[i] = metropolis_step(block, state.theta[i], adapting, [&](double theta) {
    return normal_log_density(theta, state.mu_theta, state.sigma_theta) +
           row_log_likelihood(data, state, i, theta);
  });
  if (adapting) maybe_adapt(block);
}

void update_item(const FitData& data, ChainState& state, int j, bool adapting) {
  MetropolisBlock& b_block = state.blocks[data.layout.difficulty(j)];
  state.difficulty[j] = metropolis_step(b_block, state.difficulty[j], adapting, [&](double b) {
    return normal_log_density(b, state.mu_b, state.sigma_b) +
           col_log_likelihood(data, state, j, state.a[j], b);
  });
  if (adapting) maybe_adapt(b_block);

  MetropolisBlock& a_block = state.blocks[data.layout.log_a(j)];
  state.log_a[j] = metropolis_step(a_block, state.log_a[j], adapting, [&](double log_a) {
    return normal_log_density(log_a, state.mu_log_a, state.sigma_log_a) +
           col_log_likelihood(data, state, j, std::exp(log_a), state.difficulty[j]);
  });
  state.a[j] = std::exp(state.log_a[j]);
  if (adapting) maybe_adapt(a_block);
}

// Conjugate draw for a normal-location hyperparameter with N(0,1) prior.
double gibbs_mu(rng::Stream& stream, double sum, int count, double sigma) {
  const double precision = 1.0 + static_cast<double>(count) / (sigma * sigma);
  const double mean = (sum / (sigma * sigma)) / precision;
  return mean + stream.next_normal() / std::sqrt(precision);
}

// Random-walk Metropolis on ln(sigma) with half-normal(1) prior; the
// ln(sigma) Jacobian keeps the move valid on the sigma scale.
double metropolis_sigma(MetropolisBlock& block, double sigma, bool adapting,
                        const std::vector<double>& values, const std::vector<char>& active, double mu) {
  auto log_target_ln = [&](double log_sigma) {
    const double s = std::exp(log_sigma);
    double total = -0.5 * s * s + log_sigma;  // half-normal(1) prior + Jacobian
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
      if (!active[idx]) continue;
      total += normal_log_density(values[idx], mu, s);
    }
    return total;
  };
  const double updated = metropolis_step(block, std::log(sigma), adapting, log_target_ln);
  if (adapting) maybe_adapt(block);
  return std::exp(updated);
}

void update_hyperparameters(const FitData& data, ChainState& state, bool adapting) {
  const BlockLayout& L = data.layout;

  double theta_sum = 0.0;
  int theta_count = 0;
  for (int i = 0; i < L.k; ++i) {
    if (!data.row_active[i]) continue;
    theta_sum += state.theta[i];
    ++theta_count;
  }
  state.mu_theta = gibbs_mu(state.blocks[L.mu_theta].stream, theta_sum, theta_count, state.sigma_theta);
  state.sigma_theta = metropolis_sigma(state.blocks[L.sigma_theta], state.sigma_theta, adapting, state.theta,
                                       data.row_active, state.mu_theta);

  double b_sum = 0.0;
  double la_sum = 0.0;
  int item_count = 0;
  for (int j = 0; j < L.l; ++j) {
    if (!data.col_active[j]) continue;
    b_sum += state.difficulty[j];
    la_sum += state.log_a[j];
    ++item_count;
  }
  state.mu_b = gibbs_mu(state.blocks[L.mu_b].stream, b_sum, item_count, state.sigma_b);
  state.sigma_b = metropolis_sigma(state.blocks[L.sigma_b], state.sigma_b, adapting, state.difficulty,
                                   data.col_active, state.mu_b);
  state.mu_log_a = gibbs_mu(state.blocks[L.mu_log_a].stream, la_sum, item_count, state.sigma_log_a);
  state.sigma_log_a = metropolis_sigma(state.blocks[L.sigma_log_a], state.sigma_log_a, adapting, state.log_a,
                                       data.col_active, state.mu_log_a);
}

void sweep(const FitData& data, ChainState& state, bool adapting, ExecMode mode) {
  const BlockLayout& L = data.layout;
  const bool parallel = mode == ExecMode::parallel;

#pragma omp parallel for schedule(static) if (parallel && L.k >= 32)
  for (int i = 0; i < L.k; ++i) {
    if (!data.row_active[i]) continue;
    update_theta(data, state, i, adapting);
  }

#pragma omp parallel for schedule(static) if (parallel && L.l >= 32)
  for (int j = 0; j < L.l; ++j) {
    if (!data.col_active[j]) continue;
    update_item(data, state, j, adapting);
  }

  update_hyperparameters(data, state, adapting);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

FitData prepare_data(const ResponseMatrix& matrix) {
  FitData data;
  data.matrix = &matrix;
  data.layout.k = matrix.model_count();
  data.layout.l = matrix.item_count();
  data.by_row.resize(data.layout.k);
  data.by_col.resize(data.layout.l);
  data.row_active.assign(data.layout.k, 0);
  data.col_active.assign(data.layout.l, 0);

  for (int i = 0; i < data.layout.k; ++i) {
    for (int j = 0; j < data.layout.l; ++j) {
      const Cell c = matrix.at(i, j);
      if (c == Cell::missing) continue;
      const bool correct = c == Cell::correct;
      data.by_row[i].push_back({j, correct});
      data.by_col[j].push_back({i, correct});
    }
  }
  for (int i = 0; i < data.layout.k; ++i) data.row_active[i] = !data.by_row[i].empty();
  for (int j = 0; j < data.layout.l; ++j) data.col_active[j] = !data.by_col[j].empty();

  // Moment-based starting points: standardized logit of row accuracy for
  // abilities, negated logit of column accuracy for difficulties.
  data.init_theta.assign(data.layout.k, 0.0);
  std::vector<double> raw(data.layout.k, 0.0);
  double raw_sum = 0.0;
  int active_rows = 0;
  for (int i = 0; i < data.layout.k; ++i) {
    if (!data.row_active[i]) continue;
    double correct = 0.0;
    for (const Observation& obs : data.by_row[i]) correct += obs.correct ? 1.0 : 0.0;
    const double acc = correct / static_cast<double>(data.by_row[i].size());
    raw[i] = logit(std::clamp(acc, 0.02, 0.98));
    raw_sum += raw[i];
    ++active_rows;
  }
  const double raw_mean = active_rows > 0 ? raw_sum / active_rows : 0.0;
  double raw_var = 0.0;
  for (int i = 0; i < data.layout.k; ++i) {
    if (!data.row_active[i]) continue;
    raw_var += (raw[i] - raw_mean) * (raw[i] - raw_mean);
  }
  const double raw_sd = active_rows > 1 ? std::sqrt(raw_var / (active_rows - 1)) : 0.0;
  for (int i = 0; i < data.layout.k; ++i) {
    if (!data.row_active[i]) continue;
    data.init_theta[i] = raw_sd > 1e-9 ? (raw[i] - raw_mean) / raw_sd : 0.0;
  }

  data.init_difficulty.assign(data.layout.l, 0.0);
  for (int j = 0; j < data.layout.l; ++j) {
    if (!data.col_active[j]) continue;
    double correct = 0.0;
    for (const Observation& obs : data.by_col[j]) correct += obs.correct ? 1.0 : 0.0;
    const double acc = correct / static_cast<double>(data.by_col[j].size());
    data.init_difficulty[j] = -logit(std::clamp(acc, 0.02, 0.98));
  }
  return data;
}

void validate_config(const CalibrationConfig& config) {
  if (config.chain_count < 1) throw ValidationError("calibration config: chain_count must be >= 1");
  if (config.iterations_per_chain < 1) {
    throw ValidationError("calibration config: iterations_per_chain must be >= 1");
  }
  if (config.burn_in < 0 || config.burn_in >= config.iterations_per_chain) {
    throw ValidationError("calibration config: burn_in must be in [0, iterations_per_chain)");
  }
  if (config.thinning < 1) throw ValidationError("calibration config: thinning must be >= 1");
  const ProposalScales& s = config.proposal_scales;
  if (!(s.theta > 0.0) || !(s.difficulty > 0.0) || !(s.log_discrimination > 0.0) || !(s.log_sigma > 0.0)) {
    throw ValidationError("calibration config: proposal scales must be positive");
  }
}

ChainState init_chain(const FitData& data, const CalibrationConfig& config, int chain) {
  const BlockLayout& L = data.layout;
  ChainState state;
  state.theta.assign(L.k, 0.0);
  state.difficulty.assign(L.l, 0.0);
  state.log_a.assign(L.l, 0.0);
  state.a.assign(L.l, 1.0);
  state.blocks.resize(L.total());

  const std::uint64_t fit_seed = rng::derive(config.seed, {rng::hash_bytes("calibration"), static_cast<std::uint64_t>(chain)});
  for (int block = 0; block < L.total(); ++block) {
    state.blocks[block].stream = rng::Stream(rng::combine(fit_seed, static_cast<std::uint64_t>(block)));
  }
  for (int i = 0; i < L.k; ++i) state.blocks[L.theta(i)].scale = config.proposal_scales.theta;
  for (int j = 0; j < L.l; ++j) {
    state.blocks[L.difficulty(j)].scale = config.proposal_scales.difficulty;
    state.blocks[L.log_a(j)].scale = config.proposal_scales.log_discrimination;
  }
  state.blocks[L.sigma_theta].scale = config.proposal_scales.log_sigma;
  state.blocks[L.sigma_b].scale = config.proposal_scales.log_sigma;
  state.blocks[L.sigma_log_a].scale = config.proposal_scales.log_sigma;

  // Overdispersed starts: data-driven centers plus per-parameter jitter
  // drawn from each parameter's own stream.
  for (int i = 0; i < L.k; ++i) {
    if (!data.row_active[i]) continue;
    state.theta[i] = data.init_theta[i] + 0.3 * state.blocks[L.theta(i)].stream.next_normal();
  }
  for (int j = 0; j < L.l; ++j) {
    if (!data.col_active[j]) continue;
    state.difficulty[j] = data.init_difficulty[j] + 0.3 * state.blocks[L.difficulty(j)].stream.next_normal();
    state.log_a[j] = 0.2 * state.blocks[L.log_a(j)].stream.next_normal();
    state.a[j] = std::exp(state.log_a[j]);
  }
  state.mu_theta = 0.1 * state.blocks[L.mu_theta].stream.next_normal();
  state.sigma_theta = std::exp(0.1 * state.blocks[L.sigma_theta].stream.next_normal());
  state.mu_b = 0.1 * state.blocks[L.mu_b].stream.next_normal();
  state.sigma_b = std::exp(0.1 * state.blocks[L.sigma_b].stream.next_normal());
  state.mu_log_a = 0.1 * state.blocks[L.mu_log_a].stream.next_normal();
  state.sigma_log_a = std::exp(0.1 * state.blocks[L.sigma_log_a].stream.next_normal());
  return state;
}

struct DrawAccumulator {
  std::vector<double> pooled_sum;
  std::vector<long> pooled_count;
  // halves[param][chain * 2 + half]
  std::vector<std::vector<HalfMoments>> halves;
  int half_size = 0;

  DrawAccumulator(int params, int chains, int draws_per_chain) {
    pooled_sum.assign(params, 0.0);
    pooled_count.assign(params, 0);
    halves.assign(params, std::vector<HalfMoments>(static_cast<std::size_t>(chains) * 2));
    half_size = draws_per_chain / 2;
  }

  void add(int param, int chain, int draw_index, double value) {
    pooled_sum[param] += value;
    ++pooled_count[param];
    if (half_size < 1 || draw_index >= 2 * half_size) return;
    const int half = draw_index < half_size ? 0 : 1;
    halves[param][static_cast<std::size_t>(chain) * 2 + half].add(value);
  }

  double mean(int param) const {
    return pooled_count[param] > 0 ? pooled_sum[param] / static_cast<double>(pooled_count[param]) : 0.0;
  }

  double split_r_hat(int param) const {
    const auto& hs = halves[param];
    double w = 0.0;
    double mean_of_means = 0.0;
    int m = 0;
    for (const HalfMoments& h : hs) {
      if (h.count < 2) return std::numeric_limits<double>::quiet_NaN();
      w += h.variance();
      mean_of_means += h.mean;
      ++m;
    }
    w /= m;
    mean_of_means /= m;
    double b = 0.0;
    for (const HalfMoments& h : hs) {
      b += (h.mean - mean_of_means) * (h.mean - mean_of_means);
    }
    b *= static_cast<double>(half_size) / (m - 1);
    if (w <= 0.0) return b <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(half_size);
    const double var_plus = (n - 1.0) / n * w + b / n;
    return std::sqrt(var_plus / w);
  }
};

CalibratedBank fit_2pl_impl(const ResponseMatrix& matrix, const CalibrationConfig& config, ExecMode mode) {
  validate_config(config);
  if (matrix.model_count() < 2 || matrix.item_count() < 2) {
    throw ValidationError("fit_2pl: need at least 2 models and 2 items");
  }
  const std::vector<Finding> findings = validate_matrix(matrix);
  std::vector<std::string> warnings;
  for (const Finding& f : findings) {
    if (f.severity == FindingSeverity::error) {
      throw ValidationError("fit_2pl: " + f.message);
    }
    log_warning("fit_2pl: " + f.message);
    warnings.push_back(f.message);
  }

  const FitData data = prepare_data(matrix);
  const BlockLayout& L = data.layout;

  const int total_draws = (config.iterations_per_chain - config.burn_in + config.thinning - 1) / config.thinning;
  DrawAccumulator acc(L.total(), config.chain_count, total_draws);
  std::vector<long> acceptance_proposals(L.total(), 0);
  std::vector<long> acceptance_accepts(L.total(), 0);

  for (int chain = 0; chain < config.chain_count; ++chain) {
    ChainState state = init_chain(data, config, chain);
    for (int iter = 0; iter < config.iterations_per_chain; ++iter) {
      const bool adapting = iter < config.burn_in;
      sweep(data, state, adapting, mode);
      if (iter < config.burn_in || (iter - config.burn_in) % config.thinning != 0) continue;
      const int draw_index = (iter - config.burn_in) / config.thinning;
      for (int i = 0; i < L.k; ++i) {
        if (data.row_active[i]) acc.add(L.theta(i), chain, draw_index, state.theta[i]);
      }
      for (int j = 0; j < L.l; ++j) {
        if (!data.col_active[j]) continue;
        acc.add(L.difficulty(j), chain, draw_index, state.difficulty[j]);
        acc.add(L.log_a(j), chain, draw_index, state.a[j]);
      }
      acc.add(L.mu_theta, chain, draw_index, state.mu_theta);
      acc.add(L.sigma_theta, chain, draw_index, state.sigma_theta);
      acc.add(L.mu_b, chain, draw_index, state.mu_b);
      acc.add(L.sigma_b, chain, draw_index, state.sigma_b);
      acc.add(L.mu_log_a, chain, draw_index, state.mu_log_a);
      acc.add(L.sigma_log_a, chain, draw_index, state.sigma_log_a);
    }
    // Fold this chain's post-burn-in acceptance counts into the shared
    // diagnostics (chains share the block layout).
    for (int block = 0; block < L.total(); ++block) {
      acceptance_proposals[block] += state.blocks[block].proposals;
      acceptance_accepts[block] += state.blocks[block].accepts;
    }
  }

  CalibratedBank bank;
  // Raw posterior means.
  std::vector<double> theta_hat(L.k, 0.0);
  const double mu_theta_hat = acc.mean(L.mu_theta);
  const double mu_b_hat = acc.mean(L.mu_b);
  const double mu_log_a_hat = acc.mean(L.mu_log_a);
  for (int i = 0; i < L.k; ++i) {
    theta_hat[i] = data.row_active[i] ? acc.mean(L.theta(i)) : mu_theta_hat;
  }
  std::vector<double> b_hat(L.l, 0.0), a_hat(L.l, 1.0);
  for (int j = 0; j < L.l; ++j) {
    if (data.col_active[j]) {
      b_hat[j] = acc.mean(L.difficulty(j));
      a_hat[j] = acc.mean(L.log_a(j));  // accumulated on the natural a scale
    } else {
      b_hat[j] = mu_b_hat;
      a_hat[j] = std::exp(mu_log_a_hat);
    }
  }

  // Identification: standardize abilities, apply the compensating affine
  // transform to the item parameters so probabilities are unchanged.
  double shift = std::accumulate(theta_hat.begin(), theta_hat.end(), 0.0) / L.k;
  double var = 0.0;
  for (double t : theta_hat) var += (t - shift) * (t - shift);
  double scale = L.k > 1 ? std::sqrt(var / (L.k - 1)) : 1.0;
  if (!(scale > 1e-9)) {
    warnings.push_back("ability scale degenerate; skipping standardization scale");
    scale = 1.0;
  }

  bank.train_abilities.reserve(L.k);
  for (int i = 0; i < L.k; ++i) {
    bank.train_abilities.push_back({matrix.model_ids[i], (theta_hat[i] - shift) / scale});
  }
  bank.items.reserve(L.l);
  for (int j = 0; j < L.l; ++j) {
    bank.items.push_back({matrix.item_ids[j], a_hat[j] * scale, (b_hat[j] - shift) / scale});
  }

  FitDiagnostics& diag = bank.diagnostics;
  diag.location_shift = shift;
  diag.scale = scale;
  diag.warnings = std::move(warnings);

  auto add_diag = [&](const std::string& name, int block, bool metropolis) {
    ParameterDiagnostic d;
    d.name = name;
    d.acceptance_rate = metropolis && acceptance_proposals[block] > 0
                            ? static_cast<double>(acceptance_accepts[block]) / acceptance_proposals[block]
                            : 1.0;
    d.r_hat = acc.split_r_hat(block);
    diag.parameters.push_back(std::move(d));
  };
  add_diag("mu_theta", L.mu_theta, false);
  add_diag("sigma_theta", L.sigma_theta, true);
  add_diag("mu_b", L.mu_b, false);
  add_diag("sigma_b", L.sigma_b, true);
  add_diag("mu_log_a", L.mu_log_a, false);
  add_diag("sigma_log_a", L.sigma_log_a, true);
  for (int i = 0; i < L.k; ++i) {
    if (!data.row_active[i]) continue;
    add_diag("theta[" + matrix.model_ids[i] + "]", L.theta(i), true);
  }
  for (int j = 0; j < L.l; ++j) {
    if (!data.col_active[j]) continue;
    add_diag("difficulty[" + matrix.item_ids[j] + "]", L.difficulty(j), true);
    add_diag("a[" + matrix.item_ids[j] + "]", L.log_a(j), true);
  }

  diag.max_r_hat = 0.0;
  for (const ParameterDiagnostic& d : diag.parameters) {
    if (std::isfinite(d.r_hat)) diag.max_r_hat = std::max(diag.max_r_hat, d.r_hat);
    if (d.r_hat > 1.1) {
      diag.warnings.push_back("R-hat " + std::to_string(d.r_hat) + " for parameter " + d.name +
                              " exceeds 1.1 (chains may not have converged)");
    }
  }
  for (int i = 0; i < L.k; ++i) {
    if (!data.row_active[i]) {
      diag.warnings.push_back("model '" + matrix.model_ids[i] + "' has no data; ability set to the hypermean");
    }
  }
  for (int j = 0; j < L.l; ++j) {
    if (!data.col_active[j]) {
      diag.warnings.push_back("item '" + matrix.item_ids[j] + "' has no data; parameters set to the hypermeans");
    }
  }
  return bank;
}

}  // namespace

CalibratedBank fit_2pl(const ResponseMatrix& matrix, const CalibrationConfig& config) {
  return fit_2pl_impl(matrix, config, ExecMode::parallel);
}

namespace reference {

CalibratedBank fit_2pl_serial(const ResponseMatrix& matrix, const CalibrationConfig& config) {
  return fit_2pl_impl(matrix, config, ExecMode::serial);
}

}  // namespace reference

}  // namespace irteval
