#include "stvo/scenarios.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>

namespace stvo {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double noise_variance(double signal_power, double snr_db)
{
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    return signal_power * std::pow(10.0, -snr_db / 10.0);
}

}  // namespace

std::mt19937_64 substream(std::uint64_t seed, RngStream stream, std::uint64_t index)
{
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ static_cast<std::uint64_t>(stream));
    s = splitmix64(s ^ index);
    return std::mt19937_64(s);
}

ArxParams experiment_params(Experiment experiment, double t, double horizon)
{
    if (!(t >= 0.0) || t > horizon) {
        throw InvalidParameter("experiment_params: t outside [0, horizon]");
    }
    if (experiment == Experiment::exp1) {
        const double a1 = t < 0.5 ? -0.9 : 0.9;
        double b1;
        if (t < 0.2) {
            b1 = 0.7;
        } else if (t < 0.4) {
            b1 = -0.8;
        } else if (t < 0.7) {
            b1 = 0.8;
        } else {
            b1 = -0.7;
        }
        return {a1, b1};
    }
    if (!(t > 0.0)) throw InvalidParameter("experiment_params: experiment 2 needs t > 0");
    return {0.8 * (1.0 + 1.0 / std::sqrt(t)), 0.9 + 0.1 * std::sin(2.0 * std::log(t))};
}

int TvarxConfig::samples() const
{
    return static_cast<int>(std::floor(horizon_s * sample_rate_hz + 1e-9));
}

void TvarxConfig::validate() const
{
    if (P_true != 1 || Q_true != 1) {
        throw InvalidParameter("TvarxConfig: only first-order truth (P_true = Q_true = 1) is modeled");
    }
    if (P_hat < P_true || Q_hat < Q_true) {
        throw InvalidParameter("TvarxConfig: estimated orders below the true ones");
    }
    if (m < 1) throw InvalidParameter("TvarxConfig: m must be >= 1");
    if (m >= n()) throw InvalidParameter("TvarxConfig: m must be below P_hat + Q_hat");
    if (!(horizon_s > 0.0) || !(sample_rate_hz > 0.0)) {
        throw InvalidParameter("TvarxConfig: horizon and rate must be positive");
    }
    if (samples() < m) throw InvalidParameter("TvarxConfig: horizon shorter than one block");
    if (std::isnan(snr_db)) throw InvalidParameter("TvarxConfig: snr_db is NaN");
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        throw InvalidParameter("TvarxConfig: lambda and mu must be positive");
    }
}

namespace {

// Parameter time of sample k in the experiment's unit, and the horizon in it.
std::pair<double, double> param_time(const TvarxConfig& cfg, int k)
{
    const double seconds = k / cfg.sample_rate_hz;
    if (cfg.experiment == Experiment::exp2 && cfg.exp2_time_unit == TimeUnit::ms) {
        return {1000.0 * seconds, 1000.0 * cfg.horizon_s};
    }
    return {seconds, cfg.horizon_s};
}

}  // namespace

TvarxSeries tvarx_simulate(const TvarxConfig& cfg, std::uint64_t run)
{
    return tvarx_simulate(cfg, run, true);
}

TvarxSeries tvarx_simulate(const TvarxConfig& cfg, std::uint64_t run, bool with_noise)
{
    cfg.validate();
    const int N = cfg.samples();
    const int W = cfg.warmup();
    const int n = cfg.n();

    TvarxSeries out;
    out.warmup = W;
    out.u = Vector::Zero(W + N);
    out.y = Vector::Zero(W + N);
    out.x_true.reserve(static_cast<size_t>(N));

    auto input_rng = substream(cfg.seed, RngStream::input, run);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> period(static_cast<size_t>(cfg.m));
    for (auto& g : period) g = gauss(input_rng);
    for (int k = 1; k <= N; ++k) out.u[W + k - 1] = period[static_cast<size_t>((k - 1) % cfg.m)];

    std::vector<ArxParams> params(static_cast<size_t>(N));
    for (int k = 1; k <= N; ++k) {
        const auto [t, horizon] = param_time(cfg, k);
        params[static_cast<size_t>(k - 1)] = experiment_params(cfg.experiment, t, horizon);
        Vector x = Vector::Zero(n);
        x[0] = params[static_cast<size_t>(k - 1)].a1;
        x[cfg.P_hat] = params[static_cast<size_t>(k - 1)].b1;
        out.x_true.push_back(std::move(x));
    }

    // Noiseless trajectory, used for the per-block signal power.
    Vector clean = Vector::Zero(W + N);
    for (int k = 1; k <= N; ++k) {
        const int i = W + k - 1;
        const auto& p = params[static_cast<size_t>(k - 1)];
        clean[i] = p.a1 * clean[i - 1] + p.b1 * out.u[i - 1];
    }
    if (!with_noise || (std::isinf(cfg.snr_db) && cfg.snr_db > 0)) {
        out.y = std::move(clean);
        return out;
    }

    // The noise part n = y - clean obeys n_i = a1 n_{i-1} + e_i. Block by block,
    // e = sigma * unit draws with sigma chosen so the realized block SNR
    // ||clean||^2 / ||n||^2 equals snr_db, given the carry from earlier blocks.
    // Samples past the last full block reuse its sigma.
    auto noise_rng = substream(cfg.seed, RngStream::noise, run);
    Vector draws(N);
    for (int k = 0; k < N; ++k) draws[k] = gauss(noise_rng);

    Vector noise = Vector::Zero(W + N);
    const int blocks = N / cfg.m;
    double sigma = 0.0;
    for (int start = 1; start <= N; start += cfg.m) {
        const int len = std::min(cfg.m, N - start + 1);
        Vector carry(len), unit(len);
        double c_prev = noise[W + start - 2];
        double v_prev = 0.0;
        for (int j = 0; j < len; ++j) {
            const double a = params[static_cast<size_t>(start - 1 + j)].a1;
            c_prev = a * c_prev;
            v_prev = a * v_prev + draws[start - 1 + j];
            carry[j] = c_prev;
            unit[j] = v_prev;
        }
        if ((start - 1) / cfg.m < blocks) {
            const double target =
                noise_variance(clean.segment(W + start - 1, len).squaredNorm(), cfg.snr_db);
            const double vv = unit.squaredNorm();
            const double cv = carry.dot(unit);
            const double disc = cv * cv - vv * (carry.squaredNorm() - target);
            sigma = disc > 0.0 && vv > 0.0 ? std::max(0.0, (-cv + std::sqrt(disc)) / vv) : 0.0;
        }
        noise.segment(W + start - 1, len) = carry + sigma * unit;
    }
    out.y = clean + noise;
    return out;
}

Matrix regressor_matrix(const Vector& y, const Vector& u, Eigen::Index t,
                        int m, int P_hat, int Q_hat)
{
    if (m < 1 || P_hat < 0 || Q_hat < 0 || P_hat + Q_hat < 1) {
        throw InvalidParameter("regressor_matrix: invalid shape");
    }
    if (y.size() != u.size()) throw InvalidInput("regressor_matrix: y and u lengths differ");
    if (t < std::max(P_hat, Q_hat)) throw InvalidInput("regressor_matrix: insufficient history");
    if (t + m - 1 > y.size()) throw InvalidInput("regressor_matrix: block runs past the data");

    Matrix A(m, P_hat + Q_hat);
    for (int j = 0; j < m; ++j) {
        for (int p = 1; p <= P_hat; ++p) A(j, p - 1) = y[t + j - p];
        for (int q = 1; q <= Q_hat; ++q) A(j, P_hat + q - 1) = u[t + j - q];
    }
    return A;
}

TvarxStream tvarx_stream(const TvarxConfig& cfg, std::uint64_t run)
{
    return tvarx_stream(tvarx_simulate(cfg, run), cfg);
}

TvarxStream tvarx_stream(const TvarxSeries& series, const TvarxConfig& cfg)
{
    cfg.validate();
    const int N = static_cast<int>(series.x_true.size());
    const int blocks = N / cfg.m;
    TvarxStream out;
    for (int s = 0; s < blocks; ++s) {
        const Eigen::Index t = series.warmup + s * cfg.m;
        ElasticNetData d;
        d.A = regressor_matrix(series.y, series.u, t, cfg.m, cfg.P_hat, cfg.Q_hat);
        d.y = series.y.segment(t, cfg.m);
        d.lambda = cfg.lambda;
        d.mu = cfg.mu;
        out.blocks.push_back(std::move(d));
        const int last = (s + 1) * cfg.m;
        out.x_true.push_back(series.x_true[static_cast<size_t>(last - 1)]);
        out.block_end_s.push_back(last / cfg.sample_rate_hz);
    }
    return out;
}

double PathLoss::rss_dbm(double distance_m) const
{
    return p0_dbm - 10.0 * exponent * std::log10(std::max(distance_m, d0_m) / d0_m);
}

int RssConfig::grid_side() const
{
    return static_cast<int>(std::lround(area_m / cell_m));
}

void RssConfig::validate() const
{
    if (!(area_m > 0.0) || !(cell_m > 0.0)) throw InvalidParameter("RssConfig: sizes must be positive");
    if (std::abs(area_m / cell_m - grid_side()) > 1e-9 || grid_side() < 1) {
        throw InvalidParameter("RssConfig: area must be a whole number of cells");
    }
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(sensors))));
    if (sensors < 1 || side * side != sensors) {
        throw InvalidParameter("RssConfig: sensors must be a perfect square");
    }
    if (meas_per_sensor < 1) throw InvalidParameter("RssConfig: meas_per_sensor must be >= 1");
    if (std::isnan(snr_db)) throw InvalidParameter("RssConfig: snr_db is NaN");
    if (!(comm_radius_m > 0.0)) throw InvalidParameter("RssConfig: comm_radius_m must be positive");
    if (!(round_ms > 0.0)) throw InvalidParameter("RssConfig: round_ms must be positive");
    if (path_length_steps < 1) throw InvalidParameter("RssConfig: path_length_steps must be >= 1");
    if (!(pathloss.d0_m > 0.0) || !(pathloss.exponent > 0.0)) {
        throw InvalidParameter("RssConfig: path-loss d0 and exponent must be positive");
    }
    if (training_draws < 1 || training_sigma_db < 0.0) {
        throw InvalidParameter("RssConfig: invalid training noise");
    }
    if (!(lambda > 0.0) || !(mu > 0.0)) throw InvalidParameter("RssConfig: lambda and mu must be positive");
}

std::vector<Point2> rss_sensor_positions(const RssConfig& cfg)
{
    cfg.validate();
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cfg.sensors))));
    const double spacing = cfg.area_m / side;
    std::vector<Point2> out;
    for (int row = 0; row < side; ++row) {
        for (int col = 0; col < side; ++col) {
            out.push_back({(col + 0.5) * spacing, (row + 0.5) * spacing});
        }
    }
    return out;
}

Point2 cell_center(const RssConfig& cfg, int cell)
{
    const int side = cfg.grid_side();
    if (cell < 0 || cell >= side * side) throw InvalidInput("cell_center: cell out of range");
    return {(cell % side + 0.5) * cfg.cell_m, (cell / side + 0.5) * cfg.cell_m};
}

std::vector<int> rss_row_owner(const RssConfig& cfg)
{
    std::vector<int> owner;
    for (int s = 0; s < cfg.sensors; ++s) {
        for (int k = 0; k < cfg.meas_per_sensor; ++k) owner.push_back(s);
    }
    return owner;
}

Matrix rss_dictionary(const RssConfig& cfg)
{
    const auto sensors = rss_sensor_positions(cfg);
    const int n = cfg.n();
    Matrix A(cfg.m(), n);
    auto rng = substream(cfg.seed, RngStream::training);
    std::normal_distribution<double> shadow(0.0, cfg.training_sigma_db);
    for (int s = 0; s < cfg.sensors; ++s) {
        for (int k = 0; k < cfg.meas_per_sensor; ++k) {
            const int row = s * cfg.meas_per_sensor + k;
            for (int j = 0; j < n; ++j) {
                const Point2 c = cell_center(cfg, j);
                const double d = std::hypot(c.x - sensors[s].x, c.y - sensors[s].y);
                double acc = 0.0;
                for (int draw = 0; draw < cfg.training_draws; ++draw) acc += shadow(rng);
                A(row, j) = cfg.pathloss.rss_dbm(d) + acc / cfg.training_draws;
            }
        }
    }
    return A;
}

std::vector<int> target_walk(const RssConfig& cfg, int steps, std::uint64_t run)
{
    cfg.validate();
    if (steps < 1) throw InvalidParameter("target_walk: steps must be >= 1");
    const int side = cfg.grid_side();
    auto rng = substream(cfg.seed, RngStream::walk, run);
    std::uniform_int_distribution<int> start(0, side * side - 1);
    std::uniform_int_distribution<int> move(0, 8);

    auto reflect = [side](int c) {
        if (side == 1) return 0;
        if (c < 0) return 1;
        if (c >= side) return side - 2;
        return c;
    };

    std::vector<int> out;
    int cell = start(rng);
    out.push_back(cell);
    for (int k = 1; k < steps; ++k) {
        const int mv = move(rng);
        const int col = reflect(cell % side + mv % 3 - 1);
        const int row = reflect(cell / side + mv / 3 - 1);
        cell = row * side + col;
        out.push_back(cell);
    }
    return out;
}

Vector cell_indicator(const RssConfig& cfg, int cell)
{
    const int n = cfg.n();
    if (cell < 0 || cell >= n) throw InvalidInput("cell_indicator: cell out of range");
    Vector x = Vector::Zero(n);
    x[cell] = 1.0;
    return x;
}

Vector rss_measure(const Matrix& A, const Vector& x_true, double snr_db,
                   std::uint64_t seed, std::uint64_t t)
{
    detail::require_dim(x_true.size(), A.cols(), "rss_measure");
    if (std::isnan(snr_db)) throw InvalidParameter("rss_measure: snr_db is NaN");
    Vector y = A * x_true;
    const double var = noise_variance(y.squaredNorm() / static_cast<double>(y.size()), snr_db);
    if (var == 0.0) return y;
    auto rng = substream(seed, RngStream::noise, t);
    std::normal_distribution<double> gauss(0.0, std::sqrt(var));
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += gauss(rng);
    return y;
}

Vector RssModel::measurement(const Vector& y_dbm) const
{
    detail::require_dim(y_dbm.size(), row_offset.size(), "RssModel::measurement");
    return (y_dbm - row_offset) / scale;
}

Vector RssModel::working_truth(int cell) const
{
    if (cell < 0 || cell >= A.cols()) throw InvalidInput("RssModel::working_truth: cell out of range");
    Vector x = Vector::Zero(A.cols());
    x[cell] = column_norm[cell];
    return x;
}

RssModel rss_model(const RssConfig& cfg)
{
    cfg.validate();
    RssModel model;
    model.raw = rss_dictionary(cfg);
    model.row_offset = model.raw.rowwise().mean();
    Matrix centred = model.raw.colwise() - model.row_offset;
    model.column_norm = centred.colwise().norm();
    if ((model.column_norm.array() <= 0.0).any()) {
        throw NumericalError("rss_model: a dictionary column equals the row means");
    }
    centred = centred * model.column_norm.cwiseInverse().asDiagonal();
    const Matrix gram = centred * centred.transpose();
    model.scale = std::sqrt(Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly)
                                .eigenvalues()
                                .maxCoeff());
    model.A = centred / model.scale;
    return model;
}

int snap_to_cell(const Vector& x)
{
    if (x.size() == 0) throw InvalidInput("snap_to_cell: empty estimate");
    Eigen::Index j = 0;
    x.maxCoeff(&j);
    return static_cast<int>(j);
}

void SyntheticConfig::validate() const
{
    if (m < 1 || n < 1) throw InvalidParameter("SyntheticConfig: m and n must be >= 1");
    if (sparsity < 0 || sparsity > n) throw InvalidParameter("SyntheticConfig: sparsity out of range");
    if (rounds < 1) throw InvalidParameter("SyntheticConfig: rounds must be >= 1");
    if (!(period > 0.0) || drift < 0.0 || noise < 0.0) {
        throw InvalidParameter("SyntheticConfig: invalid drift, period or noise");
    }
    if (!(lambda > 0.0) || !(mu > 0.0)) {
        throw InvalidParameter("SyntheticConfig: lambda and mu must be positive");
    }
}

SyntheticStream synthetic_stream(const SyntheticConfig& cfg, std::uint64_t run)
{
    cfg.validate();
    auto rng = substream(cfg.seed, RngStream::synthetic, run);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.m));
    Matrix A0(cfg.m, cfg.n), A1(cfg.m, cfg.n);
    for (Eigen::Index j = 0; j < A0.cols(); ++j) {
        for (Eigen::Index i = 0; i < A0.rows(); ++i) A0(i, j) = scale * gauss(rng);
    }
    for (Eigen::Index j = 0; j < A1.cols(); ++j) {
        for (Eigen::Index i = 0; i < A1.rows(); ++i) A1(i, j) = scale * gauss(rng);
    }

    std::vector<int> index(static_cast<size_t>(cfg.n));
    std::iota(index.begin(), index.end(), 0);
    std::shuffle(index.begin(), index.end(), rng);
    Vector base = Vector::Zero(cfg.n), phase = Vector::Zero(cfg.n);
    for (int k = 0; k < cfg.sparsity; ++k) {
        const int i = index[static_cast<size_t>(k)];
        base[i] = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + unit(rng));
        phase[i] = 2.0 * std::numbers::pi * unit(rng);
    }

    SyntheticStream out;
    for (int t = 0; t < cfg.rounds; ++t) {
        const double angle = 2.0 * std::numbers::pi * t / cfg.period;
        Vector x = Vector::Zero(cfg.n);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x[i] = base[i] * (1.0 + 0.5 * std::sin(angle + phase[i]));
        }
        ElasticNetData d;
        d.A = A0 + cfg.drift * std::sin(angle) * A1;
        d.y = d.A * x;
        for (Eigen::Index i = 0; i < d.y.size(); ++i) d.y[i] += cfg.noise * gauss(rng);
        d.lambda = cfg.lambda;
        d.mu = cfg.mu;
        out.blocks.push_back(std::move(d));
        out.x_true.push_back(std::move(x));
    }
    return out;
}

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text)
{
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidInput("config: '" + key + "' expects a number, got '" + text + "'");
}

long long parse_integer(const std::string& key, const std::string& text)
{
    try {
        size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidInput("config: '" + key + "' expects an integer, got '" + text + "'");
}

std::uint64_t parse_seed(const std::string& key, const std::string& text)
{
    try {
        size_t used = 0;
        if (!text.empty() && text[0] != '-') {
            const unsigned long long v = std::stoull(text, &used);
            if (used == text.size()) return v;
        }
    } catch (const std::exception&) {
    }
    throw InvalidInput("config: '" + key + "' expects an unsigned 64-bit integer, got '" + text + "'");
}

class Reader {
 public:
  Reader(const ConfigMap& values, std::set<std::string>& used) : values_(values), used_(used) {}

  template <typename F>
  void take(const std::string& key, F&& assign)
  {
      const auto it = values_.find(key);
      if (it == values_.end()) return;
      used_.insert(key);
      assign(it->second);
  }

  void number(const std::string& key, double& out)
  {
      take(key, [&](const std::string& v) { out = parse_double(key, v); });
  }
  void integer(const std::string& key, int& out)
  {
      take(key, [&](const std::string& v) {
          const long long x = parse_integer(key, v);
          if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
              throw InvalidInput("config: '" + key + "' out of range");
          }
          out = static_cast<int>(x);
      });
  }
  void seed(const std::string& key, std::uint64_t& out)
  {
      take(key, [&](const std::string& v) { out = parse_seed(key, v); });
  }

 private:
  const ConfigMap& values_;
  std::set<std::string>& used_;
};

}  // namespace

ConfigMap parse_config(std::istream& is)
{
    ConfigMap out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw InvalidInput("config line " + std::to_string(lineno) + ": empty key or value");
        }
        if (!out.emplace(key, value).second) {
            throw InvalidInput("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

void apply_config(TvarxConfig& cfg, const ConfigMap& values, std::set<std::string>& used)
{
    Reader r(values, used);
    r.integer("P_true", cfg.P_true);
    r.integer("Q_true", cfg.Q_true);
    r.integer("P_hat", cfg.P_hat);
    r.integer("Q_hat", cfg.Q_hat);
    r.integer("m", cfg.m);
    r.number("snr_db", cfg.snr_db);
    r.number("horizon_s", cfg.horizon_s);
    r.number("sample_rate_hz", cfg.sample_rate_hz);
    r.number("lambda", cfg.lambda);
    r.number("mu", cfg.mu);
    r.seed("seed", cfg.seed);
    r.take("experiment", [&](const std::string& v) {
        if (v == "exp1") {
            cfg.experiment = Experiment::exp1;
        } else if (v == "exp2") {
            cfg.experiment = Experiment::exp2;
        } else {
            throw InvalidInput("config: experiment must be exp1 or exp2");
        }
    });
    r.take("exp2_time_unit", [&](const std::string& v) {
        if (v == "ms") {
            cfg.exp2_time_unit = TimeUnit::ms;
        } else if (v == "s") {
            cfg.exp2_time_unit = TimeUnit::s;
        } else {
            throw InvalidInput("config: exp2_time_unit must be ms or s");
        }
    });
}

void apply_config(RssConfig& cfg, const ConfigMap& values, std::set<std::string>& used)
{
    Reader r(values, used);
    r.number("area_m", cfg.area_m);
    r.number("cell_m", cfg.cell_m);
    r.integer("sensors", cfg.sensors);
    r.integer("meas_per_sensor", cfg.meas_per_sensor);
    r.number("snr_db", cfg.snr_db);
    r.number("comm_radius_m", cfg.comm_radius_m);
    r.number("round_ms", cfg.round_ms);
    r.integer("path_length_steps", cfg.path_length_steps);
    r.seed("seed", cfg.seed);
    r.number("p0_dbm", cfg.pathloss.p0_dbm);
    r.number("d0_m", cfg.pathloss.d0_m);
    r.number("exponent", cfg.pathloss.exponent);
    r.integer("training_draws", cfg.training_draws);
    r.number("training_sigma_db", cfg.training_sigma_db);
    r.number("lambda", cfg.lambda);
    r.number("mu", cfg.mu);
}

void apply_config(SyntheticConfig& cfg, const ConfigMap& values, std::set<std::string>& used)
{
    Reader r(values, used);
    r.integer("m", cfg.m);
    r.integer("n", cfg.n);
    r.integer("sparsity", cfg.sparsity);
    r.integer("rounds", cfg.rounds);
    r.number("drift", cfg.drift);
    r.number("period", cfg.period);
    r.number("noise", cfg.noise);
    r.number("lambda", cfg.lambda);
    r.number("mu", cfg.mu);
    r.seed("seed", cfg.seed);
}

std::string to_string(Experiment e)
{
    return e == Experiment::exp1 ? "exp1" : "exp2";
}

std::string to_string(TimeUnit u)
{
    return u == TimeUnit::ms ? "ms" : "s";
}

}  // namespace stvo
