#include "pinnss/experiment.hpp"

#include "pinnss/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace fs = std::filesystem;

namespace pinnss {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

double to_double(const std::string& v, const std::string& origin, int line) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    parse_fail(origin, line, "expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& v, const std::string& origin, int line) {
  try {
    std::size_t pos = 0;
    long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return n;
  } catch (const std::exception&) {
    parse_fail(origin, line, "expected an integer, got '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : v) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const char* kind_name(SamplerKind k) {
  return k == SamplerKind::classical ? "classical" : "stratified";
}

std::vector<SamplerKind> kinds_of(SamplerChoice choice) {
  switch (choice) {
    case SamplerChoice::classical: return {SamplerKind::classical};
    case SamplerChoice::stratified: return {SamplerKind::stratified};
    case SamplerChoice::both: return {SamplerKind::classical, SamplerKind::stratified};
  }
  throw std::logic_error("kinds_of: bad choice");
}

void write_loss_svg(const TrainMetrics& m, const std::string& path) {
  SvgChart chart;
  chart.title = "training loss";
  chart.x_label = "epoch";
  chart.y_label = "loss";
  chart.log_y = true;
  SvgSeries total{"total", "#1f77b4", false, {}, {}};
  SvgSeries ic{"ic", "#2ca02c", false, {}, {}};
  SvgSeries pde{"pde", "#d62728", false, {}, {}};
  for (const auto& r : m.records) {
    double e = r.epoch;
    total.x.push_back(e);
    total.y.push_back(r.loss.total);
    ic.x.push_back(e);
    ic.y.push_back(r.loss.ic);
    pde.x.push_back(e);
    pde.y.push_back(r.loss.pde);
  }
  chart.series = {total, ic, pde};
  write_svg_chart(chart, path);
}

void write_mse_svg(const TrainMetrics& m, const std::string& path) {
  SvgChart chart;
  chart.title = "test-grid mean square error";
  chart.x_label = "epoch";
  chart.y_label = "mse";
  chart.log_y = true;
  SvgSeries mse{"mse", "#9467bd", false, {}, {}};
  for (const auto& r : m.records)
    if (r.mse >= 0.0) {
      mse.x.push_back(r.epoch);
      mse.y.push_back(r.mse);
    }
  if (mse.x.empty()) return; // nothing evaluated; skip the plot
  chart.series = {mse};
  write_svg_chart(chart, path);
}

void write_sample_sizes_svg(const TrainMetrics& m, const std::string& path) {
  SvgChart chart;
  chart.title = "sample sizes";
  chart.x_label = "epoch";
  chart.y_label = "points";
  SvgSeries ic{"ic", "#2ca02c", false, {}, {}};
  SvgSeries pde{"pde", "#d62728", false, {}, {}};
  for (const auto& r : m.records) {
    ic.x.push_back(r.epoch);
    ic.y.push_back(r.n_ic);
    pde.x.push_back(r.epoch);
    pde.y.push_back(r.n_pde);
  }
  chart.series = {ic, pde};
  write_svg_chart(chart, path);
}

void write_samples_svg(const SampleSet& s, const std::string& path) {
  SvgChart chart;
  chart.title = "collocation points";
  chart.x_label = "x";
  chart.y_label = "t";
  auto series = [](const char* label, const char* color, const std::vector<Point>& pts) {
    SvgSeries sr{label, color, true, {}, {}};
    for (const auto& p : pts) {
      sr.x.push_back(p.x);
      sr.y.push_back(p.t);
    }
    return sr;
  };
  chart.series = {series("pde", "#1f77b4", s.interior), series("ic", "#d62728", s.ic),
                  series("lbc", "#2ca02c", s.lbc), series("rbc", "#ff7f0e", s.rbc)};
  write_svg_chart(chart, path);
}

} // namespace

void ExperimentConfig::validate() const {
  shape().validate();
  domain.validate();
  if (stage1_epochs < 0 || stage2_epochs < 0)
    throw std::invalid_argument("ExperimentConfig: epoch counts must be >= 0");
  if (seeds.empty()) throw std::invalid_argument("ExperimentConfig: at least one seed required");
  if (out_dir.empty()) throw std::invalid_argument("ExperimentConfig: out_dir must be set");
  if (checkpoint_stride < 0)
    throw std::invalid_argument("ExperimentConfig: checkpoint_stride must be >= 0");
  if (threads < 1) throw std::invalid_argument("ExperimentConfig: threads must be >= 1");
  resolved_train(SamplerKind::stratified, seeds.front()).validate();
  make_problem(); // throws on an unknown problem name
}

TrainConfig ExperimentConfig::resolved_train(SamplerKind kind, std::uint64_t seed) const {
  TrainConfig tc = train;
  tc.stage1_epochs = stage1_epochs;
  tc.stage2_epochs = stage2_epochs;
  tc.sampler_kind = kind;
  tc.sampler.seed = seed;
  return tc;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  int hidden_layers = -1;
  std::vector<int> neurons;
  long epochs = -1;
  bool has_stage1 = false, has_stage2 = false;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string s = trim(raw);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) parse_fail(origin, line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty()) parse_fail(origin, line, "empty key or value");

    if (key == "problem") {
      cfg.problem = val;
    } else if (key == "speed") {
      cfg.speed = to_double(val, origin, line);
    } else if (key == "x_lo") {
      cfg.domain.x_lo = to_double(val, origin, line);
    } else if (key == "x_hi") {
      cfg.domain.x_hi = to_double(val, origin, line);
    } else if (key == "t_lo") {
      cfg.domain.t_lo = to_double(val, origin, line);
    } else if (key == "t_hi") {
      cfg.domain.t_hi = to_double(val, origin, line);
    } else if (key == "hidden_layers") {
      hidden_layers = static_cast<int>(to_long(val, origin, line));
      if (hidden_layers < 1) parse_fail(origin, line, "hidden_layers must be >= 1");
    } else if (key == "neurons") {
      neurons.clear();
      for (const auto& part : split_list(val)) {
        int n = static_cast<int>(to_long(part, origin, line));
        if (n < 1) parse_fail(origin, line, "neuron counts must be >= 1");
        neurons.push_back(n);
      }
      if (neurons.empty()) parse_fail(origin, line, "neurons needs at least one value");
    } else if (key == "epochs") {
      epochs = to_long(val, origin, line);
      if (epochs < 0) parse_fail(origin, line, "epochs must be >= 0");
    } else if (key == "stage1_epochs") {
      cfg.stage1_epochs = static_cast<int>(to_long(val, origin, line));
      has_stage1 = true;
    } else if (key == "stage2_epochs") {
      cfg.stage2_epochs = static_cast<int>(to_long(val, origin, line));
      has_stage2 = true;
    } else if (key == "eta_high") {
      cfg.train.eta_high = to_double(val, origin, line);
    } else if (key == "eta_low") {
      cfg.train.eta_low = to_double(val, origin, line);
    } else if (key == "grad_threshold") {
      cfg.train.grad_threshold = to_double(val, origin, line);
    } else if (key == "density") {
      cfg.train.sampler.density = to_double(val, origin, line);
    } else if (key == "epsilon") {
      cfg.train.sampler.epsilon = to_double(val, origin, line);
    } else if (key == "n_slabs") {
      cfg.train.sampler.n_slabs = static_cast<int>(to_long(val, origin, line));
    } else if (key == "derivative_order") {
      cfg.train.sampler.derivative_order = static_cast<int>(to_long(val, origin, line));
    } else if (key == "radius_mode") {
      if (val == "lemma")
        cfg.train.sampler.radius_mode = RadiusMode::lemma;
      else if (val == "literal")
        cfg.train.sampler.radius_mode = RadiusMode::literal;
      else
        parse_fail(origin, line, "radius_mode must be 'lemma' or 'literal'");
    } else if (key == "resample_every") {
      cfg.train.resample_every = static_cast<int>(to_long(val, origin, line));
    } else if (key == "eval_stride") {
      cfg.train.eval_stride = static_cast<int>(to_long(val, origin, line));
    } else if (key == "eval_nx") {
      cfg.train.eval_nx = static_cast<int>(to_long(val, origin, line));
    } else if (key == "eval_nt") {
      cfg.train.eval_nt = static_cast<int>(to_long(val, origin, line));
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& part : split_list(val))
        cfg.seeds.push_back(static_cast<std::uint64_t>(to_long(part, origin, line)));
      if (cfg.seeds.empty()) parse_fail(origin, line, "seeds needs at least one value");
    } else if (key == "sampler") {
      if (val == "classical")
        cfg.sampler_choice = SamplerChoice::classical;
      else if (val == "stratified")
        cfg.sampler_choice = SamplerChoice::stratified;
      else if (val == "both")
        cfg.sampler_choice = SamplerChoice::both;
      else
        parse_fail(origin, line, "sampler must be 'classical', 'stratified' or 'both'");
    } else if (key == "out") {
      cfg.out_dir = val;
    } else if (key == "checkpoint_stride") {
      cfg.checkpoint_stride = static_cast<int>(to_long(val, origin, line));
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(to_long(val, origin, line));
    } else {
      parse_fail(origin, line, "unknown key '" + key + "'");
    }
  }

  if (!neurons.empty()) {
    if (neurons.size() == 1 && hidden_layers > 0)
      cfg.neurons.assign(static_cast<std::size_t>(hidden_layers), neurons[0]);
    else
      cfg.neurons = neurons;
  } else if (hidden_layers > 0) {
    cfg.neurons.assign(static_cast<std::size_t>(hidden_layers), 20);
  }
  if (hidden_layers > 0 && neurons.size() > 1 &&
      static_cast<int>(neurons.size()) != hidden_layers)
    throw std::runtime_error(origin + ": hidden_layers disagrees with the neurons list length");

  if (epochs >= 0 && !(has_stage1 || has_stage2)) {
    // Default split: one fifth of the budget on the initial condition.
    cfg.stage1_epochs = static_cast<int>(epochs / 5);
    cfg.stage2_epochs = static_cast<int>(epochs) - cfg.stage1_epochs;
  } else if (epochs >= 0) {
    throw std::runtime_error(origin + ": give either epochs or stage1/stage2_epochs, not both");
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "problem = " << cfg.problem << "\n";
  if (cfg.problem == "advection") out << "speed = " << cfg.speed << "\n";
  out << "x_lo = " << cfg.domain.x_lo << "\nx_hi = " << cfg.domain.x_hi
      << "\nt_lo = " << cfg.domain.t_lo << "\nt_hi = " << cfg.domain.t_hi << "\n";
  out << "neurons =";
  for (int n : cfg.neurons) out << ' ' << n;
  out << "\nstage1_epochs = " << cfg.stage1_epochs << "\nstage2_epochs = " << cfg.stage2_epochs
      << "\n";
  out << "eta_high = " << cfg.train.eta_high << "\neta_low = " << cfg.train.eta_low
      << "\ngrad_threshold = " << cfg.train.grad_threshold << "\n";
  out << "density = " << cfg.train.sampler.density << "\nepsilon = " << cfg.train.sampler.epsilon
      << "\nn_slabs = " << cfg.train.sampler.n_slabs
      << "\nderivative_order = " << cfg.train.sampler.derivative_order << "\nradius_mode = "
      << (cfg.train.sampler.radius_mode == RadiusMode::lemma ? "lemma" : "literal") << "\n";
  out << "resample_every = " << cfg.train.resample_every
      << "\neval_stride = " << cfg.train.eval_stride << "\neval_nx = " << cfg.train.eval_nx
      << "\neval_nt = " << cfg.train.eval_nt << "\n";
  out << "seeds =";
  for (auto s : cfg.seeds) out << ' ' << s;
  out << "\nsampler = "
      << (cfg.sampler_choice == SamplerChoice::both
              ? "both"
              : cfg.sampler_choice == SamplerChoice::classical ? "classical" : "stratified")
      << "\n";
  out << "out = " << cfg.out_dir << "\ncheckpoint_stride = " << cfg.checkpoint_stride
      << "\nthreads = " << cfg.threads << "\n";
  return out.str();
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
  config.validate();
  PdeProblem problem = config.make_problem();
  fs::create_directories(config.out_dir);
  {
    std::ofstream eff(fs::path(config.out_dir) / "effective_config.txt");
    if (!eff) throw std::runtime_error("cannot write effective config under " + config.out_dir);
    eff << format_config(config);
  }

  std::vector<RunResult> results;
  for (SamplerKind kind : kinds_of(config.sampler_choice)) {
    for (std::uint64_t seed : config.seeds) {
      fs::path dir = fs::path(config.out_dir) / kind_name(kind) / ("seed" + std::to_string(seed));
      fs::create_directories(dir);

      NetworkParams params = init_params(config.shape(), seed);
      TrainConfig tc = config.resolved_train(kind, seed);
      std::string ckpt_path = (dir / "checkpoint.txt").string();
      if (config.checkpoint_stride > 0) {
        int stride = config.checkpoint_stride;
        tc.on_epoch = [stride, ckpt_path](int epoch, const NetworkParams& p) {
          if (epoch % stride == 0) save_checkpoint(p, ckpt_path);
        };
      }

      auto t0 = std::chrono::steady_clock::now();
      TrainMetrics metrics = train(params, problem, tc);
      auto t1 = std::chrono::steady_clock::now();

      save_checkpoint(params, ckpt_path);
      write_metrics_csv(metrics, (dir / "metrics.csv").string());
      write_loss_svg(metrics, (dir / "loss.svg").string());
      write_mse_svg(metrics, (dir / "mse.svg").string());
      write_sample_sizes_svg(metrics, (dir / "sample_sizes.svg").string());
      {
        // Redraw a representative collocation set from the trained network.
        std::mt19937_64 rng(seed);
        SampleSet sample = kind == SamplerKind::stratified
                               ? sample_stratified(params, problem.domain, tc.sampler, rng)
                               : sample_classical(problem.domain, tc.sampler.density, rng);
        write_samples_svg(sample, (dir / "samples.svg").string());
        write_sample_csv(sample, (dir / "samples.csv").string());
      }

      RunResult r;
      r.kind = kind_name(kind);
      r.seed = seed;
      r.best_total_loss = metrics.best_total_loss;
      r.final_total_loss =
          metrics.records.empty() ? 0.0 : metrics.records.back().loss.total;
      r.final_mse = metrics.final_mse;
      r.seconds = std::chrono::duration<double>(t1 - t0).count();
      r.dir = dir.string();
      results.push_back(r);

      std::ofstream summary(dir / "summary.txt");
      summary.precision(17);
      summary << "problem: " << problem.name << "\nsampler: " << r.kind << "\nseed: " << seed
              << "\nparameters: " << params.param_count()
              << "\nepochs: " << (tc.stage1_epochs + tc.stage2_epochs)
              << "\nbest_total_loss: " << r.best_total_loss
              << "\nfinal_total_loss: " << r.final_total_loss << "\nfinal_mse: " << r.final_mse
              << "\nwall_seconds: " << r.seconds << "\n";

      std::ofstream res(dir / "result.txt");
      res.precision(17);
      res << "kind = " << r.kind << "\nseed = " << seed
          << "\nbest_total_loss = " << r.best_total_loss
          << "\nfinal_total_loss = " << r.final_total_loss << "\nfinal_mse = " << r.final_mse
          << "\nseconds = " << r.seconds << "\n";
    }
  }
  return results;
}

void dump_samples(const ExperimentConfig& config) {
  config.validate();
  PdeProblem problem = config.make_problem();
  for (SamplerKind kind : kinds_of(config.sampler_choice)) {
    fs::path dir = fs::path(config.out_dir) / kind_name(kind);
    fs::create_directories(dir);
    std::uint64_t seed = config.seeds.front();
    NetworkParams params = init_params(config.shape(), seed);
    SamplerConfig sc = config.train.sampler;
    sc.seed = seed;
    SampleSet sample;
    if (kind == SamplerKind::stratified) {
      sample = sample_stratified(params, problem.domain, sc);
      write_zones_csv(build_pde_zones(params, problem.domain, sc), (dir / "zones.csv").string());
    } else {
      sample = sample_classical(problem.domain, sc);
    }
    write_sample_csv(sample, (dir / "samples.csv").string());
    write_samples_svg(sample, (dir / "samples.svg").string());
  }
}

std::string make_table(const std::vector<RunResult>& runs) {
  if (runs.empty()) throw std::invalid_argument("make_table: no runs");
  std::map<std::string, std::vector<const RunResult*>> by_kind;
  for (const auto& r : runs) by_kind[r.kind].push_back(&r);

  std::ostringstream out;
  out << "sampler      seeds  mse_median    mse_min       mse_max       "
         "loss_median   loss_min      loss_max\n";
  for (const auto& [kind, group] : by_kind) {
    std::vector<double> mse, loss;
    for (const auto* r : group) {
      if (r->final_mse >= 0.0) mse.push_back(r->final_mse);
      loss.push_back(r->best_total_loss);
    }
    auto cell = [&](double v) {
      std::ostringstream c;
      c.precision(6);
      c << std::scientific << v;
      std::string s = c.str();
      s.resize(14, ' ');
      return s;
    };
    out << kind << std::string(kind.size() < 13 ? 13 - kind.size() : 1, ' ');
    out << group.size() << "      ";
    if (mse.empty())
      out << cell(-1) << cell(-1) << cell(-1);
    else
      out << cell(median(mse)) << cell(*std::min_element(mse.begin(), mse.end()))
          << cell(*std::max_element(mse.begin(), mse.end()));
    out << cell(median(loss)) << cell(*std::min_element(loss.begin(), loss.end()))
        << cell(*std::max_element(loss.begin(), loss.end())) << "\n";
  }
  return out.str();
}

std::vector<RunResult> load_results(const std::string& out_dir) {
  if (!fs::exists(out_dir)) throw std::runtime_error("no such directory: " + out_dir);
  std::vector<RunResult> results;
  for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
    if (!entry.is_regular_file() || entry.path().filename() != "result.txt") continue;
    std::ifstream in(entry.path());
    RunResult r;
    r.dir = entry.path().parent_path().string();
    std::string line;
    while (std::getline(in, line)) {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = trim(line.substr(0, eq));
      std::string val = trim(line.substr(eq + 1));
      if (key == "kind")
        r.kind = val;
      else if (key == "seed")
        r.seed = static_cast<std::uint64_t>(std::stoull(val));
      else if (key == "best_total_loss")
        r.best_total_loss = std::stod(val);
      else if (key == "final_total_loss")
        r.final_total_loss = std::stod(val);
      else if (key == "final_mse")
        r.final_mse = std::stod(val);
      else if (key == "seconds")
        r.seconds = std::stod(val);
    }
    results.push_back(r);
  }
  std::sort(results.begin(), results.end(), [](const RunResult& a, const RunResult& b) {
    return std::tie(a.kind, a.seed) < std::tie(b.kind, b.seed);
  });
  return results;
}

} // namespace pinnss
