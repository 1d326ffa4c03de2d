#include "supalign/cli.hpp"

#include <chrono>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "supalign/alignment.hpp"
#include "supalign/classify.hpp"
#include "supalign/csv.hpp"
#include "supalign/dataset.hpp"
#include "supalign/errors.hpp"
#include "supalign/metrics.hpp"
#include "supalign/supervision.hpp"

namespace supalign::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::kIo, "cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), ErrorKind::kIo, "cannot write " + path.string());
  f << text;
  require(static_cast<bool>(f), ErrorKind::kIo, "write failed: " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  require(ec == std::errc() && ptr == end && std::isfinite(v), ErrorKind::kInvalidArgument,
          what + ": '" + s + "' is not a finite number");
  return v;
}

std::optional<double> resolve_gamma(const std::string& token, std::size_t t) {
  if (token == "auto") return std::nullopt;
  return parse_grid_value(token, t);
}

std::optional<std::size_t> resolve_k(const std::string& token) {
  if (token == "auto") return std::nullopt;
  std::size_t v = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  require(ec == std::errc() && ptr == end && v >= 1, ErrorKind::kInvalidArgument,
          "--k: expected a positive integer or 'auto', got '" + token + "'");
  return v;
}

ShaRInit parse_init(const std::string& s) {
  if (s == "kernel_svd") return ShaRInit::kKernelSvd;
  if (s == "sha") return ShaRInit::kSha;
  fail(ErrorKind::kInvalidArgument, "--init: expected kernel_svd or sha, got '" + s + "'");
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  require(!names.empty(), ErrorKind::kInvalidArgument, "method list is empty");
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

std::size_t labeled_t(const Dataset& d) { return d.labels.front().labeled_count(); }

Hyperparams hyperparams(const RunConfig& cfg, const Dataset& d) {
  Hyperparams hp;
  hp.fit.epsilon = cfg.epsilon;
  hp.fit.k = resolve_k(cfg.k);
  hp.fit.iterations = cfg.iterations;
  hp.fit.init = parse_init(cfg.init);
  hp.gamma = resolve_gamma(cfg.gamma, labeled_t(d));
  hp.ridge = cfg.ridge;
  return hp;
}

struct Input {
  Dataset dataset;
  std::vector<std::string> advisories;
};

Input load_input(const RunConfig& cfg, bool allow_synth) {
  Dataset raw;
  if (!cfg.dataset.empty()) {
    raw = load_dataset(cfg.dataset, LoadOptions{cfg.strict});
  } else {
    require(allow_synth, ErrorKind::kInvalidArgument, "--dataset is required");
    SynthConfig sc = cfg.synth;
    sc.seed = cfg.seed;
    raw = generate(sc).dataset;
  }
  auto norm = normalize(raw);
  return {std::move(norm.dataset), std::move(norm.advisories)};
}

json stat_json(const CorrelationStat& s) {
  if (!s.defined) return {{"mean", nullptr}, {"std", nullptr}, {"pairs", s.pairs}};
  return {{"mean", s.mean}, {"std", s.std}, {"pairs", s.pairs}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_cell(const std::optional<double>& v) {
  return v ? csv::format_number(*v) : "NA";
}

std::string stat_cell(const CorrelationStat& s, bool std_dev) {
  if (!s.defined) return "NA";
  return csv::format_number(std_dev ? s.std : s.mean);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<Matrix> mapped_matrices(const AlignmentModel& model, const Dataset& d) {
  std::vector<Matrix> z;
  for (auto& m : map_dataset(model, d)) z.push_back(std::move(m.z));
  return z;
}

CorrelationReport correlate(const Dataset& d, Method method, const Hyperparams& hp,
                            bool include_rest, std::int64_t* fit_ns = nullptr,
                            std::int64_t* map_ns = nullptr) {
  auto start = Clock::now();
  const AlignmentModel model = fit_model(method, d, hp.gamma, hp.fit);
  if (fit_ns) *fit_ns = elapsed_ns(start);
  start = Clock::now();
  const auto z = mapped_matrices(model, d);
  if (map_ns) *map_ns = elapsed_ns(start);
  auto report = correlation_report(z, d.labels.front(), include_rest);
  report.advisories.insert(report.advisories.begin(), model.report.advisories.begin(),
                           model.report.advisories.end());
  return report;
}

void cmd_synth(const RunConfig& cfg) {
  SynthConfig sc = cfg.synth;
  sc.seed = cfg.seed;
  const auto result = generate(sc);
  save_dataset(result.dataset, cfg.out);
  save_ground_truth(sc, result.truth, cfg.out);
}

void cmd_align(const RunConfig& cfg) {
  require(cfg.methods.size() == 1, ErrorKind::kInvalidArgument, "align takes exactly one method");
  const Method method = parse_method(cfg.methods.front());
  Input in = load_input(cfg, false);
  const Hyperparams hp = hyperparams(cfg, in.dataset);

  auto start = Clock::now();
  const AlignmentModel model = fit_model(method, in.dataset, hp.gamma, hp.fit);
  const std::int64_t fit_ns = elapsed_ns(start);
  start = Clock::now();
  const auto mapped = map_dataset(model, in.dataset);
  const std::int64_t map_ns = elapsed_ns(start);

  save_model(model, cfg.out);
  for (const auto& m : mapped) csv::write_matrix(fs::path(cfg.out) / ("z_" + m.subject_id + ".csv"), m.z);
  std::vector<std::string> advisories = in.advisories;
  advisories.insert(advisories.end(), model.report.advisories.begin(),
                    model.report.advisories.end());
  write_json(fs::path(cfg.out) / "advisories.json", advisories);
  write_json(fs::path(cfg.out) / "timings.json", {{"fit_ns", fit_ns}, {"map_ns", map_ns}});
}

void cmd_corr(const RunConfig& cfg) {
  const auto methods = parse_methods(cfg.methods);
  Input in = load_input(cfg, false);
  const Hyperparams hp = hyperparams(cfg, in.dataset);

  std::string table = "method,metric,mean,std,pairs\n";
  json timings = json::object();
  for (Method m : methods) {
    std::int64_t fit_ns = 0, map_ns = 0;
    CorrelationReport r = correlate(in.dataset, m, hp, cfg.include_rest, &fit_ns, &map_ns);
    r.advisories.insert(r.advisories.begin(), in.advisories.begin(), in.advisories.end());
    const std::string name(to_string(m));
    write_json(fs::path(cfg.out) / ("corr_" + name + ".json"),
               {{"method", name},
                {"rho1", stat_json(r.rho1)},
                {"rho2", stat_json(r.rho2)},
                {"rho3", stat_json(r.rho3)},
                {"rho4", stat_json(r.rho4)},
                {"advisories", r.advisories}});
    const std::pair<const char*, const CorrelationStat*> rows[] = {
        {"rho1", &r.rho1}, {"rho2", &r.rho2}, {"rho3", &r.rho3}, {"rho4", &r.rho4}};
    for (const auto& [metric, stat] : rows) {
      table += name + "," + metric + "," + stat_cell(*stat, false) + "," + stat_cell(*stat, true) +
               "," + std::to_string(stat->pairs) + "\n";
    }
    timings[name] = {{"fit_ns", fit_ns}, {"map_ns", map_ns}};
  }
  write_text(fs::path(cfg.out) / "corr.csv", table);
  write_json(fs::path(cfg.out) / "timings.json", timings);
}

void cmd_loso(const RunConfig& cfg) {
  const auto methods = parse_methods(cfg.methods);
  Input in = load_input(cfg, false);
  const Hyperparams hp = hyperparams(cfg, in.dataset);

  std::string table = "dataset,method,seed,accuracy_mean,accuracy_std,auc_mean,auc_std\n";
  json timings = json::object();
  for (Method m : methods) {
    const LosoReport r = run_loso(in.dataset, m, hp);
    const std::string name(to_string(m));
    json folds = json::array();
    json fold_timings = json::array();
    for (const auto& f : r.folds) {
      folds.push_back({{"held_out", f.held_out},
                       {"subject", f.subject_id},
                       {"accuracy", f.accuracy},
                       {"auc", optional_json(f.auc)},
                       {"fit_input_digest", hex64(f.fit_digest)},
                       {"train_rows", f.train_rows},
                       {"test_rows", f.test_rows},
                       {"advisories", f.advisories}});
      fold_timings.push_back({{"subject", f.subject_id},
                              {"fit_ns", f.timings.fit_ns},
                              {"map_ns", f.timings.map_ns},
                              {"train_ns", f.timings.train_ns},
                              {"score_ns", f.timings.score_ns}});
    }
    write_json(fs::path(cfg.out) / ("loso_" + name + ".json"),
               {{"method", name},
                {"folds", folds},
                {"accuracy", {{"mean", r.accuracy_mean}, {"std", r.accuracy_std}}},
                {"auc", {{"mean", optional_json(r.auc_mean)}, {"std", optional_json(r.auc_std)}}},
                {"advisories", in.advisories}});
    table += cfg.dataset + "," + name + "," + std::to_string(cfg.seed) + "," +
             csv::format_number(r.accuracy_mean) + "," + csv::format_number(r.accuracy_std) + "," +
             optional_cell(r.auc_mean) + "," + optional_cell(r.auc_std) + "\n";
    timings[name] = fold_timings;
  }
  write_text(fs::path(cfg.out) / "loso.csv", table);
  write_json(fs::path(cfg.out) / "timings.json", timings);
}

class SweepTable {
 public:
  void add(const std::string& param, const std::string& method, const std::string& metric,
           const std::string& value) {
    text_ += kind_ + "," + param + "," + method + "," + metric + "," + value + "\n";
  }
  void add(const std::string& param, const std::string& method, const std::string& metric,
           double value) {
    add(param, method, metric, csv::format_number(value));
  }
  void add_corr(const std::string& param, const std::string& method, const CorrelationReport& r) {
    add(param, method, "rho1", stat_cell(r.rho1, false));
    add(param, method, "rho2", stat_cell(r.rho2, false));
    add(param, method, "rho3", stat_cell(r.rho3, false));
    add(param, method, "rho4", stat_cell(r.rho4, false));
  }
  void add_loso(const std::string& param, const std::string& method, const LosoReport& r) {
    add(param, method, "accuracy", r.accuracy_mean);
    add(param, method, "auc", optional_cell(r.auc_mean));
  }
  explicit SweepTable(std::string kind) : kind_(std::move(kind)) {}
  const std::string& text() const { return text_; }

 private:
  std::string kind_;
  std::string text_ = "sweep,param,method,metric,value\n";
};

void cmd_sweep(const RunConfig& cfg) {
  const SweepSpec& sw = cfg.sweep;
  require(!sw.grid.empty(), ErrorKind::kInvalidArgument, "sweep: grid is empty");
  SweepTable table(sw.kind);

  if (sw.kind == "det") {
    std::size_t t = sw.timepoints;
    if (t == 0) {
      if (!cfg.dataset.empty()) {
        t = labeled_t(load_dataset(cfg.dataset, LoadOptions{cfg.strict}));
      } else {
        SynthConfig sc = cfg.synth;
        validate_config(sc);
        t = sc.timepoints();
      }
    }
    for (const auto& token : sw.grid) {
      const double g = parse_grid_value(token, t);
      table.add(csv::format_number(g), "", "det_h", det_h(t, g));
    }
    write_text(fs::path(cfg.out) / "sweep.csv", table.text());
    return;
  }

  const auto methods = parse_methods(cfg.methods);
  if (sw.kind == "noise") {
    for (const auto& token : sw.grid) {
      const double sigma = parse_grid_value(token, 1);
      RunConfig point = cfg;
      point.dataset.clear();
      point.synth.noise_sigma = sigma;
      Input in = load_input(point, true);
      const Hyperparams hp = hyperparams(cfg, in.dataset);
      for (Method m : methods) {
        const std::string name(to_string(m));
        table.add_corr(csv::format_number(sigma), name,
                       correlate(in.dataset, m, hp, cfg.include_rest));
        table.add_loso(csv::format_number(sigma), name, run_loso(in.dataset, m, hp));
      }
    }
    write_text(fs::path(cfg.out) / "sweep.csv", table.text());
    return;
  }

  Input in = load_input(cfg, true);
  if (sw.kind == "gamma") {
    const std::size_t t = labeled_t(in.dataset);
    for (const auto& token : sw.grid) {
      const double g = parse_grid_value(token, t);
      const std::string param = csv::format_number(g);
      table.add(param, "", "det_h", det_h(t, g));
      RunConfig point = cfg;
      point.gamma = param;
      const Hyperparams hp = hyperparams(point, in.dataset);
      for (Method m : methods) {
        const std::string name(to_string(m));
        table.add_corr(param, name, correlate(in.dataset, m, hp, cfg.include_rest));
        table.add_loso(param, name, run_loso(in.dataset, m, hp));
      }
    }
  } else if (sw.kind == "tr") {
    for (const auto& token : sw.grid) {
      const double count = parse_grid_value(token, 1);
      require(count >= 2 && count == std::floor(count), ErrorKind::kInvalidArgument,
              "sweep tr: grid values must be integers ≥ 2, got '" + token + "'");
      const Dataset cut = truncate_timepoints(in.dataset, static_cast<std::size_t>(count));
      const Hyperparams hp = hyperparams(cfg, cut);
      const std::string param = std::to_string(static_cast<std::size_t>(count));
      for (Method m : methods) table.add_loso(param, std::string(to_string(m)), run_loso(cut, m, hp));
    }
  } else {
    fail(ErrorKind::kInvalidArgument,
         "sweep: unknown kind '" + sw.kind + "' (expected gamma, det, tr or noise)");
  }
  write_text(fs::path(cfg.out) / "sweep.csv", table.text());
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kIo: return kExitUsage;
    case ErrorKind::kSchema:
    case ErrorKind::kInvalidData: return kExitData;
    case ErrorKind::kSingularMatrix:
    case ErrorKind::kUndefinedCorrelation: return kExitNumeric;
  }
  return kExitInternal;
}

void report_error(std::ostream& err, std::string_view kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

double parse_grid_value(const std::string& token, std::size_t t) {
  const auto slash = token.find('/');
  if (slash == std::string::npos) return parse_double(token, "grid value");
  // a/T, a/bT and a/(bT)
  std::string denom = token.substr(slash + 1);
  if (denom.size() >= 2 && denom.front() == '(' && denom.back() == ')') {
    denom = denom.substr(1, denom.size() - 2);
  }
  require(!denom.empty() && denom.back() == 'T', ErrorKind::kInvalidArgument,
          "grid value '" + token + "': expected a/T, a/bT or a/(bT)");
  denom.pop_back();
  require(t >= 1, ErrorKind::kInvalidArgument, "grid value '" + token + "': T is unknown");
  const std::string num = token.substr(0, slash);
  const double a = num.empty() ? 1.0 : parse_double(num, "grid value");
  const double b = denom.empty() ? 1.0 : parse_double(denom, "grid value");
  require(b != 0.0, ErrorKind::kInvalidArgument, "grid value '" + token + "': zero denominator");
  return a / (b * static_cast<double>(t));
}

json to_json(const RunConfig& cfg) {
  const SynthConfig& s = cfg.synth;
  return {{"command", cfg.command},
          {"dataset", cfg.dataset},
          {"methods", cfg.methods},
          {"epsilon", cfg.epsilon},
          {"gamma", cfg.gamma},
          {"k", cfg.k},
          {"iterations", cfg.iterations},
          {"init", cfg.init},
          {"ridge", cfg.ridge},
          {"include_rest", cfg.include_rest},
          {"strict", cfg.strict},
          {"seed", cfg.seed},
          {"out", cfg.out},
          {"synth",
           {{"subjects", s.subjects},
            {"classes", s.classes},
            {"instances_per_class", s.instances_per_class},
            {"instance_length", s.instance_length},
            {"voxels", s.voxels},
            {"noise_sigma", s.noise_sigma},
            {"rotation", std::string(to_string(s.rotation))}}},
          {"sweep",
           {{"kind", cfg.sweep.kind},
            {"grid", cfg.sweep.grid},
            {"timepoints", cfg.sweep.timepoints}}}};
}

RunConfig run_config_from_json(const json& doc) {
  RunConfig cfg;
  try {
    cfg.command = doc.at("command").get<std::string>();
    cfg.dataset = doc.at("dataset").get<std::string>();
    cfg.methods = doc.at("methods").get<std::vector<std::string>>();
    cfg.epsilon = doc.at("epsilon").get<double>();
    cfg.gamma = doc.at("gamma").get<std::string>();
    cfg.k = doc.at("k").get<std::string>();
    cfg.iterations = doc.at("iterations").get<std::size_t>();
    cfg.init = doc.at("init").get<std::string>();
    cfg.ridge = doc.at("ridge").get<double>();
    cfg.include_rest = doc.at("include_rest").get<bool>();
    cfg.strict = doc.at("strict").get<bool>();
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    cfg.out = doc.at("out").get<std::string>();
    const auto& s = doc.at("synth");
    cfg.synth.subjects = s.at("subjects").get<std::size_t>();
    cfg.synth.classes = s.at("classes").get<std::size_t>();
    cfg.synth.instances_per_class = s.at("instances_per_class").get<std::size_t>();
    cfg.synth.instance_length = s.at("instance_length").get<std::size_t>();
    cfg.synth.voxels = s.at("voxels").get<std::size_t>();
    cfg.synth.noise_sigma = s.at("noise_sigma").get<double>();
    cfg.synth.rotation = parse_rotation(s.at("rotation").get<std::string>());
    const auto& sw = doc.at("sweep");
    cfg.sweep.kind = sw.at("kind").get<std::string>();
    cfg.sweep.grid = sw.at("grid").get<std::vector<std::string>>();
    cfg.sweep.timepoints = sw.at("timepoints").get<std::size_t>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string("run config: ") + e.what());
  }
  return cfg;
}

void execute(const RunConfig& cfg) {
  require(!cfg.out.empty(), ErrorKind::kInvalidArgument, "--out is required");
  require(std::isfinite(cfg.epsilon) && cfg.epsilon >= 0.0, ErrorKind::kInvalidArgument,
          "--epsilon must be finite and non-negative");
  require(std::isfinite(cfg.ridge) && cfg.ridge > 0.0, ErrorKind::kInvalidArgument,
          "--ridge must be positive");
  parse_init(cfg.init);
  resolve_k(cfg.k);
  if (cfg.command == "sweep" && cfg.sweep.kind != "det") parse_methods(cfg.methods);
  if (cfg.command == "corr" || cfg.command == "loso") parse_methods(cfg.methods);
  if (cfg.command != "synth" && cfg.command != "sweep") {
    require(!cfg.dataset.empty(), ErrorKind::kInvalidArgument, "--dataset is required");
  }
  if (!cfg.dataset.empty()) {
    require(fs::exists(cfg.dataset), ErrorKind::kIo, "manifest not found: " + cfg.dataset);
  }

  ensure_dir(cfg.out);
  write_json(fs::path(cfg.out) / "run_config.json", to_json(cfg));
  if (cfg.command == "synth") return cmd_synth(cfg);
  if (cfg.command == "align") return cmd_align(cfg);
  if (cfg.command == "corr") return cmd_corr(cfg);
  if (cfg.command == "loso") return cmd_loso(cfg);
  if (cfg.command == "sweep") return cmd_sweep(cfg);
  fail(ErrorKind::kInvalidArgument, "unknown command '" + cfg.command + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Label-guided shared-space alignment of multi-subject time series"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string rotation = "orthogonal";
  std::string rerun_path;
  std::vector<std::string> methods;

  auto add_dataset = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--dataset", cfg.dataset, "Dataset manifest (JSON)");
    if (required) opt->required();
  };
  auto add_fit = [&](CLI::App* sub) {
    sub->add_option("--epsilon", cfg.epsilon, "Ridge regularizer of the projectors")
        ->capture_default_str();
    sub->add_option("--gamma", cfg.gamma, "Supervision weight: number, a/T or auto")
        ->capture_default_str();
    sub->add_option("--k", cfg.k, "Shared-space dimension or auto")->capture_default_str();
    sub->add_option("--iters", cfg.iterations, "sha_r iterations")->capture_default_str();
    sub->add_option("--init", cfg.init, "sha_r initialization: kernel_svd or sha")
        ->capture_default_str();
    sub->add_flag("!--lenient", cfg.strict, "Allow per-subject label matrices to differ");
  };
  auto add_synth = [&](CLI::App* sub) {
    sub->add_option("--subjects", cfg.synth.subjects)->capture_default_str();
    sub->add_option("--classes", cfg.synth.classes)->capture_default_str();
    sub->add_option("--instances", cfg.synth.instances_per_class, "Instances per class")
        ->capture_default_str();
    sub->add_option("--length", cfg.synth.instance_length, "Time points per instance")
        ->capture_default_str();
    sub->add_option("--voxels", cfg.synth.voxels)->capture_default_str();
    sub->add_option("--sigma", cfg.synth.noise_sigma, "Noise standard deviation")
        ->capture_default_str();
    sub->add_option("--rotation", rotation, "orthogonal or identity")->capture_default_str();
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed)->capture_default_str();
    sub->add_option("--out", cfg.out, "Output directory")->required();
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_synth(synth);
  add_common(synth);

  auto* align = app.add_subcommand("align", "Fit a shared space and map every subject");
  add_dataset(align, true);
  align->add_option("--method", methods, "sha, sha_r, rha or none (default sha)")->expected(1);
  add_fit(align);
  add_common(align);

  auto* corr = app.add_subcommand("corr", "Correlation diagnostics per method");
  add_dataset(corr, true);
  corr->add_option("--methods", methods, "Comma separated methods (default all four)")
      ->delimiter(',');
  corr->add_flag("--include-rest", cfg.include_rest, "Keep rest time points in rho1");
  add_fit(corr);
  add_common(corr);

  auto* loso = app.add_subcommand("loso", "Leave-one-subject-out classification");
  add_dataset(loso, true);
  loso->add_option("--methods", methods, "Comma separated methods (default sha)")->delimiter(',');
  loso->add_option("--ridge", cfg.ridge, "Classifier ridge")->capture_default_str();
  add_fit(loso);
  add_common(loso);

  auto* sweep = app.add_subcommand("sweep", "Parameter sweeps: gamma, det, tr or noise");
  sweep->add_option("--kind", cfg.sweep.kind, "gamma, det, tr or noise")->required();
  sweep->add_option("--grid", cfg.sweep.grid, "Comma separated grid (a/T allowed)")
      ->delimiter(',')
      ->required();
  sweep->add_option("--timepoints", cfg.sweep.timepoints, "T for det sweeps");
  add_dataset(sweep, false);
  sweep->add_option("--methods", methods, "Comma separated methods (default sha)")
      ->delimiter(',');
  sweep->add_option("--ridge", cfg.ridge, "Classifier ridge")->capture_default_str();
  sweep->add_flag("--include-rest", cfg.include_rest, "Keep rest time points in rho1");
  add_fit(sweep);
  add_synth(sweep);
  add_common(sweep);

  auto* rerun = app.add_subcommand("rerun", "Execute a saved run_config.json again");
  rerun->add_option("config", rerun_path, "Path to run_config.json")->required();
  std::string rerun_out;
  rerun->add_option("--out", rerun_out, "Override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (rerun->parsed()) {
      std::ifstream f(rerun_path);
      require(static_cast<bool>(f), ErrorKind::kIo, "cannot open " + rerun_path);
      json doc;
      try {
        doc = json::parse(f);
      } catch (const json::exception& e) {
        fail(ErrorKind::kSchema, rerun_path + ": " + e.what());
      }
      RunConfig saved = run_config_from_json(doc);
      if (!rerun_out.empty()) saved.out = rerun_out;
      execute(saved);
      out << saved.out << '\n';
      return kExitOk;
    }
    if (methods.empty()) {
      methods = corr->parsed() ? std::vector<std::string>{"none", "rha", "sha", "sha_r"}
                               : std::vector<std::string>{"sha"};
    }
    cfg.methods = methods;
    cfg.synth.rotation = parse_rotation(rotation);
    cfg.command = app.get_subcommands().front()->get_name();
    execute(cfg);
    out << cfg.out << '\n';
    return kExitOk;
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kExitInternal;
  }
}

}  // namespace supalign::cli
