#include "cli.hpp"

#include "mdt/cluster.hpp"
#include "mdt/datasets.hpp"
#include "mdt/io.hpp"
#include "mdt/learn.hpp"
#include "mdt/methods.hpp"
#include "mdt/parallel.hpp"
#include "mdt/time_select.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>

namespace mdt::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kGenerators{"helix-a", "helix-b", "deformed-plane", "blobs", "multikernel", "noisy-pair"};

std::string join(const std::vector<std::string>& xs, const std::string& sep = ", ") {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : sep) + x;
  return out;
}

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out;
  std::string config;
};

struct DataOptions {
  std::string data_dir;
  std::vector<std::string> views;
  std::string labels;
  bool header = false;
  std::optional<int> knn;
  bool identity = false;
  std::optional<double> pagerank;
  std::optional<int> smoothing;
  std::string mixer = "uniform";
};

struct MethodOptions {
  std::string method = "mdt-rand";
  std::optional<int> t;
  std::optional<std::vector<int>> powers;
  int budget = 100;
  int beam_width = 5;
  int iterations = 200;
  double lr = 0.05;
  int t_max = kDefaultTMax;
  std::string crdiff_variant = "symmetric";
};

struct GenOptions {
  std::string generator;
  std::optional<Index> n;
  std::string input;
  std::string input_labels;
  double s = 0.0;
  std::string mode = "gaussian_pair";
  int clusters = 4;
  int view_count = 3;
  int noise_views = 1;
  double separation = 8.0;
  double std_dev = 1.0;
};

void add_data_options(CLI::App* sub, DataOptions& d) {
  sub->add_option("--data", d.data_dir, "Directory written by 'gen' (reads its meta.json)");
  sub->add_option("--views", d.views, "View CSV files, one per view")->delimiter(',');
  sub->add_option("--labels", d.labels, "Single-column CSV of ground-truth labels");
  sub->add_flag("--header", d.header, "Input CSVs start with a header row");
  sub->add_option("--knn", d.knn, "Neighbors kept per row (default ceil(ln N))");
  sub->add_flag("--identity", d.identity, "Add the identity operator to the set");
  sub->add_option("--pagerank", d.pagerank, "Add per-view PageRank operators with this alpha");
  sub->add_option("--smoothing", d.smoothing, "Add per-view smoothing operators P^t'");
  sub->add_option("--pagerank-mixer", d.mixer, "PageRank mixer: uniform or smoothed");
}

void add_method_options(CLI::App* sub, MethodOptions& m, bool with_method) {
  if (with_method) sub->add_option("--method", m.method, "Method: " + join(method_names()));
  sub->add_option("--t", m.t, "Diffusion time / trajectory length (elbow when omitted)");
  sub->add_option("--powers", m.powers, "Per-view powers for id")->delimiter(',');
  sub->add_option("--budget", m.budget, "Objective evaluations for searches");
  sub->add_option("--beam-width", m.beam_width, "Beam width");
  sub->add_option("--iterations", m.iterations, "ADAM iterations");
  sub->add_option("--lr", m.lr, "ADAM learning rate");
  sub->add_option("--t-max", m.t_max, "Largest t on the entropy curve");
  sub->add_option("--crdiff-variant", m.crdiff_variant, "Cross-diffusion recursion: symmetric or printed");
}

void add_gen_options(CLI::App* sub, GenOptions& g) {
  sub->add_option("--n", g.n, "Number of points");
  sub->add_option("--input", g.input, "Point cloud CSV for multikernel / noisy-pair");
  sub->add_option("--input-labels", g.input_labels, "Labels CSV carried over by noisy-pair");
  sub->add_option("--s", g.s, "Noise factor in [0, 1)");
  sub->add_option("--mode", g.mode, "noisy-pair mode: gaussian_pair or gaussian_dropout");
  sub->add_option("--clusters", g.clusters, "blobs: number of clusters");
  sub->add_option("--view-count", g.view_count, "blobs: number of views");
  sub->add_option("--noise-views", g.noise_views, "blobs: trailing pure-noise views");
  sub->add_option("--separation", g.separation, "blobs: distance between means in standard deviations");
  sub->add_option("--std", g.std_dev, "blobs: within-cluster standard deviation");
}

// JSON value to the strings CLI11 would have received on the command line.
std::vector<std::string> to_cli_strings(const json& v) {
  std::vector<std::string> out;
  auto one = [](const json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(one(x));
  } else {
    out.push_back(one(v));
  }
  return out;
}

// Config values fill only options that were not given on the command line.
void merge_config(CLI::App* app, const json& obj) {
  if (!obj.is_object()) return;
  for (CLI::Option* opt : app->get_options()) {
    if (opt->count() > 0) continue;
    std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    std::string alt = name;
    std::replace(alt.begin(), alt.end(), '-', '_');
    const json* v = obj.contains(name) ? &obj.at(name) : obj.contains(alt) ? &obj.at(alt) : nullptr;
    if (v == nullptr || v->is_null() || v->is_object()) continue;
    opt->add_result(to_cli_strings(*v));
    opt->run_callback();
  }
}

json echo_options(const CLI::App* app) {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || opt->count() == 0) continue;
    json vals = json::array();
    for (const auto& r : opt->results()) {
      // Numbers and booleans keep their type in the echo.
      const json parsed = json::parse(r, nullptr, false);
      vals.push_back(parsed.is_number() || parsed.is_boolean() ? parsed : json(r));
    }
    j[name] = vals.size() == 1 ? vals.front() : vals;
  }
  return j;
}

struct Loaded {
  MultiViewDataset data;
  ViewOperators ops;
};

Loaded load_data(const DataOptions& d, std::size_t threads) {
  if (d.data_dir.empty() == d.views.empty()) throw UsageError("give exactly one of --data or --views");
  std::vector<fs::path> views;
  std::optional<fs::path> labels;
  std::vector<fs::path> kernels;
  if (!d.data_dir.empty()) {
    const fs::path dir(d.data_dir);
    std::ifstream in(dir / "meta.json");
    if (!in) throw Error("cannot open " + (dir / "meta.json").string());
    json meta;
    try {
      meta = json::parse(in);
    } catch (const json::exception& e) {
      throw Error((dir / "meta.json").string() + ": " + e.what());
    }
    for (const auto& v : meta.at("views")) views.push_back(dir / v.get<std::string>());
    if (meta.contains("labels") && !meta.at("labels").is_null()) labels = dir / meta.at("labels").get<std::string>();
    if (meta.contains("kernels")) {
      for (const auto& k : meta.at("kernels")) kernels.push_back(dir / k.get<std::string>());
    }
  } else {
    for (const auto& v : d.views) views.emplace_back(v);
  }
  if (!d.labels.empty()) labels = fs::path(d.labels);

  MultiViewDataset data = load_views(views, labels, d.header);
  const std::optional<int> knn = d.knn;
  if (!kernels.empty()) {
    std::vector<KernelMatrix> ks;
    for (const auto& p : kernels) ks.emplace_back(io::read_csv_matrix(p, d.header), 1.0);
    return Loaded{std::move(data), operators_from_kernels(std::move(ks), knn)};
  }
  CanonicalConfig cc;
  cc.k_nn = knn;
  cc.threads = threads;
  ViewOperators ops = build_canonical_set(data, cc);
  return Loaded{std::move(data), std::move(ops)};
}

SetConfig set_config(const DataOptions& d) {
  SetConfig s;
  s.include_identity = d.identity;
  s.pagerank_alpha = d.pagerank;
  s.smoothing_power = d.smoothing;
  if (d.mixer == "uniform") {
    s.pagerank_mixer = SetConfig::Mixer::Uniform;
  } else if (d.mixer == "smoothed") {
    s.pagerank_mixer = SetConfig::Mixer::Smoothed;
  } else {
    throw UsageError("--pagerank-mixer must be uniform or smoothed");
  }
  return s;
}

MethodConfig method_config(const std::string& method, const MethodOptions& m, const DataOptions& d,
                           std::uint64_t seed) {
  const auto& names = method_names();
  if (std::find(names.begin(), names.end(), method) == names.end()) {
    throw UsageError("unknown method '" + method + "' (valid: " + join(names) + ")");
  }
  MethodConfig c;
  c.method = method;
  c.t = m.t;
  c.powers = m.powers;
  if (m.crdiff_variant == "symmetric") {
    c.crdiff_variant = CrossDiffusionVariant::Symmetric;
  } else if (m.crdiff_variant == "printed") {
    c.crdiff_variant = CrossDiffusionVariant::Printed;
  } else {
    throw UsageError("--crdiff-variant must be symmetric or printed");
  }
  c.search.budget = m.budget;
  c.search.beam_width = m.beam_width;
  c.search.iterations = m.iterations;
  c.search.learning_rate = m.lr;
  c.search.t_max = m.t_max;
  c.search.set = set_config(d);
  c.search.seed = seed;
  try {
    c.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

int resolve_k(std::optional<int> k, const MultiViewDataset& data, int fallback) {
  if (k) return *k;
  if (data.labels()) return PartitionLabels::from_raw(*data.labels()).k();
  return fallback;
}

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, const std::string& contents) {
    io::write_text_atomic(dir_ / name, contents);
    outputs_.push_back((dir_ / name).string());
  }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }
  void csv(const std::string& name, const Matrix& m, const std::vector<std::string>& header = {}) {
    text(name, io::matrix_to_csv(m, header));
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& outputs() const { return outputs_; }

 private:
  fs::path dir_;
  std::vector<std::string> outputs_;
};

std::vector<std::string> column_names(const std::string& prefix, Index count) {
  std::vector<std::string> out;
  for (Index c = 0; c < count; ++c) out.push_back(prefix + std::to_string(c + 1));
  return out;
}

json nullable(std::optional<int> v) { return v ? json(*v) : json(nullptr); }

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

MultiViewDataset generate(const GenOptions& g, std::uint64_t seed, json& params,
                          std::vector<KernelMatrix>* kernels) {
  if (std::find(kGenerators.begin(), kGenerators.end(), g.generator) == kGenerators.end()) {
    throw UsageError("unknown generator '" + g.generator + "' (valid: " + join(kGenerators) + ")");
  }
  if (g.generator == "helix-a" || g.generator == "helix-b") {
    const Index n = g.n.value_or(kHelixDefaultN);
    params = {{"n", n}};
    return g.generator == "helix-a" ? gen_helix_a(n) : gen_helix_b(n);
  }
  if (g.generator == "deformed-plane") {
    const Index n = g.n.value_or(kDeformedPlaneDefaultN);
    params = {{"n", n}};
    return gen_deformed_plane(n, seed);
  }
  if (g.generator == "blobs") {
    BlobsConfig b;
    b.n = g.n.value_or(b.n);
    b.clusters = g.clusters;
    b.views = g.view_count;
    b.noise_views = g.noise_views;
    b.separation = g.separation;
    b.std_dev = g.std_dev;
    b.seed = seed;
    params = {{"n", b.n},          {"clusters", b.clusters},      {"views", b.views},
              {"noise_views", b.noise_views}, {"separation", b.separation}, {"std", b.std_dev}};
    return gen_blobs(b);
  }
  if (g.input.empty()) throw UsageError(g.generator + " needs --input");
  const ViewDataset x(io::read_csv_matrix(g.input), 1);
  std::optional<std::vector<int>> labels;
  if (!g.input_labels.empty()) labels = io::read_labels(g.input_labels);
  if (g.generator == "multikernel") {
    params = {{"input", g.input}};
    *kernels = gen_multikernel_views(x);
    return MultiViewDataset({x}, labels);
  }
  NoiseMode mode;
  if (g.mode == "gaussian_pair") {
    mode = NoiseMode::GaussianPair;
  } else if (g.mode == "gaussian_dropout") {
    mode = NoiseMode::GaussianDropout;
  } else {
    throw UsageError("--mode must be gaussian_pair or gaussian_dropout");
  }
  params = {{"input", g.input}, {"s", g.s}, {"mode", g.mode}};
  return gen_noisy_pair(x, g.s, mode, seed, labels);
}

void write_dataset(Writer& w, const MultiViewDataset& data, const std::vector<KernelMatrix>& kernels,
                   const std::string& generator, const json& params, std::uint64_t seed) {
  json meta{{"generator", generator}, {"params", params}, {"seed", seed}, {"n", data.size()}};
  json views = json::array();
  for (std::size_t v = 0; v < data.view_count(); ++v) {
    const std::string name = "view" + std::to_string(v + 1) + ".csv";
    w.csv(name, data.view(v).points());
    views.push_back(name);
  }
  meta["views"] = views;
  meta["labels"] = nullptr;
  if (data.labels()) {
    std::string text;
    for (int l : *data.labels()) text += std::to_string(l) + "\n";
    w.text("labels.csv", text);
    meta["labels"] = "labels.csv";
  }
  if (!kernels.empty()) {
    json ks = json::array();
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      const std::string name = "kernel" + std::to_string(k + 1) + ".csv";
      w.csv(name, kernels[k].values());
      ks.push_back(name);
    }
    meta["kernels"] = ks;
  }
  if (data.latent().size() > 0) {
    json latent = json::object();
    for (Index c = 0; c < data.latent().cols(); ++c) {
      const Vector col = data.latent().col(c);
      latent["x" + std::to_string(c + 1)] = std::vector<double>(col.begin(), col.end());
    }
    meta["latent"] = latent;
  }
  w.json_file("meta.json", meta);
}

json trajectory_json(const std::optional<Trajectory>& t, const OperatorSet* set = nullptr) {
  if (!t) return nullptr;
  json j = t->to_json();
  if (set != nullptr && t->kind() == Trajectory::Kind::Discrete) {
    std::vector<std::string> labels;
    for (std::size_t i : t->indices()) labels.push_back(set->tag(i).label());
    j["path"] = join(labels, "-");
  }
  return j;
}

void write_embedding(Writer& w, const MethodEmbedding& e) {
  w.csv("embedding.csv", e.embedding, column_names("psi", e.embedding.cols()));
  w.csv("singular_values.csv", Matrix(e.spectrum), {"value"});
}

struct Outcome {
  json results = json::object();
  std::vector<std::string> warnings;
};

Outcome cmd_gen(const GenOptions& g, const Globals& gl, Writer& w) {
  json params;
  std::vector<KernelMatrix> kernels;
  const MultiViewDataset data = generate(g, gl.seed, params, &kernels);
  write_dataset(w, data, kernels, g.generator, params, gl.seed);
  return {};
}

Outcome cmd_embed(const DataOptions& d, const MethodOptions& m, std::optional<int> dim, std::optional<int> k,
                  bool skip_first, const Globals& gl, Writer& w) {
  const MethodConfig config = method_config(m.method, m, d, gl.seed);
  const Loaded in = load_data(d, gl.threads);
  const int l = dim.value_or(2);
  const int kk = resolve_k(k, in.data, l);
  MethodEmbedding e = embed(in.data, in.ops, config, l + (skip_first ? 1 : 0), kk, gl.seed, gl.threads);
  if (skip_first) {
    // Drop the trivial near-constant leading component.
    e.embedding = e.embedding.rightCols(e.embedding.cols() - 1).eval();
    if (e.spectrum.size() > 0) e.spectrum = e.spectrum.tail(e.spectrum.size() - 1).eval();
  }
  const OperatorSet set = enrich_set(in.ops.operators, config.search.set);
  write_embedding(w, e);
  json traj{{"method", config.method},
            {"trajectory", trajectory_json(e.trajectory, config.is_mdt() || !e.trajectory ? &set : nullptr)},
            {"resolved_t", nullable(e.resolved_t)},
            {"details", e.details}};
  if (e.search) traj["search"] = e.search->to_json();
  w.json_file("trajectory.json", traj);

  Outcome o;
  o.results = {{"method", config.method}, {"resolved_t", nullable(e.resolved_t)}, {"config", config.to_json()}};
  o.warnings = in.ops.warnings;
  o.warnings.insert(o.warnings.end(), e.warnings.begin(), e.warnings.end());
  return o;
}

Outcome cmd_learn(const DataOptions& d, MethodOptions m, const std::string& strategy, std::optional<int> dim,
                  std::optional<int> k, const Globals& gl, Writer& w) {
  static const std::map<Strategy, std::string> method_of{{Strategy::Rand, "mdt-rand"},
                                                         {Strategy::CvxRand, "mdt-cvx-rand"},
                                                         {Strategy::Beam, "mdt-bs"},
                                                         {Strategy::Direct, "mdt-direct"},
                                                         {Strategy::Contrastive, "mdt-cst"}};
  Strategy s;
  try {
    s = strategy_from_string(strategy);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const MethodConfig config = method_config(method_of.at(s), m, d, gl.seed);
  const Loaded in = load_data(d, gl.threads);
  const int l = dim.value_or(2);
  const int kk = resolve_k(k, in.data, l);
  const MethodEmbedding e = embed(in.data, in.ops, config, l, kk, gl.seed, gl.threads);
  const OperatorSet set = enrich_set(in.ops.operators, config.search.set);
  write_embedding(w, e);
  json result = e.search->to_json();
  result["trajectory"] = trajectory_json(e.trajectory, &set);
  w.json_file("search.json", {{"strategy", to_string(s)},
                              {"resolved_t", nullable(e.resolved_t)},
                              {"t_from_elbow", e.details.value("t_from_elbow", false)},
                              {"k", kk},
                              {"seed", gl.seed},
                              {"result", result}});
  Outcome o;
  o.results = {{"strategy", to_string(s)}, {"resolved_t", nullable(e.resolved_t)}, {"score", nullable(e.search->score)}};
  o.warnings = in.ops.warnings;
  o.warnings.insert(o.warnings.end(), e.warnings.begin(), e.warnings.end());
  return o;
}

Outcome cmd_entropy(const DataOptions& d, int t_max, const Globals& gl, Writer& w) {
  if (t_max < 3) throw UsageError("--t-max must be >= 3");
  const Loaded in = load_data(d, gl.threads);
  const OperatorSet set = enrich_set(in.ops.operators, set_config(d));
  const EntropyCurve curve = entropy_curve(set, {}, t_max);
  std::string csv = "t,entropy,is_elbow\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    csv += std::to_string(curve.times[i]) + "," + io::format_double(curve.entropies[i]) + "," +
           (curve.times[i] == curve.elbow ? "true" : "false") + "\n";
  }
  w.text("entropy.csv", csv);
  Outcome o;
  o.results = {{"elbow", curve.elbow}, {"fallback", curve.fallback}};
  o.warnings = in.ops.warnings;
  if (curve.fallback) o.warnings.push_back("no knee found on the entropy curve; elbow taken from discrete curvature");
  return o;
}

Outcome cmd_cluster(const DataOptions& d, const MethodOptions& m, std::optional<int> k, int runs, const Globals& gl,
                    Writer& w) {
  const MethodConfig config = method_config(m.method, m, d, gl.seed);
  if (runs < 1) throw UsageError("--runs must be >= 1");
  const Loaded in = load_data(d, gl.threads);
  if (!in.data.labels()) throw UsageError("cluster needs ground-truth labels (--labels)");
  const int kk = resolve_k(k, in.data, 2);
  const ClusterRunReport report = cluster_pipeline(in.data, in.ops, config, kk, runs, gl.seed, gl.threads);
  json j = report.to_json();
  j["k"] = kk;
  w.json_file("report.json", j);
  std::string csv = "run,seed,ami\n";
  for (int r = 0; r < runs; ++r) {
    csv += std::to_string(r) + "," + std::to_string(gl.seed + static_cast<std::uint64_t>(r)) + "," +
           io::format_double(report.run_ami[static_cast<std::size_t>(r)]) + "\n";
  }
  w.text("runs.csv", csv);
  Outcome o;
  o.results = {{"ami_mean", report.ami_mean}, {"ami_std", report.ami_std}, {"resolved_t", nullable(report.resolved_t)}};
  o.warnings = report.warnings;
  return o;
}

Outcome cmd_benchmark(const DataOptions& d, const GenOptions& g, const MethodOptions& m,
                      const std::vector<std::string>& methods_in, std::optional<int> k, int runs, const Globals& gl,
                      Writer& w) {
  if (runs < 1) throw UsageError("--runs must be >= 1");
  std::optional<Loaded> in;
  if (!g.generator.empty()) {
    if (!d.data_dir.empty() || !d.views.empty()) throw UsageError("give either --generator or input data, not both");
    json params;
    std::vector<KernelMatrix> kernels;
    MultiViewDataset data = generate(g, gl.seed, params, &kernels);
    const std::optional<int> knn = d.knn;
    if (!kernels.empty()) {
      ViewOperators ops = operators_from_kernels(std::move(kernels), knn);
      in.emplace(Loaded{std::move(data), std::move(ops)});
    } else {
      CanonicalConfig cc;
      cc.k_nn = knn;
      cc.threads = gl.threads;
      ViewOperators ops = build_canonical_set(data, cc);
      in.emplace(Loaded{std::move(data), std::move(ops)});
    }
  } else {
    in.emplace(load_data(d, gl.threads));
  }
  if (!in->data.labels()) throw UsageError("benchmark needs ground-truth labels");
  const int kk = resolve_k(k, in->data, 2);

  Outcome o;
  o.warnings = in->ops.warnings;
  std::vector<std::string> methods;
  const bool all = methods_in.empty() || (methods_in.size() == 1 && methods_in.front() == "all");
  for (const auto& name : all ? method_names() : methods_in) {
    if (all && name == "comdiff" && in->ops.operators.size() != 2) {
      o.warnings.push_back("comdiff skipped: two-view method");
      continue;
    }
    if (std::find(methods.begin(), methods.end(), name) == methods.end()) methods.push_back(name);
  }
  // PRR needs the random-trajectory baseline, so it always runs.
  if (std::find(methods.begin(), methods.end(), "mdt-rand") == methods.end()) methods.insert(methods.begin(), "mdt-rand");

  std::vector<ClusterRunReport> reports;
  for (const auto& name : methods) {
    const MethodConfig config = method_config(name, m, d, gl.seed);
    reports.push_back(cluster_pipeline(in->data, in->ops, config, kk, runs, gl.seed, gl.threads));
  }
  std::map<std::string, double> scores;
  double baseline = 0.0;
  for (const auto& r : reports) {
    scores[r.method] = r.ami_mean;
    if (r.method == "mdt-rand") baseline = r.ami_mean;
  }
  const auto ratios = prr(scores, baseline);

  json rows = json::array();
  std::string csv = "method,ami_mean,ami_std,prr,resolved_t\n";
  for (const auto& r : reports) {
    json j = r.to_json();
    j["prr"] = ratios.at(r.method);
    rows.push_back(j);
    csv += r.method + "," + io::format_double(r.ami_mean) + "," + io::format_double(r.ami_std) + "," +
           io::format_double(ratios.at(r.method)) + "," + (r.resolved_t ? std::to_string(*r.resolved_t) : "") + "\n";
    for (const auto& wmsg : r.warnings) {
      // Data-level warnings were already reported once above.
      if (std::find(in->ops.warnings.begin(), in->ops.warnings.end(), wmsg) != in->ops.warnings.end()) continue;
      o.warnings.push_back(r.method + ": " + wmsg);
    }
  }
  w.json_file("benchmark.json", {{"k", kk}, {"runs", runs}, {"seed", gl.seed}, {"baseline", "mdt-rand"}, {"methods", rows}});
  w.text("benchmark.csv", csv);
  o.results = {{"methods", methods}, {"k", kk}};
  return o;
}

inline constexpr double kTreeLimit = 1e5;

Outcome cmd_tree(const DataOptions& d, int depth, std::optional<int> k, const Globals& gl, Writer& w) {
  if (depth < 1) throw UsageError("--depth must be >= 1");
  const Loaded in = load_data(d, gl.threads);
  const OperatorSet set = enrich_set(in.ops.operators, set_config(d));
  const double branching = static_cast<double>(set.size());
  double total = 0.0;
  for (int dd = 1; dd <= depth; ++dd) total += std::pow(branching, dd);
  if (total > kTreeLimit) {
    throw UsageError("tree of depth " + std::to_string(depth) + " over " + std::to_string(set.size()) +
                     " operators has " + io::format_double(total) + " paths (limit 1e5); use a smaller --depth");
  }
  const int kk = resolve_k(k, in.data, 2);
  std::optional<PartitionLabels> truth;
  if (in.data.labels()) truth = PartitionLabels::from_raw(*in.data.labels());

  std::vector<std::vector<std::size_t>> paths;
  std::vector<std::vector<std::size_t>> level{{}};
  for (int dd = 1; dd <= depth; ++dd) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& p : level) {
      for (std::size_t s = 0; s < set.size(); ++s) {
        auto c = p;
        c.push_back(s);
        next.push_back(c);
      }
    }
    paths.insert(paths.end(), next.begin(), next.end());
    level = std::move(next);
  }
  const std::uint64_t qseed = q_ch_seed(gl.seed);
  std::vector<double> scores(paths.size());
  std::vector<double> amis(paths.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(paths.size(), gl.threads, [&](std::size_t i) {
    const QchEvaluation q = q_ch_evaluate(compose(set, Trajectory::discrete(paths[i])), in.data, kk, {}, qseed);
    scores[i] = q.score;
    if (truth) amis[i] = ami(*truth, q.partition);
  });
  std::string csv = "path,depth,q_ch,ami\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::vector<std::string> labels;
    for (std::size_t s : paths[i]) labels.push_back(set.tag(s).label());
    csv += join(labels, "-") + "," + std::to_string(paths[i].size()) + "," + io::format_double(scores[i]) + "," +
           (truth ? io::format_double(amis[i]) : "") + "\n";
  }
  w.text("tree.csv", csv);
  Outcome o;
  o.results = {{"rows", paths.size()}, {"k", kk}};
  o.warnings = in.ops.warnings;
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view diffusion trajectories"};
  app.name("mdt");
  app.require_subcommand(1);
  app.fallthrough();
  Globals gl;
  app.add_option("--seed", gl.seed, "Seed for every random stream");
  app.add_option("--threads", gl.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", gl.out, "Output directory");
  app.add_option("--config", gl.config, "JSON config; command-line flags take precedence");

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic multi-view dataset");
  gen->add_option("generator", gen_opts.generator, "One of: " + join(kGenerators));
  add_gen_options(gen, gen_opts);

  DataOptions data_opts;
  MethodOptions method_opts;
  std::optional<int> dim;
  bool skip_first = false;
  std::optional<int> k;
  int runs = 10;
  int t_max = kDefaultTMax;
  int depth = 3;
  std::string strategy;
  std::vector<std::string> methods;

  auto* embed_cmd = app.add_subcommand("embed", "Embed a dataset with one method");
  add_data_options(embed_cmd, data_opts);
  add_method_options(embed_cmd, method_opts, true);
  embed_cmd->add_option("--dim", dim, "Embedding dimension (default 2)");
  embed_cmd->add_flag("--skip-first", skip_first, "Drop the leading (near-constant) component");
  embed_cmd->add_option("--k", k, "Clusters for the CH objective (default: label count, else dim)");

  auto* entropy_cmd = app.add_subcommand("entropy", "Singular-entropy curve of the expected operator");
  add_data_options(entropy_cmd, data_opts);
  entropy_cmd->add_option("--t-max", t_max, "Largest t");

  auto* learn_cmd = app.add_subcommand("learn", "Learn a trajectory with one strategy");
  add_data_options(learn_cmd, data_opts);
  add_method_options(learn_cmd, method_opts, false);
  learn_cmd->add_option("--strategy", strategy, "rand, cvx_rand, beam, direct or contrastive");
  learn_cmd->add_option("--dim", dim, "Embedding dimension (default 2)");
  learn_cmd->add_option("--k", k, "Clusters for the CH objective (default: label count, else dim)");

  auto* cluster_cmd = app.add_subcommand("cluster", "k-means on an embedding over repeated runs");
  add_data_options(cluster_cmd, data_opts);
  add_method_options(cluster_cmd, method_opts, true);
  cluster_cmd->add_option("--k", k, "Number of clusters (default: label count)");
  cluster_cmd->add_option("--runs", runs, "Number of runs");

  auto* bench_cmd = app.add_subcommand("benchmark", "Cluster with several methods and report PRR");
  add_data_options(bench_cmd, data_opts);
  add_method_options(bench_cmd, method_opts, false);
  bench_cmd->add_option("--generator", gen_opts.generator, "Generate the data instead: " + join(kGenerators));
  add_gen_options(bench_cmd, gen_opts);
  bench_cmd->add_option("--methods", methods, "Comma-separated methods, or 'all'")->delimiter(',');
  bench_cmd->add_option("--k", k, "Number of clusters (default: label count)");
  bench_cmd->add_option("--runs", runs, "Runs per method");

  auto* tree_cmd = app.add_subcommand("tree", "Score every discrete trajectory up to a depth");
  add_data_options(tree_cmd, data_opts);
  tree_cmd->add_option("--depth", depth, "Maximum depth");
  tree_cmd->add_option("--k", k, "Clusters for the CH objective (default: label count, else 2)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'mdt --help' for usage\n";
    return kExitUsage;
  }
  CLI::App* sub = app.get_subcommands().front();

  const auto start = std::chrono::steady_clock::now();
  try {
    json config_file = json::object();
    if (!gl.config.empty()) {
      std::ifstream in(gl.config);
      if (!in) throw UsageError("cannot open config file " + gl.config);
      try {
        config_file = json::parse(in);
      } catch (const json::exception& e) {
        throw UsageError("config file " + gl.config + ": " + e.what());
      }
      merge_config(&app, config_file);
      if (config_file.contains(sub->get_name())) merge_config(sub, config_file.at(sub->get_name()));
      merge_config(sub, config_file);
    }
    if (gl.out.empty()) throw UsageError("--out is required");
    if (gl.threads < 1) throw UsageError("--threads must be >= 1");
    Writer w{fs::path(gl.out)};

    Outcome o;
    const std::string name = sub->get_name();
    if (name == "gen") {
      if (gen_opts.generator.empty()) throw UsageError("gen needs a generator name (valid: " + join(kGenerators) + ")");
      o = cmd_gen(gen_opts, gl, w);
    } else if (name == "embed") {
      o = cmd_embed(data_opts, method_opts, dim, k, skip_first, gl, w);
    } else if (name == "entropy") {
      o = cmd_entropy(data_opts, t_max, gl, w);
    } else if (name == "learn") {
      if (strategy.empty()) throw UsageError("learn needs --strategy");
      o = cmd_learn(data_opts, method_opts, strategy, dim, k, gl, w);
    } else if (name == "cluster") {
      o = cmd_cluster(data_opts, method_opts, k, runs, gl, w);
    } else if (name == "benchmark") {
      o = cmd_benchmark(data_opts, gen_opts, method_opts, methods, k, runs, gl, w);
    } else {
      o = cmd_tree(data_opts, depth, k, gl, w);
    }

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json config = echo_options(&app);
    config.update(echo_options(sub));
    if (!config_file.empty()) config["config_file"] = config_file;
    std::vector<std::string> outputs = w.outputs();
    outputs.push_back((w.dir() / "manifest.json").string());
    io::write_text_atomic(w.dir() / "manifest.json", json{{"command", name},
                                                          {"config", config},
                                                          {"outputs", outputs},
                                                          {"timing", seconds},
                                                          {"warnings", o.warnings},
                                                          {"results", o.results}}
                                                         .dump(2) + "\n");
    for (const auto& msg : o.warnings) err << "warning: " << msg << "\n";
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace mdt::cli
