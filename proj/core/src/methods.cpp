#include "mdt/methods.hpp"

#include <algorithm>

namespace mdt {
namespace {

Strategy strategy_of(const std::string& method) {
  if (method == "mdt-rand") return Strategy::Rand;
  if (method == "mdt-cvx-rand") return Strategy::CvxRand;
  if (method == "mdt-direct") return Strategy::Direct;
  if (method == "mdt-bs") return Strategy::Beam;
  if (method == "mdt-cst") return Strategy::Contrastive;
  throw Error("not an MDT method: " + method);
}

MethodEmbedding from_map(const DiffusionMap& map) {
  MethodEmbedding out;
  out.embedding = map.embedding;
  out.spectrum = map.singular_values;
  return out;
}

}  // namespace

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"mdt-rand", "mdt-cvx-rand", "mdt-direct", "mdt-bs", "mdt-cst",
                                              "ad",       "id",           "pad",        "mvd",    "crdiff",
                                              "comdiff"};
  return names;
}

bool MethodConfig::is_mdt() const { return method.starts_with("mdt-"); }

bool MethodConfig::stochastic() const { return method == "mdt-rand" || method == "mdt-cvx-rand"; }

void MethodConfig::validate() const {
  const auto& names = method_names();
  if (std::find(names.begin(), names.end(), method) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw Error("unknown method '" + method + "' (valid: " + list + ")");
  }
  if (t && *t < 1) throw Error("t must be >= 1");
  if (powers) {
    for (int p : *powers) {
      if (p < 1) throw Error("powers must be >= 1");
    }
  }
  search.validate();
}

MethodConfig MethodConfig::from_json(const nlohmann::json& j) {
  MethodConfig c;
  if (j.contains("method")) c.method = j.at("method").get<std::string>();
  if (j.contains("t") && !j.at("t").is_null()) c.t = j.at("t").get<int>();
  if (j.contains("powers") && !j.at("powers").is_null()) c.powers = j.at("powers").get<std::vector<int>>();
  if (j.contains("crdiff_variant")) {
    const auto v = j.at("crdiff_variant").get<std::string>();
    if (v == "symmetric") {
      c.crdiff_variant = CrossDiffusionVariant::Symmetric;
    } else if (v == "printed") {
      c.crdiff_variant = CrossDiffusionVariant::Printed;
    } else {
      throw Error("crdiff_variant must be 'symmetric' or 'printed'");
    }
  }
  nlohmann::json search = j;
  search.erase("method");
  search.erase("powers");
  search.erase("crdiff_variant");
  search.erase("strategy");
  c.search = SearchConfig::from_json(search);
  if (c.is_mdt() && std::find(method_names().begin(), method_names().end(), c.method) != method_names().end()) {
    c.search.strategy = strategy_of(c.method);
  }
  c.validate();
  return c;
}

nlohmann::json MethodConfig::to_json() const {
  nlohmann::json j = search.to_json();
  j.erase("strategy");
  j["method"] = method;
  j["t"] = t ? nlohmann::json(*t) : nlohmann::json(nullptr);
  j["powers"] = powers ? nlohmann::json(*powers) : nlohmann::json(nullptr);
  j["crdiff_variant"] = crdiff_variant == CrossDiffusionVariant::Symmetric ? "symmetric" : "printed";
  return j;
}

MethodEmbedding embed(const MultiViewDataset& data, const ViewOperators& ops, const MethodConfig& config, Index l,
                      int k, std::uint64_t seed, std::size_t threads) {
  config.validate();
  const Index n = ops.operators.front().size();
  if (l < 1 || l > n) throw Error("embedding dimension must lie in [1, N]");
  const std::span<const TransitionMatrix> views(ops.operators);

  if (config.is_mdt()) {
    SearchConfig sc = config.search;
    sc.strategy = strategy_of(config.method);
    sc.seed = seed;
    sc.threads = threads;
    if (config.t) sc.t = config.t;
    VariantResult r = run_variant(data, ops, sc, k, l);
    MethodEmbedding out = from_map(r.map);
    out.trajectory = r.search.trajectory;
    out.resolved_t = r.resolved_t;
    out.details = {{"t_from_elbow", r.t_from_elbow}, {"trajectory_length", r.search.trajectory.length()}};
    out.warnings = r.search.warnings;
    out.search = std::move(r.search);
    return out;
  }

  const OperatorSet canonical = OperatorSet::canonical(ops.operators);
  const int t_max = config.search.t_max;
  if (config.method == "ad") {
    const Trajectory tau = alternating_trajectory(views.size());
    MethodEmbedding out = from_map(diffusion_map(compose(canonical, tau), l));
    out.trajectory = tau;
    return out;
  }
  if (config.method == "id") {
    const std::vector<int> powers = config.powers ? *config.powers : integrated_diffusion_powers(views, t_max);
    if (powers.size() != views.size()) throw Error("id needs one power per view");
    const Trajectory tau = integrated_trajectory(powers);
    MethodEmbedding out = from_map(diffusion_map(compose(canonical, tau), l));
    out.trajectory = tau;
    out.details["powers"] = powers;
    return out;
  }
  if (config.method == "pad") {
    const int t = config.t ? *config.t : powered_alternating_time(views, t_max);
    const Trajectory tau = powered_alternating_trajectory(views.size(), t);
    MethodEmbedding out = from_map(diffusion_map(compose(canonical, tau), l));
    out.trajectory = tau;
    out.resolved_t = t;
    return out;
  }

  BaselineEmbedding b = [&] {
    if (config.method == "mvd") return mvd(ops.kernels, l, config.t.value_or(1));
    if (config.method == "crdiff") {
      return cross_diffusion_embedding(views, l, config.t.value_or(kDefaultCrossDiffusionTime), config.crdiff_variant);
    }
    return composite_embedding(views, l);
  }();
  MethodEmbedding out;
  out.embedding = std::move(b.embedding);
  out.spectrum = std::move(b.spectrum);
  out.details = b.params;
  if (b.params.contains("t")) out.resolved_t = b.params.at("t").get<int>();
  return out;
}

}  // namespace mdt
